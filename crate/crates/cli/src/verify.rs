// SPDX-License-Identifier: Apache-2.0
//! The verification suite: every acceptance check, each producing one
//! record of a machine-readable report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use superwave_core::potential::{Family, PotentialModel};
use superwave_core::recursion::{
    a0_limit, g_leading, generic_triples, vanishes_by_parity, ACoefficients, CoefficientJets, Component, JetSource, PoleModel,
    XiGrid,
};
use superwave_core::scale::NaturalScaleMap;
use superwave_core::stationary::{
    c2_erf, eckart_reflection_exact, reflection_coefficient, solve_stationary, superadiabatic_amplitudes, FRAME_PHASE,
};
use superwave_core::stokes::StokesData;
use superwave_core::superadiabatic::{defect_scalar, optimal_n, projection_defect, projection_defect_matrix, SuperadiabaticFrame};
use superwave_core::wavepacket::{
    closed_form_field, default_energy_nodes, plancherel_gaussian, EnergySamples, Provenance, ReflectedWave, XGrid,
};
use superwave_core::{Complex64 as C, Error as CoreError};

use crate::config::ExperimentConfig;

/// Bumped whenever a field of the report changes meaning.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: u32,
    pub name: String,
    /// The result the check exercises.
    pub anchor: String,
    /// Labelled measured values.
    pub measured: BTreeMap<String, f64>,
    /// Fitted log–log slope(s) against ε, where the check is a rate.
    pub slope: BTreeMap<String, f64>,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn check(&self, id: u32) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Static description of a check.
#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub id: u32,
    pub name: &'static str,
    pub anchor: &'static str,
    run: fn(&Ctx) -> Run,
}

pub const CHECKS: [CheckSpec; 11] = [
    CheckSpec { id: 1, name: "exact-invariants", anchor: "Wronskian and adiabatic flux conservation", run: invariants },
    CheckSpec { id: 2, name: "coefficient-algebra", anchor: "coefficient recursion identities, parity, pole closed forms", run: algebra },
    CheckSpec { id: 3, name: "a-coefficient-asymptotics", anchor: "large-n limits of the pole coefficients", run: a_asymptotics },
    CheckSpec { id: 4, name: "projection-defect-scaling", anchor: "almost-projection defect order", run: defect_scaling },
    CheckSpec { id: 5, name: "optimal-coupling", anchor: "Gaussian shape of the optimally truncated coupling", run: optimal_coupling },
    CheckSpec { id: 6, name: "erf-birth-profile", anchor: "error-function birth of the reflected amplitude", run: erf_profile_check },
    CheckSpec { id: 7, name: "reflection-oracle", anchor: "exact Eckart reflection and the 2 sin(πγ/2) prefactor", run: reflection },
    CheckSpec { id: 8, name: "plancherel-harness", anchor: "rescaled Fourier–Plancherel identity", run: plancherel },
    CheckSpec { id: 9, name: "wave-field-hierarchy", anchor: "effective, piecewise explicit and Gaussian reflected waves", run: hierarchy },
    CheckSpec { id: 10, name: "norm-formulas", anchor: "closed-form L² norm of the reflected wave", run: norms },
    CheckSpec { id: 11, name: "trajectory", anchor: "classical trajectory of the reflected packet", run: trajectory },
];

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    /// Multiplies tolerance-type thresholds.
    tol: f64,
    quick: bool,
}

#[derive(Default)]
struct Outcome {
    measured: BTreeMap<String, f64>,
    slope: BTreeMap<String, f64>,
    threshold: f64,
    pass: bool,
    detail: String,
}

impl Outcome {
    fn put(&mut self, key: impl Into<String>, v: f64) {
        self.measured.insert(key.into(), v);
    }
}

type Run = Result<Outcome, String>;

fn core<T>(r: Result<T, CoreError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn model(ctx: &Ctx) -> Result<PotentialModel, String> {
    ctx.cfg.model().map_err(|e| e.to_string())
}

fn scale_at(ctx: &Ctx, e: f64) -> Result<(NaturalScaleMap, StokesData), String> {
    let sc = core(NaturalScaleMap::with_config(model(ctx)?, e, ctx.cfg.scale_config()))?;
    let st = core(StokesData::with_scale(&sc))?;
    Ok((sc, st))
}

/// Ladder entries the stationary solver supports.
fn stationary_ladder(ctx: &Ctx) -> Vec<f64> {
    let floor = ctx.cfg.stationary_config().eps_floor;
    ctx.cfg.eps.iter().copied().filter(|e| *e >= floor).collect()
}

fn invariants(ctx: &Ctx) -> Run {
    let (sc, _) = scale_at(ctx, ctx.cfg.energy.e)?;
    let scfg = ctx.cfg.stationary_config();
    let (lo, hi) = scfg.ends(&sc.model);
    let grid = linspace(lo, hi, if ctx.quick { 201 } else { 1201 });
    let thr = 1e-10 * ctx.tol;
    let mut o = Outcome { threshold: thr, pass: true, ..Default::default() };
    for eps in stationary_ladder(ctx) {
        let sol = core(solve_stationary(&sc, eps, &grid, &scfg))?;
        let w = sol.invariant_drift(|s, i| s.wronskian(i));
        let f = sol.invariant_drift(|s, i| s.flux(i));
        o.put(format!("wronskian_drift eps={eps}"), w);
        o.put(format!("flux_drift eps={eps}"), f);
        o.pass &= w <= thr && f <= thr;
    }
    o.detail = "largest relative deviation from the left-end value on the sample grid".into();
    Ok(o)
}

fn algebra(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let e = ctx.cfg.energy.e;
    let thr_res = 1e-10 * ctx.tol;
    let thr_pole = 1e-8 * ctx.tol;
    let mut o = Outcome { threshold: thr_pole, ..Default::default() };
    let comps = [Component::X, Component::Y, Component::Z];

    // differential relations on Taylor jets of the true coupling
    let mut res: f64 = 0.0;
    let mut parity_nonzero = 0usize;
    for x in [-1.5, -0.5, 0.0, 0.3, 1.2] {
        let j = core(CoefficientJets::new(JetSource::Potential { model: &m, e, x }, 9))?;
        for n in 1..=8 {
            let r = j.differential_residuals(n);
            let size = comps.iter().map(|&c| j.derivative(c, n).abs() + j.value(c, n + 1).abs()).sum::<f64>() + f64::MIN_POSITIVE;
            res = res.max(r.iter().map(|v| v.abs()).fold(0.0, f64::max) / size);
            parity_nonzero += comps.iter().filter(|&&c| vanishes_by_parity(c, n) && j.value(c, n) != 0.0).count();
        }
    }
    // parity of the finite-difference grid recursion
    let (sc, st) = scale_at(ctx, e)?;
    let grid = XiGrid::new(-6.0, 6.0, 1201);
    let theta = |xi: f64| sc.theta_prime(xi).unwrap_or(f64::NAN);
    let triples = core(generic_triples(theta, grid, 8, 6, 1e-4, 2))?;
    for t in &triples {
        for c in comps {
            if vanishes_by_parity(c, t.n) {
                parity_nonzero += t.component(c).iter().filter(|v| **v != 0.0).count();
            }
        }
    }
    // pole closed forms against the generic recursion for the same coupling
    let pm = PoleModel::new(st.gamma, st.xi_c, st.xi_r, 14);
    let mut pole: f64 = 0.0;
    for xi in linspace(-3.0, 3.0, 25) {
        let j = core(CoefficientJets::new(JetSource::Pole { gamma: st.gamma, xi_c: st.xi_c, xi_r: st.xi_r, xi }, 13))?;
        for n in 1..=12 {
            let s = pm.log_scale(n).exp();
            for c in comps {
                pole = pole.max((core(pm.coefficient(c, n, xi))? - j.value(c, n)).abs() / s);
            }
        }
    }
    o.put("differential_residual", res);
    o.put("parity_nonzero_entries", parity_nonzero as f64);
    o.put("pole_vs_generic", pole);
    o.pass = res <= thr_res && parity_nonzero == 0 && pole <= thr_pole;
    o.detail = format!(
        "residuals relative to term size (threshold {thr_res:e}); pole error relative to (n−1)!/ξ_c^n for n ≤ 12 (threshold {thr_pole:e})"
    );
    Ok(o)
}

fn a_asymptotics(ctx: &Ctx) -> Run {
    let gamma = 1.0 / 3.0;
    let n_max = 200;
    let a = ACoefficients::new(gamma, n_max);
    let thr = 5.0 * ctx.tol;
    let scaled = (a.get(n_max, 0) - a0_limit(gamma)).abs() * (n_max * n_max) as f64;
    let evens: Vec<usize> = (10..=n_max).step_by(2).collect();
    let b1: Vec<f64> = evens.iter().map(|&n| a.get(n, 1) * (n - 1) as f64 / (n as f64).ln()).collect();
    let b2: Vec<f64> = evens
        .iter()
        .map(|&n| {
            let row = a.row(n);
            (2..row.len()).map(|j| 0.5f64.powi(j as i32) * row[j].abs()).fold(0.0, f64::max) * (n - 1) as f64
        })
        .collect();
    // bounded: the second half never exceeds 1.5× the first half
    let bounded = |v: &[f64]| {
        let h = v.len() / 2;
        let first = v[..h].iter().map(|x| x.abs()).fold(0.0, f64::max);
        let second = v[h..].iter().map(|x| x.abs()).fold(0.0, f64::max);
        (second <= 1.5 * first, first, second)
    };
    let (ok1, f1, s1) = bounded(&b1);
    let (ok2, f2, s2) = bounded(&b2);
    let mut o = Outcome { threshold: thr, ..Default::default() };
    o.put("a0_error_times_n2", scaled);
    o.put("a0_error_times_n", scaled / n_max as f64);
    o.put("a1_ratio_max_n<=104", f1);
    o.put("a1_ratio_max_n>104", s1);
    o.put("tail_sup_max_n<=104", f2);
    o.put("tail_sup_max_n>104", s2);
    o.pass = scaled <= thr && ok1 && ok2;
    o.detail = "|a₀^(200) − sinc|·200² against 5; boundedness means the max over n ∈ (104, 200] stays within 1.5× the max over [10, 104]. \
                The a₀ error decays like γ²/(2n), so the n² scaling grows linearly"
        .into();
    Ok(o)
}

fn defect_scaling(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let e = ctx.cfg.energy.e;
    let ladder = [0.2, 0.1, 0.05, 0.025];
    let xs = linspace(-4.0, 4.0, if ctx.quick { 41 } else { 161 });
    let thr = 0.2 * ctx.tol;
    let mut o = Outcome { threshold: thr, pass: true, ..Default::default() };
    let mut scalar_ok = true;
    for n in [2usize, 4, 6] {
        let jets: Vec<CoefficientJets> =
            xs.iter().map(|&x| core(CoefficientJets::new(JetSource::Potential { model: &m, e, x }, n + 1))).collect::<Result<_, _>>()?;
        let norms: Vec<f64> = ladder
            .iter()
            .map(|&eps| jets.iter().map(|j| defect_scalar(j, eps, n).abs()).fold(0.0, f64::max))
            .collect();
        for j in &jets {
            for &eps in &ladder {
                scalar_ok &= projection_defect(&projection_defect_matrix(j, eps, n), 1e-10).is_ok();
            }
        }
        let s = loglog_slope(&ladder, &norms);
        o.slope.insert(format!("n={n}"), s);
        for (eps, v) in ladder.iter().zip(&norms) {
            o.put(format!("defect n={n} eps={eps}"), *v);
        }
        o.pass &= (s - (n as f64 + 1.0)).abs() <= thr;
    }
    o.put("defect_is_scalar", if scalar_ok { 1.0 } else { 0.0 });
    o.pass &= scalar_ok;
    o.detail = "sup over x ∈ [−4, 4] of the scalar defect; expected slope n+1 ± 0.2. For even n the ε^{n+1} term \
                is a sum of anticommutators of distinct basis matrices and vanishes, so the observed order is n+2"
        .into();
    Ok(o)
}

fn optimal_coupling(ctx: &Ctx) -> Run {
    let source = ctx.cfg.source().map_err(|e| e.to_string())?;
    let (sc, st) = scale_at(ctx, ctx.cfg.energy.e)?;
    let xis = linspace(-4.0, 4.0, if ctx.quick { 161 } else { 801 });
    let xs: Vec<f64> = xis.iter().map(|&xi| core(sc.xi_inverse(xi))).collect::<Result<_, _>>()?;
    let thr = 1e-10 * ctx.tol;
    let mut errs = Vec::new();
    let mut det_err: f64 = 0.0;
    let mut o = Outcome { threshold: thr, ..Default::default() };
    for &eps in &ctx.cfg.eps {
        let (n_eps, sigma) = optimal_n(eps, st.xi_c);
        let frame = SuperadiabaticFrame::optimal(&sc, st, eps, source);
        let rows: Vec<(f64, f64)> = xs
            .par_iter()
            .zip(&xis)
            .map(|(&x, &xi)| -> Result<(f64, f64), String> {
                let f = core(frame.at_x(x))?;
                let g = g_leading(eps, xi, st.xi_r, st.xi_c, st.gamma, sigma);
                let p = sc.model.momentum_real(sc.e, x);
                let d = (f.t_matrix(p).det() - C::new(-2.0, 0.0)).norm();
                Ok(((C::new(0.0, -1.0) * f.k12 - g).norm(), d))
            })
            .collect::<Result<_, _>>()?;
        let sup = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        det_err = rows.iter().map(|r| r.1).fold(det_err, f64::max);
        let scaled = sup * (st.xi_c / eps).exp() / eps.sqrt();
        o.put(format!("scaled_error eps={eps} n_eps={n_eps}"), scaled);
        errs.push(scaled);
    }
    o.slope.insert("scaled_error".into(), loglog_slope(&ctx.cfg.eps, &errs));
    o.put("det_t_minus_2", det_err);
    o.pass = strictly_decreasing(&errs) && det_err <= thr * 2.0;
    o.detail = "sup over ξ ∈ [−4, 4] of |−i·k − g_leading|·e^{ξ_c/ε}/√ε must decrease along the ladder; \
                det T_n = −2 (|det| = 2) to 1e−10 relative"
        .into();
    Ok(o)
}

fn erf_profile_check(ctx: &Ctx) -> Run {
    let (sc, st) = scale_at(ctx, ctx.cfg.energy.e)?;
    let scfg = ctx.cfg.stationary_config();
    let grid = linspace(st.x_r - 4.0, st.x_r + 4.0, if ctx.quick { 401 } else { 1601 });
    let ladder = stationary_ladder(ctx);
    let thr = 0.4;
    let mut errs = Vec::new();
    let mut o = Outcome { threshold: thr, ..Default::default() };
    for &eps in &ladder {
        let sol = core(solve_stationary(&sc, eps, &grid, &scfg))?;
        let frame = SuperadiabaticFrame::optimal(&sc, st, eps, superwave_core::superadiabatic::CoefficientSource::Numeric);
        let amp = core(superadiabatic_amplitudes(&sol, &frame))?;
        let sup = grid
            .iter()
            .zip(&amp.c2)
            .map(|(&x, c2)| (c2 - FRAME_PHASE * c2_erf(eps, x, &st, &sc)).norm())
            .fold(0.0, f64::max);
        let scaled = sup * (st.xi_c / eps).exp();
        o.put(format!("scaled_sup_error eps={eps}"), scaled);
        errs.push(scaled);
    }
    if errs.len() < 3 {
        return Err(format!("need three ε ≥ the solver floor, have {ladder:?}"));
    }
    let s = loglog_slope(&ladder, &errs);
    o.slope.insert("scaled_sup_error".into(), s);
    o.pass = s >= thr && errs[errs.len() - 1] < errs[0];
    o.detail = "e^{ξ_c/ε}·sup_x|c₂ − c₂_erf| over x_r ± 4; pass needs the least-squares slope ≥ 0.4 and a net decrease. \
                The leading profile omits the σ_ε phase of the even-order truncation, so single steps can rise"
        .into();
    Ok(o)
}

fn reflection(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    if m.family != Family::Eckart {
        return Err(format!("the exact reflection oracle needs the Eckart family, config has {}", m.family));
    }
    let e = ctx.cfg.energy.e;
    let (sc, st) = scale_at(ctx, e)?;
    let scfg = ctx.cfg.stationary_config();
    let ladder = stationary_ladder(ctx);
    let mut o = Outcome { threshold: 1.5, pass: true, ..Default::default() };
    let mut devs = Vec::new();
    for &eps in &ladder {
        let r = core(reflection_coefficient(&sc, eps, &scfg))?;
        let exact = eckart_reflection_exact(m.v0, m.a, e, eps);
        let rel = (r / exact - 1.0).abs();
        let lead = 2.0 * (PI * st.gamma / 2.0).sin() * (-st.xi_c / eps).exp();
        let dev = (r / lead - 1.0).abs();
        o.put(format!("abs_r eps={eps}"), r);
        o.put(format!("rel_error_vs_exact eps={eps}"), rel);
        o.put(format!("ratio_to_leading eps={eps}"), r / lead);
        devs.push(dev);
        let cap = if (eps - 0.1).abs() < 1e-12 {
            Some(0.10)
        } else if (eps - 0.05).abs() < 1e-12 {
            Some(0.05)
        } else {
            None
        };
        if let Some(cap) = cap {
            o.pass &= rel <= cap * ctx.tol;
        }
    }
    for (k, w) in devs.windows(2).enumerate() {
        let factor = (ladder[k] / ladder[k + 1]).log2();
        let shrink = (w[0] / w[1]).powf(1.0 / factor);
        o.put(format!("deviation_shrink {}→{}", ladder[k], ladder[k + 1]), shrink);
        o.pass &= shrink >= 1.5;
    }
    o.slope.insert("ratio_deviation".into(), loglog_slope(&ladder, &devs));
    o.detail = "|c₂(+∞)| against the exact Eckart amplitude (≤ 10% at ε = 0.1, ≤ 5% at ε = 0.05) and the leading ratio's \
                deviation shrinking by ≥ 1.5 per halving"
        .into();
    Ok(o)
}

fn plancherel(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let [e1, e2] = ctx.cfg.energy.window;
    let thr = 1e-6 * ctx.tol;
    let (lhs, rhs) = core(plancherel_gaussian(&m, (e1, e2), 0.5 * (e1 + e2), 0.1 * (e2 - e1) / 1.6, 0.1))?;
    let rel = (lhs / rhs - 1.0).abs();
    let mut o = Outcome { threshold: thr, pass: rel <= thr, ..Default::default() };
    o.put("lhs", lhs);
    o.put("rhs", rhs);
    o.put("relative_error", rel);
    o.detail = "∫|J|²dx against 4πε∫p(∞,E)|f|²dE for a Gaussian f at ε = 0.1".into();
    Ok(o)
}

/// Birth, moderate and far trajectory positions used by the field checks.
const BIRTH_Q: f64 = 0.9;

fn hierarchy(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let density = ctx.cfg.density().map_err(|e| e.to_string())?;
    let wave = core(ReflectedWave::new(m, &density, ctx.cfg.regions()))?;
    let ladder = stationary_ladder(ctx);
    let qs: Vec<f64> = if ctx.quick { vec![BIRTH_Q, 5.0] } else { vec![BIRTH_Q, 2.0, 5.0] }
        .into_iter()
        .map(|q| q + wave.x_r())
        .collect();
    let mut o = Outcome { threshold: 1e-6 * ctx.tol, pass: true, ..Default::default() };
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for &eps in &ladder {
        let b = wave.boundaries(eps);
        let ts: Vec<f64> = qs.iter().map(|&q| wave.time_at(q)).collect();
        let stds: Vec<f64> = ts.iter().map(|&t| core(wave.gauss_std(eps, t))).collect::<Result<_, _>>()?;
        let lo = qs.iter().zip(&stds).map(|(q, s)| q - 10.0 * s).fold(f64::INFINITY, f64::min);
        let hi = qs.iter().zip(&stds).map(|(q, s)| q + 10.0 * s).fold(f64::NEG_INFINITY, f64::max);
        let grid = XGrid::composite(lo, hi, 0.25, &b.breaks());
        let n = default_energy_nodes(eps);
        let samples = core(EnergySamples::new(&wave, eps, &grid, n, true))?;
        let doubled = core(EnergySamples::new(&wave, eps, &grid, 2 * n, false))?;
        let scale = wave.norm_scale(eps);
        for (&q, &t) in qs.iter().zip(&ts) {
            let num = core(samples.field(t, Provenance::Quadrature))?;
            let eff = core(samples.field(t, Provenance::Eff))?;
            let fine = core(doubled.field(t, Provenance::Eff))?;
            let conv = (eff.norm() / fine.norm() - 1.0).abs();
            o.put(format!("e_doubling_change q={q:.2} eps={eps}"), conv);
            o.pass &= conv <= o.threshold;
            let expl = core(closed_form_field(&wave, eps, t, &grid, Provenance::Expl))?;
            let lq = q - wave.x_r();
            series.entry(format!("eff-num q={lq}")).or_default().push(eff.distance(&num) / scale);
            series.entry(format!("expl-eff q={lq}")).or_default().push(expl.distance(&eff) / scale);
            if q == BIRTH_Q + wave.x_r() {
                core(wave.gauss_window(eps, t))?;
                let gauss = core(closed_form_field(&wave, eps, t, &grid, Provenance::Gauss))?;
                series.entry(format!("gauss-eff q={lq}")).or_default().push(gauss.distance(&eff) / scale);
            }
        }
    }
    if ladder.len() < 3 {
        return Err(format!("need three ε ≥ the solver floor, have {ladder:?}"));
    }
    for (name, v) in &series {
        for (eps, d) in ladder.iter().zip(v) {
            o.put(format!("{name} eps={eps}"), *d);
        }
        o.slope.insert(name.clone(), loglog_slope(&ladder, v));
        o.pass &= strictly_decreasing(v);
    }
    o.detail = format!(
        "L² distances over e^{{−M*/ε}}ε^{{3/4}}, each strictly decreasing over the ladder; grids span ±10 packet widths; \
         Gaussian form at q − x_r = {BIRTH_Q} (inside its window for every ε); threshold is the E-doubling tolerance; \
         region constants {:?}",
        ctx.cfg.regions()
    );
    Ok(o)
}

fn norms(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let density = ctx.cfg.density().map_err(|e| e.to_string())?;
    let wave = core(ReflectedWave::new(m, &density, ctx.cfg.regions()))?;
    let thr = 1e-3 * ctx.tol;
    let thr_curv = 1e-8 * ctx.tol;
    let mut o = Outcome { threshold: thr, pass: true, ..Default::default() };
    for &eps in &ctx.cfg.eps {
        let formula = wave.gauss_l2_norm(eps);
        for (kind, q) in [(Provenance::Gauss, BIRTH_Q), (Provenance::Far, 5.0)] {
            let q = q + wave.x_r();
            let t = wave.time_at(q);
            let s = core(wave.gauss_std(eps, t))?;
            let grid = XGrid::composite(q - 25.0 * s, q + 25.0 * s, (0.25f64).min(s / 4.0), &[]);
            let f = core(closed_form_field(&wave, eps, t, &grid, kind))?;
            let rel = (f.norm() / formula - 1.0).abs();
            o.put(format!("{} eps={eps}", kind.name()), rel);
            o.pass &= rel <= thr;
        }
    }
    let (fd, formula) = core(wave.curvature_identity())?;
    let rel = (fd / formula - 1.0).abs();
    o.put("curvature_identity_relative", rel);
    o.pass &= rel <= thr_curv;
    o.detail = format!("relative deviation of ‖χ_gauss‖ and ‖χ_far‖ from the closed form; M̃″(k*) = 4k*²M″(E*) to {thr_curv:e}");
    Ok(o)
}

fn trajectory(ctx: &Ctx) -> Run {
    let m = model(ctx)?;
    let density = ctx.cfg.density().map_err(|e| e.to_string())?;
    let wave = core(ReflectedWave::new(m, &density, ctx.cfg.regions()))?;
    let thr = 1e-10 * ctx.tol;
    let thr_v = 1e-6 * ctx.tol;
    let ts = linspace(wave.time_at(wave.x_r() + 0.5), wave.time_at(wave.x_r() + 8.0), 50);
    let mut res: f64 = 0.0;
    let mut vel: f64 = 0.0;
    let e = wave.estar.e;
    for &t in &ts {
        let q = core(wave.trajectory(t))?;
        res = res.max(wave.s_derivatives(q, t)[1].abs());
        let h = 1e-4;
        let dq = (core(wave.trajectory(t + h))? - core(wave.trajectory(t - h))?) / (2.0 * h);
        let p = m.momentum_real(e, q);
        vel = vel.max((dq / (2.0 * p) - 1.0).abs());
    }
    let mut o = Outcome { threshold: thr, pass: res <= thr && vel <= thr_v, ..Default::default() };
    o.put("s_prime_residual", res);
    o.put("velocity_relative_error", vel);
    o.detail = format!("|S′(E*, q_t, t)| on 50 times (threshold {thr:e}); dq_t/dt against 2p(q_t, E*) (threshold {thr_v:e})");
    Ok(o)
}

/// Runs the selected checks (all when `only` is empty). Never panics:
/// computation errors and panics are recorded as failures.
pub fn verify_suite(cfg: &ExperimentConfig, only: &[u32], mut progress: impl FnMut(&CheckRecord, f64)) -> VerificationReport {
    let ctx = Ctx { cfg, tol: cfg.verify.tolerance_scale, quick: cfg.verify.quick };
    let mut checks = Vec::new();
    for spec in CHECKS.iter().filter(|s| only.is_empty() || only.contains(&s.id)) {
        let start = std::time::Instant::now();
        let out = match catch_unwind(AssertUnwindSafe(|| (spec.run)(&ctx))) {
            Ok(Ok(o)) => o,
            Ok(Err(msg)) => Outcome { threshold: f64::NAN, detail: format!("error: {msg}"), ..Default::default() },
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome { threshold: f64::NAN, detail: format!("panic: {msg}"), ..Default::default() }
            }
        };
        let rec = CheckRecord {
            id: spec.id,
            name: spec.name.into(),
            anchor: spec.anchor.into(),
            measured: out.measured,
            slope: out.slope,
            threshold: out.threshold,
            pass: out.pass,
            detail: out.detail,
        };
        progress(&rec, start.elapsed().as_secs_f64());
        checks.push(rec);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    VerificationReport { schema_version: REPORT_SCHEMA_VERSION, config: cfg.clone(), failed: checks.len() - passed, passed, checks }
}
