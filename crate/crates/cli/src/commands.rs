// SPDX-License-Identifier: Apache-2.0
//! Subcommand bodies. Each writes its artifacts into the configured output
//! directory and prints a JSON summary on standard output.

use rayon::prelude::*;
use serde::Serialize;
use superwave_core::recursion::{g_leading, ACoefficients, CoefficientJets, Component, JetSource};
use superwave_core::scale::NaturalScaleMap;
use superwave_core::stationary::{
    c2_erf, exact_reflection, reflection_coefficient, solve_stationary, superadiabatic_amplitudes, FRAME_PHASE,
};
use superwave_core::stokes::StokesData;
use superwave_core::superadiabatic::{optimal_n, CoefficientSource, SuperadiabaticFrame};
use superwave_core::wavepacket::{
    closed_form_field, default_energy_nodes, EnergySamples, Provenance, ReflectedWave, ReflectedWaveField, XGrid,
};
use superwave_core::Complex64 as C;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Cell, Table};
use crate::verify::{loglog_slope, verify_suite};

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("summaries serialize"));
}

fn stokes_at(cfg: &ExperimentConfig, e: f64) -> CliResult<(NaturalScaleMap, StokesData)> {
    let sc = NaturalScaleMap::with_config(cfg.model()?, e, cfg.scale_config())?;
    let st = StokesData::with_scale(&sc)?;
    Ok((sc, st))
}

/// File-name tag for a real parameter.
fn tag(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Serialize)]
struct StokesSummary {
    family: String,
    v0: f64,
    a: f64,
    energy: f64,
    z_crit_re: f64,
    z_crit_im: f64,
    xi_r: f64,
    xi_c: f64,
    beta: f64,
    gamma: f64,
    x_r: f64,
}

pub fn stokes(cfg: &ExperimentConfig) -> CliResult<i32> {
    let (sc, st) = stokes_at(cfg, cfg.energy.e)?;
    let s = StokesSummary {
        family: sc.model.family.to_string(),
        v0: sc.model.v0,
        a: sc.model.a,
        energy: st.e,
        z_crit_re: st.z_crit.re,
        z_crit_im: st.z_crit.im,
        xi_r: st.xi_r,
        xi_c: st.xi_c,
        beta: st.beta,
        gamma: st.gamma,
        x_r: st.x_r,
    };
    Artifacts::new(cfg.output.clone()).json("stokes.json", &s)?;
    print_json(&s);
    Ok(0)
}

#[derive(Debug, Serialize)]
struct CoeffSummary {
    gamma: f64,
    xi_c: f64,
    xi_r: f64,
    n_max: usize,
    source: String,
    files: Vec<String>,
}

pub fn coeffs(cfg: &ExperimentConfig, n_max: usize, gamma: Option<f64>, orders: &[usize], xi: &[f64]) -> CliResult<i32> {
    if n_max < 2 || n_max % 2 == 1 {
        return Err(CliError::config(format!("--n-max must be an even number ≥ 2, got {n_max}")));
    }
    if orders.contains(&0) {
        return Err(CliError::config("--orders starts at 1"));
    }
    let (sc, st) = stokes_at(cfg, cfg.energy.e)?;
    let gamma = gamma.unwrap_or(st.gamma);
    if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
        return Err(CliError::config(format!("--gamma must lie in (0, 1), got {gamma}")));
    }
    let a = ACoefficients::new(gamma, n_max);
    let mut at = Table::new(&["n", "j", "a"]);
    for n in (2..=n_max).step_by(2) {
        for (j, v) in a.row(n).iter().enumerate() {
            at.push(vec![n.into(), j.into(), (*v).into()]);
        }
    }
    let source = cfg.source()?;
    let top = orders.iter().copied().max().unwrap_or(1) + 1;
    let rows: Vec<Vec<(usize, &str, f64, f64)>> = xi
        .par_iter()
        .map(|&xi| -> CliResult<_> {
            let jets = match source {
                CoefficientSource::Numeric => {
                    let x = sc.xi_inverse(xi)?;
                    CoefficientJets::new(JetSource::Potential { model: &sc.model, e: sc.e, x }, top)?
                }
                CoefficientSource::Pole => {
                    CoefficientJets::new(JetSource::Pole { gamma: st.gamma, xi_c: st.xi_c, xi_r: st.xi_r, xi }, top)?
                }
            };
            Ok(orders
                .iter()
                .flat_map(|&n| {
                    [(Component::X, "x"), (Component::Y, "y"), (Component::Z, "z")].map(|(c, name)| (n, name, xi, jets.value(c, n)))
                })
                .collect())
        })
        .collect::<CliResult<_>>()?;
    let mut tt = Table::new(&["n", "component", "xi", "re", "im"]);
    for (n, name, xi, v) in rows.into_iter().flatten() {
        // x_n = i·x̂_n is purely imaginary, y_n and z_n are real
        let (re, im) = if name == "x" { (0.0, v) } else { (v, 0.0) };
        tt.push(vec![n.into(), name.into(), xi.into(), re.into(), im.into()]);
    }
    let mut art = Artifacts::new(cfg.output.clone());
    art.table("a_table.csv", &at)?;
    art.table("triples.csv", &tt)?;
    let s = CoeffSummary {
        gamma,
        xi_c: st.xi_c,
        xi_r: st.xi_r,
        n_max,
        source: cfg.coeff_source.clone(),
        files: vec!["a_table.csv".into(), "triples.csv".into()],
    };
    art.json("coeffs.json", &s)?;
    print_json(&s);
    Ok(0)
}

#[derive(Debug, Serialize)]
struct FrameSummary {
    eps: f64,
    order: usize,
    n_eps: usize,
    sigma: f64,
    sup_abs_diff: f64,
    scaled_sup_abs_diff: f64,
    file: String,
}

pub fn frame(cfg: &ExperimentConfig, order: Option<usize>, xi: &[f64]) -> CliResult<i32> {
    let (sc, st) = stokes_at(cfg, cfg.energy.e)?;
    let source = cfg.source()?;
    let mut art = Artifacts::new(cfg.output.clone());
    let mut out = Vec::new();
    for &eps in &cfg.eps {
        let (n_eps, sigma) = optimal_n(eps, st.xi_c);
        let fr = match order {
            Some(0) => return Err(CliError::config("--order must be ≥ 1")),
            Some(n) => SuperadiabaticFrame::new(&sc, st, eps, n, source),
            None => SuperadiabaticFrame::optimal(&sc, st, eps, source),
        };
        let rows: Vec<[f64; 8]> = xi
            .par_iter()
            .map(|&xi| -> CliResult<_> {
                let x = sc.xi_inverse(xi)?;
                let f = fr.at_x(x)?;
                let g = g_leading(eps, xi, st.xi_r, st.xi_c, st.gamma, sigma);
                let k = C::new(0.0, -1.0) * f.k12;
                Ok([xi, x, f.rho, f.k12.norm(), k.re, k.im, g.im, (k - g).norm()])
            })
            .collect::<CliResult<_>>()?;
        let mut t = Table::new(&["xi", "x", "rho", "abs_k", "re_minus_i_k", "im_minus_i_k", "im_g_leading", "abs_diff"]);
        for r in &rows {
            t.push(r.iter().map(|v| Cell::from(*v)).collect());
        }
        let file = format!("frame_eps={}.csv", tag(eps));
        art.table(&file, &t)?;
        let sup = rows.iter().map(|r| r[7]).fold(0.0, f64::max);
        out.push(FrameSummary {
            eps,
            order: fr.order,
            n_eps,
            sigma,
            sup_abs_diff: sup,
            scaled_sup_abs_diff: sup * (st.xi_c / eps).exp() / eps.sqrt(),
            file,
        });
    }
    art.json("frame.json", &out)?;
    print_json(&out);
    Ok(0)
}

#[derive(Debug, Serialize)]
struct StationarySummary {
    eps: f64,
    order: usize,
    reflection: f64,
    exact_reflection: Option<f64>,
    leading_reflection: f64,
    wronskian_drift: f64,
    flux_drift: f64,
    reconstruction_residual: f64,
    scaled_sup_profile_error: f64,
    file: String,
}

#[derive(Debug, Serialize)]
struct ProfileSummary {
    runs: Vec<StationarySummary>,
    profile_error_slope: Option<f64>,
}

/// `stationary` and `profile`: same columns, different default grid.
pub fn stationary(cfg: &ExperimentConfig, x: Option<Vec<f64>>, profile: bool) -> CliResult<i32> {
    let (sc, st) = stokes_at(cfg, cfg.energy.e)?;
    let scfg = cfg.stationary_config();
    if let Some(e) = cfg.eps.iter().find(|e| **e < scfg.eps_floor) {
        return Err(CliError::config(format!("ε = {e} is below the supported floor {}", scfg.eps_floor)));
    }
    let half = if profile { 3.0 } else { 6.0 };
    let n = if profile { 601 } else { 241 };
    let grid = x.unwrap_or_else(|| (0..n).map(|k| st.x_r - half + 2.0 * half * k as f64 / (n - 1) as f64).collect());
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config("x samples must be strictly increasing"));
    }
    let mut art = Artifacts::new(cfg.output.clone());
    let mut runs = Vec::new();
    let stem = if profile { "profile" } else { "stationary" };
    for &eps in &cfg.eps {
        let sol = solve_stationary(&sc, eps, &grid, &scfg)?;
        let frame = SuperadiabaticFrame::optimal(&sc, st, eps, CoefficientSource::Numeric);
        let amp = superadiabatic_amplitudes(&sol, &frame)?;
        let mut t = Table::new(&["x", "xi", "re_c1", "im_c1", "re_c2", "im_c2", "abs_c2_formula"]);
        let mut sup: f64 = 0.0;
        for i in 0..sol.len() {
            let formula = FRAME_PHASE * c2_erf(eps, sol.x[i], &st, &sc);
            sup = sup.max((amp.c2[i] - formula).norm());
            let (c1, c2) = (amp.c1[i], amp.c2[i]);
            t.push(vec![sol.x[i].into(), sol.xi[i].into(), c1.re.into(), c1.im.into(), c2.re.into(), c2.im.into(), formula.norm().into()]);
        }
        let file = format!("{stem}_eps={}.csv", tag(eps));
        art.table(&file, &t)?;
        runs.push(StationarySummary {
            eps,
            order: amp.order,
            reflection: reflection_coefficient(&sc, eps, &scfg)?,
            exact_reflection: exact_reflection(&sc.model, sc.e, eps),
            leading_reflection: st.prefactor() * (-st.xi_c / eps).exp(),
            wronskian_drift: sol.invariant_drift(|s, i| s.wronskian(i)),
            flux_drift: sol.invariant_drift(|s, i| s.flux(i)),
            reconstruction_residual: amp.reconstruction_residual(&sol),
            scaled_sup_profile_error: sup * (st.xi_c / eps).exp(),
            file,
        });
    }
    let slope = (runs.len() >= 2).then(|| {
        let e: Vec<f64> = runs.iter().map(|r| r.eps).collect();
        let v: Vec<f64> = runs.iter().map(|r| r.scaled_sup_profile_error).collect();
        loglog_slope(&e, &v)
    });
    let s = ProfileSummary { runs, profile_error_slope: slope };
    art.json(&format!("{stem}.json"), &s)?;
    print_json(&s);
    Ok(0)
}

/// Requested sample times, directly or as trajectory positions.
#[derive(Debug, Clone, PartialEq)]
pub enum Times {
    T(Vec<f64>),
    Q(Vec<f64>),
}

#[derive(Debug, Serialize)]
struct FieldSummary {
    eps: f64,
    t: f64,
    q_t: Option<f64>,
    in_gauss_window: bool,
    norm: f64,
    norm_over_scale: f64,
    formula_norm: f64,
    file: String,
}

#[derive(Debug, Serialize)]
struct Boundaries {
    eps: f64,
    x_r: f64,
    near_half_width: f64,
    far_start: f64,
}

#[derive(Debug, Serialize)]
struct EvolveSummary {
    field: String,
    e_star: f64,
    m_star: f64,
    m2_star: f64,
    k_star: f64,
    x_r: f64,
    boundaries: Vec<Boundaries>,
    fields: Vec<FieldSummary>,
}

fn provenance(name: &str) -> CliResult<Provenance> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "quadrature" | "numeric" => Provenance::Quadrature,
        "leading" => Provenance::Leading,
        "eff" => Provenance::Eff,
        "near" => Provenance::Near,
        "mod" => Provenance::Mod,
        "far" => Provenance::Far,
        "gauss" => Provenance::Gauss,
        "expl" => Provenance::Expl,
        other => return Err(CliError::config(format!("unknown field `{other}`"))),
    })
}

pub fn evolve(cfg: &ExperimentConfig, times: &Times, field: &str, x_range: Option<(f64, f64)>, plot: bool) -> CliResult<i32> {
    let kind = provenance(field)?;
    let density = cfg.density()?;
    let wave = ReflectedWave::new(cfg.model()?, &density, cfg.regions())?;
    let ts: Vec<f64> = match times {
        Times::T(t) => t.clone(),
        Times::Q(q) => q.iter().map(|&q| wave.time_at(q)).collect(),
    };
    let floor = cfg.stationary_config().eps_floor;
    let sampled = matches!(kind, Provenance::Quadrature | Provenance::Leading | Provenance::Eff);
    if sampled {
        if let Some(e) = cfg.eps.iter().find(|e| **e < floor) {
            return Err(CliError::config(format!("ε = {e} is below the supported floor {floor}")));
        }
    }
    let mut art = Artifacts::new(cfg.output.clone());
    let mut fields = Vec::new();
    let mut boundaries = Vec::new();
    for &eps in &cfg.eps {
        let b = wave.boundaries(eps);
        boundaries.push(Boundaries { eps, x_r: b.x_r, near_half_width: b.near_half_width, far_start: b.far_start });
        let (lo, hi) = match x_range {
            Some(r) => r,
            None => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &t in &ts {
                    let (q, s) = match (wave.trajectory(t), wave.gauss_std(eps, t)) {
                        (Ok(q), Ok(s)) => (q, s),
                        _ => (wave.x_r(), 1.0),
                    };
                    lo = lo.min(q - 8.0 * s);
                    hi = hi.max(q + 8.0 * s);
                }
                (lo, hi)
            }
        };
        let grid = XGrid::composite(lo, hi, 0.25, &b.breaks());
        let samples = if sampled {
            Some(EnergySamples::new(&wave, eps, &grid, default_energy_nodes(eps), kind == Provenance::Quadrature)?)
        } else {
            None
        };
        for &t in &ts {
            let f: ReflectedWaveField = match &samples {
                Some(s) => s.field(t, kind)?,
                None => closed_form_field(&wave, eps, t, &grid, kind)?,
            };
            let mut table = Table::new(&["x", "re_chi", "im_chi", "abs_chi", "region"]);
            for (i, (&x, c)) in f.grid.x.iter().zip(&f.chi).enumerate() {
                table.push(vec![x.into(), c.re.into(), c.im.into(), c.norm().into(), f.region(i).name().into()]);
            }
            let file = format!("evolve_eps={}_t={}.csv", tag(eps), tag(t));
            art.table(&file, &table)?;
            let norm = f.norm();
            fields.push(FieldSummary {
                eps,
                t,
                q_t: wave.trajectory(t).ok(),
                in_gauss_window: wave.gauss_window(eps, t).is_ok(),
                norm,
                norm_over_scale: norm / wave.norm_scale(eps),
                formula_norm: wave.gauss_l2_norm(eps),
                file,
            });
        }
    }
    if plot {
        let mut script = String::from("set datafile separator ','\nset xlabel 'x'\nset ylabel '|chi|'\n");
        for f in &fields {
            script.push_str(&format!(
                "set title 'eps = {}, t = {}'\nplot '{}' using 1:4 skip 1 with lines title '|chi|'\npause -1\n",
                f.eps, f.t, f.file
            ));
        }
        art.text("plot.gp", &script)?;
    }
    let s = EvolveSummary {
        field: kind.name().to_string(),
        e_star: wave.estar.e,
        m_star: wave.estar.m,
        m2_star: wave.estar.m2,
        k_star: wave.k_star,
        x_r: wave.x_r(),
        boundaries,
        fields,
    };
    art.json("evolve.json", &s)?;
    print_json(&s);
    Ok(0)
}

pub fn verify(cfg: &ExperimentConfig, only: &[u32]) -> CliResult<i32> {
    let report = verify_suite(cfg, only, |rec, secs| {
        eprintln!("[{}] {:>2} {} ({secs:.1} s)", if rec.pass { "PASS" } else { "FAIL" }, rec.id, rec.name);
    });
    Artifacts::new(cfg.output.clone()).json("verify_report.json", &report)?;
    for c in &report.checks {
        println!("{} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name);
    }
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(if report.all_pass() { 0 } else { 1 })
}
