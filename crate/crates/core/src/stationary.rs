// SPDX-License-Identifier: Apache-2.0
//! Stationary scattering solutions and their superadiabatic amplitudes.
//!
//! The equation −ε²φ″ + Vφ = Eφ is written for ψ = (φ, iεφ′) and rotated
//! into the adiabatic basis ψ_a = T₀ψ with T₀ = ½[[√p, 1/√p], [√p, −1/√p]].
//! Factoring out the fast phases, ψ_a = (e^{−iξ/2ε}u₁, e^{iξ/2ε}u₂), leaves a
//! slowly varying envelope u obeying
//!
//! ```text
//! u₁′ = κ e^{iξ/ε} u₂,   u₂′ = κ e^{−iξ/ε} u₁,   κ = p′/(2p)
//! ```
//!
//! which is what gets integrated. The transmitted wave is normalised to
//! u = (1, 0) at the left end, so |u₂/u₁| at the right end is the modulus
//! of the reflection amplitude.

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::linalg::Mat2;
use crate::numerics::ode::{GaussIntegrator, LinearRhs};
use crate::numerics::quad::gauss_legendre;
use crate::potential::{Family, PotentialModel};
use crate::scale::NaturalScaleMap;
use crate::stokes::StokesData;
use crate::superadiabatic::{optimal_n, FramePoint, SuperadiabaticFrame};

/// Smallest supported ε for a reflection exponent ξ_c of order one.
///
/// The reflected envelope is built from O(1) oscillatory contributions that
/// cancel down to e^{−ξ_c/ε}; in double precision the per-step rounding
/// floor is near 1e−17, which leaves three significant digits at
/// e^{−ξ_c/ε} ≈ 1e−12 and none a factor ten further down.
pub const EPS_FLOOR: f64 = 0.05;

/// Phase relating the amplitude c₂ in this crate's frame convention to the
/// erf closed form: c₂ ≈ `FRAME_PHASE` · c2_erf.
pub const FRAME_PHASE: C = C::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryConfig {
    /// Left end in units of the potential width (default −30).
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest admissible |θ′| at the ends.
    pub tail_tol: f64,
    pub eps_floor: f64,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self { x_min: None, x_max: None, abs_tol: 1e-18, rel_tol: 1e-14, tail_tol: 1e-8, eps_floor: EPS_FLOOR }
    }
}

impl StationaryConfig {
    pub fn ends(&self, model: &PotentialModel) -> (f64, f64) {
        (self.x_min.unwrap_or(-30.0 * model.a), self.x_max.unwrap_or(30.0 * model.a))
    }
}

struct Envelope<'a> {
    scale: &'a NaturalScaleMap,
    eps: f64,
}

impl LinearRhs for Envelope<'_> {
    fn matrices(&mut self, x0: f64, h: f64, c: &[f64], out: &mut [Mat2]) {
        let model = &self.scale.model;
        let e = self.scale.e;
        for (ci, m) in c.iter().zip(out.iter_mut()) {
            let x = x0 + ci * h;
            let kappa = -model.derivative_real(x) / (4.0 * (e - model.eval_real(x)));
            let phase = C::from_polar(1.0, self.scale.xi(x) / self.eps);
            *m = Mat2([[C::new(0.0, 0.0), phase * kappa], [phase.conj() * kappa, C::new(0.0, 0.0)]]);
        }
    }

    fn accept(&mut self, _: f64, _: f64) {}

    fn phase_rate(&self, x: f64) -> f64 {
        2.0 * self.scale.model.momentum_real(self.scale.e, x) / self.eps
    }
}

/// Envelope samples of one stationary solution.
#[derive(Debug, Clone)]
pub struct StationarySolution {
    pub eps: f64,
    pub e: f64,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub p: Vec<f64>,
    pub envelope: Vec<[C; 2]>,
}

impl StationarySolution {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Adiabatic-frame vector ψ_a.
    pub fn psi_a(&self, i: usize) -> [C; 2] {
        let ph = C::from_polar(1.0, self.xi[i] / (2.0 * self.eps));
        let u = self.envelope[i];
        [u[0] * ph.conj(), u[1] * ph]
    }

    /// ψ = (φ, iεφ′).
    pub fn psi(&self, i: usize) -> [C; 2] {
        let [a1, a2] = self.psi_a(i);
        let r = self.p[i].sqrt();
        [(a1 + a2) / r, (a1 - a2) * r]
    }

    pub fn phi(&self, i: usize) -> C {
        self.psi(i)[0]
    }

    /// Im(conj(φ)·εφ′).
    pub fn wronskian(&self, i: usize) -> f64 {
        let [phi, s] = self.psi(i);
        (phi.conj() * s * C::new(0.0, -1.0)).im
    }

    /// |ψ_a,₁|² − |ψ_a,₂|².
    pub fn flux(&self, i: usize) -> f64 {
        let [a1, a2] = self.psi_a(i);
        a1.norm_sqr() - a2.norm_sqr()
    }

    /// Largest relative deviation of a sampled invariant from its first value.
    pub fn invariant_drift(&self, f: impl Fn(&Self, usize) -> f64) -> f64 {
        let w0 = f(self, 0);
        (0..self.len()).map(|i| ((f(self, i) - w0) / w0).abs()).fold(0.0, f64::max)
    }
}

/// Solves the scattering problem on `[x_min, x_max]` and samples it on `grid`
/// (ascending, inside the interval).
pub fn solve_stationary(scale: &NaturalScaleMap, eps: f64, grid: &[f64], config: &StationaryConfig) -> Result<StationarySolution> {
    if !(eps > 0.0) || eps < config.eps_floor {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside the supported range [{}, ∞)", config.eps_floor)));
    }
    let model = &scale.model;
    let (x_min, x_max) = config.ends(model);
    for x in [x_min, x_max] {
        let tail = scale.theta_prime_at_x(x).abs();
        if tail > config.tail_tol {
            return Err(Error::InvalidParameter(format!("|θ′({x})| = {tail:e} exceeds the tail tolerance")));
        }
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|&x| x < x_min || x > x_max) {
        return Err(Error::InvalidParameter("sample grid must ascend inside [x_min, x_max]".into()));
    }
    let integrator = GaussIntegrator { abs_tol: config.abs_tol, rel_tol: config.rel_tol, ..GaussIntegrator::default() };
    let one = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let envelope = integrator.integrate(&mut Envelope { scale, eps }, x_min, one, grid)?;
    Ok(StationarySolution {
        eps,
        e: scale.e,
        x: grid.to_vec(),
        xi: grid.iter().map(|&x| scale.xi(x)).collect(),
        p: grid.iter().map(|&x| model.momentum_real(scale.e, x)).collect(),
        envelope,
    })
}

/// Superadiabatic amplitudes and basis functions on the solution grid.
#[derive(Debug, Clone)]
pub struct Amplitudes {
    pub order: usize,
    pub c1: Vec<C>,
    pub c2: Vec<C>,
    /// φ-components of the two superadiabatic basis vectors.
    pub phi1: Vec<C>,
    pub phi2: Vec<C>,
    /// Diagonal entry ρ of the frame generator, in ξ.
    pub rho: Vec<f64>,
}

impl Amplitudes {
    /// Largest |c₁φ₁ + c₂φ₂ − φ| relative to |φ|.
    pub fn reconstruction_residual(&self, sol: &StationarySolution) -> f64 {
        (0..sol.len())
            .map(|i| {
                let phi = sol.phi(i);
                (self.c1[i] * self.phi1[i] + self.c2[i] * self.phi2[i] - phi).norm() / phi.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Amplitudes in the optimal frame; the frame must belong to the solution's ε.
pub fn superadiabatic_amplitudes(sol: &StationarySolution, frame: &SuperadiabaticFrame) -> Result<Amplitudes> {
    let (n, _) = optimal_n(sol.eps, frame.stokes.xi_c);
    let requested = n.saturating_sub(1).max(1);
    if frame.eps != sol.eps || frame.order != requested || frame.scale.e != sol.e {
        return Err(Error::FrameMismatch { frame: frame.order, requested });
    }
    amplitudes_in_frame(sol, frame)
}

/// Amplitudes in an arbitrary-order frame with matching ε.
pub fn amplitudes_in_frame(sol: &StationarySolution, frame: &SuperadiabaticFrame) -> Result<Amplitudes> {
    if frame.eps != sol.eps {
        return Err(Error::FrameMismatch { frame: frame.order, requested: frame.order });
    }
    let points: Vec<FramePoint> = sol.x.par_iter().map(|&x| frame.at_x(x)).collect::<Result<_>>()?;
    let mut out = Amplitudes {
        order: frame.order,
        c1: Vec::with_capacity(sol.len()),
        c2: Vec::with_capacity(sol.len()),
        phi1: Vec::with_capacity(sol.len()),
        phi2: Vec::with_capacity(sol.len()),
        rho: Vec::with_capacity(sol.len()),
    };
    for (i, fp) in points.iter().enumerate() {
        let c = fp.w_inverse().apply(sol.psi_a(i));
        let r = sol.p[i].sqrt();
        out.c1.push(c[0]);
        out.c2.push(c[1]);
        out.phi1.push((fp.alpha + fp.beta) / r);
        out.phi2.push((fp.alpha + fp.beta.conj()) / r);
        out.rho.push(fp.rho);
    }
    Ok(out)
}

/// The adiabatically transported amplitude e^{−(i/ε)∫ρ dξ} at each `x`
/// (ascending), normalised to e^{−iξ/2ε} far to the left.
///
/// The ρ − ½ integrand is integrated from `x_tail` (where it is negligible)
/// by 16-point Gauss–Legendre panels no longer than `panel`.
pub fn c1_transported(frame: &SuperadiabaticFrame, xs: &[f64], x_tail: f64, panel: f64) -> Result<Vec<C>> {
    let scale = frame.scale;
    let (nodes, weights) = gauss_legendre(16);
    let mut breaks = vec![x_tail];
    for &x in xs {
        let last = *breaks.last().unwrap_or(&x_tail);
        if x < last {
            return Err(Error::InvalidParameter("points must ascend from the tail point".into()));
        }
        let pieces = ((x - last) / panel).ceil().max(1.0) as usize;
        breaks.extend((1..=pieces).map(|k| last + (x - last) * k as f64 / pieces as f64));
    }
    let panels: Vec<f64> = breaks
        .par_windows(2)
        .map(|w| {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            nodes.iter().zip(&weights).try_fold(0.0, |acc, (t, wt)| {
                let x = mid + half * t;
                let fp = frame.at_x(x)?;
                Ok(acc + wt * half * (fp.rho - 0.5) * 2.0 * scale.model.momentum_real(scale.e, x))
            })
        })
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    let mut k = 0;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        while k < panels.len() && breaks[k + 1] <= x {
            acc += panels[k];
            k += 1;
        }
        out.push(C::from_polar(1.0, -(0.5 * scale.xi(x) + acc) / frame.eps));
    }
    Ok(out)
}

/// Upper-tail normalised error function (1/√π)∫_{−∞}^w e^{−s²} ds.
pub fn erf_profile(w: f64) -> f64 {
    0.5 * libm::erfc(-w)
}

/// Erf closed form of the reflected amplitude at `x`.
pub fn c2_erf(eps: f64, x: f64, stokes: &StokesData, scale: &NaturalScaleMap) -> C {
    let xi = scale.xi(x);
    let w = (xi - stokes.xi_r) / (2.0 * eps * stokes.xi_c).sqrt();
    birth_factor(eps, xi, stokes) * erf_profile(w)
}

fn birth_factor(eps: f64, xi: f64, stokes: &StokesData) -> C {
    C::from_polar(stokes.prefactor() * (-stokes.xi_c / eps).exp(), (0.5 * xi - stokes.xi_r) / eps)
}

/// Windowed effective amplitude: zero left of the birth window around
/// `x_star_r`, erf-shaped inside, saturated to the right.
pub fn c2_eff(eps: f64, x: f64, stokes: &StokesData, scale: &NaturalScaleMap, x_star_r: f64, delta: f64) -> Result<C> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must lie in (0, 1/2)")));
    }
    let half = eps.powf(0.5 - delta);
    let d = x - x_star_r;
    if d < -half {
        return Ok(C::new(0.0, 0.0));
    }
    let xi = scale.xi(x);
    let factor = birth_factor(eps, xi, stokes);
    if d > half {
        return Ok(factor);
    }
    Ok(factor * erf_profile(stokes.a(scale, x) / eps.sqrt()))
}

/// |r| from the envelope at the right end.
pub fn reflection_coefficient(scale: &NaturalScaleMap, eps: f64, config: &StationaryConfig) -> Result<f64> {
    let (_, x_max) = config.ends(&scale.model);
    let sol = solve_stationary(scale, eps, &[x_max], config)?;
    let u = sol.envelope[0];
    Ok(u[1].norm() / u[0].norm())
}

/// Exact |r| for V₀ sech²(x/a) above the barrier (ħ ↦ ε, 2m = 1).
pub fn eckart_reflection_exact(v0: f64, a: f64, e: f64, eps: f64) -> f64 {
    use std::f64::consts::PI;
    let big = PI * a * e.sqrt() / eps;
    let disc = 4.0 * v0 * a * a / (eps * eps) - 1.0;
    // ln sinh(A) − ln cosh(B), or ln|cos| when the square root is imaginary
    let ln_sinh = big + (-(-2.0 * big).exp()).ln_1p() - std::f64::consts::LN_2;
    let ln_den = if disc >= 0.0 {
        let b = 0.5 * PI * disc.sqrt();
        b + (-2.0 * b).exp().ln_1p() - std::f64::consts::LN_2
    } else {
        (0.5 * PI * (-disc).sqrt()).cos().abs().ln()
    };
    let t = 2.0 * (ln_sinh - ln_den);
    // |r|² = 1 / (1 + e^t)
    (-0.5 * t.exp().ln_1p()).exp()
}

/// Brute-force reflection from the unreduced equation iεψ′ = Hψ, resolving
/// every oscillation. Only practical for moderate ε; used as a cross-check.
pub fn reflection_direct(scale: &NaturalScaleMap, eps: f64, config: &StationaryConfig) -> Result<f64> {
    struct Direct<'a> {
        scale: &'a NaturalScaleMap,
        eps: f64,
    }
    impl LinearRhs for Direct<'_> {
        fn matrices(&mut self, x0: f64, h: f64, c: &[f64], out: &mut [Mat2]) {
            for (ci, m) in c.iter().zip(out.iter_mut()) {
                let p2 = self.scale.e - self.scale.model.eval_real(x0 + ci * h);
                let zero = C::new(0.0, 0.0);
                *m = Mat2([[zero, C::new(0.0, -1.0 / self.eps)], [C::new(0.0, -p2 / self.eps), zero]]);
            }
        }
        fn accept(&mut self, _: f64, _: f64) {}
        fn phase_rate(&self, x: f64) -> f64 {
            self.scale.model.momentum_real(self.scale.e, x) / self.eps
        }
    }
    let (x_min, x_max) = config.ends(&scale.model);
    let model = &scale.model;
    let p0 = model.momentum_real(scale.e, x_min);
    // left-moving transmitted wave φ = 1/√p, iεφ′ = pφ
    let start = [C::new(1.0 / p0.sqrt(), 0.0), C::new(p0.sqrt(), 0.0)];
    let integrator = GaussIntegrator { abs_tol: 1e-14, rel_tol: 1e-13, ..GaussIntegrator::default() };
    let end = integrator.integrate(&mut Direct { scale, eps }, x_min, start, &[x_max])?[0];
    let r = model.momentum_real(scale.e, x_max).sqrt();
    let (a1, a2) = (0.5 * (r * end[0] + end[1] / r), 0.5 * (r * end[0] - end[1] / r));
    Ok(a2.norm() / a1.norm())
}

/// Exact reflection when the model has a closed form.
pub fn exact_reflection(model: &PotentialModel, e: f64, eps: f64) -> Option<f64> {
    match model.family {
        Family::Eckart => Some(eckart_reflection_exact(model.v0, model.a, e, eps)),
        Family::Free => Some(0.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superadiabatic::CoefficientSource;

    fn eckart_scale() -> NaturalScaleMap {
        NaturalScaleMap::new(PotentialModel::eckart(1.0, 1.0).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn exact_eckart_formula_matches_small_ratio_limit() {
        // deep semiclassical limit: |r| → e^{−π a(√E − √V₀)/ε}
        let eps = 0.02;
        let r = eckart_reflection_exact(1.0, 1.0, 2.0, eps);
        let s = (4.0 / (eps * eps) - 1.0f64).sqrt();
        let lead = (-std::f64::consts::PI * (2f64.sqrt() - 0.5 * eps * s) / eps).exp();
        assert!((r / lead - 1.0).abs() < 1e-12);
    }

    #[test]
    fn free_motion_has_no_reflection() {
        let scale = NaturalScaleMap::new(PotentialModel::free(), 1.5).unwrap();
        let sol = solve_stationary(&scale, 0.1, &[-30.0, 0.0, 30.0], &StationaryConfig::default()).unwrap();
        for (i, u) in sol.envelope.iter().enumerate() {
            assert_eq!(u[1], C::new(0.0, 0.0));
            let c1 = sol.psi_a(i)[0];
            let want = C::from_polar(1.0, -sol.xi[i] / 0.2);
            assert!((c1 - want).norm() < 1e-15);
        }
    }

    #[test]
    fn envelope_and_direct_integration_agree_with_the_exact_amplitude() {
        let scale = eckart_scale();
        let cfg = StationaryConfig::default();
        for eps in [0.2, 0.1] {
            let exact = eckart_reflection_exact(1.0, 1.0, 2.0, eps);
            let env = reflection_coefficient(&scale, eps, &cfg).unwrap();
            let direct = reflection_direct(&scale, eps, &cfg).unwrap();
            assert!((env / exact - 1.0).abs() < 1e-6, "ε={eps}: {env} vs {exact}");
            assert!((direct / exact - 1.0).abs() < 1e-5, "ε={eps}: {direct} vs {exact}");
        }
    }

    #[test]
    fn invariants_hold_along_the_solution() {
        let scale = eckart_scale();
        let grid: Vec<f64> = (0..=60).map(|k| -30.0 + k as f64).collect();
        let sol = solve_stationary(&scale, 0.1, &grid, &StationaryConfig::default()).unwrap();
        assert!(sol.invariant_drift(StationarySolution::wronskian) < 1e-12);
        assert!(sol.invariant_drift(StationarySolution::flux) < 1e-12);
        for i in 0..sol.len() {
            assert!((sol.wronskian(i) + sol.flux(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn amplitudes_reconstruct_phi_and_follow_the_erf_profile() {
        let scale = eckart_scale();
        let stokes = StokesData::with_scale(&scale).unwrap();
        let eps = 0.1;
        let grid: Vec<f64> = (0..=40).map(|k| -4.0 + 0.2 * k as f64).collect();
        let sol = solve_stationary(&scale, eps, &grid, &StationaryConfig::default()).unwrap();
        let frame = SuperadiabaticFrame::optimal(&scale, stokes, eps, CoefficientSource::Numeric);
        let amp = superadiabatic_amplitudes(&sol, &frame).unwrap();
        assert!(amp.reconstruction_residual(&sol) < 1e-12);
        let scale_c = (stokes.xi_c / eps).exp();
        let err = grid
            .iter()
            .zip(&amp.c2)
            .map(|(&x, &c2)| (c2 - FRAME_PHASE * c2_erf(eps, x, &stokes, &scale)).norm() * scale_c)
            .fold(0.0, f64::max);
        assert!(err < 0.2, "scaled sup error {err}");
    }

    #[test]
    fn first_amplitude_is_transported_adiabatically() {
        let scale = eckart_scale();
        let stokes = StokesData::with_scale(&scale).unwrap();
        for eps in [0.2, 0.1] {
            let grid: Vec<f64> = (0..=80).map(|k| -8.0 + 0.2 * k as f64).collect();
            let sol = solve_stationary(&scale, eps, &grid, &StationaryConfig::default()).unwrap();
            let frame = SuperadiabaticFrame::optimal(&scale, stokes, eps, CoefficientSource::Numeric);
            let amp = superadiabatic_amplitudes(&sol, &frame).unwrap();
            let want = c1_transported(&frame, &grid, -30.0, 0.25).unwrap();
            let bound = 10.0 / eps.sqrt() * (-2.0 * stokes.xi_c / eps).exp();
            let err = amp.c1.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err <= bound, "ε={eps}: {err:e} > {bound:e}");
        }
    }

    #[test]
    fn mismatched_frame_is_rejected() {
        let scale = eckart_scale();
        let stokes = StokesData::with_scale(&scale).unwrap();
        let sol = solve_stationary(&scale, 0.1, &[0.0], &StationaryConfig::default()).unwrap();
        let frame = SuperadiabaticFrame::new(&scale, stokes, 0.1, 3, CoefficientSource::Numeric);
        assert!(matches!(superadiabatic_amplitudes(&sol, &frame), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn erf_closed_form_limits() {
        let scale = eckart_scale();
        let stokes = StokesData::with_scale(&scale).unwrap();
        let eps = 0.1;
        let base = stokes.prefactor() * (-stokes.xi_c / eps).exp();
        assert!(c2_erf(eps, -25.0, &stokes, &scale).norm() < 1e-300_f64.max(base * 1e-12));
        assert!((c2_erf(eps, stokes.x_r, &stokes, &scale).norm() - 0.5 * base).abs() < 1e-12 * base);
        assert!((c2_erf(eps, 25.0, &stokes, &scale).norm() - base).abs() < 1e-12 * base);
        let eff = c2_eff(eps, stokes.x_r, &stokes, &scale, stokes.x_r, 0.2).unwrap();
        assert!((eff - c2_erf(eps, stokes.x_r, &stokes, &scale)).norm() < 1e-14 * base);
        assert_eq!(c2_eff(eps, stokes.x_r - 1.0, &stokes, &scale, stokes.x_r, 0.2).unwrap(), C::new(0.0, 0.0));
    }
}
