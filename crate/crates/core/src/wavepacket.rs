// SPDX-License-Identifier: Apache-2.0
//! The time-dependent reflected wave.
//!
//! A superposition ∫ Q(E) e^{−itE/ε} φ(x,E) dE of stationary solutions with
//! an energy density Q = e^{−G/ε} e^{−iJ/ε} P carries an exponentially small
//! reflected part χ(x,t). This module evaluates χ by energy quadrature and
//! by its closed forms in the birth region (`near`), at moderate distance
//! (`mod`), in the scattering region (`far`) and along the classical
//! trajectory (`gauss`).
//!
//! All fields use the crate's frame convention: the closed forms are
//! multiplied by [`FRAME_PHASE`] so that they are directly comparable with
//! the quadrature of the numerically extracted amplitude.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::fd::central_second_derivative;
use crate::numerics::quad::gauss_legendre;
use crate::numerics::roots::safeguarded_newton;
use crate::potential::PotentialModel;
use crate::scale::NaturalScaleMap;
use crate::stationary::{c2_eff, c2_erf, erf_profile, solve_stationary, superadiabatic_amplitudes, StationaryConfig, FRAME_PHASE};
use crate::stokes::{xi_crit_derivatives, StokesData};
use crate::superadiabatic::{CoefficientSource, SuperadiabaticFrame};

/// Energy density Q(E, ε) = e^{−G/ε} e^{−iJ/ε} P(E, ε) on a window Δ.
pub trait EnergyDensity: Sync + std::fmt::Debug {
    fn window(&self) -> (f64, f64);
    /// (G, G′, G″).
    fn g(&self, e: f64) -> [f64; 3];
    /// (J, J′, J″).
    fn j(&self, e: f64) -> [f64; 3];
    fn p(&self, e: f64, eps: f64) -> C;

    fn q(&self, e: f64, eps: f64) -> C {
        let [g, ..] = self.g(e);
        let [j, ..] = self.j(e);
        C::from_polar((-g / eps).exp(), -j / eps) * self.p(e, eps)
    }
}

/// G = (E − E₀)²/(2s²), J = 0, P constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDensity {
    pub e0: f64,
    pub s: f64,
    pub window: (f64, f64),
    pub amplitude: C,
}

impl GaussianDensity {
    pub fn new(e0: f64, s: f64, window: (f64, f64)) -> Result<Self> {
        if !(s > 0.0) || !(window.0 < window.1) || !(window.0..=window.1).contains(&e0) {
            return Err(Error::InvalidParameter(format!("bad density: E₀ = {e0}, s = {s}, Δ = {window:?}")));
        }
        Ok(Self { e0, s, window, amplitude: C::new(1.0, 0.0) })
    }
}

impl Default for GaussianDensity {
    /// Peak at E₀ = 2 with s = 0.3 on Δ = [1.2, 2.8].
    fn default() -> Self {
        Self { e0: 2.0, s: 0.3, window: (1.2, 2.8), amplitude: C::new(1.0, 0.0) }
    }
}

impl EnergyDensity for GaussianDensity {
    fn window(&self) -> (f64, f64) {
        self.window
    }
    fn g(&self, e: f64) -> [f64; 3] {
        let s2 = self.s * self.s;
        let d = e - self.e0;
        [0.5 * d * d / s2, d / s2, 1.0 / s2]
    }
    fn j(&self, _: f64) -> [f64; 3] {
        [0.0; 3]
    }
    fn p(&self, _: f64, _: f64) -> C {
        self.amplitude
    }
}

/// The minimiser of M = G + ξ_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EStar {
    pub e: f64,
    pub m: f64,
    pub m1: f64,
    pub m2: f64,
}

/// Locates E* given ξ_c and its first two E-derivatives.
pub fn find_estar(density: &dyn EnergyDensity, xi_c: impl Fn(f64) -> Result<[f64; 3]> + Sync) -> Result<EStar> {
    let (e1, e2) = density.window();
    let m_all = |e: f64| -> Result<[f64; 3]> {
        let g = density.g(e);
        let c = xi_c(e)?;
        Ok([g[0] + c[0], g[1] + c[1], g[2] + c[2]])
    };
    const N: usize = 200;
    let grid: Vec<f64> = (0..=N).map(|k| e1 + (e2 - e1) * k as f64 / N as f64).collect();
    let values: Vec<f64> = grid.par_iter().map(|&e| m_all(e).map(|m| m[0])).collect::<Result<_>>()?;
    let imin = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    if imin == 0 || imin == N {
        return Err(Error::BoundaryMinimum(grid[imin]));
    }
    let second = (values[imin + 1] - 2.0 * values[imin] + values[imin - 1]) / (grid[1] - grid[0]).powi(2);
    let (lo, hi) = (grid[imin - 1], grid[imin + 1]);
    let e = safeguarded_newton(
        |e| {
            let m = m_all(e).unwrap_or([f64::NAN; 3]);
            (m[1], m[2])
        },
        lo,
        hi,
        1e-15,
    )
    .map_err(|_| Error::DegenerateMinimum(second))?;
    let [m, m1, m2] = m_all(e)?;
    if !(m2 > 1e-8) {
        return Err(Error::DegenerateMinimum(m2));
    }
    Ok(EStar { e, m, m1, m2 })
}

/// Stationary and Stokes data at one energy.
#[derive(Debug, Clone)]
pub struct EnergyData {
    pub scale: NaturalScaleMap,
    pub stokes: StokesData,
    /// (ξ_crit, ∂_E ξ_crit, ∂²_E ξ_crit).
    pub xi_crit: [C; 3],
}

impl EnergyData {
    pub fn new(model: &PotentialModel, e: f64) -> Result<Self> {
        let scale = NaturalScaleMap::new(*model, e)?;
        let stokes = StokesData::with_scale(&scale)?;
        let xi_crit = xi_crit_derivatives(model, e, stokes.z_crit)?;
        Ok(Self { scale, stokes, xi_crit })
    }

    pub fn xi_c(&self) -> [f64; 3] {
        self.xi_crit.map(|z| z.im)
    }

    pub fn xi_r(&self) -> [f64; 3] {
        self.xi_crit.map(|z| z.re)
    }
}

/// ξ_c and its derivatives, for [`find_estar`].
pub fn xi_c_of(model: &PotentialModel, e: f64) -> Result<[f64; 3]> {
    let z = crate::stokes::find_zcrit(model, e)?;
    Ok(xi_crit_derivatives(model, e, z)?.map(|z| z.im))
}

/// Root of ½∂_Eξ(q) + R′ = t on the real line.
pub fn classical_trajectory(scale: &NaturalScaleMap, r_prime: f64, t: f64) -> Result<f64> {
    let span = 30.0 * scale.model.a;
    let f = |q: f64| (0.5 * scale.xi_de(q) + r_prime - t, 0.5 / scale.model.momentum_real(scale.e, q));
    safeguarded_newton(f, -span, span, 1e-15).map_err(|_| Error::NoRoot(t))
}

/// Region constants of the piecewise description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionConstants {
    pub delta: f64,
    pub beta: f64,
    pub c0: f64,
    pub c1: f64,
}

/// `c1 = 3`: the far form drops ∫ₓ^∞(p − k)/ε from the phase, which for an
/// exponentially decaying potential is still O(1) at x ≈ ε^{−β} when ε ≥ 0.05.
impl Default for RegionConstants {
    fn default() -> Self {
        Self { delta: 0.2, beta: 0.12, c0: 1.0, c1: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Before,
    Near,
    Mod,
    Far,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Before => "before",
            Region::Near => "near",
            Region::Mod => "mod",
            Region::Far => "far",
        }
    }
}

/// Region boundaries in x for one ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBoundaries {
    pub x_r: f64,
    pub near_half_width: f64,
    pub far_start: f64,
    /// Half-width of the c_eff birth window.
    pub eff_half_width: f64,
}

impl RegionBoundaries {
    pub fn region(&self, x: f64) -> Region {
        let d = x - self.x_r;
        if d <= -self.near_half_width {
            Region::Before
        } else if d < self.near_half_width {
            Region::Near
        } else if x < self.far_start {
            Region::Mod
        } else {
            Region::Far
        }
    }

    /// Points where some closed form or c_eff jumps.
    pub fn breaks(&self) -> [f64; 5] {
        [
            self.x_r - self.near_half_width,
            self.x_r + self.near_half_width,
            self.far_start,
            self.x_r - self.eff_half_width,
            self.x_r + self.eff_half_width,
        ]
    }
}

/// Everything evaluated at E* that the closed forms need.
#[derive(Debug, Clone)]
pub struct ReflectedWave<'d> {
    pub model: PotentialModel,
    pub density: &'d dyn EnergyDensity,
    pub regions: RegionConstants,
    pub estar: EStar,
    pub star: EnergyData,
    /// (R, R′, R″) with R = −ξ_r − J.
    pub r: [f64; 3],
    /// (ω, ω′, ω″).
    pub omega: [f64; 3],
    pub k_star: f64,
    /// P(E*, 0).
    pub p_star: C,
}

impl<'d> ReflectedWave<'d> {
    pub fn new(model: PotentialModel, density: &'d dyn EnergyDensity, regions: RegionConstants) -> Result<Self> {
        let estar = find_estar(density, |e| xi_c_of(&model, e))?;
        let star = EnergyData::new(&model, estar.e)?;
        let xr = star.xi_r();
        let j = density.j(estar.e);
        let r = [-xr[0] - j[0], -xr[1] - j[1], -xr[2] - j[2]];
        Ok(Self {
            omega: star.scale.omega_derivatives(),
            k_star: star.scale.p_inf(),
            p_star: density.p(estar.e, 0.0),
            model,
            density,
            regions,
            estar,
            star,
            r,
        })
    }

    pub fn x_r(&self) -> f64 {
        self.star.stokes.x_r
    }

    fn sin_factor(&self) -> f64 {
        (0.5 * PI * self.star.stokes.gamma).sin()
    }

    pub fn boundaries(&self, eps: f64) -> RegionBoundaries {
        let rc = self.regions;
        RegionBoundaries {
            x_r: self.x_r(),
            near_half_width: rc.c0 * eps.powf(0.5 - rc.delta),
            far_start: self.x_r() + rc.c1 * eps.powf(-rc.beta),
            eff_half_width: eps.powf(0.5 - rc.delta),
        }
    }

    /// (S, S′, S″) at (E*, x, t), primes in E.
    pub fn s_derivatives(&self, x: f64, t: f64) -> [f64; 3] {
        let sc = &self.star.scale;
        let e = self.estar.e;
        [
            -0.5 * sc.xi(x) - self.r[0] + e * t,
            -0.5 * sc.xi_de(x) - self.r[1] + t,
            -0.5 * sc.xi_de2(x) - self.r[2],
        ]
    }

    /// (a, ∂_E a) at (x, E*).
    pub fn a_derivatives(&self, x: f64) -> [f64; 2] {
        let sc = &self.star.scale;
        let [xr, xr1, _] = self.star.xi_r();
        let [xc, xc1, _] = self.star.xi_c();
        let d = sc.xi(x) - xr;
        let n = (2.0 * xc).sqrt();
        [d / n, (sc.xi_de(x) - xr1) / n - d * xc1 / (2.0 * xc * n)]
    }

    /// P₀(x, E*) = 2P(0,E*) sin(πγ/2)/√p.
    pub fn p0(&self, x: f64) -> C {
        self.p_star * (2.0 * self.sin_factor() / self.model.momentum_real(self.estar.e, x).sqrt())
    }

    /// e^{−(M + iS)/ε}.
    fn carrier(&self, eps: f64, s: f64) -> C {
        C::from_polar((-self.estar.m / eps).exp(), -s / eps)
    }

    /// q_t, required to lie at or beyond the birth point.
    pub fn trajectory(&self, t: f64) -> Result<f64> {
        let q = classical_trajectory(&self.star.scale, self.r[1], t)?;
        if q < self.x_r() {
            return Err(Error::NoRoot(t));
        }
        Ok(q)
    }

    /// Time at which the trajectory passes a given point.
    pub fn time_at(&self, q: f64) -> f64 {
        0.5 * self.star.scale.xi_de(q) + self.r[1]
    }

    pub fn chi_near(&self, eps: f64, x: f64, t: f64) -> C {
        let [s, s1, s2] = self.s_derivatives(x, t);
        let [a, a1] = self.a_derivatives(x);
        let m2 = self.estar.m2;
        let half = 10.0 / m2.sqrt();
        let rate = s1.abs() / eps.sqrt() + s2.abs() * half;
        let panels = 8 + (rate * 2.0 * half / (2.0 * PI)).ceil() as usize;
        let (nodes, weights) = gauss_legendre(16);
        let quad = C::new(0.5 * m2, 0.5 * s2);
        let h = 2.0 * half / panels as f64;
        let mut sum = C::new(0.0, 0.0);
        for k in 0..panels {
            let mid = -half + h * (k as f64 + 0.5);
            for (u, w) in nodes.iter().zip(&weights) {
                let y = mid + 0.5 * h * u;
                let phase = (-quad * y * y - C::new(0.0, s1 * y / eps.sqrt())).exp();
                sum += phase * (erf_profile(a / eps.sqrt() + a1 * y) * w * 0.5 * h);
            }
        }
        FRAME_PHASE * self.p0(x) * eps.sqrt() * self.carrier(eps, s) * sum
    }

    pub fn chi_mod(&self, eps: f64, x: f64, t: f64) -> C {
        let [s, s1, s2] = self.s_derivatives(x, t);
        let den = C::new(self.estar.m2, s2);
        FRAME_PHASE * self.p0(x) * (2.0 * PI * eps).sqrt() / den.sqrt()
            * self.carrier(eps, s)
            * (-(s1 * s1) / (2.0 * eps * den)).exp()
    }

    /// Tilde quantities at k*: (M̃″, (R̃+ω̃)′, (R̃+ω̃)″).
    pub fn tilde_derivatives(&self) -> [f64; 3] {
        let k = self.k_star;
        let ro1 = self.r[1] + self.omega[1];
        let ro2 = self.r[2] + self.omega[2];
        [4.0 * k * k * self.estar.m2 + 2.0 * self.estar.m1, 2.0 * k * ro1, 4.0 * k * k * ro2 + 2.0 * ro1]
    }

    pub fn chi_far(&self, eps: f64, x: f64, t: f64) -> C {
        let k = self.k_star;
        let [mt2, ro1, ro2] = self.tilde_derivatives();
        let den = C::new(mt2, 2.0 * t - ro2);
        let e = self.estar.e;
        let pref = self.p_star * (2.0 * self.sin_factor() * 2.0 * (2.0 * PI * eps * k).sqrt()) / den.sqrt();
        let phase = C::from_polar((-self.estar.m / eps).exp(), (self.r[0] + self.omega[0] + x * k - e * t) / eps);
        let shift = x - 2.0 * k * t + ro1;
        FRAME_PHASE * pref * phase * (-(shift * shift) / (2.0 * eps * den)).exp()
    }

    pub fn chi_gauss(&self, eps: f64, x: f64, t: f64) -> Result<C> {
        let q = self.trajectory(t)?;
        let [_, _, s2q] = self.s_derivatives(q, t);
        let [s, ..] = self.s_derivatives(x, t);
        let den = C::new(self.estar.m2, s2q);
        let p = self.model.momentum_real(self.estar.e, q);
        Ok(FRAME_PHASE * self.p0(q) * (2.0 * PI * eps).sqrt() / den.sqrt()
            * self.carrier(eps, s)
            * (-((x - q) * (x - q)) / (8.0 * eps * p * p * den)).exp())
    }

    /// Standard deviation in x of |χ_gauss|² at time t.
    pub fn gauss_std(&self, eps: f64, t: f64) -> Result<f64> {
        let q = self.trajectory(t)?;
        let [_, _, s2q] = self.s_derivatives(q, t);
        let m2 = self.estar.m2;
        let p = self.model.momentum_real(self.estar.e, q);
        Ok((2.0 * eps * p * p * (m2 * m2 + s2q * s2q) / m2).sqrt())
    }

    /// Whether t lies in the window where the Gaussian form is asserted.
    pub fn gauss_window(&self, eps: f64, t: f64) -> Result<f64> {
        let q = self.trajectory(t)?;
        let d = (q - self.x_r()).abs();
        if d > eps.powf(0.5 - self.regions.delta) && d < eps.powf(-self.regions.beta) {
            Ok(q)
        } else {
            Err(Error::OutsideValidityWindow { t, q })
        }
    }

    pub fn chi_expl(&self, eps: f64, x: f64, t: f64) -> (C, Region) {
        let region = self.boundaries(eps).region(x);
        let v = match region {
            Region::Before => C::new(0.0, 0.0),
            Region::Near => self.chi_near(eps, x, t),
            Region::Mod => self.chi_mod(eps, x, t),
            Region::Far => self.chi_far(eps, x, t),
        };
        (v, region)
    }

    /// 4|P sin(πγ/2)| π^{3/4} M″^{−1/4} e^{−M/ε} ε^{3/4}.
    pub fn gauss_l2_norm(&self, eps: f64) -> f64 {
        4.0 * (self.p_star * self.sin_factor()).norm() * PI.powf(0.75) * self.estar.m2.powf(-0.25)
            * (-self.estar.m / eps).exp()
            * eps.powf(0.75)
    }

    /// e^{−M*/ε} ε^{3/4}, the scale every field distance is measured in.
    pub fn norm_scale(&self, eps: f64) -> f64 {
        (-self.estar.m / eps).exp() * eps.powf(0.75)
    }

    /// (M̃″(k*) by finite differences of M(E(k)), 4k*²M″(E*)).
    pub fn curvature_identity(&self) -> Result<(f64, f64)> {
        let k = self.k_star;
        let v_inf = self.estar.e - k * k;
        let m_of_k = |kk: f64| -> f64 {
            let e = kk * kk + v_inf;
            let g = self.density.g(e)[0];
            let z = crate::stokes::track_turning_point(&self.model, e, self.star.stokes.z_crit);
            match z.and_then(|z| crate::stokes::xi_at_singular_point(&self.model, e, z)) {
                Ok(x) => g + x.im,
                Err(_) => f64::NAN,
            }
        };
        let fd = central_second_derivative(m_of_k, k, 0.02);
        if !fd.is_finite() {
            return Err(Error::NoConvergence("M(E(k)) could not be evaluated near k*".into()));
        }
        Ok((fd, 4.0 * k * k * self.estar.m2))
    }

    pub fn energy_window(&self, eps: f64) -> (f64, f64) {
        let (e1, e2) = self.density.window();
        let w = eps.powf(0.5 - self.regions.delta);
        ((self.estar.e - w).max(e1), (self.estar.e + w).min(e2))
    }
}

/// Quadrature nodes in x: composite Gauss–Legendre with breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct XGrid {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl XGrid {
    /// 16-point panels no longer than `panel` on `[lo, hi]`, split at `breaks`.
    pub fn composite(lo: f64, hi: f64, panel: f64, breaks: &[f64]) -> Self {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let (nodes, weights) = gauss_legendre(16);
        let mut x = Vec::new();
        let mut w = Vec::new();
        for seg in cuts.windows(2) {
            let n = ((seg[1] - seg[0]) / panel).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / n as f64;
            for k in 0..n {
                let mid = seg[0] + h * (k as f64 + 0.5);
                for (u, wt) in nodes.iter().zip(&weights) {
                    x.push(mid + 0.5 * h * u);
                    w.push(0.5 * h * wt);
                }
            }
        }
        Self { x, w }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn l2(&self, f: impl Fn(usize) -> C) -> f64 {
        (0..self.len()).map(|i| self.w[i] * f(i).norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Energy quadrature of the numerically extracted amplitude.
    Quadrature,
    /// Energy quadrature of the leading erf amplitude.
    Leading,
    Eff,
    Near,
    Mod,
    Far,
    Gauss,
    Expl,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Quadrature => "quadrature",
            Provenance::Leading => "leading",
            Provenance::Eff => "eff",
            Provenance::Near => "near",
            Provenance::Mod => "mod",
            Provenance::Far => "far",
            Provenance::Gauss => "gauss",
            Provenance::Expl => "expl",
        }
    }
}

/// Samples of χ(·, t) on an [`XGrid`].
#[derive(Debug, Clone)]
pub struct ReflectedWaveField {
    pub eps: f64,
    pub t: f64,
    pub grid: XGrid,
    pub chi: Vec<C>,
    pub provenance: Provenance,
    pub boundaries: RegionBoundaries,
}

impl ReflectedWaveField {
    pub fn norm(&self) -> f64 {
        self.grid.l2(|i| self.chi[i])
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        self.grid.l2(|i| self.chi[i] - other.chi[i])
    }

    pub fn region(&self, i: usize) -> Region {
        self.boundaries.region(self.grid.x[i])
    }
}

/// Closed-form field on a grid.
pub fn closed_form_field(wave: &ReflectedWave, eps: f64, t: f64, grid: &XGrid, kind: Provenance) -> Result<ReflectedWaveField> {
    let chi = grid
        .x
        .par_iter()
        .map(|&x| match kind {
            Provenance::Near => Ok(wave.chi_near(eps, x, t)),
            Provenance::Mod => Ok(wave.chi_mod(eps, x, t)),
            Provenance::Far => Ok(wave.chi_far(eps, x, t)),
            Provenance::Gauss => wave.chi_gauss(eps, x, t),
            Provenance::Expl => Ok(wave.chi_expl(eps, x, t).0),
            other => Err(Error::InvalidParameter(format!("{} is not a closed form", other.name()))),
        })
        .collect::<Result<_>>()?;
    Ok(ReflectedWaveField { eps, t, grid: grid.clone(), chi, provenance: kind, boundaries: wave.boundaries(eps) })
}

/// Per energy node: numeric amplitudes (if requested), effective and leading.
type NodeFields = (Option<Vec<C>>, Vec<C>, Vec<C>);

/// Per-energy amplitudes c₂φ₂ on a fixed x-grid, reusable across t.
#[derive(Debug, Clone)]
pub struct EnergySamples {
    pub eps: f64,
    pub grid: XGrid,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Q(E_k, ε).
    pub q: Vec<C>,
    pub numeric: Option<Vec<Vec<C>>>,
    pub leading: Vec<Vec<C>>,
    pub eff: Vec<Vec<C>>,
    boundaries: RegionBoundaries,
    e_star: f64,
}

/// Default node count 40·(0.2/ε)^{1/2}.
pub fn default_energy_nodes(eps: f64) -> usize {
    (40.0 * (0.2 / eps).sqrt()).ceil() as usize
}

impl EnergySamples {
    /// Gauss–Legendre in E on Δ_ε with `n` nodes. `numeric` controls whether
    /// stationary solutions are computed (the expensive part).
    pub fn new(wave: &ReflectedWave, eps: f64, grid: &XGrid, n: usize, numeric: bool) -> Result<Self> {
        let (lo, hi) = wave.energy_window(eps);
        let (u, wu) = gauss_legendre(n);
        let nodes: Vec<f64> = u.iter().map(|u| 0.5 * (lo + hi) + 0.5 * (hi - lo) * u).collect();
        let weights: Vec<f64> = wu.iter().map(|w| 0.5 * (hi - lo) * w).collect();
        let x_star = wave.x_r();
        let delta = wave.regions.delta;
        let (x_lo, x_hi) = StationaryConfig::default().ends(&wave.model);
        let cfg = StationaryConfig {
            x_min: Some(x_lo.min(grid.x[0] - 1.0)),
            x_max: Some(x_hi.max(grid.x[grid.len() - 1] + 1.0)),
            ..StationaryConfig::default()
        };
        let per_node: Vec<NodeFields> = nodes
            .par_iter()
            .map(|&e| -> Result<_> {
                let data = EnergyData::new(&wave.model, e)?;
                let frame = SuperadiabaticFrame::optimal(&data.scale, data.stokes, eps, CoefficientSource::Numeric);
                let sol = solve_stationary(&data.scale, eps, &grid.x, &cfg)?;
                let amp = superadiabatic_amplitudes(&sol, &frame)?;
                let mut lead = Vec::with_capacity(grid.len());
                let mut eff = Vec::with_capacity(grid.len());
                for (i, &x) in grid.x.iter().enumerate() {
                    let phi2 = amp.phi2[i];
                    lead.push(FRAME_PHASE * c2_erf(eps, x, &data.stokes, &data.scale) * phi2);
                    eff.push(FRAME_PHASE * c2_eff(eps, x, &data.stokes, &data.scale, x_star, delta)? * phi2);
                }
                let num = numeric.then(|| amp.c2.iter().zip(&amp.phi2).map(|(c, f)| c * f).collect());
                Ok((num, lead, eff))
            })
            .collect::<Result<_>>()?;
        let mut numeric_rows = numeric.then(Vec::new);
        let mut leading = Vec::with_capacity(n);
        let mut eff = Vec::with_capacity(n);
        for (num, lead, ef) in per_node {
            if let (Some(rows), Some(num)) = (numeric_rows.as_mut(), num) {
                rows.push(num);
            }
            leading.push(lead);
            eff.push(ef);
        }
        Ok(Self {
            eps,
            grid: grid.clone(),
            q: nodes.iter().map(|&e| wave.density.q(e, eps)).collect(),
            nodes,
            weights,
            numeric: numeric_rows,
            leading,
            eff,
            boundaries: wave.boundaries(eps),
            e_star: wave.estar.e,
        })
    }

    /// χ(·, t) for one amplitude source.
    pub fn field(&self, t: f64, source: Provenance) -> Result<ReflectedWaveField> {
        let rows = match source {
            Provenance::Quadrature => self
                .numeric
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("numeric amplitudes were not computed".into()))?,
            Provenance::Leading => &self.leading,
            Provenance::Eff => &self.eff,
            other => return Err(Error::InvalidParameter(format!("{} is not a quadrature source", other.name()))),
        };
        // the linear phase at E* is factored out exactly
        let base = C::from_polar(1.0, -t * self.e_star / self.eps);
        let coef: Vec<C> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.q)
            .map(|((&e, &w), &q)| q * w * C::from_polar(1.0, -t * (e - self.e_star) / self.eps) * base)
            .collect();
        let chi = (0..self.grid.len())
            .map(|i| coef.iter().zip(rows).map(|(c, row)| c * row[i]).sum())
            .collect();
        Ok(ReflectedWaveField {
            eps: self.eps,
            t,
            grid: self.grid.clone(),
            chi,
            provenance: source,
            boundaries: self.boundaries,
        })
    }
}

/// χ by energy quadrature with the default node count, verified by doubling.
pub fn chi_quadrature(wave: &ReflectedWave, eps: f64, t: f64, grid: &XGrid, source: Provenance) -> Result<ReflectedWaveField> {
    let numeric = source == Provenance::Quadrature;
    let n = default_energy_nodes(eps);
    let coarse = EnergySamples::new(wave, eps, grid, n, numeric)?.field(t, source)?;
    let fine = EnergySamples::new(wave, eps, grid, 2 * n, numeric)?.field(t, source)?;
    let (a, b) = (coarse.norm(), fine.norm());
    let tol = 1e-6 * b;
    if (a - b).abs() > tol {
        return Err(Error::QuadratureNotConverged { err: (a - b).abs(), tol });
    }
    Ok(fine)
}

/// (∫|J|² dx, 4πε∫p(∞,E)|f|² dE) for J(x) = ∫_Δ f(E) e^{ip(∞,E)x/ε} dE
/// with a Gaussian f of width `s` centred at `e0`.
pub fn plancherel_gaussian(model: &PotentialModel, window: (f64, f64), e0: f64, s: f64, eps: f64) -> Result<(f64, f64)> {
    let (e1, e2) = window;
    if !(e1 > model.sup()) {
        return Err(Error::InvalidParameter("window must lie above the barrier".into()));
    }
    let f = |e: f64| (-(e - e0).powi(2) / (2.0 * s * s)).exp();
    let k = |e: f64| e.sqrt();
    let (u, wu) = gauss_legendre(400);
    let nodes: Vec<(f64, f64)> = u.iter().zip(&wu).map(|(u, w)| (0.5 * (e1 + e2) + 0.5 * (e2 - e1) * u, 0.5 * (e2 - e1) * w)).collect();
    let rhs = 4.0 * PI * eps * nodes.iter().map(|&(e, w)| w * k(e) * f(e) * f(e)).sum::<f64>();
    // |J|² decays like a Gaussian of width ε/σ_k with σ_k = s/(2k₀)
    let width = eps * 2.0 * k(e0) / s;
    let grid = XGrid::composite(-12.0 * width, 12.0 * width, width / 4.0, &[]);
    let lhs: f64 = grid
        .x
        .par_iter()
        .zip(&grid.w)
        .map(|(&x, &w)| {
            let j: C = nodes.iter().map(|&(e, we)| C::from_polar(we * f(e), k(e) * x / eps)).sum();
            w * j.norm_sqr()
        })
        .sum();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eckart() -> PotentialModel {
        PotentialModel::eckart(1.0, 1.0).unwrap()
    }

    #[test]
    fn estar_for_constant_and_linear_xi_c() {
        let d = GaussianDensity::new(2.0, 1.0, (1.0, 3.0)).unwrap();
        let s = find_estar(&d, |_| Ok([0.7, 0.0, 0.0])).unwrap();
        assert!((s.e - 2.0).abs() < 1e-12);
        let s = find_estar(&d, |e| Ok([0.3 * e, 0.3, 0.0])).unwrap();
        assert!((s.e - 1.7).abs() < 1e-12 && s.m1.abs() < 1e-10);
    }

    #[test]
    fn estar_on_boundary_is_rejected() {
        let d = GaussianDensity::new(2.0, 1.0, (1.2, 2.8)).unwrap();
        assert!(matches!(find_estar(&d, |e| xi_c_of(&eckart(), e)), Err(Error::BoundaryMinimum(_))));
    }

    #[test]
    fn default_density_has_interior_estar_below_the_peak() {
        let d = GaussianDensity::default();
        let s = find_estar(&d, |e| xi_c_of(&eckart(), e)).unwrap();
        assert!(s.m1.abs() < 1e-10 && s.m2 > 0.0);
        assert!(s.e < 2.0 && s.e > 1.8, "{s:?}");
    }

    #[test]
    fn free_trajectory_is_linear() {
        let scale = NaturalScaleMap::new(PotentialModel::free(), 1.7).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let q = classical_trajectory(&scale, 0.2, t).unwrap();
            assert!((q - 2.0 * 1.7f64.sqrt() * (t - 0.2)).abs() < 1e-10);
        }
    }

    #[test]
    fn gauss_and_mod_agree_at_the_trajectory() {
        let d = GaussianDensity::default();
        let w = ReflectedWave::new(eckart(), &d, RegionConstants::default()).unwrap();
        let t = w.time_at(0.9);
        let q = w.trajectory(t).unwrap();
        assert!((q - 0.9).abs() < 1e-10 && w.s_derivatives(q, t)[1].abs() < 1e-12);
        let eps = 0.1;
        let g = w.chi_gauss(eps, q, t).unwrap();
        let m = w.chi_mod(eps, q, t);
        assert!((g.norm() / m.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saturated_near_form_reduces_to_the_mod_form() {
        let d = GaussianDensity::default();
        let w = ReflectedWave::new(eckart(), &d, RegionConstants::default()).unwrap();
        // far to the right of the birth point the erf is saturated
        let t = w.time_at(2.0);
        let eps = 0.02;
        let near = w.chi_near(eps, 2.0, t);
        let m = w.chi_mod(eps, 2.0, t);
        assert!((near / m - 1.0).norm() < 1e-8, "{near} vs {m}");
    }

    #[test]
    fn plancherel_identity() {
        let (lhs, rhs) = plancherel_gaussian(&eckart(), (1.2, 2.8), 2.0, 0.1, 0.1).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn erf_tail_obeys_the_exponential_estimate() {
        // 1 − erf(w) ≤ e^{−w²}/(2√π w) for the upper-tail normalisation
        for w in [0.5f64, 1.0, 2.0, 4.0] {
            let tail = 1.0 - erf_profile(w);
            assert!(tail <= (-w * w).exp() / (2.0 * PI.sqrt() * w));
        }
    }
}
