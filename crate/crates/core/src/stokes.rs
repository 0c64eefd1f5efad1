// SPDX-License-Identifier: Apache-2.0
//! Stokes geometry: the complex critical point nearest the real axis in the
//! ξ-metric, its exponent β, and the derived data ξ_r, ξ_c, γ and x_r.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::fd::fornberg_weights;
use crate::potential::PotentialModel;
use crate::scale::{path_integral, Kernel, NaturalScaleMap};

/// Relative tie margin for the nearest-point audit.
pub const NEAREST_MARGIN: f64 = 0.05;

/// Kind of singular point of p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singularity {
    /// Simple zero of E − V.
    TurningPoint,
    /// Pole of V of the given order.
    Pole(u32),
}

impl Singularity {
    /// Local exponent β in p ∼ (z − z₀)^β.
    pub fn beta(self) -> f64 {
        match self {
            Singularity::TurningPoint => 0.5,
            Singularity::Pole(m) => -(m as f64) / 2.0,
        }
    }
}

/// A singular point of p with its distance to the real axis in the ξ-metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub z: C,
    pub kind: Singularity,
    /// ξ(z), or `None` when the point is not reachable (shadowed or non-integrable).
    pub xi: Option<C>,
}

impl Candidate {
    /// inf over real x of |ξ(x) − ξ(z)|, which is |Im ξ(z)| since ξ maps ℝ onto ℝ.
    pub fn distance(&self) -> f64 {
        self.xi.map_or(f64::INFINITY, |x| x.im.abs())
    }
}

/// Per-energy Stokes data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesData {
    pub e: f64,
    pub z_crit: C,
    pub xi_crit: C,
    pub xi_r: f64,
    pub xi_c: f64,
    pub beta: f64,
    pub gamma: f64,
    pub x_r: f64,
}

fn search_box(model: &PotentialModel, e: f64) -> (f64, f64) {
    let analytic = model.analytic_turning_points(e).iter().map(|z| z.im).fold(0.0, f64::max);
    (5.0 * model.a, (2.0 * model.a).max(1.5 * analytic.min(10.0 * model.a)))
}

/// ξ at a singular point, continued along 0 → Re z → z.
pub fn xi_at_singular_point(model: &PotentialModel, e: f64, z: C) -> Result<C> {
    let path = [C::new(0.0, 0.0), C::new(z.re, 0.0), z];
    Ok(path_integral(model, e, &path, Kernel::Momentum, true)? * 2.0)
}

/// ∂_E ξ at a singular point where p vanishes: ∫ dz/p along the same path.
pub fn xi_de_at_turning_point(model: &PotentialModel, e: f64, z: C) -> Result<C> {
    let path = [C::new(0.0, 0.0), C::new(z.re, 0.0), z];
    path_integral(model, e, &path, Kernel::InverseMomentum, true)
}

fn shadowed(z: C, others: &[C]) -> bool {
    others
        .iter()
        .any(|s| (s.re - z.re).abs() < 1e-9 * (1.0 + z.re.abs()) && s.im < z.im - 1e-9 * (1.0 + z.im))
}

/// All singular points of p in the search strip, with ξ where reachable.
pub fn candidates(model: &PotentialModel, e: f64) -> Vec<Candidate> {
    let (re_max, im_max) = search_box(model, e);
    let mut pts: Vec<(C, Singularity)> =
        model.turning_points(e, re_max, im_max).into_iter().map(|z| (z, Singularity::TurningPoint)).collect();
    pts.extend(model.poles(im_max).into_iter().map(|z| (z, Singularity::Pole(model.pole_order()))));
    let all: Vec<C> = pts.iter().map(|p| p.0).collect();
    pts.into_iter()
        .map(|(z, kind)| {
            let reachable = kind.beta() > -1.0 && !shadowed(z, &all);
            let xi = if reachable { xi_at_singular_point(model, e, z).ok() } else { None };
            Candidate { z, kind, xi }
        })
        .collect()
}

fn nearest(model: &PotentialModel, e: f64) -> Result<Candidate> {
    let mut c: Vec<Candidate> = candidates(model, e).into_iter().filter(|c| c.xi.is_some()).collect();
    c.sort_by(|a, b| a.distance().total_cmp(&b.distance()));
    let first = *c.first().ok_or(Error::NoCriticalPoint)?;
    if let Some(second) = c.get(1) {
        if second.distance() <= first.distance() * (1.0 + NEAREST_MARGIN) {
            return Err(Error::MultipleNearest(first.z, second.z));
        }
    }
    Ok(first)
}

/// The critical point nearest the real axis in the ξ-metric.
pub fn find_zcrit(model: &PotentialModel, e: f64) -> Result<C> {
    nearest(model, e).map(|c| c.z)
}

/// Slope of log|p| against log r on circles around `z0`.
pub fn fit_local_exponent(model: &PotentialModel, e: f64, z0: C, r1: f64, r2: f64) -> Result<f64> {
    let mean_log = |r: f64| -> Result<f64> {
        let n = 32;
        let mut s = 0.0;
        for k in 0..n {
            let z = z0 + C::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64);
            s += (C::new(e, 0.0) - model.eval(z)?).norm().ln() / 2.0;
        }
        Ok(s / n as f64)
    };
    Ok((mean_log(r1)? - mean_log(r2)?) / (r1.ln() - r2.ln()))
}

impl StokesData {
    pub fn compute(model: &PotentialModel, e: f64) -> Result<Self> {
        let scale = NaturalScaleMap::new(*model, e)?;
        Self::with_scale(&scale)
    }

    pub fn with_scale(scale: &NaturalScaleMap) -> Result<Self> {
        let model = &scale.model;
        let e = scale.e;
        let c = nearest(model, e)?;
        if c.kind != Singularity::TurningPoint {
            // only simple turning points are supported as critical points
            return Err(Error::InvalidParameter(format!("critical point {} is a pole of V", c.z)));
        }
        Self::from_turning_point(scale, c.z)
    }

    /// Stokes data at a known turning point (skips the global search).
    pub fn from_turning_point(scale: &NaturalScaleMap, z: C) -> Result<Self> {
        let model = &scale.model;
        let e = scale.e;
        let dv = model.derivative(z)?;
        if dv.norm() < 1e-8 * model.v0.max(1.0) / model.a {
            return Err(Error::DegenerateTurningPoint(z));
        }
        let xi_crit = xi_at_singular_point(model, e, z)?;
        let beta = Singularity::TurningPoint.beta();
        Ok(StokesData {
            e,
            z_crit: z,
            xi_crit,
            xi_r: xi_crit.re,
            xi_c: xi_crit.im,
            beta,
            gamma: beta / (beta + 1.0),
            x_r: scale.xi_inverse(xi_crit.re)?,
        })
    }

    /// a(x,E) = (ξ(x) − ξ_r)/√(2ξ_c).
    pub fn a(&self, scale: &NaturalScaleMap, x: f64) -> f64 {
        (scale.xi(x) - self.xi_r) / (2.0 * self.xi_c).sqrt()
    }

    /// 2 sin(πγ/2), the leading reflection prefactor.
    pub fn prefactor(&self) -> f64 {
        2.0 * (std::f64::consts::PI * self.gamma / 2.0).sin()
    }
}

/// Tracks the turning point from `seed` to energy `e` by Newton on V(z) = E.
pub fn track_turning_point(model: &PotentialModel, e: f64, seed: C) -> Result<C> {
    let mut z = seed;
    for _ in 0..60 {
        let step = (model.eval(z)? - e) / model.derivative(z)?;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    if (model.eval(z)? - e).norm() < 1e-12 {
        Ok(z)
    } else {
        Err(Error::NoConvergence(format!("turning point near {seed} at E = {e}")))
    }
}

/// (ξ_crit, ∂_E ξ_crit, ∂²_E ξ_crit) at energy `e`, following the critical
/// point `z` continuously in E.
pub fn xi_crit_derivatives(model: &PotentialModel, e: f64, z: C) -> Result<[C; 3]> {
    let v = xi_at_singular_point(model, e, z)?;
    let d1 = xi_de_at_turning_point(model, e, z)?;
    let h = 0.02 * (e - model.sup()).min(1.0);
    let d1_at = |s: f64| -> Result<C> {
        let zz = track_turning_point(model, s, z)?;
        xi_de_at_turning_point(model, s, zz)
    };
    // evaluate once per node, then differentiate both parts
    let mut vals = Vec::new();
    for k in -4..=4 {
        vals.push(d1_at(e + k as f64 * h)?);
    }
    let nodes: Vec<f64> = (-4..=4).map(f64::from).collect();
    let w = fornberg_weights(0.0, &nodes, 1);
    let d2 = vals.iter().zip(&w).map(|(v, w)| v * *w).sum::<C>() / h;
    Ok([v, d1, d2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Family;
    use std::f64::consts::PI;

    #[test]
    fn free_potential_has_no_critical_point() {
        assert_eq!(find_zcrit(&PotentialModel::free(), 1.0), Err(Error::NoCriticalPoint));
    }

    #[test]
    fn eckart_critical_point_and_xi_c() {
        let m = PotentialModel::eckart(1.0, 1.0).unwrap();
        let z = find_zcrit(&m, 2.0).unwrap();
        assert!((z - C::new(0.0, PI / 4.0)).norm() < 1e-12);
        let s = StokesData::compute(&m, 2.0).unwrap();
        assert!((s.xi_c - PI * (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(s.xi_r.abs() < 1e-14 && s.x_r.abs() < 1e-12);
        assert!((s.gamma - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.prefactor() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_and_rational_pick_the_axis_root() {
        let g = PotentialModel::new(Family::GaussianBump, 1.0, 1.0).unwrap();
        assert!((find_zcrit(&g, 2.0).unwrap() - C::new(0.0, 2f64.ln().sqrt())).norm() < 1e-12);
        let r = PotentialModel::new(Family::RationalPole, 1.0, 1.0).unwrap();
        assert!((find_zcrit(&r, 2.0).unwrap() - C::new(0.0, 0.5f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn poles_are_shadowed_by_turning_points() {
        let m = PotentialModel::eckart(1.0, 1.0).unwrap();
        let c = candidates(&m, 2.0);
        let pole = c.iter().find(|c| matches!(c.kind, Singularity::Pole(_))).unwrap();
        assert!(pole.xi.is_none());
    }

    #[test]
    fn local_exponent_is_one_half() {
        let m = PotentialModel::new(Family::GaussianBump, 1.0, 1.0).unwrap();
        let z = find_zcrit(&m, 2.0).unwrap();
        let b = fit_local_exponent(&m, 2.0, z, 1e-3, 1e-4).unwrap();
        assert!((b - 0.5).abs() < 0.02, "{b}");
    }

    #[test]
    fn birth_function_vanishes_at_birth_point() {
        let m = PotentialModel::eckart(1.0, 1.0).unwrap();
        let sc = NaturalScaleMap::new(m, 2.0).unwrap();
        let s = StokesData::with_scale(&sc).unwrap();
        assert_eq!(s.a(&sc, s.x_r), 0.0);
        let expect = 2.219_509_871_831_934_6 / (2.0 * s.xi_c).sqrt();
        assert!((s.a(&sc, 1.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn energy_derivatives_match_differences() {
        let m = PotentialModel::eckart(1.0, 1.0).unwrap();
        let at = |e: f64| StokesData::compute(&m, e).unwrap().xi_c;
        let z = find_zcrit(&m, 2.0).unwrap();
        let [v, d1, d2] = xi_crit_derivatives(&m, 2.0, z).unwrap();
        // ξ_c(E) = π(√E − √V₀) for the Eckart barrier with a = 1
        assert!((v.im - at(2.0)).abs() < 1e-13);
        assert!((d1.im - PI / (2.0 * 2f64.sqrt())).abs() < 1e-11, "{d1}");
        assert!((d2.im + PI / (4.0 * 2f64.powf(1.5))).abs() < 1e-8, "{d2}");
        assert!(d1.re.abs() < 1e-12);
    }
}
