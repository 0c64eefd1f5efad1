// SPDX-License-Identifier: Apache-2.0
//! Analytic barrier families and the classical momentum.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::series::Series;

/// Supported barrier shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `V₀ sech²(x/a)`
    Eckart,
    /// `V₀ exp(−(x/a)²)`
    GaussianBump,
    /// `V₀ a²/(x² + a²)`
    RationalPole,
    /// `V ≡ 0`, the decoupled limit.
    Free,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eckart" => Ok(Family::Eckart),
            "gaussian" | "gaussianbump" | "gaussian_bump" | "gauss" => Ok(Family::GaussianBump),
            "rational" | "rationalpole" | "rational_pole" | "lorentzian" => Ok(Family::RationalPole),
            "free" | "zero" => Ok(Family::Free),
            other => Err(Error::InvalidParameter(format!("unknown potential family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Eckart => "eckart",
            Family::GaussianBump => "gaussian",
            Family::RationalPole => "rational",
            Family::Free => "free",
        })
    }
}

/// Default radius around a pole inside which evaluation is refused.
pub const DEFAULT_POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialModel {
    pub family: Family,
    pub v0: f64,
    pub a: f64,
    pub pole_guard: f64,
}

impl PotentialModel {
    pub fn new(family: Family, v0: f64, a: f64) -> Result<Self> {
        if family != Family::Free && !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::InvalidParameter(format!("barrier height must be positive, got {v0}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("length scale must be positive, got {a}")));
        }
        let v0 = if family == Family::Free { 0.0 } else { v0 };
        Ok(Self { family, v0, a, pole_guard: DEFAULT_POLE_GUARD })
    }

    pub fn eckart(v0: f64, a: f64) -> Result<Self> {
        Self::new(Family::Eckart, v0, a)
    }

    pub fn free() -> Self {
        Self { family: Family::Free, v0: 0.0, a: 1.0, pole_guard: DEFAULT_POLE_GUARD }
    }

    /// Maximum of V over the real line.
    pub fn sup(&self) -> f64 {
        self.v0
    }

    /// Poles of V with `0 < Im z < im_max`.
    pub fn poles(&self, im_max: f64) -> Vec<C> {
        match self.family {
            Family::Eckart => (0..)
                .map(|k| C::new(0.0, PI * self.a * (0.5 + k as f64)))
                .take_while(|z| z.im < im_max)
                .collect(),
            Family::RationalPole if self.a < im_max => vec![C::new(0.0, self.a)],
            _ => Vec::new(),
        }
    }

    /// Order of the pole at `z` (2 for sech², 1 for the rational family).
    pub fn pole_order(&self) -> u32 {
        match self.family {
            Family::Eckart => 2,
            Family::RationalPole => 1,
            _ => 0,
        }
    }

    fn guard(&self, z: C) -> Result<()> {
        let near = match self.family {
            Family::Eckart => {
                let k = (z.im / (PI * self.a) - 0.5).round();
                (z - C::new(0.0, PI * self.a * (k + 0.5))).norm()
            }
            Family::RationalPole => (z - C::new(0.0, self.a)).norm().min((z + C::new(0.0, self.a)).norm()),
            _ => f64::INFINITY,
        };
        if near < self.pole_guard {
            Err(Error::PoleProximity { z, radius: self.pole_guard })
        } else {
            Ok(())
        }
    }

    /// V(z) for complex z.
    pub fn eval(&self, z: C) -> Result<C> {
        self.guard(z)?;
        let u = z / self.a;
        Ok(match self.family {
            Family::Eckart => {
                let s = 1.0 / u.cosh();
                s * s * self.v0
            }
            Family::GaussianBump => (-u * u).exp() * self.v0,
            Family::RationalPole => self.v0 / (u * u + 1.0),
            Family::Free => C::new(0.0, 0.0),
        })
    }

    /// V′(z) for complex z.
    pub fn derivative(&self, z: C) -> Result<C> {
        self.guard(z)?;
        let u = z / self.a;
        Ok(match self.family {
            Family::Eckart => {
                let s = 1.0 / u.cosh();
                -s * s * u.tanh() * (2.0 * self.v0 / self.a)
            }
            Family::GaussianBump => -(-u * u).exp() * u * (2.0 * self.v0 / self.a),
            Family::RationalPole => {
                let d = u * u + 1.0;
                -u / (d * d) * (2.0 * self.v0 / self.a)
            }
            Family::Free => C::new(0.0, 0.0),
        })
    }

    /// V on the real axis.
    pub fn eval_real(&self, x: f64) -> f64 {
        let u = x / self.a;
        match self.family {
            Family::Eckart => {
                let s = 1.0 / u.cosh();
                self.v0 * s * s
            }
            Family::GaussianBump => self.v0 * (-u * u).exp(),
            Family::RationalPole => self.v0 / (u * u + 1.0),
            Family::Free => 0.0,
        }
    }

    /// V′ on the real axis.
    pub fn derivative_real(&self, x: f64) -> f64 {
        let u = x / self.a;
        match self.family {
            Family::Eckart => {
                let s = 1.0 / u.cosh();
                -2.0 * self.v0 / self.a * s * s * u.tanh()
            }
            Family::GaussianBump => -2.0 * self.v0 / self.a * u * (-u * u).exp(),
            Family::RationalPole => {
                let d = u * u + 1.0;
                -2.0 * self.v0 / self.a * u / (d * d)
            }
            Family::Free => 0.0,
        }
    }

    /// Taylor coefficients of V around the real point `x0`, `len` terms.
    pub fn taylor(&self, x0: f64, len: usize) -> Series {
        let u = Series::variable(x0 / self.a, len);
        let mut v = match self.family {
            Family::Eckart => {
                let (c, _) = u.cosh_sinh();
                let s = c.recip();
                (&s * &s).scale(self.v0)
            }
            Family::GaussianBump => (&u * &u).scale(-1.0).exp().scale(self.v0),
            Family::RationalPole => {
                let d = &(&u * &u) + &Series::constant(1.0, len);
                d.recip().scale(self.v0)
            }
            Family::Free => Series::zeros(len),
        };
        // u = x0/a + t/a: rescale the coefficients to the variable t
        let mut f = 1.0;
        for c in v.0.iter_mut() {
            *c *= f;
            f /= self.a;
        }
        v
    }

    /// Classical momentum √(E − V(z)) on the principal branch, which is the
    /// positive root on the real axis when E exceeds the barrier.
    pub fn momentum(&self, e: f64, z: C) -> Result<C> {
        Ok((C::new(e, 0.0) - self.eval(z)?).sqrt())
    }

    /// V(z0) − V(z0 + dz) without cancellation for small dz.
    pub fn gap(&self, z0: C, dz: C) -> Result<C> {
        self.guard(z0 + dz)?;
        let (u0, dm) = (z0 / self.a, dz / self.a);
        let u = u0 + dm;
        let dp = u + u0;
        Ok(match self.family {
            // sech²u0 − sech²u = sinh(u−u0)·sinh(u+u0)/(cosh²u·cosh²u0)
            Family::Eckart => {
                let (c, c0) = (u.cosh(), u0.cosh());
                dm.sinh() * dp.sinh() / (c * c * c0 * c0) * self.v0
            }
            // e^{−u0²} − e^{−u²} = −e^{−u0²}·expm1(−(u−u0)(u+u0))
            Family::GaussianBump => {
                let w = -dm * dp;
                -(-u0 * u0).exp() * (w * 0.5).sinh() * (w * 0.5).exp() * 2.0 * self.v0
            }
            Family::RationalPole => dm * dp / ((u0 * u0 + 1.0) * (u * u + 1.0)) * self.v0,
            Family::Free => C::new(0.0, 0.0),
        })
    }

    /// Classical momentum on the real axis.
    pub fn momentum_real(&self, e: f64, x: f64) -> f64 {
        (e - self.eval_real(x)).sqrt()
    }

    /// ∂ₓp on the real axis.
    pub fn momentum_derivative_real(&self, e: f64, x: f64) -> f64 {
        -self.derivative_real(x) / (2.0 * self.momentum_real(e, x))
    }

    /// Principal-branch momentum along the segment `z0 → z1`, rejecting the
    /// segment if `E − V` crosses the negative real axis (a branch cut).
    pub fn check_segment(&self, e: f64, z0: C, z1: C, samples: usize) -> Result<()> {
        let mut prev: Option<C> = None;
        for k in 0..=samples {
            let z = z0 + (z1 - z0) * (k as f64 / samples as f64);
            let w = C::new(e, 0.0) - self.eval(z)?;
            if let Some(p) = prev {
                if p.re < 0.0 && w.re < 0.0 && p.im.signum() != w.im.signum() {
                    return Err(Error::BranchCutCrossing(z));
                }
            }
            prev = Some(w);
        }
        Ok(())
    }

    /// Largest |x| beyond which `|V(x)| < tol`.
    pub fn support_radius(&self, tol: f64) -> f64 {
        if self.v0 == 0.0 || tol >= self.v0 {
            return 0.0;
        }
        let r = tol / self.v0;
        self.a
            * match self.family {
                Family::Eckart => (2.0 / r.sqrt()).ln(),
                Family::GaussianBump => (-r.ln()).sqrt(),
                Family::RationalPole => (1.0 / r - 1.0).sqrt(),
                Family::Free => 0.0,
            }
    }
}

/// Energy window `[E₁, E₂]` lying strictly above the barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub e1: f64,
    pub e2: f64,
}

impl EnergyWindow {
    pub fn new(model: &PotentialModel, e1: f64, e2: f64) -> Result<Self> {
        if !(e1 < e2) {
            return Err(Error::InvalidParameter(format!("empty energy window [{e1}, {e2}]")));
        }
        if e1 <= model.sup() {
            return Err(Error::InvalidParameter(format!(
                "window must lie above the barrier maximum {}: E₁ = {e1}",
                model.sup()
            )));
        }
        Ok(Self { e1, e2 })
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.e1 && e <= self.e2
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.e1 + self.e2)
    }
}


impl PotentialModel {
    /// Roots of V(z) = E with `0 < Im z < im_max` and `|Re z| ≤ re_max`,
    /// found by Newton iteration from a grid of seeds plus analytic seeds.
    pub fn turning_points(&self, e: f64, re_max: f64, im_max: f64) -> Vec<C> {
        if self.family == Family::Free {
            return Vec::new();
        }
        let mut seeds = self.analytic_turning_points(e);
        let nx = 41;
        let ny = 16;
        for i in 0..=nx {
            for j in 1..=ny {
                seeds.push(C::new(-re_max + 2.0 * re_max * i as f64 / nx as f64, im_max * j as f64 / (ny + 1) as f64));
            }
        }
        let mut roots: Vec<C> = Vec::new();
        for s in seeds {
            let Some(z) = self.newton_root(e, s) else { continue };
            if z.im <= 1e-9 || z.im >= im_max || z.re.abs() > re_max {
                continue;
            }
            if roots.iter().all(|r| (r - z).norm() > 1e-8 * (1.0 + z.norm())) {
                roots.push(z);
            }
        }
        roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        roots
    }

    fn newton_root(&self, e: f64, mut z: C) -> Option<C> {
        for _ in 0..80 {
            let f = self.eval(z).ok()? - e;
            let d = self.derivative(z).ok()?;
            if d.norm() == 0.0 {
                return None;
            }
            let step = f / d;
            // damp large jumps so seeds stay near their basin
            let step = if step.norm() > 0.5 * self.a { step * (0.5 * self.a / step.norm()) } else { step };
            z -= step;
            if !z.re.is_finite() || !z.im.is_finite() {
                return None;
            }
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let res = (self.eval(z).ok()? - e).norm();
        (res < 1e-11 * (1.0 + e.abs())).then_some(z)
    }

    /// Closed-form turning points nearest the real axis, where available.
    pub fn analytic_turning_points(&self, e: f64) -> Vec<C> {
        if e <= 0.0 || self.v0 == 0.0 {
            return Vec::new();
        }
        let r = self.v0 / e;
        match self.family {
            // sech²(z/a) = E/V₀  ⇔  cosh(z/a) = ±√(V₀/E)
            Family::Eckart if r < 1.0 => {
                let y = r.sqrt().acos();
                vec![C::new(0.0, self.a * y), C::new(0.0, self.a * (PI - y))]
            }
            // exp(−z²/a²) = E/V₀  ⇔  z² = a² ln(E/V₀)·(−1)
            Family::GaussianBump if r < 1.0 => vec![C::new(0.0, self.a * (1.0 / r).ln().sqrt())],
            Family::RationalPole if r < 1.0 => vec![C::new(0.0, self.a * (1.0 - r).sqrt())],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod root_tests {
    use super::*;

    #[test]
    fn eckart_nearest_root_is_quarter_pi() {
        let m = PotentialModel::eckart(1.0, 1.0).unwrap();
        let r = m.turning_points(2.0, 5.0, 2.0);
        assert!((r[0] - C::new(0.0, PI / 4.0)).norm() < 1e-13);
    }

    #[test]
    fn gaussian_roots_include_off_axis_pairs() {
        let m = PotentialModel::new(Family::GaussianBump, 1.0, 1.0).unwrap();
        let r = m.turning_points(2.0, 5.0, 2.0);
        assert!((r[0] - C::new(0.0, 0.832_554_611_157_697_8)).norm() < 1e-13);
        assert!(r.iter().any(|z| z.re > 0.5), "{r:?}");
        for z in &r {
            assert!((m.eval(*z).unwrap() - 2.0).norm() < 1e-11);
        }
    }
}
