// SPDX-License-Identifier: Apache-2.0
//! Taylor-mode evaluation of the generic recursion at a single point.
//!
//! With D = d/dξ the recursion reads
//!   x̂₁ = −θ′/2,  x̂_{n+1} = −D z_n + θ′ y_n,  z_{n+1} = D x̂_n,
//!   y_{n+1} = Σ_{j=1}^{n} (−x̂_j x̂_{n+1−j} + y_j y_{n+1−j} − z_j z_{n+1−j}),
//! and every coefficient is carried as a truncated power series in a local
//! variable, so derivatives are exact up to rounding.

use super::Component;
use crate::error::Result;
use crate::numerics::series::Series;
use crate::potential::PotentialModel;

/// Where θ′ comes from.
#[derive(Debug, Clone, Copy)]
pub enum JetSource<'a> {
    /// The true coupling of a potential at energy `e`, expanded around real `x`.
    Potential { model: &'a PotentialModel, e: f64, x: f64 },
    /// The pure pole coupling θ′ = 2γw/(w² + ξ_c²), w = ξ − ξ_r, around `xi`.
    Pole { gamma: f64, xi_c: f64, xi_r: f64, xi: f64 },
}

/// Coefficients x̂_k, y_k, z_k (k ≤ `top`) as series at one point.
#[derive(Debug, Clone)]
pub struct CoefficientJets {
    top: usize,
    theta: Series,
    /// dt/dξ as a series, so that D = dxi · d/dt.
    dxi: Series,
    xh: Vec<Series>,
    y: Vec<Series>,
    z: Vec<Series>,
}

fn d(dxi: &Series, s: &Series) -> Series {
    let ds = s.derivative();
    &ds * dxi
}

impl CoefficientJets {
    /// Runs the recursion up to order `top`, keeping one extra Taylor term
    /// so that first ξ-derivatives are available at every order.
    pub fn new(source: JetSource<'_>, top: usize) -> Result<Self> {
        let len = top + 2;
        let (theta, dxi) = match source {
            JetSource::Potential { model, e, x } => {
                let v = model.taylor(x, len + 1);
                let p = (&Series::constant(e, len + 1) - &v).sqrt();
                let dv = v.derivative();
                let p3 = &(&p * &p) * &p;
                let theta = (&dv * &p3.recip()).scale(-0.25);
                let dxi = p.recip().scale(0.5).truncate(len);
                (theta, dxi)
            }
            JetSource::Pole { gamma, xi_c, xi_r, xi } => {
                let w = Series::variable(xi - xi_r, len);
                let den = &(&w * &w) + &Series::constant(xi_c * xi_c, len);
                ((&w * &den.recip()).scale(2.0 * gamma), Series::constant(1.0, len))
            }
        };
        Ok(Self::from_theta(theta, dxi, top))
    }

    /// Runs the recursion for an arbitrary θ′ series and D = dxi·d/dt.
    pub fn from_theta(theta: Series, dxi: Series, top: usize) -> Self {
        let len = theta.len();
        let empty = Series::zeros(0);
        let mut xh = vec![empty.clone(); top + 1];
        let mut y = vec![empty.clone(); top + 1];
        let mut z = vec![empty; top + 1];
        if top >= 1 {
            xh[1] = theta.scale(-0.5);
        }
        for n in 1..top {
            let keep = len.saturating_sub(n);
            if n % 2 == 1 {
                // odd n: x̂_n ≠ 0, so z_{n+1} and y_{n+1} are the new terms
                z[n + 1] = d(&dxi, &xh[n]).truncate(keep);
                let mut acc = Series::zeros(keep);
                for j in 1..=n {
                    let k = n + 1 - j;
                    let term = if j % 2 == 1 {
                        -&(&xh[j] * &xh[k])
                    } else {
                        &(&y[j] * &y[k]) - &(&z[j] * &z[k])
                    };
                    acc = &acc + &term;
                }
                y[n + 1] = acc;
            } else {
                xh[n + 1] = (&(&theta * &y[n]) - &d(&dxi, &z[n])).truncate(keep);
            }
        }
        Self { top, theta, dxi, xh, y, z }
    }

    pub fn top(&self) -> usize {
        self.top
    }

    fn series(&self, c: Component, n: usize) -> Option<&Series> {
        let v = match c {
            Component::X => &self.xh,
            Component::Y => &self.y,
            Component::Z => &self.z,
        };
        v.get(n).filter(|s| !s.is_empty())
    }

    /// Value of x̂_n, y_n or z_n at the expansion point.
    pub fn value(&self, c: Component, n: usize) -> f64 {
        self.series(c, n).map_or(0.0, Series::value)
    }

    /// First ξ-derivative at the expansion point.
    pub fn derivative(&self, c: Component, n: usize) -> f64 {
        self.series(c, n).and_then(|s| s.0.get(1)).map_or(0.0, |c1| c1 * self.dxi.value())
    }

    /// Second ξ-derivative at the expansion point.
    pub fn second_derivative(&self, c: Component, n: usize) -> f64 {
        let Some(s) = self.series(c, n) else { return 0.0 };
        if s.len() < 3 {
            return 0.0;
        }
        let once = d(&self.dxi, s);
        d(&self.dxi, &once).value()
    }

    /// θ′ at the expansion point and its first ξ-derivative.
    pub fn theta(&self) -> (f64, f64) {
        (self.theta.value(), self.theta.0.get(1).map_or(0.0, |c| c * self.dxi.value()))
    }

    /// Residuals of x̂_n′ = z_{n+1}, y_n′ = θ′z_n, z_n′ = −x̂_{n+1} + θ′y_n.
    pub fn differential_residuals(&self, n: usize) -> [f64; 3] {
        let (th, _) = self.theta();
        [
            self.derivative(Component::X, n) - self.value(Component::Z, n + 1),
            self.derivative(Component::Y, n) - th * self.value(Component::Z, n),
            self.derivative(Component::Z, n) + self.value(Component::X, n + 1) - th * self.value(Component::Y, n),
        ]
    }
}
