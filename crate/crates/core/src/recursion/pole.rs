// SPDX-License-Identifier: Apache-2.0
//! Closed-form coefficients for the pure pole coupling
//! θ′ = −(iγ/ξ_c)(f − f̄), f = iξ_c/(ξ − ξ_r + iξ_c).
//!
//! Useful facts: f f̄ = Re f, (f^m)′ = (im/ξ_c) f^{m+1}, so
//! Im(f^m)′ = (m/ξ_c) Re(f^{m+1}) and Re(f^m)′ = −(m/ξ_c) Im(f^{m+1}).

use num_complex::Complex64 as C;

use super::Component;
use crate::error::{Error, Result};

fn sigma(j: usize) -> f64 {
    if j == 0 {
        -1.0
    } else {
        1.0
    }
}

/// The numbers a_j^(n) for even n, indexed `[n/2 − 1][j]`, j ≤ n − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ACoefficients {
    pub gamma: f64,
    rows: Vec<Vec<f64>>,
}

impl ACoefficients {
    /// Builds the table for all even n ≤ `n_max`.
    pub fn new(gamma: f64, n_max: usize) -> Self {
        let g2 = gamma * gamma;
        let mut rows = vec![vec![1.0, 0.0]];
        let mut n = 2;
        while n + 2 <= n_max {
            let a = rows.last().unwrap();
            // inner[k] = Σ_{m≤k} σ_{k−m} a_m
            let inner: Vec<f64> = (0..n).map(|k| (0..=k).map(|m| sigma(k - m) * a[m]).sum()).collect();
            let mut next = vec![0.0; n + 2];
            // the last two entries vanish: the j = n term would divide by n − n
            for (j, out) in next.iter_mut().enumerate().take(n) {
                let s: f64 = (0..=j).map(|k| sigma(j - k) / (n - k) as f64 * inner[k]).sum();
                let (nf, jf) = (n as f64, j as f64);
                *out = (nf + 1.0 - jf) / ((nf + 1.0) * nf) * ((nf - jf) * a[j] - g2 * s);
            }
            rows.push(next);
            n += 2;
        }
        Self { gamma, rows }
    }

    pub fn n_max(&self) -> usize {
        2 * self.rows.len()
    }

    /// a_j^(n); zero outside the stored range.
    pub fn get(&self, n: usize, j: usize) -> f64 {
        if n < 2 || n % 2 == 1 {
            return 0.0;
        }
        self.rows.get(n / 2 - 1).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n / 2 - 1]
    }

    /// b_m^(n) = (1/(n−m)) Σ_{j≤m} σ_{m−j} a_j^(n).
    pub fn b(&self, n: usize, m: usize) -> f64 {
        (0..=m).map(|j| sigma(m - j) * self.get(n, j)).sum::<f64>() / (n - m) as f64
    }
}

/// Pole surrogate: the coupling of a simple critical point at ξ_r + iξ_c.
#[derive(Debug, Clone)]
pub struct PoleModel {
    pub gamma: f64,
    pub xi_c: f64,
    pub xi_r: f64,
    pub a: ACoefficients,
}

impl PoleModel {
    /// Tables cover orders up to `n_max` (x_n needs a^(n+1)).
    pub fn new(gamma: f64, xi_c: f64, xi_r: f64, n_max: usize) -> Self {
        Self { gamma, xi_c, xi_r, a: ACoefficients::new(gamma, n_max + 2) }
    }

    pub fn f(&self, xi: f64) -> C {
        let i = C::new(0.0, 1.0);
        i * self.xi_c / (C::new(xi - self.xi_r, 0.0) + i * self.xi_c)
    }

    pub fn theta(&self, xi: f64) -> f64 {
        2.0 * self.gamma / self.xi_c * self.f(xi).im
    }

    /// ln((n−1)!/ξ_c^n).
    pub fn log_scale(&self, n: usize) -> f64 {
        libm::lgamma(n as f64) - n as f64 * self.xi_c.ln()
    }

    /// The coefficient divided by (n−1)!/ξ_c^n; zero where parity forces it.
    pub fn scaled(&self, c: Component, n: usize, xi: f64) -> f64 {
        if n == 0 || super::vanishes_by_parity(c, n) {
            return 0.0;
        }
        let f = self.f(xi);
        let g = self.gamma;
        // powers f^1 … f^n
        let mut pw = Vec::with_capacity(n + 1);
        pw.push(C::new(1.0, 0.0));
        for k in 1..=n {
            pw.push(pw[k - 1] * f);
        }
        let mut half = 1.0;
        let mut s = 0.0;
        for j in 0..n {
            let term = match c {
                Component::Z => self.a.get(n, j) * pw[n - j].re,
                Component::Y => self.a.b(n, j) * pw[n - j].re,
                Component::X => n as f64 / (n - j) as f64 * self.a.get(n + 1, j) * pw[n - j].im,
            };
            s += half * term;
            half *= 0.5;
        }
        match c {
            Component::Z => -g * s,
            Component::Y => -g * g * s,
            Component::X => -g * s,
        }
    }

    /// x̂_n, y_n or z_n at ξ; `Overflow` if (n−1)!/ξ_c^n leaves the f64 range.
    pub fn coefficient(&self, c: Component, n: usize, xi: f64) -> Result<f64> {
        let ls = self.log_scale(n.max(1));
        if ls > f64::MAX.ln() {
            return Err(Error::Overflow(n));
        }
        Ok(self.scaled(c, n, xi) * ls.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::{a0_limit, CoefficientJets, JetSource};

    #[test]
    fn table_start_and_hand_values() {
        let g = 0.37;
        let a = ACoefficients::new(g, 4);
        assert_eq!((a.get(2, 0), a.get(2, 1)), (1.0, 0.0));
        assert!((a.get(4, 0) - (1.0 - g * g / 4.0)).abs() < 1e-15);
        assert!((a.get(4, 1) - g * g / 2.0).abs() < 1e-15);
        assert_eq!((a.get(4, 2), a.get(4, 3)), (0.0, 0.0));
    }

    #[test]
    fn a0_follows_the_product_rule() {
        let g = 1.0 / 3.0;
        let a = ACoefficients::new(g, 60);
        let mut prod = 1.0;
        for n in (2..58).step_by(2) {
            prod *= 1.0 - g * g / (n * n) as f64;
            assert!((a.get(n + 2, 0) - prod).abs() < 1e-14);
        }
        assert!((a.get(60, 0) - a0_limit(g)).abs() < 1e-3);
    }

    #[test]
    fn closed_form_matches_generic_jets() {
        let pm = PoleModel::new(1.0 / 3.0, 0.8, 0.2, 14);
        for xi in [-1.5, -0.3, 0.2, 0.55, 2.0] {
            let j = CoefficientJets::new(JetSource::Pole { gamma: 1.0 / 3.0, xi_c: 0.8, xi_r: 0.2, xi }, 13).unwrap();
            for n in 1..=12 {
                for c in [Component::X, Component::Y, Component::Z] {
                    let exact = j.value(c, n);
                    let got = pm.coefficient(c, n, xi).unwrap();
                    let scale = pm.log_scale(n).exp();
                    assert!((got - exact).abs() <= 1e-12 * scale, "{c:?} n={n} xi={xi}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn first_coefficient_vanishes_at_the_birth_point() {
        let pm = PoleModel::new(1.0 / 3.0, 0.5, 0.3, 4);
        assert!((pm.f(0.3) - C::new(1.0, 0.0)).norm() < 1e-16);
        assert_eq!(pm.coefficient(Component::X, 1, 0.3).unwrap(), 0.0);
        // y₂ = x₁² = 0 and z₂ = −(γ/ξ_c²) Re f² at ξ_r
        assert!((pm.coefficient(Component::Y, 2, 0.3).unwrap()).abs() < 1e-16);
        assert!((pm.coefficient(Component::Z, 2, 0.3).unwrap() + 1.0 / 3.0 / 0.25).abs() < 1e-14);
    }

    #[test]
    fn huge_orders_overflow_instead_of_saturating() {
        let pm = PoleModel::new(1.0 / 3.0, 0.5, 0.0, 400);
        assert!(pm.coefficient(Component::Z, 140, 0.1).is_ok());
        assert_eq!(pm.coefficient(Component::Z, 400, 0.1), Err(Error::Overflow(400)));
        assert!(pm.scaled(Component::Z, 400, 0.1).is_finite());
    }

    #[test]
    fn f_identities() {
        let pm = PoleModel::new(0.3, 0.7, 0.1, 2);
        let xi = 0.45;
        let f = pm.f(xi);
        let h = 1e-5;
        for m in 1..8 {
            let fm = |x: f64| pm.f(x).powu(m);
            let d = (fm(xi + h) - fm(xi - h)) / (2.0 * h);
            let mf = m as f64;
            assert!((d.im - mf / 0.7 * f.powu(m + 1).re).abs() < 1e-8);
            assert!((d.re + mf / 0.7 * f.powu(m + 1).im).abs() < 1e-8);
            let lhs = pm.theta(xi) * f.powu(m).re;
            let mut rhs = 0.0;
            let mut half = 1.0;
            for j in 0..m {
                rhs += sigma(j as usize) * half * f.powu(m + 1 - j).im;
                half *= 0.5;
            }
            assert!((lhs + 0.3 / 0.7 * rhs).abs() < 1e-14, "m={m}");
        }
    }
}

#[cfg(test)]
mod high_order {
    use super::*;
    use crate::recursion::{CoefficientJets, JetSource};

    #[test]
    fn jets_stay_accurate_at_optimal_orders() {
        let (g, xc) = (1.0 / 3.0, 1.3);
        let pm = PoleModel::new(g, xc, 0.0, 62);
        let mut worst = 0.0f64;
        for xi in [-2.0, -0.7, 0.0, 0.4, 1.5] {
            let j = CoefficientJets::new(JetSource::Pole { gamma: g, xi_c: xc, xi_r: 0.0, xi }, 61).unwrap();
            for n in 1..=60 {
                for c in [Component::X, Component::Y, Component::Z] {
                    let scale = pm.log_scale(n).exp();
                    let err = (pm.coefficient(c, n, xi).unwrap() - j.value(c, n)).abs() / scale;
                    worst = worst.max(err);
                }
            }
        }
        eprintln!("worst scaled jet error {worst:e}");
        assert!(worst < 1e-10);
    }
}
