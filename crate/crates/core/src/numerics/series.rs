// SPDX-License-Identifier: Apache-2.0
//! Truncated real power series in a local variable `t`, for Taylor-mode
//! evaluation of high-order derivatives.

use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients `c[k]` of `Σ c[k] t^k`, truncated at `len()` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn constant(c: f64, len: usize) -> Self {
        let mut s = Self::zeros(len);
        if len > 0 {
            s.0[0] = c;
        }
        s
    }

    /// The local variable itself shifted by `c0`: `c0 + t`.
    pub fn variable(c0: f64, len: usize) -> Self {
        let mut s = Self::constant(c0, len);
        if len > 1 {
            s.0[1] = 1.0;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn truncate(mut self, len: usize) -> Self {
        self.0.truncate(len);
        self
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    /// d/dt; the result is one term shorter.
    pub fn derivative(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn recip(&self) -> Self {
        let n = self.len();
        let a0 = self.0[0];
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.0[j] * r[k - j]).sum();
            r[k] = -s / a0;
        }
        Self(r)
    }

    pub fn sqrt(&self) -> Self {
        let n = self.len();
        let mut r = vec![0.0; n];
        r[0] = self.0[0].sqrt();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.0[k] - s) / (2.0 * r[0]);
        }
        Self(r)
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut r = vec![0.0; n];
        r[0] = self.0[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.0[j] * r[k - j]).sum();
            r[k] = s / k as f64;
        }
        Self(r)
    }

    /// cosh and sinh of the series, computed together.
    pub fn cosh_sinh(&self) -> (Self, Self) {
        let e = self.exp();
        let em = (-self).exp();
        let c = Self(e.0.iter().zip(&em.0).map(|(a, b)| 0.5 * (a + b)).collect());
        let s = Self(e.0.iter().zip(&em.0).map(|(a, b)| 0.5 * (a - b)).collect());
        (c, s)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        Series((0..n).map(|k| self.0[k] + o.0[k]).collect())
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        Series((0..n).map(|k| self.0[k] - o.0[k]).collect())
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        Series((0..n).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &Series, t: f64) -> f64 {
        s.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x0 = 0.4;
        let t = 0.05;
        let v = Series::variable(x0, 30);
        let (c, s) = v.cosh_sinh();
        assert!((eval(&c, t) - (x0 + t).cosh()).abs() < 1e-14);
        assert!((eval(&s, t) - (x0 + t).sinh()).abs() < 1e-14);
        let r = c.recip();
        assert!((eval(&r, t) - 1.0 / (x0 + t).cosh()).abs() < 1e-14);
        let q = (&v * &v).sqrt();
        assert!((eval(&q, t) - (x0 + t)).abs() < 1e-14);
        let d = c.derivative();
        assert!((eval(&d, t) - (x0 + t).sinh()).abs() < 1e-13);
    }
}
