// SPDX-License-Identifier: Apache-2.0
//! Adaptive Gauss–Kronrod quadrature and Gauss–Legendre rules.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (integral, error estimate).
pub fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + s * WG[i / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

/// Tolerance settings for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 4000 }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    /// Globally adaptive integration of `f` over `[a, b]`.
    pub fn integrate<T: QuadValue>(&self, mut f: impl FnMut(f64) -> T, a: f64, b: f64) -> Result<T> {
        if a == b {
            return Ok(T::default());
        }
        let (value, err) = gk15(&mut f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Panel { a, b, value, err });
        let mut total = value;
        let mut total_err = err;
        while total_err > self.abs_tol.max(self.rel_tol * total.magnitude()) {
            if heap.len() >= self.max_panels {
                return Err(Error::QuadratureNotConverged {
                    err: total_err,
                    tol: self.abs_tol.max(self.rel_tol * total.magnitude()),
                });
            }
            let worst = heap.pop().expect("heap never empties");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                heap.push(worst);
                break;
            }
            let (v1, e1) = gk15(&mut f, worst.a, mid);
            let (v2, e2) = gk15(&mut f, mid, worst.b);
            total = total - worst.value + v1 + v2;
            total_err = total_err - worst.err + e1 + e2;
            heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
            heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        }
        // re-sum to shed the running-update rounding
        let mut panels: Vec<_> = heap.into_vec();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        Ok(panels.iter().fold(T::default(), |acc, p| acc + p.value))
    }

    /// Integral of `f(z) dz` along the straight segment from `z0` to `z1`.
    pub fn integrate_segment(
        &self,
        mut f: impl FnMut(Complex64) -> Complex64,
        z0: Complex64,
        z1: Complex64,
    ) -> Result<Complex64> {
        let dz = z1 - z0;
        let v = self.integrate(|s| f(z0 + dz * s), 0.0, 1.0)?;
        Ok(v * dz)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Cached 20-point rule used for short smooth panels.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Fixed-order Gauss–Legendre integral of `f` over `[a, b]`.
pub fn fixed_gl<T: QuadValue>(rule: &(Vec<f64>, Vec<f64>), mut f: impl FnMut(f64) -> T, a: f64, b: f64) -> T {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = T::default();
    for (x, w) in rule.0.iter().zip(&rule.1) {
        s = s + f(c + h * x) * *w;
    }
    s * h
}

/// Composite Gauss–Legendre with `panels` equal panels.
pub fn composite_gl<T: QuadValue>(
    rule: &(Vec<f64>, Vec<f64>),
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
) -> T {
    let h = (b - a) / panels as f64;
    (0..panels).fold(T::default(), |acc, k| {
        let lo = a + h * k as f64;
        acc + fixed_gl(rule, &mut f, lo, lo + h)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = Quadrature::with_tol(1e-12);
        let v: f64 = q.integrate(|x| x.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn complex_segment_matches_antiderivative() {
        let q = Quadrature::default();
        let z0 = Complex64::new(0.0, 0.0);
        let z1 = Complex64::new(1.0, 2.0);
        let v = q.integrate_segment(|z| z.exp(), z0, z1).unwrap();
        assert!((v - (z1.exp() - 1.0)).norm() < 1e-12);
    }

    #[test]
    fn panel_limit_reports_nonconvergence() {
        let q = Quadrature { abs_tol: 1e-15, rel_tol: 0.0, max_panels: 4 };
        let r = q.integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
