// SPDX-License-Identifier: Apache-2.0
//! Complex 2×2 matrices and a small dense solver.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C;

/// Row-major complex 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[C::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Self {
        Self::diag(C::new(1.0, 0.0), C::new(1.0, 0.0))
    }

    pub fn diag(a: C, d: C) -> Self {
        Mat2([[a, C::new(0.0, 0.0)], [C::new(0.0, 0.0), d]])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [C::new(m[0][0], 0.0), C::new(m[0][1], 0.0)],
            [C::new(m[1][0], 0.0), C::new(m[1][1], 0.0)],
        ])
    }

    pub fn scale(&self, s: C) -> Self {
        let m = self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn det(&self) -> C {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Self {
        let m = self.0;
        let d = self.det();
        Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut r = [[C::new(0.0, 0.0); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting;
/// `a` is row-major `n × n`. Returns `false` on a zero pivot.
pub fn solve_in_place(a: &mut [C], b: &mut [C], n: usize) -> bool {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap_or(col);
        if a[piv * n + col].norm() == 0.0 {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == C::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= f * v;
            }
            let bc = b[col];
            b[row] -= f * bc;
        }
    }
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * b[k];
        }
        b[row] = s / a[row * n + row];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trips() {
        let m = Mat2([[C::new(1.0, 2.0), C::new(0.5, 0.0)], [C::new(-1.0, 0.3), C::new(2.0, -1.0)]]);
        let p = m * m.inverse();
        assert!((p - Mat2::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn dense_solve_recovers_solution() {
        let n = 4;
        let mut a: Vec<C> = (0..n * n).map(|k| C::new((k as f64 * 0.7).sin(), (k as f64).cos())).collect();
        let x: Vec<C> = (0..n).map(|k| C::new(k as f64, 1.0)).collect();
        let mut b: Vec<C> = (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect();
        assert!(solve_in_place(&mut a, &mut b, n));
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
    }
}
