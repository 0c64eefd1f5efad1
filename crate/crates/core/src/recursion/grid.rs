// SPDX-License-Identifier: Apache-2.0
//! The generic recursion on a uniform ξ-grid with finite-difference
//! derivatives.

use super::Component;
use crate::error::{Error, Result};
use crate::numerics::fd::derivative_uniform;

/// Uniform nodes `start + k·step`, `k < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl XiGrid {
    pub fn new(lo: f64, hi: f64, len: usize) -> Self {
        Self { start: lo, step: (hi - lo) / (len - 1) as f64, len }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.start + k as f64 * self.step)
    }

    /// Same interval with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { start: self.start, step: self.step / 2.0, len: 2 * self.len - 1 }
    }
}

/// Samples of x̂_n, y_n, z_n on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTriple {
    pub n: usize,
    pub grid: XiGrid,
    pub xh: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Largest interior residual of y_n′ = θ′z_n.
    pub e1b_residual: f64,
}

impl CoefficientTriple {
    /// x̂₁ = −θ′/2, y₁ = z₁ = 0.
    pub fn first(grid: XiGrid, theta: &[f64]) -> Self {
        Self {
            n: 1,
            grid,
            xh: theta.iter().map(|t| -t / 2.0).collect(),
            y: vec![0.0; grid.len],
            z: vec![0.0; grid.len],
            e1b_residual: 0.0,
        }
    }

    pub fn component(&self, c: Component) -> &[f64] {
        match c {
            Component::X => &self.xh,
            Component::Y => &self.y,
            Component::Z => &self.z,
        }
    }
}

/// Interior indices where a central stencil of `order` applies.
fn interior(len: usize, order: usize) -> std::ops::Range<usize> {
    let half = order / 2;
    half..len.saturating_sub(half)
}

/// One step of the recursion from the full history `x̂_j, y_j, z_j`,
/// `j ≤ n`, to order n+1. Fails with `GridTooCoarse` when the relation
/// y′ = θ′z, which the algebraic y-update does not use, is violated by more
/// than `tol` relative to sup|θ′z|.
pub fn xyz_step_numeric(history: &[CoefficientTriple], theta: &[f64], order: usize, tol: f64) -> Result<CoefficientTriple> {
    let prev = history.last().expect("history starts with the first triple");
    let n = prev.n;
    let grid = prev.grid;
    let h = grid.step;
    let len = grid.len;
    let dz = derivative_uniform(&prev.z, h, order);
    let dx = derivative_uniform(&prev.xh, h, order);
    let xh: Vec<f64> = (0..len).map(|i| -dz[i] + theta[i] * prev.y[i]).collect();
    let z = dx;
    let mut y = vec![0.0; len];
    for j in 1..=n {
        let (a, b) = (&history[j - 1], &history[n - j]);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += -a.xh[i] * b.xh[i] + a.y[i] * b.y[i] - a.z[i] * b.z[i];
        }
    }
    let dy = derivative_uniform(&y, h, order);
    let mut resid = 0.0f64;
    let mut scale = 0.0f64;
    for i in interior(len, order) {
        resid = resid.max((dy[i] - theta[i] * z[i]).abs());
        scale = scale.max((theta[i] * z[i]).abs());
    }
    let rel = if scale > 0.0 { resid / scale } else { resid };
    if rel > tol {
        return Err(Error::GridTooCoarse { residual: rel, tol });
    }
    Ok(CoefficientTriple { n: n + 1, grid, xh, y, z, e1b_residual: rel })
}

/// Runs the grid recursion to order `n_max`, refining the grid until every
/// step passes the y′ = θ′z check (at most `max_refine` times).
pub fn generic_triples(
    theta: impl Fn(f64) -> f64,
    grid: XiGrid,
    n_max: usize,
    order: usize,
    tol: f64,
    max_refine: usize,
) -> Result<Vec<CoefficientTriple>> {
    let mut grid = grid;
    let mut last_err = None;
    for _ in 0..=max_refine {
        let th: Vec<f64> = grid.nodes().map(&theta).collect();
        let mut hist = vec![CoefficientTriple::first(grid, &th)];
        let mut ok = true;
        while hist.last().unwrap().n < n_max {
            match xyz_step_numeric(&hist, &th, order, tol) {
                Ok(t) => hist.push(t),
                Err(e) => {
                    last_err = Some(e);
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(hist);
        }
        grid = grid.refined();
    }
    Err(last_err.expect("refinement loop ran"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::{CoefficientJets, JetSource};

    fn pole_theta(xi: f64) -> f64 {
        2.0 / 3.0 * xi / (xi * xi + 1.0)
    }

    #[test]
    fn grid_recursion_tracks_the_jets() {
        let g = XiGrid::new(-6.0, 6.0, 1201);
        let hist = generic_triples(pole_theta, g, 6, 6, 1e-5, 2).unwrap();
        for t in &hist {
            let i = 700;
            let xi = t.grid.start + i as f64 * t.grid.step;
            let j = CoefficientJets::new(JetSource::Pole { gamma: 1.0 / 3.0, xi_c: 1.0, xi_r: 0.0, xi }, 8).unwrap();
            for c in [Component::X, Component::Y, Component::Z] {
                let exact = j.value(c, t.n);
                assert!((t.component(c)[i] - exact).abs() < 1e-6 * (1.0 + exact.abs()), "{c:?} n={}", t.n);
            }
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let g = XiGrid::new(-6.0, 6.0, 25);
        let r = generic_triples(pole_theta, g, 8, 6, 1e-8, 0);
        assert!(matches!(r, Err(Error::GridTooCoarse { .. })));
    }
}
