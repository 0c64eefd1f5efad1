// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

/// Failures raised anywhere in the computational core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {z} lies within {radius:e} of a pole of the potential")]
    PoleProximity { z: Complex64, radius: f64 },
    #[error("momentum continuation crosses a branch cut near {0}")]
    BranchCutCrossing(Complex64),
    #[error("integration path crosses a branch cut near {0}")]
    PathCrossesCut(Complex64),
    #[error("quadrature did not converge: estimated error {err:e} above tolerance {tol:e}")]
    QuadratureNotConverged { err: f64, tol: f64 },
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("no complex critical point found")]
    NoCriticalPoint,
    #[error("two critical points are equally close to the real axis: {0} and {1}")]
    MultipleNearest(Complex64, Complex64),
    #[error("degenerate turning point at {0}")]
    DegenerateTurningPoint(Complex64),
    #[error("finite-difference grid too coarse: residual {residual:e} above {tol:e}")]
    GridTooCoarse { residual: f64, tol: f64 },
    #[error("coefficient magnitude overflows at order {0}")]
    Overflow(usize),
    #[error("projection defect is not scalar: off-scalar part {off:e} vs scalar {scalar:e}")]
    NotScalar { off: f64, scalar: f64 },
    #[error("eigenvalue collision: |λ1 − λ2| = {0:e}")]
    EigenCollision(f64),
    #[error("ODE step failure at x = {x}: step {h:e} fell below the minimum")]
    StepFailure { x: f64, h: f64 },
    #[error("oscillation under-resolved at x = {x}: {phase:.2} radians per step")]
    OscillationUnderresolved { x: f64, phase: f64 },
    #[error("frame order {frame} does not match the requested order {requested}")]
    FrameMismatch { frame: usize, requested: usize },
    #[error("energy minimum of M lies on the window boundary at E = {0}")]
    BoundaryMinimum(f64),
    #[error("energy minimum of M is degenerate: M'' = {0:e}")]
    DegenerateMinimum(f64),
    #[error("no trajectory root for t = {0}")]
    NoRoot(f64),
    #[error("t = {t} puts the trajectory at {q}, outside the Gaussian validity window")]
    OutsideValidityWindow { t: f64, q: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
