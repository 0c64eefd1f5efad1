// SPDX-License-Identifier: Apache-2.0
//! Superadiabatic coefficient recursions.
//!
//! The projection expansion is written as π_k = x_k X + y_k Y + z_k Z with
//! x_k purely imaginary. Internally x_k = i·x̂_k so that every quantity is
//! real; [`Component::X`] always refers to x̂. The start value is
//! x₁ = −iθ′/2, which is what π₁ = −i[π₀′, π₀] gives in this basis and the
//! only choice compatible with y_n′ = θ′z_n.

mod grid;
mod jet;
mod pole;

pub use grid::{generic_triples, xyz_step_numeric, CoefficientTriple, XiGrid};
pub use jet::{CoefficientJets, JetSource};
pub use pole::{ACoefficients, PoleModel};

use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// One of the three coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// x̂_n = −i·x_n
    X,
    Y,
    Z,
}

/// The parity rule: x_n vanishes for even n, y_n and z_n for odd n.
pub fn vanishes_by_parity(c: Component, n: usize) -> bool {
    match c {
        Component::X => n.is_multiple_of(2),
        Component::Y | Component::Z => !n.is_multiple_of(2) || n == 0,
    }
}

/// lim a₀^(n) = sin(γπ/2)/(γπ/2).
pub fn a0_limit(gamma: f64) -> f64 {
    let h = gamma * PI / 2.0;
    if h == 0.0 {
        1.0
    } else {
        h.sin() / h
    }
}

/// Gaussian leading-order approximation of the optimal coupling.
pub fn g_leading(eps: f64, xi: f64, xi_r: f64, xi_c: f64, gamma: f64, sigma: f64) -> C {
    let w = xi - xi_r;
    let amp = 2.0 * (2.0 * eps / (PI * xi_c)).sqrt() * (PI * gamma / 2.0).sin();
    let env = (-xi_c / eps - w * w / (2.0 * eps * xi_c)).exp();
    let phase = w / eps - w.powi(3) / (3.0 * eps * xi_c * xi_c) + sigma * w / xi_c;
    C::new(0.0, amp * env * phase.cos())
}
