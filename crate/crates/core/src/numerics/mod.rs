// SPDX-License-Identifier: Apache-2.0
//! Numerical building blocks shared by the physics modules.

pub mod fd;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod series;

pub use quad::{QuadValue, Quadrature};
