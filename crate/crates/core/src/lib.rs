// SPDX-License-Identifier: Apache-2.0
//! Exponentially small above-barrier reflection in the semiclassical regime.
//!
//! The crate computes the complex Stokes geometry of an analytic barrier,
//! the superadiabatic frames in which the reflected wave becomes visible,
//! high-accuracy stationary solutions, and the time-dependent reflected
//! wave packet together with its closed-form descriptions.

// `!(a < b)` guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod potential;
pub mod recursion;
pub mod scale;
pub mod stationary;
pub mod stokes;
pub mod superadiabatic;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
