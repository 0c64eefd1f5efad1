// SPDX-License-Identifier: Apache-2.0
//! Frozen reference values for the default Eckart barrier and Gaussian
//! energy density.

use std::f64::consts::{FRAC_PI_4, PI};

use superwave_core::potential::PotentialModel;
use superwave_core::recursion::{a0_limit, ACoefficients};
use superwave_core::scale::NaturalScaleMap;
use superwave_core::stationary::{eckart_reflection_exact, reflection_coefficient, StationaryConfig};
use superwave_core::stokes::StokesData;
use superwave_core::wavepacket::{GaussianDensity, ReflectedWave, RegionConstants};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn eckart_stokes_data_at_e2() {
    let m = PotentialModel::eckart(1.0, 1.0).unwrap();
    let st = StokesData::compute(&m, 2.0).unwrap();
    assert!(st.z_crit.re.abs() < 1e-12);
    assert!(close(st.z_crit.im, FRAC_PI_4, 1e-12));
    // symmetric barrier: the Stokes line crosses the axis at the top
    assert!(st.x_r.abs() < 1e-10);
    assert!(st.gamma > 0.0 && st.gamma < 2.0);
}

#[test]
fn sinc_limit_of_the_pole_coefficients() {
    let gamma = 0.7;
    let a = ACoefficients::new(gamma, 200);
    assert!(close(a0_limit(gamma), (PI * gamma / 2.0).sin() / (PI * gamma / 2.0), 1e-15));
    // the a₀ error decays like 1/n
    let scaled = |n: usize| (a.get(n, 0) - a0_limit(gamma)).abs() * n as f64;
    let (s100, s200) = (scaled(100), scaled(200));
    assert!((s200 / s100 - 1.0).abs() < 0.05, "n·err = {s100} then {s200}");
}

#[test]
fn stationary_reflection_matches_the_exact_eckart_amplitude() {
    let m = PotentialModel::eckart(1.0, 1.0).unwrap();
    let sc = NaturalScaleMap::new(m, 2.0).unwrap();
    let eps = 0.1;
    let r = reflection_coefficient(&sc, eps, &StationaryConfig::default()).unwrap();
    let exact = eckart_reflection_exact(1.0, 1.0, 2.0, eps);
    assert!(close(r, exact, 1e-6), "{r} vs {exact}");
}

#[test]
fn reflected_packet_constants() {
    let m = PotentialModel::eckart(1.0, 1.0).unwrap();
    let d = GaussianDensity::default();
    let w = ReflectedWave::new(m, &d, RegionConstants::default()).unwrap();
    assert!(close(w.estar.e, 1.8973670749616771, 1e-10), "E* = {}", w.estar.e);
    assert!(close(w.estar.m, 1.2443120597480777, 1e-10), "M* = {}", w.estar.m);
    assert!(close(w.estar.m2, 10.810598403578684, 1e-8), "M'' = {}", w.estar.m2);
    assert!(close(w.k_star, 1.3774494818183631, 1e-10), "k* = {}", w.k_star);
    assert!(w.x_r().abs() < 1e-10);
    let (lhs, rhs) = w.curvature_identity().unwrap();
    assert!(close(lhs, rhs, 1e-8));
}
