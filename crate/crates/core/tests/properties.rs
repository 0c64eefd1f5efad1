// SPDX-License-Identifier: Apache-2.0
//! Randomised invariants of the barrier model, the natural scale and the
//! superadiabatic frames.

use proptest::prelude::*;
use superwave_core::potential::{Family, PotentialModel};
use superwave_core::recursion::{vanishes_by_parity, CoefficientJets, Component, JetSource};
use superwave_core::scale::NaturalScaleMap;
use superwave_core::stationary::eckart_reflection_exact;
use superwave_core::stokes::StokesData;
use superwave_core::superadiabatic::FramePoint;
use superwave_core::Complex64 as C;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Eckart), Just(Family::GaussianBump), Just(Family::RationalPole)]
}

/// A model and an energy strictly above its barrier.
fn model_and_energy() -> impl Strategy<Value = (PotentialModel, f64)> {
    (family(), 0.5..2.0f64, 0.5..2.0f64, 1.2..3.0f64)
        .prop_map(|(f, v0, a, r)| (PotentialModel::new(f, v0, a).unwrap(), r * v0))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn momentum_squares_to_kinetic_energy((m, e) in model_and_energy(), x in -6.0..6.0f64) {
        let p = m.momentum_real(e, x);
        prop_assert!(p > 0.0);
        prop_assert!((p * p - (e - m.eval_real(x))).abs() <= 1e-12 * e);
    }

    #[test]
    fn real_and_complex_potentials_agree((m, _) in model_and_energy(), x in -6.0..6.0f64) {
        let z = m.eval(C::new(x, 0.0)).unwrap();
        prop_assert!((z.re - m.eval_real(x)).abs() <= 1e-14 * m.v0);
        prop_assert!(z.im.abs() <= 1e-14 * m.v0);
    }

    #[test]
    fn natural_scale_round_trips((m, e) in model_and_energy(), x in -5.0..5.0f64) {
        let sc = NaturalScaleMap::new(m, e).unwrap();
        let back = sc.xi_inverse(sc.xi(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-8 * (1.0 + x.abs()), "x = {x}, back = {back}");
        prop_assert!(sc.xi(x + 0.1) > sc.xi(x));
        prop_assert!(sc.xi_de(x) * x >= 0.0);
    }

    #[test]
    fn parity_zeros_are_exact((m, e) in model_and_energy(), x in -3.0..3.0f64) {
        let j = CoefficientJets::new(JetSource::Potential { model: &m, e, x }, 9).unwrap();
        for n in 1..=8 {
            for c in [Component::X, Component::Y, Component::Z] {
                if vanishes_by_parity(c, n) {
                    prop_assert_eq!(j.value(c, n), 0.0);
                }
            }
        }
    }

    #[test]
    fn frame_change_has_determinant_minus_two(
        (m, e) in model_and_energy(),
        x in -3.0..3.0f64,
        eps in 0.05..0.2f64,
        n in 1usize..7,
    ) {
        let j = CoefficientJets::new(JetSource::Potential { model: &m, e, x }, n + 1).unwrap();
        let f = FramePoint::new(&j, eps, n).unwrap();
        let det = f.t_matrix(m.momentum_real(e, x)).det();
        prop_assert!((det - C::new(-2.0, 0.0)).norm() <= 1e-10, "det = {det}");
    }

    #[test]
    fn eckart_critical_point_is_on_the_imaginary_axis(v0 in 0.5..2.0f64, a in 0.5..2.0f64, r in 1.2..3.0f64) {
        let m = PotentialModel::eckart(v0, a).unwrap();
        let e = r * v0;
        let st = StokesData::compute(&m, e).unwrap();
        let expected = a * (v0 / e).sqrt().acos();
        prop_assert!(st.z_crit.re.abs() <= 1e-9 * a);
        prop_assert!((st.z_crit.im - expected).abs() <= 1e-9 * a, "{} vs {expected}", st.z_crit.im);
        prop_assert!(st.xi_c > 0.0);
    }

    #[test]
    fn eckart_reflection_is_a_probability(v0 in 0.5..2.0f64, r in 1.05..3.0f64, eps in 0.05..1.0f64) {
        let rr = eckart_reflection_exact(v0, 1.0, r * v0, eps);
        prop_assert!((0.0..1.0).contains(&rr), "|R| = {rr}");
    }
}
