mod common;

use std::sync::Arc;

use lbsphere::model::ENERGY_NORMALIZATION;
use lbsphere::sht::ShtPlan;
use lbsphere::{GradientVariant, Model, ModelParams, SpectralField};
use proptest::prelude::*;

use common::random_coeffs;

fn model(lambda: f64) -> Model {
    let plan = Arc::new(ShtPlan::minimal(15));
    Model::new(plan, ModelParams::new(1.0, -1.0, lambda, 42f64.sqrt()), GradientVariant::Squared)
}

/// Directional derivative of the unscaled energy along `v`. The energy is a
/// quartic polynomial along any line, for which this five-point stencil is exact.
fn directional_derivative(m: &Model, c: &SpectralField, v: &SpectralField, h: f64) -> f64 {
    let e = |t: f64| {
        let mut x = c.clone();
        x.axpy(t, v);
        m.energy(&x).unwrap().total / ENERGY_NORMALIZATION
    };
    (8.0 * (e(h) - e(-h)) - (e(2.0 * h) - e(-2.0 * h))) / (12.0 * h)
}

fn check(lambda: f64, seed: u64) -> Result<(), TestCaseError> {
    let m = model(lambda);
    let mut c = random_coeffs(15, seed, 1.0);
    c.scale(3.0);
    let v = random_coeffs(15, seed ^ 0xabcdef, 0.5);
    let g = m.gradient(&c).unwrap();
    let analytic = g.dot(&v);
    let numeric = directional_derivative(&m, &c, &v, 1e-3);
    let rel = (analytic - numeric).abs() / analytic.abs().max(1e-8);
    prop_assert!(rel < 1e-6, "lambda={lambda}: analytic {analytic} numeric {numeric} rel {rel:e}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gradient_matches_finite_differences_without_cubic(seed in any::<u64>()) {
        check(0.0, seed)?;
    }

    #[test]
    fn gradient_matches_finite_differences_with_cubic(seed in any::<u64>()) {
        check(0.8, seed)?;
    }
}

#[test]
fn gradient_components_match_coordinate_derivatives() {
    let m = model(0.8);
    let c = random_coeffs(15, 5, 1.0);
    let g = m.gradient(&c).unwrap();
    // a real coordinate at m > 0 moves both +m and -m entries, doubling the derivative
    for (slot, factor) in [(3usize, 1.0), (40, 2.0), (100, 2.0)] {
        let mut v = SpectralField::zeros(15);
        v.coeffs_mut()[slot].re = 1.0;
        let numeric = directional_derivative(&m, &c, &v, 1e-3);
        let analytic = factor * g.coeffs()[slot].re;
        assert!((analytic - numeric).abs() < 1e-8 * analytic.abs().max(1.0));
    }
}

#[test]
fn energy_is_invariant_under_longitude_shift() {
    let m = model(0.8);
    let c = random_coeffs(15, 9, 1.0);
    let e0 = m.energy(&c).unwrap().total;
    let e1 = m.energy(&c.rotate_z(0.731)).unwrap().total;
    assert!((e0 - e1).abs() < 1e-12 * e0.abs().max(1.0));
}
