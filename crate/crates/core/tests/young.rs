use std::f64::consts::E;

use adamslab::young::{ln_phi, phi, phi_of_arg, split_constant, YoungParams};
use adamslab::Error;
use proptest::prelude::*;

fn p4(alpha: f64) -> YoungParams {
    YoungParams::for_dim(4, alpha, 3).unwrap()
}

/// `Σ_{j=j0}^{j0+49} x^j/j!`.
fn series50(x: f64, j0: usize) -> f64 {
    let mut term = 1.0;
    for j in 1..=j0 {
        term *= x / j as f64;
    }
    let mut sum = 0.0;
    for j in j0..j0 + 50 {
        sum += term;
        term *= x / (j + 1) as f64;
    }
    sum
}

#[test]
fn small_argument_tail() {
    let want = series50(0.02, 3);
    assert!((want - 1.3400267e-6).abs() < 1e-12);
    let got = phi(0.1, &p4(2.0)).unwrap();
    assert!((got - want).abs() < 1e-14 * want);
}

#[test]
fn unit_argument() {
    assert!((phi(1.0, &p4(1.0)).unwrap() - (E - 2.5)).abs() < 1e-15);
    assert_eq!(phi(0.0, &p4(1.0)).unwrap(), 0.0);
}

#[test]
fn overflow_and_bad_input() {
    assert!(matches!(phi_of_arg(710.0, 3), Err(Error::Overflow { .. })));
    assert!(phi(f64::NAN, &p4(1.0)).is_err());
    assert!(YoungParams::for_dim(2, 1.0, 1).is_err());
}

#[test]
fn split_constant_examples() {
    assert!((split_constant(1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
    assert!((split_constant(0.25, 2.0).unwrap() - 5.0).abs() < 1e-12);
    assert!(split_constant(1.0, 0.5).is_err());
}

proptest! {
    #[test]
    fn power_of_phi_below_phi_of_scaled_alpha(s in -5.0f64..5.0, alpha in 0.01f64..4.0, wp in 1.001f64..4.0) {
        let lhs = wp * ln_phi(s, &p4(alpha));
        let rhs = ln_phi(s, &p4(alpha * wp));
        prop_assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0), "{lhs} > {rhs}");
    }

    #[test]
    fn split_inequality(a in 0.0f64..10.0, b in 0.0f64..10.0, eta in 0.001f64..5.0, wp in 1.001f64..4.0) {
        let c = split_constant(eta, wp).unwrap();
        prop_assert!((a + b).powf(wp) <= ((1.0 + eta) * a.powf(wp) + c * b.powf(wp)) * (1.0 + 1e-12));
    }

    #[test]
    fn increasing_in_alpha(s in 0.01f64..4.0, a in 0.05f64..3.0, da in 0.01f64..1.0) {
        prop_assert!(phi(s, &p4(a + da)).unwrap() > phi(s, &p4(a)).unwrap());
    }

    #[test]
    fn tail_matches_series_below_switch(x in 1e-6f64..0.5, j0 in 1usize..6) {
        let want = series50(x, j0);
        prop_assert!((phi_of_arg(x, j0).unwrap() - want).abs() <= 1e-13 * want);
    }
}
