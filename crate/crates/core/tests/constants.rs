use std::f64::consts::PI;

use adamslab::constants::{beta_n2, c0_terms, j0, measures, p_star, ConstantSet};
use proptest::prelude::*;

#[test]
fn sphere_and_ball_measures() {
    let (o, s) = measures(4).unwrap();
    assert!((o - 2.0 * PI * PI).abs() < 1e-13);
    assert!((s - PI * PI / 2.0).abs() < 1e-13);
    let (o, s) = measures(6).unwrap();
    assert!((o - PI.powi(3)).abs() < 1e-12);
    assert!((s - PI.powi(3) / 6.0).abs() < 1e-12);
}

#[test]
fn critical_constant_in_four_dimensions() {
    let b = beta_n2(4).unwrap();
    assert!((b - 32.0 * PI * PI).abs() / b < 1e-12);
    // γ = 0 leaves the threshold untouched
    let cs = ConstantSet::new(4, 1.5, 0.0).unwrap();
    assert_eq!(cs.beta_gamma, cs.beta_n2);
    let cs = ConstantSet::new(4, 1.5, 1.0).unwrap();
    assert!((cs.beta_gamma - 24.0 * PI * PI).abs() < 1e-11);
    assert_eq!(cs.p_star, 6.0);
    assert_eq!(cs.j0, 3);
}

#[test]
fn level_bound_by_direct_arithmetic() {
    // (n, p, γ, μ, α₀) = (4, 1.5, 1, 7, 1): both candidates written out by hand
    let m: f64 = 10.0 / 28.0;
    let r = 24.0 * PI * PI;
    let t1 = 0.25 * m.powf(4.0 / 3.0) * r;
    let t2 = m * r.powf(0.75) / 2f64.powf(1.5);
    let (a, b) = c0_terms(4, 1.5, r, 7.0, 1.0);
    assert!((a - t1).abs() < 1e-12 * t1);
    assert!((b - t2).abs() < 1e-12 * t2);
    let cs = ConstantSet::with_level(4, 1.5, 1.0, 7.0, 1.0).unwrap();
    let c0 = cs.c0.unwrap();
    assert!((c0 - t1.min(t2)).abs() < 1e-12 * c0);
    assert!((c0 - 7.623953090908028).abs() < 1e-12);
}

#[test]
fn level_bound_needs_mu_above_half_dimension() {
    assert!(ConstantSet::with_level(4, 1.5, 1.0, 2.0, 1.0).is_err());
    assert!(ConstantSet::with_level(4, 1.5, 1.0, 7.0, 0.0).is_err());
}

#[test]
fn rows_list_level_only_when_present() {
    let plain = ConstantSet::new(4, 1.5, 1.0).unwrap().rows();
    assert!(plain.iter().all(|(k, _)| *k != "c0"));
    let full = ConstantSet::with_level(4, 1.5, 1.0, 7.0, 1.0)
        .unwrap()
        .rows();
    assert!(full.iter().any(|(k, _)| *k == "c0"));
}

proptest! {
    #[test]
    fn sobolev_exponent_and_truncation(n in 4usize..12, frac in 0.05f64..0.95) {
        let nf = n as f64;
        let p = 1.0 + frac * (nf / 2.0 - 1.0);
        let ps = p_star(n, p);
        prop_assert!((ps * (nf - 2.0 * p) - nf * p).abs() < 1e-9 * ps);
        let j = j0(n, p);
        let x = ps * (nf - 2.0) / nf;
        // ceiling with a rounding guard: j0 − 1 < x ≤ j0 up to 1e-9
        prop_assert!(j as f64 >= x - 1e-9 && (j as f64) < x + 1.0 - 1e-9);
    }
}
