use adamslab::constants::measures;
use adamslab::rearrangement::{
    decreasing_rearrangement, distribution, hardy_littlewood_gap, maximal_profile, random_samples,
    schwarz, selftest, MeasuredSamples,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cells() -> impl Strategy<Value = MeasuredSamples> {
    prop::collection::vec((0.0f64..10.0, 0.01f64..3.0), 1..40).prop_map(|v| {
        let (vals, ms) = v.into_iter().unzip();
        MeasuredSamples::new(vals, ms).unwrap()
    })
}

/// `sup_σ Σ f_i g_σ(i)`-style brute force: both lists sorted descending and
/// integrated against each other on the merged unit-measure cells.
fn sorted_product(f: &[f64], g: &[f64]) -> f64 {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

#[test]
fn hardy_littlewood_against_sorted_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let len = rng.gen_range(1..30);
        let f: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..4.0)).collect();
        let g: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..4.0)).collect();
        let fm = MeasuredSamples::unit_cells(f.clone()).unwrap();
        let gm = MeasuredSamples::unit_cells(g.clone()).unwrap();
        let gap = hardy_littlewood_gap(&fm, &gm).unwrap();
        let direct: f64 = f.iter().zip(&g).map(|(x, y)| x * y).sum();
        assert!(gap >= -1e-12);
        assert!((gap - (sorted_product(&f, &g) - direct)).abs() < 1e-10);
    }
}

#[test]
fn mismatched_cells_are_rejected() {
    let f = MeasuredSamples::new(vec![1.0, 2.0], vec![1.0, 1.0]).unwrap();
    let g = MeasuredSamples::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
    assert!(hardy_littlewood_gap(&f, &g).is_err());
}

#[test]
fn decay_bound_at_every_jump() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (omega, _) = measures(4).unwrap();
    for _ in 0..200 {
        let f = random_samples(&mut rng, 30);
        let sz = schwarz(&f, 4).unwrap();
        for wp in [1.0, 1.5, 2.0] {
            let norm = f.lp_power(wp).powf(1.0 / wp);
            for r in sz.jump_radii() {
                // just inside each jump the profile takes its larger value
                let x = r * (1.0 - 1e-9);
                let bound = x.powf(-4.0 / wp) * (4.0 / omega).powf(1.0 / wp) * norm;
                assert!(sz.eval(x) <= bound * (1.0 + 1e-12));
                assert!((sz.decay_bound(x, wp) - bound).abs() <= 1e-12 * bound);
            }
        }
    }
}

#[test]
fn suite_passes_for_several_dimensions() {
    for (n, p) in [(4, 1.5), (6, 2.0)] {
        let r = selftest(200, 3, n, p).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

proptest! {
    #[test]
    fn norms_preserved_by_rearrangement(f in cells()) {
        let prof = decreasing_rearrangement(&f);
        for q in [1.0, 1.5, 2.0, 7.0] {
            let a = f.lp_power(q);
            let b: f64 = prof.values.iter().zip(prof.widths()).map(|(v, w)| v.powf(q) * w).sum();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn profile_dominated_by_its_average(f in cells(), frac in 0.001f64..1.0) {
        let prof = decreasing_rearrangement(&f);
        let s = frac * prof.total_measure();
        prop_assert!(prof.value(s) <= maximal_profile(&prof, s).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn equimeasurable(f in cells(), t in 0.0f64..10.0) {
        let prof = decreasing_rearrangement(&f);
        prop_assert!((distribution(&f, t) - prof.distribution(t)).abs() <= 1e-12 * f.total_measure());
    }
}
