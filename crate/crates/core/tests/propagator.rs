use kolmo_core::propagator::{expanded_exponent, propagate_grid, symbol, DecayConstants};
use kolmo_core::{Complex64, FourierPlan, GaussianMixtureState, PhaseGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn relative_gap(a: &GaussianMixtureState, b: &GaussianMixtureState) -> f64 {
    let grid = b.fitted_grid(0.05, 1e-12, 2048).unwrap();
    a.to_phase_field(&grid).unwrap().relative_error(&b.to_phase_field(&grid).unwrap()).unwrap()
}

#[test]
fn completed_square_matches_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let t = rng.gen_range(0.0..1.0);
        let xi = [rng.gen_range(-1.0..1.0)];
        let eta = [rng.gen_range(-1.0..1.0)];
        let q = symbol(t, &[xi[0], eta[0]]).unwrap().exponent;
        worst = worst.max((q - expanded_exponent(t, &xi, &eta)).abs());
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn zero_frequency_is_conserved_by_the_mixture() {
    for seed in 0..5 {
        let g0 = GaussianMixtureState::seeded(seed, 1, 1, 3).unwrap();
        let dc = g0.eval(&[0.0, 0.0]);
        for t in [0.1, 1.0, 7.5] {
            let gt = g0.propagate(t).unwrap();
            let diff = (gt.eval(&[0.0, 0.0]) - dc).norm();
            assert!(diff <= 1e-13 * dc.norm().max(1.0), "seed {seed}, t {t}: {diff}");
        }
    }
}

#[test]
fn two_dimensional_grid_matches_mixture() {
    let grid = PhaseGrid::new(2, 32, 9.0).unwrap();
    let plan = FourierPlan::new(grid);
    let s = GaussianMixtureState::new(
        2,
        vec![kolmo_core::GaussianTerm::isotropic(Complex64::new(1.0, 0.0), &[0.3, -0.2, 0.1, 0.0], 1.0).unwrap()],
    )
    .unwrap();
    let f0 = s.to_phase_field(&grid).unwrap();
    let ft = propagate_grid(&plan, &f0, 0.3).unwrap();
    let exact = s.propagate(0.3).unwrap().to_phase_field(&grid).unwrap();
    assert!(ft.relative_error(&exact).unwrap() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pointwise_bound(t in 1e-6f64..10.0, xi in -1e3f64..1e3, eta in -1e3f64..1e3) {
        let c = DecayConstants::explicit(1).c_pointwise;
        let q = symbol(t, &[xi, eta]).unwrap().exponent;
        let floor = c * t.min(t * t * t) * (xi * xi + eta * eta);
        prop_assert!(q >= floor * (1.0 - 1e-12));
    }

    #[test]
    fn multiplier_is_a_contraction(t in 0.0f64..10.0, xi in -50.0f64..50.0, eta in -50.0f64..50.0) {
        let s = symbol(t, &[xi, eta]).unwrap();
        prop_assert!(s.multiplier <= 1.0 && s.multiplier >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixture_semigroup(seed in 0u64..1000, s in 0.01f64..2.0, t in 0.01f64..2.0) {
        let g0 = GaussianMixtureState::seeded(seed, 7, 1, 2).unwrap();
        let direct = g0.propagate(s + t).unwrap();
        let composed = g0.propagate(s).unwrap().propagate(t).unwrap();
        prop_assert!(relative_gap(&composed, &direct) <= 1e-10);
    }

    #[test]
    fn mixture_norm_is_non_increasing(seed in 0u64..1000, mut times in prop::collection::vec(0.0f64..5.0, 20)) {
        let g0 = GaussianMixtureState::seeded(seed, 3, 1, 3).unwrap();
        times.sort_by(f64::total_cmp);
        let mut last = g0.physical_norm();
        for t in times {
            let n = g0.propagate(t).unwrap().physical_norm();
            prop_assert!(n <= last * (1.0 + 1e-12));
            last = n;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn grid_semigroup(seed in 0u64..1000, s in 0.05f64..0.5, t in 0.05f64..0.5) {
        let grid = PhaseGrid::new(1, 128, 12.0).unwrap();
        let plan = FourierPlan::new(grid);
        let f0 = GaussianMixtureState::seeded(seed, 5, 1, 2).unwrap().to_phase_field(&grid).unwrap();
        let direct = propagate_grid(&plan, &f0, s + t).unwrap();
        let composed = propagate_grid(&plan, &propagate_grid(&plan, &f0, s).unwrap(), t).unwrap();
        prop_assert!(composed.relative_error(&direct).unwrap() <= 1e-7);
    }
}
