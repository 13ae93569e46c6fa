use kolmo_core::lab::{epsilon_minimize, ConstantLedger};
use kolmo_core::math::golden_section;
use kolmo_core::propagator::DecayConstants;
use proptest::prelude::*;

proptest! {
    #[test]
    fn epsilon_minimum_matches_golden_section(a in 1e-3f64..1e3, b in 1e-3f64..1e3, k in 0.05f64..20.0) {
        let closed = epsilon_minimize(a, b, k).unwrap();
        let objective = |eps: f64| a * eps.powf(-k) + b * eps;
        let hi = 10.0 * closed.eps_star.max(1.0);
        let (eps, value) = golden_section(objective, 1e-9 * closed.eps_star, hi, 1e-13);
        prop_assert!((closed.min_value - value).abs() <= 1e-9 * value, "{} vs {value}", closed.min_value);
        prop_assert!((closed.min_value - objective(closed.eps_star)).abs() <= 1e-12 * closed.min_value);
        prop_assert!(closed.min_value <= value * (1.0 + 1e-12));
        prop_assert!((eps / closed.eps_star - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn young_gap_is_non_negative(c1 in 0.0f64..5.0, alpha in 0.01f64..0.99, t in 0.05f64..10.0, n in 0.0f64..100.0) {
        let ledger = ConstantLedger::new(c1, &DecayConstants::explicit(1), alpha, t).unwrap();
        let scale = c1 * n + ledger.k_alpha * ledger.c2 * n * n * ledger.t31;
        prop_assert!(ledger.young_gap(n) >= -1e-12 * scale.max(1.0));
    }

    #[test]
    fn young_gap_vanishes_at_balance(c1 in 0.01f64..5.0, alpha in 0.01f64..0.99, t in 0.05f64..10.0) {
        let ledger = ConstantLedger::new(c1, &DecayConstants::explicit(1), alpha, t).unwrap();
        let n = c1 / (ledger.k_alpha * ledger.c2 * ledger.t31);
        prop_assert!(ledger.young_gap(n).abs() <= 1e-10 * (c1 * n).max(1.0));
    }

    #[test]
    fn envelope_dominates_log_constant(c1 in 0.0f64..5.0, alpha in 0.01f64..0.99, t in 0.05f64..10.0) {
        let ledger = ConstantLedger::new(c1, &DecayConstants::explicit(1), alpha, t).unwrap();
        prop_assert!(ledger.ln_c_tilde1 <= ledger.ln_envelope() * (1.0 + 1e-12));
    }
}

#[test]
fn zero_weight_is_a_boundary_minimum() {
    let m = epsilon_minimize(0.0, 2.0, 1.5).unwrap();
    assert!(m.boundary);
    assert_eq!(m.min_value, 0.0);
    assert!(epsilon_minimize(1.0, 0.0, 1.0).is_err());
    assert!(epsilon_minimize(1.0, 1.0, 0.0).is_err());
}
