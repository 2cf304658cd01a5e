mod common;

use common::{arb_normalized, arb_state, fixed_config, pm};
use num_complex::Complex64;
use proptest::prelude::*;
use wexpand::fock::{
    create_photon, inner_product, project_counts, prune, tensor, CountPattern, Pol, StateVector,
};
use wexpand::wgate::{w_state, WStateSpec};

fn left_modes() -> Vec<wexpand::PolMode> {
    vec![pm(0, Pol::H), pm(0, Pol::V), pm(1, Pol::H)]
}

fn right_modes() -> Vec<wexpand::PolMode> {
    vec![pm(2, Pol::H), pm(2, Pol::V), pm(3, Pol::V)]
}

#[test]
fn w3_has_unit_norm_by_direct_expansion() {
    // three terms of weight 1/3 each
    let w = w_state(&WStateSpec::standard(3).unwrap());
    let by_terms: f64 = w.iter().map(|(_, a)| a.norm_sqr()).sum();
    assert!((by_terms - 1.0).abs() < 1e-15);
    assert!((inner_product(&w, &w).re - 1.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(fixed_config(128))]

    #[test]
    fn creation_operators_commute(s in arb_state(left_modes(), 3, 6)) {
        let x = pm(0, Pol::H);
        let y = pm(1, Pol::H);
        let a = create_photon(&create_photon(&s, x), y);
        let b = create_photon(&create_photon(&s, y), x);
        prop_assert_eq!(a.len(), b.len());
        for (k, v) in a.iter() {
            prop_assert!((v - b.amplitude(k)).norm() <= 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn creation_norm_weights_by_n_plus_one(s in arb_state(left_modes(), 3, 6)) {
        let mode = pm(0, Pol::V);
        let expected: f64 = s.iter().map(|(b, a)| (b.count(mode) + 1) as f64 * a.norm_sqr()).sum();
        let created = create_photon(&s, mode);
        prop_assert!((created.norm_sqr() - expected).abs() < 1e-12 * expected.max(1.0));
        for (b, _) in created.iter() {
            prop_assert!(b.count(mode) >= 1);
        }
        let mut total_in: Vec<u32> = s.iter().map(|(b, _)| b.total_photons() + 1).collect();
        let mut total_out: Vec<u32> = created.iter().map(|(b, _)| b.total_photons()).collect();
        total_in.sort();
        total_out.sort();
        prop_assert_eq!(total_in, total_out);
    }

    #[test]
    fn inner_product_hermitian(a in arb_state(left_modes(), 2, 5), b in arb_state(left_modes(), 2, 5)) {
        let ab = inner_product(&a, &b);
        let ba = inner_product(&b, &a);
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
        let aa = inner_product(&a, &a);
        prop_assert!(aa.im.abs() < 1e-12 && aa.re >= 0.0);
    }

    #[test]
    fn projection_is_idempotent_and_contracting(s in arb_normalized(left_modes(), 2, 8), n0 in 0u32..3, n1 in 0u32..3) {
        let pattern = CountPattern::new().require(0u16, n0).require(1u16, n1);
        let once = project_counts(&s, &pattern);
        let twice = project_counts(&once, &pattern);
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.norm_sqr() <= s.norm_sqr() + 1e-15);
        // P(1-P) = 0: the rejected part is orthogonal to the kept part
        let rejected = s.add(&once.scale(Complex64::new(-1.0, 0.0)));
        prop_assert!(inner_product(&once, &rejected).norm() < 1e-12);
    }

    #[test]
    fn tensor_norm_is_multiplicative(a in arb_state(left_modes(), 2, 4), b in arb_state(right_modes(), 2, 4)) {
        let t = tensor(&a, &b).unwrap();
        // direct expansion oracle: sum over all pairs of |x y|^2
        let mut direct = 0.0;
        for (_, x) in a.iter() {
            for (_, y) in b.iter() {
                direct += (x * y).norm_sqr();
            }
        }
        prop_assert!((t.norm_sqr() - direct).abs() < 1e-12 * direct.max(1.0));
        prop_assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-12 * (a.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn tensor_and_projection_commute(a in arb_state(left_modes(), 2, 4), b in arb_state(right_modes(), 2, 4), n in 0u32..3) {
        let pa = CountPattern::new().require(0u16, n);
        let lhs = project_counts(&tensor(&a, &b).unwrap(), &pa);
        let rhs = tensor(&project_counts(&a, &pa), &b).unwrap();
        prop_assert_eq!(lhs.len(), rhs.len());
        for (k, v) in lhs.iter() {
            prop_assert!((v - rhs.amplitude(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn pruning_norm_drift_is_bounded(s in arb_state(left_modes(), 2, 8), tol in 0.0f64..0.5) {
        let p = prune(&s, tol);
        let removed = s.len() - p.len();
        let drift = (s.norm() - p.norm()).abs();
        prop_assert!(drift <= tol * (removed as f64).sqrt() + 1e-15);
        prop_assert!(p.iter().all(|(_, a)| a.norm() >= tol));
    }
}

#[test]
fn zero_tolerance_prune_is_identity_on_random_states() {
    use proptest::strategy::ValueTree;
    let mut runner = common::fixed_runner(1);
    for _ in 0..32 {
        let s = arb_state(left_modes(), 2, 6)
            .new_tree(&mut runner)
            .unwrap()
            .current();
        assert_eq!(prune(&s, 0.0), s);
    }
    assert_eq!(prune(&StateVector::zero(), 1.0), StateVector::zero());
}
