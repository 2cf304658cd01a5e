mod common;

use common::{arb_normalized, fixed_config, pm};
use proptest::prelude::*;
use wexpand::detection::{
    click_probability, closed_form_false, closed_form_true, combined_source, fourfold_coincidence,
    no_click_probability, spdc_forward, true_ratio, DetectorModel, SpdcSource, ANCILLA, BELL_IDLER,
    BELL_SIGNAL, FOURFOLD_DETECTORS, HERALD,
};
use wexpand::fock::{fock_state, tensor, Pol, SpatialMode};
use wexpand::optics::{apply_hwp_v_phase, apply_pdbs};
use wexpand::wgate::{expand_w, w_state};
use wexpand::{ModeAssignment, PdbsParams, WStateSpec};

fn detector_modes() -> Vec<wexpand::PolMode> {
    vec![pm(0, Pol::H), pm(0, Pol::V), pm(3, Pol::H), pm(3, Pol::V)]
}

#[test]
fn forward_term_count() {
    // orders 0..=max_order, one pair state each
    for max_order in 2..=4 {
        let s = spdc_forward(&SpdcSource::new(0.1, 0.0, max_order).unwrap());
        assert_eq!(s.len(), max_order as usize + 1);
    }
}

#[test]
fn unit_efficiency_matches_ideal_postselection() {
    let w2 = w_state(&WStateSpec::new([BELL_IDLER, BELL_SIGNAL]).unwrap());
    let input = tensor(&w2, &fock_state(&[(ANCILLA.h(), 1), (HERALD.h(), 1)])).unwrap();
    let wiring = ModeAssignment::new(BELL_SIGNAL, ANCILLA, 3u16, 4u16).unwrap();
    for p in [PdbsParams::ideal(), PdbsParams::deviated(0.07, -0.11)] {
        let out = apply_hwp_v_phase(&apply_pdbs(&input, &p, &wiring).unwrap(), 4u16);
        let clicks = click_probability(
            &out,
            &FOURFOLD_DETECTORS,
            &DetectorModel::on_off(1.0).unwrap(),
        );
        let ideal = expand_w(2, &p).unwrap().success_prob;
        assert!((clicks - ideal).abs() < 1e-12);
    }
}

#[test]
fn pump_phase_does_not_change_probabilities() {
    let model = DetectorModel::on_off(0.6).unwrap();
    let p = PdbsParams::ideal();
    let base = fourfold_coincidence(&SpdcSource::new(0.02, 0.0, 3).unwrap(), &model, &p).unwrap();
    for phi in [std::f64::consts::FRAC_PI_3, 1.7, -2.5] {
        let r = fourfold_coincidence(&SpdcSource::new(0.02, phi, 3).unwrap(), &model, &p).unwrap();
        assert!((r.p_c - base.p_c).abs() < 1e-12 * base.p_c.max(1e-300) + 1e-24);
        assert!((r.p_t - base.p_t).abs() <= 1e-12 * base.p_t);
        assert!((r.p_f - base.p_f).abs() <= 1e-12 * base.p_f);
    }
    // the state itself changes only by a phase per photon-number sector
    let a = combined_source(&SpdcSource::new(0.02, 0.0, 3).unwrap()).unwrap();
    let b = combined_source(&SpdcSource::new(0.02, 1.7, 3).unwrap()).unwrap();
    for (k, v) in a.iter() {
        assert!((b.amplitude(k).norm() - v.norm()).abs() < 1e-15);
    }
}

#[test]
fn coefficient_fit_recovers_closed_form() {
    // p_c / (g g1) = c4 gamma^4 + c6 gamma^6; least squares in (c4, c6)
    let eta = 0.6;
    let model = DetectorModel::on_off(eta).unwrap();
    let p = PdbsParams::ideal();
    let gammas = [0.005, 0.01, 0.015, 0.02, 0.03];
    let (mut s44, mut s46, mut s66, mut y4, mut y6) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &g in &gammas {
        let src = SpdcSource::with_gamma(g).unwrap();
        let y = fourfold_coincidence(&src, &model, &p).unwrap().p_c / (src.g() * src.g1());
        // scale columns to keep the normal equations well conditioned
        let (x4, x6) = (g.powi(4) / 1e-8, g.powi(6) / 1e-12);
        s44 += x4 * x4;
        s46 += x4 * x6;
        s66 += x6 * x6;
        y4 += x4 * y;
        y6 += x6 * y;
    }
    let det = s44 * s66 - s46 * s46;
    let c4 = (y4 * s66 - y6 * s46) / det / 1e-8;
    let c6 = (y6 * s44 - y4 * s46) / det / 1e-12;
    let want4 = 0.3 * eta.powi(4);
    let want6 = 0.9 * eta.powi(4) * (2.0 - eta).powi(2);
    assert!(((c4 - want4) / want4).abs() < 1e-4, "c4 {c4} vs {want4}");
    assert!(((c6 - want6) / want6).abs() < 1e-4, "c6 {c6} vs {want6}");
}

#[test]
fn ratio_is_monotone_in_gamma_and_eta() {
    let gammas = [0.002, 0.005, 0.01, 0.02, 0.05];
    let etas = [0.2, 0.4, 0.6, 0.8, 1.0];
    let ratio = |g: f64, e: f64| {
        true_ratio(
            &SpdcSource::with_gamma(g).unwrap(),
            &DetectorModel::on_off(e).unwrap(),
        )
        .unwrap()
    };
    for &e in &etas {
        for w in gammas.windows(2) {
            assert!(ratio(w[1], e) < ratio(w[0], e));
        }
    }
    for &g in &gammas {
        for w in etas.windows(2) {
            assert!(ratio(g, w[1]) > ratio(g, w[0]));
        }
    }
    // gamma -> 0 drives the ratio to 1
    assert!(1.0 - ratio(1e-4, 0.5) < 1e-7);
}

#[test]
fn fourth_order_truncation_adds_only_higher_terms() {
    let model = DetectorModel::on_off(0.5).unwrap();
    let p = PdbsParams::ideal();
    let g = 0.01;
    let r3 = fourfold_coincidence(&SpdcSource::new(g, 0.0, 3).unwrap(), &model, &p).unwrap();
    let r4 = fourfold_coincidence(&SpdcSource::new(g, 0.0, 4).unwrap(), &model, &p).unwrap();
    assert_eq!(r3.p_t, r4.p_t);
    assert!(r4.p_f > r3.p_f);
    assert!((r4.p_f - r3.p_f) / r3.p_f < 50.0 * g * g);
    let src = SpdcSource::with_gamma(g).unwrap();
    assert!(
        (r3.p_t - closed_form_true(&src, 0.5, p.mu)).abs() < 1e-15 * r3.p_t.max(1e-300) + 1e-30
    );
    assert!(((r3.p_f - closed_form_false(&src, 0.5, p.mu)) / r3.p_f).abs() < 1e-12);
}

proptest! {
    #![proptest_config(fixed_config(128))]

    #[test]
    fn povm_completeness(s in arb_normalized(detector_modes(), 3, 6), eta in 0.01f64..=1.0) {
        let model = DetectorModel::on_off(eta).unwrap();
        for mode in [SpatialMode::new(0), SpatialMode::new(3)] {
            let click = click_probability(&s, &[mode], &model);
            let silent = no_click_probability(&s, mode, eta);
            prop_assert!((click + silent - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&click));
        }
    }

    #[test]
    fn coincidence_decomposition_is_additive(gamma in 0.0f64..0.1, eta in 0.05f64..=1.0, phi in -3.0f64..3.0) {
        let src = SpdcSource::new(gamma, phi, 3).unwrap();
        let r = fourfold_coincidence(&src, &DetectorModel::on_off(eta).unwrap(), &PdbsParams::ideal()).unwrap();
        prop_assert!((r.p_t + r.p_f - r.p_c).abs() <= 1e-15 * r.p_c);
        if let Some(ratio) = r.ratio {
            prop_assert!((0.0..=1.0).contains(&ratio));
        }
    }
}
