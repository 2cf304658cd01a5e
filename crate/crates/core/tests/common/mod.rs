//! Reference computations that do not go through the library's
//! beamsplitter code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestRng, TestRunner};

use wexpand::fock::{FockBasisState, Pol, PolMode, SpatialMode, StateVector};
use wexpand::PdbsParams;

pub const SEED: u64 = 0x5EED_FACE;

pub fn fixed_config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn fixed_runner(cases: u32) -> TestRunner {
    let seed: [u8; 32] = std::array::from_fn(|i| (SEED >> ((i % 8) * 8)) as u8 ^ i as u8);
    TestRunner::new_with_rng(
        fixed_config(cases),
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    )
}

/// Index of |n1, n2> in the two-mode truncated basis with per-mode cutoff `cut`.
fn idx(n1: usize, n2: usize, cut: usize) -> usize {
    n1 * (cut + 1) + n2
}

/// Two-mode beamsplitter unitary on the truncated Fock space, built as
/// exp(theta (a1+ a2 - a2+ a1)) with sin(theta) = sqrt(t). Mode 1 of the
/// result is output port 3, mode 2 output port 4.
pub fn two_mode_lift(t: f64, cut: usize) -> DMatrix<f64> {
    let dim = (cut + 1) * (cut + 1);
    let mut gen = DMatrix::<f64>::zeros(dim, dim);
    for n1 in 0..=cut {
        for n2 in 0..=cut {
            let col = idx(n1, n2, cut);
            // a1+ a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
            if n2 > 0 && n1 < cut {
                gen[(idx(n1 + 1, n2 - 1, cut), col)] += (((n1 + 1) * n2) as f64).sqrt();
            }
            // -a2+ a1 |n1, n2> = -sqrt(n1 (n2+1)) |n1-1, n2+1>
            if n1 > 0 && n2 < cut {
                gen[(idx(n1 - 1, n2 + 1, cut), col)] -= ((n1 * (n2 + 1)) as f64).sqrt();
            }
        }
    }
    let theta = t.sqrt().asin();
    (gen * theta).exp()
}

/// Output amplitudes keyed by (h3, h4, v3, v4) for input occupations
/// (h1, h2, v1, v2) on the two input ports.
pub fn lift_oracle(
    params: &PdbsParams,
    h1: usize,
    h2: usize,
    v1: usize,
    v2: usize,
) -> BTreeMap<(usize, usize, usize, usize), f64> {
    let cut = (h1 + h2).max(v1 + v2).max(1);
    let uh = two_mode_lift(params.mu_eff(), cut);
    let uv = two_mode_lift(params.nu_eff(), cut);
    let mut out = BTreeMap::new();
    for h3 in 0..=(h1 + h2) {
        let h4 = h1 + h2 - h3;
        let ah = uh[(idx(h3, h4, cut), idx(h1, h2, cut))];
        for v3 in 0..=(v1 + v2) {
            let v4 = v1 + v2 - v3;
            let av = uv[(idx(v3, v4, cut), idx(v1, v2, cut))];
            out.insert((h3, h4, v3, v4), ah * av);
        }
    }
    out
}

/// Closed-form W2 -> W3 outcome at deviations (dh, dv): amplitudes of the
/// three surviving terms are a = (1 - 2 mu')/sqrt2, b = sqrt((1-nu')(1-mu'))/sqrt2,
/// c = sqrt(mu' nu')/sqrt2. Returns (fidelity, probability).
pub fn closed_form_scan(dh: f64, dv: f64) -> (f64, f64) {
    let ideal = PdbsParams::ideal();
    let mu = ideal.mu + dh;
    let nu = ideal.nu + dv;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = (1.0 - 2.0 * mu) * r;
    let b = ((1.0 - nu) * (1.0 - mu)).sqrt() * r;
    let c = (mu * nu).sqrt() * r;
    let p = a * a + b * b + c * c;
    ((a + b + c).powi(2) / (3.0 * p), p)
}

pub fn basis(counts: &[(PolMode, u32)]) -> FockBasisState {
    FockBasisState::from_counts(counts.iter().copied())
}

pub fn pm(spatial: u16, pol: Pol) -> PolMode {
    PolMode::new(SpatialMode::new(spatial), pol)
}

/// Random superposition over Fock states of the given modes with up to
/// `max_per_mode` photons each.
pub fn arb_state(
    modes: Vec<PolMode>,
    max_per_mode: u32,
    max_terms: usize,
) -> impl Strategy<Value = StateVector> {
    let n = modes.len();
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_per_mode, n),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        StateVector::from_terms(terms.into_iter().map(|(occ, re, im)| {
            let s = FockBasisState::from_counts(modes.iter().copied().zip(occ));
            (s, Complex64::new(re, im))
        }))
    })
}

pub fn arb_normalized(
    modes: Vec<PolMode>,
    max_per_mode: u32,
    max_terms: usize,
) -> impl Strategy<Value = StateVector> {
    arb_state(modes, max_per_mode, max_terms).prop_filter_map("zero state", |s| s.normalized())
}

pub fn arb_params() -> impl Strategy<Value = PdbsParams> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(mu, nu)| PdbsParams::new(mu, nu))
}
