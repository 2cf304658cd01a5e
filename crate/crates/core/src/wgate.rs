//! W states and the post-selected one-photon expansion gate.
//!
//! One gate step mixes the photon of `input_mode` with an H-polarized
//! ancilla on the beamsplitter, flips the V sign on the second output, and
//! keeps only the events with exactly one photon in every spatial mode.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    create_photon, inner_product, project_counts, tensor, CountPattern, FockBasisState,
    SpatialMode, StateVector,
};
use crate::optics::{
    apply_hwp_v_phase, apply_pdbs_with, BeamsplitterMethod, ModeAssignment, MonomialSubstitution,
    PdbsParams,
};

const NORM_TOL: f64 = 1e-10;

/// Layout of a W state: one photon per listed spatial mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WStateSpec {
    modes: Vec<SpatialMode>,
}

impl WStateSpec {
    pub fn new<I, M>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = M>,
        M: Into<SpatialMode>,
    {
        let modes: Vec<SpatialMode> = modes.into_iter().map(Into::into).collect();
        if modes.is_empty() {
            return Err(Error::EmptyWState);
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(*m));
            }
        }
        Ok(Self { modes })
    }

    /// Default layout for `n` photons. The photon fed to the gate is the last
    /// mode; a single photon sits in mode 1 so the gate ports read 1, 2 -> 3, 4.
    pub fn standard(n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::EmptyWState),
            1 => Self::new([1u16]),
            _ => Self::new(0..n as u16),
        }
    }

    pub fn n(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[SpatialMode] {
        &self.modes
    }

    pub fn last(&self) -> SpatialMode {
        *self.modes.last().expect("non-empty")
    }
}

/// Equal superposition of all placements of a single V photon among the
/// modes, the others H. W_1 is |1_V>.
pub fn w_state(spec: &WStateSpec) -> StateVector {
    let amp = Complex64::new(1.0 / (spec.n() as f64).sqrt(), 0.0);
    StateVector::from_terms(spec.modes.iter().map(|&v_mode| {
        let state = FockBasisState::from_counts(
            spec.modes
                .iter()
                .map(|&m| (if m == v_mode { m.v() } else { m.h() }, 1)),
        );
        (state, amp)
    }))
}

/// |<W|state>|^2. The state must be normalized and live on exactly the
/// spec's spatial modes.
pub fn fidelity_to_w(state: &StateVector, spec: &WStateSpec) -> Result<f64> {
    check_normalized(state)?;
    let mut target: Vec<SpatialMode> = spec.modes.clone();
    target.sort();
    let modes = state.spatial_modes();
    if modes != target {
        return Err(Error::ModeMismatch {
            state: modes,
            target,
        });
    }
    Ok(inner_product(&w_state(spec), state).norm_sqr().min(1.0))
}

fn check_normalized(state: &StateVector) -> Result<()> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    /// Normalized post-selected state; zero when nothing survives.
    pub post_state: StateVector,
    pub success_prob: f64,
    /// Fidelity against the W state on `modes`.
    pub fidelity: f64,
    /// Spatial modes of the output: untouched modes then the two gate outputs.
    pub modes: Vec<SpatialMode>,
    pub out3: SpatialMode,
    pub out4: SpatialMode,
}

impl GateOutcome {
    pub fn summary(&self) -> GateSummary {
        GateSummary {
            photons: self.modes.len(),
            success_prob: self.success_prob,
            fidelity: self.fidelity,
            terms: self
                .post_state
                .iter()
                .map(|(s, a)| TermReport {
                    basis: s.to_string(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateSummary {
    pub photons: usize,
    pub success_prob: f64,
    pub fidelity: f64,
    pub terms: Vec<TermReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

/// One gate step with the default beamsplitter method.
pub fn expand_once(
    input: &StateVector,
    input_mode: impl Into<SpatialMode>,
    params: &PdbsParams,
) -> Result<GateOutcome> {
    expand_once_with(&MonomialSubstitution, input, input_mode.into(), params)
}

pub fn expand_once_with(
    method: &dyn BeamsplitterMethod,
    input: &StateVector,
    input_mode: SpatialMode,
    params: &PdbsParams,
) -> Result<GateOutcome> {
    check_normalized(input)?;
    let all_modes = input.spatial_modes();
    if !all_modes.contains(&input_mode) {
        return Err(Error::MissingMode(input_mode));
    }
    if input.iter().any(|(s, _)| s.spatial_count(input_mode) != 1) {
        return Err(Error::NotSinglePhoton { mode: input_mode });
    }

    // fresh labels above everything in use
    let top = all_modes.iter().map(|m| m.index).max().unwrap_or(0);
    let ancilla = SpatialMode::new(top + 1);
    let wiring = ModeAssignment::new(input_mode, ancilla, top + 2, top + 3)?;

    let with_ancilla = tensor(input, &create_photon(&StateVector::vacuum(), ancilla.h()))?;
    let mixed = apply_pdbs_with(method, &with_ancilla, params, &wiring)?;
    let compensated = apply_hwp_v_phase(&mixed, wiring.out4);

    let mut modes: Vec<SpatialMode> = all_modes.into_iter().filter(|m| *m != input_mode).collect();
    modes.extend([wiring.out3, wiring.out4]);
    let raw = project_counts(&compensated, &CountPattern::singles(modes.iter().copied()));

    let success_prob = raw.norm_sqr();
    let spec = WStateSpec::new(modes.iter().copied())?;
    let (post_state, fidelity) = match raw.normalized() {
        Some(post) => {
            let f = fidelity_to_w(&post, &spec)?;
            (post, f)
        }
        None => (StateVector::zero(), 0.0),
    };
    Ok(GateOutcome {
        post_state,
        success_prob,
        fidelity,
        modes,
        out3: wiring.out3,
        out4: wiring.out4,
    })
}

/// Expands the standard W_n layout by one photon.
pub fn expand_w(n: usize, params: &PdbsParams) -> Result<GateOutcome> {
    expand_w_with(&MonomialSubstitution, n, params)
}

pub fn expand_w_with(
    method: &dyn BeamsplitterMethod,
    n: usize,
    params: &PdbsParams,
) -> Result<GateOutcome> {
    let spec = WStateSpec::standard(n)?;
    expand_once_with(method, &w_state(&spec), spec.last(), params)
}

/// Which gate output is fed into the next gate of a cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeedPort {
    Out3,
    #[default]
    Out4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    /// Final state, cumulative probability, fidelity to W_{k+1}.
    pub outcome: GateOutcome,
    /// Success probability of each individual step.
    pub step_probs: Vec<f64>,
}

/// Prepares W_{k+1} from a single V photon by `k` gate steps.
pub fn cascade_prepare(k: usize, params: &PdbsParams) -> Result<CascadeOutcome> {
    cascade_prepare_with(&MonomialSubstitution, k, params, FeedPort::Out4)
}

pub fn cascade_prepare_with(
    method: &dyn BeamsplitterMethod,
    k: usize,
    params: &PdbsParams,
    feed: FeedPort,
) -> Result<CascadeOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cascade needs at least one gate".into(),
        ));
    }
    let start = WStateSpec::standard(1)?;
    let mut state = w_state(&start);
    let mut input_mode = start.last();
    let mut step_probs = Vec::with_capacity(k);
    let mut cumulative = 1.0;
    let mut last = None;
    for _ in 0..k {
        let step = expand_once_with(method, &state, input_mode, params)?;
        cumulative *= step.success_prob;
        step_probs.push(step.success_prob);
        if step.post_state.is_zero() {
            last = Some(step);
            break;
        }
        input_mode = match feed {
            FeedPort::Out3 => step.out3,
            FeedPort::Out4 => step.out4,
        };
        state = step.post_state.clone();
        last = Some(step);
    }
    let mut outcome = last.expect("k >= 1");
    outcome.success_prob = cumulative;
    Ok(CascadeOutcome {
        outcome,
        step_probs,
    })
}

/// (N + 1) / (5 N)
pub fn expansion_probability(n: usize) -> f64 {
    (n as f64 + 1.0) / (5.0 * n as f64)
}

/// (k + 1) 5^-k
pub fn cascade_probability(k: usize) -> f64 {
    (k as f64 + 1.0) / 5f64.powi(k as i32)
}
