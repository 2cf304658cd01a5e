//! Threshold detectors, pair sources, and the four-fold coincidence rate of
//! the two-photon-to-three-photon experiment.
//!
//! Layout of the experiment: the backward pass of the pump emits the Bell
//! pair in modes 0 and 1, the forward pass emits an H pair in modes 2 and 2'.
//! Modes 1 and 2 meet on the beamsplitter (outputs 3 and 4) and detectors sit
//! on 0, 3, 4 and 2'.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{tensor, FockBasisState, SpatialMode, StateVector};
use crate::optics::{apply_hwp_v_phase, apply_pdbs, ModeAssignment, PdbsParams};
use crate::registry::detector_responses;

pub const BELL_IDLER: SpatialMode = SpatialMode::new(0);
pub const BELL_SIGNAL: SpatialMode = SpatialMode::new(1);
pub const ANCILLA: SpatialMode = SpatialMode::new(2);
pub const HERALD: SpatialMode = SpatialMode::primed(2);
pub const OUT3: SpatialMode = SpatialMode::new(3);
pub const OUT4: SpatialMode = SpatialMode::new(4);

/// Detectors whose joint firing signals success.
pub const FOURFOLD_DETECTORS: [SpatialMode; 4] = [BELL_IDLER, OUT3, OUT4, HERALD];

/// Response of a polarization-insensitive detector to `m` incident photons.
pub trait DetectorResponse: Send + Sync {
    fn name(&self) -> &'static str;

    /// Probability of the "success" outcome given `photons` incident photons
    /// and quantum efficiency `eta`.
    fn fire_probability(&self, photons: u32, eta: f64) -> f64;
}

/// ON/OFF bucket detector without dark counts: click with 1 - (1-eta)^m.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnOff;

impl OnOff {
    /// No-click element, (1-eta)^m.
    pub fn silent_probability(photons: u32, eta: f64) -> f64 {
        (1.0 - eta).powi(photons as i32)
    }
}

impl DetectorResponse for OnOff {
    fn name(&self) -> &'static str {
        "onoff"
    }

    fn fire_probability(&self, photons: u32, eta: f64) -> f64 {
        1.0 - (1.0 - eta).powi(photons as i32)
    }
}

/// Number-resolving detector that succeeds only when it registers exactly one
/// photon: m eta (1-eta)^(m-1).
#[derive(Debug, Clone, Copy, Default)]
pub struct NumberResolving;

impl DetectorResponse for NumberResolving {
    fn name(&self) -> &'static str {
        "pnr"
    }

    fn fire_probability(&self, photons: u32, eta: f64) -> f64 {
        if photons == 0 {
            return 0.0;
        }
        photons as f64 * eta * (1.0 - eta).powi(photons as i32 - 1)
    }
}

/// A detector response plus efficiencies. One efficiency is shared by every
/// detector unless overridden per spatial mode.
#[derive(Clone)]
pub struct DetectorModel {
    response: Arc<dyn DetectorResponse>,
    eta: f64,
    overrides: BTreeMap<SpatialMode, f64>,
}

impl fmt::Debug for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DetectorModel")
            .field("response", &self.response.name())
            .field("eta", &self.eta)
            .field("overrides", &self.overrides)
            .finish()
    }
}

fn check_eta(eta: f64) -> Result<f64> {
    if eta.is_finite() && eta > 0.0 && eta <= 1.0 {
        Ok(eta)
    } else {
        Err(Error::Efficiency(eta))
    }
}

impl DetectorModel {
    pub fn new(response: Arc<dyn DetectorResponse>, eta: f64) -> Result<Self> {
        Ok(Self {
            response,
            eta: check_eta(eta)?,
            overrides: BTreeMap::new(),
        })
    }

    pub fn on_off(eta: f64) -> Result<Self> {
        Self::new(Arc::new(OnOff), eta)
    }

    /// Looks the response up in the detector registry.
    pub fn by_name(name: &str, eta: f64) -> Result<Self> {
        Self::new(detector_responses().get(name)?, eta)
    }

    pub fn with_efficiency(mut self, mode: SpatialMode, eta: f64) -> Result<Self> {
        self.overrides.insert(mode, check_eta(eta)?);
        Ok(self)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_for(&self, mode: SpatialMode) -> f64 {
        self.overrides.get(&mode).copied().unwrap_or(self.eta)
    }

    pub fn response(&self) -> &dyn DetectorResponse {
        self.response.as_ref()
    }

    fn fire(&self, basis: &FockBasisState, mode: SpatialMode) -> f64 {
        self.response
            .fire_probability(basis.spatial_count(mode), self.eta_for(mode))
    }
}

/// Joint probability that every detector in `detected` fires.
pub fn click_probability(
    state: &StateVector,
    detected: &[SpatialMode],
    model: &DetectorModel,
) -> f64 {
    state
        .iter()
        .map(|(s, a)| a.norm_sqr() * detected.iter().map(|&m| model.fire(s, m)).product::<f64>())
        .sum()
}

/// Probability that an ON/OFF detector on `mode` stays silent.
pub fn no_click_probability(state: &StateVector, mode: SpatialMode, eta: f64) -> f64 {
    state
        .iter()
        .map(|(s, a)| a.norm_sqr() * OnOff::silent_probability(s.spatial_count(mode), eta))
        .sum()
}

/// Pair source settings: pair amplitude `gamma`, pump phase `phi_p`, and the
/// highest power of gamma kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpdcSource {
    pub gamma: f64,
    pub phi_p: f64,
    pub max_order: u32,
}

impl SpdcSource {
    pub fn new(gamma: f64, phi_p: f64, max_order: u32) -> Result<Self> {
        let s = Self {
            gamma,
            phi_p,
            max_order,
        };
        s.validate()?;
        Ok(s)
    }

    /// Truncated at gamma^3.
    pub fn with_gamma(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma = {} must be >= 0",
                self.gamma
            )));
        }
        if !self.phi_p.is_finite() {
            return Err(Error::InvalidArgument("pump phase must be finite".into()));
        }
        if self.max_order < 2 {
            return Err(Error::TruncationTooLow(self.max_order));
        }
        Ok(())
    }

    /// Forward normalization g = 1 - gamma^2.
    pub fn g(&self) -> f64 {
        1.0 - self.gamma * self.gamma
    }

    /// Backward normalization g1 = (1 - gamma^2/2)^2.
    pub fn g1(&self) -> f64 {
        let x = 1.0 - self.gamma * self.gamma / 2.0;
        x * x
    }

    fn phase(&self, order: u32) -> Complex64 {
        Complex64::from_polar(1.0, self.phi_p * order as f64)
    }
}

/// Forward pair emission split by order: entry n is
/// sqrt(g) gamma^n e^{i n phi} |n_H>_2 |n_H>_2'.
pub fn spdc_forward_sectors(src: &SpdcSource) -> Vec<StateVector> {
    let pre = src.g().sqrt();
    (0..=src.max_order)
        .map(|n| {
            let basis = FockBasisState::from_counts([(ANCILLA.h(), n), (HERALD.h(), n)]);
            StateVector::from_terms([(basis, src.phase(n) * (pre * src.gamma.powi(n as i32)))])
        })
        .collect()
}

/// Backward emission split by order. Two stacked crystals each emit with
/// amplitude gamma/sqrt2, one into H pairs and one into V pairs; the idler
/// polarization is then swapped. Order n collects
/// |a_V b_H>_0 |a_H b_V>_1 for a + b = n with weight (gamma/sqrt2)^n. Through
/// second order this is |vac> + gamma |W2> + gamma^2/2 |Lambda>.
pub fn spdc_backward_sectors(src: &SpdcSource) -> Vec<StateVector> {
    let pre = src.g1().sqrt();
    let x = src.gamma * FRAC_1_SQRT_2;
    (0..=src.max_order)
        .map(|n| {
            let weight = src.phase(n) * (pre * x.powi(n as i32));
            StateVector::from_terms((0..=n).map(|a| {
                let b = n - a;
                let basis = FockBasisState::from_counts([
                    (BELL_IDLER.v(), a),
                    (BELL_IDLER.h(), b),
                    (BELL_SIGNAL.h(), a),
                    (BELL_SIGNAL.v(), b),
                ]);
                (basis, weight)
            }))
        })
        .collect()
}

pub fn spdc_forward(src: &SpdcSource) -> StateVector {
    sum(spdc_forward_sectors(src))
}

pub fn spdc_backward(src: &SpdcSource) -> StateVector {
    sum(spdc_backward_sectors(src))
}

fn sum(sectors: impl IntoIterator<Item = StateVector>) -> StateVector {
    sectors
        .into_iter()
        .fold(StateVector::zero(), |acc, s| acc.add(&s))
}

/// Joint state of both passes, split by total order in gamma (entry t holds
/// every backward order i and forward order j with i + j = t).
pub fn combined_source_sectors(src: &SpdcSource) -> Result<Vec<StateVector>> {
    let back = spdc_backward_sectors(src);
    let fwd = spdc_forward_sectors(src);
    let mut sectors = vec![StateVector::zero(); src.max_order as usize + 1];
    for (i, b) in back.iter().enumerate() {
        for (j, f) in fwd.iter().enumerate() {
            if i + j <= src.max_order as usize {
                sectors[i + j] = sectors[i + j].add(&tensor(b, f)?);
            }
        }
    }
    Ok(sectors)
}

pub fn combined_source(src: &SpdcSource) -> Result<StateVector> {
    Ok(sum(combined_source_sectors(src)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceResult {
    /// Total four-fold probability, computed from the full state.
    pub p_c: f64,
    /// Contribution of the single-pair-per-pass component.
    pub p_t: f64,
    /// Contribution of every other component.
    pub p_f: f64,
    /// p_t / p_c; `None` when p_c is zero.
    pub ratio: Option<f64>,
}

fn through_gate(state: &StateVector, params: &PdbsParams) -> Result<StateVector> {
    let wiring = ModeAssignment::new(BELL_SIGNAL, ANCILLA, OUT3, OUT4)?;
    Ok(apply_hwp_v_phase(
        &apply_pdbs(state, params, &wiring)?,
        OUT4,
    ))
}

/// Four-fold coincidence probability on detectors 0, 3, 4, 2', split into
/// true (second-order source term) and false (everything else) parts.
pub fn fourfold_coincidence(
    src: &SpdcSource,
    model: &DetectorModel,
    params: &PdbsParams,
) -> Result<CoincidenceResult> {
    src.validate()?;
    if src.max_order < 3 {
        return Err(Error::TruncationTooLow(src.max_order));
    }
    let sectors = combined_source_sectors(src)?;
    let mut p_t = 0.0;
    let mut p_f = 0.0;
    for (order, sector) in sectors.iter().enumerate() {
        let p = click_probability(&through_gate(sector, params)?, &FOURFOLD_DETECTORS, model);
        if order == 2 {
            p_t += p;
        } else {
            p_f += p;
        }
    }
    let full = through_gate(&sum(sectors), params)?;
    let p_c = click_probability(&full, &FOURFOLD_DETECTORS, model);
    let ratio = (p_c > 0.0).then(|| (p_t / p_c).clamp(0.0, 1.0));
    Ok(CoincidenceResult {
        p_c,
        p_t,
        p_f,
        ratio,
    })
}

/// Fraction of four-fold events that are true coincidences, at ideal
/// beamsplitter parameters.
pub fn true_ratio(src: &SpdcSource, model: &DetectorModel) -> Result<f64> {
    fourfold_coincidence(src, model, &PdbsParams::ideal())?
        .ratio
        .ok_or(Error::ZeroCoincidence)
}

/// Closed-form true-coincidence probability
/// (1/2) g g1 gamma^4 eta^4 [2 mu (mu - 1) + 1].
pub fn closed_form_true(src: &SpdcSource, eta: f64, mu: f64) -> f64 {
    0.5 * src.g() * src.g1() * src.gamma.powi(4) * eta.powi(4) * (2.0 * mu * (mu - 1.0) + 1.0)
}

/// Closed-form false-coincidence probability through gamma^6,
/// (1/2) g g1 gamma^6 eta^4 (2-eta)^2 (1 + [mu (mu - 1) + 1]).
pub fn closed_form_false(src: &SpdcSource, eta: f64, mu: f64) -> f64 {
    let base = 0.5 * src.g() * src.g1() * src.gamma.powi(6) * eta.powi(4) * (2.0 - eta).powi(2);
    base + base * (mu * (mu - 1.0) + 1.0)
}

/// First-order true-coincidence ratio 1 - 3 gamma^2 (eta - 2)^2.
pub fn analytic_ratio(gamma: f64, eta: f64) -> f64 {
    1.0 - 3.0 * gamma * gamma * (eta - 2.0).powi(2)
}
