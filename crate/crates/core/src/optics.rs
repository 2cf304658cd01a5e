//! Polarization-dependent beamsplitter and half-wave-plate phase flip.
//!
//! Creation operators on the two input ports are rewritten in terms of the
//! output ports. For polarization P with effective transmission t:
//!
//! ```text
//! a+(in1,P) =  sqrt(1-t) a+(out3,P) - sqrt(t)   a+(out4,P)
//! a+(in2,P) =  sqrt(t)   a+(out3,P) + sqrt(1-t) a+(out4,P)
//! ```
//!
//! with t = mu + delta_h for H and t = nu + delta_v for V.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{create_photon, Pol, PolMode, SpatialMode, StateVector, DEFAULT_PRUNE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdbsParams {
    /// Transmission coefficient for H.
    pub mu: f64,
    /// Transmission coefficient for V.
    pub nu: f64,
    /// Additive deviation of `mu`.
    pub delta_h: f64,
    /// Additive deviation of `nu`.
    pub delta_v: f64,
}

impl PdbsParams {
    pub fn new(mu: f64, nu: f64) -> Self {
        Self {
            mu,
            nu,
            delta_h: 0.0,
            delta_v: 0.0,
        }
    }

    /// The weight-equalizing point: mu = (5 - sqrt5)/10, nu = (5 + sqrt5)/10.
    pub fn ideal() -> Self {
        let s5 = 5f64.sqrt();
        Self::new((5.0 - s5) / 10.0, (5.0 + s5) / 10.0)
    }

    /// Ideal parameters shifted by `delta_h` (H) and `delta_v` (V).
    pub fn deviated(delta_h: f64, delta_v: f64) -> Self {
        Self {
            delta_h,
            delta_v,
            ..Self::ideal()
        }
    }

    pub fn mu_eff(&self) -> f64 {
        self.mu + self.delta_h
    }

    pub fn nu_eff(&self) -> f64 {
        self.nu + self.delta_v
    }

    pub fn transmission(&self, pol: Pol) -> f64 {
        match pol {
            Pol::H => self.mu_eff(),
            Pol::V => self.nu_eff(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, x: f64| {
            if x.is_finite() && (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::ParameterRange(format!("{name} = {x} not in [0, 1]")))
            }
        };
        check("mu", self.mu)?;
        check("nu", self.nu)?;
        check("mu + delta_h", self.mu_eff())?;
        check("nu + delta_v", self.nu_eff())
    }

    /// Amplitude matrix `[input][output]` for one polarization: row 0 is
    /// input port 1, row 1 input port 2; column 0 output port 3, column 1
    /// output port 4.
    pub fn coupling(&self, pol: Pol) -> [[f64; 2]; 2] {
        let t = self.transmission(pol);
        let (r, s) = (t.sqrt(), (1.0 - t).sqrt());
        [[s, -r], [r, s]]
    }
}

pub fn ideal_params() -> PdbsParams {
    PdbsParams::ideal()
}

/// Port wiring of one beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeAssignment {
    pub in1: SpatialMode,
    pub in2: SpatialMode,
    pub out3: SpatialMode,
    pub out4: SpatialMode,
}

impl ModeAssignment {
    pub fn new(
        in1: impl Into<SpatialMode>,
        in2: impl Into<SpatialMode>,
        out3: impl Into<SpatialMode>,
        out4: impl Into<SpatialMode>,
    ) -> Result<Self> {
        let a = Self {
            in1: in1.into(),
            in2: in2.into(),
            out3: out3.into(),
            out4: out4.into(),
        };
        let all = [a.in1, a.in2, a.out3, a.out4];
        for (i, m) in all.iter().enumerate() {
            if all[..i].contains(m) {
                return Err(Error::ModeAssignment(*m));
            }
        }
        Ok(a)
    }

    /// Modes 1, 2 -> 3, 4.
    pub fn standard() -> Self {
        Self::new(1u16, 2u16, 3u16, 4u16).expect("distinct labels")
    }

    pub fn outputs(&self) -> [SpatialMode; 2] {
        [self.out3, self.out4]
    }
}

/// A way of computing the multi-photon action of the beamsplitter.
pub trait BeamsplitterMethod: Send + Sync {
    fn name(&self) -> &'static str;

    /// Transforms `state`. Parameters and wiring are already validated and the
    /// output ports are empty in every term.
    fn transform(
        &self,
        state: &StateVector,
        params: &PdbsParams,
        modes: &ModeAssignment,
    ) -> StateVector;
}

/// Substitutes each input creation operator by its output combination and
/// re-expands in the Fock basis.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonomialSubstitution;

impl BeamsplitterMethod for MonomialSubstitution {
    fn name(&self) -> &'static str {
        "monomial"
    }

    fn transform(
        &self,
        state: &StateVector,
        params: &PdbsParams,
        modes: &ModeAssignment,
    ) -> StateVector {
        let mut out = StateVector::zero();
        for (basis, amp) in state.iter() {
            let mut rest = basis.clone();
            let (h1, v1) = rest.remove_spatial(modes.in1);
            let (h2, v2) = rest.remove_spatial(modes.in2);

            // |n> = (a+)^n / sqrt(n!) |vac>
            let norm: f64 = [h1, v1, h2, v2].iter().map(|&n| factorial(n)).product();
            let mut acc = StateVector::from_terms([(rest, amp / norm.sqrt())]);

            for (pol, port, n) in [
                (Pol::H, 0, h1),
                (Pol::V, 0, v1),
                (Pol::H, 1, h2),
                (Pol::V, 1, v2),
            ] {
                let row = params.coupling(pol)[port];
                let targets = [
                    PolMode {
                        spatial: modes.out3,
                        pol,
                    },
                    PolMode {
                        spatial: modes.out4,
                        pol,
                    },
                ];
                for _ in 0..n {
                    let mut next = StateVector::zero();
                    for (coef, target) in row.iter().zip(targets) {
                        if *coef == 0.0 {
                            continue;
                        }
                        for (s, a) in create_photon(&acc, target).iter() {
                            next.accumulate(s.clone(), a * coef);
                        }
                    }
                    acc = next;
                }
            }
            for (s, a) in acc.iter() {
                out.accumulate(s.clone(), *a);
            }
        }
        out.pruned_in_place(DEFAULT_PRUNE_TOL);
        out
    }
}

/// Computes each output amplitude as a permanent of the repeated-row,
/// repeated-column coupling submatrix, normalized by the occupation
/// factorials.
#[derive(Debug, Clone, Copy, Default)]
pub struct PermanentExpansion;

impl PermanentExpansion {
    /// Output amplitudes `(m3, m4, amplitude)` for n1 photons entering port
    /// 1 and n2 port 2, all of one polarization.
    fn single_pol(coupling: &[[f64; 2]; 2], n1: u32, n2: u32) -> Vec<(u32, u32, f64)> {
        let n = n1 + n2;
        let rows: Vec<usize> = std::iter::repeat_n(0, n1 as usize)
            .chain(std::iter::repeat_n(1, n2 as usize))
            .collect();
        (0..=n)
            .map(|m3| {
                let m4 = n - m3;
                let cols: Vec<usize> = std::iter::repeat_n(0, m3 as usize)
                    .chain(std::iter::repeat_n(1, m4 as usize))
                    .collect();
                let sub: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| coupling[r][c]).collect())
                    .collect();
                let denom = (factorial(n1) * factorial(n2) * factorial(m3) * factorial(m4)).sqrt();
                (m3, m4, permanent(&sub) / denom)
            })
            .collect()
    }
}

impl BeamsplitterMethod for PermanentExpansion {
    fn name(&self) -> &'static str {
        "permanent"
    }

    fn transform(
        &self,
        state: &StateVector,
        params: &PdbsParams,
        modes: &ModeAssignment,
    ) -> StateVector {
        let mut out = StateVector::zero();
        for (basis, amp) in state.iter() {
            let mut rest = basis.clone();
            let (h1, v1) = rest.remove_spatial(modes.in1);
            let (h2, v2) = rest.remove_spatial(modes.in2);
            let hs = Self::single_pol(&params.coupling(Pol::H), h1, h2);
            let vs = Self::single_pol(&params.coupling(Pol::V), v1, v2);
            for &(h3, h4, ah) in &hs {
                for &(v3, v4, av) in &vs {
                    let mut s = rest.clone();
                    s.add(modes.out3.h(), h3);
                    s.add(modes.out4.h(), h4);
                    s.add(modes.out3.v(), v3);
                    s.add(modes.out4.v(), v4);
                    out.accumulate(s, amp * (ah * av));
                }
            }
        }
        out.pruned_in_place(DEFAULT_PRUNE_TOL);
        out
    }
}

/// Permanent by Ryser's inclusion-exclusion formula.
pub fn permanent(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for subset in 1u64..(1u64 << n) {
        let mut prod = 1.0;
        for row in m {
            let s: f64 = (0..n)
                .filter(|j| subset & (1 << j) != 0)
                .map(|j| row[j])
                .sum();
            prod *= s;
        }
        let sign = if (n as u32 - subset.count_ones()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += sign * prod;
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Beamsplitter action using the default method (monomial substitution).
pub fn apply_pdbs(
    state: &StateVector,
    params: &PdbsParams,
    modes: &ModeAssignment,
) -> Result<StateVector> {
    apply_pdbs_with(&MonomialSubstitution, state, params, modes)
}

pub fn apply_pdbs_with(
    method: &dyn BeamsplitterMethod,
    state: &StateVector,
    params: &PdbsParams,
    modes: &ModeAssignment,
) -> Result<StateVector> {
    params.validate()?;
    for out in modes.outputs() {
        if state.iter().any(|(s, _)| s.spatial_count(out) > 0) {
            return Err(Error::LabelConflict(out));
        }
    }
    Ok(method.transform(state, params, modes))
}

/// Half-wave plate compensation: multiplies each term by (-1)^(n_V) of the
/// given spatial mode.
pub fn apply_hwp_v_phase(state: &StateVector, spatial: impl Into<SpatialMode>) -> StateVector {
    let mode = spatial.into().v();
    state.map_terms(|s| (s.clone(), Complex64::new(s.parity(mode), 0.0)))
}
