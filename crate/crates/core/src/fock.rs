//! Sparse occupation-number states over labeled polarization modes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Amplitudes smaller than this are dropped when states are built.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pol {
    H,
    V,
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pol::H => f.write_str("H"),
            Pol::V => f.write_str("V"),
        }
    }
}

/// Spatial mode label. `primed` distinguishes the heralding arm of a pair
/// source (2') from the mode it is paired with (2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpatialMode {
    pub index: u16,
    pub primed: bool,
}

impl SpatialMode {
    pub const fn new(index: u16) -> Self {
        Self {
            index,
            primed: false,
        }
    }

    pub const fn primed(index: u16) -> Self {
        Self {
            index,
            primed: true,
        }
    }

    pub const fn h(self) -> PolMode {
        PolMode {
            spatial: self,
            pol: Pol::H,
        }
    }

    pub const fn v(self) -> PolMode {
        PolMode {
            spatial: self,
            pol: Pol::V,
        }
    }
}

impl From<u16> for SpatialMode {
    fn from(index: u16) -> Self {
        Self::new(index)
    }
}

impl fmt::Display for SpatialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.index)
        } else {
            write!(f, "{}", self.index)
        }
    }
}

/// One bosonic mode. Ordering is (spatial, pol) with H < V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PolMode {
    pub spatial: SpatialMode,
    pub pol: Pol,
}

impl PolMode {
    pub fn new(spatial: impl Into<SpatialMode>, pol: Pol) -> Self {
        Self {
            spatial: spatial.into(),
            pol,
        }
    }
}

impl fmt::Display for PolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.pol, self.spatial)
    }
}

/// Occupation-number basis vector. Only nonzero counts are stored, so
/// structural equality is physical equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState {
    occupations: BTreeMap<PolMode, u32>,
}

impl FockBasisState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (PolMode, u32)>,
    {
        let mut state = Self::default();
        for (mode, n) in counts {
            state.add(mode, n);
        }
        state
    }

    pub fn count(&self, mode: PolMode) -> u32 {
        self.occupations.get(&mode).copied().unwrap_or(0)
    }

    /// Photons in a spatial mode, H and V summed.
    pub fn spatial_count(&self, spatial: SpatialMode) -> u32 {
        self.count(spatial.h()) + self.count(spatial.v())
    }

    pub fn total_photons(&self) -> u32 {
        self.occupations.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PolMode, u32)> + '_ {
        self.occupations.iter().map(|(m, n)| (*m, *n))
    }

    pub fn spatial_modes(&self) -> impl Iterator<Item = SpatialMode> + '_ {
        let mut last = None;
        self.occupations.keys().filter_map(move |m| {
            if last == Some(m.spatial) {
                None
            } else {
                last = Some(m.spatial);
                last
            }
        })
    }

    pub(crate) fn add(&mut self, mode: PolMode, n: u32) {
        if n > 0 {
            *self.occupations.entry(mode).or_insert(0) += n;
        }
    }

    pub(crate) fn remove_spatial(&mut self, spatial: SpatialMode) -> (u32, u32) {
        let h = self.occupations.remove(&spatial.h()).unwrap_or(0);
        let v = self.occupations.remove(&spatial.v()).unwrap_or(0);
        (h, v)
    }

    /// (-1)^n over photon count `n` in `mode`.
    pub(crate) fn parity(&self, mode: PolMode) -> f64 {
        if self.count(mode).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.occupations.is_empty() {
            return f.write_str("|vac>");
        }
        f.write_str("|")?;
        for (i, (mode, n)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", n, mode)?;
        }
        f.write_str(">")
    }
}

/// Sparse complex superposition of Fock basis states. Not necessarily
/// normalized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateVector {
    terms: BTreeMap<FockBasisState, Complex64>,
}

impl StateVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(FockBasisState::vacuum())
    }

    pub fn basis(state: FockBasisState) -> Self {
        Self::from_terms([(state, Complex64::new(1.0, 0.0))])
    }

    /// Collects terms, summing duplicates and pruning at [`DEFAULT_PRUNE_TOL`].
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (FockBasisState, Complex64)>,
    {
        let mut out = Self::zero();
        for (state, amp) in terms {
            out.accumulate(state, amp);
        }
        out.pruned_in_place(DEFAULT_PRUNE_TOL);
        out
    }

    pub(crate) fn accumulate(&mut self, state: FockBasisState, amp: Complex64) {
        *self.terms.entry(state).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub(crate) fn pruned_in_place(&mut self, tol: f64) {
        self.terms.retain(|_, a| a.norm() >= tol);
    }

    /// Number of stored basis terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, state: &FockBasisState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisState, &Complex64)> {
        self.terms.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, a)| (s.clone(), a * factor)))
    }

    /// Returns the state scaled to unit norm, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(Complex64::new(1.0 / n, 0.0)))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(s, a)| (s.clone(), *a)),
        )
    }

    /// Sorted, deduplicated list of spatial modes carrying photons in any term.
    pub fn spatial_modes(&self) -> Vec<SpatialMode> {
        let mut modes: Vec<SpatialMode> =
            self.terms.keys().flat_map(|s| s.spatial_modes()).collect();
        modes.sort();
        modes.dedup();
        modes
    }

    /// Maps each term through `f`, which returns the new basis state and a
    /// factor applied to the amplitude.
    pub(crate) fn map_terms<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&FockBasisState) -> (FockBasisState, Complex64),
    {
        Self::from_terms(self.terms.iter().map(|(s, a)| {
            let (t, factor) = f(s);
            (t, a * factor)
        }))
    }

    pub fn is_finite(&self) -> bool {
        self.terms
            .values()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (state, amp)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if amp.im == 0.0 {
                write!(f, "({:.6}){}", amp.re, state)?;
            } else {
                write!(f, "({:.6}{:+.6}i){}", amp.re, amp.im, state)?;
            }
        }
        Ok(())
    }
}

/// Required total photon count (H + V) per spatial mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountPattern {
    required: BTreeMap<SpatialMode, u32>,
}

impl CountPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn require(mut self, spatial: impl Into<SpatialMode>, count: u32) -> Self {
        self.required.insert(spatial.into(), count);
        self
    }

    /// One photon in each listed mode.
    pub fn singles<I, M>(modes: I) -> Self
    where
        I: IntoIterator<Item = M>,
        M: Into<SpatialMode>,
    {
        modes.into_iter().fold(Self::new(), |p, m| p.require(m, 1))
    }

    pub fn matches(&self, state: &FockBasisState) -> bool {
        self.required
            .iter()
            .all(|(m, n)| state.spatial_count(*m) == *n)
    }

    pub fn modes(&self) -> impl Iterator<Item = SpatialMode> + '_ {
        self.required.keys().copied()
    }
}

/// Basis state with the given occupations.
pub fn fock_state(counts: &[(PolMode, u32)]) -> StateVector {
    StateVector::basis(FockBasisState::from_counts(counts.iter().copied()))
}

/// Applies the creation operator for `mode`: n -> n+1 with factor sqrt(n+1).
pub fn create_photon(state: &StateVector, mode: PolMode) -> StateVector {
    state.map_terms(|s| {
        let n = s.count(mode);
        let mut t = s.clone();
        t.add(mode, 1);
        (t, Complex64::new(((n + 1) as f64).sqrt(), 0.0))
    })
}

/// <a|b>, conjugate-linear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Complex64 {
    let (small, large, conj_small) = if a.len() <= b.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    small
        .iter()
        .filter_map(|(s, x)| {
            let y = large.terms.get(s)?;
            Some(if conj_small {
                x.conj() * y
            } else {
                y.conj() * x
            })
        })
        .sum()
}

/// Tensor product of states on disjoint spatial modes.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let left = a.spatial_modes();
    let right = b.spatial_modes();
    if let Some(m) = left.iter().find(|m| right.contains(m)) {
        return Err(Error::LabelConflict(*m));
    }
    let mut out = StateVector::zero();
    for (sa, xa) in a.iter() {
        for (sb, xb) in b.iter() {
            let mut s = sa.clone();
            for (mode, n) in sb.iter() {
                s.add(mode, n);
            }
            out.accumulate(s, xa * xb);
        }
    }
    out.pruned_in_place(DEFAULT_PRUNE_TOL);
    Ok(out)
}

/// Keeps the terms whose per-spatial-mode photon totals match `pattern`.
/// The squared norm of the result is the post-selection probability for a
/// normalized input.
pub fn project_counts(state: &StateVector, pattern: &CountPattern) -> StateVector {
    StateVector {
        terms: state
            .terms
            .iter()
            .filter(|(s, _)| pattern.matches(s))
            .map(|(s, a)| (s.clone(), *a))
            .collect(),
    }
}

/// Drops terms with |amplitude| < `tol`.
pub fn prune(state: &StateVector, tol: f64) -> StateVector {
    let mut out = state.clone();
    out.pruned_in_place(tol.max(0.0));
    out
}
