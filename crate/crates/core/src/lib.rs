//! Simulation of a linear-optical gate that grows a polarization-encoded
//! photonic W state by one photon.
//!
//! The gate mixes one photon of the W state with an H-polarized ancilla on a
//! polarization-dependent beamsplitter and keeps the events with one photon
//! in each output. The crate covers the ideal gate ([`wgate`]), realistic
//! threshold detection with multi-pair sources ([`detection`]), and scans
//! over beamsplitter imperfections ([`analysis`]).
//!
//! Beamsplitter algorithms and detector responses are strategies looked up
//! by name in [`registry`].

pub mod analysis;
pub mod detection;
pub mod error;
pub mod fock;
pub mod optics;
pub mod registry;
pub mod selfcheck;
pub mod wgate;

pub use error::{Error, Result};
pub use fock::{CountPattern, FockBasisState, Pol, PolMode, SpatialMode, StateVector};
pub use optics::{ModeAssignment, PdbsParams};
pub use wgate::{GateOutcome, WStateSpec};
