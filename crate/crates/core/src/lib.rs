//! Two qubits sharing a lossy cavity reservoir: free and measurement-interrupted
//! dynamics, perturbative Zeno rates, and two-qubit correlation measures.

pub mod analytics;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod quadrature;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
pub use model::{
    build_initial, reduce_to_xstate, AmplitudeState, FullDensity, InitialState, LorentzianSpectrum,
    PhysicalParams, Qubit, XStateDensity,
};
