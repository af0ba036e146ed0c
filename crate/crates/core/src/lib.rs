//! Finite-size and thermodynamic-limit toolkit for the integrable J1-J2 spin
//! chain with antiperiodic (twisted) boundary.

pub mod bae;
pub mod bands;
pub mod error;
pub mod hamiltonian;
pub mod kink;
pub mod linalg;
pub mod operator;
pub mod params;
pub mod pauli;
pub mod rmatrix;
pub mod roots;
pub mod scaling;
pub mod sparse;
pub mod spectrum;
pub mod thermo;
pub mod transfer;

pub use error::{Error, Result};
pub use operator::{MatrixKind, OperatorMatrix};
pub use params::{Couplings, ModelParams, Regime};

pub use faer::c64;
