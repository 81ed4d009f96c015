//! Cavity optomechanics on truncated Fock spaces.
//!
//! Builds the standard, driven, damped and hybrid qubit-optomechanical
//! Hamiltonians as dense matrices, checks the operator identities that
//! connect them (rotating frames, polaron displacement, right-unitary
//! Susskind-Glogower transformations), and propagates closed and open
//! dynamics against independent closed-form results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod open_dynamics;
pub mod report;
pub mod sideband;
pub mod suites;
pub mod transforms;

pub use error::{Error, Result};
pub use fock::{HilbertSpace, OperatorMatrix, QuantumState, Subsystem};
pub use hamiltonians::ModelParams;
pub use report::DeviationReport;

pub type C64 = num_complex::Complex64;
