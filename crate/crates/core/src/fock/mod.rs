//! Truncated Fock-space linear algebra.
//!
//! Operators are dense complex matrices on `qubit ⊗ cavity ⊗ mech`, with the
//! qubit factor present only for the hybrid model.

mod displacement;
mod expm;
mod factors;
pub mod linalg;
mod operator;
mod space;
mod special;
mod states;

pub use displacement::{
    displacement, displacement_conditioned, displacement_conditioned_with, displacement_factor, mech_headroom,
    DisplacementMethod,
};
pub use expm::{expm, expm_blocked, expm_matrix};
pub use factors::{
    annihilation, creation, diagonal, embed, ladder_operators, number, number_function, pauli_operators, qubit,
    sg_lowering, susskind_glogower, Ladder, Pauli, SusskindGlogower,
};
pub use operator::OperatorMatrix;
pub use space::{HilbertSpace, Subsystem};
pub use special::{laguerre, ln_factorial};
pub use states::{product_density, thermal_factor, thermal_weights, QuantumState, StateData};
