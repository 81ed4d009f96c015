//! Lindblad dynamics: generators, the displaced damped model, fixed-step
//! propagation and the closed-form damped oscillator.

mod closed;
mod damped;
mod generator;
mod propagate;

pub use closed::{rk4_schrodinger, HamiltonianFlow, HamiltonianSource, KetSeries};
pub use damped::{
    closed_form_damped, closed_form_damped_ordered, displaced_master_generator, displaced_master_generator_with,
    field_reduction_residual, free_damped_generator, original_damped_generator, thermal_reduction_residual,
    ClosedFormOrdering, DampedModelParams, DephasingCoefficient,
};
pub use generator::{lindblad_apply, CrossTerm, LindbladGenerator, Liouvillian};
pub use propagate::{rk4_propagate, PropagationOptions, TimeSeries};
