//! States, measurements, assemblages and local-hidden-state models.
//!
//! Besides the physical scenario library (Werner states, lossy N00N states,
//! Gaussian standard forms) this module hosts the ground-truth oracle for
//! unsteerable data: random local-hidden-state models and their realization
//! as a separable state measured with commuting observables.

mod assemblage;
mod gaussian;
mod io;
mod lhs;
mod measurement;
mod state;

pub use assemblage::{
    conditional_assemblage, joint_moment, Assemblage, AssemblageInput, MomentData,
};
pub use gaussian::{two_mode_squeezed_std_form, GaussianStdForm};
pub use io::{assemblage_from_json, assemblage_to_json, AssemblageDoc};
pub use lhs::{
    build_separable_model, build_separable_model_with_cap, default_labels, random_lhs_model,
    random_unsteerable_assemblage, LhsModel, LhsSpec, SeparableModel, DEFAULT_ALICE_DIM_CAP,
};
pub use measurement::{measurement_from_observable, ProjectiveMeasurement};
pub use state::{lossy_noon_state, werner_state, QuantumState};
