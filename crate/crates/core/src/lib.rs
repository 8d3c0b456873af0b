//! EPR steering detection with moment-matrix hierarchies.
//!
//! The pipeline turns a set of operator strings into a moment matrix whose
//! entries are either pinned by observed moments or left as free parameters,
//! decides positive-semidefinite completability with a semidefinite program,
//! and reads a portable linear steering witness off the dual certificate.
//!
//! Modules, bottom-up:
//! - [`operators`]: complex operator algebra and standard observables;
//! - [`scenarios`]: states, measurements, assemblages and local-hidden-state
//!   models used as ground truth;
//! - [`moments`]: string sets and the moment-matrix template compiler;
//! - [`sdp`]: the eigenvalue-maximization program and its interior-point solver;
//! - [`witnesses`]: dual-derived witnesses, evaluation and threshold scans;
//! - [`analytic`]: closed-form criteria used as independent oracles;
//! - [`pipeline`]: the end-to-end detection decision;
//! - [`cli`]: configuration, reports and the command front end.

pub mod analytic;
pub mod cli;
pub mod error;
mod linalg;
pub mod moments;
pub mod operators;
pub mod pipeline;
pub mod scenarios;
pub mod sdp;
pub mod tolerances;
pub mod witnesses;

pub use error::{Error, Result};
