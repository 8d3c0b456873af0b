//! Linear steering witnesses read off dual certificates, their evaluation
//! on arbitrary data, a portable document format and threshold scans.
//!
//! A witness is a functional `β = c + Σ_i μ_i ⟨A_{x_i}^{ς_i} ⊗ B_i⟩` over
//! observable moments that is non-negative on every unsteerable
//! assemblage; a negative value on some data certifies steering.

mod document;
mod fixture;
mod scan;
mod witness;

pub use document::{witness_from_json, witness_to_json, WITNESS_SCHEMA_VERSION};
pub use fixture::{fixture_noon_source, photon_fixture_witness};
pub use scan::{threshold_scan, ScanPoint, ScanReport, ScanSpec};
pub use witness::{
    witness_from_detection, witness_from_dual, BobRef, Provenance, Witness, WitnessTerm,
};
