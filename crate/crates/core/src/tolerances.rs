//! Numerical tolerances used across the crate, collected in one place so
//! that every threshold decision can be audited.

/// Absolute entrywise tolerance for Hermiticity checks.
pub const HERMITIAN: f64 = 1e-10;

/// Eigenvalue gap below which spectral projectors are merged.
pub const EIGEN_MERGE: f64 = 1e-8;

/// Maximum residual norm accepted when expanding an operator in a basis.
pub const EXPANSION_RESIDUAL: f64 = 1e-9;

/// Expansion coefficients below this magnitude are snapped to zero.
pub const COEFF_SNAP: f64 = 1e-12;

/// Relative singular-value threshold used for rank decisions.
pub const RANK: f64 = 1e-9;

/// Default duality-gap tolerance of the semidefinite solver.
pub const SDP_DEFAULT: f64 = 1e-8;

/// Default iteration cap of the semidefinite solver.
pub const SDP_MAX_ITER: usize = 200;

/// A sign decision on the optimal eigenvalue is only taken outside
/// `±DECISION_BAND_FACTOR · tol`.
pub const DECISION_BAND_FACTOR: f64 = 10.0;

/// Dual feasibility tolerance: minimum eigenvalue of the dual matrix.
pub const CERT_PSD: f64 = 1e-8;

/// Dual feasibility tolerance: unit trace of the dual matrix.
pub const CERT_TRACE: f64 = 1e-8;

/// Dual feasibility tolerance: orthogonality to every free direction.
pub const CERT_FREE: f64 = 1e-7;

/// Agreement tolerance between the certified bound and the pinned-moment sum,
/// and the accepted duality gap.
pub const CERT_GAP: f64 = 1e-6;

/// Closed-form criteria classify equality as "no steering" up to this slack.
pub const CLOSED_FORM: f64 = 1e-12;

/// Slack for eigenvalue-based closed-form criteria.
pub const EIGEN_CRITERION: f64 = 1e-10;

/// Eigenvalues of the fully pinned data block below this fraction of its
/// spectral norm are treated as an exact kernel.
pub const DATA_KERNEL: f64 = 1e-9;
