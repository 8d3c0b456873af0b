use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::min_eigenvalue_hermitian;
use crate::tolerances;

use super::ipm::{SdpSolution, SolveStatus};
use super::problem::SdpProblem;

/// Independently recomputed dual-feasibility quantities.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Smallest eigenvalue of `Z`.
    pub z_min_eigenvalue: f64,
    /// `|Tr Z − 1|`.
    pub trace_error: f64,
    /// `max_k |Tr[Z F_k]|`.
    pub max_free_residual: f64,
    /// Recomputed `β = Tr[Z Γ_obs]`.
    pub beta: f64,
    /// `|β − Σ_o μ_o b_o|` (zero when no pins are recorded).
    pub pin_residual: f64,
    /// `β − λ⋆`.
    pub duality_gap: f64,
}

/// Re-verifies a solution's dual certificate from the problem data alone.
///
/// A passing certificate proves `λ⋆ ≤ β` without trusting the solver:
/// for any `t`, `λ_min(Γ(t)) ≤ Tr[Z Γ(t)] = Tr[Z Γ_obs] = β`.
pub fn certify(solution: &SdpSolution, problem: &SdpProblem) -> Result<Certificate> {
    if solution.status != SolveStatus::Optimal {
        return Err(Error::Certificate("solution is not optimal".into()));
    }
    let z = &solution.z;
    if z.shape() != (problem.k(), problem.k()) {
        return Err(Error::Certificate("dual matrix has the wrong shape".into()));
    }
    let z_min_eigenvalue = min_eigenvalue_hermitian(z);
    let trace_error = (z.trace().re - 1.0).abs();
    let max_free_residual = problem
        .free_dirs()
        .iter()
        .map(|f| (z * f).trace().norm())
        .fold(0.0, f64::max);
    let beta = (z * problem.gamma_obs()).trace().re;
    let pin_residual = if problem.pins().is_empty() {
        0.0
    } else {
        let s: f64 = problem
            .pins()
            .iter()
            .map(|(b, p)| b * (z * p).trace().re)
            .sum();
        (beta - s).abs()
    };
    let duality_gap = beta - solution.lambda_star;
    let cert = Certificate {
        z_min_eigenvalue,
        trace_error,
        max_free_residual,
        beta,
        pin_residual,
        duality_gap,
    };
    if z_min_eigenvalue < -tolerances::CERT_PSD {
        return Err(Error::Certificate(format!(
            "Z has eigenvalue {z_min_eigenvalue:.3e}"
        )));
    }
    if trace_error > tolerances::CERT_TRACE {
        return Err(Error::Certificate(format!(
            "|Tr Z − 1| = {trace_error:.3e}"
        )));
    }
    if max_free_residual > tolerances::CERT_FREE {
        return Err(Error::Certificate(format!(
            "|Tr[Z F_k]| = {max_free_residual:.3e}"
        )));
    }
    if pin_residual > tolerances::CERT_GAP {
        return Err(Error::Certificate(format!(
            "|β − Σ μ b| = {pin_residual:.3e}"
        )));
    }
    if duality_gap.abs() > tolerances::CERT_GAP {
        return Err(Error::Certificate(format!("duality gap {duality_gap:.3e}")));
    }
    Ok(cert)
}
