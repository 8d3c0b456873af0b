//! Closed-form steering criteria, used as standalone detectors and as
//! independent oracles for the semidefinite pipeline.
//!
//! Boundary convention: the criteria are necessary conditions for
//! unsteerability, so steering is reported only on strict violation
//! (tolerance 1e-12 for closed forms, 1e-10 for eigenvalue tests).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{min_eigenvalue_hermitian, CMatrix, C64, I, ZERO};
use crate::scenarios::GaussianStdForm;
use crate::tolerances;

/// Value of a criterion and whether it signals steering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    /// The criterion's test quantity.
    pub value: f64,
    /// Strict violation of the unsteerability bound.
    pub steering: bool,
}

/// Observed correlations `⟨A0⊗X⟩`, `⟨A1⊗Y⟩`, `⟨A2⊗Z⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliCorrelations {
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
}

impl PauliCorrelations {
    /// Validates that each correlation lies in `[−1, 1]`.
    pub fn new(cxx: f64, cyy: f64, czz: f64) -> Result<Self> {
        for v in [cxx, cyy, czz] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "correlation {v} outside [-1, 1]"
                )));
            }
        }
        Ok(Self { cxx, cyy, czz })
    }

    /// Werner-state correlations `(−w, −w, −w)`.
    pub fn werner(w: f64) -> Result<Self> {
        Self::new(-w, -w, -w)
    }
}

/// Linear three-setting witness: `cxx + cyy + czz ≥ −√3` for unsteerable
/// data.
pub fn pauli_linear_witness(c: &PauliCorrelations) -> CriterionResult {
    let value = c.cxx + c.cyy + c.czz;
    CriterionResult {
        value,
        steering: value < -(3f64.sqrt()) - tolerances::CLOSED_FORM,
    }
}

/// Nonlinear three-setting criterion: `cxx² + cyy² + czz² ≤ 1` for
/// unsteerable data.
pub fn pauli_nonlinear_criterion(c: &PauliCorrelations) -> CriterionResult {
    let value = c.cxx * c.cxx + c.cyy * c.cyy + c.czz * c.czz;
    CriterionResult {
        value,
        steering: value > 1.0 + tolerances::CLOSED_FORM,
    }
}

/// Two-setting criteria `1 − c_i² − c_j² ≥ 0` for the pairs
/// `(Y, Z)`, `(X, Z)`, `(X, Y)`, in that order.
pub fn pauli_two_setting_criteria(c: &PauliCorrelations) -> [CriterionResult; 3] {
    let f = |u: f64, v: f64| {
        let value = 1.0 - u * u - v * v;
        CriterionResult {
            value,
            steering: value < -tolerances::CLOSED_FORM,
        }
    };
    [f(c.cyy, c.czz), f(c.cxx, c.czz), f(c.cxx, c.cyy)]
}

fn physical(g: &GaussianStdForm) -> Result<()> {
    if !g.is_physical() {
        return Err(Error::InvalidParameter(
            "unphysical Gaussian standard form".into(),
        ));
    }
    Ok(())
}

/// `det γ̃ − det Ã = (ab − c1²)(ab − c2²) − a² ≥ 0` for unsteerable data.
pub fn gaussian_det_criterion(g: &GaussianStdForm) -> Result<CriterionResult> {
    physical(g)?;
    let GaussianStdForm { a, b, c1, c2 } = *g;
    let value = (a * b - c1 * c1) * (a * b - c2 * c2) - a * a;
    let scale = (a * b).powi(2).max(1.0);
    Ok(CriterionResult {
        value,
        steering: value < -tolerances::CLOSED_FORM * scale,
    })
}

/// `γ̃ + i(0_A ⊕ Ω_B) ⪰ 0` for unsteerable data; the value is the smallest
/// eigenvalue.
pub fn gaussian_wiseman_criterion(g: &GaussianStdForm) -> Result<CriterionResult> {
    physical(g)?;
    let cov = g.covariance();
    let mut m = CMatrix::from_fn(4, 4, |i, j| C64::new(cov[(i, j)], 0.0));
    m[(2, 3)] += I;
    m[(3, 2)] -= I;
    let value = min_eigenvalue_hermitian(&m);
    Ok(CriterionResult {
        value,
        steering: value < -tolerances::EIGEN_CRITERION,
    })
}

/// The moment matrix over `{A0⊗1, A1⊗1, 1⊗q, 1⊗p}` with the unobservable
/// `R = ⟨A0 A1⟩`, up to a positive factor:
/// `[[a, R, c1, 0], [R, a, 0, c2], [c1, 0, b, i], [0, c2, −i, b]]`.
pub fn gaussian_moment_matrix(g: &GaussianStdForm, r: f64) -> CMatrix {
    let re = |v: f64| C64::new(v, 0.0);
    let GaussianStdForm { a, b, c1, c2 } = *g;
    CMatrix::from_row_slice(
        4,
        4,
        &[
            re(a),
            re(r),
            re(c1),
            ZERO,
            re(r),
            re(a),
            ZERO,
            re(c2),
            re(c1),
            ZERO,
            re(b),
            I,
            ZERO,
            re(c2),
            -I,
            re(b),
        ],
    )
}

/// Whether some real `R` makes [`gaussian_moment_matrix`] positive
/// semidefinite.
///
/// The set of good `R` is convex and symmetric under `R ↦ −R` (conjugating
/// by `diag(1, −1, 1, −1)` and complex conjugation maps `Γ_R` to `Γ_{−R}`),
/// so it is nonempty iff `R = 0` works. That is decided by the principal
/// minors of `Γ_0`, all of which must be non-negative.
pub fn gaussian_exists_r(g: &GaussianStdForm) -> bool {
    let m = gaussian_moment_matrix(g, 0.0);
    let scale = m.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    for mask in 1u32..16 {
        let idx: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        let det = sub.determinant().re;
        if det < -tolerances::CLOSED_FORM * scale.powi(idx.len() as i32) {
            return false;
        }
    }
    true
}

/// Grid cross-check of [`gaussian_exists_r`]: the smallest eigenvalue of
/// `Γ_R` over `R ∈ [−span, span]` at `n` points, maximized.
pub fn gaussian_best_r_on_grid(g: &GaussianStdForm, span: f64, n: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let r = if n == 1 {
            0.0
        } else {
            -span + 2.0 * span * k as f64 / (n - 1) as f64
        };
        let v = min_eigenvalue_hermitian(&gaussian_moment_matrix(g, r));
        if v > best.0 {
            best = (v, r);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::two_mode_squeezed_std_form;

    #[test]
    fn pauli_examples() {
        let w = PauliCorrelations::werner(0.5).unwrap();
        assert!(!pauli_linear_witness(&w).steering);
        assert!(!pauli_nonlinear_criterion(&w).steering);
        let e = PauliCorrelations::new(-1.0, -1.0, -1.0).unwrap();
        assert!(pauli_linear_witness(&e).steering);
        assert!(
            !pauli_nonlinear_criterion(&PauliCorrelations::new(1.0, 0.0, 0.0).unwrap()).steering
        );
        assert!(
            pauli_nonlinear_criterion(&PauliCorrelations::new(0.8, 0.8, 0.0).unwrap()).steering
        );
        let two = pauli_two_setting_criteria(&PauliCorrelations::new(0.0, 1.0, 0.0).unwrap());
        assert_eq!(two.iter().filter(|r| r.value == 0.0).count(), 2);
        let d = PauliCorrelations::new(0.6, 0.6, 0.6).unwrap();
        assert!(pauli_two_setting_criteria(&d).iter().all(|r| !r.steering));
        assert!(pauli_nonlinear_criterion(&d).steering);
        assert!(PauliCorrelations::new(1.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_examples() {
        let vac = two_mode_squeezed_std_form(0.0).unwrap();
        let det = gaussian_det_criterion(&vac).unwrap();
        assert!(det.value.abs() < 1e-12 && !det.steering);
        assert!(!gaussian_wiseman_criterion(&vac).unwrap().steering);
        for r in [0.3, 0.4, 0.5] {
            let g = two_mode_squeezed_std_form(r).unwrap();
            assert!(gaussian_det_criterion(&g).unwrap().steering);
            assert!(gaussian_wiseman_criterion(&g).unwrap().steering);
            assert!(!gaussian_exists_r(&g));
            assert!(gaussian_best_r_on_grid(&g, 5.0, 201).0 < 0.0);
        }
        let unc = GaussianStdForm::new(2.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(gaussian_det_criterion(&unc).unwrap().value, 12.0);
        assert!(gaussian_exists_r(&unc));
        assert!(min_eigenvalue_hermitian(&gaussian_moment_matrix(&unc, 0.0)) >= 0.0);
    }

    #[test]
    fn det_condition_is_the_determinant_at_zero() {
        let g = GaussianStdForm::new(3.0, 2.5, 1.2, -0.7).unwrap();
        let det = gaussian_moment_matrix(&g, 0.0).determinant().re;
        assert!((det - gaussian_det_criterion(&g).unwrap().value).abs() < 1e-10);
    }
}
