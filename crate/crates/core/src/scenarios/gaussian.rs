use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::{min_eigenvalue_hermitian, CMatrix, C64};

/// Standard-form two-mode covariance matrix
/// `γ̃ = [[a,0,c1,0],[0,a,0,c2],[c1,0,b,0],[0,c2,0,b]]` in the ordering
/// `(q_A, p_A, q_B, p_B)`, with the vacuum normalized to the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianStdForm {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl GaussianStdForm {
    /// Validates physicality `γ̃ + iΩ ⪰ −1e-9` and `b ≥ 1`.
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        let g = Self { a, b, c1, c2 };
        if !g.is_physical() {
            return Err(Error::InvalidParameter(format!(
                "unphysical standard form (a={a}, b={b}, c1={c1}, c2={c2})"
            )));
        }
        Ok(g)
    }

    /// Physicality check without constructing.
    pub fn is_physical(&self) -> bool {
        [self.a, self.b, self.c1, self.c2]
            .iter()
            .all(|v| v.is_finite())
            && self.b * self.b >= 1.0 - 1e-9
            && min_eigenvalue_hermitian(&self.uncertainty_matrix()) >= -1e-9
    }

    /// The real covariance matrix `γ̃`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let Self { a, b, c1, c2 } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, c1, 0.0, //
                0.0, a, 0.0, c2, //
                c1, 0.0, b, 0.0, //
                0.0, c2, 0.0, b,
            ],
        )
    }

    /// `γ̃ + i(Ω_A ⊕ Ω_B)` with `Ω = [[0,1],[−1,0]]`.
    pub fn uncertainty_matrix(&self) -> CMatrix {
        let mut m = self.covariance().map(|x| C64::new(x, 0.0));
        for k in [0usize, 2] {
            m[(k, k + 1)] += C64::new(0.0, 1.0);
            m[(k + 1, k)] -= C64::new(0.0, 1.0);
        }
        m
    }

    /// `det γ̃ = (ab − c1²)(ab − c2²)`.
    pub fn det_gamma(&self) -> f64 {
        (self.a * self.b - self.c1 * self.c1) * (self.a * self.b - self.c2 * self.c2)
    }
}

/// Two-mode squeezed vacuum: `a = b = cosh 2r`, `c1 = −c2 = sinh 2r`.
pub fn two_mode_squeezed_std_form(r: f64) -> Result<GaussianStdForm> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "squeezing r = {r} must be non-negative"
        )));
    }
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    Ok(GaussianStdForm {
        a: c,
        b: c,
        c1: s,
        c2: -s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squeezed_family() {
        let g = two_mode_squeezed_std_form(0.0).unwrap();
        assert_eq!(
            g,
            GaussianStdForm {
                a: 1.0,
                b: 1.0,
                c1: 0.0,
                c2: 0.0
            }
        );
        for r in [0.0, 0.1, 0.5, 1.0, 1.5] {
            let g = two_mode_squeezed_std_form(r).unwrap();
            assert!((g.det_gamma() - 1.0).abs() < 1e-9 * g.a.powi(4));
            assert!((g.covariance().determinant() - 1.0).abs() < 1e-8 * g.a.powi(4));
            assert!(g.is_physical());
        }
        assert_eq!(two_mode_squeezed_std_form(0.5).unwrap().a, 1f64.cosh());
    }

    #[test]
    fn physicality() {
        assert!(GaussianStdForm::new(2.0, 2.0, 0.0, 0.0).is_ok());
        assert!(GaussianStdForm::new(1.0, 1.0, 0.5, 0.5).is_err());
        assert!(GaussianStdForm::new(2.0, 0.5, 0.0, 0.0).is_err());
    }
}
