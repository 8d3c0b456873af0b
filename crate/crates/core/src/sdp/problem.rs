use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::moments::TemplateExport;
use crate::operators::{hermitian_deviation, CMatrix, C64};

/// Real-symmetric embedding `[[Re H, −Im H], [Im H, Re H]]`.
pub fn embed(h: &CMatrix) -> DMatrix<f64> {
    let k = h.nrows();
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = h[(i, j)];
            m[(i, j)] = z.re;
            m[(i + k, j + k)] = z.re;
            m[(i, j + k)] = -z.im;
            m[(i + k, j)] = z.im;
        }
    }
    m
}

/// Complex matrix `(X₁₁ + X₂₂) + i(X₂₁ − X₁₂)` paired with the embedding:
/// `⟨embed(H), X⟩ = Tr[H · compress(X)]` for Hermitian `H` and symmetric `X`.
pub fn compress(x: &DMatrix<f64>) -> CMatrix {
    let k = x.nrows() / 2;
    CMatrix::from_fn(k, k, |i, j| {
        C64::new(x[(i, j)] + x[(i + k, j + k)], x[(i + k, j)] - x[(i, j + k)])
    })
}

/// The eigenvalue-maximization program for `Γ(t) = Γ_obs + Σ_k t_k F_k`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    gamma_obs: CMatrix,
    free_dirs: Vec<CMatrix>,
    pins: Vec<(f64, CMatrix)>,
    c: DMatrix<f64>,
    a_free: Vec<DMatrix<f64>>,
    norms: Vec<f64>,
}

fn check_hermitian(m: &CMatrix, what: &str) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > 1e-12 * m.iter().map(|z| z.norm()).fold(1.0, f64::max) {
        return Err(Error::Config(format!(
            "{what} is not Hermitian (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

impl SdpProblem {
    /// Builds and validates a problem. Free directions must be Hermitian and
    /// linearly independent.
    pub fn new(gamma_obs: CMatrix, free_dirs: Vec<CMatrix>) -> Result<Self> {
        Self::with_pins(gamma_obs, free_dirs, Vec::new())
    }

    /// As [`Self::new`], with the decomposition `Γ_obs = Σ_o value_o · P_o`
    /// recorded so dual multipliers on pinned moments can be reported.
    pub fn with_pins(
        gamma_obs: CMatrix,
        free_dirs: Vec<CMatrix>,
        pins: Vec<(f64, CMatrix)>,
    ) -> Result<Self> {
        let k = gamma_obs.nrows();
        if gamma_obs.ncols() != k || k == 0 {
            return Err(Error::Dimension("Γ_obs must be square and nonempty".into()));
        }
        check_hermitian(&gamma_obs, "Γ_obs")?;
        for (n, f) in free_dirs.iter().enumerate() {
            if f.shape() != (k, k) {
                return Err(Error::Dimension(format!(
                    "free direction {n} has wrong shape"
                )));
            }
            check_hermitian(f, "free direction")?;
        }
        for (_, p) in &pins {
            if p.shape() != (k, k) {
                return Err(Error::Dimension("pin pattern has wrong shape".into()));
            }
        }
        let c = embed(&gamma_obs);
        let mut a_free = Vec::with_capacity(free_dirs.len());
        let mut norms = Vec::with_capacity(free_dirs.len());
        for f in &free_dirs {
            let e = embed(f);
            let nrm = e.norm();
            if nrm == 0.0 {
                return Err(Error::Config("zero free direction".into()));
            }
            a_free.push(-e / nrm);
            norms.push(nrm);
        }
        // Gram-rank check of the normalized directions.
        let m = a_free.len();
        if m > 0 {
            let gram = DMatrix::from_fn(m, m, |i, j| a_free[i].dot(&a_free[j]));
            let ev = gram.symmetric_eigenvalues();
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            if lo < 1e-10 * m as f64 {
                return Err(Error::Config(format!(
                    "free directions are linearly dependent (Gram eigenvalue {lo:.3e})"
                )));
            }
        }
        Ok(Self {
            gamma_obs,
            free_dirs,
            pins,
            c,
            a_free,
            norms,
        })
    }

    /// Problem over the rows of a template export.
    pub fn from_export(e: &TemplateExport) -> Result<Self> {
        Self::with_pins(e.gamma_obs.clone(), e.free_dirs.clone(), e.pins.clone())
    }

    /// Complex matrix size `k`.
    pub fn k(&self) -> usize {
        self.gamma_obs.nrows()
    }

    /// Embedded size `2k`.
    pub fn embedded_dim(&self) -> usize {
        2 * self.k()
    }

    /// Number of free real parameters.
    pub fn n_free(&self) -> usize {
        self.free_dirs.len()
    }

    /// `Γ_obs`.
    pub fn gamma_obs(&self) -> &CMatrix {
        &self.gamma_obs
    }

    /// The free directions `F_k`.
    pub fn free_dirs(&self) -> &[CMatrix] {
        &self.free_dirs
    }

    /// Pinned values and their patterns.
    pub fn pins(&self) -> &[(f64, CMatrix)] {
        &self.pins
    }

    /// `Γ(t)`.
    pub fn gamma(&self, t: &[f64]) -> CMatrix {
        let mut g = self.gamma_obs.clone();
        for (f, &tk) in self.free_dirs.iter().zip(t) {
            g += f * C64::new(tk, 0.0);
        }
        g
    }

    /// Whether some diagonal entry of `Γ` is untouched by every free
    /// direction, which bounds `λ` from above and makes the program bounded.
    pub fn is_bounded(&self) -> bool {
        (0..self.k()).any(|i| self.free_dirs.iter().all(|f| f[(i, i)].norm() == 0.0))
    }

    pub(crate) fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Constraint matrices `A_0 = I`, `A_k = −F̂_k` (embedded).
    pub(crate) fn a_free(&self) -> &[DMatrix<f64>] {
        &self.a_free
    }

    pub(crate) fn norms(&self) -> &[f64] {
        &self.norms
    }
}
