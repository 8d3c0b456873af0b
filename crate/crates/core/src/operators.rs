//! Finite-dimensional complex operator algebra.
//!
//! [`Operator`] wraps a dense complex matrix and caches whether it is
//! Hermitian. The module provides the standard observables used by the
//! scenarios (Pauli matrices, truncated bosonic ladder operators and their
//! generalized quadratures), Kronecker products, expansions over Hermitian
//! bases and spectral helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

/// Complex scalar shorthand.
pub type C64 = Complex64;

/// Dense complex matrix shorthand.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix together with a cached Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    hermitian: bool,
}

impl Operator {
    /// Wraps a square matrix.
    ///
    /// # Panics
    /// Panics if the matrix is not square.
    pub fn new(mat: CMatrix) -> Self {
        assert!(mat.is_square(), "operator matrix must be square");
        let hermitian = hermitian_deviation(&mat) <= tolerances::HERMITIAN;
        Self { mat, hermitian }
    }

    /// Wraps a square matrix, rejecting non-square input.
    pub fn try_new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self::new(mat))
    }

    /// Builds an operator from a real matrix.
    pub fn from_real(mat: &DMatrix<f64>) -> Self {
        Self::new(mat.map(|x| C64::new(x, 0.0)))
    }

    /// Identity on a `dim`-dimensional space.
    pub fn identity(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim))
    }

    /// Zero operator on a `dim`-dimensional space.
    pub fn zeros(dim: usize) -> Self {
        Self::new(CMatrix::zeros(dim, dim))
    }

    /// Diagonal operator with real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Rank-one projector `|v⟩⟨v|` (the vector is not normalized here).
    pub fn projector(v: &DVector<C64>) -> Self {
        Self::new(v * v.adjoint())
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Consumes the operator and returns its matrix.
    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Cached Hermiticity flag (tolerance [`tolerances::HERMITIAN`]).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self::new(self.mat.adjoint())
    }

    /// Operator product `self · rhs`.
    pub fn mul(&self, rhs: &Operator) -> Self {
        Self::new(&self.mat * &rhs.mat)
    }

    /// Sum `self + rhs`.
    pub fn add(&self, rhs: &Operator) -> Self {
        Self::new(&self.mat + &rhs.mat)
    }

    /// Difference `self − rhs`.
    pub fn sub(&self, rhs: &Operator) -> Self {
        Self::new(&self.mat - &rhs.mat)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.mat * s)
    }

    /// Non-negative integer power; `pow(0)` is the identity.
    pub fn pow(&self, n: u32) -> Self {
        let mut out = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..n {
            out = &out * &self.mat;
        }
        Self::new(out)
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::new((&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part divided by `i`, i.e. `(M − M†)/(2i)`, which is
    /// Hermitian; `M = herm + i·anti`.
    pub fn anti_hermitian_part(&self) -> Self {
        Self::new((&self.mat - self.mat.adjoint()) * C64::new(0.0, -0.5))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Leading principal `n×n` block.
    pub fn crop(&self, n: usize) -> Self {
        Self::new(self.mat.view((0, 0), (n, n)).into_owned())
    }
}

/// Largest entrywise deviation `|M_ij − conj(M_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// The Pauli matrices and the 2×2 identity, returned as `(X, Y, Z, I)`.
pub fn pauli_set() -> (Operator, Operator, Operator, Operator) {
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    (
        Operator::new(x),
        Operator::new(y),
        Operator::new(z),
        Operator::identity(2),
    )
}

/// Truncated annihilation operator on `d` Fock levels: `√n` on the
/// superdiagonal.
pub fn annihilation(d: usize) -> Operator {
    Operator::new(CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    }))
}

/// Generalized quadratures `q = (a†ᴺ + aᴺ)/√2` and `p = i(a†ᴺ − aᴺ)/√2` on
/// `d` Fock levels, with the powers of the ladder operators taken after
/// truncation.
pub fn generalized_quadratures(n: u32, d: usize) -> Result<(Operator, Operator)> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "quadrature order N must be positive".into(),
        ));
    }
    if d <= n as usize {
        return Err(Error::InvalidParameter(format!(
            "truncation d = {d} must exceed the quadrature order N = {n}"
        )));
    }
    let an = annihilation(d).pow(n);
    let adn = an.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = adn.add(&an).scale(C64::new(s, 0.0));
    let p = adn.sub(&an).scale(C64::new(0.0, s));
    Ok((q, p))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator::new(a.mat.kronecker(&b.mat))
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(m: &Operator) -> Result<f64> {
    if !m.is_hermitian() {
        return Err(Error::NotHermitian(hermitian_deviation(&m.mat)));
    }
    Ok(min_eigenvalue_hermitian(&m.mat))
}

/// Smallest eigenvalue of a matrix assumed Hermitian (only its Hermitian
/// part is used).
pub(crate) fn min_eigenvalue_hermitian(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Real coordinates of a Hermitian matrix under which the Euclidean inner
/// product equals the trace inner product `Tr[A B]`.
pub(crate) fn hermitian_coords(m: &CMatrix) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(n * n);
    let mut k = 0;
    for i in 0..n {
        v[k] = m[(i, i)].re;
        k += 1;
    }
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            v[k] = r2 * z.re;
            v[k + 1] = r2 * z.im;
            k += 2;
        }
    }
    v
}

/// Coefficients of `M = Σ_k (c_k + i d_k) E_k` over a Hermitian basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    /// Coefficients of the Hermitian part.
    pub re: Vec<f64>,
    /// Coefficients of the anti-Hermitian part (divided by `i`).
    pub im: Vec<f64>,
    /// Frobenius norm of `M − Σ_k (c_k + i d_k) E_k`.
    pub residual: f64,
}

impl Expansion {
    /// Complex coefficient on basis element `k`.
    pub fn coefficient(&self, k: usize) -> C64 {
        C64::new(self.re[k], self.im[k])
    }
}

/// A list of Hermitian operators together with their trace-inner-product
/// Gram matrix.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<Operator>,
    gram: DMatrix<f64>,
    gram_condition: f64,
}

impl HermitianBasis {
    /// Validates the elements and precomputes the Gram matrix.
    ///
    /// Fails if any element is not Hermitian, dimensions disagree, or the
    /// Gram matrix is singular.
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        let dim = elements
            .first()
            .map(Operator::dim)
            .ok_or_else(|| Error::Config("empty Hermitian basis".into()))?;
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::Dimension(
                    "basis elements differ in dimension".into(),
                ));
            }
            if !e.is_hermitian() {
                return Err(Error::NotHermitian(hermitian_deviation(e.matrix())));
            }
        }
        let coords: Vec<DVector<f64>> = elements
            .iter()
            .map(|e| hermitian_coords(e.matrix()))
            .collect();
        let n = elements.len();
        let gram = DMatrix::from_fn(n, n, |i, j| coords[i].dot(&coords[j]));
        let sv = gram.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if smin <= smax * 1e-13 {
            return Err(Error::Config(
                "singular Gram matrix for Hermitian basis".into(),
            ));
        }
        Ok(Self {
            dim,
            elements,
            gram,
            gram_condition: smax / smin,
        })
    }

    /// Unnormalized Pauli basis `{I, X, Y, Z}`.
    pub fn pauli() -> Self {
        let (x, y, z, i) = pauli_set();
        Self::new(vec![i, x, y, z]).expect("Pauli basis is valid")
    }

    /// Orthonormal basis of `d×d` Hermitian matrices made of diagonal
    /// matrix units followed by symmetric and antisymmetric generators,
    /// normalized so that `Tr[E_j E_k] = δ_jk`.
    pub fn gell_mann(d: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(d * d);
        for j in 0..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, j)] = ONE;
            elements.push(Operator::new(m));
        }
        for j in 0..d {
            for k in (j + 1)..d {
                let mut m = CMatrix::zeros(d, d);
                m[(j, k)] = C64::new(s, 0.0);
                m[(k, j)] = C64::new(s, 0.0);
                elements.push(Operator::new(m));
            }
        }
        for j in 0..d {
            for k in (j + 1)..d {
                let mut m = CMatrix::zeros(d, d);
                m[(j, k)] = C64::new(0.0, -s);
                m[(k, j)] = C64::new(0.0, s);
                elements.push(Operator::new(m));
            }
        }
        Self::new(elements).expect("Gell-Mann basis is valid")
    }

    /// Hilbert-space dimension of the elements.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Whether the basis has no elements (never true for a constructed basis).
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether the elements span all `dim×dim` Hermitian matrices.
    pub fn is_complete(&self) -> bool {
        self.elements.len() == self.dim * self.dim
    }

    /// The basis elements.
    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    /// Condition number of the Gram matrix.
    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// Reconstructs `Σ_k (c_k + i d_k) E_k`.
    pub fn reconstruct(&self, e: &Expansion) -> Operator {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (k, el) in self.elements.iter().enumerate() {
            m += el.matrix() * e.coefficient(k);
        }
        Operator::new(m)
    }
}

/// Expands `M` over `basis` by solving the Gram system for its Hermitian and
/// anti-Hermitian parts separately.
///
/// Fails if the basis dimension differs from `M`, or if the residual exceeds
/// [`tolerances::EXPANSION_RESIDUAL`] (which happens when the basis is
/// incomplete and `M` lies outside its span).
pub fn expand_in_basis(m: &Operator, basis: &HermitianBasis) -> Result<Expansion> {
    if m.dim() != basis.dim {
        return Err(Error::Dimension(format!(
            "operator dimension {} vs basis dimension {}",
            m.dim(),
            basis.dim
        )));
    }
    let h = hermitian_coords(m.hermitian_part().matrix());
    let k = hermitian_coords(m.anti_hermitian_part().matrix());
    let coords: Vec<DVector<f64>> = basis
        .elements
        .iter()
        .map(|e| hermitian_coords(e.matrix()))
        .collect();
    let rhs_h = DVector::from_iterator(coords.len(), coords.iter().map(|c| c.dot(&h)));
    let rhs_k = DVector::from_iterator(coords.len(), coords.iter().map(|c| c.dot(&k)));
    let chol = basis
        .gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Config("singular Gram matrix for Hermitian basis".into()))?;
    let re = chol.solve(&rhs_h);
    let im = chol.solve(&rhs_k);
    let mut e = Expansion {
        re: re.iter().copied().collect(),
        im: im.iter().copied().collect(),
        residual: 0.0,
    };
    e.residual = m.sub(&basis.reconstruct(&e)).frobenius();
    if e.residual > tolerances::EXPANSION_RESIDUAL {
        return Err(Error::Config(format!(
            "basis expansion residual {:.3e} exceeds tolerance",
            e.residual
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn pauli_product_rule() {
        let (x, y, z, i) = pauli_set();
        assert!(close(&x.mul(&y), &z.scale(I), 1e-15));
        assert!(close(&x.mul(&x), &i, 1e-15));
        assert!(x.mul(&y).trace().norm() < 1e-15);
        assert!(x.is_hermitian() && y.is_hermitian() && z.is_hermitian());
    }

    #[test]
    fn pauli_z_spectrum() {
        let (_, _, z, _) = pauli_set();
        let ev = z.matrix().symmetric_eigenvalues();
        let mut v: Vec<f64> = ev.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_single_ladder_element() {
        let (q, _) = generalized_quadratures(1, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q.get(0, 1).re - s).abs() < 1e-15);
        assert!((q.get(1, 0).re - s).abs() < 1e-15);
        assert!(q.get(0, 0).norm() < 1e-15 && q.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn quadrature_commutator_at_vacuum() {
        let (q, p) = generalized_quadratures(1, 10).unwrap();
        let c = q.mul(&p).sub(&p.mul(&q));
        assert!((c.get(0, 0) - I).norm() < 1e-13);
        // Away from the truncation edge the commutator is i times identity.
        for n in 0..9 {
            assert!((c.get(n, n) - I).norm() < 1e-12, "level {n}");
        }
    }

    #[test]
    fn second_order_quadrature_element() {
        let (q, p) = generalized_quadratures(2, 6).unwrap();
        assert!((q.get(0, 2).re - 1.0).abs() < 1e-14);
        assert!(q.is_hermitian() && p.is_hermitian());
    }

    #[test]
    fn quadrature_rejects_small_truncation() {
        assert!(generalized_quadratures(2, 2).is_err());
        assert!(generalized_quadratures(1, 1).is_err());
        assert!(generalized_quadratures(0, 4).is_err());
    }

    #[test]
    fn tensor_examples() {
        let (x, _, z, i2) = pauli_set();
        assert!(close(&tensor(&i2, &i2), &Operator::identity(4), 0.0));
        assert_eq!(tensor(&x, &z).get(0, 2), ONE);
        let t = tensor(&x, &z);
        assert!(t.is_hermitian());
        assert!((t.trace() - x.trace() * z.trace()).norm() < 1e-15);
    }

    #[test]
    fn expand_basis_element_and_pauli_product() {
        let b = HermitianBasis::pauli();
        let e = expand_in_basis(&b.elements()[1], &b).unwrap();
        assert!((e.re[1] - 1.0).abs() < 1e-14);
        assert!(e
            .re
            .iter()
            .enumerate()
            .all(|(k, c)| k == 1 || c.abs() < 1e-14));
        assert!(e.im.iter().all(|c| c.abs() < 1e-14));

        let (x, y, _, _) = pauli_set();
        let e = expand_in_basis(&x.mul(&y), &b).unwrap();
        assert!(e.re.iter().all(|c| c.abs() < 1e-14));
        assert!((e.im[3] - 1.0).abs() < 1e-14);
        assert!(e.im[..3].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn expand_quadrature_product_against_reconstruction() {
        let (q, p) = generalized_quadratures(1, 8).unwrap();
        let basis = HermitianBasis::gell_mann(8);
        assert!(basis.is_complete());
        assert!((basis.gram_condition() - 1.0).abs() < 1e-12);
        let m = q.mul(&p);
        let e = expand_in_basis(&m, &basis).unwrap();
        let herm = Operator::new(CMatrix::zeros(8, 8));
        let mut herm = herm.into_matrix();
        let mut anti = CMatrix::zeros(8, 8);
        for (k, el) in basis.elements().iter().enumerate() {
            herm += el.matrix() * C64::new(e.re[k], 0.0);
            anti += el.matrix() * C64::new(e.im[k], 0.0);
        }
        let sym = q.mul(&p).add(&p.mul(&q)).scale(C64::new(0.5, 0.0));
        let comm = q.mul(&p).sub(&p.mul(&q)).scale(C64::new(0.0, -0.5));
        assert!(close(&Operator::new(herm), &sym, 1e-12));
        assert!(close(&Operator::new(anti), &comm, 1e-12));
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn expansion_outside_incomplete_span_is_rejected() {
        let (x, _, z, _) = pauli_set();
        let b = HermitianBasis::new(vec![x.clone()]).unwrap();
        assert!(expand_in_basis(&z, &b).is_err());
    }

    #[test]
    fn singular_gram_is_configuration_error() {
        let (x, _, _, _) = pauli_set();
        assert!(matches!(
            HermitianBasis::new(vec![x.clone(), x.scale(C64::new(2.0, 0.0))]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((min_eigenvalue(&Operator::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&Operator::diagonal(&[3.0, -2.0])).unwrap() + 2.0).abs() < 1e-14);
        let (x, _, _, _) = pauli_set();
        assert!((min_eigenvalue(&x).unwrap() + 1.0).abs() < 1e-14);
        let nonherm = Operator::new(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
        assert!(matches!(
            min_eigenvalue(&nonherm),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn hermitian_coords_realize_trace_inner_product() {
        let (q, p) = generalized_quadratures(1, 5).unwrap();
        let a = q.mul(&q);
        let b = p.mul(&q).add(&q.mul(&p));
        let lhs = a.mul(&b).trace().re;
        let rhs = hermitian_coords(a.matrix()).dot(&hermitian_coords(b.matrix()));
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
