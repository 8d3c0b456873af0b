//! Small dense linear-algebra helpers shared by the template compiler and
//! the reductions.

use nalgebra::{DMatrix, DVector};

use crate::operators::C64;

/// Orthonormalizes generators by twice-iterated modified Gram–Schmidt.
///
/// Returns `(q, a)` pairs where `q` is a unit vector and `a` the coefficients
/// of `q` over the generators. A generator is discarded when its residual
/// after projection is below `rel_tol` times its original norm (or below
/// `rel_tol` for tiny generators).
pub(crate) fn orthonormalize(
    gens: &[DVector<f64>],
    rel_tol: f64,
) -> Vec<(DVector<f64>, DVector<f64>)> {
    let n = gens.len();
    let mut out: Vec<(DVector<f64>, DVector<f64>)> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        let norm0 = g.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = g.clone();
        let mut a = DVector::zeros(n);
        a[j] = 1.0;
        for _ in 0..2 {
            for (q, qa) in &out {
                let c = q.dot(&v);
                v -= q * c;
                a -= qa * c;
            }
        }
        let r = v.norm();
        if r > rel_tol * norm0.max(1.0) {
            out.push((v / r, a / r));
        }
    }
    out
}

/// Orthonormal basis of the null space of `m` from its SVD; singular values
/// below `rel_tol · max(1, σ_max)` count as zero.
pub(crate) fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    // pad to at least as many rows as columns so the thin SVD exposes V fully
    let a = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max().max(1.0);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= rel_tol * smax {
            out.push(v_t.row(k).transpose());
        }
    }
    out
}

/// Indices of a maximal linearly independent subset chosen greedily in
/// order (complex vectors, twice-iterated Gram–Schmidt).
pub(crate) fn independent_prefix(vectors: &[DVector<C64>], rel_tol: f64) -> Vec<usize> {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, v0) in vectors.iter().enumerate() {
        let norm0 = v0.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = v0.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let r = v.norm();
        if r > rel_tol * norm0.max(1.0) {
            basis.push(v / C64::new(r, 0.0));
            kept.push(j);
        }
    }
    kept
}

/// Least-squares solution of `a x = b` (minimum norm) and the residual norm.
pub(crate) fn least_squares(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    rel_tol: f64,
) -> (DVector<f64>, f64) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max().max(1e-300);
    let x = svd
        .solve(b, rel_tol * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    (x, r)
}
