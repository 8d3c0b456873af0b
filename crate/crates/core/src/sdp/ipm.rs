use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{CMatrix, C64};
use crate::tolerances;

use super::problem::{compress, SdpProblem};

/// Outcome of an interior-point run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Converged to the requested tolerance.
    Optimal,
    /// Stalled, hit the iteration cap, or the program failed the
    /// boundedness guard; the reported numbers are the best bounds found.
    NumericalTrouble,
}

/// Primal optimum, dual certificate and convergence diagnostics.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Convergence status.
    pub status: SolveStatus,
    /// `λ_min(Γ(t⋆))`, always a feasible value of the program.
    pub lambda_star: f64,
    /// Optimal free parameters.
    pub t_star: Vec<f64>,
    /// Complex dual certificate `Z` (`k × k`).
    pub z: CMatrix,
    /// Dual bound `β = Tr[Z Γ_obs]`.
    pub beta: f64,
    /// Multipliers `μ_o = Tr[Z P_o]` on the pinned moments, in pin order.
    pub mu: Vec<f64>,
    /// `β − λ⋆`.
    pub duality_gap: f64,
    /// Interior-point iterations used.
    pub iterations: usize,
    /// Final relative primal residual of the standard form.
    pub primal_infeasibility: f64,
    /// Final relative dual residual of the standard form.
    pub dual_infeasibility: f64,
}

struct Factor {
    inv: DMatrix<f64>,
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<Factor> {
    Cholesky::new(m.clone()).map(|c| Factor { inv: c.inverse() })
}

/// Largest `α ≤ cap` with `X + α ΔX ⪰ 0`, via the eigenvalues of
/// `L⁻¹ ΔX L⁻ᵀ` for the Cholesky factor `L` of `X`.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>, cap: f64) -> f64 {
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let w = sym(&(&linv * dx * linv.transpose()));
    let lo = w.symmetric_eigenvalues().min();
    if lo >= 0.0 {
        cap
    } else {
        (-1.0 / lo).min(cap)
    }
}

/// Cholesky factor of the Schur complement, with an LU fallback when
/// rounding makes it numerically indefinite close to the optimum.
enum SchurFactor {
    Chol(Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurFactor {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        match Cholesky::new(m.clone()) {
            Some(c) => Some(Self::Chol(c)),
            None => {
                let lu = m.lu();
                lu.is_invertible().then_some(Self::Lu(lu))
            }
        }
    }

    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Chol(c) => c.solve(b),
            Self::Lu(l) => l.solve(b).unwrap_or_else(|| DVector::zeros(b.len())),
        }
    }
}

struct Iterate {
    x: DMatrix<f64>,
    y: DVector<f64>,
    s: DMatrix<f64>,
}

/// Solves the program with a Mehrotra predictor–corrector primal–dual
/// interior-point method (HKM search direction, infeasible start).
///
/// `tol` bounds the relative duality gap and the relative primal and dual
/// residuals at termination; it must lie in `[1e-10, 1e-4]`.
pub fn solve(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    if !(1e-10..=1e-4).contains(&tol) {
        return Err(Error::Config(format!(
            "solver tolerance {tol:e} outside [1e-10, 1e-4]"
        )));
    }
    if problem.n_free() == 0 {
        return Ok(eigen_solution(problem));
    }
    if !problem.is_bounded() {
        let mut sol = eigen_solution(problem);
        sol.status = SolveStatus::NumericalTrouble;
        sol.beta = f64::INFINITY;
        sol.duality_gap = f64::INFINITY;
        return Ok(sol);
    }

    let n = problem.embedded_dim();
    let c = problem.c();
    let mut a: Vec<DMatrix<f64>> = Vec::with_capacity(problem.n_free() + 1);
    a.push(DMatrix::identity(n, n));
    a.extend(problem.a_free().iter().cloned());
    let m = a.len();
    let mut b: DVector<f64> = DVector::zeros(m);
    b[0] = 1.0;
    let nf = n as f64;
    let c_norm = c.norm();

    let a_norm_max = a.iter().map(|ai| ai.norm()).fold(0.0, f64::max);
    let xi = 10f64.max(nf.sqrt()).max(
        a.iter()
            .zip(b.iter())
            .map(|(ai, bi)| nf * (1.0 + bi.abs()) / (1.0 + ai.norm()))
            .fold(0.0, f64::max),
    );
    let eta = 10f64.max(nf.sqrt()).max(c_norm).max(a_norm_max);
    let mut it = Iterate {
        x: DMatrix::identity(n, n) * xi,
        y: DVector::zeros(m),
        s: DMatrix::identity(n, n) * eta,
    };

    let op_a = |x: &DMatrix<f64>| DVector::from_iterator(m, a.iter().map(|ai| ai.dot(x)));
    let op_at = |y: &DVector<f64>| {
        let mut r = DMatrix::zeros(n, n);
        for (ai, &yi) in a.iter().zip(y.iter()) {
            if yi != 0.0 {
                r += ai * yi;
            }
        }
        r
    };

    let mut status = SolveStatus::NumericalTrouble;
    let mut iterations = 0;
    let mut pinf = f64::INFINITY;
    let mut dinf = f64::INFINITY;
    let mut stalls = 0;
    while iterations < tolerances::SDP_MAX_ITER {
        let r_p = &b - op_a(&it.x);
        let r_d = c - op_at(&it.y) - &it.s;
        let pobj = c.dot(&it.x);
        let dobj = b.dot(&it.y);
        let mu = it.x.dot(&it.s) / nf;
        pinf = r_p.norm() / (1.0 + b.norm());
        dinf = r_d.norm() / (1.0 + c_norm);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if relgap < tol && pinf < tol && dinf < tol {
            status = SolveStatus::Optimal;
            break;
        }
        iterations += 1;

        let Some(sf) = inverse_spd(&it.s) else { break };
        let sinv = sym(&sf.inv);
        // Schur complement M_ij = Tr[A_i X A_j S⁻¹].
        let g: Vec<DMatrix<f64>> = a.iter().map(|aj| &it.x * aj * &sinv).collect();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = a[i].dot(&g[j]);
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let Some(mf) = SchurFactor::new(schur) else {
            break;
        };

        let x_rd_sinv = &it.x * &r_d * &sinv;
        let direction = |sigma: f64, k: Option<&DMatrix<f64>>| {
            let mut h = &sinv * (sigma * mu) - &it.x - &x_rd_sinv;
            if let Some(k) = k {
                h -= k * &sinv;
            }
            let rhs = &r_p - op_a(&h);
            let dy = mf.solve(&rhs);
            let ds = &r_d - op_at(&dy);
            let mut dx = h;
            for (gj, &dyj) in g.iter().zip(dy.iter()) {
                dx += gj * dyj;
            }
            (sym(&dx), dy, ds)
        };

        // predictor
        let (dx_a, _, ds_a) = direction(0.0, None);
        let ap = max_step(&it.x, &dx_a, 1.0);
        let ad = max_step(&it.s, &ds_a, 1.0);
        let mu_aff = (&it.x + &dx_a * ap).dot(&(&it.s + &ds_a * ad)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // corrector
        let k = &dx_a * &ds_a;
        let (dx, dy, ds) = direction(sigma, Some(&k));
        let tau = 0.98;
        let ap = (tau * max_step(&it.x, &dx, 1.0 / tau)).min(1.0);
        let ad = (tau * max_step(&it.s, &ds, 1.0 / tau)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            stalls += 1;
            if stalls > 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        it.x = sym(&(&it.x + dx * ap));
        it.y += dy * ad;
        it.s = sym(&(&it.s + ds * ad));
    }

    // Polish: project X onto the affine constraints.
    let r_p = &b - op_a(&it.x);
    let gram = DMatrix::from_fn(m, m, |i, j| a[i].dot(&a[j]));
    let corr = Cholesky::new(gram)
        .map(|ch| ch.solve(&r_p))
        .unwrap_or_else(|| DVector::zeros(m));
    let x = &it.x + op_at(&corr);

    let t_star: Vec<f64> = problem
        .norms()
        .iter()
        .enumerate()
        .map(|(k, nrm)| it.y[k + 1] / nrm)
        .collect();
    let lambda_star = crate::operators::min_eigenvalue_hermitian(&problem.gamma(&t_star));
    let z = compress(&x);
    Ok(finish(
        problem,
        status,
        lambda_star,
        t_star,
        z,
        iterations,
        pinf,
        dinf,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &SdpProblem,
    status: SolveStatus,
    lambda_star: f64,
    t_star: Vec<f64>,
    z: CMatrix,
    iterations: usize,
    pinf: f64,
    dinf: f64,
) -> SdpSolution {
    let beta = (&z * problem.gamma_obs()).trace().re;
    let mu = problem
        .pins()
        .iter()
        .map(|(_, p)| (&z * p).trace().re)
        .collect();
    SdpSolution {
        status,
        lambda_star,
        t_star,
        beta,
        mu,
        duality_gap: beta - lambda_star,
        z,
        iterations,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
    }
}

/// Closed form for a program without free directions: `λ⋆ = λ_min(Γ_obs)`
/// and `Z = v v†` for a unit eigenvector `v` of the smallest eigenvalue.
fn eigen_solution(problem: &SdpProblem) -> SdpSolution {
    let g = problem.gamma_obs();
    let h = (g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let (idx, &lo) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    let v = eig.eigenvectors.column(idx).into_owned();
    let z = &v * v.adjoint();
    finish(
        problem,
        SolveStatus::Optimal,
        lo,
        Vec::new(),
        z,
        0,
        0.0,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{I, ONE, ZERO};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pure_eigenvalue_problem() {
        let g = CMatrix::from_row_slice(2, 2, &[c(3.0), ZERO, ZERO, c(-2.0)]);
        let sol = solve(&SdpProblem::new(g, vec![]).unwrap(), 1e-8).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.lambda_star + 2.0).abs() < 1e-14);
        assert!((sol.beta + 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_free_off_diagonal() {
        // [[1, t + 0.5],[t + 0.5, 1]] → best t = −0.5, λ⋆ = 1.
        let g = CMatrix::from_row_slice(2, 2, &[ONE, c(0.5), c(0.5), ONE]);
        let f = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let sol = solve(&SdpProblem::new(g, vec![f]).unwrap(), 1e-9).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.lambda_star - 1.0).abs() < 1e-7, "{}", sol.lambda_star);
        assert!((sol.t_star[0] + 0.5).abs() < 1e-6);
        assert!(sol.duality_gap.abs() < 1e-6);
    }

    #[test]
    fn complex_free_direction() {
        // [[1, a, i t],[a, 1, b],[−i t, b, 1]] with a = b = 0.7 real pinned.
        let a = c(0.7);
        let g = CMatrix::from_row_slice(3, 3, &[ONE, a, ZERO, a, ONE, a, ZERO, a, ONE]);
        let mut f = CMatrix::zeros(3, 3);
        f[(0, 2)] = I;
        f[(2, 0)] = -I;
        let sol = solve(&SdpProblem::new(g.clone(), vec![f]).unwrap(), 1e-9).unwrap();
        // with t = 0 the eigenvalues are 1 ± 0.7√2; i·t only hurts by symmetry
        let expect = 1.0 - 0.7 * 2f64.sqrt();
        assert!(
            (sol.lambda_star - expect).abs() < 1e-7,
            "{} vs {}",
            sol.lambda_star,
            expect
        );
        assert!(sol.t_star[0].abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let p = SdpProblem::new(CMatrix::identity(1, 1), vec![]).unwrap();
        assert!(solve(&p, 1e-2).is_err());
        assert!(solve(&p, 1e-12).is_err());
    }
}
