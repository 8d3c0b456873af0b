//! End-to-end detection: scenario → template → reductions → semidefinite
//! program → certificate → three-way decision.
//!
//! Two exact reductions keep the program well posed:
//!
//! - *Structural*: rows whose strings are linear combinations of earlier
//!   strings as operators are dropped (their entries are then fixed
//!   combinations of the kept ones, so positive semidefiniteness is
//!   unchanged).
//! - *Data-forced face*: when the fully pinned block of the moment matrix is
//!   singular, every positive completion must annihilate its kernel. That
//!   linear condition either has no solution in the free parameters
//!   (steering) or restricts them to an affine subspace on which the kernel
//!   pivots can be removed. The reduced program has a strictly positive
//!   optimum whenever a completion with slack exists, which turns the
//!   otherwise degenerate `λ⋆ = 0` boundary cases into clean sign decisions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{independent_prefix, least_squares, null_space};
use crate::moments::{
    gaussian_set, noon_set, werner_set, AliceAlgebra, AssemblageSource, BobAlgebra, GaussianSource,
    MomentSource, MomentTemplate, ObservabilityPolicy, StateSource, StringSet, TrueModel,
};
use crate::operators::{generalized_quadratures, pauli_set, CMatrix, C64, ZERO};
use crate::scenarios::{
    lossy_noon_state, measurement_from_observable, werner_state, Assemblage, GaussianStdForm,
};
use crate::sdp::{certify, solve, Certificate, SdpProblem, SdpSolution, SolveStatus};
use crate::tolerances;

/// Outcome of the detection test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    /// No positive completion exists: the data demonstrate steering.
    Steering,
    /// A positive completion exists with margin.
    NoDetection,
    /// The optimum lies inside the solver's decision band.
    #[serde(rename = "inconclusive-margin")]
    Inconclusive,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Steering => write!(f, "steering"),
            Self::NoDetection => write!(f, "no-detection"),
            Self::Inconclusive => write!(f, "inconclusive-margin"),
        }
    }
}

/// Three-way sign decision with band `10 · tol`.
pub fn decide(lambda: f64, tol: f64) -> Decision {
    let band = tolerances::DECISION_BAND_FACTOR * tol;
    if lambda < -band {
        Decision::Steering
    } else if lambda > band {
        Decision::NoDetection
    } else {
        Decision::Inconclusive
    }
}

/// Where the observed moments come from.
#[derive(Clone, Debug)]
pub enum ScenarioSource {
    /// A state with Alice's actual measurements.
    State(StateSource),
    /// An assemblage.
    Assemblage(AssemblageSource),
    /// Second moments of a Gaussian standard form.
    Gaussian(GaussianSource),
}

impl ScenarioSource {
    /// The moment oracle.
    pub fn moments(&self) -> &dyn MomentSource {
        match self {
            Self::State(s) => s,
            Self::Assemblage(s) => s,
            Self::Gaussian(s) => s,
        }
    }

    /// The true quantum model, when Alice's operators are known.
    pub fn true_model(&self) -> Option<&dyn TrueModel> {
        match self {
            Self::State(s) => Some(s),
            _ => None,
        }
    }
}

/// A complete detection scenario: data, operator algebras and string set.
#[derive(Clone, Debug)]
pub struct Scenario {
    /// Identifier recorded in reports and witness provenance.
    pub id: String,
    /// Observed data.
    pub source: ScenarioSource,
    /// Bob's trusted operators.
    pub bob: BobAlgebra,
    /// Alice's outcome alphabets.
    pub alice: AliceAlgebra,
    /// The string set `S`.
    pub words: StringSet,
}

impl Scenario {
    /// Replaces the string set.
    pub fn with_words(mut self, words: StringSet) -> Self {
        self.words = words;
        self
    }

    /// Compiles the moment-matrix template under `policy`.
    pub fn template(&self, policy: ObservabilityPolicy) -> Result<MomentTemplate> {
        MomentTemplate::build(
            &self.words,
            &self.bob,
            &self.alice,
            policy,
            self.source.moments(),
        )
    }
}

/// Two-qubit Werner state with Alice measuring `X`, `Y`, `Z` (inputs 0, 1,
/// 2, outcomes ±1) and Bob's algebra generated by the Pauli operators, on
/// the four-string set `{1⊗1, A0⊗X, A1⊗Y, A2⊗Z}`.
pub fn werner_scenario(w: f64) -> Result<Scenario> {
    let (x, y, z, _) = pauli_set();
    let ms = [&x, &y, &z]
        .iter()
        .map(|o| measurement_from_observable(o))
        .collect::<Result<Vec<_>>>()?;
    let source = StateSource::new(werner_state(w)?, ms, vec![x, y, z])?;
    Ok(Scenario {
        id: format!("werner(w={w})"),
        source: ScenarioSource::State(source),
        bob: BobAlgebra::pauli(),
        alice: AliceAlgebra::with_outcomes(vec![Some(vec![-1.0, 1.0]); 3]),
        words: werner_set(),
    })
}

/// Lossy N00N state on `d` Fock levels per mode. Alice measures the
/// truncated generalized quadratures `q^(N)` (input 0) and `p^(N)` (input 1)
/// of her mode; Bob's operators are `q^(N)`, `p^(N)` with word relations
/// taken from a window of `window ≥ d` levels. The string set is the
/// eleven-word set of [`noon_set`]. Alice's outcomes are treated as a
/// continuous alphabet (no power reductions).
pub fn noon_scenario(n: u32, eta: f64, d: usize, window: usize) -> Result<Scenario> {
    if window < d {
        return Err(Error::InvalidParameter(format!(
            "window {window} smaller than truncation {d}"
        )));
    }
    let state = lossy_noon_state(n, eta, d)?;
    let (q, p) = generalized_quadratures(n, d)?;
    let ms = vec![
        measurement_from_observable(&q)?,
        measurement_from_observable(&p)?,
    ];
    let bob_data = if window == d {
        vec![q, p]
    } else {
        // data operators at the window size, restricted to the state's space
        let (qw, pw) = generalized_quadratures(n, window)?;
        vec![qw.crop(d), pw.crop(d)]
    };
    let source = StateSource::new(state, ms, bob_data)?;
    Ok(Scenario {
        id: format!("noon(N={n},eta={eta},d={d})"),
        source: ScenarioSource::State(source),
        bob: BobAlgebra::bosonic(n, d, 4)?,
        alice: AliceAlgebra::free(),
        words: noon_set(),
    })
}

/// Gaussian standard form with Alice's `A0 = q_A`, `A1 = p_A`, Bob's
/// quadratures and the four-string set `{A0⊗1, A1⊗1, 1⊗q, 1⊗p}`.
pub fn gaussian_scenario(g: GaussianStdForm) -> Result<Scenario> {
    Ok(Scenario {
        id: format!("gaussian-std(a={},b={},c1={},c2={})", g.a, g.b, g.c1, g.c2),
        source: ScenarioSource::Gaussian(GaussianSource::new(g)),
        bob: BobAlgebra::bosonic(1, 3, 2)?,
        alice: AliceAlgebra::free(),
        words: gaussian_set(),
    })
}

/// Default Bob operators for an assemblage on `dim_b` levels: the Pauli
/// operators for qubits, otherwise the non-identity elements of the
/// orthonormal Gell-Mann-style basis scaled to unit spectral scale.
pub fn default_bob_operators(
    dim_b: usize,
) -> Result<(Vec<String>, Vec<crate::operators::Operator>)> {
    if dim_b == 2 {
        let (x, y, z, _) = pauli_set();
        return Ok((vec!["X".into(), "Y".into(), "Z".into()], vec![x, y, z]));
    }
    if dim_b < 2 {
        return Err(Error::InvalidParameter(
            "Bob's dimension must be at least 2".into(),
        ));
    }
    let basis = crate::operators::HermitianBasis::gell_mann(dim_b);
    let ops: Vec<_> = basis.elements()[dim_b..]
        .iter()
        .map(|e| e.scale(C64::new(std::f64::consts::SQRT_2, 0.0)))
        .collect();
    let names = (0..ops.len()).map(|i| format!("G{i}")).collect();
    Ok((names, ops))
}

/// An assemblage with the level-`k` string set over all inputs and the
/// given Bob operators (or [`default_bob_operators`]). Outcome labels are
/// used as a finite alphabet.
pub fn assemblage_scenario(
    id: &str,
    assemblage: Assemblage,
    bob: Option<(Vec<String>, Vec<crate::operators::Operator>)>,
    level: usize,
) -> Result<Scenario> {
    let (names, ops) = match bob {
        Some(b) => b,
        None => default_bob_operators(assemblage.dim_b())?,
    };
    let alice = AliceAlgebra::with_outcomes(
        (0..assemblage.n_inputs())
            .map(|x| Some(assemblage.outcomes(x).to_vec()))
            .collect(),
    );
    let words = crate::moments::generate_level(assemblage.n_inputs(), ops.len(), level);
    let bob = BobAlgebra::finite(names, ops.clone())?;
    Ok(Scenario {
        id: id.to_string(),
        source: ScenarioSource::Assemblage(AssemblageSource::new(assemblage, ops)?),
        bob,
        alice,
        words,
    })
}

/// Result of the data-forced face reduction.
#[derive(Clone, Debug)]
pub struct FaceOutcome {
    /// Dimension of the pinned block's kernel.
    pub kernel_dim: usize,
    /// Template rows of the pinned block.
    pub pinned_rows: Vec<usize>,
    /// Template rows removed as kernel pivots.
    pub dropped_rows: Vec<usize>,
    /// Residual of the kernel condition in the free parameters.
    pub residual: f64,
    /// Optimum of the reduced program, or `None` when the kernel condition
    /// has no solution (no completion exists).
    pub lambda: Option<f64>,
    /// The reduced program, when the kernel condition is solvable.
    pub problem: Option<SdpProblem>,
    /// Its solution.
    pub solution: Option<SdpSolution>,
}

/// Full record of one detection run.
#[derive(Clone, Debug)]
pub struct Detection {
    /// Observability policy used.
    pub policy: ObservabilityPolicy,
    /// Solver tolerance used.
    pub tol: f64,
    /// The compiled template.
    pub template: MomentTemplate,
    /// Template rows kept by the structural reduction.
    pub rows: Vec<usize>,
    /// The program over the kept rows.
    pub problem: SdpProblem,
    /// Its solution.
    pub solution: SdpSolution,
    /// Independent verification of the dual certificate, or the reason it
    /// was rejected.
    pub certificate: std::result::Result<Certificate, String>,
    /// Face reduction, when the pinned block is singular and the structural
    /// optimum is not already decisively negative.
    pub face: Option<FaceOutcome>,
    /// The decision.
    pub decision: Decision,
}

impl Detection {
    /// The optimum that drove the decision: the face optimum when the face
    /// reduction ran and was feasible, otherwise the structural optimum.
    pub fn lambda_decision(&self) -> f64 {
        match &self.face {
            Some(f) => f.lambda.unwrap_or(f64::NEG_INFINITY),
            None => self.solution.lambda_star,
        }
    }
}

/// Runs the detection test on a scenario.
pub fn detect(scenario: &Scenario, policy: ObservabilityPolicy, tol: f64) -> Result<Detection> {
    let template = scenario.template(policy)?;
    detect_template(template, tol)
}

/// Runs the detection test on a compiled template.
pub fn detect_template(template: MomentTemplate, tol: f64) -> Result<Detection> {
    let rows = template.independent_rows().to_vec();
    let export = template.export(&rows);
    let problem = SdpProblem::from_export(&export)?;
    let solution = solve(&problem, tol)?;
    if solution.status == SolveStatus::NumericalTrouble && !solution.lambda_star.is_finite() {
        return Err(Error::Numerical("solver produced no finite optimum".into()));
    }
    let certificate = certify(&solution, &problem).map_err(|e| e.to_string());
    let band = tolerances::DECISION_BAND_FACTOR * tol;

    let mut face = None;
    let decision = if solution.lambda_star < -band {
        Decision::Steering
    } else {
        face = face_reduce(&template, &rows, tol)?;
        match &face {
            Some(f) => match f.lambda {
                None => Decision::Steering,
                Some(l) => decide(l, tol),
            },
            None => decide(solution.lambda_star, tol),
        }
    };
    if solution.status == SolveStatus::NumericalTrouble && face.is_none() {
        return Err(Error::Numerical(format!(
            "solver did not converge (λ ≈ {:.3e}, primal residual {:.3e}, dual residual {:.3e})",
            solution.lambda_star, solution.primal_infeasibility, solution.dual_infeasibility
        )));
    }
    Ok(Detection {
        policy: template.policy(),
        tol,
        template,
        rows,
        problem,
        solution,
        certificate,
        face,
        decision,
    })
}

fn face_reduce(template: &MomentTemplate, rows: &[usize], tol: f64) -> Result<Option<FaceOutcome>> {
    let words = template.words().words();
    // pinned block, grown from the Bob-local rows
    let mut block: Vec<usize> = rows
        .iter()
        .copied()
        .filter(|&r| words[r].alice.is_identity())
        .collect();
    for &r in rows {
        if block.contains(&r) {
            continue;
        }
        if template.is_pinned(r, r) && block.iter().all(|&b| template.is_pinned(r, b)) {
            block.push(r);
        }
    }
    if block.is_empty() {
        return Ok(None);
    }
    let full = template.export(rows);
    let pos: Vec<usize> = block
        .iter()
        .map(|b| {
            rows.iter()
                .position(|r| r == b)
                .expect("block rows are kept rows")
        })
        .collect();
    let nb = pos.len();
    let g_pp = CMatrix::from_fn(nb, nb, |i, j| full.gamma_obs[(pos[i], pos[j])]);
    let h = (&g_pp + g_pp.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let kernel: Vec<DVector<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= tolerances::DATA_KERNEL * scale)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    if kernel.is_empty() {
        return Ok(None);
    }

    // Kernel condition Γ(t) v = 0 on every kept row, real-stacked.
    let nk = rows.len();
    let nf = full.free_dirs.len();
    let n_eq = 2 * nk * kernel.len();
    let mut a = DMatrix::zeros(n_eq, nf);
    let mut rhs = DVector::zeros(n_eq);
    for (kv, v) in kernel.iter().enumerate() {
        for r in 0..nk {
            let mut g0 = ZERO;
            for (b, &pb) in pos.iter().enumerate() {
                g0 += full.gamma_obs[(r, pb)] * v[b];
            }
            let row = 2 * (kv * nk + r);
            rhs[row] = -g0.re;
            rhs[row + 1] = -g0.im;
            for (k, f) in full.free_dirs.iter().enumerate() {
                let mut fk = ZERO;
                for (b, &pb) in pos.iter().enumerate() {
                    fk += f[(r, pb)] * v[b];
                }
                a[(row, k)] = fk.re;
                a[(row + 1, k)] = fk.im;
            }
        }
    }
    let (t0, residual) = least_squares(&a, &rhs, tolerances::RANK);
    let g_scale = full.gamma_obs.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let pinned_rows = block.clone();
    if residual > 1e-7 * g_scale {
        return Ok(Some(FaceOutcome {
            kernel_dim: kernel.len(),
            pinned_rows,
            dropped_rows: Vec::new(),
            residual,
            lambda: None,
            problem: None,
            solution: None,
        }));
    }
    let null = null_space(&a, tolerances::RANK);

    // Pivot rows of the kernel basis (Gaussian elimination, largest entry).
    let mut vecs: Vec<DVector<C64>> = kernel.clone();
    let mut pivots: Vec<usize> = Vec::new();
    for i in 0..vecs.len() {
        let (j, _) = vecs[i]
            .iter()
            .enumerate()
            .filter(|(j, _)| !pivots.contains(j))
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .expect("kernel vector has entries");
        let piv = vecs[i][j];
        for l in (i + 1)..vecs.len() {
            let f = vecs[l][j] / piv;
            let vi = vecs[i].clone();
            vecs[l] -= vi * f;
        }
        pivots.push(j);
    }
    let dropped_pos: Vec<usize> = pivots.iter().map(|&j| pos[j]).collect();
    let keep: Vec<usize> = (0..nk).filter(|p| !dropped_pos.contains(p)).collect();
    let dropped_rows: Vec<usize> = dropped_pos.iter().map(|&p| rows[p]).collect();

    let sub = |m: &CMatrix| CMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
    let mut g_face = full.gamma_obs.clone();
    for (f, &t) in full.free_dirs.iter().zip(t0.iter()) {
        g_face += f * C64::new(t, 0.0);
    }
    let g_face = sub(&g_face);
    let mut dirs: Vec<CMatrix> = Vec::new();
    for col in &null {
        let mut d = CMatrix::zeros(nk, nk);
        for (f, &c) in full.free_dirs.iter().zip(col.iter()) {
            if c != 0.0 {
                d += f * C64::new(c, 0.0);
            }
        }
        dirs.push(sub(&d));
    }
    let flat: Vec<DVector<C64>> = dirs
        .iter()
        .map(|d| DVector::from_iterator(d.len(), d.iter().copied()))
        .collect();
    let independent = independent_prefix(&flat, tolerances::RANK);
    let dirs: Vec<CMatrix> = independent.into_iter().map(|i| dirs[i].clone()).collect();
    let problem = SdpProblem::new(g_face, dirs)?;
    let sol = solve(&problem, tol)?;
    if sol.status == SolveStatus::NumericalTrouble {
        return Err(Error::Numerical(format!(
            "face problem did not converge (λ ≈ {:.3e})",
            sol.lambda_star
        )));
    }
    Ok(Some(FaceOutcome {
        kernel_dim: kernel.len(),
        pinned_rows,
        dropped_rows,
        residual,
        lambda: Some(sol.lambda_star),
        problem: Some(problem),
        solution: Some(sol),
    }))
}
