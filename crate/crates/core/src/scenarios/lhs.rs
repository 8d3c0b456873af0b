use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::{CMatrix, Operator, C64, ZERO};

use super::assemblage::{Assemblage, AssemblageInput};
use super::measurement::ProjectiveMeasurement;
use super::state::QuantumState;

/// Default cap on Alice's dimension in [`build_separable_model`].
pub const DEFAULT_ALICE_DIM_CAP: usize = 4096;

/// A local-hidden-state model `σ_{a|x} = Σ_λ q_λ p(a|x,λ) ρ_λ`.
#[derive(Clone, Debug)]
pub struct LhsModel {
    /// Probabilities `q_λ`.
    pub weights: Vec<f64>,
    /// `response[λ][x][a] = p(a|x,λ)`.
    pub response: Vec<Vec<Vec<f64>>>,
    /// Hidden states `ρ_λ` on Bob's space.
    pub hidden_states: Vec<Operator>,
    /// Outcome labels for each input.
    pub outcomes: Vec<Vec<f64>>,
}

impl LhsModel {
    /// Checks that weights and responses are probability distributions and
    /// hidden states are density matrices.
    pub fn validate(&self) -> Result<()> {
        let n_lambda = self.weights.len();
        if n_lambda == 0 || self.response.len() != n_lambda || self.hidden_states.len() != n_lambda
        {
            return Err(Error::InvalidParameter(
                "inconsistent hidden-variable count".into(),
            ));
        }
        if self.weights.iter().any(|&q| q < 0.0)
            || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidParameter(
                "weights are not a probability vector".into(),
            ));
        }
        let dim_b = self.hidden_states[0].dim();
        for (l, table) in self.response.iter().enumerate() {
            if table.len() != self.outcomes.len() {
                return Err(Error::InvalidParameter(format!(
                    "response table {l} has wrong input count"
                )));
            }
            for (x, col) in table.iter().enumerate() {
                if col.len() != self.outcomes[x].len()
                    || col.iter().any(|&p| p < 0.0)
                    || (col.iter().sum::<f64>() - 1.0).abs() > 1e-12
                {
                    return Err(Error::InvalidParameter(format!(
                        "response p(.|{x},{l}) is not a distribution"
                    )));
                }
            }
            let rho = &self.hidden_states[l];
            if rho.dim() != dim_b
                || !rho.is_hermitian()
                || (rho.trace().re - 1.0).abs() > 1e-10
                || crate::operators::min_eigenvalue_hermitian(rho.matrix()) < -1e-10
            {
                return Err(Error::InvalidParameter(format!(
                    "hidden state {l} is not a density matrix"
                )));
            }
        }
        Ok(())
    }

    /// Bob's dimension.
    pub fn dim_b(&self) -> usize {
        self.hidden_states[0].dim()
    }

    /// The assemblage generated by the model.
    pub fn assemblage(&self) -> Result<Assemblage> {
        let d = self.dim_b();
        let mut inputs = Vec::with_capacity(self.outcomes.len());
        for (x, labels) in self.outcomes.iter().enumerate() {
            let mut sigmas = Vec::with_capacity(labels.len());
            for a in 0..labels.len() {
                let mut s = CMatrix::zeros(d, d);
                for (l, rho) in self.hidden_states.iter().enumerate() {
                    let c = self.weights[l] * self.response[l][x][a];
                    s += rho.matrix() * C64::new(c, 0.0);
                }
                sigmas.push(Operator::new(s));
            }
            inputs.push(AssemblageInput {
                outcomes: labels.clone(),
                sigmas,
            });
        }
        Assemblage::new(d, inputs)
    }
}

/// Shape of a random local-hidden-state model.
#[derive(Clone, Debug)]
pub struct LhsSpec {
    /// Outcome labels per input (the number of inputs is its length).
    pub outcomes: Vec<Vec<f64>>,
    /// Bob's dimension.
    pub dim_b: usize,
    /// Number of hidden variables.
    pub n_lambda: usize,
    /// Hidden states are supported on the first `support` basis vectors
    /// (defaults to the full space). Restricting the support keeps random
    /// data inside the region where truncated bosonic operators are exact.
    pub support: Option<usize>,
}

/// Default outcome labels: `±1` for two outcomes, `0, 1, …` otherwise.
pub fn default_labels(n_outcomes: usize) -> Vec<f64> {
    if n_outcomes == 2 {
        vec![1.0, -1.0]
    } else {
        (0..n_outcomes).map(|a| a as f64).collect()
    }
}

fn flat_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize, support: usize) -> Operator {
    let mut g = CMatrix::zeros(dim, support);
    for i in 0..support {
        for j in 0..support {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            g[(i, j)] = C64::new(re, im);
        }
    }
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Operator::new(rho / C64::new(tr, 0.0)).hermitian_part()
}

/// Samples a random model of the given shape: `q_λ` and every `p(·|x,λ)` flat
/// on their simplices, hidden states `G G†/Tr` with complex Gaussian `G`.
/// Deterministic given `seed`.
pub fn random_lhs_model(spec: &LhsSpec, seed: u64) -> Result<LhsModel> {
    if spec.outcomes.is_empty() || spec.dim_b == 0 || spec.n_lambda == 0 {
        return Err(Error::InvalidParameter(
            "all counts must be positive".into(),
        ));
    }
    let support = spec.support.unwrap_or(spec.dim_b);
    if support == 0 || support > spec.dim_b {
        return Err(Error::InvalidParameter(
            "support must lie in 1..=dim_b".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = flat_simplex(&mut rng, spec.n_lambda);
    let mut response = Vec::with_capacity(spec.n_lambda);
    let mut hidden_states = Vec::with_capacity(spec.n_lambda);
    for _ in 0..spec.n_lambda {
        response.push(
            spec.outcomes
                .iter()
                .map(|labels| flat_simplex(&mut rng, labels.len()))
                .collect(),
        );
        hidden_states.push(random_density(&mut rng, spec.dim_b, support));
    }
    let model = LhsModel {
        weights,
        response,
        hidden_states,
        outcomes: spec.outcomes.clone(),
    };
    model.validate()?;
    Ok(model)
}

/// Random unsteerable assemblage with default outcome labels, returned with
/// its generating model.
pub fn random_unsteerable_assemblage(
    n_inputs: usize,
    n_outcomes: usize,
    dim_b: usize,
    n_lambda: usize,
    seed: u64,
) -> Result<(Assemblage, LhsModel)> {
    if n_inputs == 0 || n_outcomes == 0 {
        return Err(Error::InvalidParameter(
            "all counts must be positive".into(),
        ));
    }
    let spec = LhsSpec {
        outcomes: vec![default_labels(n_outcomes); n_inputs],
        dim_b,
        n_lambda,
        support: None,
    };
    let model = random_lhs_model(&spec, seed)?;
    Ok((model.assemblage()?, model))
}

/// A separable state with commuting (diagonal) Alice observables realizing an
/// unsteerable assemblage.
#[derive(Clone, Debug)]
pub struct SeparableModel {
    /// `Σ_{a⃗} |a⃗⟩⟨a⃗| ⊗ ω_{a⃗}`.
    pub state: QuantumState,
    /// Diagonal observables `A_x`.
    pub observables: Vec<Operator>,
    /// Their spectral measurements, outcomes in the model's label order.
    pub measurements: Vec<ProjectiveMeasurement>,
}

/// [`build_separable_model_with_cap`] with [`DEFAULT_ALICE_DIM_CAP`].
pub fn build_separable_model(model: &LhsModel) -> Result<SeparableModel> {
    build_separable_model_with_cap(model, DEFAULT_ALICE_DIM_CAP)
}

/// Realizes a model as `ρ̄ = Σ_{a⃗} |a⃗⟩⟨a⃗| ⊗ ω_{a⃗}` with
/// `ω_{a⃗} = Σ_λ q_λ Π_x p(a_x|x,λ) ρ_λ`, where Alice's basis enumerates
/// outcome tuples `a⃗` and `A_x` is diagonal with entry `a_x`.
pub fn build_separable_model_with_cap(model: &LhsModel, cap: usize) -> Result<SeparableModel> {
    model.validate()?;
    let radices: Vec<usize> = model.outcomes.iter().map(Vec::len).collect();
    let dim_a = radices
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r));
    let dim_a = match dim_a {
        Some(d) if d <= cap => d,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "Alice dimension exceeds the cap of {cap}"
            )))
        }
    };
    let db = model.dim_b();
    let tuple = |mut idx: usize| -> Vec<usize> {
        // last input varies fastest
        let mut t = vec![0; radices.len()];
        for x in (0..radices.len()).rev() {
            t[x] = idx % radices[x];
            idx /= radices[x];
        }
        t
    };
    let n = dim_a * db;
    let mut rho = CMatrix::zeros(n, n);
    for idx in 0..dim_a {
        let t = tuple(idx);
        let mut omega = CMatrix::zeros(db, db);
        for (l, rl) in model.hidden_states.iter().enumerate() {
            let c: f64 = model.weights[l]
                * t.iter()
                    .enumerate()
                    .map(|(x, &a)| model.response[l][x][a])
                    .product::<f64>();
            if c != 0.0 {
                omega += rl.matrix() * C64::new(c, 0.0);
            }
        }
        rho.view_mut((idx * db, idx * db), (db, db))
            .copy_from(&omega);
    }
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let state = QuantumState::new(dim_a, db, rho)?;
    let mut observables = Vec::with_capacity(radices.len());
    let mut measurements = Vec::with_capacity(radices.len());
    for (x, labels) in model.outcomes.iter().enumerate() {
        let diag: Vec<f64> = (0..dim_a).map(|idx| labels[tuple(idx)[x]]).collect();
        observables.push(Operator::diagonal(&diag));
        let projectors = (0..labels.len())
            .map(|a| {
                let v = DVector::from_iterator(
                    dim_a,
                    (0..dim_a).map(|idx| {
                        if tuple(idx)[x] == a {
                            C64::new(1.0, 0.0)
                        } else {
                            ZERO
                        }
                    }),
                );
                Operator::new(CMatrix::from_diagonal(&v))
            })
            .collect();
        measurements.push(ProjectiveMeasurement::new(labels.clone(), projectors)?);
    }
    Ok(SeparableModel {
        state,
        observables,
        measurements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::conditional_assemblage;

    #[test]
    fn single_hidden_variable_is_proportional() {
        let (asm, model) = random_unsteerable_assemblage(3, 2, 3, 1, 7).unwrap();
        let rho = &model.hidden_states[0];
        for x in 0..3 {
            for a in 0..2 {
                let s = asm.sigma(x, a);
                let t = s.trace().re;
                assert!(s.sub(&rho.scale(C64::new(t, 0.0))).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reconstruction_and_determinism() {
        let (asm, model) = random_unsteerable_assemblage(2, 3, 2, 4, 11).unwrap();
        let again = model.assemblage().unwrap();
        for x in 0..2 {
            for a in 0..3 {
                assert!(asm.sigma(x, a).sub(again.sigma(x, a)).max_abs() <= 1e-12);
            }
        }
        let (asm2, _) = random_unsteerable_assemblage(2, 3, 2, 4, 11).unwrap();
        assert_eq!(asm.sigma(1, 2).matrix(), asm2.sigma(1, 2).matrix());
        assert_eq!(asm.outcomes(0), &[0.0, 1.0, 2.0]);
        let (d, _) = random_unsteerable_assemblage(2, 2, 2, 2, 1).unwrap();
        assert_eq!(d.outcomes(1), &[1.0, -1.0]);
    }

    #[test]
    fn separable_model_round_trip() {
        let (asm, model) = random_unsteerable_assemblage(2, 2, 2, 3, 5).unwrap();
        let sep = build_separable_model(&model).unwrap();
        assert_eq!(sep.state.dim_a(), 4);
        assert_eq!(sep.observables[0].get(0, 0).re, 1.0);
        assert_eq!(sep.observables[0].get(2, 2).re, -1.0);
        let a0 = &sep.observables[0];
        let a1 = &sep.observables[1];
        assert_eq!(a0.mul(a1).sub(&a1.mul(a0)).max_abs(), 0.0);
        let back = conditional_assemblage(&sep.state, &sep.measurements).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                assert!(back.sigma(x, a).sub(asm.sigma(x, a)).max_abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let (_, model) = random_unsteerable_assemblage(3, 3, 2, 2, 0).unwrap();
        assert!(build_separable_model_with_cap(&model, 26).is_err());
        assert!(build_separable_model_with_cap(&model, 27).is_ok());
    }

    #[test]
    fn restricted_support() {
        let spec = LhsSpec {
            outcomes: vec![vec![0.5, -0.5]; 2],
            dim_b: 6,
            n_lambda: 3,
            support: Some(3),
        };
        let m = random_lhs_model(&spec, 3).unwrap();
        for rho in &m.hidden_states {
            for i in 3..6 {
                assert_eq!(rho.get(i, i).norm(), 0.0);
            }
        }
    }
}
