use crate::error::{Error, Result};
use crate::operators::{min_eigenvalue_hermitian, CMatrix, Operator, C64, ZERO};

use super::measurement::ProjectiveMeasurement;
use super::state::{trace_of_product, QuantumState};

/// Bob's conditional states for one of Alice's inputs.
#[derive(Clone, Debug)]
pub struct AssemblageInput {
    /// Outcome labels `a`.
    pub outcomes: Vec<f64>,
    /// Unnormalized conditional states `σ_{a|x}`, one per outcome.
    pub sigmas: Vec<Operator>,
}

/// An assemblage `{σ_{a|x}}` on Bob's space.
#[derive(Clone, Debug)]
pub struct Assemblage {
    dim_b: usize,
    inputs: Vec<AssemblageInput>,
}

impl Assemblage {
    /// Validates positivity (≥ −1e-9), normalization (1e-8) and
    /// no-signalling (1e-8).
    pub fn new(dim_b: usize, inputs: Vec<AssemblageInput>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidParameter(
                "assemblage needs at least one input".into(),
            ));
        }
        let mut marginal: Option<CMatrix> = None;
        for (x, inp) in inputs.iter().enumerate() {
            if inp.outcomes.len() != inp.sigmas.len() || inp.sigmas.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "input {x}: need one conditional state per outcome"
                )));
            }
            let mut sum = CMatrix::zeros(dim_b, dim_b);
            for (a, s) in inp.sigmas.iter().enumerate() {
                if s.dim() != dim_b {
                    return Err(Error::Dimension(format!(
                        "sigma({a}|{x}) has wrong dimension"
                    )));
                }
                if !s.is_hermitian() {
                    return Err(Error::InvalidParameter(format!(
                        "sigma({a}|{x}) is not Hermitian"
                    )));
                }
                let lmin = min_eigenvalue_hermitian(s.matrix());
                if lmin < -1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "sigma({a}|{x}) has negative eigenvalue {lmin:e}"
                    )));
                }
                sum += s.matrix();
            }
            if (sum.trace().re - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidParameter(format!(
                    "input {x}: conditional states have total trace {}",
                    sum.trace().re
                )));
            }
            match &marginal {
                None => marginal = Some(sum),
                Some(m) => {
                    if (m - &sum).iter().any(|z| z.norm() > 1e-8) {
                        return Err(Error::InvalidParameter(format!(
                            "input {x} violates no-signalling"
                        )));
                    }
                }
            }
        }
        Ok(Self { dim_b, inputs })
    }

    /// Bob's dimension.
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Number of Alice inputs.
    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// All inputs.
    pub fn inputs(&self) -> &[AssemblageInput] {
        &self.inputs
    }

    /// Outcome labels of input `x`.
    pub fn outcomes(&self, x: usize) -> &[f64] {
        &self.inputs[x].outcomes
    }

    /// `σ_{a|x}` by outcome index.
    pub fn sigma(&self, x: usize, a: usize) -> &Operator {
        &self.inputs[x].sigmas[a]
    }

    /// Bob's reduced state `Σ_a σ_{a|x}` (input 0).
    pub fn bob_marginal(&self) -> Operator {
        let mut m = CMatrix::zeros(self.dim_b, self.dim_b);
        for s in &self.inputs[0].sigmas {
            m += s.matrix();
        }
        Operator::new(m)
    }

    /// `Σ_a a^ς Tr[σ_{a|x} B]`; `x = None` (or `ς = 0`) gives the Bob-local
    /// moment `Tr[σ_B B]`.
    pub fn joint_moment(&self, x: Option<usize>, power: u32, b: &Operator) -> Result<C64> {
        if b.dim() != self.dim_b {
            return Err(Error::Dimension(format!(
                "Bob operator has dimension {}, assemblage has {}",
                b.dim(),
                self.dim_b
            )));
        }
        let x = match x {
            None => return Ok(trace_of_product(self.bob_marginal().matrix(), b.matrix())),
            Some(x) => x,
        };
        let inp = self
            .inputs
            .get(x)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown input index {x}")))?;
        let mut total = ZERO;
        for (a, s) in inp.outcomes.iter().zip(&inp.sigmas) {
            total += C64::new(a.powi(power as i32), 0.0) * trace_of_product(s.matrix(), b.matrix());
        }
        Ok(total)
    }
}

/// `σ_{a|x} = Tr_A[(M_{a|x} ⊗ 1) ρ]` for every input and outcome.
pub fn conditional_assemblage(
    state: &QuantumState,
    measurements: &[ProjectiveMeasurement],
) -> Result<Assemblage> {
    let mut inputs = Vec::with_capacity(measurements.len());
    for m in measurements {
        if m.dim() != state.dim_a() {
            return Err(Error::Dimension(format!(
                "measurement dimension {} vs dim_a = {}",
                m.dim(),
                state.dim_a()
            )));
        }
        let sigmas = m
            .projectors()
            .iter()
            .map(|p| state.conditional(p).map(|s| s.hermitian_part()))
            .collect::<Result<Vec<_>>>()?;
        inputs.push(AssemblageInput {
            outcomes: m.outcomes().to_vec(),
            sigmas,
        });
    }
    Assemblage::new(state.dim_b(), inputs)
}

/// A data source for joint moments `⟨A_x^ς ⊗ B⟩`.
#[derive(Clone, Copy, Debug)]
pub enum MomentData<'a> {
    /// A state together with Alice's observables, one per input.
    State {
        state: &'a QuantumState,
        observables: &'a [Operator],
    },
    /// An assemblage.
    Assemblage(&'a Assemblage),
}

/// `⟨A_x^ς ⊗ B⟩` from either data route; `x = None` is the Bob-local moment.
pub fn joint_moment(
    source: MomentData<'_>,
    x: Option<usize>,
    power: u32,
    b: &Operator,
) -> Result<C64> {
    match source {
        MomentData::State { state, observables } => {
            let a =
                match x {
                    None => None,
                    Some(x) => Some(observables.get(x).ok_or_else(|| {
                        Error::InvalidParameter(format!("unknown input index {x}"))
                    })?),
                };
            state.joint_moment(a, power, b)
        }
        MomentData::Assemblage(asm) => asm.joint_moment(x, power, b),
    }
}
