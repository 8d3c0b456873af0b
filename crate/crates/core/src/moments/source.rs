use crate::error::{Error, Result};
use crate::operators::{Operator, C64};
use crate::scenarios::{Assemblage, GaussianStdForm, ProjectiveMeasurement, QuantumState};

/// Supplies observed moments `⟨A_x^ς ⊗ B_{y1} B_{y2} …⟩`.
pub trait MomentSource {
    /// Moment for `alice = Some((x, ς))` (or the Bob-local moment for
    /// `None`) and a word over the Bob operator list.
    fn moment(&self, alice: Option<(usize, u32)>, bob_word: &[usize]) -> Result<C64>;

    /// Number of Alice inputs.
    fn n_inputs(&self) -> usize;

    /// Number of Bob operators.
    fn n_bob_ops(&self) -> usize;

    /// Outcome labels of input `x`, if the source has a finite alphabet.
    fn outcome_labels(&self, x: usize) -> Option<Vec<f64>>;
}

/// Sources that also know Alice's actual operators, used to evaluate moment
/// matrices of the true model.
pub trait TrueModel: MomentSource {
    /// Alice's observable for input `x`.
    fn alice_observable(&self, x: usize) -> &Operator;

    /// `⟨(A_part) ⊗ M(word)⟩` for an arbitrary Alice operator.
    fn raw_moment(&self, alice_op: &Operator, bob_word: &[usize]) -> Result<C64>;

    /// Alice's dimension.
    fn dim_a(&self) -> usize;
}

fn word_operator(ops: &[Operator], dim: usize, word: &[usize]) -> Result<Operator> {
    let mut m = Operator::identity(dim);
    for &y in word {
        let op = ops
            .get(y)
            .ok_or_else(|| Error::UnresolvedLabel(format!("Bob operator index {y}")))?;
        m = m.mul(op);
    }
    Ok(m)
}

/// A bipartite state measured by Alice with projective measurements.
#[derive(Clone, Debug)]
pub struct StateSource {
    state: QuantumState,
    measurements: Vec<ProjectiveMeasurement>,
    bob_ops: Vec<Operator>,
}

impl StateSource {
    /// Checks dimensions of measurements and Bob operators.
    pub fn new(
        state: QuantumState,
        measurements: Vec<ProjectiveMeasurement>,
        bob_ops: Vec<Operator>,
    ) -> Result<Self> {
        if measurements.iter().any(|m| m.dim() != state.dim_a()) {
            return Err(Error::Dimension(
                "measurement does not act on Alice's space".into(),
            ));
        }
        if bob_ops.iter().any(|b| b.dim() != state.dim_b()) {
            return Err(Error::Dimension(
                "Bob operator does not act on Bob's space".into(),
            ));
        }
        Ok(Self {
            state,
            measurements,
            bob_ops,
        })
    }

    /// The state.
    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    /// Alice's measurements.
    pub fn measurements(&self) -> &[ProjectiveMeasurement] {
        &self.measurements
    }

    /// Bob's operators at the data dimension.
    pub fn bob_ops(&self) -> &[Operator] {
        &self.bob_ops
    }

    /// Bob operator of a word at the data dimension.
    pub fn bob_word(&self, word: &[usize]) -> Result<Operator> {
        word_operator(&self.bob_ops, self.state.dim_b(), word)
    }
}

impl MomentSource for StateSource {
    fn moment(&self, alice: Option<(usize, u32)>, bob_word: &[usize]) -> Result<C64> {
        let b = self.bob_word(bob_word)?;
        match alice {
            None | Some((_, 0)) => self.state.joint_moment(None, 0, &b),
            Some((x, p)) => {
                let m = self
                    .measurements
                    .get(x)
                    .ok_or_else(|| Error::UnresolvedLabel(format!("Alice input {x}")))?;
                self.state.joint_moment(Some(m.observable()), p, &b)
            }
        }
    }

    fn n_inputs(&self) -> usize {
        self.measurements.len()
    }

    fn n_bob_ops(&self) -> usize {
        self.bob_ops.len()
    }

    fn outcome_labels(&self, x: usize) -> Option<Vec<f64>> {
        self.measurements.get(x).map(|m| m.outcomes().to_vec())
    }
}

impl TrueModel for StateSource {
    fn alice_observable(&self, x: usize) -> &Operator {
        self.measurements[x].observable()
    }

    fn raw_moment(&self, alice_op: &Operator, bob_word: &[usize]) -> Result<C64> {
        let b = self.bob_word(bob_word)?;
        let sigma = self.state.conditional(alice_op)?;
        Ok(sigma.mul(&b).trace())
    }

    fn dim_a(&self) -> usize {
        self.state.dim_a()
    }
}

/// An assemblage with Bob's operators.
#[derive(Clone, Debug)]
pub struct AssemblageSource {
    assemblage: Assemblage,
    bob_ops: Vec<Operator>,
}

impl AssemblageSource {
    /// Checks Bob operator dimensions.
    pub fn new(assemblage: Assemblage, bob_ops: Vec<Operator>) -> Result<Self> {
        if bob_ops.iter().any(|b| b.dim() != assemblage.dim_b()) {
            return Err(Error::Dimension(
                "Bob operator does not act on Bob's space".into(),
            ));
        }
        Ok(Self {
            assemblage,
            bob_ops,
        })
    }

    /// The assemblage.
    pub fn assemblage(&self) -> &Assemblage {
        &self.assemblage
    }

    /// Bob's operators.
    pub fn bob_ops(&self) -> &[Operator] {
        &self.bob_ops
    }
}

impl MomentSource for AssemblageSource {
    fn moment(&self, alice: Option<(usize, u32)>, bob_word: &[usize]) -> Result<C64> {
        let b = word_operator(&self.bob_ops, self.assemblage.dim_b(), bob_word)?;
        match alice {
            None | Some((_, 0)) => self.assemblage.joint_moment(None, 0, &b),
            Some((x, p)) => {
                if x >= self.assemblage.n_inputs() {
                    return Err(Error::UnresolvedLabel(format!("Alice input {x}")));
                }
                self.assemblage.joint_moment(Some(x), p, &b)
            }
        }
    }

    fn n_inputs(&self) -> usize {
        self.assemblage.n_inputs()
    }

    fn n_bob_ops(&self) -> usize {
        self.bob_ops.len()
    }

    fn outcome_labels(&self, x: usize) -> Option<Vec<f64>> {
        (x < self.assemblage.n_inputs()).then(|| self.assemblage.outcomes(x).to_vec())
    }
}

/// Second-order moments of a two-mode Gaussian state in standard form, with
/// Alice's inputs `A0 = q_A`, `A1 = p_A` and Bob's operators `q = 0`, `p = 1`.
///
/// With the vacuum normalized to the identity covariance,
/// `⟨A0²⟩ = ⟨A1²⟩ = a/2`, `⟨q²⟩ = ⟨p²⟩ = b/2`, `⟨qp⟩ = i/2`,
/// `⟨A0 q⟩ = c1/2`, `⟨A1 p⟩ = c2/2`, and all first moments vanish. Only
/// moments up to second order are available.
#[derive(Clone, Copy, Debug)]
pub struct GaussianSource {
    g: GaussianStdForm,
}

impl GaussianSource {
    /// Wraps a standard form.
    pub fn new(g: GaussianStdForm) -> Self {
        Self { g }
    }

    /// The standard form.
    pub fn std_form(&self) -> &GaussianStdForm {
        &self.g
    }
}

impl MomentSource for GaussianSource {
    fn moment(&self, alice: Option<(usize, u32)>, bob_word: &[usize]) -> Result<C64> {
        let GaussianStdForm { a, b, c1, c2 } = self.g;
        let r = |v: f64| Ok(C64::new(v, 0.0));
        let alice = match alice {
            Some((_, 0)) => None,
            other => other,
        };
        if let Some((x, _)) = alice {
            if x > 1 {
                return Err(Error::UnresolvedLabel(format!("Alice input {x}")));
            }
        }
        if bob_word.iter().any(|&y| y > 1) {
            return Err(Error::UnresolvedLabel(
                "Gaussian source has only q and p".into(),
            ));
        }
        match (alice, bob_word) {
            (None, []) => r(1.0),
            (None, [_]) => r(0.0),
            (None, [y, z]) if y == z => r(b / 2.0),
            (None, [0, 1]) => Ok(C64::new(0.0, 0.5)),
            (None, [1, 0]) => Ok(C64::new(0.0, -0.5)),
            (Some((_, 1)), []) => r(0.0),
            (Some((_, 2)), []) => r(a / 2.0),
            (Some((x, 1)), [y]) => r(if x == *y {
                if x == 0 {
                    c1 / 2.0
                } else {
                    c2 / 2.0
                }
            } else {
                0.0
            }),
            _ => Err(Error::UnresolvedLabel(
                "Gaussian source provides moments up to second order only".into(),
            )),
        }
    }

    fn n_inputs(&self) -> usize {
        2
    }

    fn n_bob_ops(&self) -> usize {
        2
    }

    fn outcome_labels(&self, _x: usize) -> Option<Vec<f64>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli_set, ZERO};
    use crate::scenarios::{
        conditional_assemblage, measurement_from_observable, two_mode_squeezed_std_form,
        werner_state,
    };

    #[test]
    fn state_and_assemblage_sources_agree() {
        let (x, y, z, _) = pauli_set();
        let ms: Vec<_> = [&x, &y, &z]
            .iter()
            .map(|o| measurement_from_observable(o).unwrap())
            .collect();
        let st = werner_state(0.65).unwrap();
        let asm = conditional_assemblage(&st, &ms).unwrap();
        let s1 = StateSource::new(st, ms, vec![x.clone(), y.clone(), z.clone()]).unwrap();
        let s2 = AssemblageSource::new(asm, vec![x, y, z]).unwrap();
        for alice in [None, Some((0, 1)), Some((2, 2)), Some((1, 3))] {
            for word in [vec![], vec![0], vec![1, 2], vec![2, 0, 1]] {
                let a = s1.moment(alice, &word).unwrap();
                let b = s2.moment(alice, &word).unwrap();
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!((s1.moment(Some((1, 1)), &[1]).unwrap().re + 0.65).abs() < 1e-14);
        assert!(s2.moment(Some((5, 1)), &[1]).is_err());
        assert_eq!(s1.outcome_labels(0).unwrap().len(), 2);
    }

    #[test]
    fn gaussian_table() {
        let g = two_mode_squeezed_std_form(0.5).unwrap();
        let s = GaussianSource::new(g);
        assert!((s.moment(Some((0, 2)), &[]).unwrap().re - g.a / 2.0).abs() < 1e-15);
        assert!((s.moment(Some((0, 1)), &[0]).unwrap().re - g.c1 / 2.0).abs() < 1e-15);
        assert!((s.moment(Some((1, 1)), &[1]).unwrap().re - g.c2 / 2.0).abs() < 1e-15);
        assert_eq!(s.moment(Some((1, 1)), &[0]).unwrap(), ZERO);
        assert_eq!(s.moment(None, &[0, 1]).unwrap(), C64::new(0.0, 0.5));
        assert!(s.moment(None, &[0, 0, 1]).is_err());
    }
}
