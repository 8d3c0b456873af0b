use crate::error::{Error, Result};
use crate::moments::{AliceWord, Classification, MomentSource, MomentTemplate};
use crate::operators::{HermitianBasis, Operator, C64};
use crate::pipeline::Detection;
use crate::scenarios::{joint_moment, MomentData};
use crate::sdp::{certify, SdpProblem, SdpSolution};

/// Bob-side descriptor of a witness term.
#[derive(Clone, Debug, PartialEq)]
pub enum BobRef {
    /// Product of named operators, left to right; empty for the identity.
    Word(Vec<String>),
    /// Element of the orthonormal Gell-Mann-style basis of Bob's space
    /// ([`HermitianBasis::gell_mann`]).
    Basis(usize),
}

/// One term `coeff · ⟨A_x^power ⊗ B⟩`; `x = None` is a Bob-local moment.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTerm {
    /// Alice's input, or `None` for Bob-local moments.
    pub x: Option<usize>,
    /// Power of Alice's observable (0 when `x` is `None`).
    pub power: u32,
    /// Bob's operator.
    pub bob: BobRef,
    /// Complex coefficient.
    pub coeff: C64,
}

/// Where a witness came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// Scenario identifier.
    pub scenario: String,
    /// Observability policy.
    pub policy: String,
    /// The string set, one display label per string.
    pub string_set: Vec<String>,
    /// Solver tolerance.
    pub solver_tol: f64,
    /// Factor the raw dual functional was divided by.
    pub scale: f64,
    /// Raw dual bound `β⋆` before normalization.
    pub beta: f64,
}

/// A linear steering witness `β = constant + Σ coeff · moment ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Moment terms.
    pub terms: Vec<WitnessTerm>,
    /// Constant (the coefficient of `⟨1 ⊗ 1⟩`).
    pub constant: f64,
    /// Origin of the witness.
    pub provenance: Provenance,
}

impl Witness {
    /// Complex value on data given as a moment oracle; Bob words are
    /// resolved through `bob_names` (index = operator index of the source).
    pub fn evaluate_source_complex(
        &self,
        source: &dyn MomentSource,
        bob_names: &[String],
    ) -> Result<C64> {
        let mut total = C64::new(self.constant, 0.0);
        for t in &self.terms {
            let word = match &t.bob {
                BobRef::Word(w) => {
                    w.iter()
                        .map(|n| {
                            bob_names.iter().position(|b| b == n).ok_or_else(|| {
                                Error::UnresolvedLabel(format!("Bob operator {n:?}"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                BobRef::Basis(k) => {
                    return Err(Error::UnresolvedLabel(format!(
                        "basis element {k} needs operator data, not a moment oracle"
                    )))
                }
            };
            if let Some(x) = t.x {
                if x >= source.n_inputs() {
                    return Err(Error::UnresolvedLabel(format!("Alice input {x}")));
                }
            }
            let alice = t.x.map(|x| (x, t.power));
            total += t.coeff * source.moment(alice, &word)?;
        }
        Ok(total)
    }

    /// Witness value (real part) on a moment oracle.
    pub fn evaluate_source(&self, source: &dyn MomentSource, bob_names: &[String]) -> Result<f64> {
        Ok(self.evaluate_source_complex(source, bob_names)?.re)
    }

    /// Complex value on a state with Alice's observables or an assemblage,
    /// with Bob's named operators given explicitly.
    pub fn evaluate_complex(
        &self,
        data: MomentData<'_>,
        bob: &[(String, Operator)],
    ) -> Result<C64> {
        let dim_b = match data {
            MomentData::State { state, .. } => state.dim_b(),
            MomentData::Assemblage(a) => a.dim_b(),
        };
        let mut basis: Option<HermitianBasis> = None;
        let mut total = C64::new(self.constant, 0.0);
        for t in &self.terms {
            let op = match &t.bob {
                BobRef::Word(w) => {
                    let mut m = Operator::identity(dim_b);
                    for n in w {
                        let (_, b) = bob
                            .iter()
                            .find(|(name, _)| name == n)
                            .ok_or_else(|| Error::UnresolvedLabel(format!("Bob operator {n:?}")))?;
                        if b.dim() != dim_b {
                            return Err(Error::Dimension(format!(
                                "Bob operator {n:?} has dimension {}",
                                b.dim()
                            )));
                        }
                        m = m.mul(b);
                    }
                    m
                }
                BobRef::Basis(k) => {
                    let basis = basis.get_or_insert_with(|| HermitianBasis::gell_mann(dim_b));
                    basis
                        .elements()
                        .get(*k)
                        .cloned()
                        .ok_or_else(|| Error::UnresolvedLabel(format!("basis element {k}")))?
                }
            };
            let v = joint_moment(data, t.x, t.power, &op).map_err(|e| match e {
                Error::InvalidParameter(m) => Error::UnresolvedLabel(m),
                other => other,
            })?;
            total += t.coeff * v;
        }
        Ok(total)
    }

    /// Witness value (real part) on a state or assemblage.
    pub fn evaluate(&self, data: MomentData<'_>, bob: &[(String, Operator)]) -> Result<f64> {
        Ok(self.evaluate_complex(data, bob)?.re)
    }
}

/// Reads the witness off a certified dual solution.
///
/// The dual bound is `β = Σ_o μ_o b_o` over the pinned unknowns `o`, and each
/// pinned unknown is a known combination of moments
/// `⟨α_o ⊗ Σ_j c_j w_j⟩`, so the witness coefficient of
/// `⟨α ⊗ w⟩` is `Σ_o μ_o c_{o,w}`. The moment `⟨1 ⊗ 1⟩ = 1` becomes the
/// constant. Coefficients are finally scaled so the largest magnitude is 1.
pub fn witness_from_dual(
    template: &MomentTemplate,
    rows: &[usize],
    problem: &SdpProblem,
    solution: &SdpSolution,
    scenario: &str,
    solver_tol: f64,
) -> Result<Witness> {
    certify(solution, problem)?;
    let export = template.export(rows);
    if export.pins.len() != solution.mu.len() {
        return Err(Error::Certificate(
            "multipliers do not match the template pins".into(),
        ));
    }
    let names = template.bob_names();
    let mut constant = 0.0;
    let mut raw: Vec<(Option<usize>, u32, Vec<usize>, C64)> = Vec::new();
    for (&u, &mu) in export.pin_unknowns.iter().zip(&solution.mu) {
        let unk = &template.unknowns()[u];
        debug_assert!(matches!(
            unk.classification,
            Classification::Observable { .. }
        ));
        let (x, power) = alice_label(&unk.alice)?;
        for (c, w) in &unk.bob_poly {
            let coeff = c * mu;
            if x.is_none() && w.is_empty() {
                constant += coeff.re;
                continue;
            }
            match raw
                .iter_mut()
                .find(|t| t.0 == x && t.1 == power && &t.2 == w)
            {
                Some(t) => t.3 += coeff,
                None => raw.push((x, power, w.clone(), coeff)),
            }
        }
    }
    raw.retain(|t| t.3.norm() > 1e-14);
    let scale = raw.iter().map(|t| t.3.norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 {
        scale
    } else {
        constant.abs().max(1.0)
    };
    let terms = raw
        .into_iter()
        .map(|(x, power, w, c)| WitnessTerm {
            x,
            power,
            bob: BobRef::Word(w.iter().map(|&i| names[i].clone()).collect()),
            coeff: c / scale,
        })
        .collect();
    Ok(Witness {
        terms,
        constant: constant / scale,
        provenance: Provenance {
            scenario: scenario.to_string(),
            policy: template.policy().to_string(),
            string_set: template
                .words()
                .words()
                .iter()
                .map(|w| w.display(names))
                .collect(),
            solver_tol,
            scale,
            beta: solution.beta,
        },
    })
}

/// [`witness_from_dual`] on the structural program of a detection run.
pub fn witness_from_detection(det: &Detection, scenario: &str) -> Result<Witness> {
    witness_from_dual(
        &det.template,
        &det.rows,
        &det.problem,
        &det.solution,
        scenario,
        det.tol,
    )
}

fn alice_label(a: &AliceWord) -> Result<(Option<usize>, u32)> {
    if a.is_identity() {
        return Ok((None, 0));
    }
    a.single_input()
        .map(|(x, p)| (Some(x), p))
        .ok_or_else(|| Error::Certificate(format!("pinned moment with multi-input Alice word {a}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::ObservabilityPolicy;
    use crate::operators::pauli_set;
    use crate::pipeline::{detect, werner_scenario, ScenarioSource};
    use crate::scenarios::{conditional_assemblage, werner_state};

    #[test]
    fn werner_optimal_witness() {
        let sc = werner_scenario(1.0).unwrap();
        let det = detect(&sc, ObservabilityPolicy::Full, 1e-9).unwrap();
        let w = witness_from_detection(&det, &sc.id).unwrap();
        assert_eq!(w.terms.len(), 3);
        for (x, t) in w.terms.iter().enumerate() {
            assert_eq!(t.x, Some(x));
            assert_eq!(t.power, 1);
            assert!(
                (t.coeff - C64::new(1.0, 0.0)).norm() < 1e-5,
                "{:?}",
                t.coeff
            );
        }
        assert!((w.constant - 3f64.sqrt()).abs() < 1e-4);

        // value on the generating data equals the normalized dual bound
        let ScenarioSource::State(src) = &sc.source else {
            unreachable!()
        };
        let v = w.evaluate_source(src, sc.bob.names()).unwrap();
        assert!((v - det.solution.beta / w.provenance.scale).abs() < 1e-6);

        // both data routes agree; the Werner family gives √3 − 3w
        let (x, y, z, _) = pauli_set();
        let bob = vec![
            ("X".to_string(), x),
            ("Y".to_string(), y),
            ("Z".to_string(), z),
        ];
        for ww in [0.2, 0.5, 0.9] {
            let st = werner_state(ww).unwrap();
            let asm = conditional_assemblage(&st, src.measurements()).unwrap();
            let obs: Vec<Operator> = src
                .measurements()
                .iter()
                .map(|m| m.observable().clone())
                .collect();
            let a = w
                .evaluate(
                    MomentData::State {
                        state: &st,
                        observables: &obs,
                    },
                    &bob,
                )
                .unwrap();
            let b = w.evaluate(MomentData::Assemblage(&asm), &bob).unwrap();
            assert!((a - b).abs() < 1e-9);
            assert!((a - (3f64.sqrt() - 3.0 * ww)).abs() < 1e-4);
        }
        assert!(matches!(
            w.evaluate(
                MomentData::Assemblage(
                    &conditional_assemblage(&werner_state(0.5).unwrap(), src.measurements())
                        .unwrap()
                ),
                &bob[..1]
            ),
            Err(Error::UnresolvedLabel(_))
        ));
    }
}
