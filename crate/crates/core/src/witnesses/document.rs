use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::C64;

use super::witness::{BobRef, Provenance, Witness, WitnessTerm};

/// Version tag of the witness document schema.
pub const WITNESS_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    version: u32,
    terms: Vec<TermDoc>,
    constant: String,
    provenance: ProvenanceDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    x: Option<usize>,
    power: u32,
    bob: BobDoc,
    coeff: [String; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    tag = "kind",
    content = "ref",
    rename_all = "lowercase"
)]
enum BobDoc {
    Word(Vec<String>),
    Basis(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceDoc {
    scenario: String,
    policy: String,
    string_set: Vec<String>,
    solver_tol: String,
    scale: String,
    beta: String,
}

/// Decimal rendering with 18 significant digits (exact round trip).
fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn parse(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Schema(format!("{what}: {s:?} is not a decimal number")))
}

/// Serializes a witness:
/// `{version, terms: [{x, power, bob: {kind, ref}, coeff: [re, im]}],
/// constant, provenance}` with every real number as a decimal string.
pub fn witness_to_json(w: &Witness) -> Result<String> {
    let doc = Doc {
        version: WITNESS_SCHEMA_VERSION,
        terms: w
            .terms
            .iter()
            .map(|t| TermDoc {
                x: t.x,
                power: t.power,
                bob: match &t.bob {
                    BobRef::Word(v) => BobDoc::Word(v.clone()),
                    BobRef::Basis(k) => BobDoc::Basis(*k),
                },
                coeff: [num(t.coeff.re), num(t.coeff.im)],
            })
            .collect(),
        constant: num(w.constant),
        provenance: ProvenanceDoc {
            scenario: w.provenance.scenario.clone(),
            policy: w.provenance.policy.clone(),
            string_set: w.provenance.string_set.clone(),
            solver_tol: num(w.provenance.solver_tol),
            scale: num(w.provenance.scale),
            beta: num(w.provenance.beta),
        },
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parses and validates a witness document.
pub fn witness_from_json(s: &str) -> Result<Witness> {
    let doc: Doc = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.version != WITNESS_SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "witness schema version {} (expected {WITNESS_SCHEMA_VERSION})",
            doc.version
        )));
    }
    let terms = doc
        .terms
        .into_iter()
        .map(|t| {
            if t.x.is_none() && t.power != 0 {
                return Err(Error::Schema(
                    "Bob-local term with nonzero Alice power".into(),
                ));
            }
            Ok(WitnessTerm {
                x: t.x,
                power: t.power,
                bob: match t.bob {
                    BobDoc::Word(v) => BobRef::Word(v),
                    BobDoc::Basis(k) => BobRef::Basis(k),
                },
                coeff: C64::new(parse(&t.coeff[0], "coeff")?, parse(&t.coeff[1], "coeff")?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let p = doc.provenance;
    Ok(Witness {
        terms,
        constant: parse(&doc.constant, "constant")?,
        provenance: Provenance {
            scenario: p.scenario,
            policy: p.policy,
            string_set: p.string_set,
            solver_tol: parse(&p.solver_tol, "solver_tol")?,
            scale: parse(&p.scale, "scale")?,
            beta: parse(&p.beta, "beta")?,
        },
    })
}
