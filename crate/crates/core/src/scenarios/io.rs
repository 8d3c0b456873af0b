use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{CMatrix, Operator, C64};

use super::assemblage::{Assemblage, AssemblageInput};

/// JSON document for an assemblage:
/// `{dim_b, inputs: [{outcomes: [real], sigmas: [matrix]}]}`, where each
/// matrix is a list of rows and each entry a `[re, im]` pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblageDoc {
    pub dim_b: usize,
    pub inputs: Vec<InputDoc>,
}

/// One input of an [`AssemblageDoc`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub outcomes: Vec<f64>,
    pub sigmas: Vec<Vec<Vec<[f64; 2]>>>,
}

fn matrix_doc(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn matrix_from_doc(rows: &[Vec<[f64; 2]>], dim: usize) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Schema(format!("expected a {dim}x{dim} matrix")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl From<&Assemblage> for AssemblageDoc {
    fn from(a: &Assemblage) -> Self {
        Self {
            dim_b: a.dim_b(),
            inputs: a
                .inputs()
                .iter()
                .map(|inp| InputDoc {
                    outcomes: inp.outcomes.clone(),
                    sigmas: inp.sigmas.iter().map(|s| matrix_doc(s.matrix())).collect(),
                })
                .collect(),
        }
    }
}

impl AssemblageDoc {
    /// Validates the document and builds the assemblage.
    pub fn to_assemblage(&self) -> Result<Assemblage> {
        let inputs = self
            .inputs
            .iter()
            .map(|inp| {
                let sigmas = inp
                    .sigmas
                    .iter()
                    .map(|m| matrix_from_doc(m, self.dim_b).map(Operator::new))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AssemblageInput {
                    outcomes: inp.outcomes.clone(),
                    sigmas,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Assemblage::new(self.dim_b, inputs)
    }
}

/// Serializes an assemblage to pretty JSON.
pub fn assemblage_to_json(a: &Assemblage) -> Result<String> {
    Ok(serde_json::to_string_pretty(&AssemblageDoc::from(a))?)
}

/// Parses and validates an assemblage document.
pub fn assemblage_from_json(s: &str) -> Result<Assemblage> {
    let doc: AssemblageDoc = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
    doc.to_assemblage()
}
