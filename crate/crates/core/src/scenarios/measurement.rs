use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::{hermitian_deviation, CMatrix, Operator, C64};
use crate::tolerances;

/// A projective measurement with real outcome labels.
///
/// `source_observable` always equals `Σ_a a · M_a`.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    outcomes: Vec<f64>,
    projectors: Vec<Operator>,
    source_observable: Operator,
}

impl ProjectiveMeasurement {
    /// Builds a measurement from labelled projectors, validating
    /// completeness, idempotency and orthogonality (all to 1e-9).
    pub fn new(outcomes: Vec<f64>, projectors: Vec<Operator>) -> Result<Self> {
        if outcomes.len() != projectors.len() || projectors.is_empty() {
            return Err(Error::InvalidParameter(
                "need one projector per outcome and at least one outcome".into(),
            ));
        }
        let dim = projectors[0].dim();
        let mut total = CMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::Dimension("projectors differ in dimension".into()));
            }
            if p.mul(p).sub(p).max_abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "element {i} is not a projector"
                )));
            }
            for q in &projectors[i + 1..] {
                if p.mul(q).max_abs() > 1e-9 {
                    return Err(Error::InvalidParameter(
                        "projectors are not orthogonal".into(),
                    ));
                }
            }
            total += p.matrix();
        }
        if (total - CMatrix::identity(dim, dim))
            .iter()
            .any(|z| z.norm() > 1e-9)
        {
            return Err(Error::InvalidParameter(
                "projectors do not sum to identity".into(),
            ));
        }
        let source_observable = observable_of(&outcomes, &projectors);
        Ok(Self {
            outcomes,
            projectors,
            source_observable,
        })
    }

    /// Outcome labels.
    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    /// Projectors, in the order of [`Self::outcomes`].
    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// The observable `Σ_a a · M_a`.
    pub fn observable(&self) -> &Operator {
        &self.source_observable
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    /// Always false for a constructed measurement.
    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Same projectors with new outcome labels.
    pub fn relabel(&self, outcomes: Vec<f64>) -> Result<Self> {
        if outcomes.len() != self.outcomes.len() {
            return Err(Error::InvalidParameter(
                "relabel needs one label per outcome".into(),
            ));
        }
        Ok(Self {
            source_observable: observable_of(&outcomes, &self.projectors),
            outcomes,
            projectors: self.projectors.clone(),
        })
    }

    /// Same projectors with every label multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.relabel(self.outcomes.iter().map(|a| a * factor).collect())
            .expect("same number of labels")
    }
}

fn observable_of(outcomes: &[f64], projectors: &[Operator]) -> Operator {
    let dim = projectors[0].dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (a, p) in outcomes.iter().zip(projectors) {
        m += p.matrix() * C64::new(*a, 0.0);
    }
    Operator::new(m)
}

/// Spectral decomposition of a Hermitian observable, one projector per
/// distinct eigenvalue. Eigenvalues closer than 1e-8 are merged, and the
/// outcomes are listed in increasing order.
pub fn measurement_from_observable(a: &Operator) -> Result<ProjectiveMeasurement> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian(hermitian_deviation(a.matrix())));
    }
    let dim = a.dim();
    let eig = a.hermitian_part().matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g)
                if (eig.eigenvalues[i] - eig.eigenvalues[*g.last().unwrap()]).abs()
                    < tolerances::EIGEN_MERGE =>
            {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    let mut outcomes = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
        let mut p = CMatrix::zeros(dim, dim);
        for &i in &g {
            let v: DVector<C64> = eig.eigenvectors.column(i).into_owned();
            p += &v * v.adjoint();
        }
        outcomes.push(mean);
        projectors.push(Operator::new(p));
    }
    ProjectiveMeasurement::new(outcomes, projectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{generalized_quadratures, pauli_set};

    #[test]
    fn pauli_z_measurement() {
        let (_, _, z, _) = pauli_set();
        let m = measurement_from_observable(&z).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.outcomes()[0] + 1.0).abs() < 1e-14);
        assert!((m.outcomes()[1] - 1.0).abs() < 1e-14);
        assert!((m.projectors()[1].get(0, 0).re - 1.0).abs() < 1e-14);
        assert!((m.projectors()[0].get(1, 1).re - 1.0).abs() < 1e-14);
        assert!(m.observable().sub(&z).max_abs() < 1e-14);
    }

    #[test]
    fn identity_is_fully_degenerate() {
        let m = measurement_from_observable(&Operator::identity(3)).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m.outcomes()[0] - 1.0).abs() < 1e-14);
        assert!(m.projectors()[0].sub(&Operator::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn truncated_quadrature_has_simple_spectrum() {
        let (q, _) = generalized_quadratures(1, 8).unwrap();
        let m = measurement_from_observable(&q).unwrap();
        assert_eq!(m.len(), 8);
        for p in m.projectors() {
            assert!((p.trace().re - 1.0).abs() < 1e-12);
        }
        assert!(m.observable().sub(&q).max_abs() < 1e-12);
    }

    #[test]
    fn relabel_keeps_spectral_identity() {
        let (x, _, _, _) = pauli_set();
        let m = measurement_from_observable(&x).unwrap().scaled(-1.0);
        assert!(m.observable().add(&x).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(measurement_from_observable(&Operator::new(m)).is_err());
    }
}
