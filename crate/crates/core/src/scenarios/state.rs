use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::{
    hermitian_deviation, min_eigenvalue_hermitian, tensor, CMatrix, Operator, C64, ZERO,
};
use crate::tolerances;

/// A bipartite density matrix on `C^{dim_a} ⊗ C^{dim_b}`.
#[derive(Clone, Debug)]
pub struct QuantumState {
    dim_a: usize,
    dim_b: usize,
    rho: CMatrix,
}

impl QuantumState {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10).
    pub fn new(dim_a: usize, dim_b: usize, rho: CMatrix) -> Result<Self> {
        let n = dim_a * dim_b;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Dimension(format!(
                "density matrix is {}x{}, expected {n}x{n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let dev = hermitian_deviation(&rho);
        if dev > tolerances::HERMITIAN {
            return Err(Error::NotHermitian(dev));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        let lmin = min_eigenvalue_hermitian(&rho);
        if lmin < -1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {lmin:e}"
            )));
        }
        Ok(Self { dim_a, dim_b, rho })
    }

    /// Product state `ρ_A ⊗ ρ_B`.
    pub fn product(rho_a: &Operator, rho_b: &Operator) -> Result<Self> {
        Self::new(rho_a.dim(), rho_b.dim(), tensor(rho_a, rho_b).into_matrix())
    }

    /// Alice's dimension.
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    /// Bob's dimension.
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Density matrix.
    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// `Tr[O ρ]` for an operator on the joint space.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.dim() != self.rho.nrows() {
            return Err(Error::Dimension(
                "operator does not act on the joint space".into(),
            ));
        }
        Ok(trace_of_product(op.matrix(), &self.rho))
    }

    /// `Tr_A[(M ⊗ 1) ρ]`, Bob's unnormalized conditional state for an
    /// operator `M` on Alice's side.
    pub fn conditional(&self, m: &Operator) -> Result<Operator> {
        if m.dim() != self.dim_a {
            return Err(Error::Dimension(format!(
                "Alice operator has dimension {}, state has dim_a = {}",
                m.dim(),
                self.dim_a
            )));
        }
        let (da, db) = (self.dim_a, self.dim_b);
        let mut out = CMatrix::zeros(db, db);
        for i in 0..da {
            for k in 0..da {
                let mik = m.get(i, k);
                if mik == ZERO {
                    continue;
                }
                // (M ⊗ 1) ρ, block (i, i) summed: Σ_k M_ik ρ_(k,i)
                let block = self.rho.view((k * db, i * db), (db, db));
                out += block * mik;
            }
        }
        Ok(Operator::new(out))
    }

    /// Bob's reduced state `Tr_A ρ`.
    pub fn reduced_b(&self) -> Operator {
        self.conditional(&Operator::identity(self.dim_a))
            .expect("identity has matching dimension")
    }

    /// `Tr[(A^ς ⊗ B) ρ]`; `alice = None` means the Alice identity.
    pub fn joint_moment(&self, alice: Option<&Operator>, power: u32, b: &Operator) -> Result<C64> {
        if b.dim() != self.dim_b {
            return Err(Error::Dimension(format!(
                "Bob operator has dimension {}, state has dim_b = {}",
                b.dim(),
                self.dim_b
            )));
        }
        let a_pow = match alice {
            Some(a) if power > 0 => a.pow(power),
            Some(a) => Operator::identity(a.dim()),
            None => Operator::identity(self.dim_a),
        };
        let sigma = self.conditional(&a_pow)?;
        Ok(trace_of_product(b.matrix(), sigma.matrix()))
    }
}

/// `Tr[A B]` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Two-qubit Werner state `w|ψ⁻⟩⟨ψ⁻| + (1 − w) 1/4`.
pub fn werner_state(w: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidParameter(format!(
            "Werner weight w = {w} outside [0, 1]"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DVector::from_vec(vec![ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]);
    let singlet = &psi * psi.adjoint();
    let rho = singlet * C64::new(w, 0.0) + CMatrix::identity(4, 4) * C64::new((1.0 - w) / 4.0, 0.0);
    QuantumState::new(2, 2, rho)
}

/// Lossy N00N state `(1 − η)|00⟩⟨00| + η|N00N⟩⟨N00N|` with
/// `|N00N⟩ = (|N0⟩ − |0N⟩)/√2`, both modes truncated to `d` Fock levels.
pub fn lossy_noon_state(n: u32, eta: f64, d: usize) -> Result<QuantumState> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "photon number N must be positive".into(),
        ));
    }
    if d <= n as usize {
        return Err(Error::InvalidParameter(format!(
            "truncation d = {d} must exceed N = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "transmission eta = {eta} outside [0, 1]"
        )));
    }
    let dim = d * d;
    let idx = |na: usize, nb: usize| na * d + nb;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut vac = DVector::from_element(dim, ZERO);
    vac[idx(0, 0)] = C64::new(1.0, 0.0);
    let mut noon = DVector::from_element(dim, ZERO);
    noon[idx(n as usize, 0)] = C64::new(s, 0.0);
    noon[idx(0, n as usize)] = C64::new(-s, 0.0);
    let rho = &vac * vac.adjoint() * C64::new(1.0 - eta, 0.0)
        + &noon * noon.adjoint() * C64::new(eta, 0.0);
    QuantumState::new(d, d, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{generalized_quadratures, pauli_set};

    #[test]
    fn werner_endpoints() {
        let rho0 = werner_state(0.0).unwrap();
        assert!((rho0.rho() - CMatrix::identity(4, 4) * C64::new(0.25, 0.0)).norm() < 1e-15);
        let (x, y, z, _) = pauli_set();
        let s = werner_state(1.0).unwrap();
        assert!((s.expectation(&tensor(&x, &x)).unwrap().re + 1.0).abs() < 1e-14);
        for w in [0.0, 0.3, 0.77, 1.0] {
            let s = werner_state(w).unwrap();
            for (i, a) in [&x, &y, &z].into_iter().enumerate() {
                for (j, b) in [&x, &y, &z].into_iter().enumerate() {
                    let e = s.expectation(&tensor(a, b)).unwrap();
                    let expect = if i == j { -w } else { 0.0 };
                    assert!((e - C64::new(expect, 0.0)).norm() < 1e-14);
                }
            }
        }
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(-0.1).is_err());
    }

    #[test]
    fn noon_vacuum_and_correlations() {
        let s = lossy_noon_state(1, 0.0, 4).unwrap();
        assert!((s.rho()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((s.rho().norm() - 1.0).abs() < 1e-15);
        for d in [4usize, 6, 8] {
            let (q, _) = generalized_quadratures(1, d).unwrap();
            for eta in [0.0, 0.3, 0.67, 1.0] {
                let s = lossy_noon_state(1, eta, d).unwrap();
                let m = s.joint_moment(Some(&q), 1, &q).unwrap();
                assert!(
                    (m - C64::new(-eta / 2.0, 0.0)).norm() < 1e-14,
                    "d={d} eta={eta}"
                );
            }
        }
    }

    #[test]
    fn noon_reduced_state_at_unit_transmission() {
        let s = lossy_noon_state(1, 1.0, 5).unwrap();
        let rb = s.reduced_b();
        let mut expect = CMatrix::zeros(5, 5);
        expect[(0, 0)] = C64::new(0.5, 0.0);
        expect[(1, 1)] = C64::new(0.5, 0.0);
        assert!((rb.matrix() - expect).norm() < 1e-15);
        assert!(lossy_noon_state(2, 0.5, 2).is_err());
        assert!(lossy_noon_state(1, 1.5, 4).is_err());
    }

    #[test]
    fn conditional_matches_direct_trace() {
        let s = werner_state(0.6).unwrap();
        let (x, _, z, _) = pauli_set();
        let direct = s.expectation(&tensor(&z, &x)).unwrap();
        let via = s.joint_moment(Some(&z), 1, &x).unwrap();
        assert!((direct - via).norm() < 1e-15);
    }
}
