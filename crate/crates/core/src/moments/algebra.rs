use crate::error::{Error, Result};
use crate::operators::{generalized_quadratures, Operator};

use super::words::AliceWord;

/// Bob's trusted operators in the representation used to derive algebraic
/// relations between words.
///
/// Words are multiplied at the full dimension and then restricted to the
/// leading `window × window` block. For bosonic operators this keeps every
/// relation among words of bounded degree exact (for example
/// `qp − pq = i·1`), which plain truncation at the window size would break
/// near the edge. For finite-dimensional operators the window is the full
/// dimension.
#[derive(Clone, Debug)]
pub struct BobAlgebra {
    names: Vec<String>,
    ops: Vec<Operator>,
    window: usize,
}

impl BobAlgebra {
    /// Finite-dimensional operators, used as given.
    pub fn finite(names: Vec<String>, ops: Vec<Operator>) -> Result<Self> {
        let dim = ops
            .first()
            .map(Operator::dim)
            .ok_or_else(|| Error::Config("no Bob operators".into()))?;
        Self::windowed(names, ops, dim)
    }

    /// Operators at some dimension restricted to a leading window.
    pub fn windowed(names: Vec<String>, ops: Vec<Operator>, window: usize) -> Result<Self> {
        if names.len() != ops.len() || ops.is_empty() {
            return Err(Error::Config("need one name per Bob operator".into()));
        }
        let dim = ops[0].dim();
        if ops.iter().any(|o| o.dim() != dim) {
            return Err(Error::Dimension("Bob operators differ in dimension".into()));
        }
        if ops.iter().any(|o| !o.is_hermitian()) {
            return Err(Error::Config("Bob operators must be Hermitian".into()));
        }
        if window == 0 || window > dim {
            return Err(Error::Config(format!("window {window} outside 1..={dim}")));
        }
        Ok(Self { names, ops, window })
    }

    /// Generalized quadratures `q^(N)`, `p^(N)` (named `q`, `p`) for words of
    /// up to `max_word_len` letters, exact on the leading `window` Fock
    /// levels. Relations between words of degree up to `window − 1` in the
    /// ladder operators are reproduced exactly.
    pub fn bosonic(n: u32, window: usize, max_word_len: usize) -> Result<Self> {
        let full = window + n as usize * max_word_len.max(1);
        let (q, p) = generalized_quadratures(n, full)?;
        Self::windowed(vec!["q".into(), "p".into()], vec![q, p], window)
    }

    /// Pauli `X`, `Y`, `Z`.
    pub fn pauli() -> Self {
        let (x, y, z, _) = crate::operators::pauli_set();
        Self::finite(vec!["X".into(), "Y".into(), "Z".into()], vec![x, y, z])
            .expect("valid Pauli algebra")
    }

    /// Operator names.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of operators.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    /// Always false for a constructed algebra.
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Window size, the dimension of every word matrix.
    pub fn window(&self) -> usize {
        self.window
    }

    /// Index of a named operator.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Matrix of an ordered word, restricted to the window.
    pub fn word_matrix(&self, word: &[usize]) -> Result<Operator> {
        let dim = self.ops[0].dim();
        let mut m = Operator::identity(dim);
        for &y in word {
            let op = self
                .ops
                .get(y)
                .ok_or_else(|| Error::Config(format!("Bob operator index {y} out of range")))?;
            m = m.mul(op);
        }
        Ok(if self.window == dim {
            m
        } else {
            m.crop(self.window)
        })
    }
}

/// Optional outcome alphabets for Alice's inputs.
///
/// If input `x` is declared to have outcomes `{a_1, …, a_m}`, then
/// `Π_i (A_x − a_i) = 0` for its observable, and powers `A_x^ς` with
/// `ς ≥ m` are rewritten in terms of lower powers. For `±1` outcomes this is
/// `A_x² = 1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AliceAlgebra {
    outcomes: Vec<Option<Vec<f64>>>,
}

impl AliceAlgebra {
    /// No relations beyond commutativity.
    pub fn free() -> Self {
        Self::default()
    }

    /// One optional alphabet per input.
    pub fn with_outcomes(outcomes: Vec<Option<Vec<f64>>>) -> Self {
        Self { outcomes }
    }

    /// Declared alphabet of input `x`.
    pub fn outcomes(&self, x: usize) -> Option<&[f64]> {
        self.outcomes.get(x).and_then(|o| o.as_deref())
    }

    /// Expresses `A_x^power` as `Σ_j c_j A_x^j` with `j` below the alphabet
    /// size.
    fn reduce_power(&self, x: usize, power: u32) -> Vec<f64> {
        let Some(alpha) = self.outcomes(x) else {
            let mut v = vec![0.0; power as usize + 1];
            v[power as usize] = 1.0;
            return v;
        };
        let m = alpha.len();
        // monic minimal polynomial z^m + Σ_{j<m} e_j z^j
        let mut poly = vec![1.0];
        for &a in alpha {
            let mut next = vec![0.0; poly.len() + 1];
            for (j, &c) in poly.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= a * c;
            }
            poly = next;
        }
        // current = z^power reduced modulo poly
        let mut cur = vec![0.0; m.max(power as usize + 1)];
        cur[power as usize] = 1.0;
        for deg in (m..cur.len()).rev() {
            let c = cur[deg];
            if c != 0.0 {
                cur[deg] = 0.0;
                for j in 0..m {
                    cur[deg - m + j] -= c * poly[j];
                }
            }
        }
        cur.truncate(m);
        cur
    }

    /// Rewrites a monomial as a linear combination of reduced monomials.
    pub fn reduce(&self, w: &AliceWord) -> Vec<(f64, AliceWord)> {
        let mut acc: Vec<(f64, Vec<(usize, u32)>)> = vec![(1.0, Vec::new())];
        for &(x, m) in w.pairs() {
            let coeffs = self.reduce_power(x, m);
            let mut next = Vec::new();
            for (c, pairs) in &acc {
                for (j, &cj) in coeffs.iter().enumerate() {
                    if cj == 0.0 {
                        continue;
                    }
                    let mut p = pairs.clone();
                    if j > 0 {
                        p.push((x, j as u32));
                    }
                    next.push((c * cj, p));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .filter(|(c, _)| c.abs() > 0.0)
            .map(|(c, p)| (c, AliceWord::from_pairs(&p)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bosonic_window_is_exact() {
        let alg = BobAlgebra::bosonic(1, 6, 4).unwrap();
        let qp = alg.word_matrix(&[0, 1]).unwrap();
        let pq = alg.word_matrix(&[1, 0]).unwrap();
        let comm = qp.sub(&pq);
        assert!(
            comm.sub(&Operator::identity(6).scale(c(0.0, 1.0)))
                .max_abs()
                < 1e-12
        );
        // naive truncation at the window size breaks the last level
        let (q, p) = generalized_quadratures(1, 6).unwrap();
        let naive = q.mul(&p).sub(&p.mul(&q));
        assert!((naive.get(5, 5) - c(0.0, 1.0)).norm() > 1.0);
    }

    #[test]
    fn dichotomic_reduction() {
        let alg = AliceAlgebra::with_outcomes(vec![Some(vec![1.0, -1.0]), None]);
        let r = alg.reduce(&AliceWord::from_letters(&[0, 0]));
        assert_eq!(r, vec![(1.0, AliceWord::identity())]);
        let r = alg.reduce(&AliceWord::from_letters(&[0, 0, 0, 1, 1]));
        assert_eq!(r, vec![(1.0, AliceWord::from_pairs(&[(0, 1), (1, 2)]))]);
    }

    #[test]
    fn general_alphabet_reduction() {
        // outcomes {0, 1, 2}: z^3 = 3 z^2 − 2 z
        let alg = AliceAlgebra::with_outcomes(vec![Some(vec![0.0, 1.0, 2.0])]);
        let r = alg.reduce(&AliceWord::single(0, 3));
        assert_eq!(r.len(), 2);
        let lookup = |p: u32| {
            r.iter()
                .find(|(_, w)| w == &AliceWord::single(0, p))
                .map(|t| t.0)
        };
        assert!((lookup(2).unwrap() - 3.0).abs() < 1e-14);
        assert!((lookup(1).unwrap() + 2.0).abs() < 1e-14);
        // spot check against numbers: 2^4 = 16 via the reduced form of z^4
        let r4 = alg.reduce(&AliceWord::single(0, 4));
        let val: f64 = r4
            .iter()
            .map(|(c, w)| c * 2f64.powi(w.degree() as i32))
            .sum();
        assert!((val - 16.0).abs() < 1e-12);
        assert_eq!(
            AliceAlgebra::free().reduce(&AliceWord::single(0, 5)),
            vec![(1.0, AliceWord::single(0, 5))]
        );
    }
}
