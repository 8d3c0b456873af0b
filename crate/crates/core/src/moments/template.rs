use std::collections::HashMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{independent_prefix, null_space, orthonormalize};
use crate::operators::{hermitian_coords, CMatrix, Operator, C64, ZERO};
use crate::tolerances;

use super::algebra::{AliceAlgebra, BobAlgebra};
use super::source::{MomentSource, TrueModel};
use super::words::{AliceWord, MomentWord, StringSet};

/// Which moments the data pins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservabilityPolicy {
    /// Every `⟨A_x^ς ⊗ B⟩` with a single-input Alice word and any `B` in
    /// Bob's algebra is observed, as are all Bob-local moments.
    #[default]
    Full,
    /// With a nontrivial Alice word only powers of a single Bob operator,
    /// `⟨A_x^ς ⊗ B_y^τ⟩` (including `τ = 0`), are observed; mixed Bob words
    /// such as `qp` are left free. Bob-local moments stay observed.
    LocalRestricted,
}

impl std::fmt::Display for ObservabilityPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Full => write!(f, "full"),
            Self::LocalRestricted => write!(f, "local-restricted"),
        }
    }
}

/// One upper-triangle entry before expansion: reduced Alice terms
/// `(coefficient, group)` and the Bob word.
type RawEntry = (Vec<(f64, usize)>, Vec<usize>);

/// A linear combination `Σ c_j (Bob word)_j`.
pub type BobPoly = Vec<(C64, Vec<usize>)>;

/// Role of a canonical unknown in the semidefinite program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Classification {
    /// Pinned by data.
    Observable { value: f64 },
    /// Free real parameter with the given index.
    Free { index: usize },
    /// A free unknown whose coefficient pattern is a combination of other
    /// free parameters; it is fixed to zero without loss of generality.
    Redundant,
}

/// A real scalar `⟨(Alice monomial) ⊗ E⟩` with `E` a Hermitian element of
/// Bob's algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalUnknown {
    /// Alice monomial (after outcome reductions).
    pub alice: AliceWord,
    /// Index of `E` within the basis of its Alice group.
    pub bob_index: usize,
    /// `E` as a combination of Bob words.
    pub bob_poly: BobPoly,
    /// Pinned value or free parameter.
    pub classification: Classification,
}

impl CanonicalUnknown {
    /// Whether the unknown is pinned by data.
    pub fn is_observable(&self) -> bool {
        matches!(self.classification, Classification::Observable { .. })
    }
}

/// A moment-matrix entry `Σ c_u · u` over canonical unknowns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EntryExpansion {
    /// `(unknown index, complex coefficient)` pairs, sorted by index.
    pub terms: Vec<(usize, C64)>,
}

impl EntryExpansion {
    fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(u, c)| (u, c.conj())).collect(),
        }
    }

    /// Value under an assignment of all unknowns.
    pub fn evaluate(&self, values: &[f64]) -> C64 {
        self.terms.iter().map(|&(u, c)| c * values[u]).sum()
    }
}

/// The constant part, free directions and pins of a template restricted to
/// a set of rows, in complex form.
#[derive(Clone, Debug)]
pub struct TemplateExport {
    /// Template rows kept, in order.
    pub rows: Vec<usize>,
    /// `Γ_obs = Σ_o value_o · P_o`.
    pub gamma_obs: CMatrix,
    /// One direction per free parameter, in parameter order.
    pub free_dirs: Vec<CMatrix>,
    /// Unknown index of each free direction.
    pub free_unknowns: Vec<usize>,
    /// `(value, pattern)` for every observable unknown appearing in the rows.
    pub pins: Vec<(f64, CMatrix)>,
    /// Unknown index of each pin.
    pub pin_unknowns: Vec<usize>,
}

/// A symbolic moment matrix: each entry is a complex-linear combination of
/// real canonical unknowns, some pinned by data and some free.
#[derive(Clone, Debug)]
pub struct MomentTemplate {
    words: StringSet,
    bob_names: Vec<String>,
    policy: ObservabilityPolicy,
    entries: Vec<EntryExpansion>,
    unknowns: Vec<CanonicalUnknown>,
    n_free: usize,
    independent_rows: Vec<usize>,
}

struct Group {
    alice: AliceWord,
    words: Vec<Vec<usize>>,
    /// Orthonormal basis vectors (Hermitian coordinates) and unknown indices.
    basis: Vec<(DVector<f64>, usize)>,
}

fn reversed(w: &[usize]) -> Vec<usize> {
    w.iter().rev().copied().collect()
}

fn combine_polys(polys: &[BobPoly], coeffs: &DVector<f64>) -> BobPoly {
    let mut acc: Vec<(C64, Vec<usize>)> = Vec::new();
    for (p, &a) in polys.iter().zip(coeffs.iter()) {
        if a == 0.0 {
            continue;
        }
        for (c, w) in p {
            match acc.iter_mut().find(|(_, v)| v == w) {
                Some(slot) => slot.0 += c * a,
                None => acc.push((c * a, w.clone())),
            }
        }
    }
    acc.retain(|(c, _)| c.norm() > 1e-14);
    acc
}

/// Hermitian and anti-Hermitian generators of a word, with their Bob
/// polynomials: `herm = (M + M†)/2`, `anti = (M − M†)/(2i)`.
fn word_generators(alg: &BobAlgebra, w: &[usize]) -> Result<Vec<(DVector<f64>, BobPoly)>> {
    let m = alg.word_matrix(w)?;
    let rev = reversed(w);
    let h = hermitian_coords(m.hermitian_part().matrix());
    let k = hermitian_coords(m.anti_hermitian_part().matrix());
    let half = C64::new(0.5, 0.0);
    Ok(vec![
        (h, vec![(half, w.to_vec()), (half, rev.clone())]),
        (
            k,
            vec![(C64::new(0.0, -0.5), w.to_vec()), (C64::new(0.0, 0.5), rev)],
        ),
    ])
}

impl MomentTemplate {
    /// Compiles a string set into a moment-matrix template.
    ///
    /// For every pair `(i, j)` the Alice monomials of `S_i` and `S_j` are
    /// merged (and reduced with the declared outcome alphabets), and the Bob
    /// product `b_i† b_j` is expanded over a real basis of Hermitian
    /// elements spanned by the words that occur with that Alice monomial.
    /// Basis elements inside the observed subspace of the policy become
    /// pinned unknowns with values from `source`; the rest are free.
    pub fn build(
        words: &StringSet,
        bob: &BobAlgebra,
        alice: &AliceAlgebra,
        policy: ObservabilityPolicy,
        source: &dyn MomentSource,
    ) -> Result<Self> {
        let k = words.len();
        if k == 0 {
            return Err(Error::Config("empty string set".into()));
        }
        if words.n_bob() > bob.len() {
            return Err(Error::Config(
                "string set uses more Bob operators than the algebra provides".into(),
            ));
        }
        if source.n_bob_ops() != bob.len() {
            return Err(Error::Dimension(format!(
                "data source has {} Bob operators, algebra has {}",
                source.n_bob_ops(),
                bob.len()
            )));
        }
        if words.n_alice() > source.n_inputs() {
            return Err(Error::Dimension(format!(
                "string set uses {} Alice inputs, data source has {}",
                words.n_alice(),
                source.n_inputs()
            )));
        }
        let ws = words.words();

        // Raw entries: reduced Alice monomials and the Bob word.
        let mut groups: Vec<Group> = Vec::new();
        let mut group_of: HashMap<AliceWord, usize> = HashMap::new();
        let mut raw: Vec<RawEntry> = Vec::with_capacity(k * (k + 1) / 2);
        for i in 0..k {
            for j in i..k {
                let merged = ws[i].alice.merge(&ws[j].alice);
                let mut bw = reversed(&ws[i].bob);
                bw.extend_from_slice(&ws[j].bob);
                let mut terms = Vec::new();
                for (c, a) in alice.reduce(&merged) {
                    let g = *group_of.entry(a.clone()).or_insert_with(|| {
                        groups.push(Group {
                            alice: a,
                            words: Vec::new(),
                            basis: Vec::new(),
                        });
                        groups.len() - 1
                    });
                    if !groups[g].words.contains(&bw) {
                        groups[g].words.push(bw.clone());
                    }
                    terms.push((c, g));
                }
                raw.push((terms, bw));
            }
        }

        // Per-group bases: observed part first, then the free complement.
        let max_len = groups
            .iter()
            .flat_map(|g| g.words.iter().map(Vec::len))
            .max()
            .unwrap_or(0);
        let mut unknowns: Vec<CanonicalUnknown> = Vec::new();
        for g in &mut groups {
            let mut gens: Vec<(DVector<f64>, BobPoly)> = Vec::new();
            for w in &g.words {
                gens.extend(word_generators(bob, w)?);
            }
            let vecs: Vec<DVector<f64>> = gens.iter().map(|p| p.0.clone()).collect();
            let polys: Vec<BobPoly> = gens.iter().map(|p| p.1.clone()).collect();
            let w_basis = orthonormalize(&vecs, tolerances::RANK);

            let observed_all = g.alice.is_identity()
                || (g.alice.single_input().is_some() && policy == ObservabilityPolicy::Full);
            let multi = g.alice.single_input().is_none() && !g.alice.is_identity();

            let mut observed: Vec<(DVector<f64>, BobPoly)> = Vec::new();
            let mut free: Vec<(DVector<f64>, BobPoly)> = Vec::new();
            if observed_all {
                for (q, a) in &w_basis {
                    observed.push((q.clone(), combine_polys(&polys, a)));
                }
            } else if multi {
                for (q, a) in &w_basis {
                    free.push((q.clone(), combine_polys(&polys, a)));
                }
            } else {
                // Observed generators: identity and powers of single operators.
                let mut o_words: Vec<Vec<usize>> = vec![Vec::new()];
                for y in 0..bob.len() {
                    for tau in 1..=max_len {
                        o_words.push(vec![y; tau]);
                    }
                }
                let mut o_vecs = Vec::new();
                let mut o_polys: Vec<BobPoly> = Vec::new();
                for w in &o_words {
                    let m = bob.word_matrix(w)?;
                    o_vecs.push(hermitian_coords(m.hermitian_part().matrix()));
                    o_polys.push(vec![(C64::new(1.0, 0.0), w.clone())]);
                }
                // Intersection of span(W) with span(O): null space of the part
                // of O orthogonal to W.
                let n = o_vecs.first().map_or(0, |v| v.len());
                let mut resid = nalgebra::DMatrix::zeros(n, o_vecs.len());
                for (c, o) in o_vecs.iter().enumerate() {
                    let mut r = o.clone();
                    for (q, _) in &w_basis {
                        r -= q * q.dot(o);
                    }
                    let scale = o.norm().max(1.0);
                    resid.set_column(c, &(r / scale));
                }
                let scaled: Vec<DVector<f64>> =
                    o_vecs.iter().map(|o| o / o.norm().max(1.0)).collect();
                let ns = null_space(&resid, tolerances::RANK);
                let mut i_gens = Vec::new();
                let mut i_polys = Vec::new();
                for c in &ns {
                    let mut v = DVector::zeros(n);
                    let mut coeff = DVector::zeros(o_vecs.len());
                    for (j, s) in scaled.iter().enumerate() {
                        v += s * c[j];
                        coeff[j] = c[j] / o_vecs[j].norm().max(1.0);
                    }
                    i_gens.push(v);
                    i_polys.push(combine_polys(&o_polys, &coeff));
                }
                let i_basis = orthonormalize(&i_gens, tolerances::RANK);
                for (q, a) in &i_basis {
                    observed.push((q.clone(), combine_polys(&i_polys, a)));
                }
                // Complement of the observed part inside span(W).
                let mut c_gens = Vec::new();
                for (q, _) in &w_basis {
                    let mut r = q.clone();
                    for (o, _) in &observed {
                        r -= o * o.dot(q);
                    }
                    c_gens.push(r);
                }
                let c_basis = orthonormalize(&c_gens, 1e-7);
                for (q, a) in &c_basis {
                    // express through the W generators
                    let mut total = DVector::zeros(polys.len());
                    for (t, (_, wa)) in w_basis.iter().enumerate() {
                        total += wa * a[t];
                    }
                    free.push((q.clone(), combine_polys(&polys, &total)));
                }
            }

            let n_observed = observed.len();
            for (idx, (q, poly)) in observed.into_iter().chain(free).enumerate() {
                let is_obs = idx < n_observed;
                let classification = if is_obs {
                    let mut val = ZERO;
                    let a = if g.alice.is_identity() {
                        None
                    } else {
                        g.alice.single_input()
                    };
                    for (c, w) in &poly {
                        val += c * source.moment(a, w)?;
                    }
                    if val.im.abs() > 1e-8 * val.re.abs().max(1.0) {
                        return Err(Error::Config(format!(
                            "observed moment of {} has imaginary part {:.3e}",
                            g.alice, val.im
                        )));
                    }
                    Classification::Observable { value: val.re }
                } else {
                    Classification::Free { index: usize::MAX }
                };
                g.basis.push((q, unknowns.len()));
                unknowns.push(CanonicalUnknown {
                    alice: g.alice.clone(),
                    bob_index: idx,
                    bob_poly: poly,
                    classification,
                });
            }
        }

        // Entry expansions.
        let mut entries = vec![EntryExpansion::default(); k * k];
        let mut r = 0;
        for i in 0..k {
            for j in i..k {
                let (terms, bw) = &raw[r];
                r += 1;
                let m = bob.word_matrix(bw)?;
                let h = hermitian_coords(m.hermitian_part().matrix());
                let kk = hermitian_coords(m.anti_hermitian_part().matrix());
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for &(c, g) in terms {
                    let grp = &groups[g];
                    let mut h_rec = DVector::zeros(h.len());
                    let mut k_rec = DVector::zeros(kk.len());
                    for (q, u) in &grp.basis {
                        let ch = q.dot(&h);
                        let ck = q.dot(&kk);
                        h_rec += q * ch;
                        k_rec += q * ck;
                        let coeff = C64::new(c * ch, c * ck);
                        match acc.iter_mut().find(|t| t.0 == *u) {
                            Some(t) => t.1 += coeff,
                            None => acc.push((*u, coeff)),
                        }
                    }
                    let resid = (&h_rec - &h).norm().max((&k_rec - &kk).norm());
                    let scale = h.norm().max(kk.norm()).max(1.0);
                    if resid > tolerances::EXPANSION_RESIDUAL * scale {
                        return Err(Error::Config(format!(
                            "expansion residual {resid:.3e} for entry ({i}, {j})"
                        )));
                    }
                }
                for t in &mut acc {
                    if t.1.re.abs() < tolerances::COEFF_SNAP {
                        t.1.re = 0.0;
                    }
                    if t.1.im.abs() < tolerances::COEFF_SNAP {
                        t.1.im = 0.0;
                    }
                }
                acc.retain(|t| t.1 != ZERO);
                acc.sort_by_key(|t| t.0);
                let e = EntryExpansion { terms: acc };
                entries[j * k + i] = e.conj();
                entries[i * k + j] = e;
            }
        }

        // Independent free directions.
        let free_ids: Vec<usize> = (0..unknowns.len())
            .filter(|&u| matches!(unknowns[u].classification, Classification::Free { .. }))
            .collect();
        let dir_vecs: Vec<DVector<C64>> = free_ids
            .iter()
            .map(|&u| {
                DVector::from_iterator(
                    k * k,
                    entries
                        .iter()
                        .map(|e| e.terms.iter().find(|t| t.0 == u).map_or(ZERO, |t| t.1)),
                )
            })
            .collect();
        let keep = independent_prefix(&dir_vecs, tolerances::RANK);
        let mut n_free = 0;
        for (pos, &u) in free_ids.iter().enumerate() {
            unknowns[u].classification = if keep.contains(&pos) {
                n_free += 1;
                Classification::Free { index: n_free - 1 }
            } else {
                Classification::Redundant
            };
        }
        for e in &mut entries {
            e.terms
                .retain(|t| !matches!(unknowns[t.0].classification, Classification::Redundant));
        }

        let independent_rows = structurally_independent_rows(ws, bob, alice)?;
        Ok(Self {
            words: words.clone(),
            bob_names: bob.names().to_vec(),
            policy,
            entries,
            unknowns,
            n_free,
            independent_rows,
        })
    }

    /// Matrix size.
    pub fn k(&self) -> usize {
        self.words.len()
    }

    /// The string set.
    pub fn words(&self) -> &StringSet {
        &self.words
    }

    /// Bob operator names.
    pub fn bob_names(&self) -> &[String] {
        &self.bob_names
    }

    /// Observability policy.
    pub fn policy(&self) -> ObservabilityPolicy {
        self.policy
    }

    /// All canonical unknowns.
    pub fn unknowns(&self) -> &[CanonicalUnknown] {
        &self.unknowns
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &EntryExpansion {
        &self.entries[i * self.k() + j]
    }

    /// Number of independent free real parameters.
    pub fn n_free(&self) -> usize {
        self.n_free
    }

    /// Rows whose strings are linearly independent as operators, chosen
    /// greedily in order. Dropping the other rows leaves the
    /// positive-semidefiniteness question unchanged, since their entries are
    /// fixed linear combinations of the kept ones.
    pub fn independent_rows(&self) -> &[usize] {
        &self.independent_rows
    }

    /// Whether entry `(i, j)` involves no free parameter.
    pub fn is_pinned(&self, i: usize, j: usize) -> bool {
        self.entry(i, j)
            .terms
            .iter()
            .all(|t| self.unknowns[t.0].is_observable())
    }

    /// Values of all unknowns with free parameters set to `t` (redundant
    /// unknowns are zero).
    pub fn assignment(&self, t: &[f64]) -> Result<Vec<f64>> {
        if t.len() != self.n_free {
            return Err(Error::Dimension(format!(
                "expected {} free parameters, got {}",
                self.n_free,
                t.len()
            )));
        }
        Ok(self
            .unknowns
            .iter()
            .map(|u| match u.classification {
                Classification::Observable { value } => value,
                Classification::Free { index } => t[index],
                Classification::Redundant => 0.0,
            })
            .collect())
    }

    /// The moment matrix for a full assignment of unknown values.
    pub fn evaluate(&self, values: &[f64]) -> Result<CMatrix> {
        if values.len() != self.unknowns.len() {
            return Err(Error::Dimension("one value per unknown required".into()));
        }
        let k = self.k();
        Ok(CMatrix::from_fn(k, k, |i, j| {
            self.entry(i, j).evaluate(values)
        }))
    }

    /// `Γ(t)` with pinned values and free parameters `t`.
    pub fn gamma(&self, t: &[f64]) -> Result<CMatrix> {
        self.evaluate(&self.assignment(t)?)
    }

    /// Constant part, free directions and pins restricted to `rows`.
    pub fn export(&self, rows: &[usize]) -> TemplateExport {
        let n = rows.len();
        let mut gamma_obs = CMatrix::zeros(n, n);
        let mut free_dirs = vec![CMatrix::zeros(n, n); self.n_free];
        let mut pin_map: Vec<Option<usize>> = vec![None; self.unknowns.len()];
        let mut pins: Vec<(f64, CMatrix)> = Vec::new();
        let mut pin_unknowns = Vec::new();
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                for &(u, c) in &self.entry(i, j).terms {
                    match self.unknowns[u].classification {
                        Classification::Observable { value } => {
                            gamma_obs[(a, b)] += c * value;
                            let p = *pin_map[u].get_or_insert_with(|| {
                                pins.push((value, CMatrix::zeros(n, n)));
                                pin_unknowns.push(u);
                                pins.len() - 1
                            });
                            pins[p].1[(a, b)] += c;
                        }
                        Classification::Free { index } => free_dirs[index][(a, b)] += c,
                        Classification::Redundant => {}
                    }
                }
            }
        }
        let free_unknowns = (0..self.n_free)
            .map(|f| {
                self.unknowns
                    .iter()
                    .position(|u| u.classification == Classification::Free { index: f })
                    .expect("every free index has an unknown")
            })
            .collect();
        TemplateExport {
            rows: rows.to_vec(),
            gamma_obs,
            free_dirs,
            free_unknowns,
            pins,
            pin_unknowns,
        }
    }

    /// Moment matrix `Γ_ij = ⟨S_i† S_j⟩` of the true model, with Alice's
    /// words realized as ordered products of her actual observables.
    pub fn instantiate_true(&self, model: &dyn TrueModel) -> Result<CMatrix> {
        let k = self.k();
        let ws = self.words.words();
        let ops: Vec<Operator> = ws.iter().map(|w| alice_product(model, &w.alice)).collect();
        let mut g = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let a = ops[i].adjoint().mul(&ops[j]);
                let mut bw = reversed(&ws[i].bob);
                bw.extend_from_slice(&ws[j].bob);
                let v = model.raw_moment(&a, &bw)?;
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        Ok(g)
    }

    /// Values of all unknowns in the true model, `⟨(Alice product) ⊗ E⟩`
    /// (real part). For commuting Alice observables this is the exact
    /// assignment reproducing [`Self::instantiate_true`].
    pub fn true_values(&self, model: &dyn TrueModel) -> Result<Vec<f64>> {
        self.unknowns
            .iter()
            .map(|u| {
                let a = alice_product(model, &u.alice);
                let mut v = ZERO;
                for (c, w) in &u.bob_poly {
                    v += c * model.raw_moment(&a, w)?;
                }
                Ok(v.re)
            })
            .collect()
    }

    /// JSON dump of the word list, unknown table and entry expansions.
    pub fn debug_dump(&self) -> Value {
        let words: Vec<Value> = self
            .words
            .words()
            .iter()
            .map(|w| json!({ "alice": w.alice.letters(), "bob": w.bob, "label": w.display(&self.bob_names) }))
            .collect();
        let unknowns: Vec<Value> = self
            .unknowns
            .iter()
            .enumerate()
            .map(|(n, u)| {
                json!({
                    "id": n,
                    "alice": u.alice.letters(),
                    "bob_index": u.bob_index,
                    "bob_poly": u.bob_poly.iter().map(|(c, w)| json!({ "coeff": [c.re, c.im], "word": w })).collect::<Vec<_>>(),
                    "classification": u.classification,
                })
            })
            .collect();
        let k = self.k();
        let mut entries = Vec::new();
        for i in 0..k {
            for j in 0..k {
                entries.push(json!({
                    "i": i,
                    "j": j,
                    "terms": self.entry(i, j).terms.iter().map(|(u, c)| json!([u, c.re, c.im])).collect::<Vec<_>>(),
                }));
            }
        }
        json!({
            "k": k,
            "policy": self.policy,
            "bob_names": self.bob_names,
            "n_free": self.n_free,
            "independent_rows": self.independent_rows,
            "words": words,
            "unknowns": unknowns,
            "entries": entries,
        })
    }
}

fn alice_product(model: &dyn TrueModel, w: &AliceWord) -> Operator {
    let mut a = Operator::identity(model.dim_a());
    for x in w.letters() {
        a = a.mul(model.alice_observable(x));
    }
    a
}

/// Greedy maximal set of strings that are linearly independent as operators
/// `Σ_r c_r α_r ⊗ M(b)`, with distinct reduced Alice monomials treated as
/// independent.
fn structurally_independent_rows(
    ws: &[MomentWord],
    bob: &BobAlgebra,
    alice: &AliceAlgebra,
) -> Result<Vec<usize>> {
    let mut keys: Vec<AliceWord> = Vec::new();
    let mut parts: Vec<Vec<(usize, f64, CMatrix)>> = Vec::new();
    for w in ws {
        let m = bob.word_matrix(&w.bob)?.into_matrix();
        let mut p = Vec::new();
        for (c, a) in alice.reduce(&w.alice) {
            let key = match keys.iter().position(|k| k == &a) {
                Some(pos) => pos,
                None => {
                    keys.push(a);
                    keys.len() - 1
                }
            };
            p.push((key, c, m.clone()));
        }
        parts.push(p);
    }
    let dim2 = bob.window() * bob.window();
    let vecs: Vec<DVector<C64>> = parts
        .iter()
        .map(|p| {
            let mut v = DVector::from_element(keys.len() * dim2, ZERO);
            for (key, c, m) in p {
                for (n, z) in m.iter().enumerate() {
                    v[key * dim2 + n] += z * *c;
                }
            }
            v
        })
        .collect();
    Ok(independent_prefix(&vecs, tolerances::RANK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{gaussian_set, werner_set, GaussianSource, StateSource};
    use crate::operators::{min_eigenvalue_hermitian, pauli_set};
    use crate::scenarios::{measurement_from_observable, two_mode_squeezed_std_form, werner_state};

    fn werner_source(w: f64) -> StateSource {
        let (x, y, z, _) = pauli_set();
        let ms = [&x, &y, &z]
            .iter()
            .map(|o| measurement_from_observable(o).unwrap())
            .collect();
        StateSource::new(werner_state(w).unwrap(), ms, vec![x, y, z]).unwrap()
    }

    fn pm1() -> AliceAlgebra {
        AliceAlgebra::with_outcomes(vec![Some(vec![-1.0, 1.0]); 3])
    }

    #[test]
    fn werner_template_structure() {
        let src = werner_source(0.7);
        let t = MomentTemplate::build(
            &werner_set(),
            &BobAlgebra::pauli(),
            &pm1(),
            ObservabilityPolicy::Full,
            &src,
        )
        .unwrap();
        assert_eq!(t.n_free(), 3);
        let g = t.gamma(&[0.3, -0.2, 0.1]).unwrap();
        for i in 0..4 {
            assert!((g[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(t.is_pinned(0, i));
        }
        for i in 1..4 {
            assert!((g[(0, i)] - C64::new(-0.7, 0.0)).norm() < 1e-12);
            for j in (i + 1)..4 {
                assert!(g[(i, j)].re.abs() < 1e-12 && g[(i, j)].im.abs() > 0.0);
                assert!(!t.is_pinned(i, j));
            }
        }
        assert!((&g - g.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn free_parameter_counts() {
        let g = two_mode_squeezed_std_form(0.4).unwrap();
        let alg = BobAlgebra::bosonic(1, 4, 2).unwrap();
        let t = MomentTemplate::build(
            &gaussian_set(),
            &alg,
            &AliceAlgebra::free(),
            ObservabilityPolicy::Full,
            &GaussianSource::new(g),
        )
        .unwrap();
        assert_eq!(t.n_free(), 1);
        let free = t
            .unknowns()
            .iter()
            .find(|u| matches!(u.classification, Classification::Free { .. }))
            .unwrap();
        assert_eq!(free.alice, AliceWord::from_letters(&[0, 1]));

        let local = crate::moments::custom_string_set(vec![
            MomentWord::identity(),
            MomentWord::new(&[], &[0]),
            MomentWord::new(&[], &[1]),
        ])
        .unwrap();
        let src = werner_source(0.5);
        let t = MomentTemplate::build(
            &local,
            &BobAlgebra::pauli(),
            &pm1(),
            ObservabilityPolicy::Full,
            &src,
        )
        .unwrap();
        assert_eq!(t.n_free(), 0);
    }

    #[test]
    fn true_model_is_positive_and_consistent() {
        let src = werner_source(0.5);
        let set = crate::moments::generate_level(3, 3, 2);
        for policy in [
            ObservabilityPolicy::Full,
            ObservabilityPolicy::LocalRestricted,
        ] {
            let t =
                MomentTemplate::build(&set, &BobAlgebra::pauli(), &pm1(), policy, &src).unwrap();
            let g = t.instantiate_true(&src).unwrap();
            assert!(min_eigenvalue_hermitian(&g) > -1e-8);
            for u in t.unknowns() {
                if let Classification::Observable { value } = u.classification {
                    let a = alice_product(&src, &u.alice);
                    let mut v = ZERO;
                    for (c, w) in &u.bob_poly {
                        v += c * src.raw_moment(&a, w).unwrap();
                    }
                    assert!((v.re - value).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn alice_order_is_irrelevant() {
        let src = werner_source(0.6);
        let a = crate::moments::custom_string_set(vec![
            MomentWord::identity(),
            MomentWord::new(&[0, 1], &[2]),
        ])
        .unwrap();
        let b = crate::moments::custom_string_set(vec![
            MomentWord::identity(),
            MomentWord::new(&[1, 0], &[2]),
        ])
        .unwrap();
        let ta = MomentTemplate::build(
            &a,
            &BobAlgebra::pauli(),
            &pm1(),
            ObservabilityPolicy::Full,
            &src,
        )
        .unwrap();
        let tb = MomentTemplate::build(
            &b,
            &BobAlgebra::pauli(),
            &pm1(),
            ObservabilityPolicy::Full,
            &src,
        )
        .unwrap();
        assert_eq!(ta.debug_dump(), tb.debug_dump());
    }

    #[test]
    fn local_restricted_frees_mixed_words() {
        let alg = BobAlgebra::bosonic(1, 6, 4).unwrap();
        let st = crate::scenarios::lossy_noon_state(1, 0.8, 6).unwrap();
        let (q, p) = crate::operators::generalized_quadratures(1, 6).unwrap();
        let ms = vec![
            measurement_from_observable(&q).unwrap(),
            measurement_from_observable(&p).unwrap(),
        ];
        let src = StateSource::new(st, ms, vec![q, p]).unwrap();
        let set = crate::moments::noon_set();
        let full = MomentTemplate::build(
            &set,
            &alg,
            &AliceAlgebra::free(),
            ObservabilityPolicy::Full,
            &src,
        )
        .unwrap();
        let lr = MomentTemplate::build(
            &set,
            &alg,
            &AliceAlgebra::free(),
            ObservabilityPolicy::LocalRestricted,
            &src,
        )
        .unwrap();
        assert!(lr.n_free() > full.n_free());
        for t in [&full, &lr] {
            assert!(min_eigenvalue_hermitian(&t.instantiate_true(&src).unwrap()) > -1e-8);
        }
    }
}
