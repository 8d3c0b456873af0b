use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A commutative monomial in Alice's observables: `(input, multiplicity)`
/// pairs sorted by input, multiplicities positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AliceWord(Vec<(usize, u32)>);

impl AliceWord {
    /// The empty word (Alice identity).
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// `A_x^power` (the identity when `power == 0`).
    pub fn single(x: usize, power: u32) -> Self {
        if power == 0 {
            Self::identity()
        } else {
            Self(vec![(x, power)])
        }
    }

    /// Canonical form of an ordered product of letters `A_{x1} A_{x2} …`.
    pub fn from_letters(letters: &[usize]) -> Self {
        let mut pairs: Vec<(usize, u32)> = Vec::new();
        let mut sorted = letters.to_vec();
        sorted.sort_unstable();
        for x in sorted {
            match pairs.last_mut() {
                Some((y, m)) if *y == x => *m += 1,
                _ => pairs.push((x, 1)),
            }
        }
        Self(pairs)
    }

    /// Canonical form from `(input, multiplicity)` pairs in any order.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let letters: Vec<usize> = pairs
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m as usize))
            .collect();
        Self::from_letters(&letters)
    }

    /// The `(input, multiplicity)` pairs.
    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.0
    }

    /// Letters in canonical (sorted) order.
    pub fn letters(&self) -> Vec<usize> {
        self.0
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m as usize))
            .collect()
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    /// Whether this is the Alice identity.
    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some((x, power))` if the word involves a single input.
    pub fn single_input(&self) -> Option<(usize, u32)> {
        match self.0.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    /// Product of two commuting monomials.
    pub fn merge(&self, other: &Self) -> Self {
        let mut letters = self.letters();
        letters.extend(other.letters());
        Self::from_letters(&letters)
    }

    /// Largest input index used, if any.
    pub fn max_input(&self) -> Option<usize> {
        self.0.last().map(|p| p.0)
    }
}

impl fmt::Display for AliceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (x, m)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            if *m == 1 {
                write!(f, "A{x}")?;
            } else {
                write!(f, "A{x}^{m}")?;
            }
        }
        Ok(())
    }
}

/// One operator string `S = (Alice monomial) ⊗ (ordered Bob word)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentWord {
    /// Alice part, canonically sorted.
    pub alice: AliceWord,
    /// Bob part as indices into the Bob operator list, order preserved.
    pub bob: Vec<usize>,
}

impl MomentWord {
    /// The identity string `1 ⊗ 1`.
    pub fn identity() -> Self {
        Self {
            alice: AliceWord::identity(),
            bob: Vec::new(),
        }
    }

    /// Builds a word from ordered Alice letters and a Bob word.
    pub fn new(alice_letters: &[usize], bob: &[usize]) -> Self {
        Self {
            alice: AliceWord::from_letters(alice_letters),
            bob: bob.to_vec(),
        }
    }

    /// Total length (Alice degree plus Bob word length).
    pub fn length(&self) -> usize {
        self.alice.degree() as usize + self.bob.len()
    }

    /// Whether both parts are empty.
    pub fn is_identity(&self) -> bool {
        self.alice.is_identity() && self.bob.is_empty()
    }

    /// Human-readable form using the given Bob operator names.
    pub fn display(&self, bob_names: &[String]) -> String {
        let b = if self.bob.is_empty() {
            "1".to_string()
        } else {
            self.bob
                .iter()
                .map(|&y| bob_names.get(y).cloned().unwrap_or_else(|| format!("B{y}")))
                .collect::<Vec<_>>()
                .join("")
        };
        format!("{}⊗{}", self.alice, b)
    }
}

/// Provenance of a string set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// All strings up to the given length.
    Level(usize),
    /// User-specified list.
    Custom,
}

/// An ordered list of distinct canonical operator strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringSet {
    words: Vec<MomentWord>,
    level: Level,
}

impl StringSet {
    /// The words, in order.
    pub fn words(&self) -> &[MomentWord] {
        &self.words
    }

    /// Number of words.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Level or custom provenance.
    pub fn level(&self) -> Level {
        self.level
    }

    /// Number of Alice inputs referenced (largest index + 1).
    pub fn n_alice(&self) -> usize {
        self.words
            .iter()
            .filter_map(|w| w.alice.max_input())
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Number of Bob operators referenced (largest index + 1).
    pub fn n_bob(&self) -> usize {
        self.words
            .iter()
            .flat_map(|w| w.bob.iter().copied())
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Longest Bob word.
    pub fn max_bob_len(&self) -> usize {
        self.words.iter().map(|w| w.bob.len()).max().unwrap_or(0)
    }

    /// This set followed by the words of `other` not already present.
    pub fn extended(&self, other: &[MomentWord]) -> StringSet {
        let mut words = self.words.clone();
        for w in other {
            if !words.contains(w) {
                words.push(w.clone());
            }
        }
        StringSet {
            words,
            level: Level::Custom,
        }
    }
}

/// Validates an explicit list of strings, preserving its order.
///
/// Words that coincide after sorting their Alice factors are duplicates and
/// are rejected.
pub fn custom_string_set(words: Vec<MomentWord>) -> Result<StringSet> {
    if words.is_empty() {
        return Err(Error::Config("string set must not be empty".into()));
    }
    let mut seen = HashSet::new();
    for w in &words {
        if !seen.insert(w.clone()) {
            return Err(Error::Config(format!("duplicate canonical word {w:?}")));
        }
    }
    Ok(StringSet {
        words,
        level: Level::Custom,
    })
}

fn alice_sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..n).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn bob_words(n: usize, len: usize, allow_squares: bool) -> Vec<Vec<usize>> {
    alice_sequences(n, len)
        .into_iter()
        .filter(|w| allow_squares || w.windows(2).all(|p| p[0] != p[1]))
        .collect()
}

fn alice_multisets(n: usize, degree: usize, allow_squares: bool) -> Vec<AliceWord> {
    let mut out: Vec<AliceWord> = Vec::new();
    for seq in alice_sequences(n, degree) {
        if seq.windows(2).any(|p| p[0] > p[1]) {
            continue; // keep only the sorted representative
        }
        let w = AliceWord::from_letters(&seq);
        if !allow_squares && w.pairs().iter().any(|p| p.1 > 1) {
            continue;
        }
        out.push(w);
    }
    out
}

/// The strings of exactly length `len`, Alice-major, both parts
/// lexicographic, Alice degree descending.
fn stratum(n_alice: usize, n_bob: usize, len: usize, allow_squares: bool) -> Vec<MomentWord> {
    let mut out = Vec::new();
    for deg in (0..=len).rev() {
        let alices = if deg == 0 {
            vec![AliceWord::identity()]
        } else {
            alice_multisets(n_alice, deg, allow_squares)
        };
        let bobs = bob_words(n_bob, len - deg, allow_squares);
        for a in &alices {
            for b in &bobs {
                out.push(MomentWord {
                    alice: a.clone(),
                    bob: b.clone(),
                });
            }
        }
    }
    out
}

/// All canonical strings of total length ≤ `k`, without squared letters
/// (products `A_x A_x` or `B_y B_y`), matching the hierarchy convention in
/// which the two-operator level-2 stratum is
/// `{A1A2, A1B1, A1B2, A2B1, A2B2, B1B2, B2B1}` after sorting Alice factors.
pub fn generate_level(n_alice: usize, n_bob: usize, k: usize) -> StringSet {
    generate_level_with(n_alice, n_bob, k, false)
}

/// [`generate_level`] with explicit control over squared letters.
pub fn generate_level_with(
    n_alice: usize,
    n_bob: usize,
    k: usize,
    allow_squares: bool,
) -> StringSet {
    let mut words = Vec::new();
    for len in 0..=k {
        words.extend(stratum(n_alice, n_bob, len, allow_squares));
    }
    StringSet {
        words,
        level: Level::Level(k),
    }
}

/// Size of the length-`len` stratum counted before Alice factors are sorted,
/// i.e. with `A1A2` and `A2A1` listed separately.
pub fn stratum_size_unsorted(
    n_alice: usize,
    n_bob: usize,
    len: usize,
    allow_squares: bool,
) -> usize {
    let mut total = 0;
    for deg in (0..=len).rev() {
        let n_a = alice_sequences(n_alice, deg)
            .into_iter()
            .filter(|s| {
                let w = AliceWord::from_letters(s);
                allow_squares || w.pairs().iter().all(|p| p.1 == 1)
            })
            .count();
        total += n_a * bob_words(n_bob, len - deg, allow_squares).len();
    }
    total
}

/// `{1⊗1, A0⊗B0, A1⊗B1, A2⊗B2}`: three inputs, each paired with one of three
/// Bob observables.
pub fn werner_set() -> StringSet {
    custom_string_set(vec![
        MomentWord::identity(),
        MomentWord::new(&[0], &[0]),
        MomentWord::new(&[1], &[1]),
        MomentWord::new(&[2], &[2]),
    ])
    .expect("distinct words")
}

/// The eleven strings
/// `{1⊗1, A0⊗q, A0⊗p, A1⊗q, A1⊗p, A0²⊗1, A1²⊗1, 1⊗q², 1⊗qp, 1⊗pq, 1⊗p²}`
/// with Bob operators `q = 0`, `p = 1`.
pub fn noon_set() -> StringSet {
    custom_string_set(vec![
        MomentWord::identity(),
        MomentWord::new(&[0], &[0]),
        MomentWord::new(&[0], &[1]),
        MomentWord::new(&[1], &[0]),
        MomentWord::new(&[1], &[1]),
        MomentWord::new(&[0, 0], &[]),
        MomentWord::new(&[1, 1], &[]),
        MomentWord::new(&[], &[0, 0]),
        MomentWord::new(&[], &[0, 1]),
        MomentWord::new(&[], &[1, 0]),
        MomentWord::new(&[], &[1, 1]),
    ])
    .expect("distinct words")
}

/// `{A0⊗1, A1⊗1, 1⊗q, 1⊗p}` with `q = 0`, `p = 1`.
pub fn gaussian_set() -> StringSet {
    custom_string_set(vec![
        MomentWord::new(&[0], &[]),
        MomentWord::new(&[1], &[]),
        MomentWord::new(&[], &[0]),
        MomentWord::new(&[], &[1]),
    ])
    .expect("distinct words")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_alice_words() {
        assert_eq!(
            AliceWord::from_letters(&[1, 0, 1]),
            AliceWord::from_pairs(&[(0, 1), (1, 2)])
        );
        assert_eq!(AliceWord::from_letters(&[2, 0]).letters(), vec![0, 2]);
        assert_eq!(AliceWord::single(1, 0), AliceWord::identity());
        assert_eq!(AliceWord::single(1, 3).degree(), 3);
        assert_eq!(
            AliceWord::from_letters(&[0])
                .merge(&AliceWord::from_letters(&[1, 0]))
                .pairs(),
            &[(0, 2), (1, 1)]
        );
        assert_eq!(
            format!("{}", AliceWord::from_letters(&[1, 0, 0])),
            "A0^2·A1"
        );
    }

    #[test]
    fn hierarchy_levels() {
        let s0 = generate_level(2, 2, 0);
        assert_eq!(s0.len(), 1);
        assert!(s0.words()[0].is_identity());
        let s1 = generate_level(2, 2, 1);
        assert_eq!(s1.len(), 5);
        let stratum1: Vec<_> = s1.words()[1..].to_vec();
        assert_eq!(
            stratum1,
            vec![
                MomentWord::new(&[0], &[]),
                MomentWord::new(&[1], &[]),
                MomentWord::new(&[], &[0]),
                MomentWord::new(&[], &[1]),
            ]
        );
        assert_eq!(stratum_size_unsorted(2, 2, 2, false), 8);
        let s2 = generate_level(2, 2, 2);
        assert_eq!(s2.len(), 5 + 7);
        assert!(s2.words().contains(&MomentWord::new(&[1, 0], &[])));
        assert!(s2.words().contains(&MomentWord::new(&[], &[1, 0])));
        assert!(!s2.words().contains(&MomentWord::new(&[], &[0, 0])));
        // with squares: 3 Alice monomials, 4 mixed, 4 Bob words
        assert_eq!(generate_level_with(2, 2, 2, true).len(), 5 + 11);
        // lower levels are prefixes of higher ones
        assert_eq!(&s2.words()[..5], s1.words());
    }

    #[test]
    fn custom_sets() {
        assert_eq!(werner_set().len(), 4);
        assert_eq!(noon_set().len(), 11);
        assert_eq!(gaussian_set().len(), 4);
        let dup = custom_string_set(vec![
            MomentWord::new(&[0, 1], &[]),
            MomentWord::new(&[1, 0], &[]),
        ]);
        assert!(dup.is_err());
        assert_eq!(noon_set().n_alice(), 2);
        assert_eq!(noon_set().n_bob(), 2);
        assert_eq!(noon_set().max_bob_len(), 2);
    }
}
