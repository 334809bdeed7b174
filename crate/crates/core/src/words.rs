//! Word and index combinatorics for multiple zeta values.
//!
//! An index `(k_1, ..., k_l)` labels the nested sum over `m_1 < ... < m_l`
//! with `k_l` attached to the largest summation variable. Its word is the
//! concatenation of blocks `1 0^(k_i - 1)`, read in the order of the
//! integration variables `0 < x_1 < ... < x_n < 1`: letter `1` stands for
//! `dx/(x-1)` and letter `0` for `dx/x`. Admissible words therefore start
//! with `1` and end with `0`.
//!
//! Much of the literature uses the opposite orientation, where `zeta(3, 1)`
//! denotes what is `zeta(1, 3)` here. Converting a word from that convention
//! means reversing it; converting an index means reversing the tuple.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MzvError, Result};

/// An MZV index `(k_1, ..., k_l)` with every `k_i >= 1`.
///
/// The empty index is allowed and acts as the multiplicative unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(MzvError::InvalidIndex(format!("{parts:?} has a zero entry")));
        }
        Ok(Index(parts))
    }

    /// Like [`Index::new`] but also requires admissibility.
    pub fn admissible(parts: Vec<u32>) -> Result<Self> {
        let idx = Index::new(parts)?;
        if !idx.is_admissible() {
            return Err(MzvError::NonAdmissibleIndex(idx.to_string()));
        }
        Ok(idx)
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The empty index counts as admissible (it is the unit, `zeta() = 1`).
    pub fn is_admissible(&self) -> bool {
        self.0.last().is_none_or(|&k| k >= 2)
    }

    pub fn to_word(&self) -> Word {
        index_to_word(self)
    }

    fn pushed(&self, k: u32) -> Index {
        let mut parts = self.0.clone();
        parts.push(k);
        Index(parts)
    }

    fn split_last(&self) -> Option<(Index, u32)> {
        let (&last, rest) = self.0.split_last()?;
        Some((Index(rest.to_vec()), last))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Index {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        if s.trim().is_empty() {
            return Ok(Index::empty());
        }
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| MzvError::Parse(format!("index entry {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }
}

impl TryFrom<String> for Index {
    type Error = MzvError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Index> for String {
    fn from(idx: Index) -> String {
        idx.to_string()
    }
}

/// A word over the letters `{0, 1}`, letters listed in integration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.iter().any(|&b| b > 1) {
            return Err(MzvError::InvalidWord(format!("{letters:?} has a letter outside {{0,1}}")));
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Nonempty with first letter 1 and last letter 0, or empty.
    pub fn is_admissible(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (None, None) => true,
            (Some(&a), Some(&b)) => a == 1 && b == 0,
            _ => unreachable!(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn flipped(&self) -> Word {
        Word(self.0.iter().map(|&b| 1 - b).collect())
    }

    /// Reverse and flip every letter. This is the substitution `x -> 1 - x`
    /// combined with reversing the path.
    pub fn dual(&self) -> Word {
        Word(self.0.iter().rev().map(|&b| 1 - b).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn to_index(&self) -> Result<Index> {
        word_to_index(self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        let letters = s
            .chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(MzvError::Parse(format!("bad letter {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word(letters))
    }
}

impl TryFrom<String> for Word {
    type Error = MzvError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

/// Block decomposition: each `k_i` contributes `1` followed by `k_i - 1` zeros.
pub fn index_to_word(idx: &Index) -> Word {
    let mut letters = Vec::with_capacity(idx.weight());
    for &k in idx.parts() {
        letters.push(1);
        letters.extend(std::iter::repeat_n(0, k as usize - 1));
    }
    Word(letters)
}

/// Inverse of [`index_to_word`]. Fails on the empty word and on words
/// starting with 0.
pub fn word_to_index(w: &Word) -> Result<Index> {
    if w.0.first() != Some(&1) {
        return Err(MzvError::NoBlockDecomposition(w.to_string()));
    }
    let mut parts = Vec::new();
    for &b in &w.0 {
        if b == 1 {
            parts.push(1);
        } else {
            *parts.last_mut().unwrap() += 1;
        }
    }
    Ok(Index(parts))
}

/// Finite linear combination of words with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WordCombination {
    terms: BTreeMap<Word, BigRational>,
}

impl WordCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut c = Self::default();
        c.add_term(w, BigRational::one());
        c
    }

    pub fn add_term(&mut self, w: Word, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Length shared by every word, or `None` if the lengths differ (or the
    /// combination is zero).
    pub fn homogeneous_len(&self) -> Option<usize> {
        let mut lens = self.terms.keys().map(Word::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        let mut out = Self::default();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    /// Bilinear extension of the shuffle product.
    pub fn shuffle(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let prod = cu * cv;
                for (w, c) in shuffle(u, v).terms {
                    out.add_term(w, c * &prod);
                }
            }
        }
        out
    }
}

/// Shuffle product of two words: all interleavings preserving the internal
/// order of each factor, with multiplicity.
pub fn shuffle(u: &Word, v: &Word) -> WordCombination {
    let counts = shuffle_counts(&u.0, &v.0);
    let mut out = WordCombination::default();
    for (w, c) in counts {
        out.terms.insert(Word(w), BigRational::from_integer(BigInt::from(c)));
    }
    out
}

/// Shuffle with integer multiplicities, built by dynamic programming over
/// prefixes: `sh(ua, vb) = sh(u, vb)·a + sh(ua, v)·b`.
pub(crate) fn shuffle_counts(u: &[u8], v: &[u8]) -> BTreeMap<Vec<u8>, u64> {
    let (p, q) = (u.len(), v.len());
    // row[j] holds sh(u[..i], v[..j]) for the current i.
    let mut prev: Vec<BTreeMap<Vec<u8>, u64>> = Vec::with_capacity(q + 1);
    for j in 0..=q {
        let mut m = BTreeMap::new();
        m.insert(v[..j].to_vec(), 1u64);
        prev.push(m);
    }
    for i in 1..=p {
        let mut cur: Vec<BTreeMap<Vec<u8>, u64>> = Vec::with_capacity(q + 1);
        let mut m0 = BTreeMap::new();
        m0.insert(u[..i].to_vec(), 1u64);
        cur.push(m0);
        for j in 1..=q {
            let mut m: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
            for (w, c) in &prev[j] {
                let mut w2 = w.clone();
                w2.push(u[i - 1]);
                *m.entry(w2).or_insert(0) += c;
            }
            for (w, c) in &cur[j - 1] {
                let mut w2 = w.clone();
                w2.push(v[j - 1]);
                *m.entry(w2).or_insert(0) += c;
            }
            cur.push(m);
        }
        prev = cur;
    }
    prev.pop().unwrap()
}

/// Linear combination of indices, the codomain of [`stuffle`].
pub type IndexCombination = BTreeMap<Index, BigRational>;

/// Harmonic (stuffle) product of two indices.
///
/// Entries are merged from the right, the end carrying the largest
/// summation variable: with `a = a'·x` and `b = b'·y`,
/// `a * b = (a * b')·y + (a' * b)·x + (a' * b')·(x + y)`.
pub fn stuffle(a: &Index, b: &Index) -> IndexCombination {
    let mut out = IndexCombination::new();
    for (idx, c) in stuffle_counts(a, b) {
        out.insert(idx, BigRational::from_integer(BigInt::from(c)));
    }
    out
}

fn stuffle_counts(a: &Index, b: &Index) -> BTreeMap<Index, u64> {
    let mut out = BTreeMap::new();
    match (a.split_last(), b.split_last()) {
        (None, _) => {
            out.insert(b.clone(), 1);
        }
        (_, None) => {
            out.insert(a.clone(), 1);
        }
        (Some((a_rest, x)), Some((b_rest, y))) => {
            for (idx, c) in stuffle_counts(a, &b_rest) {
                *out.entry(idx.pushed(y)).or_insert(0) += c;
            }
            for (idx, c) in stuffle_counts(&a_rest, b) {
                *out.entry(idx.pushed(x)).or_insert(0) += c;
            }
            for (idx, c) in stuffle_counts(&a_rest, &b_rest) {
                *out.entry(idx.pushed(x + y)).or_insert(0) += c;
            }
        }
    }
    out
}

/// Duality on admissible indices: dual word is the reversed, bit-flipped word.
pub fn dual(idx: &Index) -> Result<Index> {
    if !idx.is_admissible() {
        return Err(MzvError::NonAdmissibleIndex(idx.to_string()));
    }
    if idx.is_empty() {
        return Ok(Index::empty());
    }
    word_to_index(&index_to_word(idx).dual())
}

/// All admissible words of length `n`, lexicographically sorted.
pub fn enumerate_admissible(n: usize) -> Vec<Word> {
    match n {
        0 => vec![Word::empty()],
        1 => Vec::new(),
        _ => {
            let inner = n - 2;
            (0u64..(1u64 << inner))
                .map(|bits| {
                    let mut letters = Vec::with_capacity(n);
                    letters.push(1);
                    for pos in (0..inner).rev() {
                        letters.push(((bits >> pos) & 1) as u8);
                    }
                    letters.push(0);
                    Word(letters)
                })
                .collect()
        }
    }
}

/// All indices (not necessarily admissible) of the given weight, in the
/// order of their words.
pub fn enumerate_indices(weight: usize) -> Vec<Index> {
    if weight == 0 {
        return vec![Index::empty()];
    }
    (0u64..(1u64 << (weight - 1)))
        .map(|bits| {
            let mut letters = vec![1u8];
            for pos in (0..weight - 1).rev() {
                letters.push(((bits >> pos) & 1) as u8);
            }
            word_to_index(&Word(letters)).unwrap()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn idx(parts: &[u32]) -> Index {
        Index::new(parts.to_vec()).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Every interleaving, enumerated by choosing the positions of `u`.
    fn brute_force_shuffle(u: &Word, v: &Word) -> BTreeMap<Word, u64> {
        let (p, q) = (u.len(), v.len());
        let mut out = BTreeMap::new();
        for mask in 0u32..(1 << (p + q)) {
            if mask.count_ones() as usize != p {
                continue;
            }
            let (mut i, mut j) = (0, 0);
            let mut letters = Vec::new();
            for pos in 0..p + q {
                if mask & (1 << pos) != 0 {
                    letters.push(u.0[i]);
                    i += 1;
                } else {
                    letters.push(v.0[j]);
                    j += 1;
                }
            }
            *out.entry(Word(letters)).or_insert(0) += 1;
        }
        out
    }

    /// Splits the product of two nested sums into all relative orderings of
    /// the summation variables (ties allowed across factors).
    fn brute_force_stuffle(a: &Index, b: &Index) -> BTreeMap<Index, u64> {
        let (p, q) = (a.depth(), b.depth());
        let mut out = BTreeMap::new();
        for r in p.max(q)..=p + q {
            // Strictly increasing maps [p] -> [r] and [q] -> [r] jointly onto.
            let fs = increasing_maps(p, r);
            let gs = increasing_maps(q, r);
            for f in &fs {
                for g in &gs {
                    let mut parts = vec![0u32; r];
                    for (i, &pos) in f.iter().enumerate() {
                        parts[pos] += a.0[i];
                    }
                    for (j, &pos) in g.iter().enumerate() {
                        parts[pos] += b.0[j];
                    }
                    if parts.iter().all(|&k| k > 0) {
                        *out.entry(Index(parts)).or_insert(0) += 1;
                    }
                }
            }
        }
        out
    }

    fn increasing_maps(len: usize, r: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << r) {
            if mask.count_ones() as usize == len {
                out.push((0..r).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        out
    }

    #[test]
    fn index_word_examples() {
        assert_eq!(index_to_word(&idx(&[2])), w("10"));
        assert_eq!(index_to_word(&idx(&[1, 2])), w("110"));
        assert_eq!(index_to_word(&idx(&[2, 3])), w("10100"));
        assert_eq!(word_to_index(&w("10")).unwrap(), idx(&[2]));
        assert_eq!(word_to_index(&w("110")).unwrap(), idx(&[1, 2]));
        assert_eq!(word_to_index(&w("10010")).unwrap(), idx(&[3, 2]));
    }

    #[test]
    fn word_to_index_rejects_bad_words() {
        assert!(matches!(word_to_index(&Word::empty()), Err(MzvError::NoBlockDecomposition(_))));
        assert!(matches!(word_to_index(&w("010")), Err(MzvError::NoBlockDecomposition(_))));
    }

    #[test]
    fn index_rejects_zero_entries() {
        assert!(Index::new(vec![1, 0, 2]).is_err());
        assert!(Index::admissible(vec![2, 1]).is_err());
        assert!("1,x".parse::<Index>().is_err());
    }

    #[test]
    fn serialization_spelling() {
        assert_eq!(idx(&[1, 3]).to_string(), "1,3");
        assert_eq!("1, 3".parse::<Index>().unwrap(), idx(&[1, 3]));
        assert_eq!("(2,3)".parse::<Index>().unwrap(), idx(&[2, 3]));
        assert_eq!(w("1100").to_string(), "1100");
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
        assert!("12".parse::<Word>().is_err());
    }

    #[test]
    fn shuffle_examples() {
        let s = shuffle(&w("10"), &w("10"));
        let mut expected = WordCombination::zero();
        expected.add_term(w("1010"), q(2));
        expected.add_term(w("1100"), q(4));
        assert_eq!(s, expected);
        assert_eq!(shuffle(&Word::empty(), &w("110")), WordCombination::from_word(w("110")));
        let s = shuffle(&w("1"), &w("0"));
        assert_eq!(s.coeff(&w("10")), q(1));
        assert_eq!(s.coeff(&w("01")), q(1));
        assert_eq!(s.terms().len(), 2);
    }

    #[test]
    fn shuffle_matches_brute_force_exhaustively() {
        for p in 0..=4 {
            for q in 0..=4 {
                for ub in 0u32..(1 << p) {
                    for vb in 0u32..(1 << q) {
                        let u = Word((0..p).map(|i| ((ub >> i) & 1) as u8).collect());
                        let v = Word((0..q).map(|i| ((vb >> i) & 1) as u8).collect());
                        let fast: BTreeMap<Word, u64> = shuffle_counts(&u.0, &v.0)
                            .into_iter()
                            .map(|(k, c)| (Word(k), c))
                            .collect();
                        assert_eq!(fast, brute_force_shuffle(&u, &v), "{u} ш {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_coefficient_sum_is_binomial() {
        // Exhaustive over all pairs of words of length <= 6.
        let mut binom = [[0u64; 13]; 13];
        for n in 0..13 {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }
        for p in 0..=6usize {
            for q in 0..=6usize {
                for ub in 0u32..(1 << p) {
                    for vb in 0u32..(1 << q) {
                        let u: Vec<u8> = (0..p).map(|i| ((ub >> i) & 1) as u8).collect();
                        let v: Vec<u8> = (0..q).map(|i| ((vb >> i) & 1) as u8).collect();
                        let sh = shuffle_counts(&u, &v);
                        assert!(sh.keys().all(|k| k.len() == p + q));
                        assert_eq!(sh.values().sum::<u64>(), binom[p + q][p]);
                    }
                }
            }
        }
    }

    #[test]
    fn stuffle_examples() {
        let s = stuffle(&idx(&[2]), &idx(&[2]));
        assert_eq!(s.len(), 2);
        assert_eq!(s[&idx(&[2, 2])], q(2));
        assert_eq!(s[&idx(&[4])], q(1));
        let s = stuffle(&Index::empty(), &idx(&[5]));
        assert_eq!(s.len(), 1);
        assert_eq!(s[&idx(&[5])], q(1));
        let s = stuffle(&idx(&[2]), &idx(&[3]));
        assert_eq!(s.len(), 3);
        for k in [idx(&[2, 3]), idx(&[3, 2]), idx(&[5])] {
            assert_eq!(s[&k], q(1));
        }
    }

    #[test]
    fn stuffle_matches_sum_splitting_up_to_weight_5() {
        for wa in 1..=4 {
            for wb in 1..=(5 - wa) {
                for a in enumerate_indices(wa) {
                    for b in enumerate_indices(wb) {
                        assert_eq!(stuffle_counts(&a, &b), brute_force_stuffle(&a, &b), "{a} * {b}");
                        assert!(stuffle_counts(&a, &b).keys().all(|k| k.weight() == wa + wb));
                    }
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&idx(&[2])).unwrap(), idx(&[2]));
        assert_eq!(dual(&idx(&[3])).unwrap(), idx(&[1, 2]));
        assert_eq!(dual(&idx(&[1, 3])).unwrap(), idx(&[1, 3]));
        assert!(matches!(dual(&idx(&[2, 1])), Err(MzvError::NonAdmissibleIndex(_))));
    }

    #[test]
    fn dual_is_an_involution_up_to_weight_12() {
        for n in 2..=12 {
            for word in enumerate_admissible(n) {
                let i = word_to_index(&word).unwrap();
                let d = dual(&i).unwrap();
                assert_eq!(d.weight(), n);
                assert_eq!(dual(&d).unwrap(), i);
            }
        }
    }

    #[test]
    fn enumeration_examples_and_counts() {
        assert_eq!(enumerate_admissible(0), vec![Word::empty()]);
        assert!(enumerate_admissible(1).is_empty());
        assert_eq!(enumerate_admissible(2), vec![w("10")]);
        assert_eq!(enumerate_admissible(4), vec![w("1000"), w("1010"), w("1100"), w("1110")]);
        for n in 2..=12 {
            let all = enumerate_admissible(n);
            assert_eq!(all.len(), 1 << (n - 2));
            assert!(all.windows(2).all(|p| p[0] < p[1]));
        }
        // Filter oracle at length 4.
        let filtered: Vec<Word> = (0u32..16)
            .map(|b| Word((0..4).rev().map(|i| ((b >> i) & 1) as u8).collect()))
            .filter(Word::is_admissible)
            .collect();
        assert_eq!(filtered, enumerate_admissible(4));
    }

    #[test]
    fn round_trip_up_to_weight_12() {
        for n in 1..=12 {
            for i in enumerate_indices(n) {
                assert_eq!(word_to_index(&index_to_word(&i)).unwrap(), i);
            }
        }
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(0u8..=1, 0..=max_len).prop_map(Word)
    }

    proptest! {
        #[test]
        fn shuffle_is_commutative_and_associative(
            a in arb_word(4), b in arb_word(4), c in arb_word(4)
        ) {
            let (ca, cb, cc) = (
                WordCombination::from_word(a.clone()),
                WordCombination::from_word(b.clone()),
                WordCombination::from_word(c.clone()),
            );
            prop_assert_eq!(ca.shuffle(&cb), cb.shuffle(&ca));
            prop_assert_eq!(ca.shuffle(&cb).shuffle(&cc), ca.shuffle(&cb.shuffle(&cc)));
        }

        #[test]
        fn stuffle_is_commutative(a in proptest::collection::vec(1u32..4, 0..4),
                                  b in proptest::collection::vec(1u32..4, 0..4)) {
            let (a, b) = (Index(a), Index(b));
            prop_assert_eq!(stuffle(&a, &b), stuffle(&b, &a));
        }
    }
}
