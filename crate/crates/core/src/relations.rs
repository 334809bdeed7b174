//! Linear relations among weight-`n` MZVs and the resulting upper bound
//! `U_n = 2^{n−2} − rank` on the dimension of the weight-`n` span.
//!
//! Three families:
//! - finite double shuffle: `u ⧢ v − idx(u) * idx(v)` for admissible `u, v`;
//! - duality: `e_w − e_{dual w}`;
//! - Hoffman: `1 ⧢ w − (1) * idx(w)` for admissible `w` of weight `n − 1`.
//!   Both products contain the divergent word `w·1` exactly once, so the
//!   difference is supported on admissible words without regularization.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dims;
use crate::error::{MzvError, Result};
use crate::evaluator::{eval_holder, Backend, Evaluator, MzvValue};
use crate::linalg::{self, SparseVec};
use crate::prec::PrecReal;
use crate::words::{enumerate_admissible, index_to_word, shuffle, stuffle, Index, Word, WordCombination};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    DoubleShuffle { u: Word, v: Word },
    Duality { w: Word },
    Hoffman { w: Word },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::DoubleShuffle { u, v } => write!(f, "double_shuffle({u}, {v})"),
            Provenance::Duality { w } => write!(f, "duality({w})"),
            Provenance::Hoffman { w } => write!(f, "hoffman({w})"),
        }
    }
}

/// Integer relation `Σ c_w ζ(w) = 0` among admissible words of one weight.
/// Coefficients are primitive; the sign is that of the generating difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationVector {
    pub weight: usize,
    pub coeffs: BTreeMap<Word, BigInt>,
    pub provenance: Provenance,
}

impl RelationVector {
    /// Clears denominators and normalizes; `None` for the zero combination.
    fn from_combination(weight: usize, comb: &WordCombination, provenance: Provenance) -> Option<Self> {
        let terms: Vec<(&Word, &BigRational)> = comb.terms().iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return None;
        }
        let lcm = terms.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let mut coeffs: BTreeMap<Word, BigInt> =
            terms.iter().map(|(w, c)| ((*w).clone(), (*c * &lcm).to_integer())).collect();
        let g = coeffs.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        for c in coeffs.values_mut() {
            *c /= &g;
        }
        Some(RelationVector { weight, coeffs, provenance })
    }

    /// Sparse row over the column order of `enumerate_admissible(weight)`.
    pub fn to_sparse(&self) -> SparseVec {
        let columns = column_map(self.weight);
        let mut row: SparseVec = self.coeffs.iter().map(|(w, c)| (columns[w], c.clone())).collect();
        row.sort_by_key(|e| e.0);
        row
    }

    /// `Σ c_w ζ(w)` with the radius of every term accumulated.
    pub fn evaluate(&self, values: &BTreeMap<Word, MzvValue>) -> Result<PrecReal> {
        let mut total: Option<PrecReal> = None;
        for (w, c) in &self.coeffs {
            let v = values.get(w).ok_or_else(|| MzvError::InvalidArgument(format!("no value for {w}")))?;
            let term = v.value.mul_int(c);
            match total.as_mut() {
                Some(t) => t.add_assign(&term),
                None => total = Some(term),
            }
        }
        total.ok_or_else(|| MzvError::InvalidArgument("empty relation".into()))
    }
}

impl fmt::Display for RelationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Positive terms first, each group in word order.
        let (pos, neg): (Vec<_>, Vec<_>) = self.coeffs.iter().partition(|(_, c)| c.is_positive());
        let mut first = true;
        for (w, c) in pos.into_iter().chain(neg) {
            let idx = w.to_index().map(|i| i.to_string()).unwrap_or_else(|_| w.to_string());
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "ζ({idx})")?;
            first = false;
        }
        Ok(())
    }
}

fn column_map(n: usize) -> BTreeMap<Word, usize> {
    enumerate_admissible(n).into_iter().enumerate().map(|(i, w)| (w, i)).collect()
}

fn stuffle_as_words(a: &Index, b: &Index) -> WordCombination {
    let mut out = WordCombination::zero();
    for (idx, c) in stuffle(a, b) {
        out.add_term(index_to_word(&idx), c);
    }
    out
}

/// Admissible part of a combination; errors if any other term survives.
fn admissible_part(comb: &WordCombination) -> Result<WordCombination> {
    let mut out = WordCombination::zero();
    for (w, c) in comb.terms() {
        if c.is_zero() {
            continue;
        }
        if !w.is_admissible() {
            return Err(MzvError::NonAdmissibleCoefficient(w.to_string()));
        }
        out.add_term(w.clone(), c.clone());
    }
    Ok(out)
}

fn dedup(mut rels: Vec<RelationVector>) -> Vec<RelationVector> {
    // A vector and its negative are the same relation.
    let mut seen = std::collections::BTreeSet::new();
    rels.retain(|r| {
        let neg: BTreeMap<Word, BigInt> = r.coeffs.iter().map(|(w, c)| (w.clone(), -c)).collect();
        let key = std::cmp::max(r.coeffs.clone(), neg);
        seen.insert(key)
    });
    rels
}

/// Finite double shuffle relations of weight `n`, one per unordered pair of
/// admissible factors.
pub fn gen_double_shuffle(n: usize) -> Vec<RelationVector> {
    let mut pairs = Vec::new();
    for i in 2..=n / 2 {
        let j = n - i;
        if j < 2 {
            continue;
        }
        let left = enumerate_admissible(i);
        let right = enumerate_admissible(j);
        for (a, u) in left.iter().enumerate() {
            for (b, v) in right.iter().enumerate() {
                if i == j && b < a {
                    continue;
                }
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    let rels = pairs
        .into_par_iter()
        .filter_map(|(u, v)| {
            let sh = shuffle(&u, &v);
            let st = stuffle_as_words(&u.to_index().ok()?, &v.to_index().ok()?);
            let diff = admissible_part(&sh.sub(&st)).expect("admissible factors give admissible products");
            RelationVector::from_combination(n, &diff, Provenance::DoubleShuffle { u, v })
        })
        .collect();
    dedup(rels)
}

/// `e_w − e_{dual w}` for every admissible `w` that is not self-dual.
pub fn gen_duality(n: usize) -> Vec<RelationVector> {
    let rels = enumerate_admissible(n)
        .into_iter()
        .filter_map(|w| {
            let d = w.dual();
            if d <= w {
                return None;
            }
            let mut comb = WordCombination::from_word(w.clone());
            comb.add_term(d, -BigRational::one());
            RelationVector::from_combination(n, &comb, Provenance::Duality { w })
        })
        .collect();
    dedup(rels)
}

/// `1 ⧢ w − (1) * idx(w)` for admissible `w` of weight `n − 1`.
pub fn gen_hoffman(n: usize) -> Vec<RelationVector> {
    if n < 3 {
        return Vec::new();
    }
    let one_word: Word = "1".parse().expect("letter 1");
    let one_idx = Index::new(vec![1]).expect("index (1)");
    let rels = enumerate_admissible(n - 1)
        .into_par_iter()
        .filter_map(|w| {
            let sh = shuffle(&one_word, &w);
            let st = stuffle_as_words(&one_idx, &w.to_index().ok()?);
            let diff = admissible_part(&sh.sub(&st)).expect("the divergent word w·1 cancels");
            RelationVector::from_combination(n, &diff, Provenance::Hoffman { w })
        })
        .collect();
    dedup(rels)
}

/// Which families feed the relation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RelationOptions {
    pub duality: bool,
    pub hoffman: bool,
    /// Drop every family that uses the harmonic product.
    pub shuffle_only: bool,
}

impl Default for RelationOptions {
    fn default() -> Self {
        RelationOptions { duality: true, hoffman: true, shuffle_only: false }
    }
}

pub fn generate(n: usize, opts: RelationOptions) -> Vec<RelationVector> {
    let mut rels = Vec::new();
    if !opts.shuffle_only {
        rels.extend(gen_double_shuffle(n));
        if opts.hoffman {
            rels.extend(gen_hoffman(n));
        }
    }
    if opts.duality {
        rels.extend(gen_duality(n));
    }
    rels
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    pub n: usize,
    pub num_words: usize,
    pub num_relations: usize,
    pub rank: usize,
    pub upper_bound: usize,
    pub d_n: u64,
}

pub fn rank_of(rels: &[RelationVector]) -> usize {
    let rows: Vec<SparseVec> = rels.iter().map(RelationVector::to_sparse).collect();
    linalg::rank(&rows)
}

pub fn upper_bound_of(n: usize, rels: &[RelationVector]) -> UpperBound {
    let num_words = if n >= 2 { 1usize << (n - 2) } else { 0 };
    let rank = rank_of(rels);
    UpperBound { n, num_words, num_relations: rels.len(), rank, upper_bound: num_words - rank, d_n: dims::d(n) }
}

pub fn upper_bound(n: usize, opts: RelationOptions) -> Result<UpperBound> {
    if n < 2 {
        return Err(MzvError::InvalidArgument(format!("weight must be at least 2, got {n}")));
    }
    Ok(upper_bound_of(n, &generate(n, opts)))
}

/// Values of every admissible word of weight `n` at `prec` digits.
pub fn weight_values(n: usize, prec: u32, evaluator: Option<&Evaluator>) -> Result<BTreeMap<Word, MzvValue>> {
    enumerate_admissible(n)
        .into_par_iter()
        .map(|w| {
            let idx = w.to_index()?;
            let v = match evaluator {
                Some(e) => e.eval(&idx, Backend::Holder, prec)?,
                None => eval_holder(&idx, prec)?,
            };
            Ok((w, v))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericCheck {
    pub relation: String,
    pub provenance: String,
    /// `|Σ c ζ|` plus the accumulated radius.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates every relation; a relation passes when its residual ball lies
/// within `tolerance` of zero.
pub fn verify_numeric(rels: &[RelationVector], values: &BTreeMap<Word, MzvValue>, tolerance: f64) -> Result<Vec<NumericCheck>> {
    rels.iter()
        .map(|r| {
            let s = r.evaluate(values)?;
            let residual = s.mid_abs() + s.rad();
            Ok(NumericCheck {
                relation: r.to_string(),
                provenance: r.provenance.to_string(),
                residual,
                tolerance,
                pass: residual <= tolerance,
            })
        })
        .collect()
}
