//! The word-indexed complexes of the E_1 page and their cohomology.
//!
//! For weight `n` and a word `W` of length `k`, degree `p` is spanned by
//! pairs `(S, τ)` with `S ⊊ [0,n]`, `#S = p`, and `τ` a `k`-subset of
//! `S̄ ∖ {min S̄}` (the surviving coordinates `x_i`, `i ∈ τ`, carry the
//! differentials `dx_i`). The differential adds one element `i_l` of
//! `S̄ = {i_1 < … < i_s}` to `S` and restricts:
//!
//! * `l = 1`: `x_{i_2} ↦ 0`, killing the term if `i_2 ∈ τ`;
//! * `l = s`: `x_{i_s} ↦ 1`, killing the term if `i_s ∈ τ`;
//! * otherwise `x_{i_l} ↦ x_{i_{l+1}}`, so `i_l ∈ τ` moves to `i_{l+1}`
//!   (zero if that is already in `τ`).
//!
//! Each component carries the sign `(-1)^{#{x ∈ S : x < i_l}}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MzvError, Result};
use crate::linalg::SparseMatrix;
use crate::words::{enumerate_admissible, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisElement {
    pub s: Vec<usize>,
    pub tau: Vec<usize>,
}

impl BasisElement {
    fn masks(&self) -> (u64, u64) {
        (to_mask(&self.s), to_mask(&self.tau))
    }
}

fn to_mask(xs: &[usize]) -> u64 {
    xs.iter().fold(0, |m, &x| m | (1 << x))
}

fn from_mask(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

#[derive(Clone, Debug)]
pub struct WordComplex {
    pub n: usize,
    pub word: Word,
    /// `spaces[p]` is the ordered basis of `C^p`, `p = 0..=n`.
    pub spaces: Vec<Vec<BasisElement>>,
    /// `differentials[p]: C^p → C^{p+1}` as a matrix with one row per
    /// source basis element, `p = 0..n`.
    pub differentials: Vec<SparseMatrix>,
}

impl WordComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(Vec::len).collect()
    }

    /// `d^{p+1} ∘ d^p = 0` for every `p`.
    pub fn d_squared_zero(&self) -> bool {
        self.differentials.windows(2).all(|w| w[0].mul(&w[1]).is_zero())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims().iter().enumerate().map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `binomial(n+1, p) · binomial(n−p, k)`.
pub fn expected_dim(n: usize, k: usize, p: usize) -> usize {
    if p > n {
        return 0;
    }
    binomial(n + 1, p) * binomial(n - p, k)
}

fn k_subsets(pool: &[usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, visit);
            cur.pop();
        }
    }
    rec(pool, k, 0, &mut Vec::new(), visit);
}

fn basis(n: usize, k: usize, p: usize) -> Vec<BasisElement> {
    let full: Vec<usize> = (0..=n).collect();
    let mut out = Vec::new();
    if p > n {
        return out;
    }
    k_subsets(&full, p, &mut |s| {
        let sbar: Vec<usize> = full.iter().copied().filter(|x| !s.contains(x)).collect();
        k_subsets(&sbar[1..], k, &mut |tau| {
            out.push(BasisElement { s: s.to_vec(), tau: tau.to_vec() });
        });
    });
    out
}

/// Components of `d(S, τ)`: `(target S, target τ, sign)`.
fn differential_terms(n: usize, e: &BasisElement) -> Vec<(u64, u64, i64)> {
    let (smask, tmask) = e.masks();
    let sbar: Vec<usize> = (0..=n).filter(|x| smask >> x & 1 == 0).collect();
    let s = sbar.len();
    let mut out = Vec::new();
    if s < 2 {
        return out;
    }
    let has = |m: u64, x: usize| m >> x & 1 == 1;
    for (l, &il) in sbar.iter().enumerate() {
        let new_tau = if l == 0 {
            if has(tmask, sbar[1]) {
                continue;
            }
            tmask
        } else if l == s - 1 {
            if has(tmask, il) {
                continue;
            }
            tmask
        } else if !has(tmask, il) {
            tmask
        } else if has(tmask, sbar[l + 1]) {
            continue;
        } else {
            (tmask & !(1 << il)) | (1 << sbar[l + 1])
        };
        let below = (smask & ((1u64 << il) - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1 } else { -1 };
        out.push((smask | (1 << il), new_tau, sign));
    }
    out
}

/// Builds the complex for weight `n` and word `w`.
pub fn build_complex(n: usize, w: &Word) -> Result<WordComplex> {
    if !(w.is_empty() || w.is_admissible()) {
        return Err(MzvError::InvalidWord(format!("{w} is neither empty nor admissible")));
    }
    if w.len() > n {
        return Err(MzvError::InvalidArgument(format!("word length {} exceeds weight {n}", w.len())));
    }
    if n > 60 {
        return Err(MzvError::InvalidArgument(format!("weight {n} too large")));
    }
    let k = w.len();
    let spaces: Vec<Vec<BasisElement>> = (0..=n).map(|p| basis(n, k, p)).collect();
    let positions: Vec<HashMap<(u64, u64), usize>> = spaces
        .iter()
        .map(|sp| sp.iter().enumerate().map(|(i, e)| (e.masks(), i)).collect())
        .collect();
    let differentials = (0..n)
        .map(|p| {
            let mut triplets = Vec::new();
            for (i, e) in spaces[p].iter().enumerate() {
                for (sm, tm, sign) in differential_terms(n, e) {
                    let j = *positions[p + 1]
                        .get(&(sm, tm))
                        .unwrap_or_else(|| panic!("target {:?}/{:?} outside basis", from_mask(sm), from_mask(tm)));
                    triplets.push((i, j, BigInt::from(sign)));
                }
            }
            SparseMatrix::from_triplets(spaces[p].len(), spaces[p + 1].len(), triplets)
        })
        .collect();
    Ok(WordComplex { n, word: w.clone(), spaces, differentials })
}

/// `dim H^p = dim C^p − rank d^p − rank d^{p−1}` for `p = 0..=n`.
pub fn cohomology(c: &WordComplex) -> Vec<usize> {
    let ranks: Vec<usize> = c.differentials.iter().map(SparseMatrix::rank).collect();
    c.dims()
        .iter()
        .enumerate()
        .map(|(p, &dim)| {
            let out = ranks.get(p).copied().unwrap_or(0);
            let inc = if p == 0 { 0 } else { ranks[p - 1] };
            dim - out - inc
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WordResult {
    pub word: Word,
    pub k: usize,
    pub dims: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub d_squared_zero: bool,
    pub euler_characteristic: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub n: usize,
    pub words: Vec<WordResult>,
    pub total_dim: usize,
    pub expected_total: usize,
    pub all_pass: bool,
}

impl PurityReport {
    pub fn failures(&self) -> impl Iterator<Item = &WordResult> {
        self.words.iter().filter(|w| !w.pass)
    }
}

/// Builds and checks one complex: `d² = 0`, the basis sizes, and
/// cohomology `K` concentrated in degree `n − k`.
pub fn check_word(n: usize, w: &Word) -> Result<WordResult> {
    let c = build_complex(n, w)?;
    let k = w.len();
    let h = cohomology(&c);
    let d2 = c.d_squared_zero();
    let dims = c.dims();
    let dims_ok = dims.iter().enumerate().all(|(p, &d)| d == expected_dim(n, k, p));
    let concentrated = h.iter().enumerate().all(|(p, &d)| if p == n - k { d == 1 } else { d == 0 });
    let euler = c.euler_characteristic();
    let euler_ok = euler == if (n - k).is_multiple_of(2) { 1 } else { -1 };
    Ok(WordResult {
        word: w.clone(),
        k,
        dims,
        cohomology: h,
        d_squared_zero: d2,
        euler_characteristic: euler,
        pass: d2 && dims_ok && concentrated && euler_ok,
    })
}

/// Runs [`check_word`] for every admissible word of every length `k ≤ n`.
pub fn purity_report(n: usize) -> Result<PurityReport> {
    if n < 2 {
        return Err(MzvError::InvalidArgument(format!("weight must be at least 2, got {n}")));
    }
    let words: Vec<Word> = (0..=n).flat_map(enumerate_admissible).collect();
    let results = words.par_iter().map(|w| check_word(n, w)).collect::<Result<Vec<_>>>()?;
    let total_dim = results.iter().map(|r| r.cohomology.iter().sum::<usize>()).sum();
    let expected_total = 1usize << (n - 1);
    let all_pass = results.iter().all(|r| r.pass) && total_dim == expected_total;
    Ok(PurityReport { n, words: results, total_dim, expected_total, all_pass })
}
