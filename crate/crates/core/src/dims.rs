//! The dimension sequence `d_n`, odd compositions and gap-set families.
//!
//! All arithmetic here is exact; counts use unbounded integers.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// `d_0, ..., d_N` with `d_0 = 1, d_1 = 0, d_2 = 1, d_{i+3} = d_{i+1} + d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimTable {
    values: Vec<BigUint>,
}

impl DimTable {
    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.values.get(n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn d_sequence(max: usize) -> DimTable {
    let mut values: Vec<BigUint> = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let v = match n {
            0 | 2 => BigUint::one(),
            1 => BigUint::zero(),
            _ => &values[n - 2] + &values[n - 3],
        };
        values.push(v);
    }
    DimTable { values }
}

/// `d_n` as a machine integer; panics past `u64`.
pub fn d(n: usize) -> u64 {
    d_sequence(n).values[n].to_u64().expect("d_n exceeds u64")
}

/// Coefficients of `num / den` as a formal power series up to `t^max`.
/// `den[0]` must be `±1`.
pub fn series_div(num: &[BigInt], den: &[BigInt], max: usize) -> Vec<BigInt> {
    assert!(
        den.first().is_some_and(|c| c.is_one() || (-c).is_one()),
        "constant term of the divisor must be a unit"
    );
    let mut out: Vec<BigInt> = Vec::with_capacity(max + 1);
    for k in 0..=max {
        let mut acc = num.get(k).cloned().unwrap_or_default();
        for j in 1..=k.min(den.len().saturating_sub(1)) {
            acc -= &den[j] * &out[k - j];
        }
        out.push(acc * &den[0]);
    }
    out
}

/// Coefficients of `1/(1 - t^2 - t^3)` up to `t^max`.
pub fn gf_coefficients(max: usize) -> Vec<BigInt> {
    let one = BigInt::one();
    let den = vec![one.clone(), BigInt::zero(), -one.clone(), -one.clone()];
    series_div(&[one], &den, max)
}

/// Calls `visit` on every ordered tuple of odd integers `>= 3` summing to `a`.
pub fn for_each_odd_composition(a: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(rest: usize, parts: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if rest == 0 {
            visit(parts);
            return;
        }
        let mut p = 3;
        while p <= rest {
            parts.push(p);
            rec(rest - p, parts, visit);
            parts.pop();
            p += 2;
        }
    }
    rec(a, &mut Vec::new(), visit);
}

/// `op(a)`: number of ordered tuples of odd integers `> 1` summing to `a`,
/// counted by exhaustive enumeration. `op(0) = 1`.
pub fn op_count(a: usize) -> BigUint {
    let mut count = BigUint::zero();
    for_each_odd_composition(a, &mut |_| count += 1u32);
    count
}

/// `op` by the recurrence `op(a) = sum_{b odd, 3 <= b <= a} op(a - b)`.
pub fn op_recurrence(max: usize) -> Vec<BigUint> {
    let mut ops: Vec<BigUint> = Vec::with_capacity(max + 1);
    for a in 0..=max {
        if a == 0 {
            ops.push(BigUint::one());
            continue;
        }
        let mut s = BigUint::zero();
        let mut b = 3;
        while b <= a {
            s += &ops[a - b];
            b += 2;
        }
        ops.push(s);
    }
    ops
}

/// Constraint on consecutive differences of a gap set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapFamily {
    /// Every difference odd and at least 3.
    OddAtLeast3,
    /// Every difference at least 2.
    AtLeast2,
}

impl GapFamily {
    pub fn allows(self, gap: usize) -> bool {
        match self {
            GapFamily::OddAtLeast3 => gap >= 3 && gap % 2 == 1,
            GapFamily::AtLeast2 => gap >= 2,
        }
    }
}

/// Strictly increasing subset of `[0, n]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GapSet {
    elements: Vec<usize>,
}

impl GapSet {
    pub fn new(mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        GapSet { elements }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_member(&self, n: usize, family: GapFamily) -> bool {
        !self.elements.is_empty()
            && self.elements.iter().all(|&a| a <= n)
            && self.elements.windows(2).all(|p| family.allows(p[1] - p[0]))
    }
}

/// Every nonempty subset of `[0, n]` whose consecutive gaps satisfy `family`,
/// in lexicographic order. Sets are grown element by element so only
/// members are ever visited.
pub fn enumerate_gapsets(n: usize, family: GapFamily) -> Vec<GapSet> {
    let mut out = Vec::new();
    for start in 0..=n {
        enumerate_gapsets_from(start, n, family, &mut |s| out.push(GapSet { elements: s.to_vec() }));
    }
    out
}

/// Gap sets whose minimum is `start` and which lie in `[start, n]`.
pub fn enumerate_gapsets_from(start: usize, n: usize, family: GapFamily, visit: &mut impl FnMut(&[usize])) {
    fn rec(elems: &mut Vec<usize>, n: usize, family: GapFamily, visit: &mut impl FnMut(&[usize])) {
        visit(elems);
        let last = *elems.last().unwrap();
        for next in last + 1..=n {
            if family.allows(next - last) {
                elems.push(next);
                rec(elems, n, family, visit);
                elems.pop();
            }
        }
    }
    if start <= n {
        rec(&mut vec![start], n, family, visit);
    }
}

/// `#{S in N_n : a, n in S, S ⊆ [a, n]}` by enumeration.
pub fn count_gapsets_spanning(a: usize, n: usize) -> BigUint {
    let mut count = BigUint::zero();
    enumerate_gapsets_from(a, n, GapFamily::OddAtLeast3, &mut |s| {
        if *s.last().unwrap() == n {
            count += 1u32;
        }
    });
    count
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaRow {
    pub n: usize,
    pub d_n: String,
    /// `sum_{a even, 0 <= a <= n} op(n - a)`.
    pub op_sum: String,
    pub sum_ok: bool,
    /// Whether the gap-set counts matched `op(n - a)` for every `a`;
    /// `None` when that part was not checked for this `n`.
    pub gapsets_ok: Option<bool>,
}

impl LemmaRow {
    pub fn ok(&self) -> bool {
        self.sum_ok && self.gapsets_ok.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(LemmaRow::ok)
    }
}

/// Checks `d_n = sum_{a even} op(n - a)` for every `n <= max`, and the gap-set
/// count `#{S in N_n : a, n in S ⊆ [a, n]} = op(n - a)` for every `n <= max`
/// and `0 <= a <= n`.
pub fn check_counting_lemma(max: usize) -> LemmaReport {
    check_counting_lemma_with(max, max)
}

/// As [`check_counting_lemma`] but only enumerates gap sets for `n <= gap_max`.
pub fn check_counting_lemma_with(max: usize, gap_max: usize) -> LemmaReport {
    let dims = d_sequence(max);
    let ops: Vec<BigUint> = (0..=max).map(op_count).collect();
    let rows = (0..=max)
        .map(|n| {
            let sum: BigUint = (0..=n).step_by(2).map(|a| &ops[n - a]).sum();
            let gapsets_ok = (n <= gap_max).then(|| (0..=n).all(|a| count_gapsets_spanning(a, n) == ops[n - a]));
            LemmaRow {
                n,
                d_n: dims.values[n].to_string(),
                op_sum: sum.to_string(),
                sum_ok: sum == dims.values[n],
                gapsets_ok,
            }
        })
        .collect();
    LemmaReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn d_sequence_examples() {
        assert_eq!(d_sequence(2).values(), big(&[1, 0, 1]).as_slice());
        assert_eq!(d_sequence(8).values(), big(&[1, 0, 1, 1, 1, 2, 2, 3, 4]).as_slice());
        assert_eq!(d_sequence(0).values(), big(&[1]).as_slice());
        assert_eq!(d(10), 7);
    }

    #[test]
    fn d_sequence_is_prefix_stable() {
        let long = d_sequence(60);
        for n in 0..60 {
            assert_eq!(d_sequence(n).values(), &long.values()[..=n]);
        }
    }

    #[test]
    fn gf_examples() {
        let to_i = |v: Vec<BigInt>| v.into_iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(gf_coefficients(3)), vec![1, 0, 1, 1]);
        assert_eq!(to_i(gf_coefficients(0)), vec![1]);
        assert_eq!(*gf_coefficients(10).last().unwrap(), BigInt::from(7));
    }

    #[test]
    fn gf_matches_recurrence_up_to_200() {
        let d = d_sequence(200);
        let g = gf_coefficients(200);
        for (a, b) in d.values().iter().zip(&g) {
            assert_eq!(&BigInt::from(a.clone()), b);
        }
    }

    #[test]
    fn series_div_inverts_multiplication() {
        // (1 + 2t)/(1 - t) = 1 + 3t + 3t^2 + ...
        let r = series_div(&[BigInt::from(1), BigInt::from(2)], &[BigInt::from(1), BigInt::from(-1)], 4);
        assert_eq!(r, vec![1, 3, 3, 3, 3].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn op_examples() {
        assert_eq!(op_count(0), BigUint::from(1u32));
        assert_eq!(op_count(8), BigUint::from(2u32));
        assert_eq!(op_count(9), BigUint::from(2u32));
        let mut seen = Vec::new();
        for_each_odd_composition(8, &mut |p| seen.push(p.to_vec()));
        assert_eq!(seen, vec![vec![3, 5], vec![5, 3]]);
    }

    #[test]
    fn op_recurrence_matches_enumeration() {
        let rec = op_recurrence(40);
        for a in 0..=40 {
            assert_eq!(op_count(a), rec[a], "op({a})");
        }
    }

    #[test]
    fn gapset_examples() {
        let sets: Vec<Vec<usize>> =
            enumerate_gapsets(3, GapFamily::OddAtLeast3).into_iter().map(|s| s.elements).collect();
        assert_eq!(sets, vec![vec![0], vec![0, 3], vec![1], vec![2], vec![3]]);
        let sets: Vec<Vec<usize>> =
            enumerate_gapsets(1, GapFamily::OddAtLeast3).into_iter().map(|s| s.elements).collect();
        assert_eq!(sets, vec![vec![0], vec![1]]);
        assert!(enumerate_gapsets(4, GapFamily::AtLeast2).contains(&GapSet::new(vec![0, 2, 4])));
    }

    #[test]
    fn gapset_enumeration_matches_subset_filter() {
        for n in 0..=10 {
            for family in [GapFamily::OddAtLeast3, GapFamily::AtLeast2] {
                let mut filtered = Vec::new();
                for mask in 1u32..(1 << (n + 1)) {
                    let s = GapSet::new((0..=n).filter(|i| mask & (1 << i) != 0).collect());
                    if s.is_member(n, family) {
                        filtered.push(s);
                    }
                }
                filtered.sort();
                assert_eq!(enumerate_gapsets(n, family), filtered, "n={n} {family:?}");
            }
        }
    }

    #[test]
    fn counting_lemma_examples() {
        let r = check_counting_lemma(8);
        assert_eq!(r.rows[8].d_n, "4");
        assert_eq!(r.rows[8].op_sum, "4");
        assert_eq!(r.rows[0].op_sum, "1");
        assert_eq!(r.rows[3].op_sum, "1");
        assert!(r.all_ok());
    }

    #[test]
    fn counting_lemma_holds_up_to_30() {
        let r = check_counting_lemma(30);
        assert!(r.all_ok(), "{:?}", r.rows.iter().filter(|row| !row.ok()).collect::<Vec<_>>());
        assert!(r.rows.iter().all(|row| row.gapsets_ok == Some(true)));
    }
}
