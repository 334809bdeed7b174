//! Exact sparse integer linear algebra: fraction-free row echelon form and
//! rank, plus the sparse matrix product used for `d∘d = 0` checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse row: `(column, value)` pairs, strictly increasing columns, no zeros.
pub type SparseVec = Vec<(usize, BigInt)>;

pub fn sparse_from_dense(dense: &[BigInt]) -> SparseVec {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// Normalizes to primitive form: divides by the content and makes the
/// leading entry positive.
fn make_primitive(row: &mut SparseVec) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = row.first().is_some_and(|(_, v)| v.is_negative());
    if g > BigInt::one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    if flip {
        for (_, v) in row.iter_mut() {
            *v = -&*v;
        }
    }
}

/// `a·x − b·y` for sparse rows.
fn combine(a: &BigInt, x: &SparseVec, b: &BigInt, y: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ci = x.get(i).map_or(usize::MAX, |e| e.0);
        let cj = y.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < cj {
            i += 1;
            (ci, a * &x[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(b * &y[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, a * &x[i - 1].1 - b * &y[j - 1].1)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Incrementally built row echelon form over the integers. Each stored row
/// is primitive with a positive pivot in its leading column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots until its leading column is
    /// free; returns what is left (empty if `row` is in the span).
    pub fn reduce(&self, mut row: SparseVec) -> SparseVec {
        make_primitive(&mut row);
        while let Some((lead, coeff)) = row.first().cloned() {
            let Some(p) = self.pivots.get(&lead) else { break };
            let g = p[0].1.gcd(&coeff);
            let a = &p[0].1 / &g;
            let b = &coeff / &g;
            row = combine(&a, &row, &b, p);
            make_primitive(&mut row);
        }
        row
    }

    /// Adds a row; returns `true` if the rank grew.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        let r = self.reduce(row);
        match r.first() {
            Some(&(lead, _)) => {
                self.pivots.insert(lead, r);
                true
            }
            None => false,
        }
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.pivots.values()
    }
}

/// Exact rank. Rows are inserted sparsest first, which keeps fill-in low.
pub fn rank(rows: &[SparseVec]) -> usize {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].len(), i));
    let mut ech = Echelon::new();
    for i in order {
        ech.insert(rows[i].clone());
    }
    ech.rank()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, entries: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) outside {nrows}x{ncols}");
            *acc[r].entry(c).or_insert_with(BigInt::zero) += v;
        }
        let rows = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { nrows, ncols, rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn rank(&self) -> usize {
        rank(&self.rows)
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        *acc.entry(*c).or_insert_with(BigInt::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); self.ncols];
                for (c, v) in row {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    /// Dense Gaussian elimination over Q.
    fn dense_rank(m: &[Vec<BigInt>]) -> usize {
        let mut a: Vec<Vec<BigRational>> =
            m.iter().map(|r| r.iter().map(|v| BigRational::from(v.clone())).collect()).collect();
        let ncols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
            a.swap(rank, p);
            let pivot = a[rank][c].clone();
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &pivot;
                    for k in c..ncols {
                        let t = &f * &a[rank][k];
                        a[r][k] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn mat(rows: &[&[i64]]) -> Vec<SparseVec> {
        rows.iter()
            .map(|r| sparse_from_dense(&r.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&mat(&[&[1, 2], &[3, 4]])), 2);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&mat(&[&[6, 4, 2], &[3, 2, 1], &[0, 5, 7], &[6, 9, 9]])), 2);
    }

    #[test]
    fn reduce_detects_span_membership() {
        let mut e = Echelon::new();
        e.insert(mat(&[&[0, 1, -4]])[0].clone());
        e.insert(mat(&[&[1, 1, 1]])[0].clone());
        assert!(e.reduce(mat(&[&[2, 5, -10]])[0].clone()).is_empty());
        assert!(!e.reduce(mat(&[&[0, 0, 1]])[0].clone()).is_empty());
    }

    #[test]
    fn product_of_triplets() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.into()), (0, 1, 1.into()), (1, 1, 2.into())]);
        let b = SparseMatrix::from_triplets(2, 1, [(0, 0, 1.into()), (1, 0, (-1).into())]);
        let p = a.mul(&b);
        assert_eq!(p.to_dense(), vec![vec![BigInt::zero()], vec![BigInt::from(-2)]]);
        assert!(!p.is_zero());
    }

    fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -20i64..20], c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(m in matrix_strategy()) {
            let dense: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let sparse: Vec<SparseVec> = dense.iter().map(|r| sparse_from_dense(r)).collect();
            prop_assert_eq!(rank(&sparse), dense_rank(&dense));
        }

        #[test]
        fn rank_invariant_under_row_order(m in matrix_strategy(), seed in any::<u64>()) {
            let sparse: Vec<SparseVec> = m.iter()
                .map(|r| sparse_from_dense(&r.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()))
                .collect();
            let mut shuffled = sparse.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(rank(&sparse), rank(&shuffled));
        }

        #[test]
        fn rank_of_product_bounded(a in matrix_strategy()) {
            let dense: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let m = SparseMatrix { nrows: dense.len(), ncols: dense[0].len(), rows: dense.iter().map(|r| sparse_from_dense(r)).collect() };
            let t = SparseMatrix::from_triplets(
                m.ncols, m.nrows,
                m.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (*c, r, v.clone()))),
            );
            // rank(A·Aᵀ) = rank(A) over Q.
            prop_assert_eq!(m.mul(&t).rank(), m.rank());
        }
    }
}
