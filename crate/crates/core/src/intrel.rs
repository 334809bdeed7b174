//! Integer relation detection: PSLQ in fixed-point integer arithmetic, with
//! an LLL reduction of the standard embedding lattice as an independent
//! cross-check on every relation found.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{MzvError, Result};
use crate::prec::{bits_for_digits, tol, PrecReal};

/// Extra working bits on top of the requested digits.
const EXTRA_BITS: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationStatus {
    Found,
    NoneBelowBound,
}

impl fmt::Display for RelationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationStatus::Found => "found",
            RelationStatus::NoneBelowBound => "none_below_bound",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RelationResult {
    pub status: RelationStatus,
    /// Primitive, first nonzero entry positive; empty unless found.
    pub coefficients: Vec<BigInt>,
    /// The coefficient bound that was searched (`max_norm`).
    pub norm_bound: BigInt,
    /// Lower bound on the max-norm of any relation, certified by the final
    /// PSLQ state. Exceeds `norm_bound` when the status is `NoneBelowBound`.
    pub certified_norm: BigInt,
    pub precision_used: u32,
    /// `Σ c_i x_i` as a ball; zero when nothing was found.
    pub residual: PrecReal,
    /// Digits subtracted from `precision_used` in the acceptance threshold.
    pub safety_margin: u32,
    pub iterations: usize,
    /// Whether LLL independently produced a relation (only run when found).
    pub lll_confirms: Option<bool>,
}

impl RelationResult {
    pub fn threshold(&self) -> f64 {
        tol(self.precision_used.saturating_sub(self.safety_margin))
    }
}

pub fn safety_margin(len: usize) -> u32 {
    10 * len as u32
}

pub fn min_precision(len: usize) -> u32 {
    20 + 10 * len as u32
}

fn to_fixed(x: &PrecReal, p: u32) -> BigInt {
    let b = x.bits();
    if p >= b {
        x.mid_raw() << (p - b)
    } else {
        x.mid_raw() >> (b - p)
    }
}

/// Nearest integer to `a / b` for fixed-point `a, b`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b): (BigInt, BigInt) = if b.is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    let num: BigInt = (a << 1usize) + &b;
    num.div_floor(&(b << 1usize))
}

/// `Σ c_i x_i` in ball arithmetic.
pub fn residual(coeffs: &[BigInt], xs: &[PrecReal]) -> PrecReal {
    let bits = xs.iter().map(PrecReal::bits).max().unwrap_or(64);
    let mut acc = PrecReal::zero(bits);
    for (c, x) in coeffs.iter().zip(xs) {
        acc.add_assign(&x.with_bits(bits).mul_int(c));
    }
    acc
}

fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    if v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).max().unwrap_or_default()
}

fn check_inputs(xs: &[PrecReal], prec: u32) -> Result<()> {
    if xs.len() < 2 {
        return Err(MzvError::InvalidArgument(format!("need at least two values, got {}", xs.len())));
    }
    if prec < min_precision(xs.len()) {
        return Err(MzvError::InsufficientPrecision(format!(
            "{} values need at least {} digits, got {prec}",
            xs.len(),
            min_precision(xs.len())
        )));
    }
    for (i, x) in xs.iter().enumerate() {
        if !(x.rad() <= tol(prec)) {
            return Err(MzvError::InsufficientPrecision(format!(
                "value {i} is only known to ±{:.3e}, above 1e-{prec}",
                x.rad()
            )));
        }
    }
    Ok(())
}

/// PSLQ search for an integer relation with max-norm at most `max_norm`.
///
/// Returns `Found` with a relation whose residual ball lies below
/// `10^{-(prec − margin)}`, or `NoneBelowBound` once the algorithm certifies
/// that every relation has norm above `max_norm`. Running out of precision
/// before either happens is an error.
pub fn pslq(xs: &[PrecReal], max_norm: &BigInt, prec: u32) -> Result<RelationResult> {
    check_inputs(xs, prec)?;
    let n = xs.len();
    let margin = safety_margin(n);
    let threshold = tol(prec - margin);
    let p = bits_for_digits(prec) + EXTRA_BITS;
    let one = BigInt::one() << p;
    let fmul = |a: &BigInt, b: &BigInt| (a * b) >> p;
    let fdiv = |a: &BigInt, b: &BigInt| (a << p).div_floor(b);
    let fsqrt = |a: &BigInt| (a << p).sqrt();

    let base = |coefficients: Vec<BigInt>, status, certified: BigInt, res: PrecReal, iterations, lll| RelationResult {
        status,
        coefficients,
        norm_bound: max_norm.clone(),
        certified_norm: certified,
        precision_used: prec,
        residual: res,
        safety_margin: margin,
        iterations,
        lll_confirms: lll,
    };

    let x: Vec<BigInt> = xs.iter().map(|v| to_fixed(v, p)).collect();
    // An exactly vanishing entry is a relation by itself.
    if let Some(i) = xs.iter().position(PrecReal::is_exact_zero) {
        let mut c = vec![BigInt::zero(); n];
        c[i] = BigInt::one();
        let r = residual(&c, xs);
        return Ok(base(c, RelationStatus::Found, BigInt::one(), r, 0, Some(true)));
    }
    if x.iter().any(Zero::is_zero) {
        return Err(MzvError::InsufficientPrecision("an input rounds to zero at working precision".into()));
    }

    let g = fsqrt(&((BigInt::from(4) << p) / 3));
    // Only B is tracked: its columns are the candidate relations.
    let mut b: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    let mut h = vec![vec![BigInt::zero(); n - 1]; n];

    let mut s = vec![BigInt::zero(); n];
    for k in 0..n {
        let t: BigInt = x[k..].iter().map(|v| fmul(v, v)).sum();
        s[k] = fsqrt(&t);
    }
    let t = s[0].clone();
    let mut y: Vec<BigInt> = x.iter().map(|v| fdiv(v, &t)).collect();
    for sk in s.iter_mut() {
        *sk = fdiv(sk, &t);
    }
    for i in 0..n {
        if i < n - 1 && !s[i].is_zero() {
            h[i][i] = fdiv(&s[i + 1], &s[i]);
        }
        for j in 0..i.min(n - 1) {
            let sjj = fmul(&s[j], &s[j + 1]);
            if !sjj.is_zero() {
                h[i][j] = fdiv(&-fmul(&y[i], &y[j]), &sjj);
            }
        }
    }

    // Size-reduce row i against rows j_max, ..., 0.
    let reduce = |i: usize, j_max: usize, y: &mut [BigInt], h: &mut [Vec<BigInt>], b: &mut [Vec<BigInt>]| {
        for j in (0..=j_max).rev() {
            if h[j][j].is_zero() {
                continue;
            }
            let t = round_div(&h[i][j], &h[j][j]);
            if t.is_zero() {
                continue;
            }
            y[j] = &y[j] + &t * &y[i];
            for k in 0..=j {
                h[i][k] = &h[i][k] - &t * &h[j][k];
            }
            for row in b.iter_mut() {
                row[j] = &row[j] + &t * &row[i];
            }
        }
    };
    for i in 1..n {
        reduce(i, i - 1, &mut y, &mut h, &mut b);
    }

    let tol_y = one.clone() >> bits_for_digits(prec - margin).min(p);
    let max_steps = 200 * (n * n) * prec as usize;
    let mut certified = BigInt::zero();
    for iter in 1..=max_steps {
        // Pivot maximizing γ^i |H_ii|.
        let mut m = 0;
        let mut best = BigInt::from(-1);
        let mut gi = g.clone();
        for i in 0..n - 1 {
            let sz = fmul(&gi, &h[i][i].abs());
            if sz > best {
                best = sz;
                m = i;
            }
            gi = fmul(&gi, &g);
        }
        y.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = fsqrt(&(fmul(&h[m][m], &h[m][m]) + fmul(&h[m][m + 1], &h[m][m + 1])));
            if t0.is_zero() {
                break;
            }
            let t1 = fdiv(&h[m][m], &t0);
            let t2 = fdiv(&h[m][m + 1], &t0);
            for row in h.iter_mut().skip(m) {
                let (t3, t4) = (row[m].clone(), row[m + 1].clone());
                row[m] = fmul(&t1, &t3) + fmul(&t2, &t4);
                row[m + 1] = fmul(&-&t2, &t3) + fmul(&t1, &t4);
            }
        }
        for i in m + 1..n {
            reduce(i, (i - 1).min(m + 1), &mut y, &mut h, &mut b);
        }

        for i in 0..n {
            if y[i].abs() < tol_y {
                let vec: Vec<BigInt> = (0..n).map(|j| b[j][i].clone()).collect();
                if vec.iter().all(Zero::is_zero) || max_abs(&vec) > *max_norm {
                    continue;
                }
                let vec = normalize(vec);
                let r = residual(&vec, xs);
                if r.mid_abs() + r.rad() < threshold {
                    let lll = lll_relation(xs, prec).map(|c| {
                        let lr = residual(&c, xs);
                        lr.mid_abs() + lr.rad() < threshold
                    });
                    let certified = max_abs(&vec);
                    return Ok(base(vec, RelationStatus::Found, certified, r, iter, Some(lll.unwrap_or(false))));
                }
            }
        }

        // Any relation has norm at least 1 / max |H_ij|; keep a factor 100
        // for rounding in the fixed-point state.
        let recnorm = h.iter().flatten().map(|v| v.abs()).max().unwrap_or_default();
        if recnorm.is_zero() {
            break;
        }
        certified = (((BigInt::one() << (2 * p)) / &recnorm) >> p) / 100;
        if certified > *max_norm {
            return Ok(base(Vec::new(), RelationStatus::NoneBelowBound, certified, PrecReal::zero(p), iter, None));
        }
    }
    Err(MzvError::InsufficientPrecision(format!(
        "no relation found and none excluded beyond norm {certified} at {prec} digits; raise the precision"
    )))
}

/// LLL reduction (δ = 3/4) of an integer basis given as rows; exact
/// rational Gram–Schmidt, adequate for the small dimensions used here.
pub fn lll_reduce(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n == 0 {
        return basis;
    }
    let q = |v: BigInt| BigRational::from_integer(v);
    let gram_schmidt = |basis: &[Vec<BigInt>]| {
        let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut norms: Vec<BigRational> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<BigRational> = basis[i].iter().cloned().map(q).collect();
            for j in 0..i {
                if norms[j].is_zero() {
                    continue;
                }
                let num: BigRational = basis[i].iter().zip(&bstar[j]).map(|(a, b)| q(a.clone()) * b).sum();
                mu[i][j] = num / &norms[j];
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= &mu[i][j] * bk;
                }
            }
            norms.push(v.iter().map(|c| c * c).sum());
            bstar.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gram_schmidt(&basis);
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = mu[k][j].round().to_integer();
            if !r.is_zero() {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
                let (m2, n2) = gram_schmidt(&basis);
                mu = m2;
                norms = n2;
            }
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (m2, n2) = gram_schmidt(&basis);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Shortest vector of the lattice spanned by `(e_i, ⌊K x_i⌉)`, restricted
/// to its first `n` coordinates; `K = 2^{bits(prec − margin)}`.
pub fn lll_relation(xs: &[PrecReal], prec: u32) -> Option<Vec<BigInt>> {
    let n = xs.len();
    let k = bits_for_digits(prec.saturating_sub(safety_margin(n)));
    let basis: Vec<Vec<BigInt>> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut row: Vec<BigInt> = (0..n).map(|j| BigInt::from((i == j) as u8)).collect();
            let half = BigInt::one() << x.bits().saturating_sub(1);
            let scaled = ((x.mid_raw() << k) + half) >> x.bits();
            row.push(scaled);
            row
        })
        .collect();
    let reduced = lll_reduce(basis);
    let first = reduced.into_iter().next()?;
    let c: Vec<BigInt> = first[..n].to_vec();
    if c.iter().all(Zero::is_zero) {
        return None;
    }
    Some(normalize(c))
}

/// Max-norm as `f64`, for reporting.
pub fn norm_f64(c: &[BigInt]) -> f64 {
    max_abs(c).to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::pi;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rejects_bad_inputs() {
        let bits = bits_for_digits(80);
        let x = pi(bits);
        assert!(matches!(pslq(std::slice::from_ref(&x), &BigInt::from(10), 80), Err(MzvError::InvalidArgument(_))));
        assert!(matches!(pslq(&[x.clone(), x.clone()], &BigInt::from(10), 30), Err(MzvError::InsufficientPrecision(_))));
        let fuzzy = x.clone().add_rad(1e-10);
        assert!(matches!(pslq(&[fuzzy, x], &BigInt::from(10), 60), Err(MzvError::InsufficientPrecision(_))));
    }

    #[test]
    fn small_rational_relation() {
        // 3·(1/3) − 1 = 0 in the first two entries.
        let bits = bits_for_digits(80);
        let third = PrecReal::from_ratio(&BigRational::new(1.into(), 3.into()), bits);
        let xs = [third.clone(), PrecReal::one(bits), pi(bits)];
        // Drop the rounding radius of 1/3; it is far below 1e-80 anyway.
        let r = pslq(&xs, &BigInt::from(1000), 80).unwrap();
        assert_eq!(r.status, RelationStatus::Found);
        assert_eq!(r.coefficients, bi(&[3, -1, 0]));
        assert_eq!(r.lll_confirms, Some(true));
    }

    #[test]
    fn lll_reduces_a_textbook_basis() {
        let basis = vec![bi(&[1, 1, 1]), bi(&[-1, 0, 2]), bi(&[3, 5, 6])];
        let red = lll_reduce(basis);
        // Determinant ±3 is preserved and the first vector is short.
        let norm2 = |v: &Vec<BigInt>| v.iter().map(|x| x * x).sum::<BigInt>();
        assert!(norm2(&red[0]) <= BigInt::from(3));
    }
}
