//! Numerical values of `ζ(k_1, …, k_l) = Σ_{m_1<⋯<m_l} 1/(m_1^{k_1}⋯m_l^{k_l})`.
//!
//! Three backends:
//! * `holder` — split `[0,1]` at 1/2; each half is a series in `2^{-m}`:
//!   `ζ(w) = Σ_{w=uv} Li_{1/2}(u) · Li_{1/2}(dual v)` (all signs `+`).
//! * `chen` — regularized transport along `[0,1]`, `ζ = (−1)^l · coeff`.
//! * `series` — truncated defining sum in `f64`, an oracle only.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::chen::{transport_regularized, Path};
use crate::error::{MzvError, Result};
use crate::prec::{bits_for_digits, PrecReal};
use crate::words::{Index, Word};

/// Default decimal precision.
pub const DEFAULT_PREC: u32 = 50;

const GUARD_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Holder,
    Chen,
    Series,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Holder => "holder",
            Backend::Chen => "chen",
            Backend::Series => "series",
        })
    }
}

impl FromStr for Backend {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holder" => Ok(Backend::Holder),
            "chen" => Ok(Backend::Chen),
            "series" => Ok(Backend::Series),
            _ => Err(MzvError::Parse(format!("unknown backend {s:?} (holder, chen, series)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MzvValue {
    pub index: Index,
    pub value: PrecReal,
    /// Absolute error bound, always positive.
    pub error_bound: f64,
    pub backend: Backend,
    /// Requested decimal digits (for `series`: digits justified by the bound).
    pub prec: u32,
}

impl MzvValue {
    fn new(index: Index, value: PrecReal, backend: Backend, prec: u32) -> Self {
        let floor = 2f64.powi(-(value.bits() as i32));
        let error_bound = value.rad().max(floor);
        MzvValue { index, value, error_bound, backend, prec }
    }

    /// Decimal string with `prec` digits after the point.
    pub fn decimal(&self) -> String {
        self.value.to_decimal(self.prec)
    }
}

fn require_admissible(idx: &Index) -> Result<()> {
    if !idx.is_admissible() {
        return Err(MzvError::NonAdmissibleIndex(idx.to_string()));
    }
    Ok(())
}

fn working_bits(prec: u32) -> u32 {
    bits_for_digits(prec) + GUARD_BITS
}

/// Upper bound for `Σ_{m>M} (1 + ln m)^a / (a! · m^s)`, `s ≥ 2`.
///
/// The summand is unimodal in `m`, so the sum is at most its integral over
/// `[M, ∞)` plus its maximum there. With `t = ln x` the integral is
/// `e^{-(s-1)T} Σ_{j≤a} (1+T)^{a-j} / ((a-j)! (s-1)^{j+1})`, `T = ln M`.
pub fn series_tail_bound(a: usize, s: u32, m: u64) -> f64 {
    let t = (m as f64).ln();
    let s1 = (s - 1) as f64;
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let integral: f64 = (0..=a).map(|j| (1.0 + t).powi((a - j) as i32) / (fact(a - j) * s1.powi(j as i32 + 1))).sum::<f64>()
        * (-s1 * t).exp();
    let f = |x: f64| (1.0 + x.ln()).powi(a as i32) / (fact(a) * x.powi(s as i32));
    let peak = (a as f64 / s as f64 - 1.0).exp();
    let max = if peak > m as f64 { f(peak) } else { f(m as f64) };
    (integral + max) * (1.0 + 1e-12)
}

/// Truncated defining sum over `m_l ≤ terms`, in `f64`.
pub fn eval_series(idx: &Index, terms: u64) -> Result<MzvValue> {
    require_admissible(idx)?;
    let l = idx.depth();
    if l == 0 {
        return Ok(MzvValue::new(idx.clone(), PrecReal::one(64), Backend::Series, 15));
    }
    if terms < l as u64 {
        return Err(MzvError::InvalidArgument(format!("need at least {l} terms")));
    }
    let k = idx.parts();
    // partial[j] = Σ over m_1 < ⋯ < m_j ≤ m of Π 1/m_i^{k_i}
    let mut partial = vec![0.0f64; l + 1];
    partial[0] = 1.0;
    for m in 1..=terms {
        let mf = m as f64;
        for j in (1..=l).rev() {
            partial[j] += partial[j - 1] / mf.powi(k[j - 1] as i32);
        }
    }
    let v = partial[l];
    let rounding = v.abs() * 4.0 * (l as f64 + 2.0) * terms as f64 * f64::EPSILON;
    let bound = series_tail_bound(l - 1, k[l - 1], terms) + rounding;
    let value = PrecReal::from_f64(v, 64).add_rad(bound);
    let digits = (-bound.log10()).floor().max(0.0) as u32;
    Ok(MzvValue::new(idx.clone(), value, Backend::Series, digits))
}

/// `Li_k(1/2) = Σ_{m_1<⋯<m_l} 2^{-m_l}/(m_1^{k_1}⋯m_l^{k_l})` for any index
/// with positive entries, at `bits` working precision.
pub fn li_half_bits(idx: &Index, bits: u32) -> PrecReal {
    let l = idx.depth();
    if l == 0 {
        return PrecReal::one(bits);
    }
    let k = idx.parts();
    let target = 2f64.powi(-(bits as i32));
    let mut partial = vec![PrecReal::zero(bits); l];
    partial[0] = PrecReal::one(bits);
    let mut sum = PrecReal::zero(bits);
    let mut power = PrecReal::one(bits);
    let mut m: u64 = 0;
    loop {
        m += 1;
        power = power.mul_pow2(-1);
        // New top-level terms with m_l = m use partial[l−1] over m_{l−1} < m.
        let mut top = partial[l - 1].clone();
        for _ in 0..k[l - 1] {
            top = top.div_u64(m);
        }
        sum.add_assign(&top.mul(&power));
        for j in (1..l).rev() {
            let mut t = partial[j - 1].clone();
            for _ in 0..k[j - 1] {
                t = t.div_u64(m);
            }
            partial[j].add_assign(&t);
        }
        // Tail Σ_{m' > m} 2^{-m'} (1 + ln m')^{l−1} with ratio ≤ q.
        let next = (m + 1) as f64;
        let q = 0.5 * (1.0 + 1.0 / next).powi(l as i32 - 1);
        let tail = 2f64.powf(-next) * (1.0 + next.ln()).powi(l as i32 - 1) / (1.0 - q);
        if q < 1.0 && tail < target {
            return sum.add_rad(tail);
        }
    }
}

/// [`li_half_bits`] accurate to `10^-prec`.
pub fn li_half(idx: &Index, prec: u32) -> PrecReal {
    li_half_bits(idx, working_bits(prec))
}

/// The index of a word starting with 1 (its block decomposition), or the
/// empty index for the empty word.
fn block_index(w: &Word) -> Index {
    if w.is_empty() {
        Index::empty()
    } else {
        w.to_index().expect("starts with 1")
    }
}

/// The Hölder split as a list of `(Li index for the [0,1/2] half,
/// Li index for the [1/2,1] half)`; `ζ(w)` is the sum of the products.
pub fn holder_terms(w: &Word) -> Result<Vec<(Index, Index)>> {
    if !w.is_admissible() || w.is_empty() {
        return Err(MzvError::InvalidWord(format!("{w} is not admissible")));
    }
    Ok((0..=w.len()).map(|i| (block_index(&w.prefix(i)), block_index(&w.suffix_from(i).dual()))).collect())
}

pub fn eval_holder(idx: &Index, prec: u32) -> Result<MzvValue> {
    require_admissible(idx)?;
    let bits = working_bits(prec);
    if idx.is_empty() {
        return Ok(MzvValue::new(idx.clone(), PrecReal::one(bits), Backend::Holder, prec));
    }
    let terms = holder_terms(&idx.to_word())?;
    let mut cache: HashMap<Index, PrecReal> = HashMap::new();
    let mut li = |i: &Index| cache.entry(i.clone()).or_insert_with(|| li_half_bits(i, bits)).clone();
    let mut total = PrecReal::zero(bits);
    for (a, b) in &terms {
        let x = li(a);
        let y = li(b);
        total.add_assign(&x.mul(&y));
    }
    Ok(MzvValue::new(idx.clone(), total, Backend::Holder, prec))
}

pub fn eval_chen(idx: &Index, prec: u32) -> Result<MzvValue> {
    require_admissible(idx)?;
    if idx.is_empty() {
        return Ok(MzvValue::new(idx.clone(), PrecReal::one(working_bits(prec)), Backend::Chen, prec));
    }
    let w = idx.to_word();
    let r = transport_regularized(&Path::unit_interval(), w.len(), prec, true)?;
    let c = r.series.try_coeff(w.letters())?.re.clone();
    let v = if idx.depth().is_multiple_of(2) { c } else { c.neg() };
    Ok(MzvValue::new(idx.clone(), v, Backend::Chen, prec))
}

/// [`eval_chen`] for every admissible index of weight `n` from a single
/// transport.
pub fn eval_chen_weight(n: usize, prec: u32) -> Result<Vec<MzvValue>> {
    let r = transport_regularized(&Path::unit_interval(), n, prec, true)?;
    crate::words::enumerate_admissible(n)
        .into_iter()
        .map(|w| {
            let idx = w.to_index()?;
            let c = r.series.try_coeff(w.letters())?.re.clone();
            let v = if idx.depth() % 2 == 0 { c } else { c.neg() };
            Ok(MzvValue::new(idx, v, Backend::Chen, prec))
        })
        .collect()
}

/// Terms used by the `series` backend when called through [`Evaluator`].
pub const SERIES_TERMS: u64 = 100_000;

/// Memoizing front end keyed by `(index, backend, precision)`.
#[derive(Debug, Default)]
pub struct Evaluator {
    cache: RwLock<HashMap<(Index, Backend, u32), MzvValue>>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&self, idx: &Index, backend: Backend, prec: u32) -> Result<MzvValue> {
        let key = (idx.clone(), backend, prec);
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = match backend {
            Backend::Holder => eval_holder(idx, prec)?,
            Backend::Chen => eval_chen(idx, prec)?,
            Backend::Series => eval_series(idx, SERIES_TERMS)?,
        };
        self.cache.write().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    /// Seeds the cache with a previously computed value.
    pub fn insert(&self, v: MzvValue) {
        self.cache.write().expect("cache lock").insert((v.index.clone(), v.backend, v.prec), v);
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::{close, ln2, pi};

    fn idx(s: &str) -> Index {
        s.parse().unwrap()
    }

    #[test]
    fn li_half_classical_values() {
        let bits = working_bits(50);
        assert!(close(&li_half(&idx("1"), 50), &ln2(bits), 1e-50));
        // Li_2(1/2) = π²/12 − log²2 / 2
        let want = pi(bits).square().div_u64(12).sub(&ln2(bits).square().div_u64(2));
        assert!(close(&li_half(&idx("2"), 50), &want, 1e-50));
        assert!(li_half(&Index::empty(), 10).sub(&PrecReal::one(working_bits(10))).abs_upper() == 0.0);
    }

    #[test]
    fn zeta_two_holder() {
        let v = eval_holder(&idx("2"), 50).unwrap();
        let want = pi(v.value.bits()).square().div_u64(6);
        assert!(close(&v.value, &want, 1e-50));
        assert!(v.error_bound < 1e-50);
    }

    #[test]
    fn euler_identity() {
        let a = eval_holder(&idx("1,2"), 40).unwrap();
        let b = eval_holder(&idx("3"), 40).unwrap();
        assert!(close(&a.value, &b.value, 1e-40));
    }

    #[test]
    fn series_oracle() {
        let v = eval_series(&idx("2"), 100_000).unwrap();
        assert!(v.error_bound <= 1e-4);
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v.value.to_f64() - exact).abs() <= v.error_bound);
        assert!(v.error_bound < 2e-5);
        // Inner k = 1 makes the naive tail bound fail; ours still covers it.
        let w = eval_series(&idx("1,2"), 1000).unwrap();
        assert!((w.value.to_f64() - 1.2020569031595942).abs() <= w.error_bound);
        let empty = eval_series(&Index::empty(), 10).unwrap();
        assert_eq!(empty.value.to_f64(), 1.0);
        assert!(eval_series(&idx("2,1"), 100).is_err());
    }

    #[test]
    fn stuffle_cross_check_in_the_oracle() {
        // 2ζ(2,2) + ζ(4) = ζ(2)²
        let z22 = eval_series(&idx("2,2"), 10_000).unwrap();
        let z4 = eval_series(&idx("4"), 10_000).unwrap();
        let z2 = eval_series(&idx("2"), 10_000).unwrap();
        let lhs = 2.0 * z22.value.to_f64() + z4.value.to_f64();
        let rhs = z2.value.to_f64().powi(2);
        let bound = 2.0 * z22.error_bound + z4.error_bound + 2.0 * 1.7 * z2.error_bound + z2.error_bound.powi(2);
        assert!((lhs - rhs).abs() <= bound);
    }

    #[test]
    fn chen_agrees_with_holder() {
        for s in ["2", "3", "1,2", "1,3", "2,2"] {
            let a = eval_chen(&idx(s), 12).unwrap();
            let b = eval_holder(&idx(s), 12).unwrap();
            assert!(a.value.sub(&b.value).mid_abs() <= a.error_bound + b.error_bound, "{s}");
        }
        assert!(eval_chen(&idx("1,2"), 10).unwrap().value.to_f64() > 0.0);
    }

    #[test]
    fn evaluator_memoizes() {
        let e = Evaluator::new();
        let a = e.eval(&idx("2"), Backend::Holder, 20).unwrap();
        let b = e.eval(&idx("2"), Backend::Holder, 20).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(a.decimal(), b.decimal());
        assert!(e.eval(&idx("2,1"), Backend::Holder, 20).is_err());
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::Holder, Backend::Chen, Backend::Series] {
            assert_eq!(b.to_string().parse::<Backend>().unwrap(), b);
        }
        assert!("quad".parse::<Backend>().is_err());
    }
}
