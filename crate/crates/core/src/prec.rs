//! Fixed-point arbitrary-precision reals and complexes with error balls.
//!
//! A [`PrecReal`] is a midpoint `mid · 2^-bits` (an unbounded integer at a
//! fixed binary scale) together with an absolute radius. Every operation
//! widens the radius by the propagated input radii plus its own rounding, so
//! the true value always lies in `[mid - rad, mid + rad]`. A radius of
//! `+inf` marks an undefined value (for example a divergent coefficient)
//! and is contagious.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MzvError, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary digits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32
}

/// `10^-digits` as an `f64` tolerance.
pub fn tol(digits: u32) -> f64 {
    10f64.powi(-(digits as i32))
}

fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

/// Rounds an `f64` error estimate upwards.
fn up(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
}

/// `x · 2^-k` rounded towards zero.
fn shr_trunc(x: &BigInt, k: u32) -> BigInt {
    if x.is_negative() {
        -((-x) >> k)
    } else {
        x >> k
    }
}

/// `|m| · 2^-bits` to about 60 bits, slightly inflated.
fn scaled_abs(m: &BigInt, bits: u32) -> f64 {
    let nb = m.bits();
    if nb == 0 {
        return 0.0;
    }
    let shift = nb.saturating_sub(62);
    let top = (m.magnitude() >> shift).to_f64().unwrap_or(f64::INFINITY);
    up(top * pow2(shift as i64 - bits as i64))
}

#[derive(Clone, Debug)]
pub struct PrecReal {
    mid: BigInt,
    rad: f64,
    bits: u32,
}

impl PrecReal {
    pub fn zero(bits: u32) -> Self {
        PrecReal { mid: BigInt::zero(), rad: 0.0, bits }
    }

    pub fn one(bits: u32) -> Self {
        PrecReal { mid: BigInt::one() << bits, rad: 0.0, bits }
    }

    /// A value about which nothing is known.
    pub fn undefined(bits: u32) -> Self {
        PrecReal { mid: BigInt::zero(), rad: f64::INFINITY, bits }
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> Self {
        PrecReal { mid: v.into() << bits, rad: 0.0, bits }
    }

    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let num = r.numer() << bits;
        let mid = num.div_floor(r.denom());
        let exact = (&mid * r.denom()) == num;
        PrecReal { mid, rad: if exact { 0.0 } else { pow2(-(bits as i64)) }, bits }
    }

    /// Exact conversion of a finite `f64` (rounded only if it has more
    /// fractional bits than `bits`).
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return PrecReal::zero(bits);
        }
        let (mant, exp) = decompose_f64(x);
        let shift = exp + bits as i64;
        if shift >= 0 {
            PrecReal { mid: BigInt::from(mant) << shift as usize, rad: 0.0, bits }
        } else {
            let drop = (-shift) as u64;
            let exact = drop < 64 && mant.unsigned_abs().trailing_zeros() as u64 >= drop;
            let mid = shr_trunc(&BigInt::from(mant), drop as u32);
            PrecReal { mid, rad: if exact { 0.0 } else { pow2(-(bits as i64)) }, bits }
        }
    }

    pub fn from_parts(mid: BigInt, rad: f64, bits: u32) -> Self {
        PrecReal { mid, rad, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mid_raw(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.mid.is_zero() && self.rad == 0.0
    }

    pub fn ulp(&self) -> f64 {
        pow2(-(self.bits as i64))
    }

    pub fn to_f64(&self) -> f64 {
        let a = scaled_abs(&self.mid, self.bits) / (1.0 + 4.0 * f64::EPSILON);
        if self.mid.is_negative() {
            -a
        } else {
            a
        }
    }

    /// Upper bound on `|mid|`.
    pub fn mid_abs(&self) -> f64 {
        scaled_abs(&self.mid, self.bits)
    }

    /// Upper bound on the absolute value of anything in the ball.
    pub fn abs_upper(&self) -> f64 {
        up(self.mid_abs() + self.rad)
    }

    pub fn add_rad(mut self, r: f64) -> Self {
        self.rad = up(self.rad + r);
        self
    }

    pub fn with_rad(mut self, r: f64) -> Self {
        self.rad = r;
        self
    }

    /// Rescales to a different number of fractional bits.
    pub fn with_bits(&self, bits: u32) -> Self {
        if bits == self.bits {
            return self.clone();
        }
        if bits > self.bits {
            PrecReal { mid: &self.mid << (bits - self.bits), rad: self.rad, bits }
        } else {
            let k = self.bits - bits;
            let mid = shr_trunc(&self.mid, k);
            if &mid << k == self.mid {
                return PrecReal { mid, rad: self.rad, bits };
            }
            PrecReal { mid, rad: up(self.rad + pow2(-(bits as i64))), bits }
        }
    }

    fn aligned<'a>(&'a self, o: &'a Self) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        match self.bits.cmp(&o.bits) {
            std::cmp::Ordering::Equal => (Cow::Borrowed(self), Cow::Borrowed(o)),
            std::cmp::Ordering::Less => (Cow::Owned(self.with_bits(o.bits)), Cow::Borrowed(o)),
            std::cmp::Ordering::Greater => (Cow::Borrowed(self), Cow::Owned(o.with_bits(self.bits))),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        PrecReal { mid: &a.mid + &b.mid, rad: up(a.rad + b.rad), bits: a.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        PrecReal { mid: &a.mid - &b.mid, rad: up(a.rad + b.rad), bits: a.bits }
    }

    pub fn add_assign(&mut self, o: &Self) {
        if o.bits == self.bits {
            self.mid += &o.mid;
            self.rad = up(self.rad + o.rad);
        } else {
            *self = self.add(o);
        }
    }

    pub fn neg(&self) -> Self {
        PrecReal { mid: -&self.mid, rad: self.rad, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        let bits = a.bits;
        if !a.rad.is_finite() || !b.rad.is_finite() {
            return PrecReal::undefined(bits);
        }
        let prod = &a.mid * &b.mid;
        let (am, bm) = (a.mid_abs(), b.mid_abs());
        let mut rad = am * b.rad + bm * a.rad + a.rad * b.rad;
        let mid = shr_trunc(&prod, bits);
        if &mid << bits != prod {
            rad += pow2(-(bits as i64));
        }
        PrecReal { mid, rad: up(rad), bits }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if !self.rad.is_finite() {
            return PrecReal::undefined(self.bits);
        }
        let kf = scaled_abs(k, 0);
        PrecReal { mid: &self.mid * k, rad: up(self.rad * kf), bits: self.bits }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_int(&BigInt::from(k))
    }

    pub fn div_int(&self, d: &BigInt) -> Self {
        assert!(!d.is_zero(), "division by zero");
        if !self.rad.is_finite() {
            return PrecReal::undefined(self.bits);
        }
        let df = scaled_abs(d, 0) / (1.0 + 8.0 * f64::EPSILON);
        let (q, r) = self.mid.div_rem(d);
        let rad = if r.is_zero() { self.rad / df } else { self.rad / df + pow2(-(self.bits as i64)) };
        PrecReal { mid: q, rad: up(rad), bits: self.bits }
    }

    pub fn div_u64(&self, d: u64) -> Self {
        self.div_int(&BigInt::from(d))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        self.mul_int(r.numer()).div_int(r.denom())
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            PrecReal { mid: &self.mid << k as usize, rad: up(self.rad * pow2(k)), bits: self.bits }
        } else {
            let mid = shr_trunc(&self.mid, (-k) as u32);
            PrecReal { mid, rad: up(self.rad * pow2(k) + pow2(-(self.bits as i64))), bits: self.bits }
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.aligned(o);
        let bits = a.bits;
        let bm = b.mid_abs() / (1.0 + 8.0 * f64::EPSILON);
        if !(bm > b.rad) {
            return Err(MzvError::InsufficientPrecision("division by a ball containing zero".into()));
        }
        if !a.rad.is_finite() {
            return Ok(PrecReal::undefined(bits));
        }
        let mid = (&a.mid << bits) / &b.mid;
        let q = a.mid_abs() / bm;
        let rad = (a.rad + q * b.rad) / (bm - b.rad) + pow2(-(bits as i64));
        Ok(PrecReal { mid, rad: up(rad), bits })
    }

    pub fn sqrt(&self) -> Result<Self> {
        let lo = self.to_f64() - self.rad;
        if self.mid.is_negative() || !(lo > 0.0) && !self.is_exact_zero() {
            if self.is_exact_zero() {
                return Ok(self.clone());
            }
            return Err(MzvError::InsufficientPrecision("square root of a ball reaching zero".into()));
        }
        let mid = (&self.mid << self.bits).sqrt();
        let rad = self.rad / (2.0 * lo.sqrt()) + pow2(-(self.bits as i64));
        Ok(PrecReal { mid, rad: up(rad), bits: self.bits })
    }

    /// Nearest integer to the midpoint.
    pub fn round_mid(&self) -> BigInt {
        let half = BigInt::one() << self.bits.saturating_sub(1);
        (&self.mid + half) >> self.bits
    }

    pub fn exp(&self) -> Self {
        if !self.rad.is_finite() {
            return PrecReal::undefined(self.bits);
        }
        let m = PrecReal { rad: 0.0, ..self.clone() };
        let y = exp_mid(&m);
        let grow = self.rad.exp_m1();
        y.clone().add_rad(y.abs_upper() * grow)
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.rad.is_finite() {
            return Ok(PrecReal::undefined(self.bits));
        }
        let lo = self.to_f64() - self.rad;
        if !(lo > 0.0) {
            return Err(MzvError::InsufficientPrecision("logarithm of a ball reaching zero".into()));
        }
        let m = PrecReal { rad: 0.0, ..self.clone() };
        Ok(ln_mid(&m).add_rad(self.rad / lo))
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        if !self.rad.is_finite() {
            return (PrecReal::undefined(self.bits), PrecReal::undefined(self.bits));
        }
        let m = PrecReal { rad: 0.0, ..self.clone() };
        let (s, c) = sin_cos_mid(&m);
        (s.add_rad(self.rad), c.add_rad(self.rad))
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.mid.is_negative();
        let scaled = self.mid.abs() * BigInt::from(10u32).pow(digits);
        let half = BigInt::one() << self.bits.saturating_sub(1);
        let rounded = if self.bits == 0 { scaled } else { (scaled + half) >> self.bits };
        let s = rounded.to_string();
        let d = digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (int_part, frac_part) = s.split_at(s.len() - d);
        let sign = if neg && rounded_nonzero(&rounded) { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Parses `[-]digits[.digits][e[-]exp]`. The result carries only the
    /// conversion error.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<Self> {
        let (n, e10, _) = parse_decimal_parts(s)?;
        Ok(Self::from_decimal_parts(&n, e10, bits))
    }

    /// Like [`parse_decimal`](Self::parse_decimal) but also treats the
    /// literal as known to within half a unit in its last digit.
    pub fn parse_decimal_literal(s: &str, bits: u32) -> Result<Self> {
        let (n, e10, _) = parse_decimal_parts(s)?;
        let v = Self::from_decimal_parts(&n, e10, bits);
        Ok(v.add_rad(0.5 * 10f64.powi(e10 as i32)))
    }

    fn from_decimal_parts(n: &BigInt, e10: i64, bits: u32) -> Self {
        if e10 >= 0 {
            let v = n * BigInt::from(10u32).pow(e10 as u32);
            PrecReal::from_int(v, bits)
        } else {
            let den = BigInt::from(10u32).pow((-e10) as u32);
            PrecReal::from_ratio(&BigRational::new(n.clone(), den), bits)
        }
    }
}

fn rounded_nonzero(x: &BigInt) -> bool {
    !x.is_zero()
}

fn decompose_f64(x: f64) -> (i64, i64) {
    let b = x.to_bits();
    let sign = if b >> 63 == 0 { 1i64 } else { -1 };
    let exp = ((b >> 52) & 0x7ff) as i64;
    let frac = (b & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp - 1075)
    }
}

/// Splits a decimal literal into `(integer, exponent, digits)` with value
/// `integer · 10^exponent`.
pub fn parse_decimal_parts(s: &str) -> Result<(BigInt, i64, usize)> {
    let t = s.trim();
    let err = || MzvError::Parse(format!("not a decimal number: {s:?}"));
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let mut n: BigInt = digits.parse().map_err(|_| err())?;
    if neg {
        n = -n;
    }
    Ok((n, exp - fp.len() as i64, digits.len()))
}

impl fmt::Display for PrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.bits as f64) / LOG2_10).floor() as usize);
        write!(f, "{} ± {:.2e}", self.to_decimal(digits as u32), self.rad)
    }
}

fn guard(bits: u32) -> u32 {
    bits + 32
}

fn cached_constant(table: &'static OnceLock<Mutex<HashMap<u32, PrecReal>>>, bits: u32, f: impl FnOnce(u32) -> PrecReal) -> PrecReal {
    let table = table.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = table.lock().unwrap().get(&bits) {
        return v.clone();
    }
    let v = f(bits);
    table.lock().unwrap().insert(bits, v.clone());
    v
}

/// `sum_j (-1)^j / ((2j+1) k^(2j+1))` (or without signs) in fixed point,
/// returned as a ball at `bits`.
fn atan_inv(k: u64, hyperbolic: bool, bits: u32) -> PrecReal {
    let w = guard(bits);
    let one = BigInt::one() << w;
    let k2 = BigInt::from(k * k);
    let mut power = &one / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    let mut terms = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * j + 1);
        if hyperbolic || j.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        j += 1;
        terms += 1;
    }
    // Each truncated division loses < 1 unit; the dropped tail is < 1 unit.
    let rad = (2 * terms + 2) as f64 * pow2(-(w as i64));
    PrecReal { mid: sum, rad, bits: w }.with_bits(bits)
}

pub fn pi(bits: u32) -> PrecReal {
    static TABLE: OnceLock<Mutex<HashMap<u32, PrecReal>>> = OnceLock::new();
    cached_constant(&TABLE, bits, |bits| {
        let w = guard(bits);
        let a = atan_inv(5, false, w).mul_i64(16);
        let b = atan_inv(239, false, w).mul_i64(4);
        a.sub(&b).with_bits(bits)
    })
}

pub fn ln2(bits: u32) -> PrecReal {
    static TABLE: OnceLock<Mutex<HashMap<u32, PrecReal>>> = OnceLock::new();
    cached_constant(&TABLE, bits, |bits| atan_inv(3, true, guard(bits)).mul_i64(2).with_bits(bits))
}

/// `exp` of an exact midpoint.
fn exp_mid(x: &PrecReal) -> PrecReal {
    let bits = x.bits;
    let xf = x.to_f64();
    assert!(xf.abs() < 1e7, "exp argument out of range: {xf}");
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let extra = (k.unsigned_abs() as f64).log2().max(0.0) as u32;
    let w = guard(bits) + extra + 16;
    let xw = x.with_bits(w);
    let r = xw.sub(&ln2(w).mul_i64(k));
    // Halve s times so the Taylor series converges quickly.
    let s: u32 = 10;
    let r = r.mul_pow2(-(s as i64));
    let mut sum = PrecReal::one(w);
    let mut term = PrecReal::one(w);
    let rf = r.abs_upper();
    let mut j = 1u64;
    loop {
        term = term.mul(&r).div_u64(j);
        sum.add_assign(&term);
        if term.mid_abs() == 0.0 || term.abs_upper() < pow2(-(w as i64) - 2) {
            break;
        }
        j += 1;
    }
    // Tail after term j: geometric with ratio rf/(j+1) < 1/2.
    let tail = 2.0 * term.abs_upper() * rf;
    let mut y = sum.add_rad(tail);
    for _ in 0..s {
        y = y.square();
    }
    y.mul_pow2(k).with_bits(bits)
}

/// `ln` of a positive exact midpoint.
fn ln_mid(x: &PrecReal) -> PrecReal {
    let bits = x.bits;
    let w = guard(bits) + 16;
    // x = 2^e · y with y in [0.75, 1.5).
    let nb = x.mid.bits() as i64;
    let mut e = nb - bits as i64;
    let mut y = x.with_bits(w).mul_pow2(-e);
    if y.to_f64() >= 1.5 {
        y = y.mul_pow2(-1);
        e += 1;
    } else if y.to_f64() < 0.75 {
        y = y.mul_pow2(1);
        e -= 1;
    }
    let one = PrecReal::one(w);
    let t = y.sub(&one).div(&y.add(&one)).expect("y > 0");
    let t2 = t.square();
    let mut power = t.clone();
    let mut sum = t.clone();
    let mut j = 1u64;
    loop {
        power = power.mul(&t2);
        let term = power.div_u64(2 * j + 1);
        sum.add_assign(&term);
        if term.mid_abs() == 0.0 || term.abs_upper() < pow2(-(w as i64) - 2) {
            break;
        }
        j += 1;
    }
    let tf = t.abs_upper();
    let tail = power.abs_upper() * tf * tf / (1.0 - tf * tf);
    let atanh = sum.add_rad(tail);
    atanh.mul_i64(2).add(&ln2(w).mul_i64(e)).with_bits(bits)
}

fn sin_cos_mid(x: &PrecReal) -> (PrecReal, PrecReal) {
    let bits = x.bits;
    let w = guard(bits) + 16;
    let half_pi = pi(w).mul_pow2(-1);
    let xf = x.to_f64();
    let k = (xf / std::f64::consts::FRAC_PI_2).round() as i64;
    let r = x.with_bits(w).sub(&half_pi.mul_i64(k));
    let r2 = r.square();
    // sin r = sum (-1)^j r^(2j+1)/(2j+1)!, cos r = sum (-1)^j r^(2j)/(2j)!
    let mut s_term = r.clone();
    let mut c_term = PrecReal::one(w);
    let mut s = s_term.clone();
    let mut c = c_term.clone();
    let mut j = 1u64;
    loop {
        s_term = s_term.mul(&r2).div_u64((2 * j) * (2 * j + 1)).neg();
        c_term = c_term.mul(&r2).div_u64((2 * j - 1) * (2 * j)).neg();
        s.add_assign(&s_term);
        c.add_assign(&c_term);
        if (s_term.mid_abs() == 0.0 || s_term.abs_upper() < pow2(-(w as i64) - 2))
            && (c_term.mid_abs() == 0.0 || c_term.abs_upper() < pow2(-(w as i64) - 2))
        {
            break;
        }
        j += 1;
    }
    // Alternating series with decreasing terms (|r| < 1): tail below next term.
    let tail = s_term.abs_upper().max(c_term.abs_upper());
    let s = s.add_rad(tail);
    let c = c.add_rad(tail);
    let (s, c) = match k.rem_euclid(4) {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    (s.with_bits(bits), c.with_bits(bits))
}

/// Complex number with independent real and imaginary balls.
#[derive(Clone, Debug)]
pub struct PrecComplex {
    pub re: PrecReal,
    pub im: PrecReal,
}

impl PrecComplex {
    pub fn new(re: PrecReal, im: PrecReal) -> Self {
        PrecComplex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        PrecComplex { re: PrecReal::zero(bits), im: PrecReal::zero(bits) }
    }

    pub fn one(bits: u32) -> Self {
        PrecComplex { re: PrecReal::one(bits), im: PrecReal::zero(bits) }
    }

    pub fn undefined(bits: u32) -> Self {
        PrecComplex { re: PrecReal::undefined(bits), im: PrecReal::undefined(bits) }
    }

    pub fn from_real(re: PrecReal) -> Self {
        let bits = re.bits();
        PrecComplex { re, im: PrecReal::zero(bits) }
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        PrecComplex { re: PrecReal::from_f64(re, bits), im: PrecReal::from_f64(im, bits) }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Largest of the two radii.
    pub fn rad(&self) -> f64 {
        self.re.rad().max(self.im.rad())
    }

    /// Upper bound on the distance from the midpoint to the true value.
    pub fn err(&self) -> f64 {
        up(self.re.rad().hypot(self.im.rad()))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn abs_upper(&self) -> f64 {
        up(self.re.abs_upper().hypot(self.im.abs_upper()))
    }

    pub fn add(&self, o: &Self) -> Self {
        PrecComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        PrecComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.re.add_assign(&o.re);
        self.im.add_assign(&o.im);
    }

    pub fn neg(&self) -> Self {
        PrecComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        PrecComplex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if !self.is_finite() || !o.is_finite() {
            return PrecComplex::undefined(self.bits().max(o.bits()));
        }
        match (self.im.is_exact_zero(), o.im.is_exact_zero()) {
            (true, true) => PrecComplex::from_real(self.re.mul(&o.re)),
            (true, false) => PrecComplex { re: self.re.mul(&o.re), im: self.re.mul(&o.im) },
            (false, true) => PrecComplex { re: self.re.mul(&o.re), im: self.im.mul(&o.re) },
            (false, false) => PrecComplex {
                re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
                im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
            },
        }
    }

    pub fn mul_real(&self, r: &PrecReal) -> Self {
        PrecComplex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        PrecComplex { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        PrecComplex { re: self.re.mul_rational(r), im: self.im.mul_rational(r) }
    }

    pub fn div_u64(&self, d: u64) -> Self {
        PrecComplex { re: self.re.div_u64(d), im: self.im.div_u64(d) }
    }

    pub fn mul_i(&self) -> Self {
        PrecComplex { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        PrecComplex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }

    pub fn add_rad(self, r: f64) -> Self {
        PrecComplex { re: self.re.add_rad(r), im: self.im.add_rad(r) }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        // Fixed point keeps absolute accuracy only; rescale a small divisor
        // (exactly, by a power of two) so that |o|² does not underflow.
        let m = o.re.mid_abs().max(o.im.mid_abs());
        if m > 0.0 && m < 0.5 {
            let k = (-m.log2()).floor() as i64;
            let (a, b) = (self.mul_pow2(k), o.mul_pow2(k));
            return a.div_unscaled(&b);
        }
        self.div_unscaled(o)
    }

    fn div_unscaled(&self, o: &Self) -> Result<Self> {
        if o.im.is_exact_zero() {
            return Ok(PrecComplex { re: self.re.div(&o.re)?, im: self.im.div(&o.re)? });
        }
        let den = o.re.square().add(&o.im.square());
        let num = self.mul(&o.conj());
        Ok(PrecComplex { re: num.re.div(&den)?, im: num.im.div(&den)? })
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        PrecComplex { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k) }
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        if self.im.is_exact_zero() {
            return PrecComplex::from_real(r);
        }
        let (s, c) = self.im.sin_cos();
        PrecComplex { re: r.mul(&c), im: r.mul(&s) }
    }

    /// `(2 pi i)^n`.
    pub fn two_pi_i_pow(n: u32, bits: u32) -> Self {
        let two_pi_i = PrecComplex { re: PrecReal::zero(bits), im: pi(bits).mul_i64(2) };
        let mut acc = PrecComplex::one(bits);
        for _ in 0..n {
            acc = acc.mul(&two_pi_i);
        }
        acc
    }

    /// `|self - other|` upper bound on the distance between midpoints.
    pub fn mid_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        if d.re.mid_raw().is_zero() && d.im.mid_raw().is_zero() {
            return 0.0;
        }
        up(d.re.mid_abs().hypot(d.im.mid_abs()))
    }
}

impl fmt::Display for PrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20) as u32;
        write!(
            f,
            "({}) + ({})i ± {:.2e}",
            self.re.to_decimal(digits),
            self.im.to_decimal(digits),
            self.err()
        )
    }
}

/// `true` when `|x - y|` is provably small: midpoints within `tol` after
/// accounting for both radii.
pub fn close(x: &PrecReal, y: &PrecReal, tol: f64) -> bool {
    let d = x.sub(y);
    d.abs_upper() <= tol
}

pub fn sign_of(x: &PrecReal) -> Sign {
    x.mid.sign()
}
