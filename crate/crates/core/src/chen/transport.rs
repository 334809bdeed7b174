//! Stepwise transport: on each step `x = c + hτ`, `τ ∈ [0,1]`, every
//! coefficient is a power series in `τ` obtained by integrating its parent
//! against the local expansion of `h dτ/(x − p)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{MzvError, Result};
use crate::prec::{bits_for_digits, tol, PrecComplex, PrecReal};

use super::path::{Path, Point};
use super::series::NCSeries;

/// Extra binary digits carried beyond the requested precision.
pub const GUARD_BITS: u32 = 40;

/// Steps never exceed this fraction of the distance to the nearest pole.
const STEP_FRACTION: f64 = 0.45;

/// The poles `p_a` of the forms `dx/(x − p_a)`, one per letter.
#[derive(Clone, Debug)]
pub struct Poles {
    balls: Vec<PrecComplex>,
    approx: Vec<Point>,
}

impl Poles {
    pub fn new(balls: Vec<PrecComplex>) -> Self {
        let approx = balls.iter().map(|b| {
            let (re, im) = b.to_f64();
            Point::new(re, im)
        }).collect();
        Poles { balls, approx }
    }

    /// Letters `0 ↦ dx/x`, `1 ↦ dx/(x − 1)`.
    pub fn standard(bits: u32) -> Self {
        Poles::new(vec![PrecComplex::zero(bits), PrecComplex::one(bits)])
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.approx
    }

    /// Letter whose pole sits exactly at `x`, if any.
    pub fn letter_at(&self, x: Point) -> Option<usize> {
        self.balls.iter().zip(&self.approx).position(|(b, a)| *a == x && b.rad() == 0.0)
    }

    /// The same forms seen in coordinates translated by `-shift`.
    pub fn shifted(&self, shift: Point) -> Poles {
        let bits = self.balls.first().map_or(64, PrecComplex::bits);
        let s = PrecComplex::from_f64(shift.re, shift.im, bits);
        Poles::new(self.balls.iter().map(|b| b.sub(&s)).collect())
    }

    fn min_distance(&self, x: Point) -> f64 {
        self.balls
            .iter()
            .zip(&self.approx)
            .map(|(b, a)| (a - x).norm() - 2.0 * b.err())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Upper bound for `Σ_{m > order} r^m (1 + ln m)^{cap−1} / m`, which
/// dominates the dropped part of every coefficient of length `≤ cap` on a
/// step whose local ratios `|h/(p − c)|` are at most `r`.
pub fn tail_bound(r: f64, order: usize, cap: usize) -> f64 {
    let m = (order + 1) as f64;
    let e = cap.saturating_sub(1) as i32;
    let q = r * (1.0 + 1.0 / m).powi(e);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    r.powf(m) * (1.0 + m.ln()).powi(e) / (m * (1.0 - q))
}

/// Smallest truncation order whose tail bound is below `2^-bits`.
pub fn choose_order(r: f64, cap: usize, bits: u32) -> usize {
    let target = 2f64.powi(-(bits as i32));
    let mut order = cap.max(1);
    while tail_bound(r, order, cap) > target {
        order += if order < 64 { 1 } else { order / 16 };
        assert!(order < 1_000_000, "step ratio {r} too close to 1");
    }
    order
}

/// Fixed-point complex midpoint (`value · 2^bits`); the step recursion
/// runs on these with one analytic error bound per word instead of a
/// radius per operation.
#[derive(Clone, Default)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    /// Upper bound on `|self| · 2^bits` as a power of two times 1.5.
    fn abs_bound(&self, bits: u32) -> f64 {
        let nb = self.re.bits().max(self.im.bits());
        if nb == 0 {
            return 0.0;
        }
        1.5 * 2f64.powi(nb as i32 - bits as i32)
    }
}

fn trunc_shr(x: BigInt, k: u32) -> BigInt {
    if x.is_negative() {
        -((-x) >> k)
    } else {
        x >> k
    }
}

/// `a·b` at `bits` fractional bits, truncated.
fn fx_mul(a: &Fx, b: &Fx, bits: u32, real: bool) -> Fx {
    if real {
        return Fx { re: trunc_shr(&a.re * &b.re, bits), im: BigInt::zero() };
    }
    Fx {
        re: trunc_shr(&a.re * &b.re - &a.im * &b.im, bits),
        im: trunc_shr(&a.re * &b.im + &a.im * &b.re, bits),
    }
}

struct StepCtx<'a> {
    u: &'a [Fx],
    /// `max |u_a|` (upper bound, radius included) and `max rad(u_a)`.
    big_u: f64,
    du: f64,
    order: usize,
    tail: f64,
    cap: usize,
    bits: u32,
    real: bool,
}

/// Series of one straight step from `c` to `c + h`.
fn step_series(c: Point, next: Point, poles: &Poles, cap: usize, bits: u32) -> NCSeries {
    let alphabet = poles.len();
    let cb = PrecComplex::from_f64(c.re, c.im, bits);
    let h = PrecComplex::from_f64(next.re, next.im, bits).sub(&cb);
    // u_a = h/(c − p_a)
    let u_balls: Vec<PrecComplex> = poles
        .balls
        .iter()
        .map(|p| h.div(&p.with_bits(bits).sub(&cb)).expect("step avoids poles").neg())
        .collect();
    let r = u_balls.iter().map(PrecComplex::abs_upper).fold(0.0, f64::max);
    let order = choose_order(r, cap, bits);
    let tail = tail_bound(r, order, cap);
    let real = u_balls.iter().all(|u| u.im.is_exact_zero());
    let u: Vec<Fx> = u_balls.iter().map(|b| Fx { re: b.re.mid_raw().clone(), im: b.im.mid_raw().clone() }).collect();
    let du = u_balls.iter().map(PrecComplex::err).fold(0.0, f64::max);
    let ctx = StepCtx { u: &u, big_u: r, du, order, tail, cap, bits, real };

    let mut root = vec![Fx::default(); order + 1];
    root[0].re = BigInt::one() << bits;
    let entries: Vec<(Vec<u8>, PrecComplex)> = (0..alphabet)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut acc = Vec::new();
            let mut word = Vec::with_capacity(cap);
            descend(&ctx, a, &mut word, &root, 0.0, 1.0, &mut acc);
            acc
        })
        .collect();
    let mut out = NCSeries::one(alphabet, cap, bits);
    for (w, v) in entries {
        out.set(&w, v);
    }
    out
}

/// Appends letter `a` to `word` and integrates: with `u = h/(c − p)`,
/// `S_m = γ_m − u S_{m−1}`, `H_{m+1} = u S_m / (m+1)`; the coefficient is
/// `Σ H_m`. `e_parent` bounds the error of every parent entry and `g_parent`
/// the size of the exact parent entries.
fn descend(ctx: &StepCtx, a: usize, word: &mut Vec<u8>, parent: &[Fx], e_parent: f64, g_parent: f64, acc: &mut Vec<(Vec<u8>, PrecComplex)>) {
    let bits = ctx.bits;
    let low = word.len();
    let ulp = 2f64.powi(-(bits as i32));
    let t = 5.0 * ulp;
    let one_minus = 1.0 - ctx.big_u;
    let s_max = g_parent / one_minus;
    let e_s = (e_parent + ctx.du * s_max + t) / one_minus;
    let e_child = ctx.big_u * e_s + ctx.du * s_max + t;

    let ua = &ctx.u[a];
    let mut child = vec![Fx::default(); ctx.order + 1];
    let mut s = Fx::default();
    let mut value = Fx::default();
    let mut g_child = 0.0f64;
    for m in low..ctx.order {
        let us = fx_mul(ua, &s, bits, ctx.real);
        s = Fx { re: &parent[m].re - us.re, im: &parent[m].im - us.im };
        let prod = fx_mul(ua, &s, bits, ctx.real);
        let d = (m + 1) as u64;
        let hm = Fx { re: prod.re / d, im: prod.im / d };
        value.re += &hm.re;
        value.im += &hm.im;
        g_child = g_child.max(hm.abs_bound(bits));
        child[m + 1] = hm;
    }
    let count = (ctx.order - low) as f64;
    let err = (ctx.big_u * e_s + ctx.du * s_max) * (1.0 + (ctx.order as f64 + 1.0).ln()) + t * count + ctx.tail;
    let err = err * (1.0 + 1e-12);
    word.push(a as u8);
    let re = PrecReal::from_parts(value.re, err, bits);
    let im = if ctx.real { PrecReal::zero(bits) } else { PrecReal::from_parts(value.im, err, bits) };
    acc.push((word.clone(), PrecComplex::new(re, im)));
    if word.len() < ctx.cap {
        for b in 0..ctx.u.len() {
            descend(ctx, b, word, &child, e_child, g_child + e_child, acc);
        }
    }
    word.pop();
}

/// Transport along the straight segment `[a, b]`.
pub fn transport_segment(a: Point, b: Point, poles: &Poles, cap: usize, bits: u32) -> NCSeries {
    let mut f = NCSeries::one(poles.len(), cap, bits);
    let mut c = a;
    while c != b {
        let dist = poles.min_distance(c);
        assert!(dist > 0.0, "segment reaches a pole");
        let reach = STEP_FRACTION * dist;
        let remaining = (b - c).norm();
        let next = if remaining <= reach { b } else { c + (b - c) * (reach / remaining) };
        let step = step_series(c, next, poles, cap, bits);
        f = f.compose(&step).expect("matching caps");
        c = next;
    }
    f
}

/// Transport along a polygon.
pub fn transport_polyline(vertices: &[Point], poles: &Poles, cap: usize, bits: u32) -> NCSeries {
    let mut f = NCSeries::one(poles.len(), cap, bits);
    for w in vertices.windows(2) {
        if w[0] != w[1] {
            f = f.compose(&transport_segment(w[0], w[1], poles, cap, bits)).expect("matching caps");
        }
    }
    f
}

/// Transport along `path` for arbitrary poles at `bits` working precision.
/// Endpoints must avoid the poles.
pub fn transport_with(path: &Path, poles: &Poles, cap: usize, bits: u32) -> Result<NCSeries> {
    path.check_avoids(poles.points(), false)?;
    Ok(transport_polyline(&path.vertices(), poles, cap, bits))
}

pub fn working_bits(prec: u32) -> u32 {
    bits_for_digits(prec) + GUARD_BITS
}

/// Chen series of `path` for the forms `dx/x`, `dx/(x − 1)` up to word
/// length `cap`, every coefficient accurate to `10^-prec`.
pub fn transport(path: &Path, cap: usize, prec: u32) -> Result<NCSeries> {
    let bits = working_bits(prec);
    let f = transport_with(path, &Poles::standard(bits), cap, bits)?;
    check_precision(&f, prec)?;
    Ok(f)
}

pub(crate) fn check_precision(f: &NCSeries, prec: u32) -> Result<()> {
    let achieved = f.max_err();
    if achieved > tol(prec) {
        return Err(MzvError::PrecisionNotReached { wanted: prec, achieved });
    }
    Ok(())
}

/// `2πi` at the given precision (used by tests and verifications).
pub fn two_pi_i(bits: u32) -> PrecComplex {
    PrecComplex::new(PrecReal::zero(bits), crate::prec::pi(bits).mul_i64(2))
}

#[cfg(test)]
mod tests {
    use super::super::path::pt;
    use super::*;
    use crate::prec::{close, ln2};

    #[test]
    fn tail_bound_decreases() {
        assert!(tail_bound(0.45, 50, 4) < tail_bound(0.45, 40, 4));
        assert!(tail_bound(0.45, 10, 4) > 0.0);
        let m = choose_order(0.45, 6, 200);
        assert!(tail_bound(0.45, m, 6) <= 2f64.powi(-200));
    }

    #[test]
    fn loop_around_zero_has_residue_two_pi_i() {
        let f = transport(&Path::rho0(), 2, 30).unwrap();
        let bits = f.bits();
        let d = f.coeff(&[0]).sub(&two_pi_i(bits));
        assert!(d.abs_upper() < 1e-30);
        assert!(f.coeff(&[1]).abs_upper() < 1e-30);
        let g = transport(&Path::rho1(), 2, 30).unwrap();
        assert!(g.coeff(&[1]).sub(&two_pi_i(bits)).abs_upper() < 1e-30);
        assert!(g.coeff(&[0]).abs_upper() < 1e-30);
    }

    #[test]
    fn segment_log() {
        let f = transport(&Path::segment(pt(0.25, 0.0), pt(0.5, 0.0)), 3, 40).unwrap();
        let want = ln2(f.bits());
        assert!(close(&f.coeff(&[0]).re, &want, 1e-40));
        assert!(f.coeff(&[0]).im.abs_upper() < 1e-40);
        // ∫ dx/(x−1) over [1/4, 1/2] = log(1/2) − log(3/4) = log(2/3)
        let two_thirds = PrecReal::from_int(2, f.bits()).div_u64(3).ln().unwrap();
        assert!(close(&f.coeff(&[1]).re, &two_thirds, 1e-40));
    }

    #[test]
    fn endpoints_at_poles_rejected() {
        assert!(matches!(transport(&Path::beta(), 2, 10), Err(MzvError::PathThroughSingularity(_))));
    }
}
