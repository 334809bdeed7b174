//! Limits of transports whose endpoints sit on poles.
//!
//! The path is cut at `p + δ·d` near each singular endpoint `p`, where `d`
//! is the first (or reversed last) segment vector. Removing the logarithmic
//! divergence exactly — multiplying by `exp(e_a log(δ|d|))` on the left at
//! a start pole with letter `a`, by `exp(−e_b log(δ|d|))` on the right at an
//! end pole with letter `b` — leaves a series of the form
//! `C + δ·P(log 1/δ) + O(δ²·polylog)` with `deg P < cap`. It is sampled at
//! `δ_k = 2^{-e-k}` and the constant `C` extrapolated. `C` is the
//! regularization with unit tangent vectors pointing into the path; for
//! words whose first letter is not the start pole's and whose last letter is
//! not the end pole's it is the plain limit, independent of any choice.
//!
//! For the basis `{1} ∪ {δ log^j(1/δ) : j < J}` and nodes in ratio 2 the
//! extrapolation weights are explicit: `λ_k = (−1)^{J+k} C(J,k) 2^k`, since
//! `δ_k log^j(1/δ_k)` spans the same space as `2^{-k} k^j`.

use num_bigint::BigInt;

use crate::error::{MzvError, Result};
use crate::prec::{ln2, tol, PrecComplex, PrecReal};

use super::path::{Path, Point};
use super::series::NCSeries;
use super::transport::{transport_polyline, working_bits, Poles};

/// Outcome of a regularized transport.
#[derive(Clone, Debug)]
pub struct Regularized {
    /// Limits. With `admissible_only`, divergent coefficients are
    /// undefined (infinite radius); otherwise they hold regularized values.
    pub series: NCSeries,
    pub start_letter: Option<usize>,
    pub end_letter: Option<usize>,
    /// `max |E_a − E_b|` over convergent words between the extrapolants
    /// from the first and last `J + 1` nodes.
    pub extrapolation_gap: f64,
    /// Largest radius of the final extrapolant before the gap was added.
    pub arithmetic_err: f64,
    /// `δ_0 = 2^-delta_exponent`.
    pub delta_exponent: u32,
}

/// `true` if the coefficient of `w` has a finite limit.
pub fn converges(w: &[u8], start_letter: Option<usize>, end_letter: Option<usize>) -> bool {
    match (w.first(), w.last()) {
        (None, _) => true,
        (Some(&f), Some(&l)) => start_letter != Some(f as usize) && end_letter != Some(l as usize),
        _ => unreachable!(),
    }
}

fn weights(j: usize) -> Vec<BigInt> {
    let mut binom = BigInt::from(1);
    (0..=j)
        .map(|k| {
            if k > 0 {
                binom = &binom * BigInt::from(j - k + 1) / BigInt::from(k);
            }
            let w = &binom << k;
            if (j + k).is_multiple_of(2) {
                w
            } else {
                -w
            }
        })
        .collect()
}

fn delta_exponent(bits: u32, cap: usize) -> u32 {
    let logs = cap as f64 * ((bits as f64).log2() + 2.0);
    (bits as f64 / 2.0 + logs).ceil() as u32 + 8
}

/// `exp(c·e_letter)`.
fn exp_letter(alphabet: usize, cap: usize, letter: usize, c: &PrecReal, bits: u32) -> NCSeries {
    let mut out = NCSeries::one(alphabet, cap, bits);
    let mut term = PrecReal::one(bits);
    let mut word = Vec::new();
    for k in 1..=cap {
        term = term.mul(c).div_u64(k as u64);
        word.push(letter as u8);
        out.set(&word, PrecComplex::from_real(term.clone()));
    }
    out
}

/// `ln(2^-e · |d|)`.
fn log_cut(e: usize, d: Point, bits: u32) -> PrecReal {
    let re = PrecReal::from_f64(d.re, bits);
    let im = PrecReal::from_f64(d.im, bits);
    let half_log_norm = re.square().add(&im.square()).ln().expect("nonzero segment").div_u64(2);
    half_log_norm.sub(&ln2(bits).mul_i64(e as i64))
}

/// Regularized transport at `bits` working precision for arbitrary poles.
pub fn transport_regularized_with(
    path: &Path,
    poles: &Poles,
    cap: usize,
    bits: u32,
    admissible_only: bool,
) -> Result<Regularized> {
    path.check_avoids(poles.points(), true)?;
    let v = path.vertices();
    let start_letter = poles.letter_at(v[0]);
    let end_letter = poles.letter_at(*v.last().unwrap());
    if start_letter.is_none() && end_letter.is_none() {
        let series = transport_polyline(&v, poles, cap, bits);
        let arithmetic_err = series.max_err();
        return Ok(Regularized { series, start_letter, end_letter, extrapolation_gap: 0.0, arithmetic_err, delta_exponent: 0 });
    }
    let alphabet = poles.len();
    let n = v.len();
    let d_start = v[1] - v[0];
    let d_end = v[n - 1] - v[n - 2];
    let q_start = if start_letter.is_some() { v[0] + d_start * 0.5 } else { v[0] };
    let q_end = if end_letter.is_some() { v[n - 1] - d_end * 0.5 } else { v[n - 1] };

    // Middle part: q_start → interior vertices → q_end.
    let mut middle_pts = vec![q_start];
    middle_pts.extend_from_slice(&v[1..n - 1]);
    middle_pts.push(q_end);
    if n == 2 {
        middle_pts = vec![q_start, q_end];
    }
    let middle = transport_polyline(&middle_pts, poles, cap, bits);

    let e0 = delta_exponent(bits, cap);
    let j = cap; // log powers 0..cap−1, plus the constant
    let nodes = j + 2;
    let delta = |k: usize| 2f64.powi(-((e0 as usize + k) as i32));
    // Near a pole the step ratios h/(c − p) are formed from quantities of
    // size δ; carry enough extra bits that they keep full relative accuracy.
    let cap_bits = bits + e0 + nodes as u32 + 8;

    // Start caps in coordinates centred at the pole: δ_k d → d/2.
    let mut starts = Vec::with_capacity(nodes);
    if let Some(a) = start_letter {
        let local = poles.shifted(v[0]);
        let mut s = transport_polyline(&[d_start * delta(0), d_start * 0.5], &local, cap, cap_bits);
        for k in 0..nodes {
            if k > 0 {
                let piece = transport_polyline(&[d_start * delta(k), d_start * delta(k - 1)], &local, cap, cap_bits);
                s = piece.compose(&s)?;
            }
            let c = log_cut(e0 as usize + k, d_start, cap_bits);
            starts.push(exp_letter(alphabet, cap, a, &c, cap_bits).compose(&s)?.with_bits(bits));
        }
    }
    let mut ends = Vec::with_capacity(nodes);
    if let Some(b) = end_letter {
        let local = poles.shifted(v[n - 1]);
        let mut e = transport_polyline(&[-d_end * 0.5, -d_end * delta(0)], &local, cap, cap_bits);
        for k in 0..nodes {
            if k > 0 {
                let piece = transport_polyline(&[-d_end * delta(k - 1), -d_end * delta(k)], &local, cap, cap_bits);
                e = e.compose(&piece)?;
            }
            let c = log_cut(e0 as usize + k, d_end, cap_bits).neg();
            ends.push(e.compose(&exp_letter(alphabet, cap, b, &c, cap_bits))?.with_bits(bits));
        }
    }
    let samples: Vec<NCSeries> = (0..nodes)
        .map(|k| {
            let mut t = middle.clone();
            if let Some(s) = starts.get(k) {
                t = s.compose(&t)?;
            }
            if let Some(e) = ends.get(k) {
                t = t.compose(e)?;
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;

    let lambda = weights(j);
    let mut series = NCSeries::zero(alphabet, cap, bits);
    let mut gap = 0.0f64;
    let mut arith = 0.0f64;
    for pos in 0..series.coeffs().len() {
        let w = series.word_at(pos);
        if admissible_only && !converges(&w, start_letter, end_letter) {
            series.coeffs_mut()[pos] = PrecComplex::undefined(bits);
            continue;
        }
        let extrapolate = |first: usize| {
            let mut acc = PrecComplex::zero(bits);
            for (k, l) in lambda.iter().enumerate() {
                acc.add_assign(&samples[first + k].coeffs()[pos].mul_int(l));
            }
            acc
        };
        let ea = extrapolate(0);
        let eb = extrapolate(1);
        let g = ea.mid_distance(&eb);
        gap = gap.max(g);
        arith = arith.max(eb.err());
        series.coeffs_mut()[pos] = eb.add_rad(g);
    }
    Ok(Regularized { series, start_letter, end_letter, extrapolation_gap: gap, arithmetic_err: arith, delta_exponent: e0 })
}

/// Regularized Chen series for the standard forms. With `admissible_only`
/// the coefficients of divergent words are undefined and
/// [`NCSeries::try_coeff`] reports them.
pub fn transport_regularized(path: &Path, cap: usize, prec: u32, admissible_only: bool) -> Result<Regularized> {
    let bits = working_bits(prec);
    let r = transport_regularized_with(path, &Poles::standard(bits), cap, bits, admissible_only)?;
    let achieved = r.series.max_err();
    if achieved > tol(prec) {
        return Err(MzvError::PrecisionNotReached { wanted: prec, achieved });
    }
    Ok(r)
}
