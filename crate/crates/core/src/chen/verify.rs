//! Pairings of group-ring elements with iterated integrals, and numerical
//! checks of their structure: vanishing on `I^{n+1}`, the leading-term
//! product formula on `I^n`, half-integrality, and the extension class of a
//! single pole.
//!
//! Loop lists are in traversal order and words earliest-letter-first, so
//! the sandwich `β · g · α` runs `0 → 1/2`, around the loops, `1/2 → 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MzvError, Result};
use crate::prec::{tol, PrecComplex, PrecReal};
use crate::words::Word;

use super::group::{GroupRingElement, GroupWord};
use super::path::{pt, Path};
use super::regularize::transport_regularized_with;
use super::series::NCSeries;
use super::transport::{transport_with, working_bits, Poles};

/// Transports of `ρ_0`, `ρ_1` and their inverses.
#[derive(Clone, Debug)]
pub struct Loops {
    rho: [NCSeries; 2],
    rho_inv: [NCSeries; 2],
}

impl Loops {
    pub fn new(cap: usize, bits: u32) -> Result<Self> {
        let poles = Poles::standard(bits);
        let r0 = transport_with(&Path::rho0(), &poles, cap, bits)?;
        let r1 = transport_with(&Path::rho1(), &poles, cap, bits)?;
        let rho_inv = [r0.antipode(), r1.antipode()];
        Ok(Loops { rho: [r0, r1], rho_inv })
    }

    pub fn cap(&self) -> usize {
        self.rho[0].cap()
    }

    pub fn bits(&self) -> u32 {
        self.rho[0].bits()
    }

    pub fn word_series(&self, w: &GroupWord) -> NCSeries {
        let mut s = NCSeries::one(2, self.cap(), self.bits());
        for &(g, inv) in w.letters() {
            let l = if inv { &self.rho_inv[g as usize] } else { &self.rho[g as usize] };
            s = s.compose(l).expect("matching caps");
        }
        s
    }

    /// `Σ c_w T(w)` over the terms of `g`.
    pub fn series(&self, g: &GroupRingElement) -> NCSeries {
        let terms: Vec<_> = g.terms().iter().collect();
        let parts: Vec<NCSeries> = terms.par_iter().map(|(w, c)| self.word_series(w).scale(c)).collect();
        parts.into_iter().fold(NCSeries::zero(2, self.cap(), self.bits()), |acc, p| acc.add(&p).expect("matching caps"))
    }
}

/// `⟨g, w⟩` for loops based at 1/2 (no endpoint tails).
pub fn pair(g: &GroupRingElement, w: &[u8], prec: u32) -> Result<PrecComplex> {
    let loops = Loops::new(w.len(), working_bits(prec))?;
    Ok(loops.series(g).coeff(w).clone())
}

/// Everything needed for `∫_{β·g·α}` at one cap and precision. Divergent
/// words of `β` and `α` take their tangentially regularized values
/// (tangent `+1` at 0, `−1` at 1); admissible words do not depend on this.
#[derive(Clone, Debug)]
pub struct Sandwich {
    beta: NCSeries,
    alpha: NCSeries,
    loops: Loops,
    prec: u32,
}

impl Sandwich {
    pub fn new(cap: usize, prec: u32) -> Result<Self> {
        let bits = working_bits(prec);
        let poles = Poles::standard(bits);
        let beta = transport_regularized_with(&Path::beta(), &poles, cap, bits, false)?.series;
        let alpha = transport_regularized_with(&Path::alpha(), &poles, cap, bits, false)?.series;
        Ok(Sandwich { beta, alpha, loops: Loops::new(cap, bits)?, prec })
    }

    pub fn cap(&self) -> usize {
        self.loops.cap()
    }

    pub fn series(&self, g: &GroupRingElement) -> NCSeries {
        let mid = self.loops.series(g);
        self.beta.compose(&mid).and_then(|s| s.compose(&self.alpha)).expect("matching caps")
    }

    pub fn value(&self, g: &GroupRingElement, w: &[u8]) -> PrecComplex {
        self.series(g).coeff(w).clone()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }
}

/// `∫_{β·g·α}` of the word `w`.
pub fn pair_sandwich(g: &GroupRingElement, w: &[u8], prec: u32) -> Result<PrecComplex> {
    Ok(Sandwich::new(w.len(), prec)?.value(g, w))
}

fn loop_element(g: u8) -> Result<GroupRingElement> {
    if g > 1 {
        return Err(MzvError::InvalidArgument(format!("loop label {g} is not 0 or 1")));
    }
    Ok(GroupRingElement::h(g))
}

fn check_word(w: &[u8]) -> Result<Word> {
    Word::new(w.to_vec())
}

fn word_str(w: &[u8]) -> String {
    w.iter().map(|a| char::from(b'0' + a)).collect()
}

/// `∫_{β·f_1⋯f_{n+1}·α}` of `w` for augmentation-zero factors `f_i`;
/// vanishes in theory.
pub fn verify_vanishing_on_i(n: usize, factors: &[GroupRingElement], w: &[u8], prec: u32) -> Result<PrecComplex> {
    if factors.len() != n + 1 {
        return Err(MzvError::InvalidArgument(format!("need {} factors, got {}", n + 1, factors.len())));
    }
    if let Some(f) = factors.iter().find(|f| !f.augmentation().is_zero()) {
        return Err(MzvError::InvalidArgument(format!("factor {f} is not in the augmentation ideal")));
    }
    if w.len() != n {
        return Err(MzvError::InvalidArgument(format!("word length {} differs from n = {n}", w.len())));
    }
    check_word(w)?;
    pair_sandwich(&GroupRingElement::product(factors), w, prec)
}

/// `(value, expected)` for `∫_{β·(g_1−1)⋯(g_n−1)·α}` of `eps`, where the
/// expected value is `(2πi)^n` if every `g_i = ρ_{eps_i}` and 0 otherwise.
pub fn verify_product_formula(gs: &[u8], eps: &[u8], prec: u32) -> Result<(PrecComplex, PrecComplex)> {
    if gs.len() != eps.len() || gs.is_empty() {
        return Err(MzvError::InvalidArgument("loop list and word must have the same positive length".into()));
    }
    check_word(eps)?;
    let factors = gs.iter().map(|&g| loop_element(g)).collect::<Result<Vec<_>>>()?;
    let value = pair_sandwich(&GroupRingElement::product(&factors), eps, prec)?;
    Ok((value, product_expected(gs, eps, working_bits(prec))))
}

fn product_expected(gs: &[u8], eps: &[u8], bits: u32) -> PrecComplex {
    if gs == eps {
        PrecComplex::two_pi_i_pow(gs.len() as u32, bits)
    } else {
        PrecComplex::zero(bits)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfIntegrality {
    pub value_re: f64,
    pub value_im: f64,
    /// Nearest integer to `value / ((2πi)^n / 2)`.
    pub multiple: i64,
    /// `|value − multiple·(2πi)^n/2|`.
    pub residual: f64,
    pub error_bound: f64,
}

/// `∫_{β·(g_1−1)⋯(g_{n−1}−1)·α}` of the admissible word `eps` of length
/// `n`, expressed in units of `(2πi)^n / 2`.
pub fn verify_half_integrality(gs: &[u8], eps: &[u8], prec: u32) -> Result<HalfIntegrality> {
    let sandwich = Sandwich::new(eps.len(), prec)?;
    half_integrality_with(&sandwich, gs, eps)
}

fn half_integrality_with(sandwich: &Sandwich, gs: &[u8], eps: &[u8]) -> Result<HalfIntegrality> {
    let n = eps.len();
    if n < 2 || gs.len() + 1 != n {
        return Err(MzvError::InvalidArgument(format!("need a word of length ≥ 2 and {} loops", n.saturating_sub(1))));
    }
    if !check_word(eps)?.is_admissible() {
        return Err(MzvError::InvalidWord(format!("{} is not admissible", word_str(eps))));
    }
    let factors = gs.iter().map(|&g| loop_element(g)).collect::<Result<Vec<_>>>()?;
    let value = sandwich.value(&GroupRingElement::product(&factors), eps);
    Ok(in_half_units(&value, n as u32))
}

fn in_half_units(value: &PrecComplex, n: u32) -> HalfIntegrality {
    let bits = value.bits();
    let unit = PrecComplex::two_pi_i_pow(n, bits).div_u64(2);
    let ratio = value.div(&unit).expect("nonzero unit");
    let multiple = ratio.re.round_mid();
    let nearest = unit.mul_int(&multiple);
    let (re, im) = value.to_f64();
    HalfIntegrality {
        value_re: re,
        value_im: im,
        multiple: multiple.to_i64().unwrap_or(i64::MAX),
        residual: value.mid_distance(&nearest),
        error_bound: value.err(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCheck {
    pub z: String,
    pub lhs_re: f64,
    pub lhs_im: f64,
    /// `(z − 1)/z`.
    pub rhs: String,
    pub residual: f64,
    pub error_bound: f64,
    /// `Im ∫ dx/(x − z) / π` rounded: 0 for `z ∉ [0,1]`, 1 for the lower
    /// semicircle used when `0 < z < 1`.
    pub branch: i64,
}

/// `exp(∫_{[0,1]} dx/(x − z))` against `(z − 1)/z`. For `0 < z < 1` the
/// path detours below the pole on a semicircle of radius `min(z, 1−z)/2`.
pub fn extension_class_check(z: &BigRational, prec: u32) -> Result<ExtensionCheck> {
    if z.is_zero() || *z == BigRational::from(BigInt::from(1)) {
        return Err(MzvError::InvalidArgument(format!("z = {z} is a puncture")));
    }
    let bits = working_bits(prec);
    let pole = PrecComplex::from_real(PrecReal::from_ratio(z, bits));
    let zf = z.to_f64().ok_or_else(|| MzvError::InvalidArgument(format!("z = {z} out of range")))?;
    let inside = z.is_positive() && *z < BigRational::from(BigInt::from(1));
    let path = if inside {
        let r = zf.min(1.0 - zf) / 2.0;
        let lower = Path::arc(pt(zf, 0.0), pt(zf - r, 0.0), std::f64::consts::PI)?;
        let end = lower.end();
        Path::segment(pt(0.0, 0.0), pt(zf - r, 0.0)).then(&lower)?.then(&Path::segment(end, pt(1.0, 0.0)))?
    } else {
        Path::unit_interval()
    };
    let f = transport_with(&path, &Poles::new(vec![pole]), 1, bits)?;
    let integral = f.coeff(&[0]).clone();
    let lhs = integral.exp();
    let one = BigRational::from(BigInt::from(1));
    let rhs = (z - &one) / z;
    let rhs_ball = PrecComplex::from_real(PrecReal::from_ratio(&rhs, bits));
    let branch = integral.im.div(&crate::prec::pi(bits))?.round_mid().to_i64().unwrap_or(i64::MAX);
    let (re, im) = lhs.to_f64();
    Ok(ExtensionCheck {
        z: z.to_string(),
        lhs_re: re,
        lhs_im: im,
        rhs: rhs.to_string(),
        residual: lhs.mid_distance(&rhs_ball),
        error_bound: lhs.err(),
        branch,
    })
}

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub element: String,
    pub word: String,
    pub value_re: f64,
    pub value_im: f64,
    pub expected_re: f64,
    pub expected_im: f64,
    pub residual: f64,
    pub tolerance: f64,
    /// Set for half-integrality checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiple: Option<i64>,
    pub pass: bool,
}

/// Residual tolerance used by [`run_proposition`] verdicts.
pub fn verdict_tolerance(prec: u32) -> f64 {
    tol(prec.div_ceil(2))
}

fn loops_label(gs: &[u8]) -> String {
    let parts: Vec<String> = gs.iter().map(|g| format!("(r{g}-1)")).collect();
    parts.join("")
}

fn all_words(n: usize) -> Vec<Vec<u8>> {
    (0..1u32 << n).map(|m| (0..n).map(|i| ((m >> (n - 1 - i)) & 1) as u8).collect()).collect()
}

/// The sample of `I^{n+1}` used by item 1: all products of `h_0`, `h_1`,
/// plus products involving inverse loops and a commutator-like factor.
pub fn vanishing_samples(n: usize) -> Vec<(String, GroupRingElement)> {
    let mut out: Vec<(String, GroupRingElement)> = all_words(n + 1)
        .into_iter()
        .map(|gs| {
            let f: Vec<_> = gs.iter().map(|&g| GroupRingElement::h(g)).collect();
            (loops_label(&gs), GroupRingElement::product(&f))
        })
        .collect();
    let extra = [format!("(r0^-1-1)(r1-1)^{n}"), format!("(r0*r1-1)^{}", n + 1), format!("(r1^-1-1)^{n}(r0-r1)")];
    for s in extra {
        let g: GroupRingElement = s.parse().expect("well-formed sample");
        out.push((s, g));
    }
    out
}

/// Runs one of the three loop pairing checks at word length `n`:
/// 1 — every sample of `I^{n+1}` pairs to 0 with every word of length `≤ n`;
/// 2 — `(g_1−1)⋯(g_n−1)` against every word of length `n`;
/// 3 — `(g_1−1)⋯(g_{n−1}−1)` against every admissible word of length `n`,
/// in units of `(2πi)^n/2`.
pub fn run_proposition(item: u8, n: usize, prec: u32) -> Result<Vec<Verdict>> {
    if n == 0 || n > 8 {
        return Err(MzvError::InvalidArgument(format!("n = {n} out of range 1..=8")));
    }
    let sandwich = Sandwich::new(n, prec)?;
    let bits = working_bits(prec);
    let tolerance = verdict_tolerance(prec);
    let zero = PrecComplex::zero(bits);
    let verdict = |element: String, w: &[u8], value: &PrecComplex, expected: &PrecComplex, multiple: Option<i64>| {
        let residual = value.mid_distance(expected);
        let (vr, vi) = value.to_f64();
        let (er, ei) = expected.to_f64();
        Verdict {
            element,
            word: word_str(w),
            value_re: vr,
            value_im: vi,
            expected_re: er,
            expected_im: ei,
            residual,
            tolerance,
            multiple,
            pass: residual <= tolerance,
        }
    };
    let mut out = Vec::new();
    match item {
        1 => {
            for (label, g) in vanishing_samples(n) {
                let s = sandwich.series(&g);
                for len in 1..=n {
                    for w in all_words(len) {
                        out.push(verdict(label.clone(), &w, s.coeff(&w), &zero, None));
                    }
                }
            }
        }
        2 => {
            for gs in all_words(n) {
                let f: Vec<_> = gs.iter().map(|&g| GroupRingElement::h(g)).collect();
                let s = sandwich.series(&GroupRingElement::product(&f));
                for w in all_words(n) {
                    out.push(verdict(loops_label(&gs), &w, s.coeff(&w), &product_expected(&gs, &w, bits), None));
                }
            }
        }
        3 => {
            if n < 2 {
                return Err(MzvError::InvalidArgument("item 3 needs n ≥ 2".into()));
            }
            let unit = PrecComplex::two_pi_i_pow(n as u32, bits).div_u64(2);
            for gs in all_words(n - 1) {
                for w in all_words(n).into_iter().filter(|w| w[0] == 1 && w[n - 1] == 0) {
                    let value = sandwich.value(
                        &GroupRingElement::product(&gs.iter().map(|&g| GroupRingElement::h(g)).collect::<Vec<_>>()),
                        &w,
                    );
                    let h = in_half_units(&value, n as u32);
                    let nearest = unit.mul_int(&BigInt::from(h.multiple));
                    out.push(verdict(loops_label(&gs), &w, &value, &nearest, Some(h.multiple)));
                }
            }
        }
        _ => return Err(MzvError::InvalidArgument(format!("unknown item {item}; expected 1, 2 or 3"))),
    }
    Ok(out)
}
