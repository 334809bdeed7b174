use num_rational::BigRational;

use crate::error::{MzvError, Result};
use crate::prec::PrecComplex;
use crate::words::shuffle_counts;

/// Truncated noncommutative series over an alphabet of `alphabet` letters,
/// coefficients stored earliest-letter-first: the coefficient of `a_1⋯a_k`
/// in a transport is `∫ ω_{a_1} ⋯ ω_{a_k}` with `ω_{a_1}` integrated over
/// the earliest variable.
#[derive(Clone, Debug)]
pub struct NCSeries {
    alphabet: usize,
    cap: usize,
    bits: u32,
    coeffs: Vec<PrecComplex>,
}

fn offset(alphabet: usize, len: usize) -> usize {
    if alphabet == 1 {
        len
    } else {
        (alphabet.pow(len as u32) - 1) / (alphabet - 1)
    }
}

impl NCSeries {
    pub fn zero(alphabet: usize, cap: usize, bits: u32) -> Self {
        assert!((1..=16).contains(&alphabet), "alphabet size {alphabet} unsupported");
        let n = offset(alphabet, cap + 1);
        NCSeries { alphabet, cap, bits, coeffs: vec![PrecComplex::zero(bits); n] }
    }

    pub fn one(alphabet: usize, cap: usize, bits: u32) -> Self {
        let mut s = Self::zero(alphabet, cap, bits);
        s.coeffs[0] = PrecComplex::one(bits);
        s
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn position(&self, word: &[u8]) -> usize {
        assert!(word.len() <= self.cap, "word longer than cap");
        let mut idx = 0;
        for &a in word {
            assert!((a as usize) < self.alphabet, "letter {a} outside alphabet");
            idx = idx * self.alphabet + a as usize;
        }
        offset(self.alphabet, word.len()) + idx
    }

    pub fn word_at(&self, mut pos: usize) -> Vec<u8> {
        let mut len = 0;
        while offset(self.alphabet, len + 1) <= pos {
            len += 1;
        }
        pos -= offset(self.alphabet, len);
        let mut w = vec![0u8; len];
        for slot in w.iter_mut().rev() {
            *slot = (pos % self.alphabet) as u8;
            pos /= self.alphabet;
        }
        w
    }

    pub fn coeff(&self, word: &[u8]) -> &PrecComplex {
        &self.coeffs[self.position(word)]
    }

    /// Like [`coeff`](Self::coeff) but errors on an undefined (divergent)
    /// coefficient.
    pub fn try_coeff(&self, word: &[u8]) -> Result<&PrecComplex> {
        if word.len() > self.cap {
            return Err(MzvError::InvalidArgument(format!("word of length {} exceeds cap {}", word.len(), self.cap)));
        }
        let c = self.coeff(word);
        if !c.is_finite() {
            let s: String = word.iter().map(|a| char::from(b'0' + a)).collect();
            return Err(MzvError::NonAdmissibleCoefficient(s));
        }
        Ok(c)
    }

    pub fn set(&mut self, word: &[u8], v: PrecComplex) {
        let p = self.position(word);
        self.coeffs[p] = v;
    }

    pub fn coeffs(&self) -> &[PrecComplex] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [PrecComplex] {
        &mut self.coeffs
    }

    /// Words of length `len` in storage order.
    pub fn range_of_len(&self, len: usize) -> std::ops::Range<usize> {
        offset(self.alphabet, len)..offset(self.alphabet, len + 1)
    }

    /// Largest error radius over the finite coefficients.
    pub fn max_err(&self) -> f64 {
        self.coeffs.iter().filter(|c| c.is_finite()).map(PrecComplex::err).fold(0.0, f64::max)
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.cap != o.cap {
            return Err(MzvError::CapMismatch(self.cap, o.cap));
        }
        if self.alphabet != o.alphabet {
            return Err(MzvError::InvalidArgument(format!("alphabets differ: {} vs {}", self.alphabet, o.alphabet)));
        }
        Ok(())
    }

    /// Concatenation product: `self` is traversed first, so the coefficient
    /// of `w` is `Σ_{w = uv} self(u)·other(v)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let a = self.alphabet;
        let bits = self.bits.max(other.bits);
        let mut out = Self::zero(a, self.cap, bits);
        for len in 0..=self.cap {
            for split in 0..=len {
                let (lu, lv) = (split, len - split);
                let ru = self.range_of_len(lu);
                let rv = other.range_of_len(lv);
                let base = offset(a, len);
                let width = a.pow(lv as u32);
                for (iu, u) in self.coeffs[ru.clone()].iter().enumerate() {
                    if u.re.is_exact_zero() && u.im.is_exact_zero() {
                        continue;
                    }
                    for (iv, v) in other.coeffs[rv.clone()].iter().enumerate() {
                        if v.re.is_exact_zero() && v.im.is_exact_zero() {
                            continue;
                        }
                        out.coeffs[base + iu * width + iv].add_assign(&u.mul(v));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The series of the reversed path: `S(w) = (−1)^{|w|} F(reverse w)`.
    pub fn antipode(&self) -> Self {
        let mut out = Self::zero(self.alphabet, self.cap, self.bits);
        for pos in 0..self.coeffs.len() {
            let w = self.word_at(pos);
            let mut r = w.clone();
            r.reverse();
            let v = self.coeff(&r);
            out.coeffs[pos] = if w.len().is_multiple_of(2) { v.clone() } else { v.neg() };
        }
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(NCSeries { coeffs, bits: self.bits.max(o.bits), ..*self })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(NCSeries { coeffs, bits: self.bits.max(o.bits), ..*self })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.mul_rational(r)).collect();
        NCSeries { coeffs, ..*self }
    }

    /// `self − 1`.
    pub fn minus_one(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = s.coeffs[0].sub(&PrecComplex::one(self.bits));
        s
    }

    /// Largest violation of the shuffle identity
    /// `F(u)·F(v) = Σ_{w ∈ u ⧢ v} F(w)` over nonempty `u`, `v` with
    /// `|u| + |v| ≤ cap`, each measured in units of its own error bound
    /// (returns `(max |defect|, max ratio defect / bound)`).
    pub fn shuffle_defect(&self) -> (f64, f64) {
        let mut worst = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for lu in 1..self.cap {
            for lv in 1..=(self.cap - lu) {
                for pu in self.range_of_len(lu) {
                    for pv in self.range_of_len(lv) {
                        let u = self.word_at(pu);
                        let v = self.word_at(pv);
                        let lhs = self.coeffs[pu].mul(&self.coeffs[pv]);
                        let mut rhs = PrecComplex::zero(self.bits);
                        for (w, count) in shuffle_counts(&u, &v) {
                            rhs.add_assign(&self.coeff(&w).mul_int(&count.into()));
                        }
                        let d = lhs.sub(&rhs);
                        if !d.is_finite() {
                            continue;
                        }
                        let dist = lhs.mid_distance(&rhs);
                        worst = worst.max(dist);
                        worst_ratio = worst_ratio.max(dist / d.err().max(f64::MIN_POSITIVE));
                    }
                }
            }
        }
        (worst, worst_ratio)
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.with_bits(bits)).collect();
        NCSeries { coeffs, bits, ..*self }
    }
}
