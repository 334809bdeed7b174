//! The group ring of the fundamental group of the twice-punctured plane
//! based at 1/2, generated by the loops `ρ_0`, `ρ_1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{MzvError, Result};

/// `(generator, inverse?)`; generator 0 is `ρ_0`, 1 is `ρ_1`.
pub type Letter = (u8, bool);

/// Reduced word in `ρ_0^{±1}`, `ρ_1^{±1}`, read left to right in
/// traversal order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(g: u8) -> Self {
        assert!(g < 2, "generator {g} out of range");
        GroupWord(vec![(g, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = GroupWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&(l.0, !l.1)) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    /// `self` followed by `other`.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|&(g, inv)| (g, !inv)).collect())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|&(g, inv)| if inv { format!("r{g}^-1") } else { format!("r{g}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Finite `Q`-linear combination of group words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupWord, BigRational>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement::default()
    }

    pub fn one() -> Self {
        Self::from_word(GroupWord::identity())
    }

    pub fn from_word(w: GroupWord) -> Self {
        let mut e = Self::zero();
        e.add_term(w, BigRational::one());
        e
    }

    /// `ρ_g`.
    pub fn rho(g: u8) -> Self {
        Self::from_word(GroupWord::generator(g))
    }

    /// `h_g = ρ_g − 1`.
    pub fn h(g: u8) -> Self {
        Self::rho(g).sub(&Self::one())
    }

    pub fn add_term(&mut self, w: GroupWord, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> &BTreeMap<GroupWord, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The augmentation: sum of coefficients.
    pub fn augmentation(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.clone();
        for (w, c) in &o.terms {
            e.add_term(w.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut e = Self::zero();
        for (w, c) in &self.terms {
            e.add_term(w.clone(), c * s);
        }
        e
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut e = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                e.add_term(a.mul(b), ca * cb);
            }
        }
        e
    }

    pub fn product(factors: &[GroupRingElement]) -> Self {
        factors.iter().fold(Self::one(), |acc, f| acc.mul(f))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})*{w}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses a product of factors such as `(r0-1)^3`, `(r0-1)(r1-1)`,
/// `r0*r1^-1`, `h0*h1`. Each factor is `r0`, `r1`, `r0^-1`, `r1^-1`,
/// `h0`, `h1`, `1`, or a parenthesised sum/difference of those, optionally
/// raised to a nonnegative power.
impl FromStr for GroupRingElement {
    type Err = MzvError;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let e = p.product()?;
        if p.i != p.s.len() {
            return Err(MzvError::Parse(format!("unexpected input at position {} in {s:?}", p.i)));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> MzvError {
        MzvError::Parse(format!("{what} at position {}", self.i))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<GroupRingElement> {
        let mut neg = self.eat(b'-');
        let mut acc = GroupRingElement::zero();
        loop {
            let t = self.product()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<GroupRingElement> {
        let mut acc = self.power()?;
        loop {
            self.eat(b'*');
            match self.peek() {
                Some(b'(' | b'r' | b'h' | b'1'..=b'9') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<GroupRingElement> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.number()?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| self.err("expected a number"))
    }

    fn atom(&mut self) -> Result<GroupRingElement> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c @ (b'r' | b'h')) => {
                self.i += 1;
                let g = match self.peek() {
                    Some(b'0') => 0,
                    Some(b'1') => 1,
                    _ => return Err(self.err("expected generator index 0 or 1")),
                };
                self.i += 1;
                if c == b'h' {
                    return Ok(GroupRingElement::h(g));
                }
                if self.s[self.i..].starts_with(b"^-1") {
                    self.i += 3;
                    return Ok(GroupRingElement::from_word(GroupWord::from_letters([(g, true)])));
                }
                Ok(GroupRingElement::rho(g))
            }
            Some(b'1'..=b'9') => {
                let k = self.number()?;
                Ok(GroupRingElement::one().scale(&BigRational::from(BigInt::from(k))))
            }
            _ => Err(self.err("expected a factor")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        let w = GroupWord::from_letters([(0, false), (1, false), (1, true), (0, true)]);
        assert_eq!(w, GroupWord::identity());
        let a = GroupWord::from_letters([(0, false), (1, true)]);
        assert_eq!(a.mul(&a.inverse()), GroupWord::identity());
    }

    #[test]
    fn augmentation_ideal_powers() {
        let h0 = GroupRingElement::h(0);
        assert!(h0.augmentation().is_zero());
        let cube = h0.pow(3);
        // (ρ−1)³ = ρ³ − 3ρ² + 3ρ − 1
        assert_eq!(cube.terms().len(), 4);
        assert!(cube.augmentation().is_zero());
    }

    #[test]
    fn parse_products() {
        let a: GroupRingElement = "(r0-1)^3".parse().unwrap();
        assert_eq!(a, GroupRingElement::h(0).pow(3));
        let b: GroupRingElement = "(r0-1)(r1-1)(r0-1)".parse().unwrap();
        assert_eq!(b, GroupRingElement::product(&[GroupRingElement::h(0), GroupRingElement::h(1), GroupRingElement::h(0)]));
        let c: GroupRingElement = "h0*h1".parse().unwrap();
        assert_eq!(c, GroupRingElement::h(0).mul(&GroupRingElement::h(1)));
        let d: GroupRingElement = "(r0^-1 - 1)".parse().unwrap();
        assert!(d.augmentation().is_zero());
        assert!("(r2-1)".parse::<GroupRingElement>().is_err());
        assert!("(r0-1".parse::<GroupRingElement>().is_err());
    }
}
