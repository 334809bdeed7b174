//! Parsing of `pslq --values` lists.
//!
//! A list is a comma separated sequence of terms; a term is a product of
//! factors joined by `*`; a factor is a decimal literal or `zeta:k1,k2,…`.
//! Because index parts are comma separated too, a bare integer directly
//! after a `zeta:` factor extends that index: `zeta:2,3*zeta:2,1.5` is
//! ζ(2,3)·ζ(2) followed by 1.5. Write `3.0`, or separate with `;`, to start
//! a new term with an integer.

use anyhow::{bail, Result};
use mzv_core::Index;

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Literal(String),
    Zeta(Index),
}

pub type Term = Vec<Factor>;

fn is_uint(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_factor(s: &str) -> Result<Factor> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("zeta:") {
        if rest.trim().is_empty() {
            bail!("empty index in {s:?}");
        }
        let idx: Index = rest.parse().map_err(|e| anyhow::anyhow!("bad index in {s:?}: {e}"))?;
        return Ok(Factor::Zeta(idx));
    }
    if s.is_empty() {
        bail!("empty value");
    }
    mzv_core::prec::parse_decimal_parts(s)?;
    Ok(Factor::Literal(s.to_string()))
}

/// Raw factor strings of one `;`-free group, with index absorption.
fn split_group(group: &str) -> Vec<Vec<String>> {
    let mut terms: Vec<Vec<String>> = Vec::new();
    for tok in group.split(',').map(str::trim) {
        let mut parts = tok.split('*');
        let head = parts.next().unwrap_or("");
        let extends = terms
            .last()
            .and_then(|t| t.last())
            .is_some_and(|f| f.trim_start().starts_with("zeta:"))
            && is_uint(head);
        if extends {
            let last = terms.last_mut().and_then(|t| t.last_mut()).expect("checked above");
            last.push(',');
            last.push_str(head);
            terms.last_mut().expect("checked above").extend(parts.map(str::to_string));
        } else {
            let mut t = vec![head.to_string()];
            t.extend(parts.map(str::to_string));
            terms.push(t);
        }
    }
    terms
}

pub fn parse_values(args: &[String]) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for arg in args {
        for group in arg.split(';') {
            if group.trim().is_empty() {
                continue;
            }
            for raw in split_group(group) {
                out.push(raw.iter().map(|f| parse_factor(f)).collect::<Result<Term>>()?);
            }
        }
    }
    Ok(out)
}

pub fn term_label(t: &Term) -> String {
    t.iter()
        .map(|f| match f {
            Factor::Literal(s) => s.clone(),
            Factor::Zeta(i) => format!("zeta:{i}"),
        })
        .collect::<Vec<_>>()
        .join("*")
}
