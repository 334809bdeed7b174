//! Cross-module sweeps. `quick` keeps to weights ≤ 5, purity n ≤ 5 and
//! 30 digits; `full` goes to 7, 7 and 50.

use std::time::Instant;

use anyhow::Result;
use mzv_core::chen::{extension_class_check, run_proposition};
use mzv_core::dims::{check_counting_lemma_with, d_sequence, gf_coefficients};
use mzv_core::evaluator::{eval_chen_weight, eval_holder};
use mzv_core::intrel::{pslq, RelationStatus};
use mzv_core::prec::{bits_for_digits, pi, tol};
use mzv_core::purity::purity_report;
use mzv_core::relations::{gen_double_shuffle, generate, upper_bound_of, verify_numeric, weight_values, RelationOptions};
use mzv_core::Index;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Settings {
    pub max_weight: usize,
    pub max_purity: usize,
    pub prec: u32,
    /// Working precision of the loop transports behind the pairing checks.
    pub loop_prec: u32,
    pub duality: bool,
}

impl Settings {
    pub fn for_profile(p: Profile) -> Self {
        match p {
            Profile::Quick => Settings { max_weight: 5, max_purity: 5, prec: 30, loop_prec: 12, duality: true },
            Profile::Full => Settings { max_weight: 7, max_purity: 7, prec: 50, loop_prec: 12, duality: true },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub profile: Profile,
    pub settings: Settings,
    pub criteria: Vec<Criterion>,
    pub all_pass: bool,
    pub failures: Vec<String>,
}

fn timed(id: u8, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e:#}")),
    };
    Criterion { id, name, pass, detail, seconds: start.elapsed().as_secs_f64() }
}

fn zeta(s: &str, prec: u32) -> Result<mzv_core::PrecReal> {
    Ok(eval_holder(&s.parse::<Index>()?, prec)?.value)
}

pub fn run(profile: Profile, settings: Settings) -> SweepReport {
    let s = settings;
    let mut criteria = Vec::new();

    criteria.push(timed(1, "dimension sequence", || {
        let rec = d_sequence(30);
        let gf = gf_coefficients(30);
        let ok = rec.values().iter().zip(&gf).all(|(a, b)| BigInt::from(a.clone()) == *b) && gf.len() == 31;
        Ok((ok, format!("d_30 = {}", rec.values()[30])))
    }));

    criteria.push(timed(2, "counting lemma", || {
        let rep = check_counting_lemma_with(30, 14);
        Ok((rep.all_ok(), format!("{} rows, gap sets through n = 14", rep.rows.len())))
    }));

    criteria.push(timed(3, "purity", || {
        let mut bad = Vec::new();
        for n in 2..=s.max_purity {
            let r = purity_report(n)?;
            if !r.all_pass || r.total_dim != 1 << (n - 1) {
                bad.push(n);
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { format!("n ≤ {}", s.max_purity) } else { format!("failed at {bad:?}") }))
    }));

    criteria.push(timed(4, "evaluation", || {
        let bits = bits_for_digits(s.prec + 10);
        let z2 = zeta("2", s.prec)?;
        let exact = pi(bits).square().div_u64(6);
        let e2 = z2.sub(&exact).mid_abs();
        let e12 = zeta("1,2", s.prec)?.sub(&zeta("3", s.prec)?).mid_abs();
        let mut worst = 0.0f64;
        let mut agree = true;
        for n in 2..=s.max_weight {
            for a in eval_chen_weight(n, 10)? {
                let b = eval_holder(&a.index, 10)?;
                let d = a.value.sub(&b.value).mid_abs();
                worst = worst.max(d);
                agree &= d <= a.error_bound + b.error_bound;
            }
        }
        let ok = e2 < tol(s.prec - 2) && e12 < tol(s.prec - 10) && agree;
        Ok((ok, format!("|ζ(2) − π²/6| = {e2:.2e}, |ζ(1,2) − ζ(3)| = {e12:.2e}, backends differ by ≤ {worst:.2e}")))
    }));

    criteria.push(timed(5, "relations", || {
        let opts = RelationOptions { duality: s.duality, ..RelationOptions::default() };
        let vprec = s.prec.max(40);
        let tolerance = tol(35);
        let mut notes = Vec::new();
        let w = |s: &str| s.parse::<mzv_core::Word>();
        let expected = [(w("1100")?, BigInt::from(4)), (w("1000")?, BigInt::from(-1))].into_iter().collect();
        let mut ok = gen_double_shuffle(4).iter().any(|r| r.coeffs == expected);
        for n in 2..=s.max_weight.max(4) {
            let rels = generate(n, opts);
            let ub = upper_bound_of(n, &rels);
            let values = weight_values(n, vprec, None)?;
            let verified = verify_numeric(&rels, &values, tolerance)?.iter().all(|c| c.pass);
            let bounded = if n <= 4 { ub.upper_bound as u64 == ub.d_n } else { ub.d_n as usize <= ub.upper_bound };
            ok &= verified && bounded && ub.upper_bound <= ub.num_words;
            notes.push(format!("U_{n} = {} (d = {})", ub.upper_bound, ub.d_n));
        }
        Ok((ok, notes.join(", ")))
    }));

    criteria.push(timed(6, "pslq", || {
        let z2 = zeta("2", 60)?;
        let found = pslq(&[zeta("4", 60)?, z2.mul(&z2)], &BigInt::from(1000), 60)?;
        let res = found.residual.mid_abs() + found.residual.rad();
        let five_two = found.coefficients == [BigInt::from(5), BigInt::from(-2)] && res < tol(45);
        let none = pslq(&[zeta("5", 80)?, zeta("2,3", 80)?], &BigInt::from(1_000_000), 80)?;
        let ok = five_two && none.status == RelationStatus::NoneBelowBound;
        Ok((ok, format!("(5, −2) residual {res:.2e}; ζ(5), ζ(2,3): {} beyond {}", none.status, none.certified_norm)))
    }));

    criteria.push(timed(7, "loop pairings", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for n in [2usize, 3] {
            for item in 1u8..=3 {
                let vs = run_proposition(item, n, s.loop_prec)?;
                let limit = if item == 3 { 1e-4 } else { 1e-6 };
                let worst = vs.iter().map(|v| v.residual).fold(0.0, f64::max);
                let samples = vs.iter().map(|v| v.element.as_str()).collect::<std::collections::BTreeSet<_>>().len();
                let pass = vs.iter().all(|v| v.pass) && worst < limit && (item != 1 || samples >= 5);
                ok &= pass;
                notes.push(format!("item {item} n={n}: {} checks, worst {worst:.1e}", vs.len()));
            }
        }
        Ok((ok, notes.join("; ")))
    }));

    criteria.push(timed(8, "extension class", || {
        let mut worst = 0.0f64;
        for (p, q) in [(2, 1), (3, 1), (-1, 1), (5, 2)] {
            let z = BigRational::new(BigInt::from(p), BigInt::from(q));
            let c = extension_class_check(&z, 40)?;
            worst = worst.max(c.residual);
        }
        Ok((worst < 1e-30, format!("worst residual {worst:.2e}")))
    }));

    let failures = criteria.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.id, c.name)).collect::<Vec<_>>();
    SweepReport { profile, settings, all_pass: failures.is_empty(), failures, criteria }
}
