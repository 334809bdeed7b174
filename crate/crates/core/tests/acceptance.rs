//! Acceptance criteria, one line per criterion. Tolerances and runtime
//! limits are pinned below; the process exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mzv_core::chen::{extension_class_check, run_proposition};
use mzv_core::dims::{check_counting_lemma_with, d_sequence, gf_coefficients};
use mzv_core::evaluator::{eval_chen_weight, eval_holder};
use mzv_core::intrel::{pslq, RelationStatus};
use mzv_core::prec::{bits_for_digits, pi};
use mzv_core::purity::purity_report;
use mzv_core::relations::{gen_double_shuffle, generate, upper_bound_of, verify_numeric, weight_values, RelationOptions};
use mzv_core::{Index, PrecReal, Word};
use num_bigint::BigInt;
use num_rational::BigRational;

const DIMS_MAX: usize = 30;
const DIMS_TIME: Duration = Duration::from_secs(1);
const LEMMA_MAX: usize = 30;
const GAPSET_MAX: usize = 14;
const LEMMA_TIME: Duration = Duration::from_secs(30);
const PURITY_MAX: usize = 7;
const PURITY_TIME: Duration = Duration::from_secs(600);
const ZETA2_PREC: u32 = 50;
const ZETA2_TOL: f64 = 1e-48;
const DUALITY_TOL: f64 = 1e-40;
const BACKEND_PREC: u32 = 10;
const BACKEND_MAX_WEIGHT: usize = 5;
const RELATION_PREC: u32 = 40;
const RELATION_TOL: f64 = 1e-35;
const PSLQ_PREC: u32 = 60;
const PSLQ_RESIDUAL: f64 = 1e-45;
const PSLQ_NONE_PREC: u32 = 80;
const PSLQ_NONE_NORM: i64 = 1_000_000;
const LOOP_PREC: u32 = 12;
const ITEM_TOL: [f64; 3] = [1e-6, 1e-6, 1e-4];
const MIN_SAMPLES: usize = 5;
const LOOP_TIME: Duration = Duration::from_secs(1200);
const EXT_PREC: u32 = 40;
const EXT_TOL: f64 = 1e-30;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad())
    }
}

fn zeta(s: &str, prec: u32) -> PrecReal {
    eval_holder(&s.parse::<Index>().unwrap(), prec).unwrap().value
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(t)
    } else {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    }
}

fn dimension_sequence() -> Outcome {
    let start = Instant::now();
    let rec = d_sequence(DIMS_MAX);
    let gf = gf_coefficients(DIMS_MAX);
    let t = within(start, DIMS_TIME)?;
    let equal = rec.len() == DIMS_MAX + 1 && rec.values().iter().zip(&gf).all(|(a, b)| BigInt::from(a.clone()) == *b);
    check(equal, format!("d_0..d_{DIMS_MAX} match, d_{DIMS_MAX} = {} ({t:.1?})", rec.values()[DIMS_MAX]), || {
        "recurrence and generating function differ".into()
    })
}

fn counting_lemma() -> Outcome {
    let start = Instant::now();
    let rep = check_counting_lemma_with(LEMMA_MAX, GAPSET_MAX);
    let t = within(start, LEMMA_TIME)?;
    let gap_rows = rep.rows.iter().filter(|r| r.gapsets_ok.is_some()).count();
    let bad: Vec<usize> = rep.rows.iter().filter(|r| !r.ok()).map(|r| r.n).collect();
    check(
        bad.is_empty() && rep.rows.len() == LEMMA_MAX + 1 && gap_rows == GAPSET_MAX + 1,
        format!("n ≤ {LEMMA_MAX}, gap sets n ≤ {GAPSET_MAX} ({t:.1?})"),
        || format!("failing n: {bad:?}, {gap_rows} gap-set rows"),
    )
}

fn purity() -> Outcome {
    let start = Instant::now();
    let mut words = 0;
    for n in 2..=PURITY_MAX {
        let rep = purity_report(n).map_err(|e| e.to_string())?;
        for w in &rep.words {
            let k = w.word.len();
            let concentrated = w.cohomology.iter().enumerate().all(|(p, &d)| d == usize::from(p == n - k));
            if !(w.d_squared_zero && concentrated) {
                return Err(format!("n = {n}, word {:?}: cohomology {:?}", w.word.to_string(), w.cohomology));
            }
        }
        if rep.total_dim != 1 << (n - 1) {
            return Err(format!("n = {n}: total dimension {}", rep.total_dim));
        }
        words += rep.words.len();
    }
    let t = within(start, PURITY_TIME)?;
    Ok(format!("n ≤ {PURITY_MAX}, {words} complexes ({t:.1?})"))
}

fn evaluation() -> Outcome {
    let bits = bits_for_digits(ZETA2_PREC + 10);
    let e2 = zeta("2", ZETA2_PREC).sub(&pi(bits).square().div_u64(6)).mid_abs();
    if e2 >= ZETA2_TOL {
        return Err(format!("|ζ(2) − π²/6| = {e2:e}"));
    }
    let e12 = zeta("1,2", ZETA2_PREC).sub(&zeta("3", ZETA2_PREC)).mid_abs();
    if e12 >= DUALITY_TOL {
        return Err(format!("|ζ(1,2) − ζ(3)| = {e12:e}"));
    }
    let mut count = 0;
    for n in 2..=BACKEND_MAX_WEIGHT {
        for a in eval_chen_weight(n, BACKEND_PREC).map_err(|e| e.to_string())? {
            let b = eval_holder(&a.index, BACKEND_PREC).map_err(|e| e.to_string())?;
            let d = a.value.sub(&b.value).mid_abs();
            if d > a.error_bound + b.error_bound {
                return Err(format!("ζ({}): backends differ by {d:e}", a.index));
            }
            count += 1;
        }
    }
    Ok(format!("ζ(2) err {e2:.1e}, ζ(1,2)−ζ(3) {e12:.1e}, {count} indices agree"))
}

fn relations() -> Outcome {
    let w = |s: &str| s.parse::<Word>().unwrap();
    let expected: BTreeMap<Word, BigInt> = [(w("1100"), BigInt::from(4)), (w("1000"), BigInt::from(-1))].into_iter().collect();
    let derived = gen_double_shuffle(4).into_iter().find(|r| r.coeffs == expected).ok_or("4ζ(1,3) − ζ(4) not derived")?;
    let mut notes = Vec::new();
    for n in 2..=7 {
        let rels = generate(n, RelationOptions::default());
        let ub = upper_bound_of(n, &rels);
        let values = weight_values(n, RELATION_PREC, None).map_err(|e| e.to_string())?;
        if n == 4 {
            let r = verify_numeric(std::slice::from_ref(&derived), &values, RELATION_TOL).map_err(|e| e.to_string())?;
            if !r[0].pass {
                return Err(format!("4ζ(1,3) − ζ(4) residual {:e}", r[0].residual));
            }
        }
        let checks = verify_numeric(&rels, &values, RELATION_TOL).map_err(|e| e.to_string())?;
        if let Some(c) = checks.iter().find(|c| !c.pass) {
            return Err(format!("weight {n}: {} residual {:e}", c.relation, c.residual));
        }
        let ok = if n <= 4 {
            ub.upper_bound == 1 && ub.d_n == 1
        } else {
            ub.d_n as usize <= ub.upper_bound && ub.upper_bound <= 1 << (n - 2)
        };
        if !ok {
            return Err(format!("weight {n}: U = {}, d = {}", ub.upper_bound, ub.d_n));
        }
        notes.push(format!("U_{n}={}", ub.upper_bound));
    }
    Ok(format!("{} (d_5..d_7 = 2, 2, 3)", notes.join(" ")))
}

fn pslq_checks() -> Outcome {
    let z2 = zeta("2", PSLQ_PREC);
    let r = pslq(&[zeta("4", PSLQ_PREC), z2.mul(&z2)], &BigInt::from(1000), PSLQ_PREC).map_err(|e| e.to_string())?;
    let res = r.residual.mid_abs() + r.residual.rad();
    if r.coefficients != [BigInt::from(5), BigInt::from(-2)] || res >= PSLQ_RESIDUAL {
        return Err(format!("got {:?} with residual {res:e}", r.coefficients));
    }
    let none = pslq(&[zeta("5", PSLQ_NONE_PREC), zeta("2,3", PSLQ_NONE_PREC)], &BigInt::from(PSLQ_NONE_NORM), PSLQ_NONE_PREC)
        .map_err(|e| e.to_string())?;
    check(
        none.status == RelationStatus::NoneBelowBound,
        format!("(5, −2) residual {res:.1e}; ζ(5), ζ(2,3): none below {PSLQ_NONE_NORM} (certified {})", none.certified_norm),
        || format!("ζ(5), ζ(2,3): {} {:?}", none.status, none.coefficients),
    )
}

fn loop_pairings() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for n in [2usize, 3] {
        for item in 1u8..=3 {
            let vs = run_proposition(item, n, LOOP_PREC).map_err(|e| e.to_string())?;
            let limit = ITEM_TOL[item as usize - 1];
            let worst = vs.iter().map(|v| v.residual).fold(0.0, f64::max);
            if worst >= limit {
                return Err(format!("item {item}, n = {n}: residual {worst:e}"));
            }
            match item {
                1 => {
                    let samples: BTreeSet<&str> = vs.iter().map(|v| v.element.as_str()).collect();
                    if samples.len() < MIN_SAMPLES {
                        return Err(format!("item 1, n = {n}: only {} samples", samples.len()));
                    }
                }
                2 => {
                    let choices: BTreeSet<&str> = vs.iter().map(|v| v.element.as_str()).collect();
                    if choices.len() != 1 << n {
                        return Err(format!("item 2, n = {n}: {} loop choices", choices.len()));
                    }
                }
                _ => {}
            }
            notes.push(format!("{item}/{n}: {:.0e}", worst));
        }
    }
    let t = within(start, LOOP_TIME)?;
    Ok(format!("worst residuals {} ({t:.1?})", notes.join(", ")))
}

fn extension_class() -> Outcome {
    let mut worst = 0.0f64;
    for (p, q) in [(2, 1), (3, 1), (-1, 1), (5, 2)] {
        let z = BigRational::new(BigInt::from(p), BigInt::from(q));
        let c = extension_class_check(&z, EXT_PREC).map_err(|e| e.to_string())?;
        if c.residual >= EXT_TOL {
            return Err(format!("z = {z}: residual {:e}", c.residual));
        }
        worst = worst.max(c.residual);
    }
    Ok(format!("z ∈ {{2, 3, −1, 5/2}}, worst residual {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("dimension sequence", dimension_sequence),
        ("counting lemma", counting_lemma),
        ("purity", purity),
        ("evaluation", evaluation),
        ("relations", relations),
        ("pslq", pslq_checks),
        ("loop pairings", loop_pairings),
        ("extension class", extension_class),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{t:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{t:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
