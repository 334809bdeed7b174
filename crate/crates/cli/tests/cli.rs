use std::fs;
use std::io::Write;
use std::time::Instant;

use mzv_cli::cache::{Cache, CacheRecord, FILE_NAME, SCHEMA_VERSION};
use mzv_cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mzv(dir: &TempDir, args: &[&str]) -> Run {
    let mut argv = vec!["mzv", "--cache-dir", dir.path().to_str().unwrap()];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, EXIT_OK, "stderr: {}", r.err);
    serde_json::from_str(&r.out).unwrap()
}

#[test]
fn dims_rows_end_at_ten() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["dims", "--max", "10"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows.last().unwrap(), &serde_json::json!({"n": 10, "d": 7}));
}

#[test]
fn eval_zeta_two() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["eval", "--index", "2", "--prec", "30"]));
    assert!(v["value"].as_str().unwrap().starts_with("1.6449340668"));
    assert_eq!(v["backend"], "holder");
    assert!(v["error_bound"].as_f64().unwrap() < 1e-30);
}

#[test]
fn eval_reports_all_fields_for_each_backend() {
    let dir = TempDir::new().unwrap();
    let a = json(&mzv(&dir, &["eval", "--index", "1,3", "--prec", "20"]));
    let b = json(&mzv(&dir, &["eval", "--index", "1,3", "--prec", "20", "--backend", "chen"]));
    for v in [&a, &b] {
        for key in ["index", "value", "error_bound", "backend"] {
            assert!(v.get(key).is_some(), "{key} missing in {v}");
        }
    }
    assert_eq!(b["backend"], "chen");
    // Both are ζ(1,3) = π⁴/360 to 20 digits.
    let pa: f64 = a["value"].as_str().unwrap().parse().unwrap();
    let pb: f64 = b["value"].as_str().unwrap().parse().unwrap();
    assert!((pa - std::f64::consts::PI.powi(4) / 360.0).abs() < 1e-15);
    assert!((pa - pb).abs() < 1e-15);
}

#[test]
fn purity_at_four() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["purity", "--n", "4"]));
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["total_dim"], 8);
}

#[test]
fn relations_at_weight_four() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["relations", "--weight", "4", "--verify-numeric", "40", "--list"]));
    assert_eq!(v["upper_bound"], 1);
    assert_eq!(v["d_n"], 1);
    assert_eq!(v["all_verified"], true);
    let rels = v["relations"].as_array().unwrap();
    assert!(rels.iter().any(|r| r["relation"] == "4ζ(1,3) - ζ(4)"));
    let strict = json(&mzv(&dir, &["relations", "--weight", "4", "--no-hoffman", "--no-duality"]));
    assert_eq!(strict["rank"], 1);
    assert_eq!(strict["all_verified"], Value::Null);
}

#[test]
fn pslq_with_index_specs() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["pslq", "--values", "zeta:4,zeta:2*zeta:2", "--max-norm", "1000", "--prec", "60"]));
    assert_eq!(v["status"], "found");
    assert_eq!(v["coefficients"], serde_json::json!([5, -2]));
    assert!(v["residual"].as_f64().unwrap() < 1e-45);
    let v = json(&mzv(&dir, &["pslq", "--values", "zeta:5;zeta:2,3", "--max-norm", "1000000", "--prec", "80"]));
    assert_eq!(v["status"], "none_below_bound");
    assert_eq!(v["norm_bound"], 1_000_000);
}

#[test]
fn paths_checks() {
    let dir = TempDir::new().unwrap();
    let v = json(&mzv(&dir, &["paths", "ch", "--z", "2,3,-1,5/2"]));
    assert_eq!(v["all_pass"], true);
    let v = json(&mzv(&dir, &["paths", "verify", "--prop", "2", "--n", "2"]));
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["checks"], 16);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let r = mzv(&dir, &["eval", "--index", "1"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("not admissible"));
    let r = mzv(&dir, &["dims", "--max", "ten"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("--max"), "{}", r.err);
    assert_eq!(mzv(&dir, &["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(mzv(&dir, &["paths", "verify", "--prop", "7"]).code, EXIT_USAGE);
    assert_eq!(mzv(&dir, &["eval", "--index", "2", "--csv", "--json"]).code, EXIT_USAGE);
    // Two values need at least 40 digits: the search cannot be certified.
    let r = mzv(&dir, &["pslq", "--values", "1.5,2.5", "--prec", "30"]);
    assert_eq!(r.code, EXIT_VERIFICATION, "{}", r.err);
    assert_eq!(mzv(&dir, &["--help"]).code, EXIT_OK);
}

#[test]
fn csv_tables() {
    let dir = TempDir::new().unwrap();
    let r = mzv(&dir, &["dims", "--max", "4", "--csv"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "n,d\n0,1\n1,0\n2,1\n3,1\n4,1\n");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["eval", "--index", "2,3", "--prec", "40"][..],
        &["relations", "--weight", "5", "--verify-numeric", "40", "--list"][..],
        &["pslq", "--values", "zeta:4,zeta:2*zeta:2", "--max-norm", "1000"][..],
    ] {
        let a = mzv(&dir, args);
        let b = mzv(&dir, args);
        assert_eq!(a.code, EXIT_OK, "{}", a.err);
        assert_eq!(a.out, b.out, "{args:?}");
    }
}

#[test]
fn repeated_eval_hits_the_cache() {
    let dir = TempDir::new().unwrap();
    let args = ["eval", "--index", "1,1,3", "--prec", "30", "--backend", "chen"];
    let t0 = Instant::now();
    let first = mzv(&dir, &args);
    let cold = t0.elapsed();
    let t1 = Instant::now();
    let second = mzv(&dir, &args);
    let warm = t1.elapsed();
    assert_eq!(first.out, second.out);
    assert!(warm * 10 <= cold, "cold {cold:?}, warm {warm:?}");
    let cache = Cache::open(dir.path()).unwrap();
    assert_eq!(cache.load().unwrap().records.len(), 1);
}

#[test]
fn corrupt_and_unknown_lines_are_tolerated() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join(FILE_NAME);
    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "{{not json").unwrap();
    writeln!(
        f,
        r#"{{"schema_version":7,"kind":"hologram","key":"x","precision":3,"value":"1","bound":"0","created_at":"t","extra":1}}"#
    )
    .unwrap();
    drop(f);
    let r = mzv(&dir, &["eval", "--index", "3", "--prec", "25"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.err.contains("warning"), "{}", r.err);
    let stats = json(&mzv(&dir, &["cache", "stats"]));
    assert_eq!(stats["records"], 2);
    assert_eq!(stats["skipped"], 1);
    assert_eq!(stats["kinds"]["hologram"], 1);
}

#[test]
fn cache_round_trip_preserves_strings() {
    let dir = TempDir::new().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let rec = CacheRecord {
        schema_version: SCHEMA_VERSION,
        kind: "mzv".into(),
        key: "2,3".into(),
        index: Some("2,3".into()),
        weight: Some(5),
        backend: Some("holder".into()),
        precision: 40,
        value: "0.7115661975505724320969738060864026120925".into(),
        bound: "1.5e-52".into(),
        created_at: "2026-01-01T00:00:00+00:00".into(),
    };
    cache.append(&rec).unwrap();
    let back = cache.load().unwrap();
    assert_eq!(back.records, vec![rec]);
    let cleared = json(&mzv(&dir, &["cache", "clear"]));
    assert_eq!(cleared["cleared"], true);
    assert!(cache.load().unwrap().records.is_empty());
}
