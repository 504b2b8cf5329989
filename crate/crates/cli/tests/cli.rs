//! End-to-end behavior of the binary: exit codes, document schema, the
//! prime cache, and table mode.

use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dilog-units"))
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let out = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap_or(-1);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: Value = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (doc, code)
}

#[test]
fn schema_fields_present() {
    let (doc, code) = run_json(&["bfq", "group", "--q", "19", "--n", "5"]);
    assert_eq!(code, 0);
    let obj = doc.as_object().unwrap();
    assert_eq!(obj["command"], "bfq group");
    assert!(obj.contains_key("inputs"));
    assert!(obj.contains_key("result"));
    assert!(obj.contains_key("timing_ms"));
    assert_eq!(doc["result"]["invariant_factors"], serde_json::json!([5]));
}

#[test]
fn exit_code_one_on_failed_verification() {
    // The eta check does not hold at n = 5 (measured class 2), so the
    // verification exit path is exercised for real.
    let (doc, code) = run_json(&["qd", "eta-check", "--n", "5", "--primes", "2"]);
    assert_eq!(code, 1);
    assert_eq!(doc["holds"], Value::Bool(false));
    // ...and holds=true exits 0.
    let (doc, code) = run_json(&["nahm", "ag", "--n", "5", "--order", "20"]);
    assert_eq!(code, 0);
    assert_eq!(doc["holds"], Value::Bool(true));
}

#[test]
fn exit_code_two_on_usage_errors() {
    // Missing required flag.
    let out = bin().args(["bfq", "group", "--q", "19"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Invalid context.
    let out = bin()
        .args(["bfq", "group", "--q", "11", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Unknown subcommand (clap).
    let out = bin().args(["bfq", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Precision floor.
    let out = bin()
        .args(["nahm", "solve", "2", "--precision", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Degenerate KMS input.
    let out = bin()
        .args(["qd", "kms", "--q", "19", "--n", "5", "1", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_three_on_resource_errors() {
    // An impossible prime request exhausts the search bound.
    let out = bin()
        .args(["primes", "find", "--n", "99991", "--primes", "50"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn kms_reports_sides() {
    let (doc, code) = run_json(&["qd", "kms", "--q", "19", "--n", "5", "2", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["holds"], Value::Bool(true));
    assert_eq!(doc["result"]["lhs"], doc["result"]["rhs"]);
}

#[test]
fn modpq_table_matches_frozen_oracle() {
    let (doc, _) = run_json(&["qd", "modpq-table", "--q", "19", "--n", "5"]);
    let expect: Vec<u64> = vec![0, 0, 0, 2, 1, 4, 1, 2, 3, 2, 0, 3, 2, 3, 4, 1, 4, 3, 0];
    let got: Vec<u64> = doc["result"]["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(got, expect);
}

#[test]
fn project_and_pclass_agree_on_relations() {
    // A five-term element projects to zero and has trivial class.
    let sum = "2,-1*3,11,-1*15,10";
    let (doc, _) = run_json(&["bfq", "project", "--q", "19", "--n", "5", sum]);
    assert!(doc["result"]["coordinates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_u64() == Some(0)));
    let (doc, _) = run_json(&["qd", "pclass", "--q", "19", "--n", "5", sum]);
    assert_eq!(doc["result"]["class"], 0);
}

#[test]
fn torsion_shorthands() {
    let (doc, code) = run_json(&["nahm", "torsion", "@eta", "--n", "5", "--primes", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["constant_class"], 2);
    assert_eq!(doc["result"]["all_zero"], Value::Bool(false));
    let (doc, _) = run_json(&["nahm", "torsion", "@ag", "--n", "5", "--primes", "3"]);
    assert_eq!(doc["result"]["constant_class"], 1);
}

#[test]
fn big_numbers_serialize_as_strings() {
    // 25^25 exceeds 53-bit exactness and must be a decimal string.
    let (doc, _) = run_json(&["cyclo", "d1-check", "--n", "25"]);
    assert!(doc["result"]["expected_constant"].is_string());
    // Small constants stay numeric.
    let (doc, _) = run_json(&["cyclo", "phi", "--n", "6"]);
    assert_eq!(doc["result"]["coefficients"], serde_json::json!([1, -1, 1]));
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("dilog-units-cache-{}", std::process::id()));
    let _ = std::fs::remove_file(&dir);
    let cache = dir.to_str().unwrap();

    let cold = bin()
        .args(["primes", "find", "--n", "5", "--primes", "3", "--cache", cache])
        .output()
        .unwrap();
    assert!(dir.exists(), "cache file was not created");
    let text = std::fs::read_to_string(&dir).unwrap();
    assert!(text.lines().count() > 1);
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first.get("version").is_some());
    for line in text.lines().skip(1) {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v.get("n").is_some() && v.get("q").is_some() && v.get("valid").is_some());
    }

    // Warm run: identical output, no new entries for the same query.
    let len_before = text.lines().count();
    let warm = bin()
        .args(["primes", "find", "--n", "5", "--primes", "3", "--cache", cache])
        .output()
        .unwrap();
    assert_eq!(cold.stdout, warm.stdout, "cache changed the result");
    let text_after = std::fs::read_to_string(&dir).unwrap();
    assert_eq!(len_before, text_after.lines().count());

    // The environment variable is honored too.
    let env_run = bin()
        .args(["primes", "find", "--n", "5", "--primes", "3"])
        .env("DILOG_UNITS_CACHE", cache)
        .output()
        .unwrap();
    assert_eq!(cold.stdout, env_run.stdout);
    let _ = std::fs::remove_file(&dir);
}

#[test]
fn eta_check_single_context() {
    let (doc, code) = run_json(&["qd", "eta-check", "--q", "13", "--n", "7"]);
    assert_eq!(code, 0, "8 ≡ 1 mod 7, so the check holds there");
    assert_eq!(doc["holds"], Value::Bool(true));
    let per = doc["result"]["per_prime"].as_array().unwrap();
    assert_eq!(per.len(), 1);
    assert_eq!(per[0]["class"], 2);
}

#[test]
fn nahm_sum_complex_argument() {
    let (doc, code) = run_json(&["nahm", "sum", "2", "0.05,0.05", "--precision", "96"]);
    assert_eq!(code, 0);
    let re: f64 = doc["result"]["value"]["re"].as_str().unwrap().parse().unwrap();
    let im: f64 = doc["result"]["value"]["im"].as_str().unwrap().parse().unwrap();
    // Direct f64 oracle over a handful of terms.
    type C = (f64, f64);
    let mul = |a: C, b: C| -> C { (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0) };
    let div = |a: C, b: C| -> C {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    let powi = |a: C, k: u32| -> C {
        let mut r = (1.0, 0.0);
        for _ in 0..k {
            r = mul(r, a);
        }
        r
    };
    let q: C = (0.05, 0.05);
    let mut oracle: C = (0.0, 0.0);
    let mut poch: C = (1.0, 0.0);
    for m in 0u32..20 {
        if m > 0 {
            let f = powi(q, m);
            poch = mul(poch, (1.0 - f.0, -f.1));
        }
        let t = div(powi(q, m * m), poch);
        oracle = (oracle.0 + t.0, oracle.1 + t.1);
    }
    assert!((re - oracle.0).abs() < 1e-10 && (im - oracle.1).abs() < 1e-10);
}

#[test]
fn invalid_cyclotomic_order_is_usage_error() {
    let out = bin().args(["cyclo", "d1-check", "--n", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_mode_renders_same_data() {
    let out = bin()
        .args(["bfq", "group", "--q", "19", "--n", "5", "--format", "table"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("command = bfq group"));
    assert!(text.contains("result.invariant_factors = [5]"));
    assert!(text.contains("elapsed_ms"));
}

#[test]
fn radial_reports_rate_and_phase() {
    let (doc, code) = run_json(&[
        "nahm", "radial", "2", "--grid", "0.3,0.2,0.1,0.05", "--precision", "96",
    ]);
    assert_eq!(code, 0);
    let rate: f64 = doc["result"]["fitted_rate"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((rate - std::f64::consts::PI.powi(2) / 15.0).abs() < 1e-3);
    assert!(doc["result"]["constant_phase_turns"].is_string());
}

#[test]
fn series_output_shape() {
    let (doc, _) = run_json(&["nahm", "series", "2", "--order", "8"]);
    assert_eq!(doc["result"]["denominator"], 1);
    assert_eq!(
        doc["result"]["coefficients"],
        serde_json::json!([1, 1, 1, 1, 2, 2, 3, 3, 4])
    );
}
