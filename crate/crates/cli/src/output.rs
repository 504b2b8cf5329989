//! Machine-readable output: one JSON document per run with the schema
//! `{"command", "inputs", "result", "holds"?, "timing_ms"}`, and a human
//! table rendering of the same data.
//!
//! Numbers that may exceed 53-bit exactness are serialized as decimal
//! strings; `timing_ms` is 0 in JSON mode so identical configurations
//! produce byte-identical output.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use dilog_units_core::bloch::FormalSum;
use dilog_units_core::ff::Fq2Elem;
use dilog_units_core::nahm::{BigComplex, BigReal};
use dilog_units_core::CycPoly;

/// Integers within 53-bit exactness stay numeric; larger ones become
/// decimal strings.
pub fn json_bigint(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) if x.unsigned_abs() < (1 << 53) => json!(x),
        _ => json!(v.to_string()),
    }
}

pub fn json_rational(v: &BigRational) -> Value {
    if v.denom().is_one() {
        json_bigint(v.numer())
    } else {
        json!(format!("{}/{}", v.numer(), v.denom()))
    }
}

pub fn json_real(v: &BigReal) -> Value {
    json!(v.to_dec_string())
}

pub fn json_complex(v: &BigComplex) -> Value {
    json!({ "re": json_real(&v.re), "im": json_real(&v.im) })
}

pub fn json_fq2(v: &Fq2Elem) -> Value {
    json!({ "a": json!(v.a.to_u64()), "b": json!(v.b.to_u64()) })
}

pub fn json_formal_sum(s: &FormalSum) -> Value {
    let terms: Vec<Value> = s
        .iter()
        .map(|(p, m)| json!({ "point": p.to_string(), "mult": m }))
        .collect();
    json!(terms)
}

pub fn json_cyc(p: &CycPoly) -> Value {
    let coeffs: Vec<Value> = p.coeffs().iter().map(json_rational).collect();
    json!({ "n": p.order(), "coeffs": coeffs })
}

/// The top-level document; `holds` is present only for verification
/// commands.
pub fn document(command: &str, inputs: Value, result: Value, holds: Option<bool>) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("inputs".into(), inputs);
    map.insert("result".into(), result);
    if let Some(h) = holds {
        map.insert("holds".into(), json!(h));
    }
    map.insert("timing_ms".into(), json!(0));
    Value::Object(map)
}

/// Renders the same data as an indented key/value table.
pub fn render_table(doc: &Value, elapsed_ms: u128) -> String {
    let mut out = String::new();
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, val) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, val, out);
                }
            }
            Value::Array(items) => {
                if items.len() <= 16
                    && items
                        .iter()
                        .all(|i| !matches!(i, Value::Object(_) | Value::Array(_)))
                {
                    let inline: Vec<String> = items.iter().map(render_scalar).collect();
                    out.push_str(&format!("{prefix} = [{}]\n", inline.join(", ")));
                } else {
                    for (i, item) in items.iter().enumerate() {
                        walk(&format!("{prefix}[{i}]"), item, out);
                    }
                }
            }
            _ => out.push_str(&format!("{prefix} = {}\n", render_scalar(v))),
        }
    }
    walk("", doc, &mut out);
    out.push_str(&format!("elapsed_ms = {elapsed_ms}\n"));
    out
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
