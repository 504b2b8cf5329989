//! Append-only prime cache: one JSON object per line,
//! `{"n": int, "q": int, "valid": bool}`, with a version header line;
//! entries from other versions are re-validated (ignored on load).

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct PrimeCache {
    path: Option<PathBuf>,
    entries: HashMap<(u64, u64), bool>,
    dirty: Vec<(u64, u64, bool)>,
}

impl PrimeCache {
    /// Loads from `--cache`, falling back to `DILOG_UNITS_CACHE`; an absent
    /// file means a cold start.
    pub fn open(explicit: Option<PathBuf>) -> Self {
        let path = explicit.or_else(|| std::env::var_os("DILOG_UNITS_CACHE").map(PathBuf::from));
        let mut entries = HashMap::new();
        if let Some(p) = &path {
            if let Ok(text) = fs::read_to_string(p) {
                let mut version_ok = false;
                for (i, line) in text.lines().enumerate() {
                    let v: Value = match serde_json::from_str(line) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    if i == 0 {
                        version_ok = v.get("version").and_then(Value::as_str) == Some(VERSION);
                        continue;
                    }
                    if !version_ok {
                        break;
                    }
                    if let (Some(n), Some(q), Some(valid)) = (
                        v.get("n").and_then(Value::as_u64),
                        v.get("q").and_then(Value::as_u64),
                        v.get("valid").and_then(Value::as_bool),
                    ) {
                        entries.insert((n, q), valid);
                    }
                }
            }
        }
        PrimeCache {
            path,
            entries,
            dirty: Vec::new(),
        }
    }

    pub fn lookup(&self, n: u64, q: u64) -> Option<bool> {
        self.entries.get(&(n, q)).copied()
    }

    pub fn record(&mut self, n: u64, q: u64, valid: bool) {
        if self.entries.insert((n, q), valid).is_none() {
            self.dirty.push((n, q, valid));
        }
    }

    /// Appends new entries; creates the file (with a version header) on
    /// first write.
    pub fn flush(&mut self) {
        let path = match &self.path {
            Some(p) => p.clone(),
            None => return,
        };
        if self.dirty.is_empty() {
            return;
        }
        let fresh = !path.exists();
        let mut file = match fs::OpenOptions::new().create(true).append(true).open(&path) {
            Ok(f) => f,
            Err(_) => return,
        };
        if fresh {
            let _ = writeln!(file, "{}", json!({ "version": VERSION }));
        }
        for (n, q, valid) in self.dirty.drain(..) {
            let _ = writeln!(file, "{}", json!({ "n": n, "q": q, "valid": valid }));
        }
    }
}

/// The `count` smallest primes `q ≥ q_min` with a valid context for `n`,
/// consulting and extending the cache. Cache hits never change results
/// versus cold runs because validity is deterministic in `(q, n)`.
pub fn find_local_primes(
    cache: &mut PrimeCache,
    n: u64,
    count: usize,
    q_min: u64,
) -> Result<Vec<u64>, dilog_units_core::primes::PrimeError> {
    use dilog_units_core::primes::{context_admissible, PrimeError};
    let mut out = Vec::with_capacity(count);
    if n < 2 {
        return Err(PrimeError::InsufficientPrimes {
            wanted: count,
            found: 0,
        });
    }
    let mut q = if q_min % n == n - 1 {
        q_min
    } else {
        q_min + (n - 1 + n - q_min % n) % n
    };
    let cap = q_min.saturating_add(200_000_000 / n.max(1)).max(10_000_000);
    while out.len() < count && q <= cap {
        let valid = match cache.lookup(n, q) {
            Some(v) => v,
            None => {
                let v = context_admissible(q, n);
                cache.record(n, q, v);
                v
            }
        };
        if valid {
            out.push(q);
        }
        q += n;
    }
    cache.flush();
    if out.len() < count {
        return Err(PrimeError::InsufficientPrimes {
            wanted: count,
            found: out.len(),
        });
    }
    Ok(out)
}
