//! The finite-field torsion probe: reduce a cyclotomic Bloch element into
//! many local contexts and record its unit classes. Unanimous vanishing is
//! the necessary condition for triviality mod n.

use crate::bloch::{FormalSum, ProjPoint};
use crate::cyclotomic::{CycError, CycPoly};
use crate::ff::{LocalContext, PowerClass};
use crate::primes::local_primes;
use crate::qdilog::p_class;

use super::NahmError;

/// Per-prime classes of a reduced cyclotomic element.
#[derive(Clone, Debug)]
pub struct TorsionReport {
    pub n: u64,
    /// `(q, class)` for every prime that reduced cleanly.
    pub classes: Vec<(u64, PowerClass)>,
    /// Primes skipped because some entry failed to reduce, with the reason.
    pub skipped: Vec<(u64, String)>,
    /// Whether every recorded class is zero.
    pub all_zero: bool,
    /// The common class when all recorded classes agree.
    pub constant_class: Option<u64>,
}

/// Reduces the entries at `prime_count` valid primes `q ≥ q_min` (ascending)
/// and computes the unit class of `Σ [x̄ᵢ]` at each.
///
/// Entries must be fixed by `ζ ↦ ζ^{-1}` so their reductions land in `F_q`;
/// entries violating this are a caller error ([`NahmError::BadEntry`]).
/// A prime at which some denominator degenerates is skipped and reported.
pub fn torsion_probe(
    xs: &[CycPoly],
    n: u64,
    prime_count: usize,
    q_min: u64,
) -> Result<TorsionReport, NahmError> {
    for (index, x) in xs.iter().enumerate() {
        if x.order() != n {
            return Err(NahmError::BadEntry {
                index,
                q: 0,
                reason: format!("entry has order {}, probe has n={}", x.order(), n),
            });
        }
        if !x.is_real_subfield() {
            return Err(NahmError::BadEntry {
                index,
                q: 0,
                reason: "entry is not fixed by ζ ↦ ζ^{-1}".into(),
            });
        }
    }

    let primes = local_primes(n, prime_count, q_min).map_err(|e| match e {
        crate::primes::PrimeError::InsufficientPrimes { wanted, found } => {
            NahmError::InsufficientPrimes { wanted, found }
        }
    })?;

    let mut classes = Vec::new();
    let mut skipped = Vec::new();
    'primes: for q in primes {
        let ctx = match LocalContext::build(q, n) {
            Ok(c) => c,
            Err(e) => {
                skipped.push((q, e.to_string()));
                continue;
            }
        };
        let mut sum = FormalSum::new();
        for (index, x) in xs.iter().enumerate() {
            match x.reduce_to_local(&ctx) {
                Ok(v) => {
                    if !v.is_base() {
                        return Err(NahmError::BadEntry {
                            index,
                            q,
                            reason: "reduction left F_q despite conjugation symmetry".into(),
                        });
                    }
                    sum.add_term(ProjPoint::Finite(v.a), 1);
                }
                Err(CycError::BadDenominator(_)) => {
                    skipped.push((q, format!("entry {index}: denominator vanishes mod {q}")));
                    continue 'primes;
                }
                Err(e) => {
                    return Err(NahmError::BadEntry {
                        index,
                        q,
                        reason: e.to_string(),
                    });
                }
            }
        }
        match p_class(&sum, &ctx) {
            Ok(c) => classes.push((q, c)),
            Err(e) => skipped.push((q, e.to_string())),
        }
    }

    let all_zero = !classes.is_empty() && classes.iter().all(|(_, c)| c.is_trivial());
    let constant_class = match classes.split_first() {
        Some(((_, first), rest)) if rest.iter().all(|(_, c)| c == first) => Some(first.0),
        _ => None,
    };
    Ok(TorsionReport {
        n,
        classes,
        skipped,
        all_zero,
        constant_class,
    })
}
