//! Multiprecision dilogarithms, Nahm-equation solving, q-series evaluation
//! and expansion, radial asymptotics at roots of unity, and the finite-field
//! torsion probe.

mod dilog;
mod mp;
mod radial;
mod series;
mod solve;
mod torsion;

pub use dilog::{bloch_wigner, dilog, li2_real, rogers_l, ExtendedReal};
pub use mp::{BigComplex, BigReal};
pub use radial::{match_root, radial_report, AsymReport};
pub use series::{ag_check, ag_data, ag_matrix, nahm_series, nahm_sum, nahm_sum_at_root, NahmSeries};
pub use solve::{l_value, recognize_rational, solve_nahm, NahmTriple};
pub use torsion::{torsion_probe, TorsionReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NahmError {
    #[error("requested precision is unachievable")]
    PrecisionUnachievable,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("iteration budget exceeded before convergence")]
    NoConvergence,
    #[error("tail bound unattainable within the lattice budget")]
    NotConverged,
    #[error("exponent grid too fine: {0} entries on the 1/{1} grid")]
    ExponentGridOverflow(u64, u64),
    #[error("invalid order n={0}: need n odd, n ≥ 5")]
    InvalidOrder(u64),
    #[error("no embedding matches the distinguished solution")]
    NoMatch,
    #[error("prime search exhausted: wanted {wanted}, found {found}")]
    InsufficientPrimes { wanted: usize, found: usize },
    #[error("entry {index} does not reduce at q={q}: {reason}")]
    BadEntry { index: usize, q: u64, reason: String },
    #[error("fit needs at least {needed} grid points, got {got}")]
    IllConditionedFit { needed: usize, got: usize },
}
