//! Desk-scale computational number theory around finite Bloch groups and the
//! cyclic quantum dilogarithm.
//!
//! The crate is organized as five subsystems:
//!
//! - [`ff`]: the finite-field tower `F_q ⊂ F_{q²}` with a pinned order-`n`
//!   root of unity and the discrete-log trivialization of
//!   `F_{q²}^× / F_{q²}^{×n}`.
//! - [`cyclotomic`]: exact arithmetic in `Q(ζ_n)` with complex embeddings and
//!   reduction into a local context.
//! - [`bloch`]: formal sums on `P¹(F_q)`, the five-term relation, and the
//!   presentation of `B(F_q) ⊗ Z/nZ` by normal-form linear algebra.
//! - [`qdilog`]: the cyclic quantum dilogarithm, the unit-class map on formal
//!   sums, the mod-p-q dilogarithm, and the exact compatibility checks.
//! - [`nahm`]: multiprecision dilogarithms, Nahm-equation solving, q-series
//!   expansion, radial asymptotics at roots of unity, and the finite-field
//!   torsion probe.

pub mod bloch;
pub mod cyclotomic;
pub mod ff;
pub mod nahm;
pub mod primes;
pub mod qdilog;

pub use bloch::{FormalSum, Presentation, ProjPoint};
pub use cyclotomic::{CycPoly, EmbeddingIndex};
pub use ff::{FqElem, Fq2Elem, LocalContext, PowerClass};
pub use nahm::{AsymReport, BigComplex, BigReal, NahmTriple, TorsionReport};
pub use qdilog::KmsReport;
