//! Machine-checked certificates for the tail-side inequalities.
//!
//! The submodules are layered: [`poly`] provides exact rational polynomial
//! arithmetic, [`sturm`] exact root counting, [`interval`] outward-rounded
//! f64 interval arithmetic with self-contained transcendental enclosures,
//! [`taylor`] rigorous series models with rational coefficients, [`gip`]
//! the three-regime positivity proofs of the even comparison functions,
//! and [`claims`] the registry assembling everything into [`Certificate`]
//! values with explicit verdicts and serializable evidence.

pub mod claims;
pub mod gip;
pub mod interval;
pub mod poly;
pub mod sturm;
pub mod taylor;

use serde::{Deserialize, Serialize};

pub use claims::run_all;

/// Outcome of one certificate check.
///
/// `Refuted` is reserved for exact disproofs; a sufficient condition that
/// merely fails to apply produces `Inconclusive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proved,
    Refuted,
    Inconclusive,
}

/// One checked claim with its verdict and the numbers that back it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub claim: String,
    pub verdict: Verdict,
    pub evidence: serde_json::Value,
    /// Wall-clock milliseconds spent checking; zeroed for reproducible
    /// output when requested by the caller.
    pub ms: u64,
}
