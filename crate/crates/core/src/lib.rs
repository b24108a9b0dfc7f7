//! Numerical toolkit for the Parisi variational problem of the
//! Sherrington–Kirkpatrick (SK) spin glass at finite replica symmetry
//! breaking, together with machine-checked certificates for the exact
//! inequalities that underpin the structure theory of its minimizers.
//!
//! The library is organized around a small set of objects:
//!
//! * [`model`] — inverse temperature, the SK mixture ξ(x) = β²x², and atomic
//!   probability measures on [0,1] (the finite-RSB order parameters).
//! * [`quad`] — Gauss–Hermite rules for standard-Gaussian expectations.
//! * [`pde`] — the Parisi PDE solved segment-by-segment via the Cole–Hopf
//!   recursion for atomic measures, with x-derivatives up to order 4.
//! * [`closedform`] — the δ₀ specialization: cosh-moments a_n, the
//!   antiderivatives b_n, Γ, Γ′, F and the auxiliary functions g₁..g₅.
//! * [`gamma`] — Γ_μ, Γ′_μ, the weight W_μ, and the gap functions G/F along
//!   the time-changed Brownian driver, plus the optimality criterion report.
//! * [`calculus`] — symbolic d/du calculus for moment polynomials in
//!   ∂ₓΦ,…,∂ₓ⁵Φ; generates Γ″ and Γ‴ exactly and evaluates them.
//! * [`certify`] — exact Sturm-sequence root counting, exact polynomial
//!   identity checks, and rigorous interval/Taylor certificates for the
//!   transcendental inequalities.
//! * [`optimize`] — the variational value on atomic measures, Nelder–Mead
//!   minimization over k-RSB ansätze, β-scans, and gap diagnostics.
//! * [`oracle`] — brute-force finite-N free energy as an independent
//!   cross-check.
//! * [`cli`] — the command-line surface binding everything together.

pub mod calculus;
pub mod certify;
pub mod closedform;
pub mod error;
pub mod gamma;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod pde;
pub mod quad;

pub use error::{Error, Result};
