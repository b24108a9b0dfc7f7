//! Exact root counting by Sturm sequences.
//!
//! For a squarefree p, the chain p₀ = p, p₁ = p′, p_{k+1} = −rem(p_{k−1}, p_k)
//! ends at a nonzero constant, and the number of distinct real roots in
//! (a, b] is V(a) − V(b), where V(x) counts sign changes along the chain
//! (zeros skipped). Infinite endpoints use the leading-coefficient signs.
//! Inputs are made squarefree first, so the counts are of *distinct* roots;
//! finite endpoints must not themselves be roots.

use super::poly::{RationalPolynomial, MAX_DEGREE};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Signed;

/// An endpoint for root counting.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(BigRational),
    PosInf,
}

/// The Sturm chain of p (callers pass the squarefree part).
///
/// Each negated remainder is rescaled by the reciprocal of the *absolute
/// value* of its leading coefficient — a positive factor, which keeps all
/// sign variations intact. (Making the entries monic instead would flip
/// signs whenever a leading coefficient is negative and corrupt the count.)
pub fn sturm_chain(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        if chain[n - 1].degree() == 0 {
            return chain;
        }
        let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
        let nr = -&r;
        match nr.leading() {
            None => {
                return chain; // exact division: p was not squarefree
            }
            Some(lead) => {
                let scale = lead.abs().recip();
                chain.push(nr.scale(&scale));
            }
        }
    }
}

/// Sign of p at a bound: finite points evaluate exactly; ±∞ read the
/// leading coefficient (with degree-parity flip at −∞).
fn sign_at_bound(p: &RationalPolynomial, at: &Bound) -> i8 {
    if p.is_zero() {
        return 0;
    }
    match at {
        Bound::Finite(x) => p.sign_at(x),
        Bound::PosInf => {
            if p.leading().unwrap().is_positive() {
                1
            } else {
                -1
            }
        }
        Bound::NegInf => {
            let lead = if p.leading().unwrap().is_positive() {
                1
            } else {
                -1
            };
            if p.degree().is_multiple_of(2) {
                lead
            } else {
                -lead
            }
        }
    }
}

/// Sign changes along the chain at a bound.
fn variations(chain: &[RationalPolynomial], at: &Bound) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| sign_at_bound(p, at))
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of p in (lo, hi].
///
/// Errors: zero polynomial, degree above [`MAX_DEGREE`], badly ordered
/// bounds, or a finite endpoint that is itself a root (the half-open count
/// would be ambiguous relative to the claim being certified).
pub fn count_roots(p: &RationalPolynomial, lo: &Bound, hi: &Bound) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::InvalidParameter(
            "root counting needs a nonzero polynomial".into(),
        ));
    }
    if p.degree() > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "degree {} exceeds the certification limit {MAX_DEGREE}",
            p.degree()
        )));
    }
    match (lo, hi) {
        (Bound::Finite(a), Bound::Finite(b)) if a >= b => {
            return Err(Error::InvalidParameter(format!("bounds out of order: {a} >= {b}")))
        }
        (Bound::PosInf, _) | (_, Bound::NegInf) => {
            return Err(Error::InvalidParameter("bounds out of order".into()))
        }
        _ => {}
    }
    let sf = p.squarefree();
    for at in [lo, hi] {
        if let Bound::Finite(x) = at {
            if sf.sign_at(x) == 0 {
                return Err(Error::InvalidParameter(format!(
                    "endpoint {x} is a root; shrink the interval"
                )));
            }
        }
    }
    let chain = sturm_chain(&sf);
    let va = variations(&chain, lo);
    let vb = variations(&chain, hi);
    Ok(va.saturating_sub(vb))
}
