//! Exact univariate polynomials over the rationals.
//!
//! Coefficients are stored in ascending order of degree with no trailing
//! zeros. All arithmetic is exact (num-rational), which is what makes the
//! root-counting and identity certificates proofs rather than numerics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Largest degree the certification layer accepts.
pub const MAX_DEGREE: usize = 64;

/// A polynomial with exact rational coefficients, ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    /// Build from ascending coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Build from ascending integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// Build from a sparse list of (degree, coefficient) pairs.
    pub fn from_sparse(terms: &[(usize, i64)]) -> Self {
        let deg = terms.iter().map(|&(d, _)| d).max().unwrap_or(0);
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for &(d, c) in terms {
            coeffs[d] += BigRational::from_integer(BigInt::from(c));
        }
        Self::new(coeffs)
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Ascending coefficients (no trailing zeros).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Leading coefficient, if any.
    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact range enclosure of the polynomial over [lo, hi] by interval
    /// Horner; the endpoints are rationals, so no rounding occurs.
    pub fn eval_interval(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        assert!(lo <= hi, "eval_interval needs lo <= hi");
        let mut alo = BigRational::zero();
        let mut ahi = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            // [alo, ahi] * [lo, hi]
            let cands = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
            let mut new_lo = cands[0].clone();
            let mut new_hi = cands[0].clone();
            for v in &cands[1..] {
                if *v < new_lo {
                    new_lo = v.clone();
                }
                if *v > new_hi {
                    new_hi = v.clone();
                }
            }
            alo = new_lo + c;
            ahi = new_hi + c;
        }
        (alo, ahi)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Make the leading coefficient 1 (no-op on zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_zero() => self.scale(&l.recip()),
            _ => self.clone(),
        }
    }

    /// Polynomial division: self = q·d + r with deg r < deg d.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.leading().unwrap().clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        while r.len() > dd && !r.is_empty() {
            let rl = r.last().unwrap().clone();
            if rl.is_zero() {
                r.pop();
                continue;
            }
            let shift = r.len() - 1 - dd;
            let f = rl / &dl;
            for (k, dc) in d.coeffs.iter().enumerate() {
                let idx = shift + k;
                let sub = dc * &f;
                r[idx] -= sub;
            }
            q[shift] = f;
            // The leading term cancels exactly.
            r.pop();
        }
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic(); // normalization keeps coefficient growth in check
        }
        a.monic()
    }

    /// The squarefree part self / gcd(self, self′): same roots, all simple.
    pub fn squarefree(&self) -> Self {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero(), "gcd must divide the polynomial");
        q
    }

    /// Exact sign of the value at x: -1, 0, or 1.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        RationalPolynomial::new(out)
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

/// Convenience: the rational n/d.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience: the rational n.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl One for RationalPolynomial {
    fn one() -> Self {
        RationalPolynomial::from_ints(&[1])
    }
}

impl Mul for RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        &self * &rhs
    }
}
