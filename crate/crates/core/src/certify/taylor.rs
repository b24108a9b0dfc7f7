//! Rigorous Taylor models over [0, h] with exact rational coefficients.
//!
//! A model represents the set of functions f with
//!
//! ```text
//!     f(x) = Σ_{i ≤ 20} cᵢ xⁱ + x²¹·R(x),      R(x) ∈ [rem.0, rem.1] on [0, h],
//! ```
//!
//! where the cᵢ and remainder bounds are `BigRational`s, so every operation
//! below is exact — there is no rounding anywhere in this module. Keeping
//! the remainder factored as x²¹·[·] (rather than a uniform absolute bound)
//! is what lets a final positivity check divide out a power of x: a model
//! whose low-order coefficients vanish identically certifies a bound of the
//! form f(x) ≥ c·xᵏ on the whole interval, which stays informative as x → 0.
//!
//! The model degree (20) and the operations provided (sum, product,
//! multiplication by x, antiderivative, reciprocal) are exactly what the
//! even-function certificates in [`super::gip`] need; this is not a general
//! computer-algebra layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{ratio, RationalPolynomial};
use crate::error::{Error, Result};

/// Polynomial degree carried exactly; everything above folds into the
/// x²¹-factored remainder.
pub const DEG: usize = 20;

/// Exact rational interval, kept as a plain pair ordered lo ≤ hi.
type RInt = (BigRational, BigRational);

fn rzero() -> RInt {
    (BigRational::zero(), BigRational::zero())
}

fn radd(a: &RInt, b: &RInt) -> RInt {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn rneg(a: &RInt) -> RInt {
    (-&a.1, -&a.0)
}

/// Hull of {0, v}: the range of v·xᵏ/hᵏ-type terms whose factor sweeps [0, 1].
fn rhull0(v: BigRational) -> RInt {
    if v.is_negative() {
        (v, BigRational::zero())
    } else {
        (BigRational::zero(), v)
    }
}

fn rmul(a: &RInt, b: &RInt) -> RInt {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let mut lo = c[0].clone();
    let mut hi = c[0].clone();
    for v in &c[1..] {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

fn rscale(s: &BigRational, a: &RInt) -> RInt {
    if s.is_negative() {
        (s * &a.1, s * &a.0)
    } else {
        (s * &a.0, s * &a.1)
    }
}

/// Division by an interval strictly above 0.
fn rdiv(a: &RInt, b: &RInt) -> RInt {
    assert!(b.0.is_positive(), "rational interval division needs a positive divisor");
    let c = [&a.0 / &b.0, &a.0 / &b.1, &a.1 / &b.0, &a.1 / &b.1];
    let mut lo = c[0].clone();
    let mut hi = c[0].clone();
    for v in &c[1..] {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

/// A rigorous enclosure of one function on [0, h].
#[derive(Debug, Clone)]
pub struct TaylorModel {
    h: BigRational,
    coeffs: Vec<BigRational>,
    rem: RInt,
}

impl TaylorModel {
    fn empty(h: &BigRational) -> Self {
        assert!(h.is_positive(), "domain [0, h] needs h > 0");
        Self {
            h: h.clone(),
            coeffs: vec![BigRational::zero(); DEG + 1],
            rem: rzero(),
        }
    }

    /// The constant function c.
    pub fn constant(h: &BigRational, c: BigRational) -> Self {
        let mut m = Self::empty(h);
        m.coeffs[0] = c;
        m
    }

    /// The identity function x.
    pub fn identity(h: &BigRational) -> Self {
        let mut m = Self::empty(h);
        m.coeffs[1] = BigRational::one();
        m
    }

    /// cosh on [0, h] for h ≤ 1/2: the exact Maclaurin prefix plus a tail
    /// enclosure Σ_{k≥11} x²ᵏ/(2k)! ⊆ x²¹·[0, 2h/22!].
    pub fn cosh(h: &BigRational) -> Self {
        assert!(*h <= ratio(1, 2), "cosh tail bound assumes h ≤ 1/2");
        let mut m = Self::empty(h);
        for k in 0..=(DEG as u32 / 2) {
            m.coeffs[2 * k as usize] = BigRational::new(BigInt::one(), factorial(2 * k));
        }
        let tail = ratio(2, 1) * h / BigRational::from(factorial(22));
        m.rem = (BigRational::zero(), tail);
        m
    }

    pub fn h(&self) -> &BigRational {
        &self.h
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn rem(&self) -> &RInt {
        &self.rem
    }

    fn same_domain(&self, o: &Self) {
        assert!(self.h == o.h, "mixed Taylor model domains");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_domain(o);
        let mut m = Self::empty(&self.h);
        for i in 0..=DEG {
            m.coeffs[i] = &self.coeffs[i] + &o.coeffs[i];
        }
        m.rem = radd(&self.rem, &o.rem);
        m
    }

    pub fn neg(&self) -> Self {
        let mut m = Self::empty(&self.h);
        for i in 0..=DEG {
            m.coeffs[i] = -&self.coeffs[i];
        }
        m.rem = rneg(&self.rem);
        m
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut m = Self::empty(&self.h);
        for i in 0..=DEG {
            m.coeffs[i] = s * &self.coeffs[i];
        }
        m.rem = rscale(s, &self.rem);
        m
    }

    /// Range of the polynomial part over [0, h] by exact interval Horner.
    fn poly_range(&self) -> RInt {
        RationalPolynomial::new(self.coeffs.clone())
            .eval_interval(&BigRational::zero(), &self.h)
    }

    /// Range enclosure of the represented function over [0, h].
    pub fn range(&self) -> RInt {
        let hpow = pow(&self.h, 21);
        let tail = rmul(&(BigRational::zero(), hpow), &self.rem);
        radd(&self.poly_range(), &tail)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_domain(o);
        let mut m = Self::empty(&self.h);
        // Exact convolution; overflow degrees d > DEG re-enter through the
        // remainder as c·x^{d−21}·x²¹ with x^{d−21} ∈ [0, h^{d−21}].
        for i in 0..=DEG {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=DEG {
                if o.coeffs[j].is_zero() {
                    continue;
                }
                let c = &self.coeffs[i] * &o.coeffs[j];
                if i + j <= DEG {
                    m.coeffs[i + j] += c;
                } else {
                    m.rem = radd(&m.rem, &rhull0(c * pow(&self.h, (i + j - 21) as u32)));
                }
            }
        }
        // Cross terms P·(x²¹R) and (x²¹R)·(x²¹R).
        m.rem = radd(&m.rem, &rmul(&self.poly_range(), &o.rem));
        m.rem = radd(&m.rem, &rmul(&o.poly_range(), &self.rem));
        let h21 = (BigRational::zero(), pow(&self.h, 21));
        m.rem = radd(&m.rem, &rmul(&h21, &rmul(&self.rem, &o.rem)));
        m
    }

    /// Multiply by x. The top coefficient lands exactly on x²¹; the
    /// remainder picks up a factor x ∈ [0, h].
    pub fn mul_x(&self) -> Self {
        let mut m = Self::empty(&self.h);
        for i in 0..DEG {
            m.coeffs[i + 1] = self.coeffs[i].clone();
        }
        let top = self.coeffs[DEG].clone();
        m.rem = radd(&(top.clone(), top), &rmul(&(BigRational::zero(), self.h.clone()), &self.rem));
        m
    }

    /// Antiderivative ∫₀ˣ. The integrated top coefficient is exactly
    /// c₂₀ x²¹/21; the integrated remainder satisfies
    /// ∫₀ˣ t²¹ R(t) dt ∈ x²¹·[min(0, r·h/22)].
    pub fn integrate(&self) -> Self {
        let mut m = Self::empty(&self.h);
        for i in 0..DEG {
            m.coeffs[i + 1] = &self.coeffs[i] / ratio(i as i64 + 1, 1);
        }
        let top = &self.coeffs[DEG] / ratio(21, 1);
        m.rem = radd(&(top.clone(), top), &{
            let f = &self.h / ratio(22, 1);
            let lo = (&self.rem.0 * &f).min(BigRational::zero());
            let hi = (&self.rem.1 * &f).max(BigRational::zero());
            (lo, hi)
        });
        m
    }

    /// Reciprocal 1/f for a model whose range is strictly positive.
    ///
    /// The polynomial part is the exact power-series inverse Q of the
    /// polynomial part of f; the identity 1/f = Q + (1 − Q·f)/f turns the
    /// defect 1 − Q·f (which has no polynomial part left) into a remainder
    /// divided by the range of f.
    pub fn recip(&self) -> Self {
        let range = self.range();
        assert!(range.0.is_positive(), "recip needs a strictly positive model");
        assert!(!self.coeffs[0].is_zero());
        let mut q = vec![BigRational::zero(); DEG + 1];
        q[0] = BigRational::one() / &self.coeffs[0];
        for n in 1..=DEG {
            let mut s = BigRational::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &q[n - k];
            }
            q[n] = -s / &self.coeffs[0];
        }
        let qm = Self {
            h: self.h.clone(),
            coeffs: q,
            rem: rzero(),
        };
        let defect = Self::constant(&self.h, BigRational::one()).sub(&qm.mul(self));
        debug_assert!(defect.coeffs.iter().all(BigRational::is_zero));
        let mut m = qm;
        m.rem = radd(&m.rem, &rdiv(&defect.rem, &range));
        m
    }

    /// Exact lower bound for f(x)/xᵏ on (0, h], requiring c₀ … c_{k−1} to
    /// vanish identically:
    ///
    /// ```text
    ///     f(x)/xᵏ ≥ c_k − Σ_{j>k} |c_j| h^{j−k} − h^{21−k}·max|rem|.
    /// ```
    ///
    /// A positive return value certifies f > 0 on all of (0, h].
    pub fn positivity_factor(&self, k: usize) -> Result<BigRational> {
        assert!(k <= DEG);
        for (i, c) in self.coeffs.iter().take(k).enumerate() {
            if !c.is_zero() {
                return Err(Error::Numerical(format!(
                    "positivity factor needs vanishing low order: c_{i} = {c} != 0"
                )));
            }
        }
        let mut b = self.coeffs[k].clone();
        for j in k + 1..=DEG {
            b -= self.coeffs[j].abs() * pow(&self.h, (j - k) as u32);
        }
        let rmag = self.rem.0.abs().max(self.rem.1.abs());
        b -= pow(&self.h, (21 - k) as u32) * rmag;
        Ok(b)
    }

    /// Enclosure of f at a single rational point x ∈ [0, h], as f64 bounds
    /// (used only by tests and diagnostics; the f64 conversion widens).
    pub fn eval_enclosure(&self, x: &BigRational) -> (f64, f64) {
        assert!(!x.is_negative() && *x <= self.h);
        let p = RationalPolynomial::new(self.coeffs.clone()).eval(x);
        let x21 = pow(x, 21);
        let lo = &p + &x21 * &self.rem.0;
        let hi = &p + &x21 * &self.rem.1;
        (rat_to_f64(&lo) - 1e-14, rat_to_f64(&hi) + 1e-14)
    }
}

fn pow(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

fn rat_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h16() -> BigRational {
        ratio(1, 16)
    }

    fn contains(m: &TaylorModel, x: f64, reference: f64) {
        let xr = BigRational::from_float(x).unwrap();
        let (lo, hi) = m.eval_enclosure(&xr);
        assert!(
            lo <= reference && reference <= hi,
            "[{lo:.17e}, {hi:.17e}] misses {reference:.17e}"
        );
        assert!(hi - lo < 1e-12, "enclosure too wide: {:.3e}", hi - lo);
    }

    #[test]
    fn cosh_and_sech_models_enclose_reference_values() {
        let c = TaylorModel::cosh(&h16());
        contains(&c, 0.0625, 0.0625f64.cosh());
        contains(&c, 0.03, 0.03f64.cosh());
        let s = c.recip();
        contains(&s, 0.0625, 1.0 / 0.0625f64.cosh());
        contains(&s, 0.001, 1.0 / 0.001f64.cosh());
        let range = s.range();
        assert!(range.0.is_positive() && range.1 < ratio(11, 10));
    }

    #[test]
    fn antiderivative_matches_gudermannian() {
        let b1 = TaylorModel::cosh(&h16()).recip().integrate();
        contains(&b1, 0.0625, 0.0625f64.sinh().atan());
        contains(&b1, 0.02, 0.02f64.sinh().atan());
    }

    #[test]
    fn product_with_x_agrees_with_generic_product() {
        let c = TaylorModel::cosh(&h16());
        let via_mul = TaylorModel::identity(&h16()).mul(&c);
        let via_shift = c.mul_x();
        for i in 0..=DEG {
            assert_eq!(via_mul.coeff(i), via_shift.coeff(i));
        }
        contains(&via_shift, 0.05, 0.05 * 0.05f64.cosh());
    }

    #[test]
    fn positivity_factor_requires_vanishing_prefix() {
        let c = TaylorModel::cosh(&h16());
        // cosh itself: order-0 factor is a positive lower bound on [0, h].
        let b0 = c.positivity_factor(0).unwrap();
        assert!(b0.is_positive() && b0 < BigRational::one());
        // Asking for a vanishing x² prefix must fail: c₀ = 1.
        assert!(c.positivity_factor(2).is_err());
    }

    #[test]
    fn first_even_certificate_series_has_exact_leading_coefficient() {
        // cosh x − sech x − x·gd(x): the low-order coefficients cancel
        // exactly and the x⁶ coefficient is 2/45.
        let h = h16();
        let c = TaylorModel::cosh(&h);
        let s = c.recip();
        let b1 = s.integrate();
        let g = c.sub(&s).sub(&b1.mul_x());
        for i in 0..6 {
            assert!(g.coeff(i).is_zero(), "c_{i} = {}", g.coeff(i));
        }
        assert_eq!(*g.coeff(6), ratio(2, 45));
        let factor = g.positivity_factor(6).unwrap();
        assert!(factor.is_positive());
        // The factor should be close to 2/45 — the correction terms at
        // h = 1/16 are tiny.
        assert!(factor > ratio(2, 46));
    }
}
