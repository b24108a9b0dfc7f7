//! Higher u-derivatives of Γ via exact symbolic differentiation.
//!
//! Expectations of the form E[L(y₁,…,y_k)·e^{W(u)}], with y_j = ∂ₓ^jΦ(M(u),u)
//! evaluated along the Brownian path, obey a closed differentiation rule in
//! u between atoms:
//!
//! ```text
//! d/du E[L·e^W] = (ξ″/2)·E[( Σ_{i,j} ∂_{yᵢ}∂_{yⱼ}L·y_{i+1}·y_{j+1}
//!                − μ([0,u])·Σᵢ Σ_{j=1}^{i−1} C(i,j)·∂_{yᵢ}L·y_{j+1}·y_{i−j+1} )·e^W]
//! ```
//!
//! Repeatedly applying it to L = y₁² (whose expectation is Γ) produces, for
//! the SK mixture where ξ″/2 = β²,
//!
//! ```text
//! Γ′  ~ 2β²·y₂²
//! Γ″  ~ 4β⁴·y₃² − 8β⁴·m·y₂³
//! Γ‴  ~ 8β⁶·y₄² − 96β⁶·m·y₂y₃² + 48β⁶·m²·y₂⁴,        m = μ([0,u]),
//! ```
//!
//! all with exact rational coefficients. [`MomentPolynomial`] carries these
//! integrands symbolically (rational coefficients times powers of β² and m),
//! [`ddu`] implements the rule, and [`gamma_higher`] evaluates the result as
//! a path expectation. At an atom q the coefficients are one-sided — the
//! mass m jumps — so evaluations carry a [`Side`]; the path weight e^W
//! itself is continuous there.
//!
//! The derivative stack stops at ∂ₓ⁴Φ, so polynomials mentioning y₅ can be
//! produced (one application of the rule beyond Γ‴) but not evaluated, and
//! differentiating them again is refused.

use crate::error::{Error, Result};
use crate::gamma::{g_func, gamma_prime, path_expectation, richardson_onesided, Side};
use crate::pde::{PhiJet, PhiStack, MAX_ORDER};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Largest y-index a polynomial may mention (one past the evaluable stack).
pub const MAX_Y_INDEX: usize = MAX_ORDER + 1;

/// Closest approach (in u) allowed when estimating limits toward an atom by
/// finite differences; the gap quotients degenerate below this.
pub const MIN_LIMIT_OFFSET: f64 = 1e-3;

/// One monomial key: powers of β², of m = μ([0,u]), and of y₁..y₅.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    beta2: u32,
    m: u32,
    y: [u8; MAX_Y_INDEX],
}

/// A polynomial in y₁..y₅ whose coefficients are exact rationals times
/// powers of β² and of the running mass m.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MomentPolynomial {
    terms: BTreeMap<Term, BigRational>,
}

impl MomentPolynomial {
    /// The zero polynomial.
    pub fn new() -> Self {
        Self::default()
    }

    /// The integrand of Γ: y₁².
    pub fn gamma_integrand() -> Self {
        let mut p = Self::new();
        p.add(term(0, 0, &[(1, 2)]), rat(1));
        p
    }

    /// The integrand of Γ′: 2β²·y₂².
    pub fn gamma_prime_integrand() -> Self {
        let mut p = Self::new();
        p.add(term(1, 0, &[(2, 2)]), rat(2));
        p
    }

    /// The integrand of Γ″: 4β⁴·y₃² − 8β⁴·m·y₂³.
    pub fn gamma_second_integrand() -> Self {
        let mut p = Self::new();
        p.add(term(2, 0, &[(3, 2)]), rat(4));
        p.add(term(2, 1, &[(2, 3)]), rat(-8));
        p
    }

    /// The integrand of Γ‴: 8β⁶·y₄² − 96β⁶·m·y₂y₃² + 48β⁶·m²·y₂⁴.
    pub fn gamma_third_integrand() -> Self {
        let mut p = Self::new();
        p.add(term(3, 0, &[(4, 2)]), rat(8));
        p.add(term(3, 1, &[(2, 1), (3, 2)]), rat(-96));
        p.add(term(3, 2, &[(2, 4)]), rat(48));
        p
    }

    fn add(&mut self, t: Term, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    /// True if no terms remain.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest y-index with a nonzero exponent anywhere (0 if none).
    pub fn max_y_index(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|t| {
                t.y.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, _)| i + 1)
            })
            .max()
            .unwrap_or(0)
    }

    /// Numeric value at a Φ derivative stack with given β² and m. Fails if
    /// the polynomial mentions y₅, which the stack does not provide.
    pub fn eval(&self, jet: &PhiJet, beta_sq: f64, m: f64) -> Result<f64> {
        if self.max_y_index() > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "polynomial mentions y{} but the stack stops at y{MAX_ORDER}",
                self.max_y_index()
            )));
        }
        Ok(self.eval_unchecked(jet, beta_sq, m))
    }

    /// Same without the y₅ check (for use inside quadrature closures after a
    /// single up-front check).
    fn eval_unchecked(&self, jet: &PhiJet, beta_sq: f64, m: f64) -> f64 {
        let mut total = 0.0;
        for (t, c) in &self.terms {
            let mut v = c.to_f64().unwrap_or(f64::NAN);
            v *= beta_sq.powi(t.beta2 as i32) * m.powi(t.m as i32);
            for (i, &e) in t.y.iter().enumerate() {
                if e > 0 {
                    v *= jet.dx(i + 1).powi(e as i32);
                }
            }
            total += v;
        }
        total
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn term(beta2: u32, m: u32, ys: &[(usize, u8)]) -> Term {
    let mut y = [0u8; MAX_Y_INDEX];
    for &(i, e) in ys {
        y[i - 1] = e;
    }
    Term { beta2, m, y }
}

/// ∂_{yᵢ} of a monomial exponent vector: (multiplier, new exponents), or
/// None if the variable is absent.
fn partial(y: &[u8; MAX_Y_INDEX], i: usize) -> Option<(u32, [u8; MAX_Y_INDEX])> {
    let e = y[i - 1];
    if e == 0 {
        return None;
    }
    let mut out = *y;
    out[i - 1] = e - 1;
    Some((e as u32, out))
}

fn binom(n: usize, k: usize) -> BigRational {
    BigRational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// Apply the u-differentiation rule once. The input must not mention y₅
/// (the output would then need y₆).
pub fn ddu(p: &MomentPolynomial) -> Result<MomentPolynomial> {
    if p.max_y_index() > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "cannot differentiate a polynomial mentioning y{}: y{} would exceed the stack",
            p.max_y_index(),
            p.max_y_index() + 1
        )));
    }
    let mut out = MomentPolynomial::new();
    for (t, c) in &p.terms {
        // Hessian part: Σ_{i,j} ∂ᵢ∂ⱼL · y_{i+1} y_{j+1}, multiplied by ξ″/2 = β².
        for i in 1..=MAX_ORDER {
            let Some((fi, yi)) = partial(&t.y, i) else {
                continue;
            };
            for j in 1..=MAX_ORDER {
                let Some((fj, yij)) = partial(&yi, j) else {
                    continue;
                };
                let mut y = yij;
                y[i] += 1; // y_{i+1}
                y[j] += 1; // y_{j+1}
                out.add(
                    Term {
                        beta2: t.beta2 + 1,
                        m: t.m,
                        y,
                    },
                    c * rat((fi * fj) as i64),
                );
            }
        }
        // Interaction part: −m Σᵢ Σ_{j=1}^{i−1} C(i,j) ∂ᵢL · y_{j+1} y_{i−j+1}.
        for i in 2..=MAX_ORDER {
            let Some((fi, yi)) = partial(&t.y, i) else {
                continue;
            };
            for j in 1..i {
                let mut y = yi;
                y[j] += 1; // y_{j+1}
                y[i - j] += 1; // y_{i−j+1}
                out.add(
                    Term {
                        beta2: t.beta2 + 1,
                        m: t.m + 1,
                        y,
                    },
                    -(c * rat(fi as i64) * binom(i, j)),
                );
            }
        }
    }
    Ok(out)
}

impl fmt::Display for MomentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", c.abs())?;
            if t.beta2 > 0 {
                write!(f, "·b2^{}", t.beta2)?;
            }
            if t.m > 0 {
                write!(f, "·m^{}", t.m)?;
            }
            for (i, &e) in t.y.iter().enumerate() {
                if e > 0 {
                    write!(f, "·y{}^{e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// Γ⁽ᵒʳᵈᵉʳ⁾(q) for order ∈ {2, 3}, one-sided at atoms: the mass m in the
/// integrand is μ([0,q]) from the right and μ([0,q)) from the left. The
/// evaluation is a path expectation, so at a deterministic point (q = 0
/// with an atom there) it is quadrature-free and exact.
pub fn gamma_higher(stack: &PhiStack, q: f64, order: u8, side: Side) -> Result<f64> {
    let poly = match order {
        2 => MomentPolynomial::gamma_second_integrand(),
        3 => MomentPolynomial::gamma_third_integrand(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "gamma_higher supports orders 2 and 3, got {order}"
            )))
        }
    };
    let m = match side {
        Side::Plus => stack.measure().alpha(q),
        Side::Minus => stack.measure().alpha_left(q),
    };
    let beta_sq = stack.mixture().beta_sq();
    let pv = path_expectation(stack, q, |jet| poly.eval_unchecked(jet, beta_sq, m))?;
    Ok(pv.value)
}

/// lim_{t→q⁺} ∂ₜ²G(q,t) = Γ‴(q⁺)/(3·Γ′(q)).
pub fn second_deriv_limit(stack: &PhiStack, q: f64) -> Result<f64> {
    let third = gamma_higher(stack, q, 3, Side::Plus)?;
    let gp = gamma_prime(stack, q)?;
    if gp.abs() < 1e-14 {
        return Err(Error::DegenerateDenominator(format!(
            "Gamma'({q}) = {gp:.3e}"
        )));
    }
    Ok(third / (3.0 * gp))
}

/// The same limit estimated from G alone: ∂ₜ²G(q,·) by central second
/// differences at t = q + h for the Richardson offsets, extrapolated to
/// h → 0. Every sample keeps t − q ≥ [`MIN_LIMIT_OFFSET`], where the gap
/// quotient is still well conditioned; closer sampling is refused.
pub fn second_deriv_limit_fd(stack: &PhiStack, q: f64) -> Result<f64> {
    let second_at = |t: f64| -> Result<f64> {
        let delta = (t - q) / 4.0;
        for s in [t - delta, t, t + delta] {
            if s - q < MIN_LIMIT_OFFSET {
                return Err(Error::InvalidParameter(format!(
                    "G(q,·) sample at t−q = {:.2e} is below the {MIN_LIMIT_OFFSET:.0e} floor",
                    s - q
                )));
            }
        }
        let lo = g_func(stack, q, t - delta)?;
        let mid = g_func(stack, q, t)?;
        let hi = g_func(stack, q, t + delta)?;
        Ok((hi - 2.0 * mid + lo) / (delta * delta))
    };
    // Reuse the one-sided extrapolation machinery: f(q + h) = ∂ₜ²G(q, q+h).
    richardson_onesided(second_at, q, Side::Plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicMeasure, Mixture, Temperature};
    use crate::pde::{solve_phi, QuadratureSpec};
    use approx::assert_abs_diff_eq;

    fn delta0_stack(beta: f64, nodes: usize) -> PhiStack {
        let temp = Temperature::new(beta).unwrap();
        let mix = Mixture::sk(temp);
        let quad = QuadratureSpec::new(nodes, 40.0).unwrap();
        solve_phi(&AtomicMeasure::delta0(), &mix, &quad).unwrap()
    }

    #[test]
    fn ddu_reproduces_the_whole_derivative_chain() {
        let gamma = MomentPolynomial::gamma_integrand();
        let first = ddu(&gamma).unwrap();
        assert_eq!(first, MomentPolynomial::gamma_prime_integrand());
        let second = ddu(&first).unwrap();
        assert_eq!(second, MomentPolynomial::gamma_second_integrand());
        let third = ddu(&second).unwrap();
        assert_eq!(third, MomentPolynomial::gamma_third_integrand());
    }

    #[test]
    fn y5_boundary_is_enforced() {
        let third = MomentPolynomial::gamma_third_integrand();
        let fourth = ddu(&third).unwrap();
        assert_eq!(fourth.max_y_index(), 5);
        assert!(!fourth.is_zero());
        assert!(ddu(&fourth).is_err());
        let jet_holder = delta0_stack(0.6, 21);
        let jet = jet_holder.eval(0.3, 0.5).unwrap();
        assert!(fourth.eval(&jet, 0.36, 1.0).is_err());
        assert!(third.eval(&jet, 0.36, 1.0).is_ok());
    }

    #[test]
    fn display_renders_the_second_integrand() {
        let s = MomentPolynomial::gamma_second_integrand().to_string();
        assert!(s.contains("4·b2^2·y3^2"), "got {s}");
        assert!(s.contains("8·b2^2·m^1·y2^3"), "got {s}");
    }

    #[test]
    fn one_sided_values_at_the_origin_are_exact() {
        // At (x,u) = (0,0) the path is deterministic: y₂ = 1, y₃ = 0,
        // y₄ = −2, so the one-sided values are polynomial identities:
        // Γ″(0⁺) = −8β⁴, Γ‴(0⁺) = 8β⁶·4 + 48β⁶ = 80β⁶ (m = 1), and from the
        // left (m = 0) Γ″(0⁻) = 0, Γ‴(0⁻) = 32β⁶.
        for &beta in &[std::f64::consts::FRAC_1_SQRT_2, 0.75] {
            let stack = delta0_stack(beta, 21);
            let b2 = beta * beta;
            let b4 = b2 * b2;
            let b6 = b4 * b2;
            assert_abs_diff_eq!(
                gamma_higher(&stack, 0.0, 2, Side::Plus).unwrap(),
                -8.0 * b4,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                gamma_higher(&stack, 0.0, 2, Side::Minus).unwrap(),
                0.0,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                gamma_higher(&stack, 0.0, 3, Side::Plus).unwrap(),
                80.0 * b6,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                gamma_higher(&stack, 0.0, 3, Side::Minus).unwrap(),
                32.0 * b6,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn gamma_second_matches_finite_differences_of_gamma_prime() {
        let stack = delta0_stack(0.75, 41);
        let u = 0.2;
        let h = 1e-3;
        let fd = (gamma_prime(&stack, u + h).unwrap() - gamma_prime(&stack, u - h).unwrap())
            / (2.0 * h);
        let exact = gamma_higher(&stack, u, 2, Side::Plus).unwrap();
        assert_abs_diff_eq!(exact, fd, epsilon = 1e-4);
        // Off the support both sides agree (m is continuous there).
        assert_abs_diff_eq!(
            exact,
            gamma_higher(&stack, u, 2, Side::Minus).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn gamma_third_matches_finite_differences_of_gamma_second() {
        let stack = delta0_stack(0.75, 41);
        let u = 0.2;
        let h = 1e-3;
        let fd = (gamma_higher(&stack, u + h, 2, Side::Plus).unwrap()
            - gamma_higher(&stack, u - h, 2, Side::Plus).unwrap())
            / (2.0 * h);
        let exact = gamma_higher(&stack, u, 3, Side::Plus).unwrap();
        assert_abs_diff_eq!(exact, fd, epsilon = 1e-4);
    }

    #[test]
    fn second_derivative_limit_closed_form_and_fd_agree() {
        // Γ‴(0⁺)/(3Γ′(0)) = 80β⁶/(6β²) = (40/3)β⁴; at β = 1/√2 this is 10/3.
        let beta = std::f64::consts::FRAC_1_SQRT_2;
        let stack = delta0_stack(beta, 61);
        let exact = second_deriv_limit(&stack, 0.0).unwrap();
        assert_abs_diff_eq!(exact, 10.0 / 3.0, epsilon = 1e-10);
        let fd = second_deriv_limit_fd(&stack, 0.0).unwrap();
        assert_abs_diff_eq!(fd, exact, epsilon = 5e-3);
    }
}
