//! The δ₀ specialization in closed form.
//!
//! For μ = δ₀ the PDE solution is Φ(x,u) = log cosh x + β²(1−u), and the
//! criterion functionals reduce to one-dimensional Gaussian moments of
//! powers of cosh,
//!
//! ```text
//! a_n(x) = E[ coshⁿ(√(2β²x)·g) ],   g ~ N(0,1),   a₁(x) = e^{β²x},
//! ```
//!
//! giving
//!
//! ```text
//! Γ_{δ₀}(x)  = (a₁ − a₋₁)/a₁,
//! Γ′_{δ₀}(x) = 2β²·a₋₃/a₁,          Γ′_{δ₀}(0) = 2β²,
//! F_{δ₀}(x)  = 2β²x·(a₁+a₋₃)/(a₁−a₋₁) − 2,
//! ```
//!
//! and the derivative of F has the sign of
//!
//! ```text
//! f_{δ₀}(x) = (a₁+a₋₃)(a₁−a₋₁) − 2β²x[(a₁−a₋₁)(6a₋₅−4a₋₃) + a₋₃(a₁+a₋₃)].
//! ```
//!
//! Positivity of f splits into two groups, each reduced — via the Gaussian
//! integration-by-parts relation `E[(σg)·b_n(σg)] = σ²·a_n` with `b_n` the
//! antiderivative of coshⁿ normalized at 0 — to the deterministic
//! inequalities
//!
//! ```text
//! (1) cosh x − sech x − x·b₋₁(x) > 0
//! (2) 2cosh x − sech x − sech³x − 3x·b₋₃(x) > 0
//! (3) cosh x + 5sech³x − 6sech⁵x − 6x(3b₋₅(x) − 2b₋₃(x)) > 0
//! ```
//!
//! for x ≠ 0. The auxiliary functions g₁..g₅ package the monotonicity
//! argument behind (1)–(3): g₁/g₂ are the left sides of (1)/(2); g₃ is the
//! substituted form of (3) in t = cosh x; g₄/g₅ are the polynomial
//! numerators of the relevant derivatives (with fractional powers t^{k/3}).
//!
//! Everything here is floating point and advisory: the sign claims that
//! matter are re-proved with exact arithmetic in the certify module.

use crate::error::{Error, Result};
use crate::model::Temperature;
use crate::quad::gauss_hermite;

/// Largest |n| accepted by [`a_n`].
pub const MAX_MOMENT_ORDER: i32 = 8;

/// Numerically stable sech x = 2e^{−|x|}/(1 + e^{−2|x|}); no overflow.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// The cosh-moment a_n(x) = E[coshⁿ(√(2β²x)g)].
///
/// n = 1 uses the exact relation a₁ = e^{β²x}; n = 0 is 1; all other n are
/// computed by Gauss–Hermite quadrature with node doubling (61 → 121 → 241
/// → 481) until two successive values agree to 1e-10 (relative, for the
/// large positive-n moments).
pub fn a_n(beta: Temperature, x: f64, n: i32) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "a_n requires x in [0,1], got {x}"
        )));
    }
    if n.abs() > MAX_MOMENT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "a_n supports |n| <= {MAX_MOMENT_ORDER}, got {n}"
        )));
    }
    let beta_sq = beta.beta() * beta.beta();
    match n {
        0 => Ok(1.0),
        1 => Ok((beta_sq * x).exp()),
        _ => {
            let sigma = (2.0 * beta_sq * x).sqrt();
            let f = |g: f64| {
                if n > 0 {
                    (sigma * g).cosh().powi(n)
                } else {
                    sech(sigma * g).powi(-n)
                }
            };
            let mut nodes = 61;
            let mut prev = gauss_hermite(nodes).expect(f);
            loop {
                nodes = 2 * nodes - 1;
                let cur = gauss_hermite(nodes).expect(f);
                if (cur - prev).abs() <= 1e-10 * cur.abs().max(1.0) {
                    return Ok(cur);
                }
                if nodes >= 481 {
                    return Err(Error::Numerical(format!(
                        "a_{n}({x}) did not converge by {nodes} nodes"
                    )));
                }
                prev = cur;
            }
        }
    }
}

/// The antiderivative b_n of coshⁿ normalized at 0, in closed form for
/// n ∈ {−1, −3, −5}:
///
/// ```text
/// b₋₁(x) = arctan(sinh x)
/// b₋₃(x) = ½[arctan(sinh x) + sinh x·sech²x]
/// b₋₅(x) = ⅛[3·arctan(sinh x) + 2·sinh x·sech⁴x + 3·sinh x·sech²x]
/// ```
pub fn b_n(x: f64, n: i32) -> Result<f64> {
    // sinh·sech² = tanh·sech and sinh·sech⁴ = tanh·sech³ avoid inf/inf for
    // large |x|.
    let gd = x.sinh().atan();
    let t = x.tanh();
    let s = sech(x);
    match n {
        -1 => Ok(gd),
        -3 => Ok(0.5 * (gd + t * s)),
        -5 => Ok(0.125 * (3.0 * gd + 2.0 * t * s * s * s + 3.0 * t * s)),
        _ => Err(Error::InvalidParameter(format!(
            "b_n has closed forms only for n in {{-1,-3,-5}}, got {n}"
        ))),
    }
}

/// Γ_{δ₀}(x) = (a₁ − a₋₁)/a₁ = 1 − a₋₁·e^{−β²x}.
pub fn gamma_delta0(beta: Temperature, x: f64) -> Result<f64> {
    let a1 = a_n(beta, x, 1)?;
    let am1 = a_n(beta, x, -1)?;
    Ok((a1 - am1) / a1)
}

/// Γ′_{δ₀}(x) = 2β²·a₋₃/a₁.
pub fn gamma_prime_delta0(beta: Temperature, x: f64) -> Result<f64> {
    let beta_sq = beta.beta() * beta.beta();
    let a1 = a_n(beta, x, 1)?;
    let am3 = a_n(beta, x, -3)?;
    Ok(2.0 * beta_sq * am3 / a1)
}

/// F_{δ₀}(x) = 2β²x·(a₁+a₋₃)/(a₁−a₋₁) − 2 for x ∈ (0,1]. The point x = 0 is
/// a 0/0 quotient and is refused.
pub fn big_f_delta0(beta: Temperature, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::InvalidParameter(
            "F_delta0 is a 0/0 quotient at x = 0; use x > 0".into(),
        ));
    }
    let beta_sq = beta.beta() * beta.beta();
    let a1 = a_n(beta, x, 1)?;
    let am1 = a_n(beta, x, -1)?;
    let am3 = a_n(beta, x, -3)?;
    Ok(2.0 * beta_sq * x * (a1 + am3) / (a1 - am1) - 2.0)
}

/// The bracket f_{δ₀}(x) whose sign is the sign of F′_{δ₀}(x); x ∈ (0,1].
pub fn f_delta0(beta: Temperature, x: f64) -> Result<f64> {
    let (group1, group2) = f_delta0_groups(beta, x)?;
    Ok(group1 + group2)
}

/// The two-group split of f_{δ₀}: returns
///
/// ```text
/// group1 = I  − r·(a₁+a₋₃)(a₁−a₋₁)
/// group2 = II + r·(a₁+a₋₃)(a₁−a₋₁),      r = 2β²x/(1+6β²x),
/// ```
///
/// with I = (a₁+a₋₃)(a₁−a₋₁) − 2β²x·a₋₃(a₁+a₋₃) and
/// II = −2β²x·(a₁−a₋₁)(6a₋₅−4a₋₃). Both are strictly positive on (0,1] and
/// they sum to f_{δ₀}.
pub fn f_delta0_groups(beta: Temperature, x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Err(Error::InvalidParameter(
            "f_delta0 is defined on (0,1]; got x <= 0".into(),
        ));
    }
    let bx = beta.beta() * beta.beta() * x;
    let a1 = a_n(beta, x, 1)?;
    let am1 = a_n(beta, x, -1)?;
    let am3 = a_n(beta, x, -3)?;
    let am5 = a_n(beta, x, -5)?;
    let sum13 = a1 + am3;
    let diff11 = a1 - am1;
    let i_term = sum13 * diff11 - 2.0 * bx * am3 * sum13;
    let ii_term = -2.0 * bx * diff11 * (6.0 * am5 - 4.0 * am3);
    let r = 2.0 * bx / (1.0 + 6.0 * bx);
    Ok((i_term - r * sum13 * diff11, ii_term + r * sum13 * diff11))
}

/// Left side of inequality `which` ∈ {1,2,3} at x (the three deterministic
/// cosh/sech/b_n expressions in the module docs). Even in x; vanishes to
/// sixth order at 0.
pub fn gip_expr(which: u8, x: f64) -> Result<f64> {
    let c = x.cosh();
    let s = sech(x);
    match which {
        1 => Ok(c - s - x * b_n(x, -1)?),
        2 => Ok(2.0 * c - s - s.powi(3) - 3.0 * x * b_n(x, -3)?),
        3 => Ok(c + 5.0 * s.powi(3) - 6.0 * s.powi(5)
            - 6.0 * x * (3.0 * b_n(x, -5)? - 2.0 * b_n(x, -3)?)),
        _ => Err(Error::InvalidParameter(format!(
            "gip_expr takes which in {{1,2,3}}, got {which}"
        ))),
    }
}

/// The auxiliary functions g₁..g₅.
///
/// * g₁, g₂ — the left sides of inequalities (1), (2), defined on all of ℝ.
/// * g₃(t) — the t = cosh x form of inequality (3) for t > 1:
///   `(4/3)·(t+5t⁻³−6t⁻⁵)/(√(t²−1)(t^{−2/3}+6t⁻⁴+t⁻²)) − arccosh t`.
/// * g₄(t) = 8t^{28/3} − 9t^{26/3} + 24t⁸ − 30t^{22/3} + 267t⁶ − 320t^{16/3}
///   − 312t⁴ + 312t^{10/3} − 180t² + 432 — the numerator of g₃′ (up to the
///   positive factor 1/(9t²√(t²−1)(t^{10/3}+t²+6)²)).
/// * g₅(t) = 2t^{28/3} + 6t⁸ − 3t^{22/3} + 69t⁶ − 53t^{16/3} − 51t⁴ +
///   78t^{10/3} + 36t² + 108 — the numerator of the derivative of the g₃
///   prefactor (up to 1/(3t²√(t²−1)(t^{10/3}+t²+6)²)).
pub fn g_i(v: f64, i: u8) -> Result<f64> {
    match i {
        1 => gip_expr(1, v),
        2 => gip_expr(2, v),
        3 => g3(v),
        4 => {
            if v < 0.0 {
                return Err(Error::InvalidParameter("g_4 needs t >= 0".into()));
            }
            Ok(poly_in_cbrt(
                v,
                &[
                    (28, 8.0),
                    (26, -9.0),
                    (24, 24.0),
                    (22, -30.0),
                    (18, 267.0),
                    (16, -320.0),
                    (12, -312.0),
                    (10, 312.0),
                    (6, -180.0),
                    (0, 432.0),
                ],
            ))
        }
        5 => {
            if v < 0.0 {
                return Err(Error::InvalidParameter("g_5 needs t >= 0".into()));
            }
            Ok(poly_in_cbrt(
                v,
                &[
                    (28, 2.0),
                    (24, 6.0),
                    (22, -3.0),
                    (18, 69.0),
                    (16, -53.0),
                    (12, -51.0),
                    (10, 78.0),
                    (6, 36.0),
                    (0, 108.0),
                ],
            ))
        }
        _ => Err(Error::InvalidParameter(format!(
            "g_i takes i in 1..=5, got {i}"
        ))),
    }
}

/// Evaluate Σ c_k·t^{k/3} via Horner in s = t^{1/3}.
fn poly_in_cbrt(t: f64, terms: &[(u32, f64)]) -> f64 {
    let s = t.cbrt();
    let max_pow = terms.iter().map(|&(p, _)| p).max().unwrap_or(0) as usize;
    let mut coeff = vec![0.0; max_pow + 1];
    for &(p, c) in terms {
        coeff[p as usize] += c;
    }
    let mut acc = 0.0;
    for &c in coeff.iter().rev() {
        acc = acc * s + c;
    }
    acc
}

/// g₃ via the cancellation-free rewrite: with e = t − 1,
///
/// ```text
/// t + 5t⁻³ − 6t⁻⁵ = (t²−1)(t⁴+t²+6)/t⁵       (exact factorization)
/// ```
///
/// so the fraction becomes (4/3)·√(e(t+1))·(t⁴+t²+6)/(t·(t^{10/3}+t²+6)),
/// and arccosh(t) = log1p(e + √(e(t+1))). Both forms stay fully accurate
/// down to t − 1 ≈ 1e-300, where the naive quotient loses every digit.
fn g3(t: f64) -> Result<f64> {
    if t <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "g_3 is defined for t > 1, got {t}"
        )));
    }
    let e = t - 1.0;
    let root = (e * (t + 1.0)).sqrt();
    let t2 = t * t;
    let t4 = t2 * t2;
    let s = t.cbrt();
    let t10_3 = s.powi(10);
    let frac = (4.0 / 3.0) * root * (t4 + t2 + 6.0) / (t * (t10_3 + t2 + 6.0));
    Ok(frac - (e + root).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn beta(b: f64) -> Temperature {
        Temperature::new(b).unwrap()
    }

    #[test]
    fn moments_at_zero_are_one() {
        for n in [-5, -3, -1, 0, 1, 2, 8] {
            assert_abs_diff_eq!(a_n(beta(0.75), 0.0, n).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn a1_is_the_exponential() {
        for &(b, x) in &[(0.5, 0.3), (0.75, 1.0), (1.0, 0.7)] {
            assert_abs_diff_eq!(
                a_n(beta(b), x, 1).unwrap(),
                (b * b * x).exp(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn a2_matches_the_double_angle_closed_form() {
        // cosh²y = (1 + cosh 2y)/2, so a₂ = (1 + e^{4β²x})/2.
        for &(b, x) in &[(0.6f64, 0.4f64), (1.0, 1.0)] {
            let expect = (1.0 + (4.0 * b * b * x).exp()) / 2.0;
            assert_abs_diff_eq!(a_n(beta(b), x, 2).unwrap(), expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn negative_moments_lie_in_unit_interval() {
        let v = a_n(beta(std::f64::consts::FRAC_1_SQRT_2), 1.0, -3).unwrap();
        assert!(v > 0.0 && v < 1.0, "a_-3 = {v}");
        assert!(a_n(beta(0.75), 0.5, 9).is_err());
        assert!(a_n(beta(0.75), 1.5, 1).is_err());
    }

    #[test]
    fn b_n_closed_forms() {
        assert_abs_diff_eq!(b_n(0.0, -1).unwrap(), 0.0);
        assert_abs_diff_eq!(b_n(0.0, -3).unwrap(), 0.0);
        assert_abs_diff_eq!(b_n(0.0, -5).unwrap(), 0.0);
        assert!(b_n(1.0, -2).is_err());

        // Antiderivative property: d/dx b_n = coshⁿ.
        let h = 1e-5;
        for &x in &[0.5, 1.0, 2.0] {
            for &n in &[-1, -3, -5] {
                let fd = (b_n(x + h, n).unwrap() - b_n(x - h, n).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(fd, sech(x).powi(-n), epsilon = 1e-9);
            }
        }

        // b₋₁ saturates at π/2.
        let b5 = b_n(5.0, -1).unwrap();
        assert!(b5 > 1.55 && b5 < std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(
            b_n(400.0, -1).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
        // Oddness.
        assert_abs_diff_eq!(b_n(1.3, -5).unwrap(), -b_n(-1.3, -5).unwrap());
    }

    #[test]
    fn gamma_delta0_base_values() {
        let b = beta(0.6);
        assert_abs_diff_eq!(gamma_delta0(b, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            gamma_prime_delta0(b, 0.0).unwrap(),
            2.0 * 0.36,
            epsilon = 1e-12
        );
        // Γ is a normalized difference of moments, so it lies in (0,1) for x > 0.
        let g = gamma_delta0(b, 0.8).unwrap();
        assert!(g > 0.0 && g < 1.0);
    }

    #[test]
    fn f_delta0_is_positive_and_f_big_increases() {
        for &b in &[std::f64::consts::FRAC_1_SQRT_2, 0.75, 1.0] {
            let temp = beta(b);
            let mut prev = f64::NEG_INFINITY;
            for i in 1..=40 {
                let x = i as f64 / 40.0;
                let big = big_f_delta0(temp, x).unwrap();
                assert!(big > prev, "F_delta0 not increasing at x={x}, beta={b}");
                prev = big;
                assert!(f_delta0(temp, x).unwrap() > 0.0);
                let (g1, g2) = f_delta0_groups(temp, x).unwrap();
                assert!(g1 > 0.0 && g2 > 0.0, "groups at x={x}: {g1}, {g2}");
            }
        }
        assert!(big_f_delta0(beta(0.75), 0.0).is_err());
        assert!(f_delta0(beta(0.75), 0.0).is_err());
    }

    #[test]
    fn gip_expressions_are_even_and_positive_away_from_zero() {
        for which in 1..=3u8 {
            for &x in &[0.5, 1.0, 2.0, 5.0] {
                let plus = gip_expr(which, x).unwrap();
                let minus = gip_expr(which, -x).unwrap();
                assert_abs_diff_eq!(plus, minus, epsilon = 1e-12 * plus.abs().max(1.0));
                assert!(plus > 0.0, "gip {which} at {x} = {plus}");
            }
        }
        assert_abs_diff_eq!(gip_expr(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn arctan_ratio_bound() {
        for &z in &[0.1f64, 1.0, 10.0, 100.0] {
            let lhs = z.atan() / z;
            let rhs = (1.0 + z * z).powf(-1.0 / 3.0);
            assert!(lhs <= rhs, "arctan bound fails at z={z}");
        }
    }

    #[test]
    fn g4_sign_pattern_brackets_the_critical_points() {
        assert!(g_i(1.25, 4).unwrap() > 0.0);
        assert!(g_i(1.26, 4).unwrap() < 0.0);
        assert!(g_i(1.5, 4).unwrap() < 0.0);
        assert!(g_i(1.51, 4).unwrap() > 0.0);
        // g₄(1) in exact arithmetic is 192; g₅(1) is 192 as well.
        assert_abs_diff_eq!(g_i(1.0, 4).unwrap(), 192.0, epsilon = 1e-9);
    }

    #[test]
    fn g5_is_positive_on_samples() {
        for &t in &[0.0, 0.5, 1.0, 1.3, 2.0, 10.0] {
            assert!(g_i(t, 5).unwrap() > 0.0, "g5({t})");
        }
    }

    #[test]
    fn g3_positive_with_accurate_near_one_behavior() {
        assert!(g_i(1.0, 3).is_err());
        for &t in &[1.001, 1.1, 1.2, 1.3, 1.5051, 2.0, 5.0] {
            assert!(g_i(t, 3).unwrap() > 0.0, "g3({t})");
        }
        // Leading behavior g₃(1+e) ≈ (√2/3)·√e for small e.
        let e = 1e-8f64;
        let expect = std::f64::consts::SQRT_2 / 3.0 * e.sqrt();
        let got = g_i(1.0 + e, 3).unwrap();
        assert!(
            (got - expect).abs() < 0.02 * expect,
            "g3 near 1: got {got}, expect ~{expect}"
        );
    }
}
