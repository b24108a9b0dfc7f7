//! The registry of machine-checked claims backing the tail-side analysis.
//!
//! Each claim is packaged as a [`Certificate`] whose verdict is produced by
//! exact rational arithmetic (polynomial identities, Sturm root counts,
//! interval evaluation at enclosed algebraic points) or outward-rounded
//! interval arithmetic (the transcendental bracket bounds and the even
//! comparison functions E₁, E₂, E₃ of [`super::gip`]). A failed sufficient
//! condition yields `Inconclusive`; only an exact disproof (a false
//! identity, a wrong root count, a definitely wrong sign) yields `Refuted`.
//!
//! The polynomial payloads live in the variable s = t^(1/3), which clears
//! the fractional powers of t from the derivative numerators g4 and g5 of
//! [`crate::closedform::g_i`]; since t ↦ s is an increasing bijection,
//! root counts and signs transfer directly between the two variables.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::gip::{
    bisect_positive, series_bound, tail_bound, tail_crossover, BisectOutcome, DEPTH_CAP,
    SERIES_EDGE,
};
use super::interval::Interval;
use super::poly::{ratio, RationalPolynomial};
use super::sturm::{count_roots, Bound};
use super::{Certificate, Verdict};

/// Numerator of the first even ratio bound, in s = t^(1/3).
pub fn ratio1_numerator() -> RationalPolynomial {
    RationalPolynomial::from_sparse(&[(0, 3), (4, 1), (6, -6), (10, -4), (12, 6)])
}

/// Its cofactor against (s−1)²; all coefficients are positive.
pub fn ratio1_cofactor() -> RationalPolynomial {
    RationalPolynomial::from_ints(&[3, 6, 9, 12, 16, 20, 18, 16, 14, 12, 6])
}

/// Numerator of the second even ratio bound, in s = t^(1/3).
pub fn ratio2_numerator() -> RationalPolynomial {
    RationalPolynomial::from_sparse(&[(0, 6), (6, -5), (10, 7), (12, -14), (16, -10), (18, 16)])
}

pub fn ratio2_cofactor() -> RationalPolynomial {
    RationalPolynomial::from_ints(&[
        6, 12, 18, 24, 30, 36, 37, 38, 39, 40, 48, 56, 50, 44, 38, 32, 16,
    ])
}

/// (s − 1)².
pub fn square_factor() -> RationalPolynomial {
    RationalPolynomial::from_ints(&[1, -2, 1])
}

/// Numerator of g3′ in s = t^(1/3) (g4 of [`crate::closedform::g_i`]).
pub fn g4s() -> RationalPolynomial {
    RationalPolynomial::from_sparse(&[
        (0, 432),
        (6, -180),
        (10, 312),
        (12, -312),
        (16, -320),
        (18, 267),
        (22, -30),
        (24, 24),
        (26, -9),
        (28, 8),
    ])
}

/// Numerator of the prefactor derivative in s (g5 of
/// [`crate::closedform::g_i`]).
pub fn g5s() -> RationalPolynomial {
    RationalPolynomial::from_sparse(&[
        (0, 108),
        (6, 36),
        (10, 78),
        (12, -51),
        (16, -53),
        (18, 69),
        (22, -3),
        (24, 6),
        (28, 2),
    ])
}

/// Exact equality of two polynomials.
pub fn verify_identity(p: &RationalPolynomial, q: &RationalPolynomial) -> bool {
    (p - q).is_zero()
}

/// Rational enclosure of √x for x ≥ 0, exact when x is a perfect square.
pub fn rational_sqrt(x: &BigRational) -> (BigRational, BigRational) {
    assert!(!x.is_negative());
    let (sn, sd) = (x.numer().sqrt(), x.denom().sqrt());
    if &(&sn * &sn) == x.numer() && &(&sd * &sd) == x.denom() {
        let r = BigRational::new(sn, sd);
        return (r.clone(), r);
    }
    let guess = x.to_f64().expect("finite rational").sqrt();
    refine_enclosure(x, guess, 2)
}

/// Rational enclosure of x^(1/3) for x > 0, exact for perfect cubes.
pub fn rational_cbrt(x: &BigRational) -> (BigRational, BigRational) {
    assert!(x.is_positive());
    let (cn, cd) = (x.numer().cbrt(), x.denom().cbrt());
    if &(&cn * &cn * &cn) == x.numer() && &(&cd * &cd * &cd) == x.denom() {
        let r = BigRational::new(cn, cd);
        return (r.clone(), r);
    }
    let guess = x.to_f64().expect("finite rational").cbrt();
    refine_enclosure(x, guess, 3)
}

/// Shared widening loop: start from an f64 guess of the n-th root and push
/// the bounds outward until the exact power comparison brackets x.
fn refine_enclosure(x: &BigRational, guess: f64, n: u32) -> (BigRational, BigRational) {
    let pow = |r: &BigRational| -> BigRational {
        let mut acc = BigRational::from(BigInt::from(1));
        for _ in 0..n {
            acc *= r;
        }
        acc
    };
    let shrink = ratio(999_999_999_999, 1_000_000_000_000);
    let grow = ratio(1_000_000_000_001, 1_000_000_000_000);
    let mut lo = BigRational::from_float(guess * (1.0 - 1e-13)).expect("finite guess");
    let mut hi = BigRational::from_float(guess * (1.0 + 1e-13)).expect("finite guess");
    if lo.is_negative() {
        lo = BigRational::zero();
    }
    while pow(&lo) > *x {
        lo *= &shrink;
    }
    while pow(&hi) < *x {
        hi *= &grow;
    }
    (lo, hi)
}

/// Tight f64 interval containing an exact rational, verified by exact
/// comparison rather than by trusting the conversion's rounding.
pub fn enclose_rational(x: &BigRational) -> Interval {
    let f = x.to_f64().expect("rational out of f64 range");
    assert!(f.is_finite());
    let (mut lo, mut hi) = (f.next_down(), f.next_up());
    while BigRational::from_float(lo).is_none_or(|r| r > *x) {
        lo = lo.next_down();
    }
    while BigRational::from_float(hi).is_none_or(|r| r < *x) {
        hi = hi.next_up();
    }
    Interval::new(lo, hi)
}

/// Exact rational lower bound for the increasing prefactor
///
/// ```text
///   Q(t) = √(t²−1)·(t⁴+t²+6) / (t⁵·(t^(−2/3) + 6t⁻⁴ + t⁻²)),
/// ```
///
/// assembled from one-sided enclosures of the two algebraic roots; every
/// factor is positive, so rounding each the right way is sound.
pub fn q_prefactor_lower(t: &BigRational) -> BigRational {
    assert!(*t > BigRational::from(BigInt::from(1)));
    let t2 = t * t;
    let t4 = &t2 * &t2;
    let sqrt_lo = rational_sqrt(&(&t2 - ratio(1, 1))).0;
    let numer = &t4 + &t2 + ratio(6, 1);
    let cbrt_hi = rational_cbrt(&(ratio(1, 1) / &t2)).1;
    let denom = t * &t4 * (cbrt_hi + ratio(6, 1) / &t4 + ratio(1, 1) / &t2);
    sqrt_lo * numer / denom
}

fn timed(id: &str, claim: String, f: impl FnOnce() -> (Verdict, Value)) -> Certificate {
    let t0 = std::time::Instant::now();
    let (verdict, evidence) = f();
    Certificate {
        id: id.to_string(),
        claim,
        verdict,
        evidence,
        ms: t0.elapsed().as_millis() as u64,
    }
}

fn ratio_factorization_with(
    id: &str,
    claim: String,
    numerator: RationalPolynomial,
    cofactor: RationalPolynomial,
) -> Certificate {
    timed(id, claim, || {
        let product = &square_factor() * &cofactor;
        let identity = verify_identity(&product, &numerator);
        let positive = cofactor.coeffs().iter().all(BigRational::is_positive);
        let verdict = if identity && positive {
            Verdict::Proved
        } else {
            Verdict::Refuted
        };
        (
            verdict,
            json!({
                "identity_holds": identity,
                "cofactor_degree": cofactor.degree(),
                "cofactor_coefficients_positive": positive,
            }),
        )
    })
}

fn ratio_factorization(which: u8) -> Certificate {
    let (num, cof, text) = match which {
        1 => (
            ratio1_numerator(),
            ratio1_cofactor(),
            "6s^12 - 4s^10 - 6s^6 + s^4 + 3",
        ),
        2 => (
            ratio2_numerator(),
            ratio2_cofactor(),
            "16s^18 - 10s^16 - 14s^12 + 7s^10 - 5s^6 + 6",
        ),
        _ => unreachable!(),
    };
    ratio_factorization_with(
        &format!("ratio{which}-factorization"),
        format!(
            "{text} = (s-1)^2 * c(s) with every coefficient of c positive, \
             hence >= 0 for s >= 0 with equality only at s = 1"
        ),
        num,
        cof,
    )
}

fn g4_root_count() -> Certificate {
    timed(
        "g4-root-count",
        "the numerator of g3', rewritten in s = t^(1/3), has exactly 2 distinct \
         roots with s > 1 (Sturm count on (1, inf))"
            .to_string(),
        || match count_roots(&g4s(), &Bound::Finite(ratio(1, 1)), &Bound::PosInf) {
            Ok(n) => {
                let verdict = if n == 2 { Verdict::Proved } else { Verdict::Refuted };
                (
                    verdict,
                    json!({ "distinct_roots": n, "value_at_1": g4s().eval(&ratio(1, 1)).to_string() }),
                )
            }
            Err(e) => (Verdict::Inconclusive, json!({ "error": e.to_string() })),
        },
    )
}

fn g5_root_count() -> Certificate {
    timed(
        "g5-root-count",
        "the prefactor-derivative numerator, rewritten in s = t^(1/3), has no \
         roots with s >= 0 and equals 108 at s = 0, hence is positive on [0, inf)"
            .to_string(),
        || {
            let at0 = g5s().eval(&BigRational::zero());
            match count_roots(&g5s(), &Bound::Finite(BigRational::zero()), &Bound::PosInf) {
                Ok(n) => {
                    let verdict = if n == 0 && at0 == ratio(108, 1) {
                        Verdict::Proved
                    } else {
                        Verdict::Refuted
                    };
                    (
                        verdict,
                        json!({ "distinct_roots": n, "value_at_0": at0.to_string() }),
                    )
                }
                Err(e) => (Verdict::Inconclusive, json!({ "error": e.to_string() })),
            }
        },
    )
}

fn g4_sign_pattern() -> Certificate {
    timed(
        "g4-sign-pattern",
        "g3' has sign +, -, -, + at t = 5/4, 63/50, 3/2, 151/100; combined with \
         the count of 2 roots this localizes them to (5/4, 63/50) and (3/2, 151/100)"
            .to_string(),
        || {
            let points = [(5i64, 4i64, 1i8), (63, 50, -1), (3, 2, -1), (151, 100, 1)];
            let p = g4s();
            let mut rows = Vec::new();
            let mut all_match = true;
            let mut definite = true;
            for (n, d, expect) in points {
                let t = ratio(n, d);
                let (slo, shi) = rational_cbrt(&t);
                let (lo, hi) = p.eval_interval(&slo, &shi);
                let sign: i8 = if lo.is_positive() {
                    1
                } else if hi.is_negative() {
                    -1
                } else {
                    definite = false;
                    0
                };
                all_match &= sign == expect;
                rows.push(json!({
                    "t": format!("{n}/{d}"),
                    "sign": sign,
                    "expected": expect,
                }));
            }
            let verdict = if all_match {
                Verdict::Proved
            } else if definite {
                Verdict::Refuted
            } else {
                Verdict::Inconclusive
            };
            (verdict, json!({ "points": rows }))
        },
    )
}

fn g3_bracket_bounds() -> Certificate {
    timed(
        "g3-bracket-bounds",
        "(4/3)Q(5/4) > arccosh(63/50) and (4/3)Q(3/2) > arccosh(151/100) for the \
         increasing prefactor Q of g3; with g4-root-count, g4-sign-pattern and \
         g5-root-count this proves g3 > 0 on (1, inf)"
            .to_string(),
        || {
            let bracket = |qn: i64, qd: i64, an: i64, ad: i64| -> (f64, bool) {
                let q_lo = q_prefactor_lower(&ratio(qn, qd)) * ratio(4, 3);
                let lhs = enclose_rational(&q_lo);
                let rhs = enclose_rational(&ratio(an, ad)).acosh();
                let margin = lhs.sub(rhs);
                (margin.lo(), margin.lo() > 0.0)
            };
            let (m1, ok1) = bracket(5, 4, 63, 50);
            let (m2, ok2) = bracket(3, 2, 151, 100);
            let verdict = if ok1 && ok2 {
                Verdict::Proved
            } else {
                Verdict::Inconclusive
            };
            (
                verdict,
                json!({
                    "bracket_1": { "q_at": "5/4", "arccosh_at": "63/50", "margin_low": m1 },
                    "bracket_2": { "q_at": "3/2", "arccosh_at": "151/100", "margin_low": m2 },
                    "depends_on": ["g4-root-count", "g4-sign-pattern", "g5-root-count"],
                }),
            )
        },
    )
}

fn gip_near(which: u8) -> Certificate {
    let x0 = tail_crossover(which);
    timed(
        &format!("gip{which}-near"),
        format!(
            "E{which}(x) > 0 on (0, {x0}]: exact series factor on \
             (0, {SERIES_EDGE}], adaptive interval bisection on [{SERIES_EDGE}, {x0}]"
        ),
        || {
            let series = match series_bound(which) {
                Ok(s) => s,
                Err(e) => return (Verdict::Inconclusive, json!({ "error": e.to_string() })),
            };
            if !series.factor.is_positive() {
                return (
                    Verdict::Inconclusive,
                    json!({ "series_factor": series.factor.to_string() }),
                );
            }
            match bisect_positive(which, SERIES_EDGE, x0, DEPTH_CAP) {
                BisectOutcome::Proved { boxes, max_depth } => (
                    Verdict::Proved,
                    json!({
                        "series_order": series.order,
                        "series_factor": series.factor.to_string(),
                        "series_factor_approx": series.factor.to_f64(),
                        "series_edge": SERIES_EDGE,
                        "boxes": boxes,
                        "max_depth": max_depth,
                    }),
                ),
                BisectOutcome::Stuck { at, depth, value } => {
                    let verdict = if value.1 < 0.0 {
                        Verdict::Refuted
                    } else {
                        Verdict::Inconclusive
                    };
                    (
                        verdict,
                        json!({ "stuck_box": at, "depth": depth, "enclosure": value }),
                    )
                }
            }
        },
    )
}

fn gip_tail(which: u8) -> Certificate {
    let x0 = tail_crossover(which);
    timed(
        &format!("gip{which}-tail"),
        format!(
            "E{which}(x) > 0 on [{x0}, inf): the explicit minorant is positive \
             with nonnegative, increasing slope at {x0}"
        ),
        || {
            let t = tail_bound(which, x0);
            let verdict = if t.value_low > 0.0 && t.slope_low >= 0.0 {
                Verdict::Proved
            } else {
                Verdict::Inconclusive
            };
            (
                verdict,
                json!({
                    "x0": x0,
                    "minorant_value_low": t.value_low,
                    "minorant_slope_low": t.slope_low,
                }),
            )
        },
    )
}

/// Produce the full certificate suite in a fixed order.
pub fn run_all() -> Vec<Certificate> {
    let mut certs = vec![
        ratio_factorization(1),
        ratio_factorization(2),
        g4_root_count(),
        g5_root_count(),
        g4_sign_pattern(),
        g3_bracket_bounds(),
    ];
    for which in 1..=3u8 {
        certs.push(gip_near(which));
        certs.push(gip_tail(which));
    }
    certs
}
