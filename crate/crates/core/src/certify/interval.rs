//! A small self-contained interval arithmetic kernel with outward rounding.
//!
//! Every elementary f64 operation is correctly rounded, so its true result
//! lies within one ulp of the computed one; widening each endpoint by one
//! ulp after every operation therefore yields rigorous enclosures. The
//! transcendental functions are built from argument reduction plus Taylor
//! series evaluated *in interval arithmetic* with explicit remainder
//! bounds, never from the libm implementations (whose error bounds are
//! unspecified). Accuracy is a secondary concern — enclosures here are a
//! few ulps wide, which is plenty for certificates with macroscopic
//! margins.

use std::f64::consts;

/// A closed interval [lo, hi] of finite f64 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Outward-round a raw (lo, hi) pair by one ulp each side.
fn out(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: lo.next_down(),
        hi: hi.next_up(),
    }
}

// The arithmetic here uses plain named methods rather than operator traits
// on purpose: every call site should read as interval arithmetic, and the
// operator sugar would invite mixing in bare f64 terms by accident.
#[allow(clippy::should_implement_trait)]
impl Interval {
    /// The degenerate interval [v, v].
    pub fn point(v: f64) -> Self {
        assert!(v.is_finite(), "interval endpoints must be finite");
        Self { lo: v, hi: v }
    }

    /// The interval [lo, hi].
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "bad interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// A 2-ulp enclosure of π.
    pub fn pi() -> Self {
        out(consts::PI, consts::PI)
    }

    /// A 2-ulp enclosure of ln 2.
    pub fn ln2() -> Self {
        out(consts::LN_2, consts::LN_2)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint (not outward rounded; informational only).
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    pub fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(self, o: Self) -> Self {
        out(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out(lo, hi)
    }

    /// Division; the divisor must not contain 0.
    pub fn div(self, o: Self) -> Self {
        assert!(!(o.lo <= 0.0 && o.hi >= 0.0), "division by interval containing 0");
        let c = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out(lo, hi)
    }

    /// Multiply by 2ⁿ (exact: no widening).
    pub fn scale2(self, n: i32) -> Self {
        let f = 2.0f64.powi(n);
        Self {
            lo: self.lo * f,
            hi: self.hi * f,
        }
    }

    /// [max(0,lo), hi] ∩ squares: square root, requiring lo ≥ 0.
    pub fn sqrt(self) -> Self {
        assert!(self.lo >= 0.0, "sqrt of an interval reaching below 0");
        let i = out(self.lo.sqrt(), self.hi.sqrt());
        Self {
            lo: i.lo.max(0.0),
            hi: i.hi,
        }
    }

    /// |X| as an interval.
    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Self {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    /// Largest magnitude in the interval.
    fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::point(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// eˣ, monotone over the endpoints.
    pub fn exp(self) -> Self {
        Self {
            lo: exp_scalar(self.lo).lo,
            hi: exp_scalar(self.hi).hi,
        }
    }

    /// ln x for x > 0.
    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0, "ln of an interval reaching below 0");
        Self {
            lo: ln_scalar(self.lo).lo,
            hi: ln_scalar(self.hi).hi,
        }
    }

    /// sinh, monotone.
    pub fn sinh(self) -> Self {
        Self {
            lo: sinh_scalar(self.lo).lo,
            hi: sinh_scalar(self.hi).hi,
        }
    }

    /// cosh; even, with exact minimum 1 at 0.
    pub fn cosh(self) -> Self {
        if self.lo >= 0.0 {
            Self {
                lo: cosh_scalar(self.lo).lo,
                hi: cosh_scalar(self.hi).hi,
            }
        } else if self.hi <= 0.0 {
            self.neg().cosh()
        } else {
            Self {
                lo: 1.0, // cosh ≥ 1 everywhere, attained inside
                hi: cosh_scalar(self.lo).hi.max(cosh_scalar(self.hi).hi),
            }
        }
    }

    /// arctan, monotone.
    pub fn atan(self) -> Self {
        Self {
            lo: atan_scalar(self.lo).lo,
            hi: atan_scalar(self.hi).hi,
        }
    }

    /// arccosh t = ln(t + √(t²−1)) for t > 1.
    pub fn acosh(self) -> Self {
        assert!(self.lo > 1.0, "acosh needs t > 1");
        let one = Interval::point(1.0);
        self.add(self.mul(self).sub(one).sqrt()).ln()
    }
}

/// Interval Horner sum Σ coeffs[k]·xᵏ where each coefficient is given as an
/// exact f64 pair (1-ulp widened inside).
fn horner(x: Interval, coeffs: &[f64]) -> Interval {
    let mut acc = Interval::point(0.0);
    for &c in coeffs.iter().rev() {
        acc = acc.mul(x).add(out(c, c));
    }
    acc
}

/// 1/k! for k ≤ 14 — the factorials are exact in f64, so the division is
/// correctly rounded and the 1-ulp widening in `horner` covers it.
fn inv_factorials(n: usize) -> Vec<f64> {
    let mut f = 1.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                f *= k as f64;
            }
            1.0 / f
        })
        .collect()
}

/// Enclosure of eᵛ: v = n·ln2 + r with |r| ≤ 0.35, eʳ by 14-term Taylor
/// with a rigorous tail bound, then an exact 2ⁿ scale.
fn exp_scalar(v: f64) -> Interval {
    let n = (v / consts::LN_2).round();
    let r = Interval::point(v).sub(Interval::ln2().mul(Interval::point(n)));
    debug_assert!(r.mag() < 0.4, "exp argument reduction failed: r = {r:?}");
    let series = horner(r, &inv_factorials(14));
    // Tail: Σ_{k≥15} rᵏ/k! with |r| ≤ 0.4 is below |r|¹⁵/15!·(1/(1−0.4/16)).
    let t = r.mag().powi(15) / 1.307_674_368_000e12 * 1.05;
    let tail = out(-t, t);
    series.add(tail).scale2(n as i32)
}

/// Enclosure of ln v for v > 0: v = 2ⁿ·m with m ∈ [√½, √2), and
/// ln m = 2·atanh((m−1)/(m+1)) by series; m−1 is exact by Sterbenz.
fn ln_scalar(v: f64) -> Interval {
    assert!(v > 0.0 && v.is_finite());
    let (mut m, mut n) = (v, 0i32);
    while m >= consts::SQRT_2 {
        m *= 0.5; // exact
        n += 1;
    }
    while m < consts::FRAC_1_SQRT_2 {
        m *= 2.0; // exact
        n -= 1;
    }
    let y = Interval::point(m - 1.0).div(Interval::point(m).add(Interval::point(1.0)));
    // atanh(y) = y·Σ_{k≤10} y²ᵏ/(2k+1) + tail, |y| ≤ 0.1716.
    let coeffs: Vec<f64> = (0..=10).map(|k| 1.0 / (2 * k + 1) as f64).collect();
    let series = horner(y.mul(y), &coeffs).mul(y);
    let t = y.mag().powi(23) / 23.0 * 1.05;
    let atanh = series.add(out(-t, t));
    Interval::ln2()
        .mul(Interval::point(n as f64))
        .add(atanh.scale2(1))
}

/// Enclosure of sinh v: Taylor below 0.25, (eᵛ − e⁻ᵛ)/2 above.
fn sinh_scalar(v: f64) -> Interval {
    if v.abs() < 0.25 {
        let x = Interval::point(v);
        let x2 = x.mul(x);
        // Σ_{k≤6} x²ᵏ/(2k+1)! then × x; tail ≤ |x|¹⁵/15!·1.01.
        let coeffs: Vec<f64> = {
            let mut f = 1.0f64;
            (0..=6)
                .map(|k| {
                    if k > 0 {
                        f *= (2 * k) as f64 * (2 * k + 1) as f64;
                    }
                    1.0 / f
                })
                .collect()
        };
        let t = x.mag().powi(15) / 1.307_674_368_000e12 * 1.01;
        horner(x2, &coeffs).mul(x).add(out(-t, t))
    } else {
        exp_scalar(v).sub(exp_scalar(-v)).scale2(-1)
    }
}

/// Enclosure of cosh v ≥ 1.
fn cosh_scalar(v: f64) -> Interval {
    let a = v.abs();
    let i = if a < 0.25 {
        let x2 = Interval::point(a).powi(2);
        let coeffs: Vec<f64> = {
            let mut f = 1.0f64;
            (0..=7)
                .map(|k| {
                    if k > 0 {
                        f *= (2 * k - 1) as f64 * (2 * k) as f64;
                    }
                    1.0 / f
                })
                .collect()
        };
        let t = a.powi(16) / 2.092_278_988_8e13 * 1.01;
        horner(x2, &coeffs).add(out(-t, t))
    } else {
        exp_scalar(a).add(exp_scalar(-a)).scale2(-1)
    };
    Interval {
        lo: i.lo.max(1.0),
        hi: i.hi,
    }
}

/// Enclosure of arctan v: three halvings y ← y/(1+√(1+y²)) bring the
/// argument below tan(π/16) < 0.199, then a 21-term alternating series
/// whose tail is below |y|²³/23.
fn atan_scalar(v: f64) -> Interval {
    if v == 0.0 {
        return Interval::point(0.0);
    }
    if v < 0.0 {
        return atan_scalar(-v).neg();
    }
    let one = Interval::point(1.0);
    let mut y = Interval::point(v);
    for _ in 0..3 {
        y = y.div(one.add(one.add(y.mul(y)).sqrt()));
    }
    debug_assert!(y.mag() < 0.2, "atan reduction failed: {y:?}");
    let coeffs: Vec<f64> = (0..=10)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64)
        .collect();
    let series = horner(y.mul(y), &coeffs).mul(y);
    let t = y.mag().powi(23) / 23.0;
    series.add(out(-t, t)).scale2(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The enclosure must contain the (correctly rounded) f64 reference and
    /// be tight to ~1e-13 relative.
    fn check(i: Interval, reference: f64) {
        let slack = 2.0 * reference.abs().max(1.0) * f64::EPSILON;
        assert!(
            i.lo <= reference + slack && i.hi >= reference - slack,
            "[{:.17e}, {:.17e}] misses {reference:.17e}",
            i.lo,
            i.hi
        );
        assert!(
            i.width() <= 1e-13 * reference.abs().max(1.0),
            "enclosure too wide: {:.3e}",
            i.width()
        );
    }

    #[test]
    fn arithmetic_is_outward() {
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(-3.0, 4.0);
        let p = a.mul(b);
        assert!(p.lo <= -6.0 && p.hi >= 8.0);
        let q = Interval::point(1.0).div(Interval::new(3.0, 3.0));
        assert!(q.contains(1.0 / 3.0));
        assert!(q.lo < q.hi);
        let s = Interval::new(2.0, 2.0).sqrt();
        check(s, consts::SQRT_2);
    }

    #[test]
    fn exponential_and_log() {
        check(Interval::point(1.0).exp(), consts::E);
        check(Interval::point(-3.0).exp(), 0.049787068367863944);
        check(Interval::point(5.0).exp(), 148.4131591025766);
        check(Interval::point(2.0).ln(), consts::LN_2);
        check(Interval::point(10.0).ln(), consts::LN_10);
        // round trip
        let x = Interval::point(0.37).exp().ln();
        assert!(x.contains(0.37));
    }

    #[test]
    fn hyperbolics() {
        check(Interval::point(1.0).sinh(), 1.1752011936438014);
        check(Interval::point(1.0).cosh(), 1.5430806348152437);
        check(Interval::point(0.1).sinh(), 0.10016675001984403);
        check(Interval::point(0.1).cosh(), 1.0050041680558035);
        check(Interval::point(6.0).cosh(), 201.7156361224559);
        assert!(Interval::new(-1.0, 2.0).cosh().contains(1.0));
        assert!(Interval::point(-0.5).sinh().hi < 0.0);
    }

    #[test]
    fn arctangent_and_acosh() {
        check(Interval::point(1.0).atan(), consts::FRAC_PI_4);
        check(Interval::point(100.0).atan(), 1.5607966601082313);
        check(Interval::point(0.05).atan(), 0.04995839572194276);
        check(Interval::point(-1.0).atan(), -consts::FRAC_PI_4);
        check(Interval::point(1.26).acosh(), 1.26f64.acosh());
        check(Interval::point(2.0).acosh(), 2.0f64.acosh());
    }

    #[test]
    fn pi_enclosure_brackets_pi() {
        let pi = Interval::pi();
        // π itself lies strictly inside a 2-ulp bracket of the f64 constant.
        assert!(pi.lo < consts::PI && consts::PI < pi.hi);
        assert!(pi.width() < 1e-15);
    }
}
