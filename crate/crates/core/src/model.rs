//! Core domain types: inverse temperature, the SK mixture function
//! ξ(x) = β²x², and atomic probability measures on [0,1].
//!
//! An [`AtomicMeasure`] is the finite-RSB order parameter: a probability
//! measure `μ = Σ_i w_i δ_{q_i}` with strictly increasing atom locations
//! `q_0 < q_1 < … < q_k` in `[0,1]` and positive weights summing to one.
//! Its distribution function `α_μ(u) = μ([0,u])` is a right-continuous step
//! function; everything downstream (the PDE recursion, the criterion
//! functionals, the variational value) is driven by these two objects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|Σ w_i − 1|` accepted at validation.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Minimum separation between distinct atom locations; anything closer is
/// rejected at validation and must be merged by the caller first.
pub const MIN_ATOM_GAP: f64 = 1e-9;

/// Inverse temperature β of the SK model. Always strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Temperature {
    beta: f64,
}

impl Temperature {
    /// Construct a validated inverse temperature.
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and > 0, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    /// The raw value of β.
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The SK mixture function ξ(x) = β²x² with derivatives ξ′(x) = 2β²x and
/// ξ″(x) = 2β². Only the two-spin specialization is implemented; the type is
/// the extension point if mixed p-spin interactions were ever needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mixture {
    beta: f64,
}

impl Mixture {
    /// SK mixture at inverse temperature β.
    pub fn sk(beta: Temperature) -> Self {
        Self { beta: beta.beta() }
    }

    /// The inverse temperature β.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// β², the coefficient of x² in ξ.
    pub fn beta_sq(&self) -> f64 {
        self.beta * self.beta
    }

    /// ξ(x) = β²x².
    pub fn xi(&self, x: f64) -> f64 {
        self.beta_sq() * x * x
    }

    /// ξ′(x) = 2β²x.
    pub fn xi_prime(&self, x: f64) -> f64 {
        2.0 * self.beta_sq() * x
    }

    /// ξ″(x) = 2β² (constant for SK).
    pub fn xi_second(&self, _x: f64) -> f64 {
        2.0 * self.beta_sq()
    }
}

/// Evaluate (ξ(x), ξ′(x), ξ″(x)) with a domain check on x ∈ [0,1].
pub fn xi_eval(mix: &Mixture, x: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "xi_eval requires x in [0,1], got {x}"
        )));
    }
    Ok((mix.xi(x), mix.xi_prime(x), mix.xi_second(x)))
}

/// One atom of an atomic measure: location `q` and weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Location in [0,1].
    pub q: f64,
    /// Positive weight.
    pub w: f64,
}

/// A finite atomic probability measure on [0,1] with sorted, well-separated
/// atoms. Immutable after construction; all accessors are read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

/// Wire form of a measure before validation; lets serde reject invalid files
/// with a proper error instead of constructing a broken value.
#[derive(Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure> for AtomicMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        AtomicMeasure::new(raw.atoms)
    }
}

impl AtomicMeasure {
    /// Build a validated measure. Atoms are sorted by location first; all
    /// other invariant violations are reported as an error.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort_by(|a, b| a.q.total_cmp(&b.q));
        let violations = measure_validate(&atoms);
        if !violations.is_empty() {
            return Err(Error::InvalidMeasure(violations.join("; ")));
        }
        Ok(Self { atoms })
    }

    /// The Dirac measure δ₀: a single atom at 0 with full mass.
    pub fn delta0() -> Self {
        Self {
            atoms: vec![Atom { q: 0.0, w: 1.0 }],
        }
    }

    /// The Dirac measure δ_q at an arbitrary location.
    pub fn dirac(q: f64) -> Result<Self> {
        Self::new(vec![Atom { q, w: 1.0 }])
    }

    /// The sorted atom list.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of RSB levels: a (k+1)-atom measure is a k-RSB order parameter.
    pub fn rsb_levels(&self) -> usize {
        self.atoms.len() - 1
    }

    /// Largest atom location (the support endpoint estimate υ).
    pub fn support_end(&self) -> f64 {
        self.atoms.last().map(|a| a.q).unwrap_or(0.0)
    }

    /// Distribution function α_μ(u) = μ([0,u]) = Σ_{q_i ≤ u} w_i,
    /// right-continuous in u. No domain check; see [`measure_cdf`] for the
    /// checked variant.
    pub fn alpha(&self, u: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.q <= u)
            .map(|a| a.w)
            .sum()
    }

    /// Left limit μ([0,u)) = Σ_{q_i < u} w_i, i.e. the mass strictly below u.
    pub fn alpha_left(&self, u: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.q < u)
            .map(|a| a.w)
            .sum()
    }

    /// The exact value of ∫₀¹ α_μ(s)·s ds for the step function α_μ:
    /// each atom contributes w_i·(1 − q_i²)/2. The variational value uses
    /// this against ξ″ = 2β².
    pub fn integral_alpha_s(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.w * (1.0 - a.q * a.q) / 2.0)
            .sum()
    }

    /// Return a simplified copy: weights below `w_tol` are dropped, adjacent
    /// atoms closer than `q_tol` are merged at their weight-averaged
    /// location, and the total mass is renormalized to 1. Used by the
    /// optimizer before reporting a result.
    pub fn simplified(&self, q_tol: f64, w_tol: f64) -> Result<Self> {
        let mut kept: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for &a in &self.atoms {
            if a.w < w_tol {
                continue;
            }
            match kept.last_mut() {
                Some(last) if a.q - last.q < q_tol => {
                    let w = last.w + a.w;
                    last.q = (last.q * last.w + a.q * a.w) / w;
                    last.w = w;
                }
                _ => kept.push(a),
            }
        }
        if kept.is_empty() {
            // All weight fell below the threshold; fall back to the heaviest
            // original atom rather than an empty (invalid) measure.
            let heaviest = self
                .atoms
                .iter()
                .max_by(|a, b| a.w.total_cmp(&b.w))
                .copied()
                .expect("measure has at least one atom");
            kept.push(Atom {
                q: heaviest.q,
                w: 1.0,
            });
        }
        let mass: f64 = kept.iter().map(|a| a.w).sum();
        for a in &mut kept {
            a.w /= mass;
        }
        Self::new(kept)
    }
}

/// Check the invariants of a sorted atom list and return one message per
/// violation (empty list ⇔ valid). Reports rather than throws so callers can
/// surface every problem at once.
pub fn measure_validate(atoms: &[Atom]) -> Vec<String> {
    let mut violations = Vec::new();
    if atoms.is_empty() {
        violations.push("measure has no atoms".to_string());
        return violations;
    }
    for a in atoms {
        if !a.q.is_finite() || !(0.0..=1.0).contains(&a.q) {
            violations.push(format!("atom location {} outside [0,1]", a.q));
        }
        if !a.w.is_finite() || a.w <= 0.0 {
            violations.push(format!("atom weight {} not strictly positive", a.w));
        }
    }
    for pair in atoms.windows(2) {
        if pair[1].q < pair[0].q {
            violations.push("atom locations not sorted".to_string());
        } else if pair[1].q - pair[0].q < MIN_ATOM_GAP {
            violations.push(format!(
                "duplicate atom location (gap {:.3e} below {:.0e})",
                pair[1].q - pair[0].q,
                MIN_ATOM_GAP
            ));
        }
    }
    let mass: f64 = atoms.iter().map(|a| a.w).sum();
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        violations.push(format!("total mass {mass} differs from 1"));
    }
    violations
}

/// Distribution function α_μ(u) with a domain check on u ∈ [0,1].
pub fn measure_cdf(mu: &AtomicMeasure, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "measure_cdf requires u in [0,1], got {u}"
        )));
    }
    Ok(mu.alpha(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_atom() -> AtomicMeasure {
        AtomicMeasure::new(vec![Atom { q: 0.0, w: 0.6 }, Atom { q: 0.3, w: 0.4 }]).unwrap()
    }

    #[test]
    fn temperature_rejects_nonpositive() {
        assert!(Temperature::new(0.0).is_err());
        assert!(Temperature::new(-1.0).is_err());
        assert!(Temperature::new(f64::NAN).is_err());
        assert!(Temperature::new(0.75).is_ok());
    }

    #[test]
    fn xi_eval_matches_sk_closed_forms() {
        let mix = Mixture::sk(Temperature::new(1.0).unwrap());
        assert_eq!(xi_eval(&mix, 1.0).unwrap(), (1.0, 2.0, 2.0));

        let mix = Mixture::sk(Temperature::new(std::f64::consts::FRAC_1_SQRT_2).unwrap());
        let (v, d1, d2) = xi_eval(&mix, 0.0).unwrap();
        assert_abs_diff_eq!(v, 0.0);
        assert_abs_diff_eq!(d1, 0.0);
        assert_abs_diff_eq!(d2, 1.0, epsilon = 1e-15);

        let mix = Mixture::sk(Temperature::new(0.75).unwrap());
        let (v, d1, d2) = xi_eval(&mix, 0.4).unwrap();
        assert_abs_diff_eq!(v, 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(d1, 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(d2, 1.125, epsilon = 1e-15);

        assert!(xi_eval(&mix, 1.5).is_err());
    }

    #[test]
    fn xi_prime_matches_finite_difference() {
        let mix = Mixture::sk(Temperature::new(0.83).unwrap());
        let h = 1e-6;
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let fd = (mix.xi(x + h) - mix.xi(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(fd, mix.xi_prime(x), epsilon = 1e-8);
        }
    }

    #[test]
    fn cdf_is_a_right_continuous_step_function() {
        let mu = two_atom();
        assert_eq!(measure_cdf(&AtomicMeasure::delta0(), 0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(measure_cdf(&mu, 0.2).unwrap(), 0.6);
        // Right-continuity: the atom at 0.3 is included at u = 0.3.
        assert_abs_diff_eq!(measure_cdf(&mu, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(mu.alpha_left(0.3), 0.6);
        assert_eq!(measure_cdf(&mu, 1.0).unwrap(), 1.0);
        assert!(measure_cdf(&mu, 1.1).is_err());
    }

    #[test]
    fn validate_reports_each_violation() {
        assert!(measure_validate(AtomicMeasure::delta0().atoms()).is_empty());

        let dup = vec![Atom { q: 0.3, w: 0.5 }, Atom { q: 0.3, w: 0.5 }];
        let violations = measure_validate(&dup);
        assert!(violations.iter().any(|v| v.contains("duplicate")));

        let light = vec![Atom { q: 0.0, w: 0.5 }, Atom { q: 0.3, w: 0.4 }];
        let violations = measure_validate(&light);
        assert!(violations.iter().any(|v| v.contains("mass")));
    }

    #[test]
    fn integral_alpha_s_closed_form() {
        // For δ₀ the distribution function is 1 on [0,1]: ∫ s ds = 1/2.
        assert_abs_diff_eq!(AtomicMeasure::delta0().integral_alpha_s(), 0.5);
        // Two atoms: 0.6·(1−0)/2 + 0.4·(1−0.09)/2.
        assert_abs_diff_eq!(
            two_atom().integral_alpha_s(),
            0.6 * 0.5 + 0.4 * (1.0 - 0.09) / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn simplified_merges_and_prunes() {
        let mu = AtomicMeasure::new(vec![
            Atom { q: 0.0, w: 0.5 },
            Atom {
                q: 1e-7,
                w: 0.499_999_99,
            },
            Atom { q: 0.4, w: 1e-8 },
        ])
        .unwrap();
        let simple = mu.simplified(1e-6, 1e-7).unwrap();
        assert_eq!(simple.atoms().len(), 1);
        assert!(simple.support_end() < 1e-6);
        let mass: f64 = simple.atoms().iter().map(|a| a.w).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn measure_json_round_trip_and_validation() {
        let text = r#"{"atoms":[{"q":0.0,"w":0.6},{"q":0.3,"w":0.4}]}"#;
        let mu: AtomicMeasure = serde_json::from_str(text).unwrap();
        assert_eq!(mu, two_atom());

        let back = serde_json::to_string(&mu).unwrap();
        let again: AtomicMeasure = serde_json::from_str(&back).unwrap();
        assert_eq!(again, mu);

        // Invalid mass must be rejected at the serde boundary.
        let bad = r#"{"atoms":[{"q":0.0,"w":0.6},{"q":0.3,"w":0.3}]}"#;
        assert!(serde_json::from_str::<AtomicMeasure>(bad).is_err());
    }
}
