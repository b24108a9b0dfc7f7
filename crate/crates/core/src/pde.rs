//! The Parisi PDE for atomic measures, solved by the Cole–Hopf recursion.
//!
//! For an atomic measure μ with atoms q_0 < … < q_k the solution Φ_μ(x,u) of
//! the backward PDE with terminal datum Φ(x,1) = log cosh x is piecewise
//! explicit: between adjacent atoms, with m = μ([0,u]) constant on the
//! segment,
//!
//! ```text
//! Φ(x,u) = (1/m) · log E exp( m · Φ(x + g·σ, q_next) ),   σ² = ξ′(q_next) − ξ′(u),
//! ```
//!
//! with a plain expectation `E Φ(x + gσ, q_next)` on an m = 0 segment (the
//! m → 0 limit), and — because the mass above the top atom is 1 and the
//! m = 1 step of the recursion applied to log cosh is exact
//! (`E cosh(x + σg) = e^{σ²/2} cosh x`) — the closed form
//!
//! ```text
//! Φ(x,u) = log cosh x + β²(1 − u)        for u ≥ q_k.
//! ```
//!
//! Evaluation therefore walks the atom chain upward from u with one
//! Gauss–Hermite layer per segment and an O(1) analytic top layer, costing
//! `nodes^L` where L is the number of atoms strictly between u and the top.
//!
//! Spatial derivatives ∂ₓ^jΦ, j ≤ 4, propagate through the recursion
//! analytically (no finite differences): writing T[·] for the expectation
//! tilted by exp(mΦ⁺)/E exp(mΦ⁺) over the children, one x-differentiation of
//! the Cole–Hopf formula gives the cumulant-style chain
//!
//! ```text
//! Φ₁ = T[φ₁]
//! Φ₂ = T[φ₂] + m·Var(φ₁)
//! Φ₃ = T[φ₃] + 3m·Cov(φ₁,φ₂) + m²·κ₃(φ₁)
//! Φ₄ = T[φ₄] + m·(4Cov(φ₁,φ₃) + 3Var(φ₂)) + 6m²·⟨d₁²d₂⟩ + m³·κ₄(φ₁)
//! ```
//!
//! where φ_j are the children's derivative stacks, d_j are their central
//! deviations under T, κ₃/κ₄ are central cumulants of φ₁, and all central
//! moments are accumulated in centered form for numerical stability.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AtomicMeasure, Mixture};
use crate::quad::{gauss_hermite, GaussHermite};

/// Highest x-derivative order the evaluator produces.
pub const MAX_ORDER: usize = 4;

/// Numerically stable log cosh: |x| + log1p(e^{−2|x|}) − log 2. Exact for all
/// finite x, no overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Monte Carlo fallback settings for expectations that would need more
/// tensor-product Gaussian layers than the budget allows (deep measures).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McFallback {
    /// Total sample budget (split over randomization shifts).
    pub samples: usize,
    /// Seed for the counter-based generator; results are independent of
    /// thread count.
    pub seed: u64,
}

impl Default for McFallback {
    fn default() -> Self {
        Self {
            samples: 1 << 16,
            seed: 0,
        }
    }
}

/// Quadrature settings shared by the PDE evaluator and the path
/// expectations: Gauss–Hermite nodes per Gaussian layer, the evaluation
/// clamp `x_clip` for the spatial argument, and an optional Monte Carlo
/// fallback for deep tensor products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    nodes: usize,
    x_clip: f64,
    mc: Option<McFallback>,
}

impl QuadratureSpec {
    /// Validated constructor: `nodes` must be odd and ≥ 11 (a symmetric rule
    /// containing 0), `x_clip` positive.
    pub fn new(nodes: usize, x_clip: f64) -> Result<Self> {
        if nodes < 11 || nodes.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "quadrature nodes must be odd and >= 11, got {nodes}"
            )));
        }
        if !x_clip.is_finite() || x_clip <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "x_clip must be positive and finite, got {x_clip}"
            )));
        }
        Ok(Self {
            nodes,
            x_clip,
            mc: None,
        })
    }

    /// Same settings with a Monte Carlo fallback enabled.
    pub fn with_mc_fallback(mut self, mc: McFallback) -> Self {
        self.mc = Some(mc);
        self
    }

    /// Node count per Gaussian layer.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Spatial evaluation clamp.
    pub fn x_clip(&self) -> f64 {
        self.x_clip
    }

    /// Monte Carlo fallback settings, if enabled.
    pub fn mc_fallback(&self) -> Option<McFallback> {
        self.mc
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 61,
            x_clip: 40.0,
            mc: None,
        }
    }
}

/// The value and x-derivatives of Φ at one point: `v[j] = ∂ₓ^j Φ(x,u)`,
/// j = 0..4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiJet {
    v: [f64; MAX_ORDER + 1],
}

impl PhiJet {
    /// Φ itself.
    pub fn phi(&self) -> f64 {
        self.v[0]
    }

    /// ∂ₓ^order Φ; panics if order > 4.
    pub fn dx(&self, order: usize) -> f64 {
        self.v[order]
    }
}

/// The solved Parisi PDE for one (μ, mixture, quadrature) triple: an
/// immutable evaluator of Φ_μ and its x-derivatives at arbitrary (x,u).
/// Construction is cheap (the work happens lazily per evaluation).
#[derive(Debug, Clone)]
pub struct PhiStack {
    mu: AtomicMeasure,
    mix: Mixture,
    quad: QuadratureSpec,
    rule: Arc<GaussHermite>,
    /// cum_mass[i] = μ([0, q_i]) — cumulative mass through atom i.
    cum_mass: Vec<f64>,
}

/// Build the evaluator. Fails only on an invalid `QuadratureSpec` (the other
/// inputs are already validated types).
pub fn solve_phi(mu: &AtomicMeasure, mix: &Mixture, quad: &QuadratureSpec) -> Result<PhiStack> {
    let rule = gauss_hermite(quad.nodes());
    let mut cum = 0.0;
    let cum_mass = mu
        .atoms()
        .iter()
        .map(|a| {
            cum += a.w;
            cum
        })
        .collect();
    Ok(PhiStack {
        mu: mu.clone(),
        mix: *mix,
        quad: *quad,
        rule,
        cum_mass,
    })
}

/// Contract-facing wrapper: ∂ₓ^order Φ_μ(x,u) for order 0..4.
pub fn eval_phi(stack: &PhiStack, x: f64, u: f64, order: usize) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "derivative order must be <= {MAX_ORDER}, got {order}"
        )));
    }
    Ok(stack.eval(x, u)?.dx(order))
}

/// Reusable per-call buffers: one children array (and one tilt buffer) per
/// recursion depth, so a full evaluation performs only O(depth) heap
/// allocations regardless of how many internal nodes the layer tensor has.
struct JetScratch {
    levels: Vec<Vec<PhiJet>>,
    tilts: Vec<Vec<f64>>,
}

struct ValScratch {
    levels: Vec<Vec<f64>>,
}

impl PhiStack {
    /// The measure this stack was solved for.
    pub fn measure(&self) -> &AtomicMeasure {
        &self.mu
    }

    /// The mixture (β) this stack was solved for.
    pub fn mixture(&self) -> &Mixture {
        &self.mix
    }

    /// The quadrature settings in use.
    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    fn check_domain(&self, x: f64, u: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidParameter(format!(
                "u must lie in [0,1], got {u}"
            )));
        }
        if !x.is_finite() || x.abs() > self.quad.x_clip() {
            return Err(Error::InvalidParameter(format!(
                "|x| must be <= x_clip = {}, got {x}",
                self.quad.x_clip()
            )));
        }
        Ok(())
    }

    /// Index of the first atom strictly above u (== number of atoms ≤ u).
    fn first_above(&self, u: f64) -> usize {
        self.mu.atoms().partition_point(|a| a.q <= u)
    }

    /// Mass below the segment containing u: μ([0,u]) with the convention
    /// that an atom at u is included (right-continuity).
    fn segment_mass(&self, first_above: usize) -> f64 {
        if first_above == 0 {
            0.0
        } else {
            self.cum_mass[first_above - 1]
        }
    }

    /// Full derivative stack Φ, ∂ₓΦ, …, ∂ₓ⁴Φ at (x,u).
    ///
    /// Φ(·,u) is even in x (even boundary datum, symmetry-preserving
    /// recursion), so the computation runs at |x| and reflects the odd
    /// orders; parity of the results is exact by construction.
    pub fn eval(&self, x: f64, u: f64) -> Result<PhiJet> {
        self.check_domain(x, u)?;
        let start = self.first_above(u);
        let depth = self.mu.atoms().len() - start;
        let mut scratch = JetScratch {
            levels: (0..depth)
                .map(|_| vec![boundary_jet(0.0, 0.0, 0.0); self.rule.len()])
                .collect(),
            tilts: (0..depth).map(|_| vec![0.0; self.rule.len()]).collect(),
        };
        let mut jet = self.jet_rec(x.abs(), u, start, 0, &mut scratch);
        if x < 0.0 {
            jet.v[1] = -jet.v[1];
            jet.v[3] = -jet.v[3];
        }
        if jet.v.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite Φ stack at (x={x}, u={u})"
            )));
        }
        Ok(jet)
    }

    /// Φ(x,u) only — the cheap path used inside the optimizer's objective.
    pub fn value(&self, x: f64, u: f64) -> Result<f64> {
        self.check_domain(x, u)?;
        let start = self.first_above(u);
        let depth = self.mu.atoms().len() - start;
        let mut scratch = ValScratch {
            levels: (0..depth).map(|_| vec![0.0; self.rule.len()]).collect(),
        };
        let v = self.val_rec(x.abs(), u, start, 0, &mut scratch);
        if !v.is_finite() {
            return Err(Error::Numerical(format!("non-finite Φ at (x={x}, u={u})")));
        }
        Ok(v)
    }

    fn jet_rec(&self, x: f64, u: f64, seg: usize, depth: usize, ws: &mut JetScratch) -> PhiJet {
        let atoms = self.mu.atoms();
        if seg == atoms.len() {
            return boundary_jet(x, u, self.mix.beta_sq());
        }
        let q_next = atoms[seg].q;
        let m = self.segment_mass(seg);
        let sigma = (self.mix.xi_prime(q_next) - self.mix.xi_prime(u)).max(0.0).sqrt();
        for i in 0..self.rule.len() {
            let z = self.rule.nodes()[i];
            let child = self.jet_rec(x + sigma * z, q_next, seg + 1, depth + 1, ws);
            ws.levels[depth][i] = child;
        }
        let (levels, tilts) = (&ws.levels, &mut ws.tilts);
        tilted_combine(m, self.rule.weights(), &levels[depth], &mut tilts[depth])
    }

    fn val_rec(&self, x: f64, u: f64, seg: usize, depth: usize, ws: &mut ValScratch) -> f64 {
        let atoms = self.mu.atoms();
        if seg == atoms.len() {
            return ln_cosh(x) + self.mix.beta_sq() * (1.0 - u);
        }
        let q_next = atoms[seg].q;
        let m = self.segment_mass(seg);
        let sigma = (self.mix.xi_prime(q_next) - self.mix.xi_prime(u)).max(0.0).sqrt();
        for i in 0..self.rule.len() {
            let z = self.rule.nodes()[i];
            let v = self.val_rec(x + sigma * z, q_next, seg + 1, depth + 1, ws);
            ws.levels[depth][i] = v;
        }
        log_tilted_mean(m, self.rule.weights(), &ws.levels[depth])
    }
}

/// The analytic top layer: Φ(x,u) = log cosh x + β²(1−u) and its derivative
/// stack in terms of t = tanh x.
fn boundary_jet(x: f64, u: f64, beta_sq: f64) -> PhiJet {
    let t = x.tanh();
    let s2 = 1.0 - t * t; // sech²x
    PhiJet {
        v: [
            ln_cosh(x) + beta_sq * (1.0 - u),
            t,
            s2,
            -2.0 * t * s2,
            s2 * (6.0 * t * t - 2.0),
        ],
    }
}

/// (1/m)·log Σ w_i e^{m·v_i} for probability weights w, with the m = 0 limit
/// Σ w_i v_i. Centered at max v_i; the expm1/log1p form has one sign
/// throughout, so there is no cancellation.
fn log_tilted_mean(m: f64, weights: &[f64], values: &[f64]) -> f64 {
    if m == 0.0 {
        return weights.iter().zip(values).map(|(w, v)| w * v).sum();
    }
    let c = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * (m * (v - c)).exp_m1())
        .sum();
    c + s.ln_1p() / m
}

/// One Cole–Hopf layer for the full stack: combine children jets under the
/// tilt exp(m·φ₀)/Σ and produce the parent jet via the cumulant chain in the
/// module docs. Central moments are accumulated in centered form. `tilt` is
/// caller-provided scratch of the same length as `children`.
fn tilted_combine(m: f64, weights: &[f64], children: &[PhiJet], tilt: &mut [f64]) -> PhiJet {
    let n = children.len();
    let phi0;
    if m == 0.0 {
        phi0 = weights
            .iter()
            .zip(children)
            .map(|(w, c)| w * c.v[0])
            .sum();
        tilt[..n].copy_from_slice(&weights[..n]);
    } else {
        let c = children
            .iter()
            .map(|c| c.v[0])
            .fold(f64::NEG_INFINITY, f64::max);
        // Σ w_i e^{m(v_i − c)} = 1 + Σ w_i·expm1(m(v_i − c)): the expm1 terms
        // all share one sign, so the log-sum-exp loses no precision.
        let mut s = 0.0;
        for i in 0..n {
            let e = (m * (children[i].v[0] - c)).exp_m1();
            tilt[i] = weights[i] * (1.0 + e);
            s += weights[i] * e;
        }
        phi0 = c + s.ln_1p() / m;
        let total = 1.0 + s;
        for t in tilt[..n].iter_mut() {
            *t /= total;
        }
    }

    // First pass: tilted means of the four derivative orders.
    let mut mean = [0.0f64; 4];
    for (t, ch) in tilt.iter().zip(children) {
        for (m, &c) in mean.iter_mut().zip(&ch.v[1..]) {
            *m += t * c;
        }
    }
    // Second pass: centered moments of the deviations d_j = φ_j − T[φ_j].
    let (mut c11, mut c12, mut c13, mut c22) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut c111, mut c112, mut c1111) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let d1 = children[i].v[1] - mean[0];
        let d2 = children[i].v[2] - mean[1];
        let d3 = children[i].v[3] - mean[2];
        let t = tilt[i];
        c11 += t * d1 * d1;
        c12 += t * d1 * d2;
        c13 += t * d1 * d3;
        c22 += t * d2 * d2;
        c111 += t * d1 * d1 * d1;
        c112 += t * d1 * d1 * d2;
        c1111 += t * d1 * d1 * d1 * d1;
    }
    let kappa4 = c1111 - 3.0 * c11 * c11;
    PhiJet {
        v: [
            phi0,
            mean[0],
            mean[1] + m * c11,
            mean[2] + 3.0 * m * c12 + m * m * c111,
            mean[3]
                + m * (4.0 * c13 + 3.0 * c22)
                + 6.0 * m * m * c112
                + m * m * m * kappa4,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Temperature};
    use approx::assert_abs_diff_eq;

    fn mix(beta: f64) -> Mixture {
        Mixture::sk(Temperature::new(beta).unwrap())
    }

    fn three_atom() -> AtomicMeasure {
        AtomicMeasure::new(vec![
            Atom { q: 0.05, w: 0.5 },
            Atom { q: 0.3, w: 0.3 },
            Atom { q: 0.6, w: 0.2 },
        ])
        .unwrap()
    }

    #[test]
    fn ln_cosh_is_stable_and_exact() {
        assert_abs_diff_eq!(ln_cosh(0.0), 0.0);
        assert_abs_diff_eq!(ln_cosh(1.3), 1.3f64.cosh().ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(ln_cosh(-1.3), ln_cosh(1.3));
        // Far beyond cosh overflow: ln cosh x → |x| − log 2.
        let big = 800.0;
        assert_abs_diff_eq!(ln_cosh(big), big - std::f64::consts::LN_2);
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::new(10, 40.0).is_err());
        assert!(QuadratureSpec::new(9, 40.0).is_err());
        assert!(QuadratureSpec::new(11, 0.0).is_err());
        assert!(QuadratureSpec::new(61, 40.0).is_ok());
    }

    #[test]
    fn delta0_has_the_analytic_solution() {
        let b = std::f64::consts::FRAC_1_SQRT_2;
        let stack = solve_phi(&AtomicMeasure::delta0(), &mix(b), &QuadratureSpec::default()).unwrap();
        // Φ(0,0) = β² = 1/2 exactly for β = 1/√2.
        assert_abs_diff_eq!(stack.value(0.0, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        for i in 0..50 {
            for j in 0..50 {
                let x = -3.0 + 6.0 * (i as f64) / 49.0;
                let u = (j as f64) / 49.0;
                let expect = ln_cosh(x) + b * b * (1.0 - u);
                assert_abs_diff_eq!(stack.value(x, u).unwrap(), expect, epsilon = 1e-9);
            }
        }
        // Derivatives: tanh, sech², and ∂ₓ⁴Φ(0,0) = −2.
        assert_abs_diff_eq!(
            eval_phi(&stack, 1.0, 0.3, 1).unwrap(),
            1.0f64.tanh(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(eval_phi(&stack, 0.0, 0.0, 2).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eval_phi(&stack, 0.0, 0.0, 4).unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn terminal_condition_is_log_cosh_for_any_measure() {
        let stack = solve_phi(&three_atom(), &mix(0.8), &QuadratureSpec::default()).unwrap();
        for i in 0..20 {
            let x = -4.0 + 8.0 * (i as f64) / 19.0;
            assert_abs_diff_eq!(stack.value(x, 1.0).unwrap(), ln_cosh(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn two_atom_phi_matches_direct_integral() {
        // μ = 0.6·δ₀ + 0.4·δ_{0.3}; for u < 0.3 the recursion is a single
        // Gaussian layer over the analytic segment, so Φ(x,u) =
        // β²(1−0.3) + (1/m)·log E[cosh^m(x+σg)] with m = 0.6. Check against
        // a direct high-order quadrature computed right here.
        let mu = AtomicMeasure::new(vec![Atom { q: 0.0, w: 0.6 }, Atom { q: 0.3, w: 0.4 }]).unwrap();
        let b = 0.75;
        let stack = solve_phi(&mu, &mix(b), &QuadratureSpec::default()).unwrap();
        let rule = crate::quad::gauss_hermite(201);
        let m = 0.6;
        let (x, u) = (0.7, 0.1);
        let sigma = (2.0 * b * b * (0.3 - u)).sqrt();
        let shift = b * b * (1.0 - 0.3);
        let direct = (1.0 / m)
            * rule
                .expect(|g| (m * (ln_cosh(x + sigma * g) + shift)).exp())
                .ln();
        assert_abs_diff_eq!(stack.value(x, u).unwrap(), direct, epsilon = 1e-11);
    }

    #[test]
    fn derivative_stack_matches_finite_differences() {
        let stack = solve_phi(&three_atom(), &mix(0.75), &QuadratureSpec::default()).unwrap();
        let h = 1e-4;
        for &(x, u) in &[(0.3, 0.0), (-1.1, 0.2), (0.9, 0.45), (2.0, 0.7)] {
            for order in 1..=4 {
                let fd = (eval_phi(&stack, x + h, u, order - 1).unwrap()
                    - eval_phi(&stack, x - h, u, order - 1).unwrap())
                    / (2.0 * h);
                let analytic = eval_phi(&stack, x, u, order).unwrap();
                assert_abs_diff_eq!(analytic, fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn phi_is_continuous_across_atoms() {
        let mu = three_atom();
        let stack = solve_phi(&mu, &mix(0.8), &QuadratureSpec::default()).unwrap();
        for a in mu.atoms() {
            let below = stack.value(0.4, a.q - 1e-12).unwrap();
            let at = stack.value(0.4, a.q).unwrap();
            assert_abs_diff_eq!(below, at, epsilon = 1e-9);
        }
    }

    #[test]
    fn parity_and_bounds() {
        let stack = solve_phi(&three_atom(), &mix(0.9), &QuadratureSpec::default()).unwrap();
        for i in 1..12 {
            let x = 0.25 * (i as f64);
            for &u in &[0.0, 0.2, 0.5, 0.9] {
                let plus = stack.eval(x, u).unwrap();
                let minus = stack.eval(-x, u).unwrap();
                assert_eq!(plus.phi(), minus.phi());
                assert_eq!(plus.dx(1), -minus.dx(1));
                assert_eq!(plus.dx(2), minus.dx(2));
                assert_eq!(plus.dx(3), -minus.dx(3));
                assert!(plus.dx(1).abs() < 1.0);
                assert!(plus.dx(2) > 0.0 && plus.dx(2) <= 1.0);
            }
        }
        // Oddness pins ∂ₓΦ and ∂ₓ³Φ to 0 at x = 0 (up to the noise floor of
        // three nested 61-node layers).
        let at0 = stack.eval(0.0, 0.15).unwrap();
        assert_abs_diff_eq!(at0.dx(1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at0.dx(3), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn domain_errors_are_reported() {
        let stack = solve_phi(&AtomicMeasure::delta0(), &mix(0.7), &QuadratureSpec::default()).unwrap();
        assert!(stack.value(0.0, 1.5).is_err());
        assert!(stack.value(41.0, 0.5).is_err());
        assert!(eval_phi(&stack, 0.0, 0.5, 5).is_err());
    }
}
