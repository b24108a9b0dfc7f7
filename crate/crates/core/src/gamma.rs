//! The criterion functionals Γ, Γ′ and the gap functions G, F.
//!
//! For an atomic measure μ with atoms q₁ < … < q_k the optimality check
//! revolves around expectations along the time-changed Brownian path
//! M(s) = B(ξ′(s)) evaluated at the atoms below u and at u itself:
//!
//! ```text
//! W(u)  = μ([0,u])·Φ(M(u),u) − Σ_{qᵢ ≤ u} wᵢ·Φ(M(qᵢ),qᵢ)
//! Γ(u)  = E[(∂ₓΦ(M(u),u))²·e^{W(u)}]
//! Γ′(u) = 2β²·E[(∂ₓ²Φ(M(u),u))²·e^{W(u)}]
//! ```
//!
//! with E[e^{W(u)}] = 1 identically; the computed `wnorm` is reported as a
//! quadrature diagnostic, not used for normalization. A measure μ is
//! optimal iff Γ(u) = u and Γ′(u) ≤ 1 on its support. The two-point gap
//! function and its one-sided version are
//!
//! ```text
//! G(s,t) = (t−s)·[Γ′(s)+Γ′(t)]/[Γ(t)−Γ(s)] − 2,      F(x) = G(0,x).
//! ```
//!
//! The joint law of (M(q₁),…,M(u)) is a chain of independent Gaussian
//! increments with variances ξ′(q₁), ξ′(q₂)−ξ′(q₁), …; expectations are
//! tensor-product Gauss–Hermite sums over those increments while at most
//! [`TENSOR_LAYER_LIMIT`] of them carry variance, and otherwise fall back
//! to a randomized quasi–Monte Carlo rule (Halton points with
//! Cranley–Patterson rotations) when the quadrature settings enable it.
//! Zero-variance increments (an atom at q = 0) are collapsed, so e.g. for
//! δ₀ the whole path is one Gaussian layer.

use crate::error::{Error, Result};
use crate::pde::{PhiJet, PhiStack};
use crate::quad::{gauss_hermite, GaussHermite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Most Gaussian increments the tensor-product quadrature will expand.
pub const TENSOR_LAYER_LIMIT: usize = 5;

/// Number of Cranley–Patterson randomization shifts in the QMC fallback.
pub const QMC_SHIFTS: usize = 16;

/// Step sizes for one-sided Richardson extrapolation toward an atom.
pub const RICHARDSON_OFFSETS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Denominators |Γ(t)−Γ(s)| below this are refused in [`g_func`].
pub const GAMMA_DENOM_MIN: f64 = 1e-12;

/// Which one-sided limit to take at an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Approach from below (u ↑ q); masses use μ([0,q)).
    Minus,
    /// Approach from above (u ↓ q); masses use μ([0,q]).
    Plus,
}

impl Side {
    /// +1.0 for `Plus`, −1.0 for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

/// Result of a path expectation E[f·e^W]: the value, the companion
/// normalization E[e^W] (≈ 1), and a standard error over randomization
/// shifts when the QMC fallback produced the number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathValue {
    pub value: f64,
    pub wnorm: f64,
    pub stderr: Option<f64>,
}

/// One evaluation point of the Brownian path: the time u, the standard
/// deviation of the increment leading into it, and the coefficient of
/// Φ(M(u),u) inside W. The last point doubles as the observable location.
#[derive(Debug, Clone, Copy)]
struct PathPoint {
    u: f64,
    sigma: f64,
    coeff: f64,
}

/// E[f(jet)·e^{W(u)}] for a scalar observable of the Φ derivative stack at
/// the terminal point (M(u), u).
pub fn path_expectation<F>(stack: &PhiStack, u: f64, f: F) -> Result<PathValue>
where
    F: Fn(&PhiJet) -> f64 + Sync,
{
    let out = path_expectation_multi(stack, u, |jet| [f(jet)])?;
    Ok(PathValue {
        value: out.values[0],
        wnorm: out.wnorm,
        stderr: out.stderr.map(|s| s[0]),
    })
}

/// Several observables sharing one sweep of the path quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMulti<const K: usize> {
    pub values: [f64; K],
    pub wnorm: f64,
    pub stderr: Option<[f64; K]>,
}

/// (Γ(u), E[e^W]) at u ∈ [0,1].
pub fn gamma_eval(stack: &PhiStack, u: f64) -> Result<(f64, f64)> {
    let m = criterion_moments(stack, u)?;
    Ok((m.values[0], m.wnorm))
}

/// Γ′(u) = 2β²·E[(∂ₓ²Φ)²e^W].
pub fn gamma_prime(stack: &PhiStack, u: f64) -> Result<f64> {
    let m = criterion_moments(stack, u)?;
    Ok(2.0 * stack.mixture().beta_sq() * m.values[1])
}

/// Γ and Γ′ from a single path sweep.
fn criterion_moments(stack: &PhiStack, u: f64) -> Result<PathMulti<2>> {
    path_expectation_multi(stack, u, |jet| {
        let d1 = jet.dx(1);
        let d2 = jet.dx(2);
        [d1 * d1, d2 * d2]
    })
}

/// Worst fixed-point residual max |Γ(q)−q| and worst stability slack
/// min (1 − Γ′(q)) over the atoms, from one path sweep per atom. This is
/// the cheap core of [`criterion_report`] without the one-sided slopes —
/// used by the temperature scan, where the full report would dominate the
/// runtime.
pub fn criterion_summary(stack: &PhiStack) -> Result<(f64, f64)> {
    let two_beta_sq = 2.0 * stack.mixture().beta_sq();
    let mut max_residual = 0.0f64;
    let mut min_slack = f64::INFINITY;
    for a in stack.measure().atoms() {
        let m = criterion_moments(stack, a.q)?;
        max_residual = max_residual.max((m.values[0] - a.q).abs());
        min_slack = min_slack.min(1.0 - two_beta_sq * m.values[1]);
    }
    Ok((max_residual, min_slack))
}

/// The gap function G(s,t) for 0 ≤ s < t ≤ 1. Fails with
/// [`Error::DegenerateDenominator`] when |Γ(t)−Γ(s)| < [`GAMMA_DENOM_MIN`].
pub fn g_func(stack: &PhiStack, s: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s >= t {
        return Err(Error::InvalidParameter(format!(
            "g_func needs 0 <= s < t <= 1, got ({s}, {t})"
        )));
    }
    let ms = criterion_moments(stack, s)?;
    let mt = criterion_moments(stack, t)?;
    let denom = mt.values[0] - ms.values[0];
    if denom.abs() < GAMMA_DENOM_MIN {
        return Err(Error::DegenerateDenominator(format!(
            "Gamma({t}) - Gamma({s}) = {denom:.3e}"
        )));
    }
    let two_beta_sq = 2.0 * stack.mixture().beta_sq();
    let slope_sum = two_beta_sq * (ms.values[1] + mt.values[1]);
    Ok((t - s) * slope_sum / denom - 2.0)
}

/// Per-atom entries of the optimality check.
#[derive(Debug, Clone, Serialize)]
pub struct AtomCheck {
    /// Atom location q.
    pub q: f64,
    /// Atom weight w.
    pub w: f64,
    /// Γ(q).
    pub gamma: f64,
    /// Γ′(q).
    pub gamma_prime: f64,
    /// |Γ(q) − q|, the fixed-point residual.
    pub residual: f64,
    /// 1 − Γ′(q), the stability slack (≥ 0 at an optimizer).
    pub slack: f64,
    /// E[e^W] at q, a quadrature diagnostic.
    pub wnorm: f64,
    /// Richardson-extrapolated slope of Γ from below; None at q = 0 or when
    /// the offsets leave [0,1].
    pub slope_left: Option<f64>,
    /// Same from above.
    pub slope_right: Option<f64>,
}

/// Optimality report for a measure: atom-by-atom residuals and slacks plus
/// their worst cases.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub atoms: Vec<AtomCheck>,
    pub max_residual: f64,
    pub min_slack: f64,
}

/// Evaluate the fixed-point criterion on the support of the measure: for
/// every atom, Γ(q) − q and 1 − Γ′(q), together with one-sided finite
/// difference slopes of Γ at the atom (both limits are reported; they agree
/// when Γ′ is continuous there).
pub fn criterion_report(stack: &PhiStack) -> Result<CriterionReport> {
    let atoms = stack.measure().atoms().to_vec();
    let mut checks = Vec::with_capacity(atoms.len());
    for a in &atoms {
        let m = criterion_moments(stack, a.q)?;
        let gamma = m.values[0];
        let gp = 2.0 * stack.mixture().beta_sq() * m.values[1];
        let gamma_at =
            |u: f64| -> Result<f64> { Ok(criterion_moments(stack, u)?.values[0]) };
        let slope_side = |side: Side| -> Result<Option<f64>> {
            let h_max = RICHARDSON_OFFSETS[0];
            let reachable = match side {
                Side::Minus => a.q - h_max >= 0.0,
                Side::Plus => a.q + h_max <= 1.0,
            };
            if !reachable {
                return Ok(None);
            }
            let slope = richardson_onesided(
                |u| Ok((gamma_at(u)? - gamma) / (u - a.q)),
                a.q,
                side,
            )?;
            Ok(Some(slope))
        };
        checks.push(AtomCheck {
            q: a.q,
            w: a.w,
            gamma,
            gamma_prime: gp,
            residual: (gamma - a.q).abs(),
            slack: 1.0 - gp,
            wnorm: m.wnorm,
            slope_left: slope_side(Side::Minus)?,
            slope_right: slope_side(Side::Plus)?,
        });
    }
    let max_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let min_slack = checks
        .iter()
        .map(|c| c.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(CriterionReport {
        atoms: checks,
        max_residual,
        min_slack,
    })
}

/// One row of a Γ profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileRow {
    pub u: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub wnorm: f64,
}

/// Γ, Γ′ and E[e^W] tabulated over [0,1].
#[derive(Debug, Clone, Serialize)]
pub struct GammaProfile {
    pub rows: Vec<ProfileRow>,
}

/// Tabulate Γ, Γ′, E[e^W] on a uniform grid of `grid` points over [0,1]
/// merged with the atom locations (deduplicated, ascending).
pub fn gamma_profile(stack: &PhiStack, grid: usize) -> Result<GammaProfile> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "profile grid needs at least 2 points, got {grid}"
        )));
    }
    let mut us: Vec<f64> = (0..grid)
        .map(|i| i as f64 / (grid - 1) as f64)
        .collect();
    us.extend(stack.measure().atoms().iter().map(|a| a.q));
    us.sort_by(|a, b| a.total_cmp(b));
    us.dedup();
    let rows = us
        .iter()
        .map(|&u| {
            let m = criterion_moments(stack, u)?;
            Ok(ProfileRow {
                u,
                gamma: m.values[0],
                gamma_prime: 2.0 * stack.mixture().beta_sq() * m.values[1],
                wnorm: m.wnorm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaProfile { rows })
}

/// Richardson-extrapolate f(q + sign·h) to h → 0 over
/// [`RICHARDSON_OFFSETS`]; exact for f polynomial of degree ≤ 2 in h.
/// All sampled points must stay inside [0,1].
pub fn richardson_onesided<F>(f: F, q: f64, side: Side) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let sign = side.sign();
    let mut hs = [0.0; 3];
    let mut ys = [0.0; 3];
    for (i, &h) in RICHARDSON_OFFSETS.iter().enumerate() {
        let u = q + sign * h;
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidParameter(format!(
                "one-sided sample {u} outside [0,1] (q={q}, h={h})"
            )));
        }
        hs[i] = h;
        ys[i] = f(u)?;
    }
    // Neville's scheme evaluated at h = 0.
    for level in 1..3 {
        for i in 0..3 - level {
            let (h0, h1) = (hs[i], hs[i + level]);
            ys[i] = (h0 * ys[i + 1] - h1 * ys[i]) / (h0 - h1);
        }
    }
    Ok(ys[0])
}

// ---------------------------------------------------------------------------
// Quadrature internals
// ---------------------------------------------------------------------------

/// E[f(jet at terminal)·e^W] for K observables sharing one sweep.
pub fn path_expectation_multi<F, const K: usize>(
    stack: &PhiStack,
    u: f64,
    f: F,
) -> Result<PathMulti<K>>
where
    F: Fn(&PhiJet) -> [f64; K] + Sync,
{
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "path expectation needs u in [0,1], got {u}"
        )));
    }
    let pts = build_path(stack, u);
    let layers = pts.iter().filter(|p| p.sigma > 0.0).count();
    let rule = gauss_hermite(stack.quad().nodes());
    let ctx = Ctx {
        stack,
        pts: &pts,
        rule: &rule,
        f: &f,
    };
    if layers <= TENSOR_LAYER_LIMIT {
        return tensor_expect(&ctx);
    }
    match stack.quad().mc_fallback() {
        Some(mc) => qmc_expect(&ctx, mc.samples, mc.seed),
        None => Err(Error::TooManyLayers {
            layers,
            limit: TENSOR_LAYER_LIMIT,
        }),
    }
}

/// Evaluation points of the path ending at u, with W coefficients. An atom
/// exactly at u shares the terminal point (its −w and the terminal
/// μ([0,u]) merge, which is the continuity of W at atoms).
fn build_path(stack: &PhiStack, u: f64) -> Vec<PathPoint> {
    let mu = stack.measure();
    let mix = stack.mixture();
    let mut pts: Vec<PathPoint> = Vec::new();
    let mut prev_xi = 0.0;
    for a in mu.atoms().iter().filter(|a| a.q <= u) {
        let xi = mix.xi_prime(a.q);
        pts.push(PathPoint {
            u: a.q,
            sigma: (xi - prev_xi).max(0.0).sqrt(),
            coeff: -a.w,
        });
        prev_xi = xi;
    }
    let alpha = mu.alpha(u);
    match pts.last_mut() {
        Some(last) if last.u == u => last.coeff += alpha,
        _ => pts.push(PathPoint {
            u,
            sigma: (mix.xi_prime(u) - prev_xi).max(0.0).sqrt(),
            coeff: alpha,
        }),
    }
    pts
}

struct Ctx<'a, F, const K: usize>
where
    F: Fn(&PhiJet) -> [f64; K] + Sync,
{
    stack: &'a PhiStack,
    pts: &'a [PathPoint],
    rule: &'a Arc<GaussHermite>,
    f: &'a F,
}

#[derive(Debug, Clone, Copy)]
struct Acc<const K: usize> {
    wnorm: f64,
    vals: [f64; K],
}

impl<const K: usize> Acc<K> {
    fn zero() -> Self {
        Acc {
            wnorm: 0.0,
            vals: [0.0; K],
        }
    }

    fn add(&mut self, other: &Acc<K>) {
        self.wnorm += other.wnorm;
        for k in 0..K {
            self.vals[k] += other.vals[k];
        }
    }
}

impl<'a, F, const K: usize> Ctx<'a, F, K>
where
    F: Fn(&PhiJet) -> [f64; K] + Sync,
{
    fn clip(&self, x: f64) -> f64 {
        // Clamp the path coordinate to the evaluation window; the Gaussian
        // weight of clamped corners is below the quadrature error anyway.
        let c = self.stack.quad().x_clip();
        x.clamp(-c, c)
    }

    /// Handle point d at incoming coordinate x: terminal points evaluate
    /// the observable, interior points accumulate their W term and recurse.
    fn visit(&self, d: usize, x: f64, logw: f64, pw: f64, acc: &mut Acc<K>) -> Result<()> {
        let p = &self.pts[d];
        let xe = self.clip(x);
        if d + 1 == self.pts.len() {
            let jet = self.stack.eval(xe, p.u)?;
            let wfac = (logw + p.coeff * jet.phi()).exp();
            let obs = (self.f)(&jet);
            acc.wnorm += pw * wfac;
            for (a, &o) in acc.vals.iter_mut().zip(&obs) {
                *a += pw * wfac * o;
            }
            Ok(())
        } else {
            let v = self.stack.value(xe, p.u)?;
            self.walk(d + 1, x, logw + p.coeff * v, pw, acc)
        }
    }

    /// Expand the Gaussian increment of point d (if any) and visit it.
    fn walk(&self, d: usize, x: f64, logw: f64, pw: f64, acc: &mut Acc<K>) -> Result<()> {
        let p = &self.pts[d];
        if p.sigma == 0.0 {
            self.visit(d, x, logw, pw, acc)
        } else {
            for i in 0..self.rule.len() {
                self.visit(
                    d,
                    x + p.sigma * self.rule.nodes()[i],
                    logw,
                    pw * self.rule.weights()[i],
                    acc,
                )?;
            }
            Ok(())
        }
    }

    /// Advance through the (prefix of) zero-variance points sequentially;
    /// returns the index of the first stochastic point, or accumulates the
    /// fully deterministic path directly.
    fn advance_prefix(&self, acc: &mut Acc<K>) -> Result<Option<(usize, f64, f64)>> {
        let mut d = 0;
        let mut logw = 0.0;
        while d + 1 < self.pts.len() && self.pts[d].sigma == 0.0 {
            let v = self.stack.value(self.clip(0.0), self.pts[d].u)?;
            logw += self.pts[d].coeff * v;
            d += 1;
        }
        if self.pts[d].sigma == 0.0 {
            // Terminal is deterministic as well (e.g. Γ(0) for δ₀).
            self.visit(d, 0.0, logw, 1.0, acc)?;
            Ok(None)
        } else {
            Ok(Some((d, 0.0, logw)))
        }
    }
}

fn tensor_expect<F, const K: usize>(ctx: &Ctx<'_, F, K>) -> Result<PathMulti<K>>
where
    F: Fn(&PhiJet) -> [f64; K] + Sync,
{
    let mut acc = Acc::zero();
    if let Some((d, x, logw)) = ctx.advance_prefix(&mut acc)? {
        // Parallelize over the outermost stochastic layer; partial sums are
        // reduced in node order so the result is thread-count independent.
        let p = ctx.pts[d];
        let partials: Vec<Acc<K>> = (0..ctx.rule.len())
            .into_par_iter()
            .map(|i| {
                let mut part = Acc::zero();
                ctx.visit(
                    d,
                    x + p.sigma * ctx.rule.nodes()[i],
                    logw,
                    ctx.rule.weights()[i],
                    &mut part,
                )?;
                Ok(part)
            })
            .collect::<Result<Vec<_>>>()?;
        for part in &partials {
            acc.add(part);
        }
    }
    Ok(PathMulti {
        values: acc.vals,
        wnorm: acc.wnorm,
        stderr: None,
    })
}

/// Randomized quasi–Monte Carlo over the stochastic increments: Halton
/// points in the first-D prime bases with per-shift Cranley–Patterson
/// rotations, mapped through the inverse normal CDF. The error bar is the
/// standard error of the shift means.
fn qmc_expect<F, const K: usize>(
    ctx: &Ctx<'_, F, K>,
    samples: usize,
    seed: u64,
) -> Result<PathMulti<K>>
where
    F: Fn(&PhiJet) -> [f64; K] + Sync,
{
    let mut acc = Acc::zero();
    let start = match ctx.advance_prefix(&mut acc)? {
        Some(s) => s,
        None => {
            return Ok(PathMulti {
                values: acc.vals,
                wnorm: acc.wnorm,
                stderr: Some([0.0; K]),
            })
        }
    };
    let (d0, x0, logw0) = start;
    let dims = ctx.pts.len() - d0;
    if dims > HALTON_PRIMES.len() {
        return Err(Error::ResourceLimit(format!(
            "QMC fallback supports at most {} stochastic layers, needed {dims}",
            HALTON_PRIMES.len()
        )));
    }
    let points = (samples / QMC_SHIFTS).max(1);
    let shift_accs: Vec<Acc<K>> = (0..QMC_SHIFTS)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let shifts: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
            let mut part = Acc::zero();
            let mut z = vec![0.0; dims];
            for i in 0..points {
                for (dim, zd) in z.iter_mut().enumerate() {
                    let h = radical_inverse((i + 1) as u64, HALTON_PRIMES[dim]);
                    let p = (h + shifts[dim]).fract().clamp(1e-15, 1.0 - 1e-15);
                    *zd = inv_norm_cdf(p);
                }
                // One sample path: deterministic once z is fixed.
                let mut x = x0;
                let mut logw = logw0;
                for (dim, pt) in ctx.pts[d0..].iter().enumerate() {
                    x += pt.sigma * z[dim];
                    let xe = ctx.clip(x);
                    if d0 + dim + 1 == ctx.pts.len() {
                        let jet = ctx.stack.eval(xe, pt.u)?;
                        let wfac = (logw + pt.coeff * jet.phi()).exp();
                        let obs = (ctx.f)(&jet);
                        part.wnorm += wfac;
                        for (a, &o) in part.vals.iter_mut().zip(&obs) {
                            *a += wfac * o;
                        }
                    } else {
                        logw += pt.coeff * ctx.stack.value(xe, pt.u)?;
                    }
                }
            }
            part.wnorm /= points as f64;
            for k in 0..K {
                part.vals[k] /= points as f64;
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;
    let r = QMC_SHIFTS as f64;
    let mut mean = Acc::zero();
    for s in &shift_accs {
        mean.add(s);
    }
    mean.wnorm /= r;
    for v in &mut mean.vals {
        *v /= r;
    }
    let mut var = [0.0; K];
    for s in &shift_accs {
        for (v, (sv, mv)) in var.iter_mut().zip(s.vals.iter().zip(&mean.vals)) {
            let d = sv - mv;
            *v += d * d;
        }
    }
    let mut stderr = [0.0; K];
    for k in 0..K {
        stderr[k] = (var[k] / (r * (r - 1.0))).sqrt();
    }
    Ok(PathMulti {
        values: mean.vals,
        wnorm: acc.wnorm + mean.wnorm,
        stderr: Some(stderr),
    })
}

/// Bases for the Halton sequence, one prime per stochastic layer.
const HALTON_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error ≈ 1.15e-9 — far below the QMC sampling error it feeds).
fn inv_norm_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}
