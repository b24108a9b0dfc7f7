//! Variational minimization over finite atomic order parameters and the
//! temperature scan built on top of it.
//!
//! A measure with k+1 atoms (k levels of symmetry breaking) is encoded by
//! an unconstrained vector θ ∈ ℝ^{2k+3}: k+2 location logits turn into
//! positive fractions by softmax whose partial sums give the strictly
//! increasing atom positions in (0, 1), and k+1 weight logits turn into
//! the probability weights by another softmax. Minimization runs
//! Nelder–Mead from several deterministic and seeded starts on a cheap
//! quadrature, then re-evaluates and greedily simplifies the winner on the
//! full quadrature. A result whose improvement over the one-atom value at
//! the origin is below `collapse_tol` is snapped to exactly that measure —
//! the scan uses this collapse flag to locate the phase boundary.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{criterion_summary, g_func, richardson_onesided, Side};
use crate::model::{Atom, AtomicMeasure, Mixture, Temperature, MIN_ATOM_GAP};
use crate::pde::{solve_phi, PhiStack, QuadratureSpec};

/// Default quadrature size during the Nelder–Mead search.
pub const SEARCH_NODES: usize = 11;

/// Default quadrature size for reported values.
pub const FINAL_NODES: usize = 61;

/// The one-atom-at-the-origin value ln 2 + β²/2, exact for every β.
pub fn rs_value(beta: Temperature) -> f64 {
    LN_2 + 0.5 * beta.beta() * beta.beta()
}

/// Free-energy functional value for a solved recursion:
/// ln 2 + Φ(0,0) − β²·∫₀¹ α(s)·s ds.
pub fn parisi_value(stack: &PhiStack) -> Result<f64> {
    Ok(LN_2 + stack.value(0.0, 0.0)?
        - stack.mixture().beta_sq() * stack.measure().integral_alpha_s())
}

/// Convenience: solve the recursion for `measure` and evaluate the
/// functional.
pub fn parisi_value_for(
    measure: &AtomicMeasure,
    beta: Temperature,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let stack = solve_phi(measure, &Mixture::sk(beta), quad)?;
    parisi_value(&stack)
}

/// Knobs for [`optimize`].
#[derive(Debug, Clone, Serialize)]
pub struct OptimizeConfig {
    /// Number of symmetry-breaking levels k; the ansatz carries k+1 atoms.
    pub levels: usize,
    /// Quadrature nodes during the search phase.
    pub search_nodes: usize,
    /// Quadrature nodes for final values and the simplification loop.
    pub final_nodes: usize,
    /// Number of Nelder–Mead starts (deterministic seeds first, then
    /// pseudorandom ones).
    pub starts: usize,
    /// Objective-evaluation budget per start.
    pub max_evals: usize,
    /// Base seed for the pseudorandom starts.
    pub seed: u64,
    /// Relative spread of simplex values at which a start stops.
    pub ftol: f64,
    /// Atoms closer than this are merged before reporting.
    pub merge_tol: f64,
    /// Atoms lighter than this are dropped before reporting.
    pub prune_tol: f64,
    /// Simplification may raise the full-quadrature value by at most this.
    pub simplify_slack: f64,
    /// Gains at or below this count as a collapse to the origin atom.
    pub collapse_tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            search_nodes: SEARCH_NODES,
            final_nodes: FINAL_NODES,
            starts: 8,
            max_evals: 500,
            seed: 17,
            ftol: 1e-12,
            merge_tol: 1e-6,
            prune_tol: 1e-8,
            simplify_slack: 1e-9,
            collapse_tol: 1e-9,
        }
    }
}

/// Outcome of one minimization.
#[derive(Debug, Clone, Serialize)]
pub struct OptimResult {
    pub beta: f64,
    pub levels: usize,
    pub measure: AtomicMeasure,
    /// Functional value on the full quadrature.
    pub value: f64,
    /// ln 2 + β²/2.
    pub rs_value: f64,
    /// rs_value − value (≥ 0 up to solver noise).
    pub gain: f64,
    /// True when the gain was below the collapse tolerance and the result
    /// was snapped to the origin atom.
    pub rs_collapse: bool,
    /// Total objective evaluations across all starts.
    pub evals: usize,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|&a| (a - m).min(40.0).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// θ → measure. Locations are the partial sums of a softmax over the first
/// `atoms + 1` entries (the last fraction is the headroom up to 1), weights
/// a softmax over the rest. Adjacent locations that land closer than the
/// construction gap are merged so the result is always a valid measure.
pub fn measure_from_theta(theta: &[f64], atoms: usize) -> Result<AtomicMeasure> {
    if theta.len() != 2 * atoms + 1 {
        return Err(Error::InvalidParameter(format!(
            "parameter vector length {} does not match {} atoms",
            theta.len(),
            atoms
        )));
    }
    let (loc, wt) = theta.split_at(atoms + 1);
    let fractions = softmax(loc);
    let weights = softmax(wt);
    let mut q = 0.0;
    let mut raw: Vec<Atom> = Vec::with_capacity(atoms);
    for i in 0..atoms {
        q += fractions[i];
        raw.push(Atom {
            q: q.min(1.0),
            w: weights[i],
        });
    }
    let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
    for a in raw {
        match merged.last_mut() {
            Some(last) if a.q - last.q < 10.0 * MIN_ATOM_GAP => {
                let w = last.w + a.w;
                last.q = (last.q * last.w + a.q * a.w) / w;
                last.w = w;
            }
            _ => merged.push(a),
        }
    }
    AtomicMeasure::new(merged)
}

/// Inverse of [`measure_from_theta`] for seeding: logits reproducing the
/// given locations and weights (up to softmax's shift invariance).
pub fn theta_from_qw(qs: &[f64], ws: &[f64]) -> Vec<f64> {
    assert_eq!(qs.len(), ws.len());
    let mut theta = Vec::with_capacity(2 * qs.len() + 1);
    let mut prev = 0.0;
    for &q in qs {
        theta.push((q - prev).max(1e-9).ln());
        prev = q;
    }
    theta.push((1.0 - prev).max(1e-9).ln());
    for &w in ws {
        theta.push(w.max(1e-9).ln());
    }
    theta
}

/// Plain Nelder–Mead with the standard reflection/expansion/contraction/
/// shrink coefficients. Deterministic for a deterministic objective.
/// Returns the best point, its value, and the number of evaluations.
fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    ftol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= ftol * (best.abs() + 1e-12) {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut c = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / n as f64;
            }
        }
        let xw = simplex[n].0.clone();
        let mix = |a: f64| -> Vec<f64> {
            c.iter()
                .zip(&xw)
                .map(|(&ci, &wi)| ci + a * (ci - wi))
                .collect()
        };
        let xr = mix(1.0);
        let vr = eval(&xr, &mut evals);
        if vr < simplex[0].1 {
            let xe = mix(2.0);
            let ve = eval(&xe, &mut evals);
            simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
        } else if vr < simplex[n - 1].1 {
            simplex[n] = (xr, vr);
        } else {
            let xc = mix(-0.5);
            let vc = eval(&xc, &mut evals);
            if vc < simplex[n].1 {
                simplex[n] = (xc, vc);
            } else {
                // Shrink toward the best vertex.
                let xb = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&xb)
                        .map(|(&xi, &bi)| bi + 0.5 * (xi - bi))
                        .collect();
                    let v = eval(&x, &mut evals);
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals)
}

/// Build the start points: optional warm start, three structured seeds,
/// then pseudorandom logits until `starts` points exist.
fn build_seeds(
    cfg: &OptimizeConfig,
    atoms: usize,
    beta: Temperature,
    warm: Option<&[f64]>,
) -> Vec<Vec<f64>> {
    let dim = 2 * atoms + 1;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = warm {
        if w.len() == dim {
            seeds.push(w.to_vec());
        }
    }
    // Near the origin atom: almost all location mass in the headroom slot.
    let mut near0 = vec![0.0; dim];
    near0[atoms] = 6.0;
    seeds.push(near0);
    // Equispaced locations, uniform weights.
    seeds.push(vec![0.0; dim]);
    // A small-q ansatz at the scale suggested by the shallow expansion of
    // the functional: q* ≈ (2β²−1)/(8β⁴) just above the critical point.
    let b2 = beta.beta() * beta.beta();
    let tau = 2.0 * b2 - 1.0;
    let qstar = if tau > 0.0 {
        (tau / (8.0 * b2 * b2)).clamp(0.004, 0.3)
    } else {
        0.05
    };
    let qs: Vec<f64> = (0..atoms)
        .map(|i| (qstar + 0.06 * i as f64).min(0.95))
        .collect();
    let mut ws = vec![0.5 / atoms.max(1) as f64; atoms];
    ws[0] = 0.5 + 0.5 / atoms.max(1) as f64;
    let mass: f64 = ws.iter().sum();
    for w in &mut ws {
        *w /= mass;
    }
    seeds.push(theta_from_qw(&qs, &ws));
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    while seeds.len() < cfg.starts.max(1) {
        let s: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        seeds.push(s);
    }
    seeds.truncate(cfg.starts.max(seeds.len().min(4)));
    seeds
}

/// Candidate coarsenings tried by the simplification loop: merge the
/// closest adjacent pair, drop the lightest atom, and snap a near-zero
/// first atom onto the origin exactly.
fn coarsen_candidates(m: &AtomicMeasure) -> Vec<AtomicMeasure> {
    let atoms = m.atoms();
    let mut out = Vec::new();
    if atoms.len() > 1 {
        // Merge the closest adjacent pair at the weight-averaged location.
        let mut besti = 0;
        for i in 1..atoms.len() - 1 {
            if atoms[i + 1].q - atoms[i].q < atoms[besti + 1].q - atoms[besti].q {
                besti = i;
            }
        }
        let mut v = atoms.to_vec();
        let (a, b) = (v[besti], v[besti + 1]);
        let w = a.w + b.w;
        v[besti] = Atom {
            q: (a.q * a.w + b.q * b.w) / w,
            w,
        };
        v.remove(besti + 1);
        if let Ok(c) = AtomicMeasure::new(v) {
            out.push(c);
        }
        // Drop the lightest atom and renormalize.
        let lightest = atoms
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.w.total_cmp(&b.1.w))
            .map(|(i, _)| i)
            .unwrap();
        let mut v = atoms.to_vec();
        v.remove(lightest);
        let mass: f64 = v.iter().map(|a| a.w).sum();
        for a in &mut v {
            a.w /= mass;
        }
        if let Ok(c) = AtomicMeasure::new(v) {
            out.push(c);
        }
    }
    if atoms[0].q > 0.0 && atoms[0].q < 0.01 {
        let mut v = atoms.to_vec();
        v[0].q = 0.0;
        if let Ok(c) = AtomicMeasure::new(v) {
            out.push(c);
        }
    }
    out
}

/// Minimize the functional at inverse temperature β.
pub fn optimize(beta: Temperature, cfg: &OptimizeConfig) -> Result<OptimResult> {
    optimize_with_warm(beta, cfg, None).map(|(r, _)| r)
}

/// As [`optimize`], but accepts a warm-start parameter vector and returns
/// the winning vector for chaining (used by the scan).
pub fn optimize_with_warm(
    beta: Temperature,
    cfg: &OptimizeConfig,
    warm: Option<&[f64]>,
) -> Result<(OptimResult, Vec<f64>)> {
    let atoms = cfg.levels + 1;
    let mix = Mixture::sk(beta);
    let search_quad = QuadratureSpec::new(cfg.search_nodes, 40.0)?;
    let final_quad = QuadratureSpec::new(cfg.final_nodes, 40.0)?;
    let rs = rs_value(beta);

    let mut evals_total = 0usize;
    let mut objective = |theta: &[f64]| -> f64 {
        match measure_from_theta(theta, atoms)
            .and_then(|m| solve_phi(&m, &mix, &search_quad))
            .and_then(|s| parisi_value(&s))
        {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for seed in build_seeds(cfg, atoms, beta, warm) {
        let (x, v, used) = nelder_mead(&mut objective, &seed, 0.25, cfg.max_evals, cfg.ftol);
        evals_total += used;
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
    }
    let (_, best_theta) = best.expect("at least one start");

    // Re-evaluate the winner on the full quadrature and greedily coarsen
    // while that does not cost more than the simplification slack.
    let mut measure = measure_from_theta(&best_theta, atoms)?
        .simplified(cfg.merge_tol, cfg.prune_tol)?;
    let mut value = parisi_value_for(&measure, beta, &final_quad)?;
    loop {
        let mut accepted = false;
        for cand in coarsen_candidates(&measure) {
            let v = match parisi_value_for(&cand, beta, &final_quad) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if v <= value + cfg.simplify_slack {
                measure = cand;
                value = v.min(value);
                accepted = true;
                break;
            }
        }
        if !accepted {
            break;
        }
    }

    let gain = rs - value;
    let rs_collapse = gain <= cfg.collapse_tol;
    if rs_collapse {
        measure = AtomicMeasure::delta0();
        value = rs;
    }
    let result = OptimResult {
        beta: beta.beta(),
        levels: cfg.levels,
        measure,
        value,
        rs_value: rs,
        gain: if rs_collapse { 0.0 } else { gain },
        rs_collapse,
        evals: evals_total,
    };
    Ok((result, best_theta))
}

/// Knobs for [`scan_beta`].
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Number of steps; the grid has steps+1 points inclusive.
    pub steps: usize,
    /// Quadrature for the per-row optimality summary.
    pub profile_nodes: usize,
    pub optimize: OptimizeConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            beta_min: 0.5,
            beta_max: 0.9,
            steps: 40,
            profile_nodes: 41,
            optimize: OptimizeConfig::default(),
        }
    }
}

/// One row of the temperature scan.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseRow {
    pub beta: f64,
    pub value: f64,
    pub support_end: f64,
    pub max_residual: f64,
    pub min_slack: f64,
    pub rs_collapse: bool,
}

/// Scan output: rows, matching optimized measures, and the first
/// non-collapsed β if any.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseScan {
    pub rows: Vec<PhaseRow>,
    pub measures: Vec<AtomicMeasure>,
    pub transition: Option<f64>,
}

/// Optimize along a β grid, warm-starting each point from its predecessor.
pub fn scan_beta(cfg: &ScanConfig) -> Result<PhaseScan> {
    if !(cfg.beta_min > 0.0 && cfg.beta_min < cfg.beta_max) || cfg.steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "scan range [{}, {}] with {} steps is invalid",
            cfg.beta_min, cfg.beta_max, cfg.steps
        )));
    }
    let profile_quad = QuadratureSpec::new(cfg.profile_nodes, 40.0)?;
    let mut rows = Vec::with_capacity(cfg.steps + 1);
    let mut measures = Vec::with_capacity(cfg.steps + 1);
    let mut warm: Option<Vec<f64>> = None;
    let mut transition = None;
    for i in 0..=cfg.steps {
        let b = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * i as f64 / cfg.steps as f64;
        let beta = Temperature::new(b)?;
        let (res, theta) = optimize_with_warm(beta, &cfg.optimize, warm.as_deref())?;
        warm = Some(theta);
        if transition.is_none() && !res.rs_collapse {
            transition = Some(b);
        }
        let stack = solve_phi(&res.measure, &Mixture::sk(beta), &profile_quad)?;
        let (max_residual, min_slack) = criterion_summary(&stack)?;
        rows.push(PhaseRow {
            beta: b,
            value: res.value,
            support_end: res.measure.support_end(),
            max_residual,
            min_slack,
            rs_collapse: res.rs_collapse,
        });
        measures.push(res.measure);
    }
    Ok(PhaseScan {
        rows,
        measures,
        transition,
    })
}

/// Diagnostics for one support gap (a, b): the minimum of G(a, ·) over an
/// interior grid, its extrapolated limit toward a (0 at an optimizer), and
/// the analytic curvature limit Γ‴(a⁺)/(3Γ′(a)) when available.
#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub left: f64,
    pub right: f64,
    pub min_g: f64,
    pub g_limit_left: f64,
    pub curvature_left: Option<f64>,
}

/// Evaluate the gap diagnostics on every maximal open interval between
/// consecutive support atoms, plus the tail gap up to 1. Gaps narrower
/// than 0.05 are skipped (the extrapolation offsets would not fit).
pub fn gap_diagnostics(stack: &PhiStack, samples: usize) -> Result<Vec<GapRow>> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "gap diagnostics need at least 2 samples per gap".into(),
        ));
    }
    let atoms = stack.measure().atoms();
    let mut ends: Vec<(f64, f64)> = Vec::new();
    for w in atoms.windows(2) {
        ends.push((w[0].q, w[1].q));
    }
    let last = atoms.last().expect("nonempty measure").q;
    if last < 1.0 {
        ends.push((last, 1.0));
    }
    let mut rows = Vec::new();
    for (a, b) in ends {
        if b - a < 0.05 {
            continue;
        }
        let mut min_g = f64::INFINITY;
        for j in 1..=samples {
            let u = a + (b - a) * j as f64 / (samples + 1) as f64;
            min_g = min_g.min(g_func(stack, a, u)?);
        }
        let g_limit_left = richardson_onesided(|u| g_func(stack, a, u), a, Side::Plus)?;
        let curvature_left = crate::calculus::second_deriv_limit(stack, a).ok();
        rows.push(GapRow {
            left: a,
            right: b,
            min_g,
            g_limit_left,
            curvature_left,
        });
    }
    Ok(rows)
}
