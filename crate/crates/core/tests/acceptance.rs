//! End-to-end acceptance gate. Each test is one numbered criterion with
//! pinned tolerances; the body prints a single PASS line when it holds, and
//! a panic marks the criterion failed.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use parisi::calculus::{ddu, gamma_higher, MomentPolynomial};
use parisi::certify::{run_all, Verdict};
use parisi::closedform::{a_n, big_f_delta0, f_delta0};
use parisi::gamma::{criterion_report, gamma_eval, gamma_prime, Side};
use parisi::model::{Atom, AtomicMeasure, Mixture, Temperature};
use parisi::optimize::{
    gap_diagnostics, optimize, parisi_value, rs_value, scan_beta, OptimizeConfig, ScanConfig,
};
use parisi::oracle::free_energy;
use parisi::pde::{eval_phi, solve_phi, PhiStack, QuadratureSpec};

fn t(b: f64) -> Temperature {
    Temperature::new(b).unwrap()
}

fn stack_for(measure: &AtomicMeasure, beta: f64, nodes: usize) -> PhiStack {
    let quad = QuadratureSpec::new(nodes, 40.0).unwrap();
    solve_phi(measure, &Mixture::sk(t(beta)), &quad).unwrap()
}

fn pass(n: u32, what: &str) {
    println!("criterion {n:02} ({what}): PASS");
}

/// Fourth-order central difference f'(x) ≈ (f(x−2h) − 8f(x−h) + 8f(x+h)
/// − f(x+2h)) / 12h.
fn central4(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order backward difference for f'(x) at the right edge of a
/// domain, using only points x, x−h, …, x−4h.
fn backward4(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    (25.0 * f(x) - 48.0 * f(x - h) + 36.0 * f(x - 2.0 * h) - 16.0 * f(x - 3.0 * h)
        + 3.0 * f(x - 4.0 * h))
        / (12.0 * h)
}

#[test]
fn criterion_01_origin_value_is_exact() {
    let delta0 = AtomicMeasure::delta0();
    for b in [0.3, FRAC_1_SQRT_2, 0.75] {
        let stack = stack_for(&delta0, b, 61);
        let v = parisi_value(&stack).unwrap();
        let expected = LN_2 + 0.5 * b * b;
        assert!(
            (v - expected).abs() <= 1e-8,
            "beta {b}: value {v} vs {expected}"
        );
    }
    pass(1, "origin-atom value equals ln2 + beta^2/2");
}

#[test]
fn criterion_02_origin_gamma_and_slope() {
    let delta0 = AtomicMeasure::delta0();
    for b in [FRAC_1_SQRT_2, 0.75] {
        let stack = stack_for(&delta0, b, 61);
        let (g0, _) = gamma_eval(&stack, 0.0).unwrap();
        let gp0 = gamma_prime(&stack, 0.0).unwrap();
        assert!(g0.abs() <= 1e-10, "beta {b}: Gamma(0) = {g0}");
        assert!(
            (gp0 - 2.0 * b * b).abs() <= 1e-9,
            "beta {b}: Gamma'(0) = {gp0} vs {}",
            2.0 * b * b
        );
    }
    pass(2, "Gamma(0) = 0 and Gamma'(0) = 2 beta^2 at the origin atom");
}

#[test]
fn criterion_03_third_derivative_at_origin() {
    let delta0 = AtomicMeasure::delta0();
    for b in [FRAC_1_SQRT_2, 0.75] {
        let stack = stack_for(&delta0, b, 61);
        let g3 = gamma_higher(&stack, 0.0, 3, Side::Plus).unwrap();
        let expected = 80.0 * b.powi(6);
        assert!(
            ((g3 - expected) / expected).abs() <= 1e-6,
            "beta {b}: Gamma'''(0+) = {g3} vs {expected}"
        );
    }
    pass(3, "Gamma'''(0+) = 80 beta^6 at the origin atom");
}

#[test]
fn criterion_04_path_weight_is_normalized() {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let us = [0.05, 0.25, 0.5, 0.75, 0.95];
    for _ in 0..20 {
        let measure = loop {
            let mut qs: Vec<f64> = (0..3).map(|_| rng.random_range(0.02..0.92)).collect();
            qs.sort_by(f64::total_cmp);
            if qs[1] - qs[0] > 0.02 && qs[2] - qs[1] > 0.02 {
                let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
                let mass: f64 = raw.iter().sum();
                let atoms = qs
                    .iter()
                    .zip(&raw)
                    .map(|(&q, &w)| Atom { q, w: w / mass })
                    .collect();
                break AtomicMeasure::new(atoms).unwrap();
            }
        };
        let stack = stack_for(&measure, 0.75, 31);
        for &u in &us {
            let (_, wnorm) = gamma_eval(&stack, u).unwrap();
            assert!(
                (wnorm - 1.0).abs() <= 1e-6,
                "measure {measure:?}, u {u}: E[e^W] = {wnorm}"
            );
        }
    }
    pass(4, "E[e^W] = 1 across random measures and evaluation points");
}

#[test]
fn criterion_05_derivatives_match_finite_differences() {
    let measure = AtomicMeasure::new(vec![
        Atom { q: 0.08, w: 0.3 },
        Atom { q: 0.22, w: 0.4 },
        Atom { q: 0.48, w: 0.3 },
    ])
    .unwrap();
    let stack = stack_for(&measure, 0.75, 41);
    let us = [0.015, 0.13, 0.17, 0.30, 0.36, 0.42, 0.56, 0.70, 0.85, 0.95];
    for &u in &us {
        let fd = central4(|v| gamma_eval(&stack, v).unwrap().0, u, 5e-3);
        let gp = gamma_prime(&stack, u).unwrap();
        assert!(
            (gp - fd).abs() <= 1e-5,
            "u {u}: Gamma' {gp} vs finite difference {fd}"
        );
    }
    for order in 1..=4usize {
        for x in [0.2, 0.9] {
            let fd = central4(|y| eval_phi(&stack, y, 0.03, order - 1).unwrap(), x, 1e-2);
            let dk = eval_phi(&stack, x, 0.03, order).unwrap();
            assert!(
                (dk - fd).abs() <= 1e-6,
                "order {order}, x {x}: {dk} vs finite difference {fd}"
            );
        }
    }
    pass(5, "Gamma' and the x-derivative stack agree with finite differences");
}

#[test]
fn criterion_06_origin_gap_functions_behave() {
    for b in [FRAC_1_SQRT_2, 0.75, 1.0] {
        let beta = t(b);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=500 {
            let x = i as f64 / 500.0;
            let big_f = big_f_delta0(beta, x).unwrap();
            assert!(
                big_f > prev,
                "beta {b}: F not strictly increasing at x = {x}"
            );
            prev = big_f;
            let small_f = f_delta0(beta, x).unwrap();
            assert!(small_f > 0.0, "beta {b}: f({x}) = {small_f} not positive");
        }
    }
    pass(6, "F strictly increasing and f positive at the origin atom");
}

#[test]
fn criterion_07_certificates_all_prove() {
    let start = Instant::now();
    let certs = run_all();
    let elapsed = start.elapsed();
    assert_eq!(certs.len(), 12, "expected 12 certificates");
    for c in &certs {
        assert_eq!(
            c.verdict,
            Verdict::Proved,
            "certificate {} was {:?}",
            c.id,
            c.verdict
        );
    }
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "certificate suite took {elapsed:.2?}"
    );
    pass(7, "all 12 exact certificates prove within the time budget");
}

#[test]
fn criterion_08_gaussian_integration_by_parts() {
    // d/du E[cosh^n(g sqrt(2 beta^2 u))] = beta^2 n (n a_n - (n-1) a_{n-2}),
    // the Stein identity for the Gaussian factor.
    let beta = t(0.75);
    let b2 = 0.75f64 * 0.75;
    for n in [-1i32, -3, -5] {
        for x in [0.1, 0.5, 1.0] {
            // a_n is defined on [0,1]; at the right edge the derivative
            // must be estimated from interior points only.
            let fd = if x + 2e-3 <= 1.0 {
                central4(|u| a_n(beta, u, n).unwrap(), x, 1e-3)
            } else {
                backward4(|u| a_n(beta, u, n).unwrap(), x, 5e-4)
            };
            let exact = b2
                * n as f64
                * (n as f64 * a_n(beta, x, n).unwrap()
                    - (n as f64 - 1.0) * a_n(beta, x, n - 2).unwrap());
            assert!(
                (fd - exact).abs() <= 1e-7,
                "n {n}, x {x}: d/du a_n = {fd} vs {exact}"
            );
        }
    }
    pass(8, "the Gaussian integration-by-parts identity holds for a_n");
}

#[test]
fn criterion_09_temperature_scan_finds_the_transition() {
    let start = Instant::now();
    let cfg = ScanConfig::default();
    assert_eq!((cfg.beta_min, cfg.beta_max, cfg.steps), (0.5, 0.9, 40));
    assert_eq!(cfg.optimize.levels, 3);
    let scan = scan_beta(&cfg).unwrap();
    let elapsed = start.elapsed();
    let transition = scan.transition.expect("a transition must be found");
    assert!(
        (transition - FRAC_1_SQRT_2).abs() <= 0.02,
        "first non-collapsed point at {transition}"
    );
    for row in &scan.rows {
        if row.beta <= FRAC_1_SQRT_2 {
            assert!(row.rs_collapse, "beta {} did not collapse", row.beta);
        }
    }
    assert!(
        elapsed.as_secs_f64() < 900.0,
        "scan took {elapsed:.2?}"
    );
    println!("scan: 41 rows in {elapsed:.2?}, transition at beta = {transition}");
    pass(9, "the 40-step scan collapses up to the critical point and not after");
}

#[test]
fn criterion_10_low_temperature_optimum_is_consistent() {
    let cfg = OptimizeConfig::default();
    let r = optimize(t(0.75), &cfg).unwrap();
    assert!(
        r.value < rs_value(t(0.75)) - 1e-5,
        "value {} does not beat the origin atom",
        r.value
    );
    assert!(
        r.measure.support_end() < 0.25,
        "support end {}",
        r.measure.support_end()
    );
    let stack = stack_for(&r.measure, 0.75, 41);
    let report = criterion_report(&stack).unwrap();
    assert!(
        report.max_residual < 1e-3,
        "max fixed-point residual {}",
        report.max_residual
    );
    let gaps = gap_diagnostics(&stack, 16).unwrap();
    assert!(!gaps.is_empty());
    for gap in &gaps {
        assert!(
            gap.min_g > 0.0,
            "G not positive inside ({}, {})",
            gap.left,
            gap.right
        );
        assert!(
            gap.g_limit_left.abs() <= 1e-3,
            "G limit {} at the left end of ({}, {})",
            gap.g_limit_left,
            gap.left,
            gap.right
        );
    }
    pass(10, "the optimized low-temperature measure passes all diagnostics");
}

#[test]
fn criterion_11_finite_size_reference() {
    let start = Instant::now();
    let est = free_energy(10, 0.5, 500, 1).unwrap();
    let expected = LN_2 + 0.125;
    assert!(
        (est.mean - expected).abs() < 0.1,
        "mean {} vs {expected}",
        est.mean
    );
    assert!(est.stderr < 0.02, "stderr {}", est.stderr);
    let exact = free_energy(10, 0.0, 20, 1).unwrap();
    assert!(
        (exact.mean - LN_2).abs() <= 1e-14,
        "infinite-temperature mean {} vs ln 2",
        exact.mean
    );
    assert_eq!(exact.stderr, 0.0);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "reference run took {elapsed:.2?}"
    );
    pass(11, "the exhaustive finite-N reference matches the high-temperature value");
}

#[test]
fn criterion_12_symbolic_derivatives_are_exact() {
    let gamma = MomentPolynomial::gamma_integrand();
    let first = ddu(&gamma).unwrap();
    assert_eq!(first, MomentPolynomial::gamma_prime_integrand());
    let second = ddu(&first).unwrap();
    assert_eq!(second, MomentPolynomial::gamma_second_integrand());
    let third = ddu(&second).unwrap();
    assert_eq!(third, MomentPolynomial::gamma_third_integrand());
    pass(12, "repeated symbolic differentiation reproduces the exact integrands");
}
