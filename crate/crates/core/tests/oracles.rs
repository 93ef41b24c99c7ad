//! Monte Carlo estimators checked against independent deterministic oracles.

use lexweight_core::analysis::{
    estimate_a_moments, model1_fixed_point, p_plus_monte_carlo, p_plus_uniform_box,
};
use lexweight_core::{Environment, LabelPair, UpdateModel};

/// Model-1 resting weight by midpoint-grid quadrature and bisection on
/// `g(λ) = E[(A - λ) · 1{λ a + (1-λ) b ≤ w}]`, written directly in terms of
/// `x` for canonical labels (a = max(x1, 1-x1), b = max(x2, 1-x2)).
fn model1_rest_by_quadrature(x1: (f64, f64), x2: (f64, f64), w: f64, n: usize) -> f64 {
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = x1.0 + (x1.1 - x1.0) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let v = x2.0 + (x2.1 - x2.0) * (j as f64 + 0.5) / n as f64;
            let a = u.max(1.0 - u);
            let b = v.max(1.0 - v);
            if a != b {
                cells.push((a, b, ((w - b) / (a - b)).clamp(0.0, 1.0)));
            }
        }
    }
    let g = |l: f64| -> f64 {
        cells
            .iter()
            .filter(|(a, b, _)| l * a + (1.0 - l) * b <= w)
            .map(|(_, _, target)| target - l)
            .sum()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Frozen from the quadrature oracle above (4000² grid): 0.364906.
const MODEL1_REST_ENV_B_W08: f64 = 0.364906;

#[test]
fn model1_fixed_point_regression() {
    let oracle = model1_rest_by_quadrature((0.25, 0.75), (0.0, 0.5), 0.8, 1000);
    assert!(
        (oracle - MODEL1_REST_ENV_B_W08).abs() < 5e-4,
        "oracle {oracle}"
    );

    let env = Environment::uniform_box((0.25, 0.75), (0.0, 0.5)).unwrap();
    let fp = model1_fixed_point(&env, &LabelPair::canonical(), 0.8, 1_000_000, 2024).unwrap();
    assert!(
        (fp.lambda - MODEL1_REST_ENV_B_W08).abs() < 2e-3,
        "fixed point {} after {} iterations",
        fp.lambda,
        fp.iterations
    );
}

#[test]
fn model1_fixed_point_at_full_reliability_matches_a_moments() {
    let env = Environment::uniform_box((0.0, 1.0), (0.0, 0.5)).unwrap();
    let labels = LabelPair::canonical();
    let fp = model1_fixed_point(&env, &labels, 1.0, 300_000, 8).unwrap();
    let m2 = estimate_a_moments(&env, &labels, 1.0, UpdateModel::Mismatch, 300_000, 8).unwrap();
    // Same samples, same (unconditional) update set.
    assert_eq!(fp.moments, m2);
    assert_eq!(fp.lambda, m2.mean);
}

#[test]
fn full_reliability_target_variance_is_bernoulli() {
    let env = Environment::uniform_box((0.25, 0.75), (0.0, 0.5)).unwrap();
    let m = estimate_a_moments(
        &env,
        &LabelPair::canonical(),
        1.0,
        UpdateModel::Mismatch,
        1_000_000,
        77,
    )
    .unwrap();
    // Var of a Bernoulli(p) sample variance is about p(1-p)(1-4p(1-p))/n.
    let se = (0.1875f64 * (1.0 - 4.0 * 0.1875) / 1e6).sqrt();
    assert!(
        (m.variance - 0.1875).abs() < 4.0 * se,
        "Var(A) = {}",
        m.variance
    );
}

#[test]
fn monte_carlo_p_plus_brackets_the_exact_value() {
    for (x1, x2) in [
        ((0.0, 1.0), (0.0, 0.5)),
        ((0.1, 0.4), (0.55, 0.95)),
        ((0.3, 0.9), (0.2, 0.6)),
    ] {
        let env = Environment::uniform_box(x1, x2).unwrap();
        let mc = p_plus_monte_carlo(&env, 400_000, 5).unwrap();
        let exact = p_plus_uniform_box(x1, x2);
        assert!(
            (mc.value - exact).abs() < 4.0 * mc.std_error.unwrap().max(1e-9),
            "{x1:?} x {x2:?}: {} vs {exact}",
            mc.value
        );
    }
}
