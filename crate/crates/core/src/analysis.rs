//! Predictions for the long-run behaviour of the language game.
//!
//! With every update `λ' = (1-h)λ + hA`, an agent's weight is a linear
//! recurrence driven by the i.i.d. targets `A`. When `A` does not depend on
//! `λ` (model 2, or model 1 with `w = 1`) the mean and cross-agent variance
//! obey
//!
//! ```text
//! E(λ_{t+1})   = (1-h) E(λ_t) + h E(A)
//! Var(λ_{t+1}) = (1-h)² Var(λ_t) + h² Var(A)
//! ```
//!
//! whose fixed points are `E(A)` and `h/(2-h) Var(A)`. Here `t` counts
//! updates of one agent, not simulation timesteps.
//!
//! For canonical labels (`μ_i(x) = x_i` on `[0,1]²`) the element space splits
//! into quadrants by assertion and each quadrant into a positive and a
//! negative part by the sign of `A - λ`. With `w = 1`, `A` is 1 on the
//! positive part and 0 on the negative part, so `E(A) = p⁺`.

use rayon::prelude::*;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::game::{
    target_weight, Assertion, GameConfig, LabelPair, LambdaInit, Reliability, UpdateModel,
};
use crate::seed::{mix, rng_from_seed};
use crate::stats::Moments;

/// Samples per Monte Carlo shard. Shard boundaries depend only on the
/// sample count, so results do not depend on the worker count.
pub const SHARD_SIZE: usize = 1 << 16;

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Fixed-point iteration stops once successive iterates differ by less than this.
pub const FIXED_POINT_TOL: f64 = 1e-4;
pub const FIXED_POINT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrant {
    /// `x1 ≥ ½, x2 ≥ ½`: `L1 ∧ L2` asserted.
    R1,
    /// `x1 ≥ ½, x2 < ½`: `L1 ∧ ¬L2`.
    R2,
    /// `x1 < ½, x2 ≥ ½`: `¬L1 ∧ L2`.
    R3,
    /// `x1 < ½, x2 < ½`: `¬L1 ∧ ¬L2`.
    R4,
}

impl Quadrant {
    pub fn assertion(self) -> Assertion {
        match self {
            Quadrant::R1 => Assertion::L1AndL2,
            Quadrant::R2 => Assertion::L1AndNotL2,
            Quadrant::R3 => Assertion::NotL1AndL2,
            Quadrant::R4 => Assertion::NotL1AndNotL2,
        }
    }

    /// Quadrant cell within `[0,1]²` as `((x1_lo, x1_hi), (x2_lo, x2_hi))`.
    fn cell(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Quadrant::R1 => ((0.5, 1.0), (0.5, 1.0)),
            Quadrant::R2 => ((0.5, 1.0), (0.0, 0.5)),
            Quadrant::R3 => ((0.0, 0.5), (0.5, 1.0)),
            Quadrant::R4 => ((0.0, 0.5), (0.0, 0.5)),
        }
    }

    /// Coefficients `(a, b, c)` with `a·x1 + b·x2 + c > 0` on the positive part.
    fn positive_halfplane(self) -> (f64, f64, f64) {
        match self {
            Quadrant::R1 => (1.0, -1.0, 0.0),
            Quadrant::R2 => (1.0, 1.0, -1.0),
            Quadrant::R3 => (-1.0, -1.0, 1.0),
            Quadrant::R4 => (-1.0, 1.0, 0.0),
        }
    }

    const ALL: [Quadrant; 4] = [Quadrant::R1, Quadrant::R2, Quadrant::R3, Quadrant::R4];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdatePolarity {
    Positive,
    Negative,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub quadrant: Quadrant,
    pub polarity: UpdatePolarity,
}

/// Region of `x` under canonical labels.
///
/// Quadrant ties at `x_i = ½` follow the assertion tie-break (the positive label).
pub fn classify_region(x: [f64; 2]) -> Region {
    let [x1, x2] = x;
    let quadrant = match (x1 >= 0.5, x2 >= 0.5) {
        (true, true) => Quadrant::R1,
        (true, false) => Quadrant::R2,
        (false, true) => Quadrant::R3,
        (false, false) => Quadrant::R4,
    };
    let (a, b, c) = quadrant.positive_halfplane();
    let discriminant = a * x1 + b * x2 + c;
    let polarity = if discriminant > 0.0 {
        UpdatePolarity::Positive
    } else if discriminant < 0.0 {
        UpdatePolarity::Negative
    } else {
        UpdatePolarity::Boundary
    };
    Region { quadrant, polarity }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPlus {
    pub value: f64,
    /// Present for Monte Carlo estimates.
    pub std_error: Option<f64>,
    pub method: EstimateMethod,
}

type Polygon = Vec<[f64; 2]>;

fn rectangle((x_lo, x_hi): (f64, f64), (y_lo, y_hi): (f64, f64)) -> Polygon {
    vec![[x_lo, y_lo], [x_hi, y_lo], [x_hi, y_hi], [x_lo, y_hi]]
}

/// Sutherland-Hodgman clip of a convex polygon to `a·x + b·y + c ≥ 0`.
fn clip(poly: &[[f64; 2]], (a, b, c): (f64, f64, f64)) -> Polygon {
    let side = |p: [f64; 2]| a * p[0] + b * p[1] + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..poly.len())
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    twice.abs() / 2.0
}

fn intersect((a, b): (f64, f64), (c, d): (f64, f64)) -> Option<(f64, f64)> {
    let (lo, hi) = (a.max(c), b.min(d));
    (lo < hi).then_some((lo, hi))
}

/// Exact `p⁺` for a product-uniform box inside `[0,1]²`.
pub fn p_plus_uniform_box(x1: (f64, f64), x2: (f64, f64)) -> f64 {
    let total = (x1.1 - x1.0) * (x2.1 - x2.0);
    let positive: f64 = Quadrant::ALL
        .iter()
        .filter_map(|q| {
            let (c1, c2) = q.cell();
            let rect = rectangle(intersect(x1, c1)?, intersect(x2, c2)?);
            Some(area(&clip(&rect, q.positive_halfplane())))
        })
        .sum();
    positive / total
}

/// Runs `per_sample` over `n_samples` draws from `env`, sharded deterministically.
fn sharded_moments<F>(
    env: &Environment,
    n_samples: usize,
    seed: u64,
    per_sample: F,
) -> Result<Moments>
where
    F: Fn([f64; 2], &mut Moments) -> Result<()> + Sync,
{
    let shards = n_samples.div_ceil(SHARD_SIZE);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = rng_from_seed(mix(seed, shard as u64));
            let len = SHARD_SIZE.min(n_samples - shard * SHARD_SIZE);
            let mut acc = Moments::new();
            for _ in 0..len {
                per_sample(env.sample(&mut rng), &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().fold(Moments::new(), |acc, m| acc.merge(m)))
}

/// Monte Carlo `p⁺` with its binomial standard error.
pub fn p_plus_monte_carlo(env: &Environment, n_samples: usize, seed: u64) -> Result<PPlus> {
    if n_samples == 0 {
        return Err(Error::Estimation("no samples requested".into()));
    }
    let m = sharded_moments(env, n_samples, seed, |x, acc| {
        acc.push(f64::from(
            classify_region(x).polarity == UpdatePolarity::Positive,
        ));
        Ok(())
    })?;
    let p = m.mean();
    Ok(PPlus {
        value: p,
        std_error: Some((p * (1.0 - p) / n_samples as f64).sqrt()),
        method: EstimateMethod::MonteCarlo,
    })
}

/// `p⁺` under canonical labels: analytic for uniform boxes, Monte Carlo otherwise.
pub fn p_plus(env: &Environment) -> Result<PPlus> {
    match env.as_uniform_box() {
        Some((x1, x2)) => Ok(PPlus {
            value: p_plus_uniform_box(x1, x2),
            std_error: None,
            method: EstimateMethod::Analytic,
        }),
        None => p_plus_monte_carlo(env, DEFAULT_SAMPLES, 0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AMoments {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Samples that produced an update.
    pub count: u64,
    pub std_error: f64,
}

impl From<Moments> for AMoments {
    fn from(m: Moments) -> Self {
        Self {
            mean: m.mean(),
            variance: m.sample_variance(),
            count: m.count(),
            std_error: m.sem(),
        }
    }
}

/// The target `A` and the two signed memberships of the asserted compound.
#[derive(Debug, Clone, Copy)]
struct TargetSample {
    a: f64,
    first: f64,
    second: f64,
}

#[inline]
fn target_sample(labels: &LabelPair, x: [f64; 2], w: f64) -> Result<Option<TargetSample>> {
    let m = labels.memberships(x)?;
    // Assertion is independent of λ ∈ (0,1).
    let asserted = Assertion::select(0.5, m);
    let (first, second) = asserted.signed(m);
    Ok(target_weight(asserted, m, w).map(|a| TargetSample { a, first, second }))
}

/// Monte Carlo mean and variance of the realized targets `A`.
///
/// Under model 2 every sample updates. Under model 1 only samples with
/// `μ_α(x) ≤ w` at the population's fixed-point weight count; see
/// [`model1_fixed_point`].
pub fn estimate_a_moments(
    env: &Environment,
    labels: &LabelPair,
    w: f64,
    model: UpdateModel,
    n_samples: usize,
    seed: u64,
) -> Result<AMoments> {
    match model {
        UpdateModel::Mismatch => {
            let m = sharded_moments(env, n_samples, seed, |x, acc| {
                if let Some(s) = target_sample(labels, x, w)? {
                    acc.push(s.a);
                }
                Ok(())
            })?;
            if m.count() == 0 {
                return Err(Error::Estimation("no sample produced an update".into()));
            }
            Ok(m.into())
        }
        UpdateModel::Threshold => Ok(model1_fixed_point(env, labels, w, n_samples, seed)?.moments),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub lambda: f64,
    pub iterations: usize,
    /// Moments of `A` over the samples that update at `lambda`.
    pub moments: AMoments,
}

/// Stationary population weight under model 1.
///
/// The update condition `μ_α(x; λ) ≤ w` depends on `λ`, so the resting mean
/// solves `λ = E[A | μ_α(x; λ) ≤ w]`. Iterates that map from `λ = ½` over a
/// fixed sample set.
pub fn model1_fixed_point(
    env: &Environment,
    labels: &LabelPair,
    w: f64,
    n_samples: usize,
    seed: u64,
) -> Result<FixedPoint> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::invalid(format!("w must lie in [0,1], got {w}")));
    }
    if n_samples == 0 {
        return Err(Error::Estimation("no samples requested".into()));
    }
    let shards = n_samples.div_ceil(SHARD_SIZE);
    let samples: Vec<TargetSample> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = rng_from_seed(mix(seed, shard as u64));
            let len = SHARD_SIZE.min(n_samples - shard * SHARD_SIZE);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                if let Some(s) = target_sample(labels, env.sample(&mut rng), w)? {
                    out.push(s);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<_>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let conditional = |lambda: f64| -> Moments {
        let parts: Vec<Moments> = samples
            .par_chunks(SHARD_SIZE)
            .map(|chunk| {
                chunk
                    .iter()
                    .filter(|s| lambda * s.first + (1.0 - lambda) * s.second <= w)
                    .map(|s| s.a)
                    .collect()
            })
            .collect();
        parts.iter().fold(Moments::new(), |acc, m| acc.merge(m))
    };

    let mut lambda = 0.5;
    for iteration in 1..=FIXED_POINT_MAX_ITER {
        let m = conditional(lambda);
        if m.count() == 0 {
            return Err(Error::NonConvergence {
                iterations: iteration,
                reason: format!("no sample updates at lambda = {lambda}"),
            });
        }
        let next = m.mean();
        if (next - lambda).abs() < FIXED_POINT_TOL {
            return Ok(FixedPoint {
                lambda: next,
                iterations: iteration,
                moments: m.into(),
            });
        }
        lambda = next;
    }
    Err(Error::NonConvergence {
        iterations: FIXED_POINT_MAX_ITER,
        reason: format!("iterates still moving at lambda = {lambda}"),
    })
}

/// `E(λ_t) = E(λ_0)(1-h)^t + E(A)(1 - (1-h)^t)`, `t` in per-agent updates.
pub fn predict_mean_trajectory(e_lambda0: f64, e_a: f64, h: f64, t: f64) -> f64 {
    let decay = (1.0 - h).powf(t);
    e_lambda0 * decay + e_a * (1.0 - decay)
}

/// `Var(λ_t) = Var(λ_0)(1-h)^{2t} + h/(2-h) Var(A)(1 - (1-h)^{2t})`.
pub fn predict_var_trajectory(var_lambda0: f64, var_a: f64, h: f64, t: f64) -> f64 {
    let decay = (1.0 - h).powf(2.0 * t);
    var_lambda0 * decay + resting_variance(var_a, h) * (1.0 - decay)
}

/// Stationary cross-agent variance `h/(2-h) Var(A)`.
pub fn resting_variance(var_a: f64, h: f64) -> f64 {
    h / (2.0 - h) * var_a
}

/// Smallest `t ≥ 0` with `gap · rate^t ≤ tol`.
fn updates_until(gap: f64, tol: f64, log_rate: f64) -> Result<u64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let gap = gap.abs();
    if gap <= tol {
        return Ok(0);
    }
    let mut t = ((tol.ln() - gap.ln()) / log_rate).ceil().max(0.0) as u64;
    // Guard the ceiling against rounding in the logarithms.
    while t > 0 && gap * (log_rate * (t - 1) as f64).exp() <= tol {
        t -= 1;
    }
    while gap * (log_rate * t as f64).exp() > tol {
        t += 1;
    }
    Ok(t)
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("h must lie in (0,1), got {h}")))
    }
}

/// Per-agent updates until `|E(λ_t) - E(A)| ≤ tol`.
pub fn convergence_time_mean(tol: f64, h: f64, e_lambda0: f64, e_a: f64) -> Result<u64> {
    check_h(h)?;
    updates_until(e_lambda0 - e_a, tol, (1.0 - h).ln())
}

/// Per-agent updates until `|Var(λ_t) - h/(2-h) Var(A)| ≤ tol`.
pub fn convergence_time_var(tol: f64, h: f64, var_lambda0: f64, var_a: f64) -> Result<u64> {
    check_h(h)?;
    updates_until(
        var_lambda0 - resting_variance(var_a, h),
        tol,
        2.0 * (1.0 - h).ln(),
    )
}

/// Mean and variance of the initial weights implied by a config.
pub fn initial_moments(init: &LambdaInit) -> (f64, f64) {
    match init {
        LambdaInit::Uniform => (0.5, 1.0 / 12.0),
        LambdaInit::Fixed(v) => (*v, 0.0),
        LambdaInit::PerAgent(vs) => {
            let m: Moments = vs.iter().copied().collect();
            (m.mean(), m.sample_variance())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Only defined for canonical labels.
    pub p_plus: Option<PPlus>,
    pub a: AMoments,
    pub e_lambda_rest: f64,
    pub var_lambda_rest: f64,
    pub e_lambda0: f64,
    pub var_lambda0: f64,
    pub tol: f64,
    /// Per-agent updates until the mean is within `tol` of rest.
    pub t_mean: u64,
    /// Per-agent updates until the variance is within `tol` of rest.
    pub t_var: u64,
    /// The same bounds in simulation timesteps.
    pub timesteps_mean: u64,
    pub timesteps_var: u64,
}

/// Closed-form and Monte Carlo predictions for a game configuration.
pub fn predict(
    game: &GameConfig,
    env: &Environment,
    tol: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Prediction> {
    game.validate()?;
    let w = match game.reliability {
        Reliability::Global(w) => w,
        Reliability::PerAgent(_) => {
            return Err(Error::invalid("predictions need a global reliability w"))
        }
    };
    let p_plus = if game.labels == LabelPair::canonical() {
        Some(p_plus(env)?)
    } else {
        None
    };
    let (e_lambda_rest, a) = match game.model {
        UpdateModel::Mismatch => {
            let a = estimate_a_moments(env, &game.labels, w, game.model, n_samples, seed)?;
            (a.mean, a)
        }
        UpdateModel::Threshold => {
            let fp = model1_fixed_point(env, &game.labels, w, n_samples, seed)?;
            (fp.lambda, fp.moments)
        }
    };
    let (e_lambda0, var_lambda0) = initial_moments(&game.lambda_init);
    let t_mean = convergence_time_mean(tol, game.h, e_lambda0, e_lambda_rest)?;
    let t_var = convergence_time_var(tol, game.h, var_lambda0, a.variance)?;
    let turns = game.schedule.listener_turns_per_timestep(game.n_agents);
    let to_timesteps = |t: u64| (t as f64 / turns).ceil() as u64;
    Ok(Prediction {
        p_plus,
        a,
        e_lambda_rest,
        var_lambda_rest: resting_variance(a.variance, game.h),
        e_lambda0,
        var_lambda0,
        tol,
        t_mean,
        t_var,
        timesteps_mean: to_timesteps(t_mean),
        timesteps_var: to_timesteps(t_var),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::AxisDistribution;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn env(x1: (f64, f64), x2: (f64, f64)) -> Environment {
        Environment::uniform_box(x1, x2).unwrap()
    }

    /// Midpoint-grid quadrature of the positive-region indicator, written
    /// with the equivalent characterization |x1 - ½| > |x2 - ½|.
    fn p_plus_grid(x1: (f64, f64), x2: (f64, f64), n: usize) -> f64 {
        let mut hits = 0usize;
        for i in 0..n {
            let a = x1.0 + (x1.1 - x1.0) * (i as f64 + 0.5) / n as f64;
            for j in 0..n {
                let b = x2.0 + (x2.1 - x2.0) * (j as f64 + 0.5) / n as f64;
                if (a - 0.5).abs() > (b - 0.5).abs() {
                    hits += 1;
                }
            }
        }
        hits as f64 / (n * n) as f64
    }

    #[test]
    fn region_examples() {
        assert_eq!(
            classify_region([0.8, 0.6]),
            Region {
                quadrant: Quadrant::R1,
                polarity: UpdatePolarity::Positive
            }
        );
        assert_eq!(
            classify_region([0.3, 0.1]),
            Region {
                quadrant: Quadrant::R4,
                polarity: UpdatePolarity::Negative
            }
        );
        assert_eq!(
            classify_region([0.5, 0.5]).polarity,
            UpdatePolarity::Boundary
        );
    }

    #[test]
    fn p_plus_examples() {
        assert_abs_diff_eq!(
            p_plus_uniform_box((0.0, 1.0), (0.0, 0.5)),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p_plus_uniform_box((0.25, 0.75), (0.0, 0.5)),
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p_plus_uniform_box((0.0, 1.0), (0.0, 1.0)),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p_plus_grid((0.25, 0.75), (0.0, 0.5), 2000),
            0.25,
            epsilon = 1e-3
        );
    }

    #[test]
    fn p_plus_falls_back_to_monte_carlo() {
        let e = Environment::new(
            AxisDistribution::Constant(0.9),
            AxisDistribution::uniform(0.0, 1.0).unwrap(),
            [(0.0, 1.0); 2],
        )
        .unwrap();
        let p = p_plus(&e).unwrap();
        assert_eq!(p.method, EstimateMethod::MonteCarlo);
        // Positive exactly when |x2 - ½| < 0.4.
        assert!((p.value - 0.8).abs() < 4.0 * p.std_error.unwrap());
    }

    #[test]
    fn a_moments_full_reliability() {
        let e = env((0.25, 0.75), (0.0, 0.5));
        let m = estimate_a_moments(
            &e,
            &LabelPair::canonical(),
            1.0,
            UpdateModel::Mismatch,
            200_000,
            5,
        )
        .unwrap();
        assert!((m.mean - 0.25).abs() < 4.0 * m.std_error);
        assert!((m.variance - 0.1875).abs() < 0.005);
    }

    #[test]
    fn a_moments_point_mass() {
        let e = Environment::new(
            AxisDistribution::Constant(0.8),
            AxisDistribution::Constant(0.6),
            [(0.0, 1.0); 2],
        )
        .unwrap();
        let m = estimate_a_moments(
            &e,
            &LabelPair::canonical(),
            1.0,
            UpdateModel::Mismatch,
            1000,
            1,
        )
        .unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 0.0));
    }

    #[test]
    fn a_moments_are_reproducible() {
        let e = env((0.0, 1.0), (0.0, 0.5));
        let l = LabelPair::canonical();
        let a = estimate_a_moments(&e, &l, 0.7, UpdateModel::Mismatch, 150_000, 9).unwrap();
        let b = estimate_a_moments(&e, &l, 0.7, UpdateModel::Mismatch, 150_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_point_full_reliability_is_p_plus() {
        let e = env((0.0, 1.0), (0.0, 0.5));
        let fp = model1_fixed_point(&e, &LabelPair::canonical(), 1.0, 200_000, 3).unwrap();
        assert!((fp.lambda - 0.5).abs() < 4.0 * fp.moments.std_error);
    }

    #[test]
    fn fixed_point_zero_reliability_never_updates() {
        let e = env((0.0, 1.0), (0.0, 0.5));
        assert!(matches!(
            model1_fixed_point(&e, &LabelPair::canonical(), 0.0, 10_000, 3),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn trajectory_examples() {
        assert_eq!(predict_mean_trajectory(0.3, 0.7, 0.01, 0.0), 0.3);
        assert_abs_diff_eq!(
            predict_mean_trajectory(0.3, 0.7, 0.01, 1e5),
            0.7,
            epsilon = 1e-12
        );
        let mut e = 0.5;
        for _ in 0..2000 {
            e = (1.0 - 1e-3) * e + 1e-3 * 0.25;
        }
        assert_abs_diff_eq!(
            predict_mean_trajectory(0.5, 0.25, 1e-3, 2000.0),
            e,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(e, 0.2838, epsilon = 1e-4);

        assert_eq!(predict_var_trajectory(0.02, 0.1875, 0.01, 0.0), 0.02);
        assert_abs_diff_eq!(
            predict_var_trajectory(0.02, 0.1875, 0.01, 1e5),
            0.01 / 1.99 * 0.1875,
            epsilon = 1e-15
        );
        let mut v = 1.0 / 12.0;
        for _ in 0..1000 {
            v = (1.0 - 1e-3f64).powi(2) * v + 1e-6 * 0.1875;
        }
        assert_abs_diff_eq!(
            predict_var_trajectory(1.0 / 12.0, 0.1875, 1e-3, 1000.0),
            v,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(v, 0.0113478, epsilon = 1e-6);
    }

    /// Smallest t with gap·(1-h)^(k·t) ≤ tol by direct search.
    fn linear_search(gap: f64, tol: f64, h: f64, k: i32) -> u64 {
        let mut t = 0u64;
        let mut g = gap;
        while g > tol {
            g *= (1.0 - h).powi(k);
            t += 1;
        }
        t
    }

    #[test]
    fn convergence_time_examples() {
        assert_eq!(convergence_time_mean(0.01, 1e-3, 0.25, 0.255).unwrap(), 0);
        let t = convergence_time_mean(0.01, 1e-3, 0.5, 0.25).unwrap();
        assert_eq!(t, 3218);
        assert_eq!(t, linear_search(0.25, 0.01, 1e-3, 1));
        let t = convergence_time_var(1e-4, 1e-3, 0.08, 0.0).unwrap();
        assert_eq!(t, 3341);
        assert_eq!(t, linear_search(0.08, 1e-4, 1e-3, 2));
        assert!(convergence_time_mean(0.0, 1e-3, 0.5, 0.25).is_err());
        assert!(convergence_time_mean(0.01, 1.0, 0.5, 0.25).is_err());
    }

    #[test]
    fn predict_reports_timesteps() {
        let game = GameConfig {
            model: UpdateModel::Mismatch,
            ..GameConfig::default()
        };
        let p = predict(&game, &env((0.25, 0.75), (0.0, 0.5)), 0.01, 100_000, 2).unwrap();
        assert_eq!(p.p_plus.unwrap().value, 0.25);
        assert_eq!(p.timesteps_mean, p.t_mean.div_ceil(9));
        assert_abs_diff_eq!(
            p.var_lambda_rest,
            1e-3 / 1.999 * p.a.variance,
            epsilon = 1e-15
        );
    }

    proptest! {
        #[test]
        fn analytic_p_plus_matches_grid(
            a in 0.0..0.9f64, wa in 0.05..1.0f64, b in 0.0..0.9f64, wb in 0.05..1.0f64
        ) {
            let x1 = (a, (a + wa).min(1.0));
            let x2 = (b, (b + wb).min(1.0));
            let exact = p_plus_uniform_box(x1, x2);
            prop_assert!((exact - p_plus_grid(x1, x2, 400)).abs() < 0.01);
        }

        #[test]
        fn region_quadrant_matches_assertion(x1 in 0.0..=1.0f64, x2 in 0.0..=1.0f64, lambda in 0.001..0.999f64) {
            prop_assume!((x1 - 0.5).abs() > 1e-9 && (x2 - 0.5).abs() > 1e-9);
            let m = LabelPair::canonical().memberships([x1, x2]).unwrap();
            prop_assert_eq!(classify_region([x1, x2]).quadrant.assertion(), Assertion::select(lambda, m));
        }

        #[test]
        fn mean_trajectory_satisfies_recurrence(
            e0 in 0.0..=1.0f64, ea in 0.0..=1.0f64, h in 1e-4..0.5f64, t in 0u32..5000
        ) {
            let t = t as f64;
            let next = predict_mean_trajectory(e0, ea, h, t + 1.0);
            let step = (1.0 - h) * predict_mean_trajectory(e0, ea, h, t) + h * ea;
            prop_assert!((next - step).abs() < 1e-12);
        }

        #[test]
        fn var_trajectory_satisfies_recurrence(
            v0 in 0.0..0.25f64, va in 0.0..0.25f64, h in 1e-4..0.5f64, t in 0u32..5000
        ) {
            let t = t as f64;
            let next = predict_var_trajectory(v0, va, h, t + 1.0);
            let step = (1.0 - h).powi(2) * predict_var_trajectory(v0, va, h, t) + h * h * va;
            prop_assert!((next - step).abs() < 1e-12);
        }

        #[test]
        fn long_run_matches_resting_values(
            e0 in 0.0..=1.0f64, ea in 0.0..=1.0f64, v0 in 0.0..0.25f64, va in 0.0..0.25f64, h in 1e-3..0.5f64
        ) {
            let t = 10.0 / h;
            let tol = (1.0 - h).powf(2.0 * t);
            prop_assert!((predict_mean_trajectory(e0, ea, h, t) - ea).abs() <= 10.0 * tol.sqrt());
            prop_assert!((predict_var_trajectory(v0, va, h, t) - resting_variance(va, h)).abs() <= 10.0 * tol);
        }
    }
}
