//! Prototype-threshold labels on continuous conceptual spaces.
//!
//! A label `L = <P, d, δ>` is appropriate for an element `x` when `d(x, P)`
//! lies within an uncertain threshold `ε ~ δ`. Membership is therefore the
//! survival function of `δ` evaluated at the distance to the prototype.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A product of closed intervals, one per quality dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptualSpace {
    bounds: Vec<(f64, f64)>,
}

impl ConceptualSpace {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid(
                "conceptual space needs at least one dimension",
            ));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!(
                    "dimension {i}: bounds [{lo}, {hi}] are not a proper interval"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// `[0,1]^dims`.
    pub fn unit(dims: usize) -> Result<Self> {
        Self::new(vec![(0.0, 1.0); dims])
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Checks arity and bounds. Points outside the space are rejected, never clamped.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: x.len(),
            });
        }
        for (dim, (&value, &(lo, hi))) in x.iter().zip(&self.bounds).enumerate() {
            if !(lo..=hi).contains(&value) {
                return Err(Error::OutOfBounds { dim, value, lo, hi });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceMetric {
    Euclidean,
    /// `Σ w_i |x_i - y_i|` with strictly positive weights.
    WeightedCityBlock(Vec<f64>),
}

impl DistanceMetric {
    pub fn weighted_city_block(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::invalid(
                "city-block weights must be non-empty and strictly positive",
            ));
        }
        Ok(Self::WeightedCityBlock(weights))
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        match self {
            DistanceMetric::Euclidean => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()),
            DistanceMetric::WeightedCityBlock(w) => {
                if w.len() != a.len() {
                    return Err(Error::DimensionMismatch {
                        expected: w.len(),
                        found: a.len(),
                    });
                }
                Ok(a.iter()
                    .zip(b)
                    .zip(w)
                    .map(|((x, y), w)| w * (x - y).abs())
                    .sum())
            }
        }
    }
}

type CdfFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Distribution of the uncertain threshold `ε`, represented by its survival function.
#[derive(Clone)]
pub enum ThresholdDistribution {
    /// `U(0, upper)`.
    Uniform { upper: f64 },
    /// Any distribution on `[0, ∞)` given by its CDF.
    Cdf(Arc<CdfFn>),
}

impl ThresholdDistribution {
    pub fn uniform(upper: f64) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(Error::invalid(format!(
                "uniform threshold upper bound must be positive, got {upper}"
            )));
        }
        Ok(Self::Uniform { upper })
    }

    pub fn from_cdf(cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Cdf(Arc::new(cdf))
    }

    /// `P(ε ≥ d)`, clamped to `[0,1]`. Equals 1 at `d = 0`.
    pub fn survival(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 1.0;
        }
        match self {
            ThresholdDistribution::Uniform { upper } => (1.0 - d / upper).clamp(0.0, 1.0),
            ThresholdDistribution::Cdf(cdf) => (1.0 - cdf(d)).clamp(0.0, 1.0),
        }
    }
}

impl fmt::Debug for ThresholdDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdDistribution::Uniform { upper } => write!(f, "Uniform(0, {upper})"),
            ThresholdDistribution::Cdf(_) => f.write_str("Cdf(..)"),
        }
    }
}

impl PartialEq for ThresholdDistribution {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Uniform { upper: a }, Self::Uniform { upper: b }) => a == b,
            (Self::Cdf(a), Self::Cdf(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A prototype-threshold concept on a conceptual space.
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    space: ConceptualSpace,
    prototype: Vec<f64>,
    metric: DistanceMetric,
    threshold: ThresholdDistribution,
}

impl Label {
    pub fn new(
        space: ConceptualSpace,
        prototype: Vec<f64>,
        metric: DistanceMetric,
        threshold: ThresholdDistribution,
    ) -> Result<Self> {
        space.check(&prototype)?;
        if let DistanceMetric::WeightedCityBlock(w) = &metric {
            if w.len() != space.dims() {
                return Err(Error::DimensionMismatch {
                    expected: space.dims(),
                    found: w.len(),
                });
            }
        }
        Ok(Self {
            space,
            prototype,
            metric,
            threshold,
        })
    }

    /// `<1, euclidean, U(0,1)>` on `[0,1]`, for which `μ(x) = x`.
    pub fn canonical() -> Self {
        Self::new(
            ConceptualSpace::unit(1).expect("unit space"),
            vec![1.0],
            DistanceMetric::Euclidean,
            ThresholdDistribution::Uniform { upper: 1.0 },
        )
        .expect("canonical label is valid")
    }

    pub fn space(&self) -> &ConceptualSpace {
        &self.space
    }

    pub fn prototype(&self) -> &[f64] {
        &self.prototype
    }

    pub fn metric(&self) -> &DistanceMetric {
        &self.metric
    }

    pub fn threshold(&self) -> &ThresholdDistribution {
        &self.threshold
    }

    pub fn membership(&self, x: &[f64]) -> Result<f64> {
        self.space.check(x)?;
        let d = self.metric.distance(x, &self.prototype)?;
        Ok(self.threshold.survival(d))
    }

    pub fn negated_membership(&self, x: &[f64]) -> Result<f64> {
        Ok(1.0 - self.membership(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn label_1d(prototype: f64, upper: f64) -> Label {
        Label::new(
            ConceptualSpace::unit(1).unwrap(),
            vec![prototype],
            DistanceMetric::Euclidean,
            ThresholdDistribution::uniform(upper).unwrap(),
        )
        .unwrap()
    }

    /// Midpoint-rule integral of the U(0,b) density over [d, b].
    fn integrate_uniform_tail(d: f64, b: f64) -> f64 {
        let steps = 100_000;
        if d >= b {
            return 0.0;
        }
        let lo = d.max(0.0);
        let dx = (b - lo) / steps as f64;
        (0..steps).map(|_| dx / b).sum()
    }

    #[test]
    fn canonical_membership_is_identity() {
        let l = Label::canonical();
        assert_abs_diff_eq!(l.membership(&[0.3]).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn membership_at_prototype_is_one() {
        let l = label_1d(0.4, 0.2);
        assert_eq!(l.membership(&[0.4]).unwrap(), 1.0);
        assert_eq!(l.negated_membership(&[0.4]).unwrap(), 0.0);
    }

    #[test]
    fn narrow_threshold_matches_quadrature() {
        let l = label_1d(1.0, 0.5);
        let oracle = integrate_uniform_tail(0.4, 0.5);
        assert_abs_diff_eq!(oracle, 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(l.membership(&[0.6]).unwrap(), oracle, epsilon = 1e-9);
    }

    #[test]
    fn negation_examples() {
        let l = Label::canonical();
        assert_abs_diff_eq!(l.negated_membership(&[0.3]).unwrap(), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(
            l.negated_membership(&[0.25]).unwrap(),
            0.75,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_out_of_bounds_and_wrong_arity() {
        let l = Label::canonical();
        assert!(matches!(
            l.membership(&[1.2]),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(
            l.membership(&[0.2, 0.3]),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ConceptualSpace::new(vec![]).is_err());
        assert!(ConceptualSpace::new(vec![(1.0, 1.0)]).is_err());
        assert!(ThresholdDistribution::uniform(0.0).is_err());
        assert!(DistanceMetric::weighted_city_block(vec![1.0, 0.0]).is_err());
        let space = ConceptualSpace::unit(1).unwrap();
        assert!(Label::new(
            space,
            vec![2.0],
            DistanceMetric::Euclidean,
            ThresholdDistribution::uniform(1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn custom_cdf_threshold() {
        // Exponential(1) threshold.
        let space = ConceptualSpace::unit(2).unwrap();
        let l = Label::new(
            space,
            vec![0.0, 0.0],
            DistanceMetric::weighted_city_block(vec![1.0, 2.0]).unwrap(),
            ThresholdDistribution::from_cdf(|t| 1.0 - (-t).exp()),
        )
        .unwrap();
        let d: f64 = 0.5 + 2.0 * 0.25;
        assert_abs_diff_eq!(
            l.membership(&[0.5, 0.25]).unwrap(),
            (-d).exp(),
            epsilon = 1e-12
        );
    }

    proptest! {
        #[test]
        fn membership_in_unit_interval(p in 0.0..=1.0f64, b in 0.01..3.0f64, x in 0.0..=1.0f64) {
            let m = label_1d(p, b).membership(&[x]).unwrap();
            prop_assert!((0.0..=1.0).contains(&m));
        }

        #[test]
        fn membership_non_increasing_in_distance(
            p in 0.0..=1.0f64, b in 0.01..3.0f64, x in 0.0..=1.0f64, y in 0.0..=1.0f64
        ) {
            let l = label_1d(p, b);
            let (near, far) = if (x - p).abs() <= (y - p).abs() { (x, y) } else { (y, x) };
            prop_assert!(l.membership(&[near]).unwrap() >= l.membership(&[far]).unwrap());
        }

        #[test]
        fn uniform_membership_zero_beyond_threshold(p in 0.0..=1.0f64, b in 0.01..1.0f64, x in 0.0..=1.0f64) {
            let m = label_1d(p, b).membership(&[x]).unwrap();
            prop_assert_eq!(m == 0.0, (x - p).abs() >= b);
        }

        #[test]
        fn membership_and_negation_sum_to_one(p in 0.0..=1.0f64, b in 0.01..3.0f64, x in 0.0..=1.0f64) {
            let l = label_1d(p, b);
            let s = l.membership(&[x]).unwrap() + l.negated_membership(&[x]).unwrap();
            prop_assert!((s - 1.0).abs() <= f64::EPSILON);
        }
    }
}
