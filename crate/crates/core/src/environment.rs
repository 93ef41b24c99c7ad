//! Element distributions over the two-dimensional game space.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Point mass.
    Constant(f64),
}

impl AxisDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!(
                "uniform({lo},{hi}) needs finite lo < hi"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    /// Smallest interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            AxisDistribution::Uniform { lo, hi } => (lo, hi),
            AxisDistribution::Constant(v) => (v, v),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AxisDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            AxisDistribution::Constant(v) => v,
        }
    }
}

impl fmt::Display for AxisDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisDistribution::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            AxisDistribution::Constant(v) => write!(f, "constant({v})"),
        }
    }
}

/// Product distribution generating elements `x = (x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub x1: AxisDistribution,
    pub x2: AxisDistribution,
}

impl Environment {
    /// Validates that both supports lie inside `bounds`.
    pub fn new(
        x1: AxisDistribution,
        x2: AxisDistribution,
        bounds: [(f64, f64); 2],
    ) -> Result<Self> {
        for (i, (axis, (blo, bhi))) in [x1, x2].iter().zip(bounds).enumerate() {
            let (lo, hi) = axis.support();
            if lo < blo || hi > bhi {
                return Err(Error::invalid(format!(
                    "env.x{}: support [{lo},{hi}] leaves the space [{blo},{bhi}]",
                    i + 1
                )));
            }
        }
        Ok(Self { x1, x2 })
    }

    /// Product of two uniform axes inside the unit square.
    pub fn uniform_box(x1: (f64, f64), x2: (f64, f64)) -> Result<Self> {
        Self::new(
            AxisDistribution::uniform(x1.0, x1.1)?,
            AxisDistribution::uniform(x2.0, x2.1)?,
            [(0.0, 1.0); 2],
        )
    }

    /// Both axes uniform: `Some(((lo1, hi1), (lo2, hi2)))`.
    pub fn as_uniform_box(&self) -> Option<((f64, f64), (f64, f64))> {
        match (self.x1, self.x2) {
            (
                AxisDistribution::Uniform { lo: a, hi: b },
                AxisDistribution::Uniform { lo: c, hi: d },
            ) => Some(((a, b), (c, d))),
            _ => None,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let a = self.x1.sample(rng);
        let b = self.x2.sample(rng);
        [a, b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn samples_stay_in_support() {
        let env = Environment::uniform_box((0.25, 0.75), (0.0, 0.5)).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..10_000 {
            let [a, b] = env.sample(&mut rng);
            assert!((0.25..0.75).contains(&a));
            assert!((0.0..0.5).contains(&b));
        }
    }

    #[test]
    fn rejects_supports_outside_space() {
        assert!(Environment::uniform_box((0.5, 1.5), (0.0, 1.0)).is_err());
        assert!(AxisDistribution::uniform(0.4, 0.4).is_err());
        assert!(Environment::new(
            AxisDistribution::Constant(-0.1),
            AxisDistribution::Constant(0.2),
            [(0.0, 1.0); 2]
        )
        .is_err());
    }
}
