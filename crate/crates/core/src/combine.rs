//! Compound concepts built by combining labels in a weighted binary space.
//!
//! A conjunction `α = ∧ ±L_i` maps to a binary prototype `y_α` (1 for a
//! positive label, 0 for a negated one). With a weighted city-block metric
//! `H_λ` and threshold `U(0, λ_T)` on `{0,1}^n`, membership in `α` reduces to
//! the normalized weighted sum `Σ (λ_i/λ_T) μ_{±L_i}(x_i)`.

use crate::error::{Error, Result};
use crate::labels::Label;

/// Largest arity [`binary_space_oracle`] will enumerate.
pub const ORACLE_MAX_ARITY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negated,
}

impl Sign {
    /// Applies the sign to a membership value.
    #[inline]
    pub fn apply(self, mu: f64) -> f64 {
        match self {
            Sign::Positive => mu,
            Sign::Negated => 1.0 - mu,
        }
    }

    /// Coordinate of the binary prototype.
    pub fn bit(self) -> bool {
        self == Sign::Positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarity(Vec<Sign>);

impl Polarity {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn all_positive(n: usize) -> Self {
        Self(vec![Sign::Positive; n])
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prototype(&self) -> Vec<bool> {
        self.0.iter().map(|s| s.bit()).collect()
    }
}

/// Non-negative dimension weights with a cached positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    total: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w.is_finite() && w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::invalid("weights must have a positive total"));
        }
        Ok(Self { weights, total })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total).collect()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.weights.iter().map(|w| w * factor).collect())
    }
}

/// Weighted city-block distance between binary vectors.
pub fn weighted_hamming(y: &[bool], y_other: &[bool], w: &WeightVector) -> Result<f64> {
    if y.len() != y_other.len() || y.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: if y.len() != w.len() {
                y.len()
            } else {
                y_other.len()
            },
        });
    }
    Ok(y.iter()
        .zip(y_other)
        .zip(w.weights())
        .filter(|((a, b), _)| a != b)
        .map(|(_, w)| w)
        .sum())
}

/// A signed conjunction of labels with per-label weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Compound {
    labels: Vec<Label>,
    polarity: Polarity,
    weights: WeightVector,
}

impl Compound {
    pub fn new(labels: Vec<Label>, polarity: Polarity, weights: WeightVector) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("compound needs at least one label"));
        }
        if polarity.len() != n || weights.len() != n {
            return Err(Error::invalid(format!(
                "compound arity mismatch: {n} labels, {} signs, {} weights",
                polarity.len(),
                weights.len()
            )));
        }
        Ok(Self {
            labels,
            polarity,
            weights,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn polarity(&self) -> &Polarity {
        &self.polarity
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    /// `μ_{±L_i}(x_i)` for each constituent.
    pub fn signed_memberships(&self, x: &[&[f64]]) -> Result<Vec<f64>> {
        if x.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: x.len(),
            });
        }
        self.labels
            .iter()
            .zip(self.polarity.signs())
            .zip(x)
            .map(|((label, sign), xi)| Ok(sign.apply(label.membership(xi)?)))
            .collect()
    }

    /// Membership in the compound at a point of `Ω_1 × … × Ω_n`.
    pub fn membership(&self, x: &[&[f64]]) -> Result<f64> {
        let mu = self.signed_memberships(x)?;
        Ok(self.weighted_sum(&mu))
    }

    /// Normalized weighted sum of already-signed memberships.
    pub fn weighted_sum(&self, signed_mu: &[f64]) -> f64 {
        let total = self.weights.total();
        self.weights
            .weights()
            .iter()
            .zip(signed_mu)
            .map(|(w, m)| w / total * m)
            .sum()
    }
}

/// Brute-force membership in the binary space.
///
/// `mu` holds the unsigned constituent memberships `μ_{L_i}(x_i)`. Each binary
/// vector `y` is weighted by `Π_i Bernoulli(μ_i)(y_i)` and scored with the
/// `U(0, λ_T)` survival of `H_λ(y, y_α)`.
pub fn binary_space_oracle(c: &Compound, mu: &[f64]) -> Result<f64> {
    let n = c.arity();
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.len(),
        });
    }
    if n > ORACLE_MAX_ARITY {
        return Err(Error::invalid(format!(
            "binary-space enumeration refused for arity {n} > {ORACLE_MAX_ARITY}"
        )));
    }
    let prototype = c.polarity().prototype();
    let total = c.weights().total();
    let mut y = vec![false; n];
    let mut acc = 0.0;
    for bits in 0u32..(1u32 << n) {
        let mut mass = 1.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = bits >> i & 1 == 1;
            mass *= if *yi { mu[i] } else { 1.0 - mu[i] };
        }
        if mass == 0.0 {
            continue;
        }
        let d = weighted_hamming(&y, &prototype, c.weights())?;
        acc += mass * (1.0 - d / total).max(0.0);
    }
    Ok(acc)
}

/// Conjunction of two compounds over the same signed labels.
///
/// The result carries the per-label coefficients
/// `(w1 λ_φT λ_θi + w2 λ_θT λ_φi) / (w_T λ_θT λ_φT)`, which sum to 1.
pub fn conjoin_compounds(theta: &Compound, phi: &Compound, w1: f64, w2: f64) -> Result<Compound> {
    if theta.labels != phi.labels {
        return Err(Error::invalid("compounds are over different labels"));
    }
    if theta.polarity != phi.polarity {
        return Err(Error::invalid(
            "mixed-polarity conjunction of compounds is not supported",
        ));
    }
    if !(w1.is_finite() && w2.is_finite() && w1 > 0.0 && w2 > 0.0) {
        return Err(Error::invalid("conjunction weights must be positive"));
    }
    let w_total = w1 + w2;
    let (t_total, p_total) = (theta.weights.total(), phi.weights.total());
    let denom = w_total * t_total * p_total;
    let coefficients = theta
        .weights
        .weights()
        .iter()
        .zip(phi.weights.weights())
        .map(|(lt, lp)| (w1 * p_total * lt + w2 * t_total * lp) / denom)
        .collect();
    Compound::new(
        theta.labels.clone(),
        theta.polarity.clone(),
        WeightVector::new(coefficients)?,
    )
}
