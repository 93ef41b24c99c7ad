//! Shared fixtures for the benchmarks.

use rand::Rng;

use lexweight_core::seed::rng_from_seed;
use lexweight_core::{Compound, Label, Polarity, Sign, WeightVector};

/// A compound of `arity` canonical labels with random weights and polarity,
/// and a random membership vector to evaluate it at.
pub fn random_compound(arity: usize, seed: u64) -> (Compound, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let weights: Vec<f64> = (0..arity).map(|_| rng.random_range(0.01..1.0)).collect();
    let signs = (0..arity)
        .map(|_| {
            if rng.random() {
                Sign::Positive
            } else {
                Sign::Negated
            }
        })
        .collect();
    let mu = (0..arity).map(|_| rng.random()).collect();
    let compound = Compound::new(
        vec![Label::canonical(); arity],
        Polarity::new(signs),
        WeightVector::new(weights).expect("positive weights"),
    )
    .expect("matching arity");
    (compound, mu)
}
