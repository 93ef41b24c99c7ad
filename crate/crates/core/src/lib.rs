//! Weighted-sum concept combination and the language game that tunes its weights.
//!
//! Labels are prototype-threshold concepts on continuous conceptual spaces
//! ([`labels`]). Conjunctions of labels are combined in a weighted binary
//! space, which makes compound membership a normalized weighted sum
//! ([`combine`]). Agents playing the language game ([`game`]) adjust the
//! weight they give each constituent until the population agrees; the
//! resting point and the speed of convergence are predicted in closed form
//! by [`analysis`] and checked against replicated simulations by
//! [`experiment`].

pub mod analysis;
pub mod combine;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod game;
pub mod labels;
pub mod seed;
pub mod stats;

pub use analysis::{
    classify_region, p_plus, predict, Prediction, Quadrant, Region, UpdatePolarity,
};
pub use combine::{
    binary_space_oracle, conjoin_compounds, weighted_hamming, Compound, Polarity, Sign,
    WeightVector,
};
pub use environment::{AxisDistribution, Environment};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, RunRecord};
pub use game::{
    AgentState, Assertion, GameConfig, LabelPair, LambdaInit, Reliability, Schedule, Simulation,
    UpdateModel,
};
pub use labels::{ConceptualSpace, DistanceMetric, Label, ThresholdDistribution};
pub use stats::Moments;
