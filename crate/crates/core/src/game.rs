//! The two-label language game.
//!
//! Every agent shares labels `L1` on `Ω1` and `L2` on `Ω2` and holds a single
//! weight `λ`, so that `μ_{L1∧L2}(x) = λ μ_{L1}(x1) + (1-λ) μ_{L2}(x2)`.
//! A speaker asserts whichever of the four signed conjunctions fits the
//! shown element best; the listener may then move its `λ` a step `h`
//! towards the weight `A` at which the assertion would be exactly as
//! appropriate as the speaker is reliable.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::combine::Sign;
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::labels::Label;
use crate::seed::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub id: usize,
    /// Weight on the first label; the second gets `1 - lambda`.
    pub lambda: f64,
    /// Reliability `w` other agents attribute to this agent as a speaker.
    pub reliability: f64,
}

impl AgentState {
    pub fn new(id: usize, lambda: f64, reliability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!(
                "agent {id}: lambda {lambda} not in [0,1]"
            )));
        }
        if !(0.0..=1.0).contains(&reliability) {
            return Err(Error::invalid(format!(
                "agent {id}: reliability {reliability} not in [0,1]"
            )));
        }
        Ok(Self {
            id,
            lambda,
            reliability,
        })
    }
}

/// The four signed conjunctions a speaker can assert, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assertion {
    /// `L1 ∧ L2`
    L1AndL2,
    /// `L1 ∧ ¬L2`
    L1AndNotL2,
    /// `¬L1 ∧ L2`
    NotL1AndL2,
    /// `¬L1 ∧ ¬L2`
    NotL1AndNotL2,
}

impl Assertion {
    pub const ALL: [Assertion; 4] = [
        Assertion::L1AndL2,
        Assertion::L1AndNotL2,
        Assertion::NotL1AndL2,
        Assertion::NotL1AndNotL2,
    ];

    /// 1-based index `i` of `α_i`.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn signs(self) -> (Sign, Sign) {
        use Sign::*;
        match self {
            Assertion::L1AndL2 => (Positive, Positive),
            Assertion::L1AndNotL2 => (Positive, Negated),
            Assertion::NotL1AndL2 => (Negated, Positive),
            Assertion::NotL1AndNotL2 => (Negated, Negated),
        }
    }

    /// `(μ_{±L1}(x1), μ_{±L2}(x2))` under this assertion's signs.
    #[inline]
    pub fn signed(self, m: Memberships) -> (f64, f64) {
        let (s1, s2) = self.signs();
        (s1.apply(m.first), s2.apply(m.second))
    }

    /// Membership of the compound for an agent with weight `lambda`.
    #[inline]
    pub fn membership(self, lambda: f64, m: Memberships) -> f64 {
        let (a, b) = self.signed(m);
        lambda * a + (1.0 - lambda) * b
    }

    /// Maximal-membership assertion; ties go to the lowest index.
    pub fn select(lambda: f64, m: Memberships) -> Assertion {
        let mut best = Assertion::L1AndL2;
        let mut best_mu = best.membership(lambda, m);
        for candidate in &Assertion::ALL[1..] {
            let mu = candidate.membership(lambda, m);
            if mu > best_mu {
                best = *candidate;
                best_mu = mu;
            }
        }
        best
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha{}", self.index())
    }
}

/// Constituent memberships `μ_{L1}(x1)`, `μ_{L2}(x2)` at one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memberships {
    pub first: f64,
    pub second: f64,
}

/// The shared pair of one-dimensional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelPair {
    first: Label,
    second: Label,
}

impl LabelPair {
    pub fn new(first: Label, second: Label) -> Result<Self> {
        for (i, l) in [&first, &second].into_iter().enumerate() {
            if l.space().dims() != 1 {
                return Err(Error::invalid(format!(
                    "label {} must live on a one-dimensional space, got {} dims",
                    i + 1,
                    l.space().dims()
                )));
            }
        }
        Ok(Self { first, second })
    }

    /// `L1 = L2 = <1, euclidean, U(0,1)>` on `[0,1]`.
    pub fn canonical() -> Self {
        Self {
            first: Label::canonical(),
            second: Label::canonical(),
        }
    }

    pub fn first(&self) -> &Label {
        &self.first
    }

    pub fn second(&self) -> &Label {
        &self.second
    }

    /// Bounds of `Ω1 × Ω2`.
    pub fn bounds(&self) -> [(f64, f64); 2] {
        [
            self.first.space().bounds()[0],
            self.second.space().bounds()[0],
        ]
    }

    #[inline]
    pub fn memberships(&self, x: [f64; 2]) -> Result<Memberships> {
        Ok(Memberships {
            first: self.first.membership(&x[..1])?,
            second: self.second.membership(&x[1..])?,
        })
    }
}

/// When a listener accepts an assertion as grounds for updating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateModel {
    /// Model 1: update iff `μ_α(x) ≤ w`.
    Threshold,
    /// Model 2: update iff `μ_α(x) ≠ w`.
    Mismatch,
}

impl UpdateModel {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(UpdateModel::Threshold),
            2 => Ok(UpdateModel::Mismatch),
            other => Err(Error::invalid(format!(
                "update model must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            UpdateModel::Threshold => 1,
            UpdateModel::Mismatch => 2,
        }
    }

    #[inline]
    pub fn accepts(self, mu: f64, w: f64) -> bool {
        match self {
            UpdateModel::Threshold => mu <= w,
            UpdateModel::Mismatch => mu != w,
        }
    }
}

/// Pairing of agents within a timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Schedule {
    /// Every ordered (speaker, listener) pair once: `n(n-1)` dialogues.
    #[default]
    Ordered,
    /// Every unordered pair once with a fair coin for the roles: `n(n-1)/2` dialogues.
    Unordered,
}

impl Schedule {
    pub fn dialogues_per_timestep(self, n_agents: usize) -> usize {
        let ordered = n_agents * n_agents.saturating_sub(1);
        match self {
            Schedule::Ordered => ordered,
            Schedule::Unordered => ordered / 2,
        }
    }

    /// Expected number of times each agent listens per timestep.
    pub fn listener_turns_per_timestep(self, n_agents: usize) -> f64 {
        let turns = n_agents.saturating_sub(1) as f64;
        match self {
            Schedule::Ordered => turns,
            Schedule::Unordered => turns / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reliability {
    Global(f64),
    PerAgent(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaInit {
    /// Independent `U[0,1]` per agent.
    Uniform,
    Fixed(f64),
    PerAgent(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub n_agents: usize,
    pub timesteps: usize,
    pub h: f64,
    pub model: UpdateModel,
    pub labels: LabelPair,
    pub reliability: Reliability,
    pub lambda_init: LambdaInit,
    pub schedule: Schedule,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            n_agents: 10,
            timesteps: 2000,
            h: 1e-3,
            model: UpdateModel::Threshold,
            labels: LabelPair::canonical(),
            reliability: Reliability::Global(1.0),
            lambda_init: LambdaInit::Uniform,
            schedule: Schedule::Ordered,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(Error::invalid("a language game needs at least two agents"));
        }
        if self.timesteps == 0 {
            return Err(Error::invalid("timesteps must be positive"));
        }
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::invalid(format!(
                "h must lie in (0,1), got {}",
                self.h
            )));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        match &self.reliability {
            Reliability::Global(w) if !unit(*w) => {
                return Err(Error::invalid(format!("w must lie in [0,1], got {w}")))
            }
            Reliability::PerAgent(ws)
                if ws.len() != self.n_agents || !ws.iter().all(|&w| unit(w)) =>
            {
                return Err(Error::invalid(
                    "per-agent reliabilities need one value in [0,1] per agent",
                ))
            }
            _ => {}
        }
        match &self.lambda_init {
            LambdaInit::Fixed(v) if !unit(*v) => {
                return Err(Error::invalid(format!(
                    "initial lambda must lie in [0,1], got {v}"
                )))
            }
            LambdaInit::PerAgent(vs)
                if vs.len() != self.n_agents || !vs.iter().all(|&v| unit(v)) =>
            {
                return Err(Error::invalid(
                    "per-agent initial lambdas need one value in [0,1] per agent",
                ))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn reliability_of(&self, agent: usize) -> f64 {
        match &self.reliability {
            Reliability::Global(w) => *w,
            Reliability::PerAgent(ws) => ws[agent],
        }
    }

    /// Builds the initial population, drawing uniform weights from `rng`.
    pub fn initial_population<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<AgentState>> {
        self.validate()?;
        (0..self.n_agents)
            .map(|id| {
                let lambda = match &self.lambda_init {
                    LambdaInit::Uniform => rng.random::<f64>(),
                    LambdaInit::Fixed(v) => *v,
                    LambdaInit::PerAgent(vs) => vs[id],
                };
                AgentState::new(id, lambda, self.reliability_of(id))
            })
            .collect()
    }
}

/// Trace of one dialogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DialogueOutcome {
    pub asserted: Assertion,
    pub updated: bool,
    /// Clamped target; `None` when `μ_{±L1}(x1) = μ_{±L2}(x2)`.
    pub a_target: Option<f64>,
    pub lambda_after: f64,
}

/// The speaker's assertion for element `x`.
pub fn assert_label(speaker: &AgentState, labels: &LabelPair, x: [f64; 2]) -> Result<Assertion> {
    Ok(Assertion::select(speaker.lambda, labels.memberships(x)?))
}

/// Weight at which `asserted` would have membership exactly `w`, clamped to `[0,1]`.
#[inline]
pub fn target_weight(asserted: Assertion, m: Memberships, w: f64) -> Option<f64> {
    let (a, b) = asserted.signed(m);
    let denom = a - b;
    if denom == 0.0 {
        return None;
    }
    Some(((w - b) / denom).clamp(0.0, 1.0))
}

pub fn compute_a(
    asserted: Assertion,
    labels: &LabelPair,
    x: [f64; 2],
    w: f64,
) -> Result<Option<f64>> {
    Ok(target_weight(asserted, labels.memberships(x)?, w))
}

/// `λ' = λ + h(A - λ)`.
#[inline]
pub fn apply_update(listener: AgentState, a: f64, h: f64) -> AgentState {
    AgentState {
        lambda: (listener.lambda + h * (a - listener.lambda)).clamp(0.0, 1.0),
        ..listener
    }
}

/// Outcome of a dialogue given precomputed memberships.
#[inline]
pub fn dialogue_from_memberships(
    speaker: &AgentState,
    listener: AgentState,
    m: Memberships,
    h: f64,
    model: UpdateModel,
) -> (AgentState, DialogueOutcome) {
    let asserted = Assertion::select(speaker.lambda, m);
    let w = speaker.reliability;
    let heard = asserted.membership(listener.lambda, m);
    let a_target = target_weight(asserted, m, w);
    let (listener, updated) = match a_target {
        Some(a) if model.accepts(heard, w) => (apply_update(listener, a, h), true),
        _ => (listener, false),
    };
    (
        listener,
        DialogueOutcome {
            asserted,
            updated,
            a_target,
            lambda_after: listener.lambda,
        },
    )
}

/// One speaker/listener exchange about element `x`.
///
/// The speaker asserts under its own weight; the listener judges the
/// assertion under its own weight against the speaker's reliability.
pub fn run_dialogue(
    speaker: &AgentState,
    listener: AgentState,
    labels: &LabelPair,
    x: [f64; 2],
    h: f64,
    model: UpdateModel,
) -> Result<(AgentState, DialogueOutcome)> {
    if speaker.id == listener.id {
        return Err(Error::invalid("an agent cannot talk to itself"));
    }
    let m = labels.memberships(x)?;
    Ok(dialogue_from_memberships(speaker, listener, m, h, model))
}

/// One dialogue as seen by a timestep observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DialogueRecord {
    pub speaker: usize,
    pub listener: usize,
    pub x: [f64; 2],
    pub outcome: DialogueOutcome,
}

/// Reusable buffer of agent pairs for a schedule.
#[derive(Debug, Clone)]
pub struct Pairing {
    schedule: Schedule,
    pairs: Vec<(u32, u32)>,
}

impl Pairing {
    pub fn new(schedule: Schedule, n_agents: usize) -> Self {
        let n = n_agents as u32;
        let pairs = match schedule {
            Schedule::Ordered => (0..n)
                .flat_map(|s| (0..n).filter(move |&l| l != s).map(move |l| (s, l)))
                .collect(),
            Schedule::Unordered => (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect(),
        };
        Self { schedule, pairs }
    }

    /// Fresh uniformly random order.
    fn shuffle<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.pairs.shuffle(rng);
    }
}

/// Runs one timestep over `population`, reporting every dialogue to `observe`.
///
/// Dialogues apply sequentially, so later dialogues see earlier updates.
/// Returns the number of dialogues played.
#[allow(clippy::too_many_arguments)]
pub fn run_timestep_observed<R, F>(
    population: &mut [AgentState],
    labels: &LabelPair,
    env: &Environment,
    h: f64,
    model: UpdateModel,
    pairing: &mut Pairing,
    rng: &mut R,
    mut observe: F,
) -> Result<usize>
where
    R: Rng + ?Sized,
    F: FnMut(&DialogueRecord),
{
    if population.len() < 2 {
        return Err(Error::invalid("a timestep needs at least two agents"));
    }
    let expected = pairing.schedule.dialogues_per_timestep(population.len());
    if pairing.pairs.len() != expected {
        *pairing = Pairing::new(pairing.schedule, population.len());
    }
    pairing.shuffle(rng);
    for &(a, b) in &pairing.pairs {
        let (speaker, listener) = match pairing.schedule {
            Schedule::Ordered => (a as usize, b as usize),
            Schedule::Unordered => {
                if rng.random::<bool>() {
                    (a as usize, b as usize)
                } else {
                    (b as usize, a as usize)
                }
            }
        };
        let x = env.sample(rng);
        let m = labels.memberships(x)?;
        let (updated, outcome) =
            dialogue_from_memberships(&population[speaker], population[listener], m, h, model);
        population[listener] = updated;
        observe(&DialogueRecord {
            speaker,
            listener,
            x,
            outcome,
        });
    }
    Ok(pairing.pairs.len())
}

/// Runs one timestep with a throwaway pairing buffer.
pub fn run_timestep<R: Rng + ?Sized>(
    population: &mut [AgentState],
    labels: &LabelPair,
    env: &Environment,
    h: f64,
    model: UpdateModel,
    schedule: Schedule,
    rng: &mut R,
) -> Result<usize> {
    let mut pairing = Pairing::new(schedule, population.len());
    run_timestep_observed(population, labels, env, h, model, &mut pairing, rng, |_| {})
}

/// A single seeded run of the game.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: GameConfig,
    env: Environment,
    agents: Vec<AgentState>,
    pairing: Pairing,
    rng: SimRng,
    timestep: usize,
}

impl Simulation {
    pub fn new(config: GameConfig, env: Environment, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let agents = config.initial_population(&mut rng)?;
        let pairing = Pairing::new(config.schedule, config.n_agents);
        Ok(Self {
            config,
            env,
            agents,
            pairing,
            rng,
            timestep: 0,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.agents.iter().map(|a| a.lambda)
    }

    /// Completed timesteps.
    pub fn timestep(&self) -> usize {
        self.timestep
    }

    pub fn step(&mut self) -> Result<usize> {
        self.step_observed(|_| {})
    }

    pub fn step_observed<F: FnMut(&DialogueRecord)>(&mut self, observe: F) -> Result<usize> {
        let n = run_timestep_observed(
            &mut self.agents,
            &self.config.labels,
            &self.env,
            self.config.h,
            self.config.model,
            &mut self.pairing,
            &mut self.rng,
            observe,
        )?;
        self.timestep += 1;
        Ok(n)
    }
}
