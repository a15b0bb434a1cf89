//! T-period simulation: the environment draws states and signals, a myopic receiver
//! best-responds, and regret is booked against the known-prior optimum.

mod generators;
mod oracle;

pub use generators::{
    gen_example_basic, gen_lower_bound_binary, gen_lower_bound_general, gen_random, HardInstanceBinary,
    HardInstanceGeneral, RandomConstraints, RandomInstance, RandomShape,
};
pub use oracle::{oracle_grid_optimal, oracle_grid_optimal_at};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::learners::{Learner, Observation};
use crate::persuasion::{evaluate_scheme, SchemeEvaluation, TieRule};

const CACHE_LIMIT: usize = 1024;

/// One simulated period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord {
    /// 1-based period index.
    pub t: u64,
    pub scheme: u64,
    pub state: usize,
    pub signal: usize,
    pub action: usize,
    /// `U* - U(mu*, pi_t)`, using the expected utility of the scheme played.
    pub instant_regret: f64,
    /// Sender utility actually realised this period (diagnostics only).
    pub realized_utility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub records: Vec<PeriodRecord>,
    pub cumulative: Vec<f64>,
    pub u_star: f64,
}

impl EpisodeTrace {
    pub fn total_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpisodeConfig {
    pub tie: TieRule,
    /// Whether learners are told the realised state after each period.
    pub reveal_states: bool,
}

/// Derives an independent 64-bit seed for the stream named `label`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(seed ^ h)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Environment random stream for an episode seed.
pub fn env_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, "env"))
}

/// Learner random stream for an episode seed.
pub fn learner_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, "learner"))
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let x: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        if p > 0.0 {
            cum += p;
            last = i;
            if x < cum {
                return i;
            }
        }
    }
    last
}

/// Steps a learner through periods one at a time.
///
/// Scheme evaluations (sender utility and the receiver's action per signal) are
/// cached by scheme fingerprint.
pub struct Environment<'a> {
    instance: &'a Instance,
    config: EpisodeConfig,
    u_star: f64,
    rng: ChaCha8Rng,
    cache: BTreeMap<u64, SchemeEvaluation>,
    t: u64,
}

impl<'a> Environment<'a> {
    pub fn new(instance: &'a Instance, seed: u64, config: EpisodeConfig) -> Result<Self> {
        let (_, u_star) = instance.optimum()?;
        Ok(Self::with_optimum(instance, seed, config, u_star))
    }

    pub fn with_optimum(instance: &'a Instance, seed: u64, config: EpisodeConfig, u_star: f64) -> Self {
        Environment { instance, config, u_star, rng: env_rng(seed), cache: BTreeMap::new(), t: 0 }
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    pub fn periods(&self) -> u64 {
        self.t
    }

    /// Plays one period and reports it to the learner.
    pub fn step(&mut self, learner: &mut dyn Learner) -> Result<PeriodRecord> {
        if learner.observes_state() && !self.config.reveal_states {
            return Err(Error::IncompatibleLearner);
        }
        let instance = self.instance;
        let scheme = learner.propose();
        let fingerprint = scheme.fingerprint();
        if !self.cache.contains_key(&fingerprint) {
            if self.cache.len() >= CACHE_LIMIT {
                self.cache.clear();
            }
            let eval = evaluate_scheme(&instance.prior, scheme, instance.u(), instance.v(), self.config.tie);
            self.cache.insert(fingerprint, eval);
        }
        let eval = &self.cache[&fingerprint];
        let state = sample_index(instance.prior.probs().iter().copied(), &mut self.rng);
        let signal = sample_index(scheme.row(state).iter().copied(), &mut self.rng);
        let action = eval.actions[signal].expect("realised signal has positive probability");
        self.t += 1;
        let record = PeriodRecord {
            t: self.t,
            scheme: fingerprint,
            state,
            signal,
            action,
            instant_regret: self.u_star - eval.utility,
            realized_utility: instance.u().get(action, state),
        };
        let state_seen = self.config.reveal_states.then_some(state);
        learner.observe(&Observation { signal, action, state: state_seen });
        Ok(record)
    }
}

/// Runs `learner` for `horizon` periods against `instance`; deterministic given `seed`.
pub fn run_episode(
    instance: &Instance,
    learner: &mut dyn Learner,
    horizon: u64,
    seed: u64,
    config: &EpisodeConfig,
) -> Result<EpisodeTrace> {
    let (_, u_star) = instance.optimum()?;
    run_episode_with_optimum(instance, learner, horizon, seed, config, u_star)
}

/// As [`run_episode`] with a precomputed `U*`.
pub fn run_episode_with_optimum(
    instance: &Instance,
    learner: &mut dyn Learner,
    horizon: u64,
    seed: u64,
    config: &EpisodeConfig,
    u_star: f64,
) -> Result<EpisodeTrace> {
    if learner.observes_state() && !config.reveal_states {
        return Err(Error::IncompatibleLearner);
    }
    let mut env = Environment::with_optimum(instance, seed, *config, u_star);
    let mut records = Vec::with_capacity(horizon as usize);
    let mut cumulative = Vec::with_capacity(horizon as usize);
    let mut total = 0.0;
    for _ in 0..horizon {
        let record = env.step(learner)?;
        total += record.instant_regret;
        records.push(record);
        cumulative.push(total);
    }
    Ok(EpisodeTrace { records, cumulative, u_star })
}
