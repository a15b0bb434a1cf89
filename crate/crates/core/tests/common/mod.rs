#![allow(dead_code)]

use persuade_core::learners::Learner;
use persuade_core::sim::{EpisodeConfig, Environment};
use persuade_core::{Belief, Instance, SignalingScheme};
use rand::Rng;

pub fn random_belief<R: Rng>(n: usize, rng: &mut R) -> Belief {
    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    Belief::normalized(w).unwrap()
}

/// Belief with every entry at least `p0`.
pub fn belief_above<R: Rng>(n: usize, p0: f64, rng: &mut R) -> Belief {
    let free = random_belief(n, rng);
    Belief::normalized(free.probs().iter().map(|f| p0 + (1.0 - n as f64 * p0) * f).collect()).unwrap()
}

pub fn random_scheme<R: Rng>(states: usize, signals: usize, direct: bool, rng: &mut R) -> SignalingScheme {
    let rows: Vec<Vec<f64>> = (0..states)
        .map(|_| {
            let r: Vec<f64> = (0..signals).map(|_| rng.gen::<f64>()).collect();
            let t: f64 = r.iter().sum();
            r.iter().map(|x| x / t).collect()
        })
        .collect();
    SignalingScheme::normalized(&rows, direct).unwrap()
}

/// Drives `learner` until `stop` holds or `cap` periods pass; returns the summed regret.
pub fn drive(
    instance: &Instance,
    learner: &mut dyn Learner,
    seed: u64,
    config: EpisodeConfig,
    cap: u64,
    mut stop: impl FnMut(&dyn Learner) -> bool,
) -> (f64, u64) {
    let mut env = Environment::new(instance, seed, config).unwrap();
    let mut regret = 0.0;
    while !stop(learner) && env.periods() < cap {
        regret += env.step(learner).unwrap().instant_regret;
    }
    (regret, env.periods())
}
