//! Instance generators: the two-state courtroom fixture, seeded random instances and
//! the two hard families used for lower bounds.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::{Instance, PublicModel, ReceiverNormalization};
use crate::margins::{compute_margins, Margins};
use crate::math::{abs, powi, round};
use crate::matrix::UtilityMatrix;
use crate::optimal::optimal_scheme_binary;

const REJECTION_BUDGET: usize = 10_000;

/// States `innocent = 0`, `guilty = 1`; actions `acquit = 0`, `convict = 1`.
/// Prior `(0.7, 0.3)`, `p0 = 0.25`; the prosecutor always wants a conviction.
pub fn gen_example_basic() -> Instance {
    let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).expect("fixture");
    let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).expect("fixture");
    let model = PublicModel::new(u, v, 0.25).expect("fixture");
    Instance::new(model, Belief::new(vec![0.7, 0.3]).expect("fixture")).expect("fixture")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub states: usize,
    pub actions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConstraints {
    /// Two actions, sender always prefers action 1, receiver prefers 0 at the prior.
    pub binary_mode: bool,
    pub min_prior: f64,
    pub min_g: f64,
    pub min_d: f64,
}

impl Default for RandomConstraints {
    fn default() -> Self {
        RandomConstraints { binary_mode: false, min_prior: 0.0, min_g: 0.0, min_d: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstance {
    pub instance: Instance,
    pub margins: Margins,
    pub attempts: usize,
}

/// Rejection-samples an instance meeting every modelling assumption; `p0` is set to
/// the smallest prior mass drawn.
pub fn gen_random(shape: RandomShape, seed: u64, constraints: &RandomConstraints) -> Result<RandomInstance> {
    let RandomShape { states, actions } = shape;
    if !(2..=8).contains(&states) || !(2..=8).contains(&actions) {
        return Err(Error::InvalidParameter("random shapes are limited to 2..=8 states and actions"));
    }
    if constraints.binary_mode && actions != 2 {
        return Err(Error::NotBinaryAction(actions));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=REJECTION_BUDGET {
        let weights: Vec<f64> = (0..states).map(|_| 0.2 + rng.gen::<f64>()).collect();
        let prior = Belief::normalized(weights)?;
        let v_rows: Vec<Vec<f64>> = (0..actions).map(|_| (0..states).map(|_| rng.gen()).collect()).collect();
        let u_rows: Vec<Vec<f64>> = if constraints.binary_mode {
            vec![
                (0..states).map(|_| 0.5 * rng.gen::<f64>()).collect(),
                (0..states).map(|_| 0.5 + 0.5 * rng.gen::<f64>()).collect(),
            ]
        } else {
            (0..actions).map(|_| (0..states).map(|_| rng.gen()).collect()).collect()
        };
        let p0 = prior.min_mass();
        if p0 < constraints.min_prior {
            continue;
        }
        let v = UtilityMatrix::from_rows(&v_rows)?;
        let margins = match compute_margins(&v) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if margins.distinguishable_pair.is_none() || margins.g < constraints.min_g || margins.d < constraints.min_d {
            continue;
        }
        let u = UtilityMatrix::from_rows(&u_rows)?;
        if constraints.binary_mode && optimal_scheme_binary(&prior, &u, &v).is_err() {
            continue;
        }
        let model = PublicModel::new(u, v, p0)?;
        let instance = Instance::new(model, prior)?;
        return Ok(RandomInstance { instance, margins, attempts: attempt });
    }
    Err(Error::RejectionBudgetExceeded(REJECTION_BUDGET))
}

/// Three-action, two-state family whose prior lies on the grid
/// `{p0 + k kappa : k = 0..=K}`, `p0 = 0.1`, `K = 2 p0 / kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstanceGeneral {
    pub instance: Instance,
    pub p0: f64,
    pub kappa: f64,
    pub k: usize,
    pub gamma: Vec<f64>,
    pub eps_v: f64,
    pub prior_index: usize,
}

impl HardInstanceGeneral {
    /// `mu*` on state 1.
    pub fn mu(&self) -> f64 {
        self.gamma[self.prior_index]
    }

    /// Closed-form optimum `2 mu / (1 - 2 eps_v)`.
    pub fn u_star(&self) -> f64 {
        2.0 * self.mu() / (1.0 - 2.0 * self.eps_v)
    }
}

/// Receiver: `a` pays 1 in state 0, `b` pays 1 in state 1, `c` pays `1/2 + eps_v`
/// everywhere, so `c` is taken for posteriors within `eps_v` of 1/2. The sender is
/// paid only for `c`. States are `(0, 1)` with prior `(1 - mu, mu)`.
pub fn gen_lower_bound_general(kappa: f64, prior_index: usize) -> Result<HardInstanceGeneral> {
    let p0 = 0.1;
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidGrid("kappa must be positive"));
    }
    let steps = 2.0 * p0 / kappa;
    let k = round(steps);
    if k < 1.0 || abs(steps - k) > 1e-9 * k {
        return Err(Error::InvalidGrid("kappa must divide 2 p0"));
    }
    let k = k as usize;
    if prior_index > k {
        return Err(Error::InvalidGrid("prior index outside the grid"));
    }
    let gamma: Vec<f64> = (0..=k).map(|i| p0 + i as f64 * kappa).collect();
    let eps_v = 1.0 / (20.0 * k as f64);
    let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]])?;
    let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5 + eps_v, 0.5 + eps_v]])?;
    let mu = gamma[prior_index];
    let model = PublicModel::new(u, v, p0)?;
    let instance = Instance::new(model, Belief::new(vec![1.0 - mu, mu])?)?;
    Ok(HardInstanceGeneral { instance, p0, kappa, k, gamma, eps_v, prior_index })
}

/// Two-state, two-action pricing-style family with `eps = T^-3`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstanceBinary {
    pub instance: Instance,
    pub horizon: u64,
    pub v_star: f64,
    pub eps: f64,
}

impl HardInstanceBinary {
    /// Closed-form optimum `(1 + eps) v* / (1 + eps v*)`.
    pub fn u_star(&self) -> f64 {
        (1.0 + self.eps) * self.v_star / (1.0 + self.eps * self.v_star)
    }
}

/// Prior `(1/(1 + eps v*), eps v*/(1 + eps v*))`; the receiver's raw utility is
/// `v(1,0) = -eps`, `v(1,1) = 1` and 0 otherwise, stored after the map
/// `v -> (v + eps)/(1 + eps)`. The sender is paid 1 for action 1. `p0` is the prior
/// mass of state 1.
pub fn gen_lower_bound_binary(horizon: u64, v_star: f64) -> Result<HardInstanceBinary> {
    if horizon < 2 {
        return Err(Error::InvalidParameter("horizon must be at least 2"));
    }
    if !(v_star > 0.0 && v_star <= 1.0) {
        return Err(Error::InvalidParameter("valuation must lie in (0, 1]"));
    }
    let eps = powi(horizon as f64, -3);
    let norm = ReceiverNormalization { scale: 1.0 / (1.0 + eps), shift: eps / (1.0 + eps) };
    let raw = [vec![0.0, 0.0], vec![-eps, 1.0]];
    let stored: Vec<Vec<f64>> =
        raw.iter().map(|row| row.iter().map(|x| (norm.scale * x + norm.shift).clamp(0.0, 1.0)).collect()).collect();
    let v = UtilityMatrix::from_rows(&stored)?;
    let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]])?;
    let mu1 = eps * v_star / (1.0 + eps * v_star);
    let prior = Belief::new(vec![1.0 / (1.0 + eps * v_star), mu1])?;
    let model = PublicModel::new(u, v, mu1)?.with_normalization(norm);
    let instance = Instance::new(model, prior)?;
    Ok(HardInstanceBinary { instance, horizon, v_star, eps })
}
