//! Reference strategies: the empirical-frequency baseline, the full-information
//! oracle and a designer who never reveals anything.

use alloc::vec;
use alloc::vec::Vec;

use super::{Learner, Observation};
use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::{Instance, PublicModel};
use crate::margins::{compute_margins, Margins};
use crate::math::{ln, sqrt};
use crate::robustify::{max_radius, robust_optimal_scheme};
use crate::scheme::SignalingScheme;

/// Estimates the prior from observed states (add-one smoothing) and plays the
/// robustified optimal scheme with radius `min(p0^2 D / 2, sqrt(2 n ln(2T) / t))`.
#[derive(Debug, Clone)]
pub struct EmpiricalBaseline {
    model: PublicModel,
    margins: Margins,
    horizon: u64,
    cadence: u64,
    counts: Vec<u64>,
    t: u64,
    scheme: SignalingScheme,
    failures: u64,
}

impl EmpiricalBaseline {
    pub fn new(model: &PublicModel, horizon: u64, cadence: u64) -> Result<Self> {
        if cadence == 0 {
            return Err(Error::InvalidParameter("recompute cadence must be positive"));
        }
        let margins = compute_margins(&model.v)?;
        let fallback = SignalingScheme::deterministic_direct(&margins.optimal_action, model.actions());
        let mut learner = EmpiricalBaseline {
            model: model.clone(),
            counts: vec![0; model.states()],
            margins,
            horizon: horizon.max(1),
            cadence,
            t: 0,
            scheme: fallback,
            failures: 0,
        };
        learner.recompute();
        Ok(learner)
    }

    pub fn estimate(&self) -> Belief {
        let n = self.counts.len() as f64;
        let probs = self.counts.iter().map(|&c| (c as f64 + 1.0) / (self.t as f64 + n)).collect();
        Belief::normalized(probs).expect("smoothed counts")
    }

    pub fn radius(&self) -> f64 {
        let cap = max_radius(self.model.p0, self.margins.d);
        if self.t == 0 {
            return cap;
        }
        let n = self.counts.len() as f64;
        cap.min(sqrt(2.0 * n * ln(2.0 * self.horizon as f64) / self.t as f64))
    }

    /// Number of recomputations that failed and kept the previous scheme.
    pub fn failures(&self) -> u64 {
        self.failures
    }

    fn recompute(&mut self) {
        let (m, u, v) = (&self.model, &self.model.u, &self.model.v);
        match robust_optimal_scheme(&self.estimate(), self.radius(), m.p0, &self.margins, u, v) {
            Ok(s) => self.scheme = s,
            Err(_) => self.failures += 1,
        }
    }
}

impl Learner for EmpiricalBaseline {
    fn name(&self) -> &'static str {
        "baseline_empirical"
    }

    fn propose(&mut self) -> &SignalingScheme {
        &self.scheme
    }

    fn observe(&mut self, obs: &Observation) {
        if let Some(state) = obs.state {
            self.counts[state] += 1;
            self.t += 1;
            if self.t % self.cadence == 0 {
                self.recompute();
            }
        }
    }

    fn done(&self) -> Option<&SignalingScheme> {
        None
    }

    fn observes_state(&self) -> bool {
        true
    }
}

/// Plays the optimal scheme for the true prior every period.
#[derive(Debug, Clone)]
pub struct Oracle {
    scheme: SignalingScheme,
}

impl Oracle {
    pub fn new(instance: &Instance) -> Result<Self> {
        Ok(Oracle { scheme: instance.optimum()?.0 })
    }
}

impl Learner for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn propose(&mut self) -> &SignalingScheme {
        &self.scheme
    }

    fn observe(&mut self, _obs: &Observation) {}

    fn done(&self) -> Option<&SignalingScheme> {
        Some(&self.scheme)
    }
}

/// Sends a single uninformative signal.
#[derive(Debug, Clone)]
pub struct Uninformative {
    scheme: SignalingScheme,
}

impl Uninformative {
    pub fn new(states: usize) -> Self {
        Uninformative { scheme: SignalingScheme::uninformative(states) }
    }
}

impl Learner for Uninformative {
    fn name(&self) -> &'static str {
        "uninformative"
    }

    fn propose(&mut self) -> &SignalingScheme {
        &self.scheme
    }

    fn observe(&mut self, _obs: &Observation) {}

    fn done(&self) -> Option<&SignalingScheme> {
        Some(&self.scheme)
    }
}
