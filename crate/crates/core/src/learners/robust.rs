//! Learn the whole prior through ratio searches against a reference state, then play
//! the robustified optimal scheme for the estimate.

use alloc::vec;
use alloc::vec::Vec;

use super::ratio::{combine, pivot_state, RatioEstimate, RatioSearch};
use super::{Learner, Observation};
use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::PublicModel;
use crate::margins::{compute_margins, distinguishable_pair, Margins};
use crate::math::powi;
use crate::robustify::{max_radius, robust_optimal_scheme};
use crate::scheme::SignalingScheme;

/// Learn-then-robustify with accuracy `eps = p0^k D / (42 n T)` (`k = 5` by default).
#[derive(Debug, Clone)]
pub struct LearnAndRobustify {
    model: PublicModel,
    margins: Margins,
    eps: f64,
    searches: Vec<RatioSearch>,
    /// For each state `i >= 1`, indices into `searches` whose combination gives `rho_i0`.
    plan: Vec<Vec<usize>>,
    current: usize,
    mu_hat: Option<Belief>,
    radius: f64,
    exploit: Option<SignalingScheme>,
    exploration_periods: u64,
    failure: Option<Error>,
}

impl LearnAndRobustify {
    pub fn new(model: &PublicModel, horizon: u64) -> Result<Self> {
        Self::with_exponent(model, horizon, 5)
    }

    pub fn with_exponent(model: &PublicModel, horizon: u64, exponent: i32) -> Result<Self> {
        let n = model.states();
        let actions: Vec<usize> = (0..n).map(|w| model.v.argmax_in_state(w)).collect();
        if distinguishable_pair(&actions).is_none() {
            return Err(Error::NoDistinguishablePair);
        }
        let margins = compute_margins(&model.v)?;
        let eps = powi(model.p0, exponent) * margins.d / (42.0 * n as f64 * horizon.max(1) as f64);
        Self::with_accuracy(model, margins, eps)
    }

    /// Explicit accuracy; the robustification radius is `6 n eps / p0^3`.
    pub fn with_accuracy(model: &PublicModel, margins: Margins, eps: f64) -> Result<Self> {
        let n = model.states();
        let max = model.p0 / 2.0;
        if eps > max * (1.0 + 1e-12) {
            return Err(Error::AccuracyTooCoarse { eps, max });
        }
        let mut searches: Vec<RatioSearch> = Vec::new();
        let index_of = |w1: usize, w2: usize, searches: &mut Vec<RatioSearch>| -> Result<usize> {
            if let Some(pos) = searches.iter().position(|s| s.pair() == (w1, w2)) {
                return Ok(pos);
            }
            searches.push(RatioSearch::new(model, &margins, w1, w2, eps)?);
            Ok(searches.len() - 1)
        };
        let mut plan = Vec::with_capacity(n.saturating_sub(1));
        for i in 1..n {
            let parts = match pivot_state(&margins, i, 0)? {
                None => vec![index_of(i, 0, &mut searches)?],
                Some(k) => vec![index_of(i, k, &mut searches)?, index_of(0, k, &mut searches)?],
            };
            plan.push(parts);
        }
        let radius = (6.0 * n as f64 * eps / powi(model.p0, 3)).min(max_radius(model.p0, margins.d));
        let mut learner = LearnAndRobustify {
            model: model.clone(),
            margins,
            eps,
            searches,
            plan,
            current: 0,
            mu_hat: None,
            radius,
            exploit: None,
            exploration_periods: 0,
            failure: None,
        };
        if learner.searches.is_empty() {
            learner.finish();
        }
        Ok(learner)
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn mu_hat(&self) -> Option<&Belief> {
        self.mu_hat.as_ref()
    }

    pub fn exploration_periods(&self) -> u64 {
        self.exploration_periods
    }

    /// Error raised while building the exploitation scheme, if any; the learner then
    /// falls back to recommending each state's optimal action.
    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref()
    }

    /// Current `rho_i0` estimates for `i = 1..n`.
    pub fn ratio_estimates(&self) -> Vec<RatioEstimate> {
        self.plan
            .iter()
            .map(|parts| combine(&parts.iter().map(|&s| self.searches[s].estimate()).collect::<Vec<_>>()))
            .collect()
    }

    /// `mu(0) = 1 / (1 + sum rho_i0)`, `mu(i) = rho_i0 mu(0)`.
    pub fn reconstruct(rhos: &[f64]) -> Result<Belief> {
        let mu0 = 1.0 / (1.0 + rhos.iter().sum::<f64>());
        let mut probs = vec![mu0];
        probs.extend(rhos.iter().map(|r| r * mu0));
        Belief::normalized(probs)
    }

    fn finish(&mut self) {
        let rhos: Vec<f64> = self.ratio_estimates().iter().map(|e| e.rho).collect();
        let scheme = Self::reconstruct(&rhos).and_then(|mu| {
            let s = robust_optimal_scheme(&mu, self.radius, self.model.p0, &self.margins, &self.model.u, &self.model.v);
            self.mu_hat = Some(mu);
            s
        });
        self.exploit = Some(match scheme {
            Ok(s) => s,
            Err(e) => {
                self.failure = Some(e);
                SignalingScheme::deterministic_direct(&self.margins.optimal_action, self.model.actions())
            }
        });
    }
}

impl Learner for LearnAndRobustify {
    fn name(&self) -> &'static str {
        "alg3"
    }

    fn propose(&mut self) -> &SignalingScheme {
        match self.exploit {
            Some(ref s) => s,
            None => self.searches[self.current].propose(),
        }
    }

    fn observe(&mut self, obs: &Observation) {
        if self.exploit.is_some() {
            return;
        }
        self.exploration_periods += 1;
        let search = &mut self.searches[self.current];
        search.observe(obs);
        if search.is_finished() {
            self.current += 1;
            if self.current == self.searches.len() {
                self.finish();
            }
        }
    }

    fn done(&self) -> Option<&SignalingScheme> {
        self.exploit.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::UtilityMatrix;

    #[test]
    fn constant_action_instance_has_no_pair() {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let model = PublicModel::new(u, v, 0.25).unwrap();
        assert_eq!(LearnAndRobustify::new(&model, 100).unwrap_err(), Error::NoDistinguishablePair);
    }

    #[test]
    fn reconstruction() {
        let mu = LearnAndRobustify::reconstruct(&[3.0 / 7.0]).unwrap();
        assert!((mu[0] - 0.7).abs() < 1e-12 && (mu[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn epsilon_choice() {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let model = PublicModel::new(u, v, 0.25).unwrap();
        let l = LearnAndRobustify::new(&model, 1000).unwrap();
        assert!((l.epsilon() - 0.25f64.powi(5) / (42.0 * 2.0 * 1000.0)).abs() < 1e-18);
        let l3 = LearnAndRobustify::with_exponent(&model, 1000, 3).unwrap();
        assert!((l3.epsilon() - 0.25f64.powi(3) / (42.0 * 2.0 * 1000.0)).abs() < 1e-18);
        assert!((l.radius() - 6.0 * 2.0 * l.epsilon() / 0.25f64.powi(3)).abs() < 1e-18);
    }
}
