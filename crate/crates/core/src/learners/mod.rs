//! Prior-learning strategies behind a propose/observe contract.
//!
//! Every period the runner asks the learner for a scheme, draws the state and
//! signal, lets the receiver respond and reports what happened. Learners see the
//! public model only (the oracle is the exception, it is handed the true prior).

mod baseline;
mod ratio;
mod robust;
mod strength;

pub use baseline::{EmpiricalBaseline, Oracle, Uninformative};
pub use ratio::{probe_scheme, PairRatioSearch, RatioEstimate, RatioSearch};
pub use robust::LearnAndRobustify;
pub use strength::{CheckPers, StrengthSearch, StrengthSummary};

use alloc::boxed::Box;

use crate::error::Result;
use crate::instance::Instance;
use crate::math::{log2, powi};
use crate::scheme::SignalingScheme;

/// What the designer sees at the end of a period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub signal: usize,
    pub action: usize,
    /// Present only when the environment reveals states.
    pub state: Option<usize>,
}

pub trait Learner: Send {
    fn name(&self) -> &'static str;

    /// Scheme for the current period.
    fn propose(&mut self) -> &SignalingScheme;

    fn observe(&mut self, obs: &Observation);

    /// The scheme played from now on, once exploration is over.
    fn done(&self) -> Option<&SignalingScheme>;

    fn observes_state(&self) -> bool {
        false
    }
}

/// Regret bound of the learn-then-robustify strategy:
/// `(2n/p0) log2(42 n T / (G^2 p0^6 D)) + 2`.
pub fn robust_regret_bound(states: usize, p0: f64, g: f64, d: f64, horizon: u64) -> f64 {
    let n = states as f64;
    (2.0 * n / p0) * log2(42.0 * n * horizon as f64 / (g * g * powi(p0, 6) * d)) + 2.0
}

/// Regret bound of the strength search: `(1/p0)(7 + 3 log2 log2(2 n T)) + 1`.
pub fn strength_regret_bound(states: usize, p0: f64, horizon: u64) -> f64 {
    (7.0 + 3.0 * log2(log2(2.0 * states as f64 * horizon as f64))) / p0 + 1.0
}

/// Expected length of one ratio search, `(1/p0) log2(1/(G^2 p0 eps))`.
pub fn ratio_search_periods(p0: f64, g: f64, eps: f64) -> f64 {
    log2(1.0 / (g * g * p0 * eps)) / p0
}

/// Named learner with its tunables, buildable for any instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerKind {
    LearnAndRobustify { epsilon_exponent: i32 },
    StrengthSearch,
    EmpiricalBaseline { cadence: u64 },
    Oracle,
    Uninformative,
}

impl LearnerKind {
    pub const NAMES: [&'static str; 5] = ["alg3", "alg5", "baseline_empirical", "oracle", "uninformative"];

    /// Default tunables for a learner name.
    pub fn from_name(name: &str) -> Option<LearnerKind> {
        Some(match name {
            "alg3" => LearnerKind::LearnAndRobustify { epsilon_exponent: 5 },
            "alg5" => LearnerKind::StrengthSearch,
            "baseline_empirical" => LearnerKind::EmpiricalBaseline { cadence: 1 },
            "oracle" => LearnerKind::Oracle,
            "uninformative" => LearnerKind::Uninformative,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::LearnAndRobustify { .. } => "alg3",
            LearnerKind::StrengthSearch => "alg5",
            LearnerKind::EmpiricalBaseline { .. } => "baseline_empirical",
            LearnerKind::Oracle => "oracle",
            LearnerKind::Uninformative => "uninformative",
        }
    }

    pub fn observes_state(&self) -> bool {
        matches!(self, LearnerKind::EmpiricalBaseline { .. })
    }

    /// Builds a fresh learner for one episode of length `horizon`.
    pub fn build(&self, instance: &Instance, horizon: u64) -> Result<Box<dyn Learner>> {
        let model = &instance.model;
        Ok(match *self {
            LearnerKind::LearnAndRobustify { epsilon_exponent } => {
                Box::new(LearnAndRobustify::with_exponent(model, horizon, epsilon_exponent)?)
            }
            LearnerKind::StrengthSearch => Box::new(StrengthSearch::new(model, horizon)?),
            LearnerKind::EmpiricalBaseline { cadence } => {
                Box::new(EmpiricalBaseline::new(model, horizon, cadence)?)
            }
            LearnerKind::Oracle => Box::new(Oracle::new(instance)?),
            LearnerKind::Uninformative => Box::new(Uninformative::new(instance.states())),
        })
    }

    /// The closed-form regret bound for this learner, where one exists.
    pub fn regret_bound(&self, instance: &Instance, horizon: u64) -> Option<f64> {
        match self {
            LearnerKind::LearnAndRobustify { .. } => {
                let m = instance.margins().ok()?;
                Some(robust_regret_bound(instance.states(), instance.p0(), m.g, m.d, horizon))
            }
            LearnerKind::StrengthSearch => Some(strength_regret_bound(instance.states(), instance.p0(), horizon)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        let expected = (2.0 * 2.0 / 0.25) * (42.0 * 2.0 * 1e4 / (0.25 * 0.25f64.powi(6))).log2() + 2.0;
        assert!((robust_regret_bound(2, 0.25, 0.5, 1.0, 10_000) - expected).abs() < 1e-9);
        let expected = 4.0 * (7.0 + 3.0 * (4e5f64).log2().log2()) + 1.0;
        assert!((strength_regret_bound(2, 0.25, 100_000) - expected).abs() < 1e-9);
    }

    #[test]
    fn names_round_trip() {
        for name in LearnerKind::NAMES {
            assert_eq!(LearnerKind::from_name(name).unwrap().name(), name);
        }
        assert!(LearnerKind::from_name("alg9").is_none());
    }
}
