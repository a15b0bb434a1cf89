//! Two-action search over the persuasion strength `M`.

use alloc::vec::Vec;

use super::{Learner, Observation};
use crate::error::{Error, Result};
use crate::instance::PublicModel;
use crate::optimal::{order_states_binary, scheme_from_strength, BinaryOrdering};
use crate::scheme::SignalingScheme;

/// Plays `pi^M` until action 1 is recommended and reports whether it was followed.
#[derive(Debug, Clone)]
pub struct CheckPers {
    m: f64,
    scheme: SignalingScheme,
    result: Option<bool>,
    periods: u64,
}

impl CheckPers {
    pub fn new(m: f64, ordering: &BinaryOrdering) -> Result<Self> {
        Ok(CheckPers { m, scheme: scheme_from_strength(m, ordering)?, result: None, periods: 0 })
    }

    pub fn strength(&self) -> f64 {
        self.m
    }

    pub fn result(&self) -> Option<bool> {
        self.result
    }

    pub fn periods(&self) -> u64 {
        self.periods
    }
}

impl Learner for CheckPers {
    fn name(&self) -> &'static str {
        "alg4"
    }

    fn propose(&mut self) -> &SignalingScheme {
        &self.scheme
    }

    fn observe(&mut self, obs: &Observation) {
        if self.result.is_some() {
            return;
        }
        self.periods += 1;
        if obs.signal == 1 {
            self.result = Some(obs.action == 1);
        }
    }

    fn done(&self) -> Option<&SignalingScheme> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Halving,
    Scan { l: f64, r: f64, step: f64, i: u64 },
    Exploit,
}

/// Snapshot of a strength search.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthSummary {
    /// `(M, persuasive)` in the order probed.
    pub probes: Vec<(f64, bool)>,
    /// Lower strength found by halving; `M_low <= M* < 2 M_low`.
    pub m_low: Option<f64>,
    pub bracket: (f64, f64),
    pub exploiting: bool,
    pub periods: u64,
}

impl StrengthSummary {
    /// True when the horizon ended before exploitation began.
    pub fn exhausted(&self) -> bool {
        !self.exploiting
    }
}

/// Halve `M` from `n` until persuasive, then refine `[L, R]` by linear scans with step
/// `(R - L)^2 / (2L)` until `R - L <= 1/T`, and play `pi^L` afterwards.
#[derive(Debug, Clone)]
pub struct StrengthSearch {
    ordering: BinaryOrdering,
    horizon: u64,
    m_low: f64,
    halving_done: Option<f64>,
    bracket: (f64, f64),
    phase: Phase,
    check: CheckPers,
    probes: Vec<(f64, bool)>,
    exploit: Option<SignalingScheme>,
    periods: u64,
}

impl StrengthSearch {
    pub fn new(model: &PublicModel, horizon: u64) -> Result<Self> {
        if model.actions() != 2 {
            return Err(Error::NotBinaryAction(model.actions()));
        }
        let ordering = order_states_binary(&model.u, &model.v)?;
        let n = ordering.states() as f64;
        let check = CheckPers::new(n, &ordering)?;
        Ok(StrengthSearch {
            ordering,
            horizon: horizon.max(1),
            m_low: n,
            halving_done: None,
            bracket: (0.0, n),
            phase: Phase::Halving,
            check,
            probes: Vec::new(),
            exploit: None,
            periods: 0,
        })
    }

    pub fn ordering(&self) -> &BinaryOrdering {
        &self.ordering
    }

    pub fn summary(&self) -> StrengthSummary {
        StrengthSummary {
            probes: self.probes.clone(),
            m_low: self.halving_done,
            bracket: self.bracket,
            exploiting: self.exploit.is_some(),
            periods: self.periods,
        }
    }

    fn probe(&mut self, m: f64) {
        let m = m.min(self.ordering.states() as f64);
        self.check = CheckPers::new(m, &self.ordering).expect("strength within range");
    }

    fn start_interval(&mut self, l: f64, r: f64) {
        self.bracket = (l, r);
        if r - l <= 1.0 / self.horizon as f64 {
            self.exploit_at(l);
            return;
        }
        let step = (r - l) * (r - l) / (2.0 * l);
        self.phase = Phase::Scan { l, r, step, i: 1 };
        self.probe(l + step);
    }

    fn exploit_at(&mut self, l: f64) {
        self.phase = Phase::Exploit;
        let m = l.min(self.ordering.states() as f64);
        self.exploit = Some(scheme_from_strength(m, &self.ordering).expect("strength within range"));
    }

    fn on_result(&mut self, persuasive: bool) {
        self.probes.push((self.check.strength(), persuasive));
        match self.phase {
            Phase::Halving => {
                if persuasive {
                    self.halving_done = Some(self.m_low);
                    self.start_interval(self.m_low, 2.0 * self.m_low);
                } else if self.m_low / 2.0 < 1.0 / self.horizon as f64 {
                    // nothing above 1/T is persuasive; pi^0 never loses more than that
                    self.bracket = (0.0, self.m_low);
                    self.exploit_at(0.0);
                } else {
                    self.m_low /= 2.0;
                    self.bracket = (0.0, 2.0 * self.m_low);
                    self.probe(self.m_low);
                }
            }
            Phase::Scan { l, r, step, i } => {
                if persuasive {
                    let next = l + (i + 1) as f64 * step;
                    if next > r + 1e-12 {
                        self.start_interval(l + i as f64 * step, r);
                    } else {
                        self.phase = Phase::Scan { l, r, step, i: i + 1 };
                        self.probe(next);
                    }
                } else {
                    self.start_interval(l + (i - 1) as f64 * step, l + i as f64 * step);
                }
            }
            Phase::Exploit => {}
        }
    }
}

impl Learner for StrengthSearch {
    fn name(&self) -> &'static str {
        "alg5"
    }

    fn propose(&mut self) -> &SignalingScheme {
        match self.exploit {
            Some(ref s) => s,
            None => &self.check.scheme,
        }
    }

    fn observe(&mut self, obs: &Observation) {
        self.periods += 1;
        if self.exploit.is_some() {
            return;
        }
        self.check.observe(obs);
        if let Some(result) = self.check.result() {
            self.on_result(result);
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
    use alloc::vec;

    fn court_model() -> PublicModel {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        PublicModel::new(u, v, 0.25).unwrap()
    }

    #[test]
    fn hand_simulated_probe_sequence() {
        let m_star = 10.0 / 7.0;
        let mut search = StrengthSearch::new(&court_model(), 100).unwrap();
        while search.done().is_none() {
            let m = search.check.strength();
            // signal 1 always realises; the receiver follows iff M <= M*
            let action = usize::from(m <= m_star + 1e-12);
            search.observe(&Observation { signal: 1, action, state: None });
        }
        let s = search.summary();
        assert_eq!(
            &s.probes[..7],
            &[(2.0, false), (1.0, true), (1.5, false), (1.125, true), (1.25, true), (1.375, true), (1.5, false)]
        );
        assert_eq!(s.m_low, Some(1.0));
        let (l, r) = s.bracket;
        assert!(l <= m_star && m_star < r && r - l <= 0.01);
        assert!(!s.exhausted());
    }

    #[test]
    fn check_pers_waits_for_signal_one() {
        let model = court_model();
        let ordering = order_states_binary(&model.u, &model.v).unwrap();
        let mut c = CheckPers::new(1.0, &ordering).unwrap();
        c.observe(&Observation { signal: 0, action: 0, state: None });
        assert_eq!(c.result(), None);
        c.observe(&Observation { signal: 1, action: 1, state: None });
        assert_eq!(c.result(), Some(true));
        assert_eq!(c.periods(), 2);
    }

    #[test]
    fn requires_two_actions() {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]]).unwrap();
        let model = PublicModel::new(u, v, 0.25).unwrap();
        assert_eq!(StrengthSearch::new(&model, 10).unwrap_err(), Error::NotBinaryAction(3));
    }
}
