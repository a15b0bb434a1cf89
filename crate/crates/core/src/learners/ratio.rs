//! Binary search for prior ratios from the receiver's actions.

use alloc::vec;
use alloc::vec::Vec;

use super::{Learner, Observation};
use crate::error::{Error, Result};
use crate::instance::PublicModel;
use crate::margins::Margins;
use crate::matrix::UtilityMatrix;
use crate::scheme::SignalingScheme;

/// Probe signal; the other signal (1) absorbs the remaining mass.
const S0: usize = 0;

/// Estimate of `mu*(w1) / mu*(w2)`; `complete` is false when the search was cut short.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub rho: f64,
    pub complete: bool,
}

/// Bracketing search for the ratio of a distinguishable pair.
///
/// The probe with parameter `q` sends `s0` with `pi(s0|w2) / pi(s0|w1) = q`, the larger
/// of the two equal to one and zero elsewhere. The receiver keeps `a1 = a*(w1)` while
/// `q` is below the indifference point, so every answer halves the bracket.
#[derive(Debug, Clone)]
pub struct RatioSearch {
    w1: usize,
    w2: usize,
    a1: usize,
    a_tilde: Option<usize>,
    fallback_tilde: usize,
    ell: f64,
    r: f64,
    q: f64,
    width: f64,
    scheme: SignalingScheme,
    v: UtilityMatrix,
    probes: Vec<(f64, usize)>,
    periods: u64,
    finished: bool,
}

impl RatioSearch {
    pub fn new(model: &PublicModel, margins: &Margins, w1: usize, w2: usize, eps: f64) -> Result<Self> {
        let n = model.states();
        if w1 >= n || w2 >= n || w1 == w2 {
            return Err(Error::InvalidParameter("ratio search needs two distinct states"));
        }
        let (a1, a2) = (margins.optimal_action[w1], margins.optimal_action[w2]);
        if a1 == a2 {
            return Err(Error::InvalidParameter("ratio search pair is not distinguishable"));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter("accuracy must be positive"));
        }
        let r = 1.0 / (margins.g * model.p0);
        let q = r / 2.0;
        Ok(RatioSearch {
            w1,
            w2,
            a1,
            a_tilde: None,
            fallback_tilde: a2,
            ell: 0.0,
            r,
            q,
            width: eps * margins.g,
            scheme: probe_scheme(n, w1, w2, q),
            v: model.v.clone(),
            probes: Vec::new(),
            periods: 0,
            finished: false,
        })
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.w1, self.w2)
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.ell, self.r)
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// `(q, action)` for every probe that produced `s0`.
    pub fn probes(&self) -> &[(f64, usize)] {
        &self.probes
    }

    pub fn periods(&self) -> u64 {
        self.periods
    }

    /// `rho = ell (v(a~,w2) - v(a1,w2)) / (v(a1,w1) - v(a~,w1))`.
    pub fn estimate(&self) -> RatioEstimate {
        let at = self.a_tilde.unwrap_or(self.fallback_tilde);
        let v = &self.v;
        let factor = (v.get(at, self.w2) - v.get(self.a1, self.w2)) / (v.get(self.a1, self.w1) - v.get(at, self.w1));
        RatioEstimate { rho: self.ell * factor, complete: self.finished }
    }
}

/// Two-signal probe scheme with likelihood ratio `q` between `w2` and `w1`.
pub fn probe_scheme(states: usize, w1: usize, w2: usize, q: f64) -> SignalingScheme {
    let mut rows = vec![vec![0.0, 1.0]; states];
    let (p1, p2) = if q <= 1.0 { (1.0, q) } else { (1.0 / q, 1.0) };
    rows[w1] = vec![p1, 1.0 - p1];
    rows[w2] = vec![p2, 1.0 - p2];
    SignalingScheme::new(&rows, false).expect("probe rows are distributions")
}

impl Learner for RatioSearch {
    fn name(&self) -> &'static str {
        "alg1"
    }

    fn propose(&mut self) -> &SignalingScheme {
        &self.scheme
    }

    fn observe(&mut self, obs: &Observation) {
        self.periods += 1;
        if self.finished || obs.signal != S0 {
            return;
        }
        self.probes.push((self.q, obs.action));
        if obs.action == self.a1 {
            self.ell = self.q;
        } else {
            self.r = self.q;
            self.a_tilde = Some(obs.action);
        }
        let mid = (self.ell + self.r) / 2.0;
        // a midpoint that rounds onto an endpoint means the bracket is one ulp wide
        if self.r - self.ell <= self.width || mid <= self.ell || mid >= self.r {
            self.finished = true;
        } else {
            self.q = mid;
            self.scheme = probe_scheme(self.scheme.states(), self.w1, self.w2, self.q);
        }
    }

    fn done(&self) -> Option<&SignalingScheme> {
        None
    }
}

/// Ratio for any pair of states: directly when distinguishable, otherwise through a
/// state `k` whose optimal action differs, as `rho_ik / rho_jk`.
#[derive(Debug, Clone)]
pub struct PairRatioSearch {
    searches: Vec<RatioSearch>,
    current: usize,
}

impl PairRatioSearch {
    pub fn new(model: &PublicModel, margins: &Margins, i: usize, j: usize, eps: f64) -> Result<Self> {
        let max = model.p0 / 2.0;
        if eps > max * (1.0 + 1e-12) {
            return Err(Error::AccuracyTooCoarse { eps, max });
        }
        let searches = match pivot_state(margins, i, j)? {
            None => vec![RatioSearch::new(model, margins, i, j, eps)?],
            Some(k) => vec![
                RatioSearch::new(model, margins, i, k, eps)?,
                RatioSearch::new(model, margins, j, k, eps)?,
            ],
        };
        Ok(PairRatioSearch { searches, current: 0 })
    }

    pub fn is_finished(&self) -> bool {
        self.searches.iter().all(|s| s.is_finished())
    }

    pub fn searches(&self) -> &[RatioSearch] {
        &self.searches
    }

    pub fn estimate(&self) -> RatioEstimate {
        combine(&self.searches.iter().map(|s| s.estimate()).collect::<Vec<_>>())
    }
}

/// `None` when `(i, j)` is distinguishable, else the state to route through.
pub(crate) fn pivot_state(margins: &Margins, i: usize, j: usize) -> Result<Option<usize>> {
    let a = &margins.optimal_action;
    if a[i] != a[j] {
        return Ok(None);
    }
    let (k1, k2) = margins.distinguishable_pair.ok_or(Error::NoDistinguishablePair)?;
    Ok(Some(if a[k1] != a[i] { k1 } else { k2 }))
}

pub(crate) fn combine(parts: &[RatioEstimate]) -> RatioEstimate {
    match parts {
        [one] => *one,
        [ik, jk] => RatioEstimate { rho: ik.rho / jk.rho, complete: ik.complete && jk.complete },
        _ => unreachable!("one or two ratio searches"),
    }
}

impl Learner for PairRatioSearch {
    fn name(&self) -> &'static str {
        "alg2"
    }

    fn propose(&mut self) -> &SignalingScheme {
        self.searches[self.current].propose()
    }

    fn observe(&mut self, obs: &Observation) {
        let search = &mut self.searches[self.current];
        search.observe(obs);
        if search.is_finished() && self.current + 1 < self.searches.len() {
            self.current += 1;
        }
    }

    fn done(&self) -> Option<&SignalingScheme> {
        None
    }
}
