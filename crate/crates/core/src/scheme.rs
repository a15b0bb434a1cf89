use alloc::vec::Vec;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::math;
use crate::SIMPLEX_TOL;

/// A conditional distribution `pi(signal | state)`, stored row-major by state.
///
/// A direct scheme uses signals as action recommendations, so signal `a` means
/// "take action `a`".
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingScheme {
    states: usize,
    signals: usize,
    cond: Vec<f64>,
    direct: bool,
}

impl SignalingScheme {
    /// Validates one row per state, each a distribution over the same signal set.
    pub fn new(rows: &[Vec<f64>], direct: bool) -> Result<Self> {
        let states = rows.len();
        if states == 0 {
            return Err(Error::InvalidScheme("no states"));
        }
        let signals = rows[0].len();
        if signals == 0 || rows.iter().any(|r| r.len() != signals) {
            return Err(Error::InvalidScheme("rows must share a positive signal count"));
        }
        let cond: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_flat(states, signals, cond, direct)
    }

    pub(crate) fn from_flat(
        states: usize,
        signals: usize,
        cond: Vec<f64>,
        direct: bool,
    ) -> Result<Self> {
        debug_assert_eq!(cond.len(), states * signals);
        if cond.iter().any(|p| !p.is_finite() || *p < -SIMPLEX_TOL || *p > 1.0 + SIMPLEX_TOL) {
            return Err(Error::InvalidScheme("entry outside [0, 1]"));
        }
        for row in cond.chunks(signals) {
            if math::abs(row.iter().sum::<f64>() - 1.0) > SIMPLEX_TOL {
                return Err(Error::InvalidScheme("row does not sum to one"));
            }
        }
        Ok(SignalingScheme { states, signals, cond, direct })
    }

    /// Like [`SignalingScheme::new`] but clamps rounding noise and renormalises each row.
    pub fn normalized(rows: &[Vec<f64>], direct: bool) -> Result<Self> {
        let mut fixed: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r: Vec<f64> = row.iter().map(|p| if *p < 0.0 { 0.0 } else { *p }).collect();
            let total: f64 = r.iter().sum();
            if !(total > 0.0) {
                return Err(Error::InvalidScheme("row with no mass"));
            }
            r.iter_mut().for_each(|p| *p /= total);
            fixed.push(r);
        }
        Self::new(&fixed, direct)
    }

    /// Direct scheme given one action distribution per state.
    pub fn direct(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows, true)
    }

    /// A single signal sent in every state.
    pub fn uninformative(states: usize) -> Self {
        SignalingScheme { states, signals: 1, cond: alloc::vec![1.0; states], direct: false }
    }

    /// Signal `omega` is sent exactly in state `omega`.
    pub fn full_revelation(states: usize) -> Self {
        let mut cond = alloc::vec![0.0; states * states];
        for w in 0..states {
            cond[w * states + w] = 1.0;
        }
        SignalingScheme { states, signals: states, cond, direct: false }
    }

    /// Direct scheme recommending `actions[omega]` with certainty in each state.
    pub fn deterministic_direct(actions: &[usize], action_count: usize) -> Self {
        let states = actions.len();
        let mut cond = alloc::vec![0.0; states * action_count];
        for (w, &a) in actions.iter().enumerate() {
            cond[w * action_count + a] = 1.0;
        }
        SignalingScheme { states, signals: action_count, cond, direct: true }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn signals(&self) -> usize {
        self.signals
    }

    pub fn is_direct(&self) -> bool {
        self.direct
    }

    #[inline]
    pub fn prob(&self, state: usize, signal: usize) -> f64 {
        self.cond[state * self.signals + signal]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.cond[state * self.signals..(state + 1) * self.signals]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.states).map(|w| self.row(w).to_vec()).collect()
    }

    /// Unconditional probability of `signal` under `prior`.
    pub fn signal_prob(&self, prior: &Belief, signal: usize) -> f64 {
        (0..self.states).map(|w| prior[w] * self.prob(w, signal)).sum()
    }

    /// A 64-bit FNV-1a hash over the shape, the direct flag and the exact entry bits.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |word: u64| {
            for byte in word.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(self.states as u64);
        eat(self.signals as u64);
        eat(self.direct as u64);
        for p in &self.cond {
            eat(p.to_bits());
        }
        h
    }
}
