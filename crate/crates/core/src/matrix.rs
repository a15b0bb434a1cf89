use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A utility table indexed `[action][state]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix {
    actions: usize,
    states: usize,
    data: Vec<f64>,
}

impl UtilityMatrix {
    /// Builds from rows (one per action), each with one entry per state.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let actions = rows.len();
        if actions == 0 {
            return Err(Error::Dimension("utility matrix has no actions"));
        }
        let states = rows[0].len();
        if states == 0 || rows.iter().any(|r| r.len() != states) {
            return Err(Error::Dimension("utility rows must share a positive state count"));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInstance("non-finite utility"));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(UtilityMatrix { actions, states, data })
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn get(&self, action: usize, state: usize) -> f64 {
        self.data[action * self.states + state]
    }

    /// The per-state utilities of one action.
    pub fn row(&self, action: usize) -> &[f64] {
        &self.data[action * self.states..(action + 1) * self.states]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.actions).map(|a| self.row(a).to_vec()).collect()
    }

    /// True when every entry lies in `[0, 1]`.
    pub fn in_unit_range(&self) -> bool {
        self.data.iter().all(|x| (0.0..=1.0).contains(x))
    }

    /// Applies `x -> scale * x + shift` entrywise.
    pub fn affine(&self, scale: f64, shift: f64) -> UtilityMatrix {
        UtilityMatrix {
            actions: self.actions,
            states: self.states,
            data: self.data.iter().map(|x| scale * x + shift).collect(),
        }
    }

    /// Receiver-optimal action in `state`, lowest index on exact ties.
    pub fn argmax_in_state(&self, state: usize) -> usize {
        let mut best = 0;
        for a in 1..self.actions {
            if self.get(a, state) > self.get(best, state) {
                best = a;
            }
        }
        best
    }
}
