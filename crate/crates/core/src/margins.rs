//! Regularity constants of the receiver's utility: the uniqueness gap `G`, the
//! dominance margin `D` with its witness beliefs, and a distinguishable state pair.

use alloc::vec;
use alloc::vec::Vec;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::{Instance, PublicModel};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::matrix::UtilityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Margins {
    /// Half the smallest gap between a state's optimal action and any rival.
    pub g: f64,
    pub raw_gap: f64,
    /// `a_w` for each state.
    pub optimal_action: Vec<usize>,
    pub d: f64,
    /// Witness `eta_a` for each action.
    pub eta: Vec<Belief>,
    /// Per-action optimum of the margin program; `d` is their minimum.
    pub per_action_d: Vec<f64>,
    pub distinguishable_pair: Option<(usize, usize)>,
}

/// `min_{a' != a} E_eta[v(a,.) - v(a',.)]`.
pub fn margin_at(v: &UtilityMatrix, action: usize, eta: &Belief) -> f64 {
    (0..v.actions())
        .filter(|&other| other != action)
        .map(|other| (0..v.states()).map(|w| eta[w] * (v.get(action, w) - v.get(other, w))).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// First index-ordered pair of states whose receiver-optimal actions differ.
pub fn distinguishable_pair(optimal_action: &[usize]) -> Option<(usize, usize)> {
    let n = optimal_action.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| optimal_action[i] != optimal_action[j])
}

/// Computes `G`, `D`, the witnesses and the distinguishable pair from `v`.
pub fn compute_margins(v: &UtilityMatrix) -> Result<Margins> {
    let (n_actions, n_states) = (v.actions(), v.states());
    if n_actions < 2 {
        return Err(Error::InvalidInstance("margins need at least two actions"));
    }
    let optimal_action: Vec<usize> = (0..n_states).map(|w| v.argmax_in_state(w)).collect();
    let mut raw_gap = f64::INFINITY;
    for (w, &a) in optimal_action.iter().enumerate() {
        for other in (0..n_actions).filter(|&o| o != a) {
            let gap = v.get(a, w) - v.get(other, w);
            if gap <= 0.0 {
                return Err(Error::AssumptionGViolated { state: w });
            }
            raw_gap = raw_gap.min(gap);
        }
    }

    let mut eta = Vec::with_capacity(n_actions);
    let mut per_action_d = Vec::with_capacity(n_actions);
    for a in 0..n_actions {
        let witness = margin_witness(v, a)?;
        let value = margin_at(v, a, &witness);
        if !(value > 0.0) {
            return Err(Error::AssumptionDViolated { action: a });
        }
        per_action_d.push(value);
        eta.push(witness);
    }
    let d = per_action_d.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Margins {
        g: raw_gap / 2.0,
        raw_gap,
        distinguishable_pair: distinguishable_pair(&optimal_action),
        optimal_action,
        d,
        eta,
        per_action_d,
    })
}

/// Solves `max t` s.t. `E_eta[v(a) - v(a')] >= t` for every rival, `eta` on the simplex.
fn margin_witness(v: &UtilityMatrix, action: usize) -> Result<Belief> {
    let n = v.states();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(objective);
    lp.set_free(n);
    let mut simplex = vec![1.0; n + 1];
    simplex[n] = 0.0;
    lp.add_constraint(simplex, Relation::Eq, 1.0);
    for other in (0..v.actions()).filter(|&o| o != action) {
        let mut row: Vec<f64> = (0..n).map(|w| v.get(action, w) - v.get(other, w)).collect();
        row.push(-1.0);
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpNotOptimal("margin program"));
    }
    Belief::normalized(sol.x[..n].to_vec())
}

impl PublicModel {
    pub fn margins(&self) -> Result<Margins> {
        compute_margins(&self.v)
    }
}

impl Instance {
    pub fn margins(&self) -> Result<Margins> {
        compute_margins(self.v())
    }
}
