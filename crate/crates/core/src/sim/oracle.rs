//! Brute-force optimum by grid search, independent of the LP and knapsack code.

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matrix::UtilityMatrix;
use crate::math::round;
use crate::optimal::{order_states_binary, scheme_from_strength};
use crate::persuasion::{best_response_weighted, utility_at, TieRule};

/// Best sender utility over a grid of schemes with spacing `step`.
///
/// Two states: every two-signal scheme `(pi(s0|0), pi(s0|1))` on the grid, receiver
/// ties broken for the sender. Otherwise, two actions: every strength `M` on the grid.
pub fn oracle_grid_optimal_at(prior: &Belief, u: &UtilityMatrix, v: &UtilityMatrix, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter("grid step must lie in (0, 1]"));
    }
    let n = round(1.0 / step) as usize;
    if prior.len() == 2 {
        let mut best = f64::NEG_INFINITY;
        let mut w = [0.0; 2];
        for i in 0..=n {
            let x = i as f64 / n as f64;
            for j in 0..=n {
                let y = j as f64 / n as f64;
                let mut total = 0.0;
                for (px, py) in [(x, y), (1.0 - x, 1.0 - y)] {
                    w[0] = prior[0] * px;
                    w[1] = prior[1] * py;
                    if w[0] + w[1] > 0.0 {
                        let a = best_response_weighted(&w, v, TieRule::SenderPreferred, Some(u), None);
                        total += w[0] * u.get(a, 0) + w[1] * u.get(a, 1);
                    }
                }
                best = best.max(total);
            }
        }
        return Ok(best);
    }
    if v.actions() == 2 {
        let ordering = order_states_binary(u, v)
            .map_err(|_| Error::UnsupportedShape("two actions but the sender does not always prefer action 1"))?;
        let states = prior.len();
        let mut best = f64::NEG_INFINITY;
        for i in 0..=n * states {
            let m = (i as f64 / n as f64).min(states as f64);
            let scheme = scheme_from_strength(m, &ordering)?;
            best = best.max(utility_at(prior, &scheme, u, v, TieRule::default()));
        }
        return Ok(best);
    }
    Err(Error::UnsupportedShape("grid oracle needs two states or two actions"))
}

pub fn oracle_grid_optimal(instance: &Instance, step: f64) -> Result<f64> {
    oracle_grid_optimal_at(&instance.prior, instance.u(), instance.v(), step)
}
