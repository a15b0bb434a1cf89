//! Optimal direct schemes for a known prior.
//!
//! The general route is the persuasiveness LP over direct schemes. With two actions
//! the same program is a fractional knapsack: states are sorted by the sender's
//! gain per unit of receiver reluctance and action 1 is recommended greedily until
//! the obedience constraint binds.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::matrix::UtilityMatrix;
use crate::scheme::SignalingScheme;

/// Solves `max sum mu pi u` over persuasive direct schemes. Returns the scheme and `U*`.
pub fn optimal_scheme_general(
    prior: &Belief,
    u: &UtilityMatrix,
    v: &UtilityMatrix,
) -> Result<(SignalingScheme, f64)> {
    let (n, k) = (prior.len(), v.actions());
    if u.states() != n || v.states() != n || u.actions() != k {
        return Err(Error::Dimension("prior and utilities disagree"));
    }
    let var = |w: usize, a: usize| w * k + a;
    let mut objective = vec![0.0; n * k];
    for w in 0..n {
        for a in 0..k {
            objective[var(w, a)] = prior[w] * u.get(a, w);
        }
    }
    let mut lp = LinearProgram::new(objective);
    for a in 0..k {
        for other in (0..k).filter(|&o| o != a) {
            let mut row = vec![0.0; n * k];
            for w in 0..n {
                row[var(w, a)] = prior[w] * (v.get(a, w) - v.get(other, w));
            }
            lp.add_constraint(row, Relation::Ge, 0.0);
        }
    }
    for w in 0..n {
        let mut row = vec![0.0; n * k];
        row[var(w, 0)..var(w, 0) + k].iter_mut().for_each(|c| *c = 1.0);
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::LpNotOptimal("infeasible")),
        LpStatus::Unbounded => return Err(Error::LpNotOptimal("unbounded")),
    }
    let rows: Vec<Vec<f64>> = sol.x.chunks(k).map(|c| c.to_vec()).collect();
    let scheme = SignalingScheme::normalized(&rows, true)?;
    Ok((scheme, sol.objective_value))
}

/// State order for the two-action knapsack.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryOrdering {
    /// `order[position] = state`.
    pub order: Vec<usize>,
    /// Number of leading states where the receiver weakly prefers action 1.
    pub n_minus: usize,
}

impl BinaryOrdering {
    pub fn states(&self) -> usize {
        self.order.len()
    }

    pub fn position(&self, state: usize) -> usize {
        self.order.iter().position(|&w| w == state).expect("state in ordering")
    }
}

/// Result of the knapsack route.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryOptimum {
    pub scheme: SignalingScheme,
    pub ordering: BinaryOrdering,
    /// Position of the threshold state in `ordering.order`.
    pub threshold_position: usize,
    pub m_star: f64,
    pub value: f64,
}

impl BinaryOptimum {
    pub fn threshold_state(&self) -> usize {
        self.ordering.order[self.threshold_position]
    }
}

fn check_binary(u: &UtilityMatrix, v: &UtilityMatrix) -> Result<()> {
    if v.actions() != 2 || u.actions() != 2 {
        return Err(Error::NotBinaryAction(v.actions()));
    }
    if u.states() != v.states() {
        return Err(Error::Dimension("u and v disagree on state count"));
    }
    Ok(())
}

/// States with `v(0,w) <= v(1,w)` first (index order), then the rest by decreasing
/// `(u(1,w) - u(0,w)) / (v(0,w) - v(1,w))`, ties by index.
pub fn order_states_binary(u: &UtilityMatrix, v: &UtilityMatrix) -> Result<BinaryOrdering> {
    check_binary(u, v)?;
    let n = v.states();
    if let Some(state) = (0..n).find(|&w| u.get(1, w) <= u.get(0, w)) {
        return Err(Error::SenderPreferenceViolated { state });
    }
    let reluctance = |w: usize| v.get(0, w) - v.get(1, w);
    let mut order: Vec<usize> = (0..n).filter(|&w| reluctance(w) <= 0.0).collect();
    let n_minus = order.len();
    let mut plus: Vec<(f64, usize)> = (0..n)
        .filter(|&w| reluctance(w) > 0.0)
        .map(|w| ((u.get(1, w) - u.get(0, w)) / reluctance(w), w))
        .collect();
    plus.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    order.extend(plus.into_iter().map(|(_, w)| w));
    Ok(BinaryOrdering { order, n_minus })
}

/// Greedy optimum for two actions.
///
/// Requires the receiver to strictly prefer action 0 at the prior.
pub fn optimal_scheme_binary(prior: &Belief, u: &UtilityMatrix, v: &UtilityMatrix) -> Result<BinaryOptimum> {
    let ordering = order_states_binary(u, v)?;
    let n = prior.len();
    if n != v.states() {
        return Err(Error::Dimension("prior and utilities disagree"));
    }
    let weight = |w: usize| prior[w] * (v.get(0, w) - v.get(1, w));
    let total: f64 = (0..n).map(weight).sum();
    if !(total > 0.0) {
        return Err(Error::PriorPrefersAction1);
    }

    let mut signal1 = vec![0.0; n];
    let mut cumulative = 0.0;
    let mut threshold_position = n - 1;
    for (pos, &w) in ordering.order.iter().enumerate() {
        let item = weight(w);
        let next = cumulative + item;
        if next > 0.0 && item > 0.0 && item.is_finite() {
            signal1[w] = (-cumulative / item).clamp(0.0, 1.0);
            threshold_position = pos;
            break;
        }
        signal1[w] = 1.0;
        cumulative = next;
    }

    let rows: Vec<Vec<f64>> = signal1.iter().map(|&p| vec![1.0 - p, p]).collect();
    let scheme = SignalingScheme::direct(&rows)?;
    let m_star = signal1.iter().sum();
    let value = (0..n).map(|w| prior[w] * (signal1[w] * u.get(1, w) + (1.0 - signal1[w]) * u.get(0, w))).sum();
    Ok(BinaryOptimum { scheme, ordering, threshold_position, m_star, value })
}

/// `pi^M`: action 1 recommended surely in the first `floor(M)` ordered states, with
/// probability `M - floor(M)` in the next one, never afterwards.
pub fn scheme_from_strength(m: f64, ordering: &BinaryOrdering) -> Result<SignalingScheme> {
    let n = ordering.states();
    if !(m >= -1e-12 && m <= n as f64 + 1e-12) {
        return Err(Error::StrengthOutOfRange(m));
    }
    let mut rows = vec![vec![1.0, 0.0]; n];
    for (pos, &w) in ordering.order.iter().enumerate() {
        let p = (m - pos as f64).clamp(0.0, 1.0);
        rows[w] = vec![1.0 - p, p];
    }
    SignalingScheme::direct(&rows)
}

/// Persuasion strength `sum_w pi(1|w)` of a two-action direct scheme.
pub fn strength_of(scheme: &SignalingScheme) -> Result<f64> {
    if !scheme.is_direct() {
        return Err(Error::NotDirect);
    }
    if scheme.signals() != 2 {
        return Err(Error::NotBinaryAction(scheme.signals()));
    }
    Ok((0..scheme.states()).map(|w| scheme.prob(w, 1)).sum())
}

/// Optimal scheme and value, using the knapsack when it applies and the LP otherwise.
pub fn optimal_scheme(prior: &Belief, u: &UtilityMatrix, v: &UtilityMatrix) -> Result<(SignalingScheme, f64)> {
    if v.actions() == 2 {
        if let Ok(opt) = optimal_scheme_binary(prior, u, v) {
            return Ok((opt.scheme, opt.value));
        }
    }
    optimal_scheme_general(prior, u, v)
}

impl Instance {
    /// `(pi*, U*)` for the true prior.
    pub fn optimum(&self) -> Result<(SignalingScheme, f64)> {
        optimal_scheme(&self.prior, self.u(), self.v())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn court() -> (Belief, UtilityMatrix, UtilityMatrix) {
        (
            Belief::new(vec![0.7, 0.3]).unwrap(),
            UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap(),
            UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
    }

    #[test]
    fn general_lp_on_court() {
        let (prior, u, v) = court();
        let (scheme, value) = optimal_scheme_general(&prior, &u, &v).unwrap();
        assert!((value - 0.6).abs() < 1e-9);
        assert!((scheme.prob(0, 1) - 3.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn general_lp_point_mass_prior() {
        let (_, u, v) = court();
        let (_, value) = optimal_scheme_general(&Belief::point_mass(2, 0), &u, &v).unwrap();
        assert!(value.abs() < 1e-12);
        let (_, value) = optimal_scheme_general(&Belief::point_mass(2, 1), &u, &v).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_action_hard_instance_value() {
        let ev = 0.0125;
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5 + ev, 0.5 + ev]]).unwrap();
        let prior = Belief::new(vec![0.8, 0.2]).unwrap();
        let (_, value) = optimal_scheme_general(&prior, &u, &v).unwrap();
        assert!((value - 0.4 / 0.975).abs() < 1e-9);
    }

    #[test]
    fn ordering_examples() {
        let (_, u, v) = court();
        let ord = order_states_binary(&u, &v).unwrap();
        assert_eq!(ord.order, vec![1, 0]);
        assert_eq!(ord.n_minus, 1);

        let v_all_minus = UtilityMatrix::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let u3 = UtilityMatrix::from_rows(&[vec![0.0; 3], vec![1.0; 3]]).unwrap();
        let ord = order_states_binary(&u3, &v_all_minus).unwrap();
        assert_eq!(ord.order, vec![0, 1, 2]);
        assert_eq!(ord.n_minus, 3);
    }

    #[test]
    fn ordering_sorts_ratios_with_index_ties() {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0, 0.0, 0.0], vec![0.5, 1.0, 0.5, 0.2]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![0.5, 0.5, 0.5, 0.0], vec![0.0, 0.0, 0.0, 0.1]]).unwrap();
        let ord = order_states_binary(&u, &v).unwrap();
        assert_eq!(ord.order, vec![3, 1, 0, 2]);
        assert_eq!(ord.n_minus, 1);
    }

    #[test]
    fn sender_preference_required() {
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let u = UtilityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(order_states_binary(&u, &v).unwrap_err(), Error::SenderPreferenceViolated { state: 1 });
    }

    #[test]
    fn knapsack_on_court() {
        let (prior, u, v) = court();
        let opt = optimal_scheme_binary(&prior, &u, &v).unwrap();
        assert_eq!(opt.scheme.prob(1, 1), 1.0);
        assert!((opt.scheme.prob(0, 1) - 3.0 / 7.0).abs() < 1e-12);
        assert_eq!(opt.threshold_state(), 0);
        assert!((opt.m_star - 10.0 / 7.0).abs() < 1e-12);
        assert!((opt.value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn knapsack_rejects_convinced_receiver() {
        let (_, u, v) = court();
        let prior = Belief::new(vec![0.1, 0.9]).unwrap();
        assert_eq!(optimal_scheme_binary(&prior, &u, &v).unwrap_err(), Error::PriorPrefersAction1);
    }

    #[test]
    fn strength_family() {
        let (prior, u, v) = court();
        let ord = order_states_binary(&u, &v).unwrap();
        let zero = scheme_from_strength(0.0, &ord).unwrap();
        assert_eq!(zero.rows(), vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        let full = scheme_from_strength(2.0, &ord).unwrap();
        assert_eq!(full.rows(), vec![vec![0.0, 1.0], vec![0.0, 1.0]]);
        let s = scheme_from_strength(1.4, &ord).unwrap();
        assert_eq!(s.prob(1, 1), 1.0);
        assert!((s.prob(0, 1) - 0.4).abs() < 1e-12);
        assert!(matches!(scheme_from_strength(2.5, &ord), Err(Error::StrengthOutOfRange(_))));

        assert_eq!(strength_of(&zero).unwrap(), 0.0);
        let opt = optimal_scheme_binary(&prior, &u, &v).unwrap();
        assert!((strength_of(&opt.scheme).unwrap() - 10.0 / 7.0).abs() < 1e-12);
        let three = SignalingScheme::direct(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(strength_of(&three).unwrap(), 3.0);
        assert_eq!(strength_of(&SignalingScheme::full_revelation(2)).unwrap_err(), Error::NotDirect);
    }
}
