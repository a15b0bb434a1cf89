//! Single-period primitives: Bayes updates, receiver best responses, sender utility
//! and persuasiveness of direct schemes.

use alloc::vec::Vec;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matrix::UtilityMatrix;
use crate::scheme::SignalingScheme;
use crate::ZERO_SIGNAL_PROB;

/// Relative tolerance deciding when two actions are tied at a belief.
///
/// Two actions tie when their expected-utility gap is at most this fraction of
/// `E[|v(a) - v(a')|]`. Being relative, the test is unaffected by how small the
/// posterior weights are, which matters for instances whose priors sit near 1e-16.
pub const TIE_REL_TOL: f64 = 1e-12;

/// How the receiver picks among equally good actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieRule {
    /// Best for the sender among the receiver's optimal actions, then lowest index.
    SenderPreferred,
    /// Lowest-index optimal action.
    LowestIndex,
    /// Follow the recommendation of a direct scheme when it is optimal, otherwise
    /// fall back to [`TieRule::SenderPreferred`].
    #[default]
    RecommendedThenSender,
}

impl TieRule {
    pub const ALL: [TieRule; 3] =
        [TieRule::SenderPreferred, TieRule::LowestIndex, TieRule::RecommendedThenSender];

    pub fn name(self) -> &'static str {
        match self {
            TieRule::SenderPreferred => "sender_preferred",
            TieRule::LowestIndex => "lowest_index",
            TieRule::RecommendedThenSender => "recommended_then_sender",
        }
    }

    pub fn from_name(name: &str) -> Option<TieRule> {
        TieRule::ALL.into_iter().find(|t| t.name() == name)
    }
}

/// Bayes update of `prior` after observing `signal` from `scheme`.
pub fn posterior_update(prior: &Belief, scheme: &SignalingScheme, signal: usize) -> Result<Belief> {
    if prior.len() != scheme.states() {
        return Err(Error::Dimension("prior and scheme disagree on state count"));
    }
    if signal >= scheme.signals() {
        return Err(Error::Dimension("signal index out of range"));
    }
    let joint: Vec<f64> = (0..prior.len()).map(|w| prior[w] * scheme.prob(w, signal)).collect();
    let total: f64 = joint.iter().sum();
    if total <= ZERO_SIGNAL_PROB {
        return Err(Error::ZeroProbabilitySignal { signal });
    }
    Ok(Belief::normalized(joint).expect("positive joint mass"))
}

/// Receiver action at `belief`; ties resolved by `tie`.
///
/// `u_for_ties` is consulted by the sender-preferred rules, `recommended` by
/// [`TieRule::RecommendedThenSender`].
pub fn best_response(
    belief: &Belief,
    v: &UtilityMatrix,
    tie: TieRule,
    u_for_ties: Option<&UtilityMatrix>,
    recommended: Option<usize>,
) -> usize {
    best_response_weighted(belief.probs(), v, tie, u_for_ties, recommended)
}

/// Same as [`best_response`] but on unnormalised state weights, e.g. `prior * pi(s|.)`.
pub(crate) fn best_response_weighted(
    weights: &[f64],
    v: &UtilityMatrix,
    tie: TieRule,
    u_for_ties: Option<&UtilityMatrix>,
    recommended: Option<usize>,
) -> usize {
    let expected = |a: usize| -> f64 { weights.iter().zip(v.row(a)).map(|(p, x)| p * x).sum() };
    let n_actions = v.actions();
    let mut values = [0.0f64; 16];
    let mut heap;
    let values: &mut [f64] = if n_actions <= values.len() {
        &mut values[..n_actions]
    } else {
        heap = alloc::vec![0.0; n_actions];
        &mut heap
    };
    let mut best = 0;
    for a in 0..n_actions {
        values[a] = expected(a);
        if values[a] > values[best] {
            best = a;
        }
    }
    let in_argmax = |a: usize| -> bool {
        if a == best {
            return true;
        }
        let scale: f64 = weights
            .iter()
            .zip(v.row(best).iter().zip(v.row(a)))
            .map(|(p, (x, y))| p * crate::math::abs(x - y))
            .sum();
        values[best] - values[a] <= TIE_REL_TOL * scale
    };

    if tie == TieRule::RecommendedThenSender {
        if let Some(r) = recommended {
            if r < n_actions && in_argmax(r) {
                return r;
            }
        }
    }
    let sender = match tie {
        TieRule::LowestIndex => None,
        _ => u_for_ties,
    };
    let mut chosen: Option<(usize, f64)> = None;
    for a in 0..n_actions {
        if !in_argmax(a) {
            continue;
        }
        let score = match sender {
            Some(u) => weights.iter().zip(u.row(a)).map(|(p, x)| p * x).sum(),
            None => 0.0,
        };
        match chosen {
            Some((_, s)) if score <= s => {}
            _ => chosen = Some((a, score)),
        }
    }
    chosen.map(|(a, _)| a).unwrap_or(best)
}

/// Receiver action for each signal of `scheme` under `prior` (`None` when the signal
/// is never sent) together with the sender's expected utility.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeEvaluation {
    pub utility: f64,
    pub actions: Vec<Option<usize>>,
}

/// Evaluates `scheme` against `prior` with receiver utility `v` and sender utility `u`.
pub fn evaluate_scheme(
    prior: &Belief,
    scheme: &SignalingScheme,
    u: &UtilityMatrix,
    v: &UtilityMatrix,
    tie: TieRule,
) -> SchemeEvaluation {
    let n = prior.len();
    let mut weights = alloc::vec![0.0; n];
    let mut utility = 0.0;
    let mut actions = Vec::with_capacity(scheme.signals());
    for s in 0..scheme.signals() {
        for (w, slot) in weights.iter_mut().enumerate() {
            *slot = prior[w] * scheme.prob(w, s);
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            actions.push(None);
            continue;
        }
        let recommended = scheme.is_direct().then_some(s);
        let a = best_response_weighted(&weights, v, tie, Some(u), recommended);
        utility += weights.iter().zip(u.row(a)).map(|(p, x)| p * x).sum::<f64>();
        actions.push(Some(a));
    }
    SchemeEvaluation { utility, actions }
}

/// `U(prior, scheme)`: the sender's expected utility when the receiver best-responds.
pub fn utility_at(
    prior: &Belief,
    scheme: &SignalingScheme,
    u: &UtilityMatrix,
    v: &UtilityMatrix,
    tie: TieRule,
) -> f64 {
    evaluate_scheme(prior, scheme, u, v, tie).utility
}

/// `U(mu*, scheme)` for the instance's true prior.
pub fn sender_utility(instance: &Instance, scheme: &SignalingScheme, tie: TieRule) -> f64 {
    utility_at(&instance.prior, scheme, instance.u(), instance.v(), tie)
}

/// Per-action persuasiveness of a direct scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Persuasiveness {
    pub per_action: Vec<bool>,
    pub overall: bool,
}

/// Smallest obedience margin `min_{a'} sum_w prior(w) pi(a|w) [v(a,w) - v(a',w)]` of
/// recommendation `action`.
pub fn obedience_slack(prior: &Belief, scheme: &SignalingScheme, v: &UtilityMatrix, action: usize) -> f64 {
    (0..v.actions())
        .filter(|&other| other != action)
        .map(|other| {
            (0..prior.len())
                .map(|w| prior[w] * scheme.prob(w, action) * (v.get(action, w) - v.get(other, w)))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Checks every recommendation of a direct scheme against tolerance `tol`.
pub fn is_persuasive(
    prior: &Belief,
    scheme: &SignalingScheme,
    v: &UtilityMatrix,
    tol: f64,
) -> Result<Persuasiveness> {
    if !scheme.is_direct() {
        return Err(Error::NotDirect);
    }
    if scheme.signals() != v.actions() || scheme.states() != prior.len() {
        return Err(Error::Dimension("direct scheme must have one signal per action"));
    }
    let per_action: Vec<bool> =
        (0..v.actions()).map(|a| obedience_slack(prior, scheme, v, a) >= -tol).collect();
    let overall = per_action.iter().all(|&ok| ok);
    Ok(Persuasiveness { per_action, overall })
}

impl Instance {
    pub fn is_persuasive(&self, scheme: &SignalingScheme, tol: f64) -> Result<Persuasiveness> {
        is_persuasive(&self.prior, scheme, self.v(), tol)
    }

    pub fn sender_utility(&self, scheme: &SignalingScheme, tie: TieRule) -> f64 {
        sender_utility(self, scheme, tie)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::PublicModel;
    use alloc::vec;

    // innocent = 0, guilty = 1; acquit = 0, convict = 1
    fn court() -> Instance {
        let u = UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v = UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let model = PublicModel::new(u, v, 0.25).unwrap();
        Instance::new(model, Belief::new(vec![0.7, 0.3]).unwrap()).unwrap()
    }

    fn optimal_court_scheme() -> SignalingScheme {
        SignalingScheme::direct(&[vec![4.0 / 7.0, 3.0 / 7.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn posterior_examples() {
        let prior = Belief::new(vec![0.7, 0.3]).unwrap();
        let flat = SignalingScheme::new(&[vec![0.2, 0.8], vec![0.2, 0.8]], false).unwrap();
        for s in 0..2 {
            let post = posterior_update(&prior, &flat, s).unwrap();
            assert!((post[0] - 0.7).abs() < 1e-12 && (post[1] - 0.3).abs() < 1e-12);
        }
        let reveal = SignalingScheme::full_revelation(2);
        assert_eq!(posterior_update(&prior, &reveal, 1).unwrap().probs(), &[0.0, 1.0]);

        let partial = SignalingScheme::new(&[vec![4.0 / 7.0, 3.0 / 7.0], vec![0.0, 1.0]], false).unwrap();
        let post = posterior_update(&prior, &partial, 1).unwrap();
        // hand Bayes: 0.3 / (0.3 + 0.7 * 3/7) = 0.5
        assert!((post[0] - 0.5).abs() < 1e-12 && (post[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn posterior_rejects_zero_probability_signal() {
        let prior = Belief::new(vec![0.7, 0.3]).unwrap();
        let scheme = SignalingScheme::new(&[vec![1.0, 0.0], vec![1.0, 0.0]], false).unwrap();
        assert_eq!(
            posterior_update(&prior, &scheme, 1).unwrap_err(),
            Error::ZeroProbabilitySignal { signal: 1 }
        );
    }

    #[test]
    fn best_response_examples() {
        let inst = court();
        let guilty = Belief::point_mass(2, 1);
        assert_eq!(best_response(&guilty, inst.v(), TieRule::LowestIndex, None, None), 1);

        let even = Belief::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(best_response(&even, inst.v(), TieRule::SenderPreferred, Some(inst.u()), None), 1);
        assert_eq!(best_response(&even, inst.v(), TieRule::LowestIndex, Some(inst.u()), None), 0);
        assert_eq!(
            best_response(&even, inst.v(), TieRule::RecommendedThenSender, Some(inst.u()), Some(0)),
            0
        );

        assert_eq!(best_response(&inst.prior, inst.v(), TieRule::SenderPreferred, Some(inst.u()), None), 0);
    }

    #[test]
    fn recommendation_ignored_when_not_optimal() {
        let inst = court();
        let b = Belief::new(vec![0.7, 0.3]).unwrap();
        assert_eq!(
            best_response(&b, inst.v(), TieRule::RecommendedThenSender, Some(inst.u()), Some(1)),
            0
        );
    }

    #[test]
    fn sender_utility_examples() {
        let inst = court();
        let tie = TieRule::default();
        assert_eq!(inst.sender_utility(&SignalingScheme::uninformative(2), tie), 0.0);
        assert!((inst.sender_utility(&SignalingScheme::full_revelation(2), tie) - 0.3).abs() < 1e-12);
        assert!((inst.sender_utility(&optimal_court_scheme(), tie) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn persuasiveness_examples() {
        let inst = court();
        let p = inst.is_persuasive(&optimal_court_scheme(), crate::PERSUASION_TOL).unwrap();
        assert!(p.overall);
        assert!(obedience_slack(&inst.prior, &optimal_court_scheme(), inst.v(), 1).abs() < 1e-12);

        let always_convict = SignalingScheme::direct(&[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let p = inst.is_persuasive(&always_convict, crate::PERSUASION_TOL).unwrap();
        assert_eq!(p.per_action, vec![true, false]);
        assert!(!p.overall);

        let reveal = SignalingScheme::deterministic_direct(&[0, 1], 2);
        assert!(inst.is_persuasive(&reveal, crate::PERSUASION_TOL).unwrap().overall);

        assert_eq!(
            inst.is_persuasive(&SignalingScheme::full_revelation(2), 1e-9).unwrap_err(),
            Error::NotDirect
        );
    }

    #[test]
    fn tie_rule_names_round_trip() {
        for t in TieRule::ALL {
            assert_eq!(TieRule::from_name(t.name()), Some(t));
        }
        assert_eq!(TieRule::from_name("coin_flip"), None);
    }
}
