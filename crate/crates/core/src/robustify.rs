//! Robustification: from a scheme persuasive at an estimate `mu_hat` to a direct
//! scheme persuasive at every prior within l1 distance `eps` of it.
//!
//! Each recommendation's posterior is pulled towards the action's margin witness,
//! the prior is split into the mixed posteriors plus a remainder `chi`, and the
//! remainder is sent as "reveal the state", which is then folded into the
//! recommendation of that state's optimal action.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::margins::Margins;
use crate::matrix::UtilityMatrix;
use crate::optimal::optimal_scheme;
use crate::persuasion::{is_persuasive, obedience_slack};
use crate::scheme::SignalingScheme;
use crate::PERSUASION_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct RobustificationParams {
    pub eps: f64,
    pub p0: f64,
    pub d: f64,
    pub eta: Vec<Belief>,
    pub optimal_action: Vec<usize>,
}

impl RobustificationParams {
    /// Fails with [`Error::PreconditionEpsTooLarge`] unless `eps <= p0^2 D / 2`.
    pub fn new(eps: f64, p0: f64, margins: &Margins) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter("radius must be finite and non-negative"));
        }
        if !(p0 > 0.0) {
            return Err(Error::InvalidParameter("p0 must be positive"));
        }
        let max = max_radius(p0, margins.d);
        if eps > max * (1.0 + 1e-12) {
            return Err(Error::PreconditionEpsTooLarge { eps, max });
        }
        Ok(RobustificationParams {
            eps,
            p0,
            d: margins.d,
            eta: margins.eta.clone(),
            optimal_action: margins.optimal_action.clone(),
        })
    }

    /// `delta = 2 eps / (p0 D)`.
    pub fn delta(&self) -> f64 {
        2.0 * self.eps / (self.p0 * self.d)
    }
}

/// Largest admissible radius `p0^2 D / 2`.
pub fn max_radius(p0: f64, d: f64) -> f64 {
    p0 * p0 * d / 2.0
}

/// `mu = (1 - y) xi + y chi` with the smallest `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub y: f64,
    /// `None` when `y = 0`.
    pub chi: Option<Belief>,
}

/// Returns `y = max_w max(0, 1 - mu(w)/xi(w))` and the remainder `chi`.
pub fn decompose_small_y(mu: &Belief, xi: &Belief) -> Result<Decomposition> {
    if mu.len() != xi.len() {
        return Err(Error::Dimension("beliefs of different length"));
    }
    let (y, residual) = split_residual(mu.probs(), xi.probs());
    if y == 0.0 {
        return Ok(Decomposition { y, chi: None });
    }
    for (w, &r) in residual.iter().enumerate() {
        let value = r / y;
        if value < -1e-9 && r < -1e-12 {
            return Err(Error::DecompositionInfeasible { component: w, value });
        }
    }
    let chi = Belief::normalized(residual)?;
    Ok(Decomposition { y, chi: Some(chi) })
}

/// `y` and the unnormalised remainder `y chi = mu - (1 - y) xi`.
fn split_residual(mu: &[f64], xi: &[f64]) -> (f64, Vec<f64>) {
    let mut y: f64 = 0.0;
    for (m, x) in mu.iter().zip(xi) {
        if *x > 0.0 {
            y = y.max(1.0 - m / x);
        }
    }
    let y = y.min(1.0);
    let residual = mu.iter().zip(xi).map(|(m, x)| m - (1.0 - y) * x).collect();
    (y, residual)
}

/// Intermediate quantities of a robustification, for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustifyReport {
    pub scheme: SignalingScheme,
    pub delta: f64,
    /// `xi_a` per recommendation; `None` for recommendations never sent under `mu_hat`.
    pub mixed: Vec<Option<Belief>>,
    /// Recommendation probabilities `P(a)` under `mu_hat`.
    pub signal_probs: Vec<f64>,
    pub y: f64,
}

/// Robust version of `pi_hat`; see the module docs.
pub fn robustify(
    mu_hat: &Belief,
    pi_hat: &SignalingScheme,
    params: &RobustificationParams,
    v: &UtilityMatrix,
) -> Result<SignalingScheme> {
    robustify_with_report(mu_hat, pi_hat, params, v).map(|r| r.scheme)
}

pub fn robustify_with_report(
    mu_hat: &Belief,
    pi_hat: &SignalingScheme,
    params: &RobustificationParams,
    v: &UtilityMatrix,
) -> Result<RobustifyReport> {
    if !pi_hat.is_direct() {
        return Err(Error::NotDirect);
    }
    let (n, k) = (mu_hat.len(), v.actions());
    if pi_hat.states() != n || pi_hat.signals() != k || v.states() != n || params.eta.len() != k {
        return Err(Error::Dimension("robustify inputs disagree"));
    }
    if mu_hat.min_mass() < params.p0 - 1e-9 {
        return Err(Error::PriorBelowFloor);
    }
    if !is_persuasive(mu_hat, pi_hat, v, PERSUASION_TOL)?.overall {
        return Err(Error::NotPersuasiveInput);
    }
    let delta = params.delta();

    // mixed posteriors xi_a weighted by P(a)
    let mut weighted = vec![vec![0.0; n]; k];
    let mut mixed = vec![None; k];
    let mut signal_probs = vec![0.0; k];
    let mut xi = vec![0.0; n];
    for a in 0..k {
        let joint: Vec<f64> = (0..n).map(|w| mu_hat[w] * pi_hat.prob(w, a)).collect();
        let pa: f64 = joint.iter().sum();
        signal_probs[a] = pa;
        if !(pa > 0.0) {
            continue;
        }
        let xi_a: Vec<f64> = (0..n).map(|w| (1.0 - delta) * joint[w] / pa + delta * params.eta[a][w]).collect();
        for w in 0..n {
            weighted[a][w] = pa * xi_a[w];
            xi[w] += weighted[a][w];
        }
        mixed[a] = Some(Belief::normalized(xi_a)?);
    }
    let (y, residual) = split_residual(mu_hat.probs(), &xi);
    for (w, &r) in residual.iter().enumerate() {
        if y > 0.0 && r / y < -1e-9 && r < -1e-12 {
            return Err(Error::DecompositionInfeasible { component: w, value: r / y });
        }
    }

    let mut rows = vec![vec![0.0; k]; n];
    for w in 0..n {
        for a in 0..k {
            rows[w][a] = (1.0 - y) * weighted[a][w] / mu_hat[w];
        }
        rows[w][params.optimal_action[w]] += residual[w].max(0.0) / mu_hat[w];
    }
    let scheme = SignalingScheme::normalized(&rows, true)?;
    Ok(RobustifyReport { scheme, delta, mixed, signal_probs, y })
}

/// l1-closest belief with every entry at least `p0`, and its distance from `mu`.
pub fn project_to_floor(mu: &Belief, p0: f64) -> Result<(Belief, f64)> {
    let n = mu.len();
    if p0 * n as f64 > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter("p0 exceeds 1/|states|"));
    }
    let deficit: f64 = mu.probs().iter().map(|m| (p0 - m).max(0.0)).sum();
    if deficit == 0.0 {
        return Ok((mu.clone(), 0.0));
    }
    let excess: f64 = mu.probs().iter().map(|m| (m - p0).max(0.0)).sum();
    let out: Vec<f64> = mu
        .probs()
        .iter()
        .map(|&m| if m <= p0 { p0 } else { m - deficit * (m - p0) / excess })
        .collect();
    let projected = Belief::normalized(out)?;
    let dist = projected.l1_distance(mu);
    Ok((projected, dist))
}

/// Optimal scheme for `mu_hat` robustified with radius `eps`.
///
/// An estimate below the floor is first projected onto it; the radius grows by the
/// projection distance and is capped at `p0^2 D / 2`.
pub fn robust_optimal_scheme(
    mu_hat: &Belief,
    eps: f64,
    p0: f64,
    margins: &Margins,
    u: &UtilityMatrix,
    v: &UtilityMatrix,
) -> Result<SignalingScheme> {
    let (center, dist) = project_to_floor(mu_hat, p0)?;
    let radius = (eps + dist).min(max_radius(p0, margins.d));
    let params = RobustificationParams::new(radius, p0, margins)?;
    let (pi_hat, _) = optimal_scheme(&center, u, v)?;
    robustify(&center, &pi_hat, &params, v)
}

/// Test points for ball persuasiveness: every pairwise transfer of `eps/2` (clipped
/// at zero), then uniform draws from the ball intersected with the simplex.
pub fn sample_ball<R: Rng + ?Sized>(center: &Belief, eps: f64, count: usize, rng: &mut R) -> Vec<Belief> {
    let n = center.len();
    let mut out = Vec::with_capacity(count);
    'pairs: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if out.len() == count {
                break 'pairs;
            }
            let mut p = center.probs().to_vec();
            let amount = (eps / 2.0).min(p[j]);
            p[j] -= amount;
            p[i] += amount;
            out.push(Belief::normalized(p).expect("perturbed belief"));
        }
    }
    while out.len() < count {
        let mut dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = dir.iter().sum::<f64>() / n as f64;
        dir.iter_mut().for_each(|d| *d -= mean);
        let norm: f64 = dir.iter().map(|d| d.abs()).sum();
        if norm == 0.0 {
            continue;
        }
        let mut step = eps * rng.gen::<f64>() / norm;
        for (c, d) in center.probs().iter().zip(&dir) {
            if *d < 0.0 {
                step = step.min(c / -d);
            }
        }
        let p: Vec<f64> = center.probs().iter().zip(&dir).map(|(c, d)| (c + step * d).max(0.0)).collect();
        out.push(Belief::normalized(p).expect("sampled belief"));
    }
    out
}

/// Checks persuasiveness of a direct scheme at each sampled belief.
pub fn persuasive_on_samples(samples: &[Belief], scheme: &SignalingScheme, v: &UtilityMatrix, tol: f64) -> bool {
    samples
        .iter()
        .all(|mu| (0..v.actions()).all(|a| obedience_slack(mu, scheme, v, a) >= -tol))
}

/// Exact check over the whole ball: for each recommendation and rival, minimises the
/// obedience margin over `{mu in simplex : |mu - center|_1 <= eps}` with an LP.
pub fn persuasive_on_ball_exact(
    center: &Belief,
    eps: f64,
    scheme: &SignalingScheme,
    v: &UtilityMatrix,
    tol: f64,
) -> Result<bool> {
    let (n, k) = (center.len(), v.actions());
    for a in 0..k {
        for other in (0..k).filter(|&o| o != a) {
            // variables: mu (n), up (n), down (n)
            let mut objective = vec![0.0; 3 * n];
            for w in 0..n {
                objective[w] = -scheme.prob(w, a) * (v.get(a, w) - v.get(other, w));
            }
            let mut lp = LinearProgram::new(objective);
            let mut simplex = vec![0.0; 3 * n];
            simplex[..n].iter_mut().for_each(|c| *c = 1.0);
            lp.add_constraint(simplex, Relation::Eq, 1.0);
            for w in 0..n {
                let mut row = vec![0.0; 3 * n];
                row[w] = 1.0;
                row[n + w] = -1.0;
                row[2 * n + w] = 1.0;
                lp.add_constraint(row, Relation::Eq, center[w]);
            }
            let mut budget = vec![1.0; 3 * n];
            budget[..n].iter_mut().for_each(|c| *c = 0.0);
            lp.add_constraint(budget, Relation::Le, eps);
            let sol = lp.solve()?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::LpNotOptimal("ball check"));
            }
            if -sol.objective_value < -tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margins::compute_margins;
    use crate::optimal::optimal_scheme_binary;
    use crate::persuasion::{utility_at, TieRule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn court() -> (Belief, UtilityMatrix, UtilityMatrix) {
        (
            Belief::new(vec![0.7, 0.3]).unwrap(),
            UtilityMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap(),
            UtilityMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
    }

    #[test]
    fn decomposition_examples() {
        let half = Belief::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(decompose_small_y(&half, &half).unwrap(), Decomposition { y: 0.0, chi: None });
        let xi = Belief::new(vec![0.6, 0.4]).unwrap();
        let d = decompose_small_y(&half, &xi).unwrap();
        assert!((d.y - 1.0 / 6.0).abs() < 1e-12);
        let chi = d.chi.unwrap();
        assert!(chi[0].abs() < 1e-12 && (chi[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_radius_keeps_scheme() {
        let (prior, u, v) = court();
        let margins = compute_margins(&v).unwrap();
        let pi = optimal_scheme_binary(&prior, &u, &v).unwrap().scheme;
        let params = RobustificationParams::new(0.0, 0.25, &margins).unwrap();
        let out = robustify(&prior, &pi, &params, &v).unwrap();
        for (a, b) in out.rows().iter().flatten().zip(pi.rows().iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn court_example() {
        let (prior, u, v) = court();
        let margins = compute_margins(&v).unwrap();
        let pi = optimal_scheme_binary(&prior, &u, &v).unwrap().scheme;
        let params = RobustificationParams::new(0.01, 0.25, &margins).unwrap();
        assert!((params.delta() - 0.08).abs() < 1e-12);
        let report = robustify_with_report(&prior, &pi, &params, &v).unwrap();
        let xi_convict = report.mixed[1].as_ref().unwrap();
        assert!((xi_convict[0] - 0.46).abs() < 1e-12 && (xi_convict[1] - 0.54).abs() < 1e-12);
        let out = report.scheme;

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = sample_ball(&prior, 0.01, 200, &mut rng);
        assert_eq!(samples.len(), 200);
        assert!(samples.iter().all(|s| s.l1_distance(&prior) <= 0.01 + 1e-12));
        assert!(persuasive_on_samples(&samples, &out, &v, 1e-9));
        assert!(persuasive_on_ball_exact(&prior, 0.01, &out, &v, 1e-9).unwrap());
        let loss = utility_at(&prior, &pi, &u, &v, TieRule::default())
            - utility_at(&prior, &out, &u, &v, TieRule::default());
        assert!(loss <= 0.05, "loss {loss}");
    }

    #[test]
    fn radius_precondition() {
        let (_, _, v) = court();
        let margins = compute_margins(&v).unwrap();
        assert!(RobustificationParams::new(0.03125, 0.25, &margins).is_ok());
        assert!(matches!(
            RobustificationParams::new(0.04, 0.25, &margins),
            Err(Error::PreconditionEpsTooLarge { .. })
        ));
    }

    #[test]
    fn rejects_unpersuasive_input() {
        let (prior, _, v) = court();
        let margins = compute_margins(&v).unwrap();
        let params = RobustificationParams::new(0.01, 0.25, &margins).unwrap();
        let bad = SignalingScheme::direct(&[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(robustify(&prior, &bad, &params, &v).unwrap_err(), Error::NotPersuasiveInput);
    }

    #[test]
    fn projection_onto_floor() {
        let mu = Belief::new(vec![0.05, 0.95]).unwrap();
        let (p, dist) = project_to_floor(&mu, 0.25).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-12);
        assert!((dist - 0.4).abs() < 1e-12);
        let (same, zero) = project_to_floor(&Belief::new(vec![0.3, 0.7]).unwrap(), 0.25).unwrap();
        assert_eq!(same.probs(), &[0.3, 0.7]);
        assert_eq!(zero, 0.0);
    }
}
