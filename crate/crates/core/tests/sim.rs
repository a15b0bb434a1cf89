//! Episode accounting, generators and the brute-force oracle.

mod common;

use persuade_core::learners::{LearnerKind, Oracle};
use persuade_core::optimal::{optimal_scheme_binary, optimal_scheme_general};
use persuade_core::persuasion::evaluate_scheme;
use persuade_core::sim::{
    gen_lower_bound_binary, gen_lower_bound_general, gen_random, oracle_grid_optimal, run_episode, EpisodeConfig,
    RandomConstraints, RandomShape,
};
use persuade_core::{Belief, TieRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_regret_is_zero_on_random_instances() {
    for seed in 0..20u64 {
        let shape = RandomShape { states: 2 + (seed % 3) as usize, actions: 2 + (seed % 3) as usize };
        let inst = gen_random(shape, 50 + seed, &RandomConstraints::default()).unwrap().instance;
        let mut oracle = Oracle::new(&inst).unwrap();
        let trace = run_episode(&inst, &mut oracle, 200, seed, &EpisodeConfig::default()).unwrap();
        assert!(trace.records.iter().all(|r| r.instant_regret >= -1e-9));
        assert!(trace.total_regret().abs() <= 1e-9, "seed {seed}: {}", trace.total_regret());
    }
}

#[test]
fn cumulative_is_prefix_sum_and_bounded() {
    let binary = RandomConstraints { binary_mode: true, ..Default::default() };
    let inst = gen_random(RandomShape { states: 3, actions: 2 }, 5, &binary).unwrap().instance;
    let config = EpisodeConfig { reveal_states: true, ..Default::default() };
    for name in LearnerKind::NAMES {
        let kind = LearnerKind::from_name(name).unwrap();
        let horizon = 3000;
        let mut learner = kind.build(&inst, horizon).unwrap();
        let trace = run_episode(&inst, learner.as_mut(), horizon, 11, &config).unwrap();
        let mut sum = 0.0;
        for (r, c) in trace.records.iter().zip(&trace.cumulative) {
            assert!(r.instant_regret <= 1.0 + 1e-12);
            sum += r.instant_regret;
            assert!((sum - c).abs() <= 1e-9);
        }
        assert!(trace.total_regret() <= horizon as f64);
    }
}

#[test]
fn episodes_are_deterministic() {
    let inst = gen_random(RandomShape { states: 3, actions: 3 }, 8, &RandomConstraints::default()).unwrap().instance;
    for name in ["alg3", "baseline_empirical", "uninformative"] {
        let kind = LearnerKind::from_name(name).unwrap();
        let run = |seed| {
            let mut l = kind.build(&inst, 2000).unwrap();
            let config = EpisodeConfig { reveal_states: true, ..Default::default() };
            run_episode(&inst, l.as_mut(), 2000, seed, &config).unwrap()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3).records, run(4).records);
    }
}

#[test]
fn hard_general_receiver_thresholds() {
    let hard = gen_lower_bound_general(0.05, 2).unwrap();
    let inst = &hard.instance;
    let eps_v = hard.eps_v;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..5000 {
        let p: f64 = rng.gen();
        let q: f64 = rng.gen();
        let mu = hard.mu();
        // likelihood ratio of state 1 to state 0 under signal 0
        let post1 = mu * q / (mu * q + (1.0 - mu) * p);
        let expected = if post1 < 0.5 - eps_v {
            0
        } else if post1 > 0.5 + eps_v {
            1
        } else {
            2
        };
        if ((post1 - 0.5).abs() - eps_v).abs() < 1e-9 {
            continue;
        }
        let scheme = persuade_core::SignalingScheme::new(&[vec![p, 1.0 - p], vec![q, 1.0 - q]], false).unwrap();
        let eval = evaluate_scheme(&inst.prior, &scheme, inst.u(), inst.v(), TieRule::default());
        assert_eq!(eval.actions[0], Some(expected), "posterior {post1}");
        checked += 1;
    }
    assert!(checked > 4000);
    let half = Belief::new(vec![0.5, 0.5]).unwrap();
    let a = persuade_core::best_response(&half, inst.v(), TieRule::default(), Some(inst.u()), None);
    assert_eq!(a, 2);
}

#[test]
fn random_generator_self_test() {
    for seed in 0..50u64 {
        let r = gen_random(RandomShape { states: 3, actions: 3 }, seed, &RandomConstraints::default()).unwrap();
        let m = r.instance.margins().unwrap();
        assert!(m.g > 0.0 && m.d > 0.0 && m.distinguishable_pair.is_some());
        assert!(r.instance.prior.min_mass() >= r.instance.p0() - 1e-15);
        let again = gen_random(RandomShape { states: 3, actions: 3 }, seed, &RandomConstraints::default()).unwrap();
        assert_eq!(r, again);
    }
    let binary = RandomConstraints { binary_mode: true, ..Default::default() };
    for seed in 0..50u64 {
        let shape = RandomShape { states: 2 + (seed % 5) as usize, actions: 2 };
        let inst = gen_random(shape, seed, &binary).unwrap().instance;
        assert!(optimal_scheme_binary(&inst.prior, inst.u(), inst.v()).is_ok());
    }
}

#[test]
fn hard_general_closed_form() {
    let hard = gen_lower_bound_general(0.05, 2).unwrap();
    assert_eq!(hard.k, 4);
    assert!((hard.eps_v - 1.0 / 80.0).abs() < 1e-15);
    for (g, e) in hard.gamma.iter().zip([0.1, 0.15, 0.2, 0.25, 0.3]) {
        assert!((g - e).abs() < 1e-12);
    }
    let inst = &hard.instance;
    let (_, value) = optimal_scheme_general(&inst.prior, inst.u(), inst.v()).unwrap();
    assert!((value - 0.4 / 0.975).abs() < 1e-9, "{value}");
    for idx in 0..=hard.k {
        let h = gen_lower_bound_general(0.05, idx).unwrap();
        let (_, v) = optimal_scheme_general(&h.instance.prior, h.instance.u(), h.instance.v()).unwrap();
        assert!((v - h.u_star()).abs() < 1e-9);
    }
}

#[test]
fn hard_binary_closed_form() {
    let hard = gen_lower_bound_binary(100, 0.5).unwrap();
    assert!((hard.eps - 1e-6).abs() < 1e-20);
    let mu1 = 5e-7 / (1.0 + 5e-7);
    assert!((hard.instance.prior[1] - mu1).abs() <= 1e-15);
    let inst = &hard.instance;
    let opt = optimal_scheme_binary(&inst.prior, inst.u(), inst.v()).unwrap();
    assert!((opt.scheme.prob(1, 1) - 1.0).abs() < 1e-9);
    assert!((opt.scheme.prob(0, 1) - 0.5).abs() < 1e-9);
    assert!((opt.value - hard.u_star()).abs() < 1e-9);
    assert!((hard.u_star() - 0.50000025).abs() < 1e-8);
    let grid = oracle_grid_optimal(inst, 1e-3).unwrap();
    assert!((grid - hard.u_star()).abs() <= 2e-3);
}
