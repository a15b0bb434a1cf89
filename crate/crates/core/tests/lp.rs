//! Randomised checks of the simplex solver.

use persuade_core::lp::{LinearProgram, LpStatus, Relation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_packing(seed: u64, n: usize, m: usize) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = LinearProgram::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    for _ in 0..m {
        let coeffs = (0..n).map(|_| rng.gen_range(-0.5..1.0)).collect();
        lp.add_constraint(coeffs, Relation::Le, rng.gen_range(0.1..2.0));
    }
    for j in 0..n {
        lp.set_bounds(j, 0.0, 5.0);
    }
    if rng.gen_bool(0.5) {
        let mut row = vec![0.0; n];
        row[0] = 1.0;
        row[n - 1] += 1.0;
        lp.add_constraint(row, Relation::Ge, 0.05);
    }
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimum_dominates_feasible_points(seed in any::<u64>(), n in 1usize..7, m in 0usize..7) {
        let lp = random_packing(seed, n, m);
        let sol = lp.solve().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        if sol.status == LpStatus::Optimal {
            prop_assert!(lp.max_violation(&sol.x) <= 1e-8);
            prop_assert!((lp.objective_at(&sol.x) - sol.objective_value).abs() <= 1e-8);
            for _ in 0..50 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
                // shrink towards the optimum until feasible
                let mut t = 1.0;
                let mut y = x.clone();
                while lp.max_violation(&y) > 0.0 && t > 1e-6 {
                    t /= 2.0;
                    y = x.iter().zip(&sol.x).map(|(a, b)| t * a + (1.0 - t) * b).collect();
                }
                if lp.max_violation(&y) <= 0.0 {
                    prop_assert!(lp.objective_at(&y) <= sol.objective_value + 1e-8);
                }
            }
        }
    }

    #[test]
    fn solving_is_deterministic(seed in any::<u64>(), n in 1usize..7, m in 0usize..7) {
        let lp = random_packing(seed, n, m);
        let a = lp.solve().unwrap();
        let b = lp.solve().unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        prop_assert!(a.x.iter().zip(&b.x).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}

#[test]
fn transportation_problem() {
    // two supplies (3, 4), three demands (2, 2, 3); minimise cost
    let cost = [[4.0, 6.0, 9.0], [5.0, 3.0, 8.0]];
    let mut lp = LinearProgram::new(cost.iter().flatten().map(|c| -c).collect());
    for (i, supply) in [3.0, 4.0].into_iter().enumerate() {
        let mut row = vec![0.0; 6];
        row[3 * i..3 * i + 3].iter_mut().for_each(|c| *c = 1.0);
        lp.add_constraint(row, Relation::Eq, supply);
    }
    for (j, demand) in [2.0, 2.0, 3.0].into_iter().enumerate() {
        let mut row = vec![0.0; 6];
        row[j] = 1.0;
        row[3 + j] = 1.0;
        lp.add_constraint(row, Relation::Eq, demand);
    }
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    // ship 2 + 1 from the first supplier, 2 + 2 from the second
    assert!((sol.objective_value + (8.0 + 9.0 + 6.0 + 16.0)).abs() < 1e-9, "{}", sol.objective_value);
}
