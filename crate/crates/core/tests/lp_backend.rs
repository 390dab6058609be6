mod common;

use common::oracles::*;
use msep::lp::{extract_duals, CscMatrix, LpBackend, LpError, LpProblem, LpStatus, RevisedSimplex, VarStatus};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

fn assert_optimality_invariants(p: &LpProblem, sol: &msep::lp::LpSolution) {
    let bnorm = p.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(p.primal_residual(&sol.x) <= 1e-7 * (1.0 + bnorm), "primal residual");
    assert!(p.bound_violation(&sol.x) <= 1e-7 * (1.0 + bnorm), "bound violation");
    let gap = (sol.objective - sol.dual_objective(p)).abs();
    assert!(gap <= 1e-7 * (1.0 + sol.objective.abs()), "duality gap {gap}");
    let dscale = 1.0 + p.cost.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for j in 0..p.num_cols() {
        let d = sol.reduced_costs[j];
        let at_lower = (sol.x[j] - p.lower[j]).abs() <= 1e-9;
        let at_upper = (sol.x[j] - p.upper[j]).abs() <= 1e-9;
        if !at_lower && !at_upper {
            assert!(d.abs() <= 1e-6 * dscale, "interior column {j} has d={d}");
        } else if at_lower && !at_upper {
            assert!(d >= -1e-6 * dscale, "column {j} at lower with d={d}");
        } else if at_upper && !at_lower {
            assert!(d <= 1e-6 * dscale, "column {j} at upper with d={d}");
        }
    }
}

#[test]
fn single_variable_equality() {
    let p = dense_problem(&[vec![1.0]], vec![1.0], vec![1.0], vec![0.0], vec![2.0]);
    let sol = RevisedSimplex::default().solve(&p, None).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective - 1.0).abs() < 1e-12);
    assert!((sol.duals[0] - 1.0).abs() < 1e-12);
}

#[test]
fn contradictory_rows_are_infeasible() {
    let p = dense_problem(&[vec![1.0], vec![1.0]], vec![1.0, 2.0], vec![0.0], vec![-INF], vec![INF]);
    let sol = RevisedSimplex::default().solve(&p, None).unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
    assert!(matches!(extract_duals(&sol, 0..1), Err(LpError::NotOptimal(LpStatus::Infeasible))));
}

#[test]
fn unbounded_ray_detected() {
    // min -x1  s.t. x1 - x2 = 0, x >= 0
    let p = dense_problem(&[vec![1.0, -1.0]], vec![0.0], vec![-1.0, 0.0], vec![0.0, 0.0], vec![INF, INF]);
    let sol = RevisedSimplex::default().solve(&p, None).unwrap();
    assert_eq!(sol.status, LpStatus::Unbounded);
}

#[test]
fn invalid_problems_rejected() {
    let a = CscMatrix::from_triplets(2, 1, &[(0, 0, 1.0)]);
    let p = LpProblem::new(a, vec![1.0, 0.0], vec![0.0], vec![0.0], vec![1.0]);
    assert!(matches!(RevisedSimplex::default().solve(&p, None), Err(LpError::EmptyRow(1))));
    let p = dense_problem(&[vec![f64::NAN]], vec![1.0], vec![0.0], vec![0.0], vec![1.0]);
    assert!(matches!(RevisedSimplex::default().solve(&p, None), Err(LpError::NonFinite(_))));
}

#[test]
fn matches_vertex_enumeration_on_fifty_tiny_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let solver = RevisedSimplex::default();
    for case in 0..50 {
        let n = rng.random_range(2..=8);
        let m = rng.random_range(1..=n.min(4));
        let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, m, n);
        let Some(oracle) = vertex_enumeration(&rows, &rhs, &cost, &lower, &upper) else {
            panic!("case {case}: oracle found no vertex");
        };
        let p = dense_problem(&rows, rhs, cost, lower, upper);
        let sol = solver.solve(&p, None).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
        assert!(
            (sol.objective - oracle).abs() <= 1e-8 * (1.0 + oracle.abs()),
            "case {case}: simplex {} vs oracle {oracle}",
            sol.objective
        );
        assert_optimality_invariants(&p, &sol);
    }
}

/// Dense 20×40 instance: certificate built independently of the solver by
/// re-deriving duals from the columns strictly inside their bounds.
#[test]
fn dense_20_by_40_has_independent_kkt_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2040);
    let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, 20, 40);
    let p = dense_problem(&rows, rhs.clone(), cost.clone(), lower.clone(), upper.clone());
    let sol = RevisedSimplex::default().solve(&p, None).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_optimality_invariants(&p, &sol);

    let basis = sol.basis.as_ref().unwrap();
    let basic: Vec<usize> = (0..40).filter(|&j| basis.columns[j] == VarStatus::Basic).collect();
    let basic_logicals: Vec<usize> = (0..20).filter(|&i| basis.logicals[i] == VarStatus::Basic).collect();
    assert_eq!(basic.len() + basic_logicals.len(), 20);
    // Bᵀy = c_B with logical columns e_i carrying zero cost.
    let mut bt: Vec<Vec<f64>> = basic.iter().map(|&j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut cb: Vec<f64> = basic.iter().map(|&j| cost[j]).collect();
    for &i in &basic_logicals {
        let mut e = vec![0.0; 20];
        e[i] = 1.0;
        bt.push(e);
        cb.push(0.0);
    }
    let y = dense_solve(bt, cb).expect("nonsingular basis");
    for j in 0..40 {
        let d = cost[j] - (0..20).map(|i| rows[i][j] * y[i]).sum::<f64>();
        match basis.columns[j] {
            VarStatus::Basic => assert!(d.abs() < 1e-8),
            VarStatus::AtLower => assert!(d >= -1e-8, "col {j}: {d}"),
            VarStatus::AtUpper => assert!(d <= 1e-8, "col {j}: {d}"),
            VarStatus::Free => assert!(d.abs() < 1e-8),
        }
    }
    let dual_obj: f64 = (0..20).map(|i| rhs[i] * y[i]).sum::<f64>()
        + (0..40)
            .map(|j| {
                let d = cost[j] - (0..20).map(|i| rows[i][j] * y[i]).sum::<f64>();
                if d > 0.0 { d * lower[j] } else { d * upper[j] }
            })
            .sum::<f64>();
    assert!((dual_obj - sol.objective).abs() <= 1e-8 * (1.0 + sol.objective.abs()));
}

#[test]
fn warm_start_from_optimal_basis_needs_no_pivots() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, 15, 30);
    let p = dense_problem(&rows, rhs, cost, lower, upper);
    let solver = RevisedSimplex::default();
    let cold = solver.solve(&p, None).unwrap();
    let warm = solver.solve(&p, cold.basis.as_ref()).unwrap();
    assert_eq!(warm.status, LpStatus::Optimal);
    assert_eq!(warm.iterations, 0);
    assert!((warm.objective - cold.objective).abs() <= 1e-9 * (1.0 + cold.objective.abs()));
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, 12, 25);
    let p = dense_problem(&rows, rhs, cost, lower, upper);
    let a = RevisedSimplex::default().solve(&p, None).unwrap();
    let b = RevisedSimplex::default().solve(&p, None).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.duals, b.duals);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn positive_cost_scaling_keeps_vertex(seed in 0u64..10_000, exp in -6i32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, 6, 12);
        let p = dense_problem(&rows, rhs.clone(), cost.clone(), lower.clone(), upper.clone());
        let k = 2f64.powi(exp) * 1.0;
        let scaled: Vec<f64> = cost.iter().map(|c| c * k).collect();
        let q = dense_problem(&rows, rhs, scaled, lower, upper);
        let a = RevisedSimplex::default().solve(&p, None).unwrap();
        let b = RevisedSimplex::default().solve(&q, None).unwrap();
        prop_assert_eq!(a.status, LpStatus::Optimal);
        prop_assert_eq!(&a.x, &b.x);
    }

    #[test]
    fn optimal_solves_satisfy_kkt(seed in 0u64..10_000, m in 1usize..10, extra in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, rhs, cost, lower, upper) = random_feasible(&mut rng, m, m + extra);
        let p = dense_problem(&rows, rhs, cost, lower, upper);
        let sol = RevisedSimplex::default().solve(&p, None).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        assert_optimality_invariants(&p, &sol);
    }
}
