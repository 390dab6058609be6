use msep::dwd::{
    price_subproblem, priced_cost, run_dwd_cg, solve_master, BlockAngularView, DwdOptions, ExtremePointPool,
};
use msep::lp::{CscMatrix, LpBackend, LpProblem, LpStatus, RevisedSimplex, SimplexOptions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

struct Instance {
    blocks: Vec<LpProblem>,
    linking: Vec<CscMatrix>,
    h0: Vec<f64>,
}

impl Instance {
    fn view<'a>(&'a self, refs: &'a [&'a LpProblem]) -> BlockAngularView<'a> {
        BlockAngularView {
            blocks: refs,
            linking: &self.linking,
            h0: &self.h0,
        }
    }

    /// The same problem as one LP, linking rows first.
    fn monolithic(&self) -> LpProblem {
        let l = self.h0.len();
        let mut trip = Vec::new();
        let mut rhs = self.h0.clone();
        let (mut cost, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new());
        let (mut c0, mut r0) = (0, l);
        for (b, link) in self.blocks.iter().zip(&self.linking) {
            trip.extend(link.triplets().map(|(r, c, v)| (r, c0 + c, v)));
            trip.extend(b.a.triplets().map(|(r, c, v)| (r0 + r, c0 + c, v)));
            rhs.extend(&b.rhs);
            cost.extend(&b.cost);
            lower.extend(&b.lower);
            upper.extend(&b.upper);
            c0 += b.num_cols();
            r0 += b.num_rows();
        }
        LpProblem::new(CscMatrix::from_triplets(r0, c0, &trip), rhs, cost, lower, upper)
    }
}

/// Random bounded block-angular LP, feasible by construction.
fn random_instance(seed: u64, stages: usize, rows: usize, cols: usize, links: usize) -> Instance {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    let mut linking = Vec::new();
    let mut h0 = vec![0.0; links];
    for _ in 0..stages {
        let upper: Vec<f64> = (0..cols).map(|_| rng.random_range(1.0..10.0)).collect();
        let x0: Vec<f64> = upper.iter().map(|u| rng.random_range(0.0..*u)).collect();
        let mut trip = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.random_bool(0.5) || c == r {
                    trip.push((r, c, rng.random_range(-3.0..3.0)));
                }
            }
        }
        let a = CscMatrix::from_triplets(rows, cols, &trip);
        let rhs = a.mul_vec(&x0);
        let cost = (0..cols).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mut ltrip = Vec::new();
        for r in 0..links {
            for c in 0..cols {
                if rng.random_bool(0.4) {
                    ltrip.push((r, c, rng.random_range(-2.0..2.0)));
                }
            }
        }
        let b = CscMatrix::from_triplets(links, cols, &ltrip);
        for (h, v) in h0.iter_mut().zip(b.mul_vec(&x0)) {
            *h += v;
        }
        blocks.push(LpProblem::new(a, rhs, cost, vec![0.0; cols], upper));
        linking.push(b);
    }
    Instance { blocks, linking, h0 }
}

fn options(max_iterations: usize) -> DwdOptions {
    DwdOptions {
        epsilon: 1e-9,
        max_iterations,
        threads: 1,
        simplex: SimplexOptions::default(),
    }
}

#[test]
fn single_block_converges_in_one_round() {
    let inst = random_instance(11, 1, 3, 6, 0);
    let refs: Vec<&LpProblem> = inst.blocks.iter().collect();
    let out = run_dwd_cg(inst.view(&refs), &options(50)).unwrap();
    assert_eq!(out.status, LpStatus::Optimal);
    assert_eq!(out.iterations, 1);
    let direct = RevisedSimplex::new(SimplexOptions::default()).solve(&inst.blocks[0], None).unwrap();
    assert!((out.objective - direct.objective).abs() <= 1e-9 * (1.0 + direct.objective.abs()));
    assert_eq!(out.final_gap, 0.0);
}

#[test]
fn identical_stages_need_no_artificials() {
    let one = random_instance(5, 1, 2, 4, 0);
    let b = one.blocks[0].clone();
    // x_a(0) − x_b(0) = 0 between two copies of the same block.
    let inst = Instance {
        blocks: vec![b.clone(), b],
        linking: vec![
            CscMatrix::from_triplets(1, 4, &[(0, 0, 1.0)]),
            CscMatrix::from_triplets(1, 4, &[(0, 0, -1.0)]),
        ],
        h0: vec![0.0],
    };
    let backend = RevisedSimplex::new(SimplexOptions::default());
    let mut pool = ExtremePointPool::new(2, 1, 1e6);
    for (i, blk) in inst.blocks.iter().enumerate() {
        let sol = backend.solve(blk, None).unwrap();
        assert!(pool.insert(i, sol.x, &blk.cost, &inst.linking[i]));
    }
    let m = solve_master(&backend, &pool, &inst.h0, None).unwrap();
    assert_eq!(m.status, LpStatus::Optimal);
    assert!(m.artificial_sum.abs() <= 1e-12);
    let refs: Vec<&LpProblem> = inst.blocks.iter().collect();
    let out = run_dwd_cg(inst.view(&refs), &options(50)).unwrap();
    assert_eq!(out.status, LpStatus::Optimal);
    assert!((out.xs[0][0] - out.xs[1][0]).abs() <= 1e-9);
}

#[test]
fn convexity_dual_of_single_column_is_its_cost() {
    let empty = CscMatrix::zeros(0, 2);
    let mut pool = ExtremePointPool::new(1, 0, 1e6);
    pool.insert(0, vec![1.5, 2.0], &[3.0, -1.0], &empty);
    let backend = RevisedSimplex::new(SimplexOptions::default());
    let m = solve_master(&backend, &pool, &[], None).unwrap();
    assert_eq!(m.weights, vec![1.0]);
    assert!((m.alpha[0] - 2.5).abs() <= 1e-12);
    assert!((m.objective - 2.5).abs() <= 1e-12);
}

#[test]
fn reduced_cost_by_hand() {
    // min (1, 2)·x  s.t. x0 + x1 = 1, 0 ≤ x ≤ 1, linking row x0 − 2 x1.
    let block = LpProblem::new(
        CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]),
        vec![1.0],
        vec![1.0, 2.0],
        vec![0.0, 0.0],
        vec![1.0, 1.0],
    );
    let link = CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, -2.0)]);
    let beta = [1.5];
    // priced cost: (1 − 1.5, 2 + 3) = (−0.5, 5)
    assert_eq!(priced_cost(&block, &link, &beta), vec![-0.5, 5.0]);
    let backend = RevisedSimplex::new(SimplexOptions::default());
    let r = price_subproblem(&backend, &block, &link, 0.25, &beta, None).unwrap();
    assert_eq!(r.point, vec![1.0, 0.0]);
    assert!((r.priced_objective + 0.5).abs() <= 1e-12);
    assert!((r.reduced_cost + 0.75).abs() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounds_bracket_the_optimum(seed in 0u64..10_000, stages in 2usize..5, links in 1usize..4) {
        let inst = random_instance(seed, stages, 3, 6, links);
        let backend = RevisedSimplex::new(SimplexOptions::default());
        let direct = backend.solve(&inst.monolithic(), None).unwrap();
        prop_assert_eq!(direct.status, LpStatus::Optimal);
        let opt = direct.objective;
        let refs: Vec<&LpProblem> = inst.blocks.iter().collect();
        let out = run_dwd_cg(inst.view(&refs), &options(200)).unwrap();
        let tol = 1e-6 * (1.0 + opt.abs());
        for row in &out.log.rows {
            prop_assert!(row.lb <= opt + tol, "lb {} > opt {}", row.lb, opt);
            if row.ub.is_finite() {
                prop_assert!(row.ub >= opt - tol, "ub {} < opt {}", row.ub, opt);
            }
        }
        prop_assert_eq!(out.status, LpStatus::Optimal);
        prop_assert!((out.objective - opt).abs() <= tol, "dw {} direct {}", out.objective, opt);
        // Recovered point satisfies the linking rows.
        let mut link = vec![0.0; links];
        for (b, x) in inst.linking.iter().zip(&out.xs) {
            for (r, v) in b.mul_vec(x).into_iter().enumerate() {
                link[r] += v;
            }
        }
        for (a, h) in link.iter().zip(&inst.h0) {
            prop_assert!((a - h).abs() <= 1e-7 * (1.0 + h.abs()));
        }
    }
}
