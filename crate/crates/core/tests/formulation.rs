use msep::cli::synthetic::{generate_series, synthetic_config, SyntheticSpec};
use msep::domain::{Facility, ModelInputs, OpVar};
use msep::formulation::transient::{transient_terms, transient_value};
use msep::formulation::{assemble_monolithic, build_model};
use msep::solve::{solve_plan, Mode, SolveOptions};
use rand::{Rng, SeedableRng};

fn inputs(stages: u32, n: usize) -> ModelInputs {
    let spec = SyntheticSpec {
        stages,
        years_per_stage: 5,
        timesteps: n,
        final_cer: 0.5,
    };
    synthetic_config(spec, None).resolve(generate_series(7, n)).unwrap().0
}

const FAMILIES: [&str; 29] = [
    "capacity_initial",
    "ae_conversion",
    "ae_band",
    "hs_inventory",
    "hs_band",
    "hs_periodicity",
    "fc_conversion",
    "fc_band",
    "as_conversion",
    "as_transient",
    "as_band",
    "as_ramp",
    "ammonia_stoichiometry",
    "asto_inventory",
    "asto_band",
    "asto_periodicity",
    "ammonia_to_power",
    "trading_constancy",
    "bess_inventory",
    "bess_band",
    "bess_periodicity",
    "bess_power",
    "cfpp_split",
    "cfpp_band",
    "renewable_availability",
    "power_balance",
    "curtailment_cap",
    "carbon_cap",
    "",
];

#[test]
fn block_census() {
    let n = 24;
    let model = build_model(&inputs(3, n));
    assert_eq!(model.stages(), 3);
    assert_eq!(model.linking.num_rows(), 18);
    for b in &model.blocks {
        let expected: Vec<&str> = FAMILIES
            .iter()
            .copied()
            .filter(|f| !f.is_empty() && (b.stage == 1 || *f != "capacity_initial"))
            .collect();
        let names: Vec<&str> = b.families.iter().map(|f| f.name).collect();
        assert_eq!(names, expected);
        // Families tile the rows without gaps.
        let mut next = 0;
        for f in &b.families {
            assert_eq!(f.rows.start, next);
            next = f.rows.end;
        }
        assert_eq!(next, b.num_rows());
        let count = |name: &str| b.family(name).unwrap().rows.len();
        assert_eq!(count("ae_conversion"), n);
        assert_eq!(count("as_transient"), n);
        assert_eq!(count("as_ramp"), 2 * (n - 1));
        assert_eq!(count("trading_constancy"), 4 * (n - 1));
        assert_eq!(count("renewable_availability"), 2 * n);
        assert_eq!(count("bess_power"), 2 * n);
        assert_eq!(count("carbon_cap"), 1);
        // Zero lower band: only the upper row is emitted.
        assert_eq!(count("ae_band"), n);
        assert_eq!(count("fc_band"), n);
        assert_eq!(count("cfpp_band"), 2 * n);
        assert_eq!(count("bess_band"), 2 * n);
        let idx = &b.index;
        assert_eq!(b.dim(), idx.dim());
        assert_eq!(idx.op_len(OpVar::EB), n + 1);
        assert_eq!(idx.op_len(OpVar::PWind), n);
        assert_eq!(idx.setpoint_range().len(), n / 4);
        for j in 0..idx.structural_dim() {
            assert!(b.problem.lower[j].is_finite() && b.problem.upper[j].is_finite());
        }
    }
}

#[test]
fn transient_matches_closed_form() {
    let q = [10.0, 6.0];
    let terms = transient_terms(8, 1.0, 4, 2.0, false);
    let expected = [14.0, 12.4261, 11.4715, 10.8925];
    for (t, term) in terms.iter().enumerate() {
        let feed = term.w_current * q[term.k] + term.w_next * q[term.k_next];
        let tau = (t % 4) as f64;
        let (a, b) = (q[t / 4], q[(t / 4 + 1) % 2]);
        assert!((feed - (a + (a - b) * (-tau / 2.0).exp())).abs() < 1e-12);
        assert!((feed - transient_value(a, b, tau, 2.0)).abs() < 1e-12);
        if t < 4 {
            assert!((feed - expected[t]).abs() < 5e-5, "t={t}: {feed}");
        }
    }
    let absolute = transient_terms(8, 1.0, 4, 2.0, true);
    assert!((absolute[5].w_next + (-2.5f64).exp()).abs() < 1e-15);
}

#[test]
fn monolithic_stacks_linking_rows_first() {
    let model = build_model(&inputs(3, 8));
    let mono = assemble_monolithic(&model);
    let l = model.linking.num_rows();
    let total_rows: usize = l + model.blocks.iter().map(|b| b.num_rows()).sum::<usize>();
    let total_cols: usize = model.blocks.iter().map(|b| b.dim()).sum();
    assert_eq!(mono.problem.num_rows(), total_rows);
    assert_eq!(mono.problem.num_cols(), total_cols);

    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let x: Vec<f64> = (0..total_cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let ax = mono.problem.a.mul_vec(&x);
    let xs = mono.split(&x);
    let mut link = vec![0.0; l];
    for (bmat, xi) in model.linking.blocks.iter().zip(&xs) {
        for (r, v) in bmat.mul_vec(xi).into_iter().enumerate() {
            link[r] += v;
        }
    }
    for r in 0..l {
        assert!((ax[r] - link[r]).abs() < 1e-9);
    }
    assert_eq!(&mono.problem.rhs[..l], &model.linking.rhs[..]);
    for (i, b) in model.blocks.iter().enumerate() {
        let local = b.problem.a.mul_vec(xs[i]);
        let off = mono.row_offsets[i];
        for r in 0..b.num_rows() {
            assert!((ax[off + r] - local[r]).abs() < 1e-9);
        }
        let c0 = mono.col_offsets[i];
        assert_eq!(&mono.problem.cost[c0..c0 + b.dim()], &b.problem.cost[..]);
    }
}

#[test]
fn toy_solve_is_feasible_and_costs_reconcile() {
    let inp = inputs(1, 4);
    let rep = solve_plan(&inp, &SolveOptions::from_inputs(Mode::Direct, &inp)).unwrap();
    for r in &rep.residuals {
        assert!(r.relative <= 1e-6, "{r:?}");
    }
    let plan = &rep.plan;
    assert!((plan.npc() - plan.objective).abs() <= 1e-9 * plan.objective.abs().max(1.0));
    // Capacities follow initial capacity plus additions.
    let st = plan.stage(1);
    for f in Facility::ALL {
        let init = inp.facility(f).initial_capacity;
        let ret = if f == Facility::Cfpp { st.retired_cfpp } else { 0.0 };
        let c = st.capacity[f.index()];
        assert!((c - init - st.added[f.index()] + ret).abs() <= 1e-6 * (1.0 + c.abs()));
    }
}

#[test]
fn full_reduction_stops_coal_firing() {
    let mut inp = inputs(2, 8);
    inp.set_linear_cer(1.0);
    let rep = solve_plan(&inp, &SolveOptions::from_inputs(Mode::Direct, &inp)).unwrap();
    let plan = &rep.plan;
    assert!((plan.npc() - plan.objective).abs() <= 1e-9 * plan.objective.abs());
    let coal: f64 = plan.stage(2).dispatch.get(OpVar::PCf).iter().sum();
    assert!(coal.abs() <= 1e-6, "coal-fired output {coal}");
}
