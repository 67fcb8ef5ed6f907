//! Driver-level integration tests on small, fast configurations. The full
//! experiment-scale checks live in the acceptance suite.

use std::sync::Arc;

use osemo::acquisition::{AcquisitionConfig, CostModel, GapFilter};
use osemo::benchmarks;
use osemo::dataset::{Fidelity, FidelityMode, FidelityVector};
use osemo::domain::BoxDomain;
use osemo::optimizer::{
    recover_pareto_front, run_imoca, run_mesmo, run_mesmoc, run_mfosemo, run_naive_cfmo,
    run_random_search, Budget, ImocaVariant, MfVariant, Problem, RunConfig,
};
use osemo::pareto::{hypervolume, pareto_front, r2_distance, ParetoFront};
use osemo::surrogate::{FittedSurrogate, GpHyperParams, KernelParams, SeParams};
use osemo::RngStream;

fn small_acq() -> AcquisitionConfig {
    let mut acq = AcquisitionConfig::default();
    acq.n_samples = 3;
    acq.n_features = 128;
    acq.nsga_population = 20;
    acq.nsga_evaluations = 200;
    acq
}

fn small_config(budget: Budget, seed: u64) -> RunConfig {
    let mut config = RunConfig::new(budget, seed);
    config.acquisition = small_acq();
    config.acq_candidates = 150;
    config.acq_refinements = 2;
    config
}

/// 1-D two-objective toy: the trade-off curve (-t^2, -(t-2)^2) on [0, 2].
fn curve_problem() -> Problem {
    Problem {
        domain: BoxDomain::new(vec![0.0], vec![2.0]).unwrap(),
        k: 2,
        l: 0,
        fidelity_mode: FidelityMode::None,
        levels: vec![],
        eval: Arc::new(|x, _| vec![-x[0] * x[0], -(x[0] - 2.0) * (x[0] - 2.0)]),
        cost: CostModel::Uniform { k: 2 },
        reference_front: Some(curve_reference()),
        phv_reference: Some(vec![-4.1, -4.1]),
    }
}

fn curve_reference() -> ParetoFront {
    let points: Vec<Vec<f64>> = (0..=400)
        .map(|i| {
            let t = 2.0 * i as f64 / 400.0;
            vec![-t * t, -(t - 2.0) * (t - 2.0)]
        })
        .collect();
    pareto_front(&points).unwrap()
}

#[test]
fn mesmo_run_monotone_phv_and_budget_accounting() {
    let problem = curve_problem();
    let config = small_config(Budget::Iterations(6), 0);
    let result = run_mesmo(&problem, &config).unwrap();
    assert_eq!(result.records.len(), 6);
    let mut last_phv = 0.0;
    let mut last_cost = result.dataset.observations()[..config.n_init_for(1)]
        .iter()
        .map(|o| o.cost)
        .sum::<f64>();
    for r in &result.records {
        assert!(r.phv_observed >= last_phv - 1e-12, "phv decreased");
        last_phv = r.phv_observed;
        // each iteration adds exactly the normalized cost K = 2
        assert!((r.cum_cost - last_cost - 2.0).abs() < 1e-12);
        last_cost = r.cum_cost;
        assert!(problem.domain.contains(&r.x));
    }
    // final record carries recovered metrics
    let last = result.records.last().unwrap();
    assert!(last.phv_recovered.is_some());
    assert!(last.r2.is_some());
}

#[test]
fn mesmo_fixed_seed_is_bit_identical() {
    let problem = curve_problem();
    let config = small_config(Budget::Iterations(4), 9);
    let a = run_mesmo(&problem, &config).unwrap();
    let b = run_mesmo(&problem, &config).unwrap();
    let csv_a = osemo::optimizer::run_records_to_csv(&a.records, 1, 2, 0, FidelityMode::None);
    let csv_b = osemo::optimizer::run_records_to_csv(&b.records, 1, 2, 0, FidelityMode::None);
    assert_eq!(csv_a, csv_b);
}

#[test]
fn mesmo_zero_iterations_returns_initial_design_front() {
    let problem = curve_problem();
    let config = small_config(Budget::Iterations(0), 1);
    let result = run_mesmo(&problem, &config).unwrap();
    assert!(result.records.is_empty());
    assert_eq!(result.dataset.len(), config.n_init_for(1));
    assert!(!result.recovered_front.is_empty());
}

#[test]
fn mesmo_k1_degenerates_to_single_objective_search() {
    // maximize -x^2 on [-1, 1]: max-value entropy search should get close to
    // the optimum and beat uniform random search given the same budget
    let problem = Problem {
        domain: BoxDomain::new(vec![-1.0], vec![1.0]).unwrap(),
        k: 1,
        l: 0,
        fidelity_mode: FidelityMode::None,
        levels: vec![],
        eval: Arc::new(|x, _| vec![-x[0] * x[0]]),
        cost: CostModel::Uniform { k: 1 },
        reference_front: None,
        phv_reference: None,
    };
    let mut wins = 0;
    for seed in 0..3 {
        let config = small_config(Budget::Iterations(10), seed);
        let bo = run_mesmo(&problem, &config).unwrap();
        let rs = run_random_search(&problem, &config).unwrap();
        let best = |r: &osemo::optimizer::RunResult| {
            r.dataset
                .observations()
                .iter()
                .map(|o| o.y[0])
                .fold(f64::NEG_INFINITY, f64::max)
        };
        if best(&bo) >= best(&rs) {
            wins += 1;
        }
        assert!(best(&bo) > -0.01, "seed {seed}: best {}", best(&bo));
    }
    assert!(wins >= 2, "mesmo won only {wins}/3 paired runs");
}

#[test]
fn mesmoc_constrained_toy_prefers_feasible() {
    let spec = benchmarks::constrained_toy_spec();
    let mut problem = Problem::from_benchmark(&spec);
    let reference = benchmarks::reference_front(&spec, 4000, 5).unwrap();
    problem.phv_reference = Some(benchmarks::phv_reference_from(&reference.points).unwrap());
    problem.reference_front = Some(reference);
    let config = small_config(Budget::Iterations(8), 3);
    let result = run_mesmoc(&problem, &config).unwrap();
    assert_eq!(result.records.len(), 8);
    // most selections should satisfy the true constraints on this mostly
    // feasible problem, and none should be fallbacks
    let feasible = result
        .records
        .iter()
        .filter(|r| r.y[2] >= 0.0 && r.y[3] >= 0.0)
        .count();
    assert!(feasible >= 6, "only {feasible}/8 feasible");
}

#[test]
fn mesmoc_infeasible_everywhere_flags_every_record() {
    let problem = Problem {
        domain: BoxDomain::unit(1),
        k: 1,
        l: 1,
        fidelity_mode: FidelityMode::None,
        levels: vec![],
        eval: Arc::new(|x, _| vec![x[0], -1.0]),
        cost: CostModel::Uniform { k: 1 },
        reference_front: None,
        phv_reference: None,
    };
    let config = small_config(Budget::Iterations(3), 4);
    let result = run_mesmoc(&problem, &config).unwrap();
    for r in &result.records {
        assert!(
            r.flags.iter().any(|f| f == "feasibility_fallback"),
            "missing fallback flag: {:?}",
            r.flags
        );
    }
}

#[test]
fn mesmoc_rejects_unconstrained_problem() {
    let problem = curve_problem();
    let config = small_config(Budget::Iterations(2), 0);
    assert!(run_mesmoc(&problem, &config).is_err());
    // and mesmo rejects constrained input
    let spec = benchmarks::constrained_toy_spec();
    assert!(run_mesmo(&Problem::from_benchmark(&spec), &config).is_err());
}

/// Two-level discrete toy: low fidelity is a shifted copy of the truth.
fn discrete_problem() -> Problem {
    Problem {
        domain: BoxDomain::new(vec![0.0], vec![2.0]).unwrap(),
        k: 2,
        l: 0,
        fidelity_mode: FidelityMode::Discrete,
        levels: vec![2, 2],
        eval: Arc::new(|x, fid| match fid {
            FidelityVector::Discrete(m) => {
                let shift = |level: usize| if level == 2 { 0.0 } else { 0.15 };
                vec![
                    -x[0] * x[0] + shift(m[0]),
                    -(x[0] - 2.0) * (x[0] - 2.0) + shift(m[1]),
                ]
            }
            _ => unreachable!(),
        }),
        cost: CostModel::Discrete {
            per_level: vec![vec![0.1, 1.0], vec![0.1, 1.0]],
        },
        reference_front: Some(curve_reference()),
        phv_reference: Some(vec![-4.2, -4.2]),
    }
}

#[test]
fn mfosemo_respects_cost_budget_and_fidelity_validity() {
    let problem = discrete_problem();
    let mut config = small_config(Budget::Cost(0.0), 5);
    // budget: initial design plus ~1.5 normalized units; a single
    // highest-fidelity evaluation costs 2
    let init_cost = {
        let c = small_config(Budget::Iterations(0), 5);
        run_mfosemo(&problem, &c, MfVariant::Tg)
            .unwrap()
            .dataset
            .total_cost()
    };
    config.budget = Budget::Cost(init_cost + 1.5);
    config.hyperfit_interval = 3;
    let result = run_mfosemo(&problem, &config, MfVariant::Tg).unwrap();
    assert!(result.dataset.total_cost() <= init_cost + 1.5 + 1e-9);
    for r in &result.records {
        match &r.fidelity {
            FidelityVector::Discrete(m) => {
                assert!(m.iter().all(|mi| (1..=2).contains(mi)));
                // a full top-fidelity query costs 2 > remaining budget
                assert!(
                    m != &vec![2, 2],
                    "highest-fidelity query fit inside a sub-top budget"
                );
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn mfosemo_tg_and_ni_both_produce_valid_runs() {
    let problem = discrete_problem();
    let mut config = small_config(Budget::Cost(0.0), 6);
    let init = small_config(Budget::Iterations(0), 6);
    let base = run_mfosemo(&problem, &init, MfVariant::Tg)
        .unwrap()
        .dataset
        .total_cost();
    config.budget = Budget::Cost(base + 4.0);
    config.acquisition.panels = 128;
    let tg = run_mfosemo(&problem, &config, MfVariant::Tg).unwrap();
    let ni = run_mfosemo(&problem, &config, MfVariant::Ni).unwrap();
    for result in [&tg, &ni] {
        assert!(!result.records.is_empty());
        assert!(!result.recovered_front.is_empty());
        let mut cost = base;
        for r in &result.records {
            assert!(r.cum_cost > cost, "cost must strictly increase");
            cost = r.cum_cost;
        }
    }
    // recovered fronts of the two variants land in the same region
    let phv = |r: &osemo::optimizer::RunResult| {
        hypervolume(&r.recovered_front, &[-4.2, -4.2]).unwrap().value
    };
    let (a, b) = (phv(&tg), phv(&ni));
    assert!((a - b).abs() / a.max(b) < 0.35, "tg {a} vs ni {b}");
}

fn continuous_problem() -> Problem {
    let spec = benchmarks::branin_currin_spec();
    let mut problem = Problem::from_benchmark(&spec);
    problem.phv_reference = Some(vec![-320.0, -12.0]);
    problem
}

#[test]
fn imoca_zero_budget_is_initial_design_only() {
    let problem = continuous_problem();
    let config = small_config(Budget::Iterations(0), 7);
    let result = run_imoca(&problem, &config, ImocaVariant::T).unwrap();
    assert!(result.records.is_empty());
    assert!(!result.recovered_front.is_empty());
}

#[test]
fn imoca_t_run_is_valid_and_uses_lower_fidelities() {
    let problem = continuous_problem();
    let mut config = small_config(Budget::Iterations(6), 8);
    config.hyperfit_interval = 20;
    let result = run_imoca(&problem, &config, ImocaVariant::T).unwrap();
    assert_eq!(result.records.len(), 6);
    let mut lower = 0;
    for r in &result.records {
        match &r.fidelity {
            FidelityVector::Continuous(z) => {
                assert!(z.iter().all(|zi| (0.0..=1.0).contains(zi)));
                if z.iter().any(|zi| *zi < 1.0) {
                    lower += 1;
                }
            }
            _ => unreachable!(),
        }
        // cost increments match the model exactly
    }
    let mut prev = result.dataset.observations()[..config.n_init_for(2)]
        .iter()
        .map(|o| o.cost)
        .sum::<f64>();
    for (r, o) in result
        .records
        .iter()
        .zip(&result.dataset.observations()[config.n_init_for(2)..])
    {
        let expected = problem.cost.normalized_total(&o.x, &o.fidelity);
        assert!((r.cum_cost - prev - expected).abs() < 1e-12);
        prev = r.cum_cost;
    }
    assert!(lower >= 1, "no lower-fidelity queries in 6 iterations");
}

#[test]
fn imoca_as_printed_filter_reduces_to_top_fidelity_queries() {
    let problem = continuous_problem();
    let mut config = small_config(Budget::Iterations(3), 9);
    config.acquisition.gap_filter = GapFilter::AsPrinted;
    let result = run_imoca(&problem, &config, ImocaVariant::T).unwrap();
    for r in &result.records {
        assert_eq!(
            r.fidelity,
            FidelityVector::Continuous(vec![1.0, 1.0]),
            "printed filter must leave only z* = 1"
        );
    }
}

#[test]
fn imoca_e_small_run_completes() {
    let problem = continuous_problem();
    let mut config = small_config(Budget::Iterations(3), 10);
    config.acquisition.panels = 64;
    config.acq_candidates = 60;
    config.acq_refinements = 1;
    let result = run_imoca(&problem, &config, ImocaVariant::E).unwrap();
    assert_eq!(result.records.len(), 3);
}

#[test]
fn naive_cfmo_picks_cheapest_fidelity_in_reduced_set() {
    let problem = continuous_problem();
    let config = small_config(Budget::Iterations(4), 11);
    let result = run_naive_cfmo(&problem, &config).unwrap();
    assert_eq!(result.records.len(), 4);
    for r in &result.records {
        match &r.fidelity {
            FidelityVector::Continuous(z) => {
                assert!(z.iter().all(|zi| (0.0..=1.0).contains(zi)));
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn recovered_front_from_dense_models_matches_analytic_front() {
    // fit noise-free GPs on a dense grid of the toy curve, then recover
    let domain = BoxDomain::new(vec![0.0], vec![2.0]).unwrap();
    let xs: Vec<Vec<f64>> = (0..25).map(|i| vec![2.0 * i as f64 / 24.0]).collect();
    let f1: Vec<f64> = xs.iter().map(|x| -x[0] * x[0]).collect();
    let f2: Vec<f64> = xs.iter().map(|x| -(x[0] - 2.0) * (x[0] - 2.0)).collect();
    let params = GpHyperParams::new(
        KernelParams::Single(SeParams::isotropic(1, 0.4, 4.0)),
        1e-8,
    );
    let m1 = FittedSurrogate::with_params(
        domain.clone(),
        xs.clone(),
        vec![Fidelity::None; xs.len()],
        f1,
        params.clone(),
    )
    .unwrap();
    let m2 = FittedSurrogate::with_params(
        domain.clone(),
        xs.clone(),
        vec![Fidelity::None; xs.len()],
        f2,
        params,
    )
    .unwrap();
    let recovered = recover_pareto_front(&[m1, m2], &[], &domain, 1500, 42).unwrap();
    let r2 = r2_distance(&curve_reference(), &recovered).unwrap();
    assert!(r2 <= 0.05, "r2 = {r2}");
    // determinism
    let m = recover_pareto_front(
        &[
            FittedSurrogate::with_params(
                domain.clone(),
                xs.clone(),
                vec![Fidelity::None; xs.len()],
                xs.iter().map(|x| -x[0]).collect(),
                GpHyperParams::new(
                    KernelParams::Single(SeParams::isotropic(1, 0.4, 4.0)),
                    1e-8,
                ),
            )
            .unwrap(),
        ],
        &[],
        &domain,
        500,
        7,
    )
    .unwrap();
    let m_again = recover_pareto_front(
        &[
            FittedSurrogate::with_params(
                domain,
                xs.clone(),
                vec![Fidelity::None; xs.len()],
                xs.iter().map(|x| -x[0]).collect(),
                GpHyperParams::new(
                    KernelParams::Single(SeParams::isotropic(1, 0.4, 4.0)),
                    1e-8,
                ),
            )
            .unwrap(),
        ],
        &[],
        &BoxDomain::new(vec![0.0], vec![2.0]).unwrap(),
        500,
        7,
    )
    .unwrap();
    assert_eq!(m.points, m_again.points);
}

#[test]
fn recovered_front_from_single_point_model_is_nonempty() {
    let domain = BoxDomain::unit(1);
    let m = FittedSurrogate::with_params(
        domain.clone(),
        vec![vec![0.5]],
        vec![Fidelity::None],
        vec![0.3],
        GpHyperParams::new(
            KernelParams::Single(SeParams::isotropic(1, 0.3, 1.0)),
            1e-8,
        ),
    )
    .unwrap();
    let front = recover_pareto_front(&[m.clone(), m], &[], &domain, 500, 3).unwrap();
    assert!(!front.is_empty());
}

#[test]
fn evaluation_error_aborts_with_partial_result() {
    // callback turns non-finite after a few evaluations
    use std::sync::atomic::{AtomicUsize, Ordering};
    let counter = Arc::new(AtomicUsize::new(0));
    let c = Arc::clone(&counter);
    let problem = Problem {
        domain: BoxDomain::unit(1),
        k: 2,
        l: 0,
        fidelity_mode: FidelityMode::None,
        levels: vec![],
        eval: Arc::new(move |x, _| {
            let n = c.fetch_add(1, Ordering::SeqCst);
            if n >= 7 {
                vec![f64::NAN, 0.0]
            } else {
                vec![x[0], 1.0 - x[0]]
            }
        }),
        cost: CostModel::Uniform { k: 2 },
        reference_front: None,
        phv_reference: None,
    };
    let config = small_config(Budget::Iterations(10), 12);
    let result = run_mesmo(&problem, &config).unwrap();
    assert!(result.records.len() < 10, "run should abort early");
    let last = result.records.last().unwrap();
    assert!(last.flags.iter().any(|f| f == "evaluation_error"));
}

#[test]
fn random_search_respects_budget_semantics() {
    let problem = curve_problem();
    let mut config = small_config(Budget::Cost(0.0), 13);
    let init = small_config(Budget::Iterations(0), 13);
    let base = run_mesmo(&problem, &init).unwrap().dataset.total_cost();
    config.budget = Budget::Cost(base + 5.0);
    let result = run_random_search(&problem, &config).unwrap();
    // each iteration costs 2; exactly two fit in a 5-unit remainder
    assert_eq!(result.records.len(), 2);
    assert!(result.dataset.total_cost() <= base + 5.0);
}
