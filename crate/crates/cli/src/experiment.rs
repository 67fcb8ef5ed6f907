//! Experiment execution: build the benchmark problem (with cached reference
//! front), run every seed (optionally concurrent), write per-seed and
//! aggregate CSVs.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Mutex;

use osemo::acquisition::CostModel;
use osemo::benchmarks::{
    phv_reference_from, reference_cache_name, reference_front, BenchmarkSpec,
    REFERENCE_EVALUATIONS, REFERENCE_SEED,
};
use osemo::dataset::FidelityMode;
use osemo::optimizer::{
    run_imoca, run_mesmo, run_mesmoc, run_mfosemo, run_naive_cfmo, run_records_to_csv, Budget,
    ImocaVariant, MfVariant, Problem, RunConfig, RunResult,
};
use osemo::pareto::ParetoFront;

use crate::aggregate::{aggregate_runs, AggregateCurve, RunCurve};
use crate::config::{Algorithm, ExperimentConfig};
use crate::error::{HarnessError, Result};

/// Environment variable capping the number of concurrently running seeds.
pub const THREADS_ENV: &str = "OSEMO_THREADS";

/// Per-seed outcome plus the written files.
pub struct ExperimentOutcome {
    pub per_seed: Vec<(u64, std::result::Result<RunResult, String>)>,
    pub aggregate: AggregateCurve,
    pub problem: Problem,
}

/// The problem handed to the driver for this algorithm: single-fidelity
/// algorithms see fidelity benchmarks through their highest-fidelity view.
pub fn problem_for(spec: &BenchmarkSpec, algorithm: Algorithm) -> Problem {
    let mut problem = Problem::from_benchmark(spec);
    if matches!(algorithm, Algorithm::Mesmo | Algorithm::Mesmoc)
        && spec.fidelity_mode != FidelityMode::None
    {
        let top = spec.highest_fidelity();
        let inner = std::sync::Arc::clone(&spec.eval);
        problem.fidelity_mode = FidelityMode::None;
        problem.levels = vec![];
        problem.eval = std::sync::Arc::new(move |x: &[f64], _| inner(x, &top));
        problem.cost = CostModel::Uniform { k: spec.k };
    }
    problem
}

/// Load the cached reference front or generate and cache it. Generation is
/// deterministic, so regenerating and loading agree.
pub fn load_or_build_reference(spec: &BenchmarkSpec, out_dir: &Path) -> Result<ParetoFront> {
    let path = out_dir.join(reference_cache_name(spec.name, REFERENCE_SEED));
    if path.exists() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| HarnessError::io(format!("cannot read {path:?}: {e}")))?;
        return ParetoFront::from_csv(&text).map_err(|e| HarnessError::io(e.to_string()));
    }
    let front = reference_front(spec, REFERENCE_EVALUATIONS, REFERENCE_SEED)?;
    front
        .write_csv(&path)
        .map_err(|e| HarnessError::io(format!("cannot write {path:?}: {e}")))?;
    Ok(front)
}

fn run_config_for(config: &ExperimentConfig, seed: u64) -> RunConfig {
    let budget = match (config.budget, config.iterations) {
        (Some(b), _) => Budget::Cost(b),
        (_, Some(i)) => Budget::Iterations(i),
        _ => unreachable!("validated at resolve time"),
    };
    let mut rc = RunConfig::new(budget, seed);
    rc.n_init = config.n_init;
    rc.hyperfit_interval = config.hyperfit_interval;
    rc.acq_candidates = config.acq_candidates;
    rc.record_wall_time = config.wall_clock;
    rc.acquisition.n_samples = config.samples;
    rc.acquisition.nsga_evaluations = config.nsga_evaluations;
    rc.acquisition.n_features = config.n_features;
    rc.acquisition.gap_filter = config.gap_filter;
    rc
}

fn dispatch(algorithm: Algorithm, problem: &Problem, rc: &RunConfig) -> osemo::Result<RunResult> {
    match algorithm {
        Algorithm::Mesmo => run_mesmo(problem, rc),
        Algorithm::Mesmoc => run_mesmoc(problem, rc),
        Algorithm::MfOsemoTg => run_mfosemo(problem, rc, MfVariant::Tg),
        Algorithm::MfOsemoNi => run_mfosemo(problem, rc, MfVariant::Ni),
        Algorithm::ImocaT => run_imoca(problem, rc, ImocaVariant::T),
        Algorithm::ImocaE => run_imoca(problem, rc, ImocaVariant::E),
        Algorithm::NaiveCfmo => run_naive_cfmo(problem, rc),
    }
}

pub fn seed_csv_name(benchmark: &str, algorithm: Algorithm, seed: u64) -> String {
    format!("{benchmark}_{}_seed{seed}.csv", algorithm.tag())
}

fn max_threads(n_seeds: usize) -> usize {
    let from_env = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n >= 1);
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    from_env.unwrap_or(available).min(n_seeds).max(1)
}

/// Run every seed of the experiment, writing one RunRecord CSV per seed and
/// `aggregate.csv`. A failing seed is recorded and the remaining seeds still
/// aggregate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let spec = BenchmarkSpec::by_name(&config.benchmark)
        .ok_or_else(|| HarnessError::config(format!("unknown benchmark {}", config.benchmark)))?;
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| HarnessError::io(format!("cannot create {:?}: {e}", config.out_dir)))?;

    let reference = load_or_build_reference(&spec, &config.out_dir)?;
    let mut problem = problem_for(&spec, config.algorithm);
    problem.phv_reference = Some(phv_reference_from(&reference.points)?);
    problem.reference_front = Some(reference);

    // seed queue consumed by a small worker pool
    let queue: Mutex<VecDeque<(usize, u64)>> =
        Mutex::new(config.seeds.iter().copied().enumerate().collect());
    let results: Mutex<Vec<Option<std::result::Result<RunResult, String>>>> =
        Mutex::new(vec![None; config.seeds.len()]);
    let workers = max_threads(config.seeds.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().pop_front();
                let Some((idx, seed)) = job else { break };
                let rc = run_config_for(config, seed);
                let outcome = dispatch(config.algorithm, &problem, &rc)
                    .map_err(|e| e.to_string());
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });

    let per_seed: Vec<(u64, std::result::Result<RunResult, String>)> = config
        .seeds
        .iter()
        .copied()
        .zip(results.into_inner().unwrap().into_iter().map(|r| {
            r.expect("worker filled every slot")
        }))
        .collect();

    // per-seed CSVs
    let d = problem.domain.dim();
    for (seed, outcome) in &per_seed {
        if let Ok(result) = outcome {
            let csv = run_records_to_csv(
                &result.records,
                d,
                problem.k,
                problem.l,
                problem.fidelity_mode,
            );
            let path = config
                .out_dir
                .join(seed_csv_name(&config.benchmark, config.algorithm, *seed));
            std::fs::write(&path, csv)
                .map_err(|e| HarnessError::io(format!("cannot write {path:?}: {e}")))?;
        }
    }

    let curves: Vec<RunCurve> = per_seed
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .map(|r| RunCurve::from_records(&r.records))
        .collect();
    if curves.is_empty() {
        let first_err = per_seed
            .iter()
            .find_map(|(_, r)| r.as_ref().err().cloned())
            .unwrap_or_else(|| "no seeds produced records".to_string());
        return Err(HarnessError::run(format!("all seeds failed: {first_err}")));
    }
    let aggregate = aggregate_runs(&curves)?;
    let agg_path = config.out_dir.join("aggregate.csv");
    std::fs::write(&agg_path, aggregate.to_csv())
        .map_err(|e| HarnessError::io(format!("cannot write {agg_path:?}: {e}")))?;
    std::fs::write(config.out_dir.join("config.txt"), config.emit())
        .map_err(|e| HarnessError::io(format!("cannot write config echo: {e}")))?;

    Ok(ExperimentOutcome {
        per_seed,
        aggregate,
        problem,
    })
}

/// `aggregate` subcommand: re-aggregate the per-seed CSVs in a directory.
pub fn aggregate_directory(in_dir: &Path, out_file: &Path) -> Result<AggregateCurve> {
    let mut curves = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(in_dir)
        .map_err(|e| HarnessError::io(format!("cannot read {in_dir:?}: {e}")))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "csv")
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.contains("_seed"))
        })
        .collect();
    names.sort();
    for path in names {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| HarnessError::io(format!("cannot read {path:?}: {e}")))?;
        let records = osemo::optimizer::run_records_from_csv(&text)
            .map_err(|e| HarnessError::io(format!("{}: {e}", path.display())))?;
        curves.push(RunCurve::from_records(&records));
    }
    if curves.is_empty() {
        return Err(HarnessError::io(format!(
            "no per-seed run CSVs (*_seed*.csv) found in {in_dir:?}"
        )));
    }
    let aggregate = aggregate_runs(&curves)?;
    std::fs::write(out_file, aggregate.to_csv())
        .map_err(|e| HarnessError::io(format!("cannot write {out_file:?}: {e}")))?;
    Ok(aggregate)
}
