use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use osemo_cli::{
    aggregate_directory, run_experiment, ExperimentConfig, HarnessError, RawConfig,
};

/// Multi-objective Bayesian optimization experiment runner.
#[derive(Parser)]
#[command(name = "osemo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm x benchmark x seed grid and write metric CSVs.
    Run(RunArgs),
    /// Aggregate per-seed run CSVs from a directory into one curve.
    Aggregate {
        /// Directory containing *_seed<N>.csv files.
        #[arg(long = "in")]
        in_dir: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate (and cache) a benchmark's reference front.
    Reference {
        #[arg(long)]
        benchmark: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// NSGA-II evaluation budget.
        #[arg(long, default_value_t = osemo::benchmarks::REFERENCE_EVALUATIONS)]
        evaluations: usize,
        #[arg(long, default_value_t = osemo::benchmarks::REFERENCE_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long)]
    algorithm: Option<String>,
    /// Total normalized evaluation-cost budget (exclusive with --iterations).
    #[arg(long)]
    budget: Option<f64>,
    /// BO iteration count (exclusive with --budget).
    #[arg(long)]
    iterations: Option<usize>,
    /// Comma-separated seed list, default 0..9.
    #[arg(long)]
    seeds: Option<String>,
    /// Monte-Carlo Pareto-front samples S.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n_init: Option<usize>,
    #[arg(long)]
    hyperfit_interval: Option<usize>,
    #[arg(long)]
    nsga_evaluations: Option<usize>,
}

fn resolve_run_config(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let mut set_opt = |key: &str, value: Option<String>| -> Result<(), HarnessError> {
        if let Some(v) = value {
            raw.set(key, &v)?;
        }
        Ok(())
    };
    set_opt("benchmark", args.benchmark.clone())?;
    set_opt("algorithm", args.algorithm.clone())?;
    set_opt("budget", args.budget.map(|v| v.to_string()))?;
    set_opt("iterations", args.iterations.map(|v| v.to_string()))?;
    set_opt("seeds", args.seeds.clone())?;
    set_opt("samples", args.samples.map(|v| v.to_string()))?;
    set_opt("out", args.out.as_ref().map(|p| p.display().to_string()))?;
    set_opt("n_init", args.n_init.map(|v| v.to_string()))?;
    set_opt(
        "hyperfit_interval",
        args.hyperfit_interval.map(|v| v.to_string()),
    )?;
    set_opt(
        "nsga_evaluations",
        args.nsga_evaluations.map(|v| v.to_string()),
    )?;
    raw.resolve()
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run(args) => {
            let config = resolve_run_config(&args)?;
            print!("{}", config.emit());
            let outcome = run_experiment(&config)?;
            for (seed, result) in &outcome.per_seed {
                match result {
                    Ok(r) => println!(
                        "seed {seed}: {} iterations, total cost {}",
                        r.records.len(),
                        r.dataset.total_cost()
                    ),
                    Err(e) => eprintln!("warning: seed {seed} failed: {e}"),
                }
            }
            println!(
                "wrote {} ({} grid points)",
                config.out_dir.join("aggregate.csv").display(),
                outcome.aggregate.costs.len()
            );
            Ok(())
        }
        Command::Aggregate { in_dir, out } => {
            let curve = aggregate_directory(&in_dir, &out)?;
            println!("wrote {} ({} grid points)", out.display(), curve.costs.len());
            Ok(())
        }
        Command::Reference {
            benchmark,
            out,
            evaluations,
            seed,
        } => {
            let spec = osemo::benchmarks::BenchmarkSpec::by_name(&benchmark).ok_or_else(|| {
                HarnessError::config(format!(
                    "unknown benchmark {benchmark:?}; expected one of {}",
                    osemo::benchmarks::BenchmarkSpec::all_names().join(", ")
                ))
            })?;
            let front = osemo::benchmarks::reference_front(&spec, evaluations, seed)
                .map_err(HarnessError::from)?;
            front
                .write_csv(&out)
                .map_err(|e| HarnessError::io(format!("cannot write {out:?}: {e}")))?;
            println!("wrote {} ({} points)", out.display(), front.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
