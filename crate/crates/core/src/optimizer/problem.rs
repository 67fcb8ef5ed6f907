//! Problem and run descriptions shared by all BO drivers, plus the
//! per-iteration log record and its CSV schema.

use std::sync::Arc;

use crate::acquisition::{AcquisitionConfig, CostModel};
use crate::dataset::{Dataset, FidelityMode, FidelityVector};
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::pareto::ParetoFront;

/// Black-box problem handed to a driver. The callback returns the K
/// objective values followed by L constraint values; it must be
/// deterministic per (x, fidelity).
#[derive(Clone)]
pub struct Problem {
    pub domain: BoxDomain,
    pub k: usize,
    pub l: usize,
    pub fidelity_mode: FidelityMode,
    /// Discrete mode: levels per objective.
    pub levels: Vec<usize>,
    #[allow(clippy::type_complexity)]
    pub eval: Arc<dyn Fn(&[f64], &FidelityVector) -> Vec<f64> + Send + Sync>,
    pub cost: CostModel,
    /// Reference front for the R2 metric (optional).
    pub reference_front: Option<ParetoFront>,
    /// Reference point for hypervolume logging (optional).
    pub phv_reference: Option<Vec<f64>>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("k", &self.k)
            .field("l", &self.l)
            .field("fidelity_mode", &self.fidelity_mode)
            .finish()
    }
}

impl Problem {
    pub fn from_benchmark(spec: &crate::benchmarks::BenchmarkSpec) -> Self {
        Problem {
            domain: spec.domain.clone(),
            k: spec.k,
            l: spec.l,
            fidelity_mode: spec.fidelity_mode,
            levels: spec.levels.clone(),
            eval: Arc::clone(&spec.eval),
            cost: spec.cost.clone(),
            reference_front: None,
            phv_reference: None,
        }
    }

    pub fn highest_fidelity(&self) -> FidelityVector {
        match self.fidelity_mode {
            FidelityMode::None => FidelityVector::None,
            FidelityMode::Discrete => FidelityVector::Discrete(self.levels.clone()),
            FidelityMode::Continuous => FidelityVector::Continuous(vec![1.0; self.k]),
        }
    }
}

/// Stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Fixed number of BO iterations after the initial design.
    Iterations(usize),
    /// Total normalized evaluation cost, initial design included; the run
    /// stops before the budget would be exceeded.
    Cost(f64),
}

/// Driver configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub budget: Budget,
    /// Initial design size; defaults to max(5, 2d).
    pub n_init: Option<usize>,
    pub acquisition: AcquisitionConfig,
    /// Refit hyperparameters every this many BO iterations.
    pub hyperfit_interval: usize,
    /// Uniform candidates scored by the acquisition optimizer.
    pub acq_candidates: usize,
    /// Local refinements started from the top candidates.
    pub acq_refinements: usize,
    /// Recompute the recovered front every this many iterations.
    pub recovery_interval: usize,
    /// Record wall-clock seconds in the per-iteration log. Off by default so
    /// fixed-seed reruns are byte-identical.
    pub record_wall_time: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(budget: Budget, seed: u64) -> Self {
        Self {
            budget,
            n_init: None,
            acquisition: AcquisitionConfig::default(),
            hyperfit_interval: 5,
            acq_candidates: 1000,
            acq_refinements: 10,
            recovery_interval: 5,
            record_wall_time: false,
            seed,
        }
    }

    pub fn n_init_for(&self, d: usize) -> usize {
        self.n_init.unwrap_or_else(|| 5usize.max(2 * d))
    }
}

/// One BO iteration in the log.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub iter: usize,
    pub cum_cost: f64,
    pub phv_observed: f64,
    pub phv_recovered: Option<f64>,
    pub r2: Option<f64>,
    pub x: Vec<f64>,
    pub fidelity: FidelityVector,
    pub y: Vec<f64>,
    pub elapsed_s: f64,
    pub flags: Vec<String>,
}

/// Outcome of one driver run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub dataset: Dataset,
    pub recovered_front: ParetoFront,
    pub records: Vec<RunRecord>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// CSV header for run records: `iter,cum_cost,phv_observed,phv_recovered,
/// r2,x_<i>...,fid_<j>...,y_<k>...,elapsed_s,flags` (fidelity columns only in
/// fidelity modes).
pub fn run_record_header(d: usize, k: usize, l: usize, mode: FidelityMode) -> String {
    let mut cols = vec![
        "iter".to_string(),
        "cum_cost".to_string(),
        "phv_observed".to_string(),
        "phv_recovered".to_string(),
        "r2".to_string(),
    ];
    cols.extend((0..d).map(|i| format!("x_{i}")));
    if mode != FidelityMode::None {
        cols.extend((0..k).map(|j| format!("fid_{j}")));
    }
    cols.extend((0..k + l).map(|j| format!("y_{j}")));
    cols.push("elapsed_s".to_string());
    cols.push("flags".to_string());
    cols.join(",")
}

pub fn run_records_to_csv(records: &[RunRecord], d: usize, k: usize, l: usize, mode: FidelityMode) -> String {
    let mut out = run_record_header(d, k, l, mode);
    out.push('\n');
    for r in records {
        let mut row = vec![
            format!("{}", r.iter),
            format!("{}", r.cum_cost),
            format!("{}", r.phv_observed),
            fmt_opt(r.phv_recovered),
            fmt_opt(r.r2),
        ];
        row.extend(r.x.iter().map(|v| format!("{v}")));
        match &r.fidelity {
            FidelityVector::None => {}
            FidelityVector::Discrete(m) => row.extend(m.iter().map(|v| format!("{v}"))),
            FidelityVector::Continuous(z) => row.extend(z.iter().map(|v| format!("{v}"))),
        }
        row.extend(r.y.iter().map(|v| format!("{v}")));
        row.push(format!("{}", r.elapsed_s));
        row.push(r.flags.join(";"));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a run-record CSV back into records (used by the aggregator).
pub fn run_records_from_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::CsvParse("empty run csv".into()))?;
    let names: Vec<&str> = header.split(',').collect();
    let d = names.iter().filter(|n| n.starts_with("x_")).count();
    let n_fid = names.iter().filter(|n| n.starts_with("fid_")).count();
    let n_y = names.iter().filter(|n| n.starts_with("y_")).count();
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 + d + n_fid + n_y + 2 {
            return Err(CoreError::CsvParse("run csv row width mismatch".into()));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| CoreError::CsvParse(format!("bad number {s:?}: {e}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        let fid_fields = &fields[5 + d..5 + d + n_fid];
        let fidelity = if n_fid == 0 {
            FidelityVector::None
        } else if fid_fields.iter().all(|s| !s.contains('.')) {
            FidelityVector::Discrete(
                fid_fields
                    .iter()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|e| CoreError::CsvParse(format!("bad level {s:?}: {e}")))
                    })
                    .collect::<Result<_>>()?,
            )
        } else {
            FidelityVector::Continuous(
                fid_fields.iter().map(|s| num(s)).collect::<Result<_>>()?,
            )
        };
        records.push(RunRecord {
            iter: fields[0]
                .parse()
                .map_err(|e| CoreError::CsvParse(format!("bad iter: {e}")))?,
            cum_cost: num(fields[1])?,
            phv_observed: num(fields[2])?,
            phv_recovered: opt(fields[3])?,
            r2: opt(fields[4])?,
            x: fields[5..5 + d].iter().map(|s| num(s)).collect::<Result<_>>()?,
            fidelity,
            y: fields[5 + d + n_fid..5 + d + n_fid + n_y]
                .iter()
                .map(|s| num(s))
                .collect::<Result<_>>()?,
            elapsed_s: num(fields[5 + d + n_fid + n_y])?,
            flags: {
                let f = fields[5 + d + n_fid + n_y + 1];
                if f.is_empty() {
                    Vec::new()
                } else {
                    f.split(';').map(|s| s.to_string()).collect()
                }
            },
        });
    }
    Ok(records)
}
