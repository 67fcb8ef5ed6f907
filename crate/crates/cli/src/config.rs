//! Experiment configuration: a flat key=value file overridden by
//! command-line flags, validated against the benchmark's fidelity mode and
//! constraint count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use osemo::acquisition::GapFilter;
use osemo::benchmarks::BenchmarkSpec;
use osemo::dataset::FidelityMode;

use crate::error::{HarnessError, Result};

/// Algorithm tags accepted by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Mesmo,
    Mesmoc,
    MfOsemoTg,
    MfOsemoNi,
    ImocaT,
    ImocaE,
    NaiveCfmo,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Mesmo => "mesmo",
            Algorithm::Mesmoc => "mesmoc",
            Algorithm::MfOsemoTg => "mf-osemo-tg",
            Algorithm::MfOsemoNi => "mf-osemo-ni",
            Algorithm::ImocaT => "imoca-t",
            Algorithm::ImocaE => "imoca-e",
            Algorithm::NaiveCfmo => "naive-cfmo",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "mesmo" => Ok(Algorithm::Mesmo),
            "mesmoc" => Ok(Algorithm::Mesmoc),
            "mf-osemo-tg" => Ok(Algorithm::MfOsemoTg),
            "mf-osemo-ni" => Ok(Algorithm::MfOsemoNi),
            "imoca-t" => Ok(Algorithm::ImocaT),
            "imoca-e" => Ok(Algorithm::ImocaE),
            "naive-cfmo" => Ok(Algorithm::NaiveCfmo),
            other => Err(HarnessError::config(format!(
                "unknown algorithm {other:?}; expected one of mesmo, mesmoc, mf-osemo-tg, mf-osemo-ni, imoca-t, imoca-e, naive-cfmo"
            ))),
        }
    }

    /// Hyperparameter refit cadence: every 5 evaluations for the
    /// single-fidelity algorithms, every 20 for the fidelity-aware ones.
    pub fn default_hyperfit_interval(&self) -> usize {
        match self {
            Algorithm::Mesmo | Algorithm::Mesmoc => 5,
            _ => 20,
        }
    }
}

/// A fully resolved experiment: algorithm x benchmark x seed grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub benchmark: String,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    /// Monte-Carlo Pareto-front samples S.
    pub samples: usize,
    /// Exactly one of budget (normalized cost) or iterations is set.
    pub budget: Option<f64>,
    pub iterations: Option<usize>,
    pub n_init: Option<usize>,
    pub hyperfit_interval: usize,
    pub nsga_evaluations: usize,
    pub acq_candidates: usize,
    pub n_features: usize,
    pub gap_filter: GapFilter,
    pub wall_clock: bool,
    pub out_dir: PathBuf,
}

/// Builder holding raw key=value pairs before validation.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "benchmark",
    "algorithm",
    "seeds",
    "samples",
    "budget",
    "iterations",
    "n_init",
    "hyperfit_interval",
    "nsga_evaluations",
    "acq_candidates",
    "n_features",
    "gap_filter",
    "wall_clock",
    "out",
];

impl RawConfig {
    /// Parse a flat key=value file ('#' starts a comment line).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(format!("cannot read config {path:?}: {e}")))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::config(format!(
                    "line {}: expected key=value, got {line:?}",
                    lineno + 1
                )));
            };
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(HarnessError::config(format!("unknown config key {key:?}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                HarnessError::config(format!("key {key}: cannot parse {raw:?}: {e}"))
            }),
        }
    }

    /// Validate and fill defaults.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let benchmark = self
            .get("benchmark")
            .ok_or_else(|| HarnessError::config("missing required key: benchmark"))?
            .to_string();
        let spec = BenchmarkSpec::by_name(&benchmark).ok_or_else(|| {
            HarnessError::config(format!(
                "unknown benchmark {benchmark:?}; expected one of {}",
                BenchmarkSpec::all_names().join(", ")
            ))
        })?;
        let algorithm = Algorithm::parse(
            self.get("algorithm")
                .ok_or_else(|| HarnessError::config("missing required key: algorithm"))?,
        )?;
        check_compatible(algorithm, &spec)?;

        let seeds = match self.get("seeds") {
            None => (0..10).collect(),
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim().parse::<u64>().map_err(|e| {
                        HarnessError::config(format!("key seeds: bad entry {s:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<u64>>>()?,
        };
        if seeds.is_empty() {
            return Err(HarnessError::config("key seeds: need at least one seed"));
        }

        let budget: Option<f64> = self.parse_num("budget")?;
        let iterations: Option<usize> = self.parse_num("iterations")?;
        match (budget, iterations) {
            (None, None) => {
                return Err(HarnessError::config(
                    "either budget or iterations must be given",
                ))
            }
            (Some(_), Some(_)) => {
                return Err(HarnessError::config(
                    "budget and iterations are mutually exclusive",
                ))
            }
            _ => {}
        }

        let gap_filter = match self.get("gap_filter") {
            None | Some("inverse-beta") => GapFilter::InverseBeta,
            Some("as-printed") => GapFilter::AsPrinted,
            Some(other) => {
                return Err(HarnessError::config(format!(
                    "key gap_filter: expected inverse-beta or as-printed, got {other:?}"
                )))
            }
        };
        let wall_clock = match self.get("wall_clock") {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => {
                return Err(HarnessError::config(format!(
                    "key wall_clock: expected true or false, got {other:?}"
                )))
            }
        };

        Ok(ExperimentConfig {
            benchmark,
            algorithm,
            seeds,
            samples: self.parse_num("samples")?.unwrap_or(10),
            budget,
            iterations,
            n_init: self.parse_num("n_init")?,
            hyperfit_interval: self
                .parse_num("hyperfit_interval")?
                .unwrap_or_else(|| algorithm.default_hyperfit_interval()),
            nsga_evaluations: self.parse_num("nsga_evaluations")?.unwrap_or(1500),
            acq_candidates: self.parse_num("acq_candidates")?.unwrap_or(1000),
            n_features: self.parse_num("n_features")?.unwrap_or(500),
            gap_filter,
            wall_clock,
            out_dir: PathBuf::from(self.get("out").unwrap_or("osemo-out")),
        })
    }
}

fn check_compatible(algorithm: Algorithm, spec: &BenchmarkSpec) -> Result<()> {
    let fail = |need: &str| {
        Err(HarnessError::config(format!(
            "algorithm {} is incompatible with benchmark {} (fidelity mode {:?}, L = {}): requires {need}",
            algorithm.tag(),
            spec.name,
            spec.fidelity_mode,
            spec.l,
        )))
    };
    match algorithm {
        Algorithm::Mesmo => {
            if spec.l != 0 {
                return fail("an unconstrained benchmark (L = 0)");
            }
        }
        Algorithm::Mesmoc => {
            if spec.l == 0 {
                return fail("a constrained benchmark (L >= 1)");
            }
            if spec.fidelity_mode != FidelityMode::None {
                return fail("a single-fidelity benchmark");
            }
        }
        Algorithm::MfOsemoTg | Algorithm::MfOsemoNi => {
            if spec.fidelity_mode != FidelityMode::Discrete {
                return fail("a discrete multi-fidelity benchmark");
            }
        }
        Algorithm::ImocaT | Algorithm::ImocaE | Algorithm::NaiveCfmo => {
            if spec.fidelity_mode != FidelityMode::Continuous {
                return fail("a continuous-fidelity benchmark");
            }
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Emit the effective configuration as key=value text; re-parsing it
    /// reproduces the config exactly.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("benchmark", self.benchmark.clone());
        push("algorithm", self.algorithm.tag().to_string());
        push(
            "seeds",
            self.seeds
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push("samples", self.samples.to_string());
        if let Some(b) = self.budget {
            push("budget", format!("{b}"));
        }
        if let Some(i) = self.iterations {
            push("iterations", i.to_string());
        }
        if let Some(n) = self.n_init {
            push("n_init", n.to_string());
        }
        push("hyperfit_interval", self.hyperfit_interval.to_string());
        push("nsga_evaluations", self.nsga_evaluations.to_string());
        push("acq_candidates", self.acq_candidates.to_string());
        push("n_features", self.n_features.to_string());
        push(
            "gap_filter",
            match self.gap_filter {
                GapFilter::InverseBeta => "inverse-beta".to_string(),
                GapFilter::AsPrinted => "as-printed".to_string(),
            },
        );
        push("wall_clock", self.wall_clock.to_string());
        push("out", self.out_dir.display().to_string());
        out
    }
}
