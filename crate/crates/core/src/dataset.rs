//! Accumulated observations and their CSV form.
//!
//! One CSV row per observation: `x_0..x_{d-1}, fid_0..fid_{K-1},
//! y_0..y_{K+L-1}, cost` with the fidelity columns omitted in single-fidelity
//! mode. A header row is required.

use std::path::Path;

use crate::error::{CoreError, Result};

/// Fidelity of one observation across the K objectives.
#[derive(Debug, Clone, PartialEq)]
pub enum FidelityVector {
    /// Single-fidelity evaluation (also used for constraint outputs).
    None,
    /// Discrete per-objective levels, 1-based; `levels[j] in 1..=M_j`.
    Discrete(Vec<usize>),
    /// Continuous per-objective fidelities in [0, 1]; 1 is the true function.
    Continuous(Vec<f64>),
}

impl FidelityVector {
    /// Scalar fidelity of objective `j`.
    pub fn component(&self, j: usize) -> Fidelity {
        match self {
            FidelityVector::None => Fidelity::None,
            FidelityVector::Discrete(m) => Fidelity::Level(m[j]),
            FidelityVector::Continuous(z) => Fidelity::Z(z[j]),
        }
    }

    pub fn is_highest(&self, levels: &[usize]) -> bool {
        match self {
            FidelityVector::None => true,
            FidelityVector::Discrete(m) => m.iter().zip(levels).all(|(mi, top)| mi == top),
            FidelityVector::Continuous(z) => z.iter().all(|zi| *zi == 1.0),
        }
    }
}

/// Scalar fidelity of a single output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fidelity {
    None,
    Level(usize),
    Z(f64),
}

/// Fidelity regime of a problem or dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMode {
    None,
    Discrete,
    Continuous,
}

/// One evaluated input: objectives first, then constraint values.
#[derive(Debug, Clone)]
pub struct Observation {
    pub x: Vec<f64>,
    pub fidelity: FidelityVector,
    pub y: Vec<f64>,
    pub cost: f64,
}

/// Ordered evaluation history with fixed (K, L, fidelity mode).
#[derive(Debug, Clone)]
pub struct Dataset {
    k: usize,
    l: usize,
    mode: FidelityMode,
    observations: Vec<Observation>,
}

impl Dataset {
    pub fn new(k: usize, l: usize, mode: FidelityMode) -> Self {
        Self {
            k,
            l,
            mode,
            observations: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn mode(&self) -> FidelityMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn push(&mut self, obs: Observation) -> Result<()> {
        if obs.y.len() != self.k + self.l {
            return Err(CoreError::InvalidArgument("Dataset: output length mismatch"));
        }
        let mode_ok = matches!(
            (&obs.fidelity, self.mode),
            (FidelityVector::None, FidelityMode::None)
                | (FidelityVector::Discrete(_), FidelityMode::Discrete)
                | (FidelityVector::Continuous(_), FidelityMode::Continuous)
        );
        if !mode_ok {
            return Err(CoreError::InvalidArgument("Dataset: fidelity mode mismatch"));
        }
        self.observations.push(obs);
        Ok(())
    }

    /// Training slice for one output column: (inputs, per-output fidelities,
    /// values). Outputs `0..K` are objectives, `K..K+L` constraints;
    /// constraints are always observed at the evaluation's own input with no
    /// fidelity attached.
    pub fn output_slice(&self, output: usize) -> (Vec<Vec<f64>>, Vec<Fidelity>, Vec<f64>) {
        let xs = self.observations.iter().map(|o| o.x.clone()).collect();
        let fids = self
            .observations
            .iter()
            .map(|o| {
                if output < self.k {
                    o.fidelity.component(output)
                } else {
                    Fidelity::None
                }
            })
            .collect();
        let ys = self.observations.iter().map(|o| o.y[output]).collect();
        (xs, fids, ys)
    }

    /// Objective rows of all observations taken at the highest fidelity.
    pub fn highest_fidelity_outputs(&self, levels: &[usize]) -> Vec<Vec<f64>> {
        self.observations
            .iter()
            .filter(|o| o.fidelity.is_highest(levels))
            .map(|o| o.y[..self.k].to_vec())
            .collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.observations.iter().map(|o| o.cost).sum()
    }

    pub fn to_csv(&self) -> String {
        let d = self.observations.first().map_or(0, |o| o.x.len());
        let mut out = String::new();
        let mut cols: Vec<String> = (0..d).map(|i| format!("x_{i}")).collect();
        if self.mode != FidelityMode::None {
            cols.extend((0..self.k).map(|j| format!("fid_{j}")));
        }
        cols.extend((0..self.k + self.l).map(|j| format!("y_{j}")));
        cols.push("cost".to_string());
        out.push_str(&cols.join(","));
        out.push('\n');
        for o in &self.observations {
            let mut row: Vec<String> = o.x.iter().map(|v| format!("{v}")).collect();
            match &o.fidelity {
                FidelityVector::None => {}
                FidelityVector::Discrete(m) => row.extend(m.iter().map(|v| format!("{v}"))),
                FidelityVector::Continuous(z) => row.extend(z.iter().map(|v| format!("{v}"))),
            }
            row.extend(o.y.iter().map(|v| format!("{v}")));
            row.push(format!("{}", o.cost));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parse the CSV form. Dimensions are recovered from the header.
    pub fn from_csv(text: &str, k: usize, l: usize, mode: FidelityMode) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::CsvParse("empty dataset csv".into()))?;
        let names: Vec<&str> = header.split(',').collect();
        let d = names.iter().filter(|n| n.starts_with("x_")).count();
        let n_fid = names.iter().filter(|n| n.starts_with("fid_")).count();
        if (mode == FidelityMode::None) != (n_fid == 0) || (n_fid != 0 && n_fid != k) {
            return Err(CoreError::CsvParse("fidelity columns inconsistent".into()));
        }
        let mut ds = Dataset::new(k, l, mode);
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + n_fid + k + l + 1 {
                return Err(CoreError::CsvParse(format!(
                    "row has {} fields, expected {}",
                    fields.len(),
                    d + n_fid + k + l + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| CoreError::CsvParse(format!("bad number {s:?}: {e}")))
            };
            let x = fields[..d].iter().map(|s| parse(s)).collect::<Result<_>>()?;
            let fidelity = match mode {
                FidelityMode::None => FidelityVector::None,
                FidelityMode::Discrete => FidelityVector::Discrete(
                    fields[d..d + n_fid]
                        .iter()
                        .map(|s| {
                            s.parse::<usize>()
                                .map_err(|e| CoreError::CsvParse(format!("bad level {s:?}: {e}")))
                        })
                        .collect::<Result<_>>()?,
                ),
                FidelityMode::Continuous => FidelityVector::Continuous(
                    fields[d..d + n_fid]
                        .iter()
                        .map(|s| parse(s))
                        .collect::<Result<_>>()?,
                ),
            };
            let y = fields[d + n_fid..d + n_fid + k + l]
                .iter()
                .map(|s| parse(s))
                .collect::<Result<_>>()?;
            let cost = parse(fields[d + n_fid + k + l])?;
            ds.push(Observation {
                x,
                fidelity,
                y,
                cost,
            })?;
        }
        Ok(ds)
    }
}
