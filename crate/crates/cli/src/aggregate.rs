//! Aggregation of per-seed runs onto a shared cost grid, and the
//! cost-reduction factor between aggregate curves.

use osemo::optimizer::RunRecord;

use crate::error::{HarnessError, Result};

/// One run's metric curve over cumulative cost.
#[derive(Debug, Clone)]
pub struct RunCurve {
    pub costs: Vec<f64>,
    pub phv: Vec<f64>,
    pub r2: Vec<Option<f64>>,
}

impl RunCurve {
    /// Extract the metric curve from run records: the observed-front
    /// hypervolume every iteration and the recovered-front R2 where logged.
    pub fn from_records(records: &[RunRecord]) -> Self {
        RunCurve {
            costs: records.iter().map(|r| r.cum_cost).collect(),
            phv: records.iter().map(|r| r.phv_observed).collect(),
            r2: records.iter().map(|r| r.r2).collect(),
        }
    }

    /// Step-function value at the given cost: the value at the largest
    /// breakpoint <= cost, or None before the first breakpoint.
    fn phv_at(&self, cost: f64) -> Option<f64> {
        let idx = self.costs.partition_point(|c| *c <= cost);
        if idx == 0 {
            None
        } else {
            Some(self.phv[idx - 1])
        }
    }

    fn r2_at(&self, cost: f64) -> Option<f64> {
        let idx = self.costs.partition_point(|c| *c <= cost);
        self.r2[..idx].iter().rev().find_map(|v| *v)
    }
}

/// Pointwise mean/variance curves over the union cost grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub costs: Vec<f64>,
    pub phv_mean: Vec<f64>,
    pub phv_var: Vec<f64>,
    pub r2_mean: Vec<Option<f64>>,
    pub r2_var: Vec<Option<f64>>,
    /// Number of runs contributing at each grid point.
    pub count: Vec<usize>,
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Step-interpolate every run onto the sorted union of all cost breakpoints,
/// then take pointwise mean and (population) variance.
pub fn aggregate_runs(runs: &[RunCurve]) -> Result<AggregateCurve> {
    if runs.is_empty() || runs.iter().all(|r| r.costs.is_empty()) {
        return Err(HarnessError::run("aggregate_runs: no runs to aggregate"));
    }
    let mut grid: Vec<f64> = runs.iter().flat_map(|r| r.costs.iter().copied()).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut out = AggregateCurve {
        costs: Vec::with_capacity(grid.len()),
        phv_mean: Vec::new(),
        phv_var: Vec::new(),
        r2_mean: Vec::new(),
        r2_var: Vec::new(),
        count: Vec::new(),
    };
    for &cost in &grid {
        let phv: Vec<f64> = runs.iter().filter_map(|r| r.phv_at(cost)).collect();
        if phv.is_empty() {
            continue;
        }
        let (pm, pv) = mean_var(&phv);
        let r2: Vec<f64> = runs.iter().filter_map(|r| r.r2_at(cost)).collect();
        let (rm, rv) = if r2.is_empty() {
            (None, None)
        } else {
            let (m, v) = mean_var(&r2);
            (Some(m), Some(v))
        };
        out.costs.push(cost);
        out.phv_mean.push(pm);
        out.phv_var.push(pv);
        out.r2_mean.push(rm);
        out.r2_var.push(rv);
        out.count.push(phv.len());
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub const AGGREGATE_HEADER: &str = "cost,phv_mean,phv_var,r2_mean,r2_var,count";

impl AggregateCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(AGGREGATE_HEADER);
        out.push('\n');
        for i in 0..self.costs.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.costs[i],
                self.phv_mean[i],
                self.phv_var[i],
                fmt_opt(self.r2_mean[i]),
                fmt_opt(self.r2_var[i]),
                self.count[i],
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| HarnessError::io("empty aggregate csv"))?;
        if header != AGGREGATE_HEADER {
            return Err(HarnessError::io(format!(
                "unexpected aggregate header {header:?}"
            )));
        }
        let mut out = AggregateCurve {
            costs: Vec::new(),
            phv_mean: Vec::new(),
            phv_var: Vec::new(),
            r2_mean: Vec::new(),
            r2_var: Vec::new(),
            count: Vec::new(),
        };
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(HarnessError::io("aggregate row width mismatch"));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|e| HarnessError::io(format!("bad number {s:?}: {e}")))
            };
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            out.costs.push(num(f[0])?);
            out.phv_mean.push(num(f[1])?);
            out.phv_var.push(num(f[2])?);
            out.r2_mean.push(opt(f[3])?);
            out.r2_var.push(opt(f[4])?);
            out.count.push(
                f[5].parse()
                    .map_err(|e| HarnessError::io(format!("bad count: {e}")))?,
            );
        }
        Ok(out)
    }

    /// First grid cost whose mean PHV reaches `level`.
    pub fn cost_to_reach(&self, level: f64) -> Option<f64> {
        self.costs
            .iter()
            .zip(&self.phv_mean)
            .find(|(_, phv)| **phv >= level)
            .map(|(c, _)| *c)
    }
}

/// Outcome of a cost-reduction comparison at a PHV level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostReduction {
    /// 100 (1 - cost_a / cost_b): positive when curve a reaches the level
    /// cheaper than curve b.
    Reached {
        percent: f64,
        cost_a: f64,
        cost_b: f64,
    },
    NotReached {
        a_reached: bool,
        b_reached: bool,
    },
}

pub fn cost_reduction_factor(
    curve_a: &AggregateCurve,
    curve_b: &AggregateCurve,
    level: f64,
) -> CostReduction {
    match (curve_a.cost_to_reach(level), curve_b.cost_to_reach(level)) {
        (Some(cost_a), Some(cost_b)) => CostReduction::Reached {
            percent: 100.0 * (1.0 - cost_a / cost_b),
            cost_a,
            cost_b,
        },
        (a, b) => CostReduction::NotReached {
            a_reached: a.is_some(),
            b_reached: b.is_some(),
        },
    }
}
