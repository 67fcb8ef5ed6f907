//! Pareto dominance, front extraction, hypervolume, and the R2 distance
//! indicator. Maximization convention throughout.

use std::path::Path;

use crate::error::{CoreError, Result};
use crate::math::RngStream;

/// Non-dominated objective vectors, optionally paired with their inputs.
#[derive(Debug, Clone, Default)]
pub struct ParetoFront {
    pub points: Vec<Vec<f64>>,
    pub inputs: Option<Vec<Vec<f64>>>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn to_csv(&self) -> String {
        let k = self.k();
        let mut out: String = (0..k)
            .map(|j| format!("y_{j}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for p in &self.points {
            out.push_str(
                &p.iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::CsvParse("empty front csv".into()))?;
        let k = header.split(',').count();
        let mut points = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let p: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| CoreError::CsvParse(format!("bad number {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if p.len() != k {
                return Err(CoreError::CsvParse("ragged front csv".into()));
            }
            points.push(p);
        }
        Ok(Self {
            points,
            inputs: None,
        })
    }
}

/// True iff `a >= b` componentwise with at least one strict inequality.
/// Panics on length mismatch.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominates: length mismatch");
    let mut strict = false;
    for (ai, bi) in a.iter().zip(b) {
        if ai < bi {
            return false;
        }
        if ai > bi {
            strict = true;
        }
    }
    strict
}

/// Extract the non-dominated subset. Exact duplicates are collapsed and the
/// result is sorted lexicographically so that equal sets compare equal.
pub fn pareto_front(points: &[Vec<f64>]) -> Result<ParetoFront> {
    pareto_front_with_inputs(points, None)
}

pub fn pareto_front_with_inputs(
    points: &[Vec<f64>],
    inputs: Option<&[Vec<f64>]>,
) -> Result<ParetoFront> {
    if points.is_empty() {
        return Err(CoreError::InvalidArgument("pareto_front: empty input"));
    }
    let mut keep: Vec<usize> = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && dominates(q, p) {
                continue 'outer;
            }
        }
        if keep.iter().any(|&k| points[k] == *p) {
            continue; // exact duplicate
        }
        keep.push(i);
    }
    keep.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ParetoFront {
        points: keep.iter().map(|&i| points[i].clone()).collect(),
        inputs: inputs.map(|xs| keep.iter().map(|&i| xs[i].clone()).collect()),
    })
}

/// Componentwise maxima over the front (the y* vector).
pub fn per_objective_maxima(front: &ParetoFront) -> Result<Vec<f64>> {
    if front.is_empty() {
        return Err(CoreError::InvalidArgument(
            "per_objective_maxima: empty front",
        ));
    }
    let k = front.k();
    let mut maxima = vec![f64::NEG_INFINITY; k];
    for p in &front.points {
        for (m, v) in maxima.iter_mut().zip(p) {
            *m = m.max(*v);
        }
    }
    Ok(maxima)
}

/// Hypervolume value; the standard error is reported for the Monte-Carlo
/// estimator used when K >= 4.
#[derive(Debug, Clone, Copy)]
pub struct Hypervolume {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Number of fixed-seed samples for the Monte-Carlo estimator.
pub const HYPERVOLUME_MC_SAMPLES: usize = 200_000;
const HYPERVOLUME_MC_SEED: u64 = 0x9e3779b9;

/// Dominated volume between `reference` and the front. Exact dimension-sweep
/// for K <= 3; fixed-seed Monte-Carlo with reported standard error for
/// K >= 4. Points that do not dominate the reference contribute nothing and
/// are dropped.
pub fn hypervolume(front: &ParetoFront, reference: &[f64]) -> Result<Hypervolume> {
    if reference.iter().any(|r| !r.is_finite()) {
        return Err(CoreError::NonFiniteInput("hypervolume reference"));
    }
    if front.is_empty() || front.k() != reference.len() {
        return Err(CoreError::InvalidArgument("hypervolume: bad front"));
    }
    let pts: Vec<Vec<f64>> = front
        .points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v > r))
        .cloned()
        .collect();
    if pts.is_empty() {
        let std_error = if reference.len() >= 4 { Some(0.0) } else { None };
        return Ok(Hypervolume {
            value: 0.0,
            std_error,
        });
    }
    if reference.len() <= 3 {
        Ok(Hypervolume {
            value: sweep(&pts, reference),
            std_error: None,
        })
    } else {
        Ok(monte_carlo_hv(&pts, reference))
    }
}

/// Recursive dimension sweep: slice along the last objective and accumulate
/// slab volume times the (K-1)-dimensional hypervolume of the points alive in
/// each slab.
fn sweep(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let k = reference.len();
    if k == 1 {
        return points
            .iter()
            .map(|p| p[0] - reference[0])
            .fold(0.0, f64::max);
    }
    let mut levels: Vec<f64> = points.iter().map(|p| p[k - 1]).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();
    let mut volume = 0.0;
    for (i, &level) in levels.iter().enumerate() {
        let next = levels.get(i + 1).copied().unwrap_or(reference[k - 1]);
        let slab = level - next;
        if slab <= 0.0 {
            continue;
        }
        let alive: Vec<Vec<f64>> = points
            .iter()
            .filter(|p| p[k - 1] >= level)
            .map(|p| p[..k - 1].to_vec())
            .collect();
        volume += slab * sweep(&alive, &reference[..k - 1]);
    }
    volume
}

fn monte_carlo_hv(points: &[Vec<f64>], reference: &[f64]) -> Hypervolume {
    let k = reference.len();
    let mut upper = vec![f64::NEG_INFINITY; k];
    for p in points {
        for (u, v) in upper.iter_mut().zip(p) {
            *u = u.max(*v);
        }
    }
    let box_volume: f64 = upper
        .iter()
        .zip(reference)
        .map(|(u, r)| u - r)
        .product();
    let mut rng = RngStream::new(HYPERVOLUME_MC_SEED);
    let mut hits = 0usize;
    let mut probe = vec![0.0; k];
    for _ in 0..HYPERVOLUME_MC_SAMPLES {
        for (p, (u, r)) in probe.iter_mut().zip(upper.iter().zip(reference)) {
            *p = rng.uniform_in(*r, *u);
        }
        if points
            .iter()
            .any(|pt| pt.iter().zip(&probe).all(|(v, q)| v >= q))
        {
            hits += 1;
        }
    }
    let p = hits as f64 / HYPERVOLUME_MC_SAMPLES as f64;
    Hypervolume {
        value: box_volume * p,
        std_error: Some(box_volume * (p * (1.0 - p) / HYPERVOLUME_MC_SAMPLES as f64).sqrt()),
    }
}

/// Mean over reference-front points of the minimum Euclidean distance to the
/// candidate front.
pub fn r2_distance(reference_front: &ParetoFront, candidate_front: &ParetoFront) -> Result<f64> {
    if reference_front.is_empty() || candidate_front.is_empty() {
        return Err(CoreError::InvalidArgument("r2_distance: empty front"));
    }
    if reference_front.k() != candidate_front.k() {
        return Err(CoreError::InvalidArgument("r2_distance: K mismatch"));
    }
    let total: f64 = reference_front
        .points
        .iter()
        .map(|r| {
            candidate_front
                .points
                .iter()
                .map(|c| {
                    r.iter()
                        .zip(c)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference_front.len() as f64)
}
