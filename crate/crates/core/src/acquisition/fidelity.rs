//! Fidelity-search-space reduction for the continuous-fidelity setting.
//!
//! A candidate fidelity z != 1 survives when (a) its posterior deviation
//! exceeds the cost-scaled information-gap threshold gamma(z) and (b) it lies
//! outside the exclusion neighborhood of z* = 1 defined by the gap filter.
//! The highest fidelity is always included.

use crate::acquisition::cost::CostModel;
use crate::dataset::Fidelity;
use crate::error::Result;
use crate::surrogate::{FittedSurrogate, KernelParams};

/// Threshold rule for the second (gap) filter, xi(z) versus the iteration
/// parameter beta_t and the largest gap on the grid.
///
/// The printed rule `xi(z) > beta_t * max xi` rejects every z != 1 as soon as
/// beta_t >= 1 (beta_1 already exceeds 1 for d >= 2), collapsing the search
/// to the highest fidelity. The prose instead describes an exclusion
/// neighborhood of z* that *shrinks* over iterations, which corresponds to
/// dividing by beta_t. Both rules are available; `InverseBeta` is the
/// default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapFilter {
    /// xi(z) > max xi / beta_t: exclusion neighborhood of z* shrinks with t.
    #[default]
    InverseBeta,
    /// xi(z) > beta_t * max xi, exactly as printed.
    AsPrinted,
}

/// Information gap xi(z) = min(|z - 1| / h, 1).
pub fn information_gap(z: f64, bandwidth: f64) -> f64 {
    ((z - 1.0).abs() / bandwidth).min(1.0)
}

/// beta_t = sqrt(0.5 d ln(2 t l + 1)) with l the effective L1 diameter of the
/// input space (each dimension scaled by its inverse lengthscale).
pub fn exploration_beta(t: usize, model: &FittedSurrogate) -> f64 {
    let d = model.domain().dim() as f64;
    let l: f64 = model
        .kernel()
        .input_lengthscales()
        .iter()
        .enumerate()
        .map(|(i, ell)| model.domain().range(i) / ell)
        .sum();
    (0.5 * d * (2.0 * t as f64 * l + 1.0).ln()).sqrt()
}

/// Candidate fidelities for one objective at input x in iteration t: the
/// filtered grid plus z* = 1. Always non-empty.
pub fn reduce_fidelity_space(
    model: &FittedSurrogate,
    x: &[f64],
    t: usize,
    objective: usize,
    cost: &CostModel,
    grid: usize,
    filter: GapFilter,
) -> Result<Vec<f64>> {
    let cf = match model.kernel() {
        KernelParams::ContinuousFidelity(cf) => cf,
        _ => {
            return Err(crate::error::CoreError::InvalidFidelity(
                "fidelity-space reduction applies to continuous-fidelity models",
            ))
        }
    };
    let h = cf.bandwidth;
    let d = model.domain().dim() as f64;
    let q = 1.0 / (1.0 + d + 2.0);
    let beta = exploration_beta(t.max(1), model);

    let candidates: Vec<f64> = (0..grid).map(|i| i as f64 / grid as f64).collect();
    let max_gap = candidates
        .iter()
        .map(|z| information_gap(*z, h))
        .fold(0.0f64, f64::max);
    let gap_threshold = match filter {
        GapFilter::InverseBeta => max_gap / beta,
        GapFilter::AsPrinted => max_gap * beta,
    };

    let top_cost = cost.normalized_continuous(objective, x, 1.0);
    let mut kept = Vec::new();
    for &z in &candidates {
        if z == 1.0 {
            continue;
        }
        let gap = information_gap(z, h);
        if gap <= gap_threshold {
            continue;
        }
        let cost_ratio = cost.normalized_continuous(objective, x, z) / top_cost;
        let gamma = gap * cost_ratio.powf(q);
        let (_, var) = model.posterior(x, Fidelity::Z(z))?;
        if var.sqrt() > gamma {
            kept.push(z);
        }
    }
    kept.push(1.0);
    Ok(kept)
}
