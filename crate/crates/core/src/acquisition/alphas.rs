//! The acquisition functions themselves. Every variant averages per-sample,
//! per-output entropy reductions over the Monte-Carlo Pareto-front samples;
//! the fidelity-aware variants divide by the normalized evaluation cost.
//!
//! A query point whose predictive deviation is zero contributes no
//! information (the output is already known), so such terms are dropped
//! rather than propagating NaN.

use crate::acquisition::cost::CostModel;
use crate::acquisition::entropy::{
    mesmo_term, ni_entropy, truncated_gaussian_entropy, NiInputs, GAUSSIAN_ENTROPY,
};
use crate::acquisition::fronts::ParetoFrontSample;
use crate::acquisition::{entropy, AcquisitionConfig};
use crate::dataset::{Fidelity, FidelityVector};
use crate::error::Result;
use crate::surrogate::FittedSurrogate;

const SIGMA_FLOOR: f64 = 1e-12;

fn term_sum_over_samples(samples: &[ParetoFrontSample], output: usize, mu: f64, sd: f64) -> f64 {
    if sd <= SIGMA_FLOOR {
        return 0.0;
    }
    samples
        .iter()
        .map(|s| mesmo_term((s.maxima[output] - mu) / sd))
        .sum()
}

/// MESMO: (1/S) sum over samples and objectives of
/// gamma phi(gamma)/(2 Phi(gamma)) - ln Phi(gamma), with gamma the
/// standardized gap between the sampled front maximum and the posterior at
/// the highest fidelity.
pub fn mesmo_alpha(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for (j, model) in models.iter().enumerate() {
        let (mu, var) = model.highest_posterior(x)?;
        total += term_sum_over_samples(samples, j, mu, var.sqrt());
    }
    Ok(total / samples.len() as f64)
}

/// MESMOC: the MESMO sum extended over the K objectives and L constraints;
/// sample maxima carry the constraint components after the objectives.
pub fn mesmoc_alpha(
    objective_models: &[FittedSurrogate],
    constraint_models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
) -> Result<f64> {
    let k = objective_models.len();
    let mut total = 0.0;
    for (j, model) in objective_models.iter().enumerate() {
        let (mu, var) = model.highest_posterior(x)?;
        total += term_sum_over_samples(samples, j, mu, var.sqrt());
    }
    for (i, model) in constraint_models.iter().enumerate() {
        let (mu, var) = model.highest_posterior(x)?;
        total += term_sum_over_samples(samples, k + i, mu, var.sqrt());
    }
    Ok(total / samples.len() as f64)
}

/// MF-OSEMO with the truncated-Gaussian approximation: the MESMO-form sum
/// evaluated at the queried fidelity vector, divided by the normalized cost.
pub fn mfosemo_tg_alpha(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    levels: &[usize],
    cost: &CostModel,
) -> Result<f64> {
    let fid = FidelityVector::Discrete(levels.to_vec());
    let mut total = 0.0;
    for (j, model) in models.iter().enumerate() {
        let (mu, var) = model.posterior(x, Fidelity::Level(levels[j]))?;
        total += term_sum_over_samples(samples, j, mu, var.sqrt());
    }
    Ok(total / (samples.len() as f64 * cost.normalized_total(x, &fid)))
}

/// Entropy of the lower-fidelity output conditioned on the highest-fidelity
/// bound, for one objective and one front sample (NI branch).
pub fn mfosemo_ni_entropy(
    model: &FittedSurrogate,
    x: &[f64],
    level: usize,
    y_star: f64,
    config: &AcquisitionConfig,
) -> Result<f64> {
    let top = match model.highest_fidelity() {
        Fidelity::Level(m) => m,
        _ => unreachable!("NI entropy applies to discrete multi-fidelity models"),
    };
    debug_assert!(level < top);
    let (mu_low, var_low) = model.posterior(x, Fidelity::Level(level))?;
    let (mu_high, var_high) = model.posterior(x, Fidelity::Level(top))?;
    let cross = model.cross_covariance(x, Fidelity::Level(level), Fidelity::Level(top))?;
    ni_entropy(
        &NiInputs {
            mu_low,
            sigma_low: var_low.sqrt().max(SIGMA_FLOOR),
            mu_high,
            sigma_high: var_high.sqrt().max(SIGMA_FLOOR),
            cross_cov: cross,
            y_star,
        },
        config.integration_half_width,
        config.panels,
    )
}

/// MF-OSEMO with the numerical-integration approximation:
/// (H1 - H2)/lambda with H1 the factorizable-Gaussian entropy at the queried
/// fidelities and H2 the sample average of conditioned entropies
/// (truncated-Gaussian at the top fidelity, NI below it).
pub fn mfosemo_ni_alpha(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    levels: &[usize],
    cost: &CostModel,
    config: &AcquisitionConfig,
) -> Result<f64> {
    let fid = FidelityVector::Discrete(levels.to_vec());
    let s = samples.len() as f64;
    let mut gain = 0.0;
    for (j, model) in models.iter().enumerate() {
        let top = match model.highest_fidelity() {
            Fidelity::Level(m) => m,
            _ => unreachable!(),
        };
        let (mu, var) = model.posterior(x, Fidelity::Level(levels[j]))?;
        let sd = var.sqrt();
        if sd <= SIGMA_FLOOR {
            continue;
        }
        let h1 = GAUSSIAN_ENTROPY + sd.ln();
        let mut h2 = 0.0;
        for sample in samples {
            let y_star = sample.maxima[j];
            h2 += if levels[j] == top {
                truncated_gaussian_entropy(mu, sd, y_star)?
            } else {
                mfosemo_ni_entropy(model, x, levels[j], y_star, config)?
            };
        }
        gain += h1 - h2 / s;
    }
    Ok(gain / cost.normalized_total(x, &fid))
}

/// iMOCA-T: the truncated-Gaussian term at the queried continuous fidelity,
/// per unit normalized cost.
pub fn imoca_t_alpha(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    z: &[f64],
    cost: &CostModel,
) -> Result<f64> {
    let fid = FidelityVector::Continuous(z.to_vec());
    let mut total = 0.0;
    for (j, model) in models.iter().enumerate() {
        let (mu, var) = model.posterior(x, Fidelity::Z(z[j]))?;
        total += term_sum_over_samples(samples, j, mu, var.sqrt());
    }
    Ok(total / (samples.len() as f64 * cost.normalized_total(x, &fid)))
}

/// iMOCA-E: per term
/// tau^2 gamma phi/(2 Phi) - ln Phi(gamma_f)
/// + E_{u ~ ESG}[ln Phi((gamma_f - tau u)/sqrt(1 - tau^2))]
/// with gamma_f standardized against the highest-fidelity posterior and tau
/// the predictive correlation between the queried and highest fidelity.
/// Degenerate correlation (1 - tau^2 below the configured epsilon)
/// substitutes the iMOCA-T term.
pub fn imoca_e_alpha(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    z: &[f64],
    cost: &CostModel,
    config: &AcquisitionConfig,
) -> Result<f64> {
    let fid = FidelityVector::Continuous(z.to_vec());
    let mut total = 0.0;
    for (j, model) in models.iter().enumerate() {
        let (mu_g, var_g) = model.posterior(x, Fidelity::Z(z[j]))?;
        let sd_g = var_g.sqrt();
        if sd_g <= SIGMA_FLOOR {
            continue;
        }
        let (mu_f, var_f) = model.posterior(x, Fidelity::Z(1.0))?;
        let sd_f = var_f.sqrt();
        if sd_f <= SIGMA_FLOOR {
            continue;
        }
        let cross = model.cross_covariance(x, Fidelity::Z(z[j]), Fidelity::Z(1.0))?;
        let tau = (cross / (sd_g * sd_f)).clamp(-1.0, 1.0);
        let degenerate = 1.0 - tau * tau < config.tau_epsilon;
        for sample in samples {
            if degenerate {
                total += mesmo_term((sample.maxima[j] - mu_g) / sd_g);
            } else {
                let gamma_f = (sample.maxima[j] - mu_f) / sd_f;
                let expectation = entropy::esg_expectation_ln_cdf(
                    gamma_f,
                    tau,
                    config.integration_half_width,
                    config.panels,
                )?;
                total += 0.5 * tau * tau * gamma_f * crate::math::hazard(gamma_f)
                    - crate::math::ln_std_normal_cdf(gamma_f)
                    + expectation;
            }
        }
    }
    Ok(total / (samples.len() as f64 * cost.normalized_total(x, &fid)))
}
