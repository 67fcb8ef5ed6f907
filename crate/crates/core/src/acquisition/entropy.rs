//! Entropy primitives behind the acquisition functions: truncated-Gaussian
//! entropy, the per-term MESMO information gain, extended-skew-Gaussian
//! moments and expectation, and the numerical-integration entropy used by the
//! NI variant.

use crate::error::{CoreError, Result};
use crate::math::{hazard, ln_std_normal_cdf, simpson_integrate, LN_2PI};

/// Entropy of the full (untruncated) standard Gaussian, (1 + ln 2 pi)/2.
pub const GAUSSIAN_ENTROPY: f64 = 0.5 * (1.0 + LN_2PI);

/// Differential entropy of a Gaussian N(mu, sigma^2) truncated above at
/// `upper`:
/// (1 + ln 2 pi)/2 + ln sigma + ln Phi(gamma) - gamma phi(gamma)/(2 Phi(gamma))
/// with gamma = (upper - mu)/sigma.
pub fn truncated_gaussian_entropy(mu: f64, sigma: f64, upper: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(CoreError::InvalidArgument(
            "truncated_gaussian_entropy: sigma must be positive",
        ));
    }
    let gamma = (upper - mu) / sigma;
    Ok(GAUSSIAN_ENTROPY + sigma.ln() + ln_std_normal_cdf(gamma) - 0.5 * gamma * hazard(gamma))
}

/// One MESMO summand: gamma phi(gamma)/(2 Phi(gamma)) - ln Phi(gamma).
/// This is the entropy reduction of conditioning a unit Gaussian on being
/// below a bound with standardized gap gamma; nonnegative for all gamma.
pub fn mesmo_term(gamma: f64) -> f64 {
    0.5 * gamma * hazard(gamma) - ln_std_normal_cdf(gamma)
}

/// Mean and variance of the extended-skew Gaussian for the standardized
/// lower-fidelity output conditioned on a correlated highest-fidelity bound:
/// mean = -tau phi(g)/Phi(g), var = 1 - tau^2 (phi/Phi)(g + phi/Phi).
///
/// The mean's sign follows from the density phi(u) Phi((g - tau u)/
/// sqrt(1 - tau^2)) / Phi(g): conditioning on the correlated output lying
/// *below* a bound shifts u downward for positive tau. Rejection-sampling
/// tests pin this down.
pub fn esg_moments(gamma_f: f64, tau: f64) -> Result<(f64, f64)> {
    if !(tau.abs() <= 1.0) {
        return Err(CoreError::InvalidArgument("esg_moments: |tau| must be <= 1"));
    }
    let r = hazard(gamma_f);
    let mean = -tau * r;
    let var = 1.0 - tau * tau * r * (gamma_f + r);
    Ok((mean, var))
}

/// x ln x with the limit value 0 at x = 0, evaluated from ln x to avoid
/// 0 * -inf when the density underflows.
fn x_ln_x_from_ln(ln_x: f64) -> f64 {
    if ln_x == f64::NEG_INFINITY {
        0.0
    } else {
        ln_x.exp() * ln_x
    }
}

/// E_{u ~ ESG(gamma_f, tau)}[ ln Phi((gamma_f - tau u)/sqrt(1 - tau^2)) ],
/// integrated by Simpson over mean +/- half_width * sqrt(var) against the ESG
/// density phi(u) Phi((gamma_f - tau u)/sqrt(1-tau^2)) / Phi(gamma_f).
pub fn esg_expectation_ln_cdf(
    gamma_f: f64,
    tau: f64,
    half_width: f64,
    panels: usize,
) -> Result<f64> {
    let (mean, var) = esg_moments(gamma_f, tau)?;
    let spread = var.max(1e-12).sqrt();
    let denom = (1.0 - tau * tau).sqrt();
    let ln_norm = ln_std_normal_cdf(gamma_f);
    let integrand = |u: f64| {
        let arg = (gamma_f - tau * u) / denom;
        let ln_inner = ln_std_normal_cdf(arg);
        // density * ln Phi(arg), assembled in log space for tail safety
        let ln_density_num = (-0.5 * u * u - 0.5 * LN_2PI) + ln_inner - ln_norm;
        if ln_density_num == f64::NEG_INFINITY {
            0.0
        } else {
            ln_density_num.exp() * ln_inner
        }
    };
    simpson_integrate(
        integrand,
        mean - half_width * spread,
        mean + half_width * spread,
        panels,
    )
}

/// Inputs to the NI entropy for one (objective, fidelity, sample) triple.
#[derive(Debug, Clone, Copy)]
pub struct NiInputs {
    /// Predictive mean and std at the queried (lower) fidelity.
    pub mu_low: f64,
    pub sigma_low: f64,
    /// Predictive mean and std at the highest fidelity.
    pub mu_high: f64,
    pub sigma_high: f64,
    /// Predictive covariance between the two fidelities at the same input.
    pub cross_cov: f64,
    /// Pareto-front maximum bounding the highest-fidelity output.
    pub y_star: f64,
}

/// Entropy of the lower-fidelity output conditioned (via Bayes' theorem) on
/// the highest-fidelity output lying below y_star, by 1-D numerical
/// integration of -Psi ln Psi over mu_low +/- half_width sigma_low.
///
/// Degenerate conditional variance (perfect correlation between fidelities)
/// falls back to the truncated-Gaussian entropy at the highest fidelity.
pub fn ni_entropy(inputs: &NiInputs, half_width: f64, panels: usize) -> Result<f64> {
    let NiInputs {
        mu_low,
        sigma_low,
        mu_high,
        sigma_high,
        cross_cov,
        y_star,
    } = *inputs;
    if !(sigma_low > 0.0) || !(sigma_high > 0.0) {
        return Err(CoreError::InvalidArgument("ni_entropy: nonpositive sigma"));
    }
    let var_low = sigma_low * sigma_low;
    // conditional y_high | y_low: mean mu_high + c (y - mu_low)/var_low,
    // variance var_high - c^2/var_low
    let cond_var = sigma_high * sigma_high - (cross_cov * cross_cov) / var_low;
    if cond_var <= 0.0 {
        return truncated_gaussian_entropy(mu_high, sigma_high, y_star);
    }
    let cond_sd = cond_var.sqrt();
    let gamma_high = (y_star - mu_high) / sigma_high;
    let ln_norm = ln_std_normal_cdf(gamma_high);
    let integrand = |y: f64| {
        let g = (y - mu_low) / sigma_low;
        let cond_mean = mu_high + cross_cov * (y - mu_low) / var_low;
        let ln_psi = ln_std_normal_cdf((y_star - cond_mean) / cond_sd)
            + (-0.5 * g * g - 0.5 * LN_2PI)
            - sigma_low.ln()
            - ln_norm;
        -x_ln_x_from_ln(ln_psi)
    };
    simpson_integrate(
        integrand,
        mu_low - half_width * sigma_low,
        mu_low + half_width * sigma_low,
        panels,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::normal::{cdf, pdf};

    /// Quadrature oracle for the truncated-normal entropy: -int p ln p with
    /// p(y) = phi((y-mu)/sigma)/(sigma Phi(gamma)) on (-inf, upper].
    pub(super) fn tg_entropy_oracle(mu: f64, sigma: f64, upper: f64, panels: usize) -> f64 {
        let gamma = (upper - mu) / sigma;
        let norm = cdf(gamma) * sigma;
        let f = |y: f64| {
            let p = pdf((y - mu) / sigma) / norm;
            if p <= 0.0 {
                0.0
            } else {
                -p * p.ln()
            }
        };
        simpson_integrate(f, mu - 14.0 * sigma, upper, panels).unwrap()
    }

    #[test]
    fn tg_entropy_unbounded_limit_is_gaussian_entropy() {
        let h = truncated_gaussian_entropy(0.0, 1.0, 1e9).unwrap();
        assert!((h - 1.4189385).abs() < 1e-6);
    }

    #[test]
    fn tg_entropy_half_truncation() {
        let h = truncated_gaussian_entropy(0.0, 1.0, 0.0).unwrap();
        // quadrature oracle value for gamma = 0
        let oracle = tg_entropy_oracle(0.0, 1.0, 0.0, 20_000);
        assert!((h - 0.7257914).abs() < 1e-6);
        assert!((h - oracle).abs() < 1e-9);
    }

    #[test]
    fn tg_entropy_scale_shift() {
        let h1 = truncated_gaussian_entropy(0.3, 1.0, 0.3 + 0.7).unwrap();
        let h2 = truncated_gaussian_entropy(0.3, 2.0, 0.3 + 1.4).unwrap();
        assert!((h2 - h1 - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn tg_entropy_rejects_bad_sigma() {
        assert!(truncated_gaussian_entropy(0.0, 0.0, 1.0).is_err());
        assert!(truncated_gaussian_entropy(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn tg_entropy_matches_oracle_over_gamma_range() {
        let mut rng = crate::math::RngStream::new(44);
        for _ in 0..40 {
            let mu = rng.uniform_in(-2.0, 2.0);
            let sigma = rng.uniform_in(0.2, 3.0);
            let gamma = rng.uniform_in(-3.0, 3.0);
            let upper = mu + gamma * sigma;
            let h = truncated_gaussian_entropy(mu, sigma, upper).unwrap();
            let oracle = tg_entropy_oracle(mu, sigma, upper, 20_000);
            assert!((h - oracle).abs() < 1e-6, "mu {mu} sigma {sigma} gamma {gamma}");
        }
    }

    #[test]
    fn mesmo_term_limits() {
        assert!((mesmo_term(0.0) - 0.6931472).abs() < 1e-6);
        assert!(mesmo_term(30.0).abs() < 1e-12); // bound far above: no gain
        assert!(mesmo_term(-30.0) > 0.0);
        for g in [-6.0, -2.0, -0.5, 0.0, 0.5, 2.0, 6.0] {
            assert!(mesmo_term(g) >= 0.0, "gamma {g}");
        }
    }

    #[test]
    fn esg_moments_independence() {
        let (m, v) = esg_moments(1.3, 0.0).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn esg_moments_full_correlation_at_zero_gap() {
        // rejection oracle at (gamma, tau) = (0, 1): the conditioned variable
        // is the upper-truncated standard normal, mean -phi(0)/Phi(0)
        let (m, v) = esg_moments(0.0, 1.0).unwrap();
        assert!((m + 0.7978846).abs() < 1e-6);
        assert!((v - 0.3633802).abs() < 1e-6);
    }

    #[test]
    fn esg_variance_in_unit_interval_on_grid() {
        for i in 0..=16 {
            let gamma = -4.0 + 0.5 * i as f64;
            for j in 0..=10 {
                let tau = -1.0 + 0.2 * j as f64;
                let (_, v) = esg_moments(gamma, tau).unwrap();
                assert!(v > 0.0 && v <= 1.0 + 1e-12, "gamma {gamma} tau {tau} var {v}");
            }
        }
    }

    #[test]
    fn esg_moments_match_rejection_sampling() {
        let mut rng = crate::math::RngStream::new(55);
        for &(gamma, tau) in &[(0.5, 0.7), (-1.0, 0.4), (1.5, -0.6)] {
            let n = 200_000;
            let mut kept = Vec::new();
            for _ in 0..n {
                let u = rng.normal();
                let w = rng.normal();
                let f = tau * u + (1.0 - tau * tau).sqrt() * w;
                if f <= gamma {
                    kept.push(u);
                }
            }
            let m = kept.iter().sum::<f64>() / kept.len() as f64;
            let v = kept.iter().map(|u| (u - m) * (u - m)).sum::<f64>() / (kept.len() - 1) as f64;
            let (em, ev) = esg_moments(gamma, tau).unwrap();
            let se_m = (v / kept.len() as f64).sqrt();
            let se_v = v * (2.0 / (kept.len() as f64 - 1.0)).sqrt();
            assert!((m - em).abs() < 3.0 * se_m, "mean {m} vs {em}");
            assert!((v - ev).abs() < 3.0 * se_v, "var {v} vs {ev}");
        }
    }

    #[test]
    fn esg_expectation_reduces_to_ln_cdf_at_tau_zero() {
        for gamma in [-1.0, 0.0, 1.5] {
            let e = esg_expectation_ln_cdf(gamma, 0.0, 5.0, 256).unwrap();
            let direct = ln_std_normal_cdf(gamma);
            // only truncation-window mass (~6e-7) separates the two
            assert!((e - direct).abs() < 1e-4, "gamma {gamma}: {e} vs {direct}");
        }
    }

    #[test]
    fn esg_expectation_matches_refined_quadrature() {
        let mut rng = crate::math::RngStream::new(66);
        for _ in 0..10 {
            let gamma = rng.uniform_in(-2.0, 2.0);
            let tau = rng.uniform_in(-0.9, 0.9);
            let coarse = esg_expectation_ln_cdf(gamma, tau, 5.0, 256).unwrap();
            let fine = esg_expectation_ln_cdf(gamma, tau, 5.0, 10_000).unwrap();
            assert!((coarse - fine).abs() < 1e-4, "gamma {gamma} tau {tau}");
        }
    }

    #[test]
    fn ni_entropy_independence_is_plain_gaussian_entropy() {
        let inputs = NiInputs {
            mu_low: 0.4,
            sigma_low: 0.8,
            mu_high: -0.2,
            sigma_high: 1.1,
            cross_cov: 0.0,
            y_star: 0.5,
        };
        let h = ni_entropy(&inputs, 5.0, 256).unwrap();
        let expected = GAUSSIAN_ENTROPY + 0.8f64.ln();
        assert!((h - expected).abs() < 1e-4, "{h} vs {expected}");
    }

    #[test]
    fn ni_entropy_perfect_correlation_tends_to_tg() {
        // identical fidelities: mu/sigma equal, cross-cov -> var
        let sigma = 0.9;
        for eps in [1e-2, 1e-3, 1e-4] {
            let inputs = NiInputs {
                mu_low: 0.1,
                sigma_low: sigma,
                mu_high: 0.1,
                sigma_high: sigma,
                cross_cov: sigma * sigma * (1.0 - eps),
                y_star: 0.6,
            };
            let h = ni_entropy(&inputs, 8.0, 4096).unwrap();
            let tg = truncated_gaussian_entropy(0.1, sigma, 0.6).unwrap();
            assert!(
                (h - tg).abs() < 30.0 * eps.sqrt().min(0.2) + 2e-3,
                "eps {eps}: {h} vs {tg}"
            );
        }
        // exactly degenerate: falls back to the highest-fidelity TG entropy
        let inputs = NiInputs {
            mu_low: 0.1,
            sigma_low: sigma,
            mu_high: 0.1,
            sigma_high: sigma,
            cross_cov: sigma * sigma,
            y_star: 0.6,
        };
        let h = ni_entropy(&inputs, 5.0, 256).unwrap();
        let tg = truncated_gaussian_entropy(0.1, sigma, 0.6).unwrap();
        assert!((h - tg).abs() < 1e-12);
    }

    #[test]
    fn ni_entropy_matches_refined_quadrature() {
        let mut rng = crate::math::RngStream::new(77);
        for _ in 0..10 {
            let sigma_low = rng.uniform_in(0.3, 1.5);
            let sigma_high = rng.uniform_in(0.3, 1.5);
            let rho = rng.uniform_in(-0.9, 0.9);
            let inputs = NiInputs {
                mu_low: rng.uniform_in(-1.0, 1.0),
                sigma_low,
                mu_high: rng.uniform_in(-1.0, 1.0),
                sigma_high,
                cross_cov: rho * sigma_low * sigma_high,
                y_star: rng.uniform_in(-1.0, 1.5),
            };
            let coarse = ni_entropy(&inputs, 5.0, 256).unwrap();
            let fine = ni_entropy(&inputs, 5.0, 10_000).unwrap();
            assert!((coarse - fine).abs() < 1e-5, "{inputs:?}");
        }
    }
}
