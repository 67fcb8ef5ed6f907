//! Hyperparameter fitting by maximizing log marginal likelihood: multi-start
//! random search in log space followed by coordinate-wise refinement.

use crate::dataset::Fidelity;
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::math::RngStream;
use crate::surrogate::gp::FittedSurrogate;
use crate::surrogate::kernel::{
    CfParams, GpHyperParams, KernelParams, MfParams, SeParams, NOISE_FLOOR,
};

/// Which surrogate family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    Single,
    MultiFidelity { levels: usize },
    ContinuousFidelity,
}

const N_STARTS: usize = 8;
const N_REFINE_STEPS: usize = 50;

/// Log-space box for one packed parameter vector.
struct LogBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl LogBounds {
    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| rng.uniform_in(*lo, *hi))
            .collect()
    }

    fn clamp(&self, theta: &mut [f64]) {
        for (t, (lo, hi)) in theta.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *t = t.clamp(*lo, *hi);
        }
    }
}

fn bounds_for(kind: SurrogateKind, domain: &BoxDomain, y_var: f64) -> LogBounds {
    let d = domain.dim();
    let ell = |i: usize| {
        let r = domain.range(i);
        ((0.03 * r).ln(), (3.0 * r).ln())
    };
    let var = ((0.05 * y_var).max(1e-8).ln(), (20.0 * y_var).max(1e-6).ln());
    let noise = (NOISE_FLOOR.ln(), (0.1 * y_var).max(1e-7).ln());
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut push = |b: (f64, f64)| {
        lo.push(b.0);
        hi.push(b.1);
    };
    match kind {
        SurrogateKind::Single => {
            (0..d).for_each(|i| push(ell(i)));
            push(var);
            push(noise);
        }
        SurrogateKind::MultiFidelity { .. } => {
            (0..d).for_each(|i| push(ell(i)));
            push(var);
            (0..d).for_each(|i| push(ell(i)));
            // error-kernel variance may be much smaller than the signal
            push(((1e-5 * y_var).max(1e-9).ln(), (10.0 * y_var).max(1e-6).ln()));
            push(noise);
        }
        SurrogateKind::ContinuousFidelity => {
            (0..d).for_each(|i| push(ell(i)));
            push(var);
            push((0.1f64.ln(), 10.0f64.ln())); // fidelity bandwidth
            push(noise);
        }
    }
    LogBounds { lo, hi }
}

fn unpack(kind: SurrogateKind, d: usize, theta: &[f64]) -> GpHyperParams {
    let e = |i: usize| theta[i].exp();
    match kind {
        SurrogateKind::Single => GpHyperParams::new(
            KernelParams::Single(SeParams {
                lengthscales: (0..d).map(e).collect(),
                variance: e(d),
            }),
            e(d + 1),
        ),
        SurrogateKind::MultiFidelity { levels } => GpHyperParams::new(
            KernelParams::MultiFidelity(MfParams {
                base: SeParams {
                    lengthscales: (0..d).map(e).collect(),
                    variance: e(d),
                },
                error: SeParams {
                    lengthscales: (d + 1..2 * d + 1).map(e).collect(),
                    variance: e(2 * d + 1),
                },
                levels,
            }),
            e(2 * d + 2),
        ),
        SurrogateKind::ContinuousFidelity => GpHyperParams::new(
            KernelParams::ContinuousFidelity(CfParams {
                input: SeParams {
                    lengthscales: (0..d).map(e).collect(),
                    variance: e(d),
                },
                bandwidth: e(d + 1),
            }),
            e(d + 2),
        ),
    }
}

fn default_params(kind: SurrogateKind, d: usize, y_var: f64) -> GpHyperParams {
    let variance = y_var + 1e-6;
    match kind {
        SurrogateKind::Single => GpHyperParams::new(
            KernelParams::Single(SeParams::isotropic(d, 1.0, variance)),
            NOISE_FLOOR,
        ),
        SurrogateKind::MultiFidelity { levels } => GpHyperParams::new(
            KernelParams::MultiFidelity(MfParams {
                base: SeParams::isotropic(d, 1.0, variance),
                error: SeParams::isotropic(d, 1.0, 0.1 * variance),
                levels,
            }),
            NOISE_FLOOR,
        ),
        SurrogateKind::ContinuousFidelity => GpHyperParams::new(
            KernelParams::ContinuousFidelity(CfParams {
                input: SeParams::isotropic(d, 1.0, variance),
                bandwidth: 1.0,
            }),
            NOISE_FLOOR,
        ),
    }
}

/// Fit hyperparameters for one output by log-marginal-likelihood search.
/// Deterministic given the rng seed. Degenerate (constant-output) data falls
/// back to default priors.
pub fn fit_hyperparameters(
    domain: &BoxDomain,
    xs: &[Vec<f64>],
    fids: &[Fidelity],
    ys: &[f64],
    kind: SurrogateKind,
    rng: &mut RngStream,
) -> Result<GpHyperParams> {
    if xs.len() < 2 {
        return Err(CoreError::NotEnoughData(
            "fit_hyperparameters needs at least 2 observations",
        ));
    }
    let d = domain.dim();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let y_var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64;
    if y_var < 1e-12 {
        return Ok(default_params(kind, d, y_var));
    }

    let bounds = bounds_for(kind, domain, y_var);
    let score = |theta: &[f64]| -> f64 {
        let params = unpack(kind, d, theta);
        match FittedSurrogate::with_params(
            domain.clone(),
            xs.to_vec(),
            fids.to_vec(),
            ys.to_vec(),
            params,
        ) {
            Ok(m) => {
                let lml = m.log_marginal_likelihood();
                if lml.is_finite() {
                    lml
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut best_theta = bounds.sample(rng);
    let mut best = score(&best_theta);
    for _ in 1..N_STARTS {
        let theta = bounds.sample(rng);
        let s = score(&theta);
        if s > best {
            best = s;
            best_theta = theta;
        }
    }

    // coordinate-wise refinement with shrinking log step
    let mut step = 0.5;
    for it in 0..N_REFINE_STEPS {
        let i = it % best_theta.len();
        for dir in [1.0, -1.0] {
            let mut candidate = best_theta.clone();
            candidate[i] += dir * step;
            bounds.clamp(&mut candidate);
            let s = score(&candidate);
            if s > best {
                best = s;
                best_theta = candidate;
            }
        }
        step *= 0.93;
    }

    Ok(unpack(kind, d, &best_theta))
}

/// Fit and factorize in one step.
pub fn fit_surrogate(
    domain: &BoxDomain,
    xs: Vec<Vec<f64>>,
    fids: Vec<Fidelity>,
    ys: Vec<f64>,
    kind: SurrogateKind,
    rng: &mut RngStream,
) -> Result<FittedSurrogate> {
    let params = fit_hyperparameters(domain, &xs, &fids, &ys, kind, rng)?;
    FittedSurrogate::with_params(domain.clone(), xs, fids, ys, params)
}
