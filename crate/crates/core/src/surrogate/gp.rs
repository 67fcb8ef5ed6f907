//! Fitted Gaussian-process surrogates with cached factorizations.
//!
//! A surrogate models one output (objective or constraint) with zero prior
//! mean and i.i.d. observation noise. The same predictive equations serve the
//! single-fidelity, discrete multi-fidelity, and continuous-fidelity kernels;
//! only the kernel changes.

use crate::dataset::Fidelity;
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::math::{Cholesky, SpdMatrix, LN_2PI};
use crate::surrogate::kernel::{GpHyperParams, KernelParams};

/// Immutable fitted surrogate for one output.
#[derive(Debug, Clone)]
pub struct FittedSurrogate {
    domain: BoxDomain,
    params: GpHyperParams,
    train_x: Vec<Vec<f64>>,
    train_fid: Vec<Fidelity>,
    train_y: Vec<f64>,
    factorization: Option<Factorization>,
}

#[derive(Debug, Clone)]
struct Factorization {
    chol: Cholesky,
    /// (K + sigma^2 I)^-1 Y
    alpha: Vec<f64>,
}

impl FittedSurrogate {
    /// Build with fixed hyperparameters (no search). Fails only if the kernel
    /// matrix is not positive definite after maximum jitter.
    pub fn with_params(
        domain: BoxDomain,
        train_x: Vec<Vec<f64>>,
        train_fid: Vec<Fidelity>,
        train_y: Vec<f64>,
        params: GpHyperParams,
    ) -> Result<Self> {
        if train_x.len() != train_y.len() || train_x.len() != train_fid.len() {
            return Err(CoreError::InvalidArgument(
                "FittedSurrogate: training slices must share length",
            ));
        }
        let factorization = if train_x.is_empty() {
            None
        } else {
            let n = train_x.len();
            let gram = SpdMatrix::from_fn(n, |i, j| {
                let mut v = params.kernel.eval(
                    &train_x[i],
                    train_fid[i],
                    &train_x[j],
                    train_fid[j],
                );
                if i == j {
                    v += params.noise;
                }
                v
            });
            let chol = gram.cholesky()?;
            let alpha = chol.solve(&train_y);
            Some(Factorization { chol, alpha })
        };
        Ok(Self {
            domain,
            params,
            train_x,
            train_fid,
            train_y,
            factorization,
        })
    }

    pub fn len(&self) -> usize {
        self.train_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_x.is_empty()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn params(&self) -> &GpHyperParams {
        &self.params
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.params.kernel
    }

    pub fn train_x(&self) -> &[Vec<f64>] {
        &self.train_x
    }

    pub fn train_fid(&self) -> &[Fidelity] {
        &self.train_fid
    }

    pub fn train_y(&self) -> &[f64] {
        &self.train_y
    }

    pub fn highest_fidelity(&self) -> Fidelity {
        self.params.kernel.highest_fidelity()
    }

    fn check_query(&self, x: &[f64], f: Fidelity) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(CoreError::OutOfDomain);
        }
        match (&self.params.kernel, f) {
            (KernelParams::Single(_), Fidelity::None) => Ok(()),
            (KernelParams::MultiFidelity(p), Fidelity::Level(m)) => {
                if m >= 1 && m <= p.levels {
                    Ok(())
                } else {
                    Err(CoreError::InvalidFidelity("level out of range"))
                }
            }
            (KernelParams::ContinuousFidelity(_), Fidelity::Z(z)) => {
                if (0.0..=1.0).contains(&z) {
                    Ok(())
                } else {
                    Err(CoreError::InvalidFidelity("fidelity outside [0,1]"))
                }
            }
            _ => Err(CoreError::InvalidFidelity("fidelity kind mismatch")),
        }
    }

    fn cross_vector(&self, x: &[f64], f: Fidelity) -> Vec<f64> {
        self.train_x
            .iter()
            .zip(&self.train_fid)
            .map(|(xi, fi)| self.params.kernel.eval(x, f, xi, *fi))
            .collect()
    }

    /// Predictive mean and variance at (x, fidelity). Variance is clamped at
    /// zero after numerical round-off.
    pub fn posterior(&self, x: &[f64], f: Fidelity) -> Result<(f64, f64)> {
        self.check_query(x, f)?;
        let prior = self.params.kernel.eval(x, f, x, f);
        let Some(fact) = &self.factorization else {
            return Ok((0.0, prior));
        };
        let k = self.cross_vector(x, f);
        let mean: f64 = k.iter().zip(&fact.alpha).map(|(a, b)| a * b).sum();
        let w = fact.chol.solve_lower(&k);
        let var = prior - w.iter().map(|v| v * v).sum::<f64>();
        Ok((mean, var.max(0.0)))
    }

    /// Posterior at the model's highest fidelity.
    pub fn highest_posterior(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.posterior(x, self.highest_fidelity())
    }

    /// Posterior covariance between the outputs at (x, f) and (x, f2).
    pub fn cross_covariance(&self, x: &[f64], f: Fidelity, f2: Fidelity) -> Result<f64> {
        self.check_query(x, f)?;
        self.check_query(x, f2)?;
        let prior = self.params.kernel.eval(x, f, x, f2);
        let Some(fact) = &self.factorization else {
            return Ok(prior);
        };
        let ka = self.cross_vector(x, f);
        let kb = self.cross_vector(x, f2);
        let wa = fact.chol.solve_lower(&ka);
        let wb = fact.chol.solve_lower(&kb);
        Ok(prior - wa.iter().zip(&wb).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Log marginal likelihood of the training data under the current
    /// hyperparameters.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let Some(fact) = &self.factorization else {
            return 0.0;
        };
        let n = self.train_y.len() as f64;
        let fit: f64 = self
            .train_y
            .iter()
            .zip(&fact.alpha)
            .map(|(y, a)| y * a)
            .sum();
        -0.5 * (fit + fact.chol.log_det() + n * LN_2PI)
    }
}
