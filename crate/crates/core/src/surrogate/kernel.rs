//! Covariance kernels: ARD squared-exponential, the recursive discrete
//! multi-fidelity kernel, and the product continuous-fidelity kernel.

use crate::dataset::Fidelity;
use crate::error::{CoreError, Result};

/// ARD squared-exponential kernel parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SeParams {
    pub lengthscales: Vec<f64>,
    pub variance: f64,
}

impl SeParams {
    pub fn isotropic(d: usize, lengthscale: f64, variance: f64) -> Self {
        Self {
            lengthscales: vec![lengthscale; d],
            variance,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lengthscales.iter().any(|l| !(*l > 0.0)) || !(self.variance > 0.0) {
            return Err(CoreError::InvalidArgument(
                "SE kernel: lengthscales and variance must be positive",
            ));
        }
        Ok(())
    }

    fn eval(&self, x: &[f64], x2: &[f64]) -> f64 {
        let z: f64 = x
            .iter()
            .zip(x2)
            .zip(&self.lengthscales)
            .map(|((a, b), l)| {
                let r = (a - b) / l;
                r * r
            })
            .sum();
        self.variance * (-0.5 * z).exp()
    }
}

/// variance * exp(-1/2 sum ((x_i - x2_i)/l_i)^2).
pub fn se_kernel(x: &[f64], x2: &[f64], params: &SeParams) -> Result<f64> {
    params.validate()?;
    if x.len() != x2.len() || x.len() != params.lengthscales.len() {
        return Err(CoreError::InvalidArgument("se_kernel: dimension mismatch"));
    }
    Ok(params.eval(x, x2))
}

/// Discrete multi-fidelity kernel built from a base kernel k1 (lowest
/// fidelity) plus per-step error kernels k_e:
/// k((x,m),(x2,m2)) = k1(x,x2) + (min(m,m2) - 1) k_e(x,x2).
#[derive(Debug, Clone, PartialEq)]
pub struct MfParams {
    pub base: SeParams,
    pub error: SeParams,
    /// Number of fidelity levels M (levels are 1..=M, M highest).
    pub levels: usize,
}

pub fn mf_kernel(x: &[f64], m: usize, x2: &[f64], m2: usize, params: &MfParams) -> Result<f64> {
    params.base.validate()?;
    params.error.validate()?;
    if m == 0 || m2 == 0 || m > params.levels || m2 > params.levels {
        return Err(CoreError::InvalidFidelity("level out of range"));
    }
    let shared = m.min(m2);
    Ok(params.base.eval(x, x2) + (shared - 1) as f64 * params.error.eval(x, x2))
}

/// Continuous-fidelity product kernel: SE over inputs times a unit-variance
/// SE over fidelities with the given bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct CfParams {
    pub input: SeParams,
    pub bandwidth: f64,
}

impl CfParams {
    pub fn fidelity_correlation(&self, z: f64, z2: f64) -> f64 {
        let r = (z - z2) / self.bandwidth;
        (-0.5 * r * r).exp()
    }
}

pub fn cf_kernel(x: &[f64], z: f64, x2: &[f64], z2: f64, params: &CfParams) -> Result<f64> {
    params.input.validate()?;
    if !(params.bandwidth > 0.0) {
        return Err(CoreError::InvalidArgument("cf_kernel: bandwidth must be positive"));
    }
    if !(0.0..=1.0).contains(&z) || !(0.0..=1.0).contains(&z2) {
        return Err(CoreError::InvalidFidelity("fidelity outside [0,1]"));
    }
    Ok(params.input.eval(x, x2) * params.fidelity_correlation(z, z2))
}

/// Kernel family of one surrogate.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelParams {
    Single(SeParams),
    MultiFidelity(MfParams),
    ContinuousFidelity(CfParams),
}

impl KernelParams {
    /// Kernel value between two (input, fidelity) pairs.
    pub fn eval(&self, x: &[f64], f: Fidelity, x2: &[f64], f2: Fidelity) -> f64 {
        match (self, f, f2) {
            (KernelParams::Single(p), _, _) => p.eval(x, x2),
            (KernelParams::MultiFidelity(p), Fidelity::Level(m), Fidelity::Level(m2)) => {
                let shared = m.min(m2);
                p.base.eval(x, x2) + (shared - 1) as f64 * p.error.eval(x, x2)
            }
            (KernelParams::ContinuousFidelity(p), Fidelity::Z(z), Fidelity::Z(z2)) => {
                p.input.eval(x, x2) * p.fidelity_correlation(z, z2)
            }
            _ => panic!("fidelity kind does not match kernel kind"),
        }
    }

    /// Fidelity at which this kernel's model evaluates the true function.
    pub fn highest_fidelity(&self) -> Fidelity {
        match self {
            KernelParams::Single(_) => Fidelity::None,
            KernelParams::MultiFidelity(p) => Fidelity::Level(p.levels),
            KernelParams::ContinuousFidelity(_) => Fidelity::Z(1.0),
        }
    }

    /// Input lengthscales (used for feature sampling and fidelity-space
    /// reduction).
    pub fn input_lengthscales(&self) -> &[f64] {
        match self {
            KernelParams::Single(p) => &p.lengthscales,
            KernelParams::MultiFidelity(p) => &p.base.lengthscales,
            KernelParams::ContinuousFidelity(p) => &p.input.lengthscales,
        }
    }
}

/// Hyperparameters of one fitted surrogate: kernel family plus observation
/// noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperParams {
    pub kernel: KernelParams,
    pub noise: f64,
}

/// Noise floor keeping factorizations stable on noise-free benchmarks.
pub const NOISE_FLOOR: f64 = 1e-8;

impl GpHyperParams {
    pub fn new(kernel: KernelParams, noise: f64) -> Self {
        Self {
            kernel,
            noise: noise.max(NOISE_FLOOR),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_at_equal_points_is_variance() {
        let p = SeParams::isotropic(2, 1.0, 1.0);
        assert_eq!(se_kernel(&[0.3, 0.7], &[0.3, 0.7], &p).unwrap(), 1.0);
    }

    #[test]
    fn se_decays_with_distance() {
        let p = SeParams::isotropic(1, 1.0, 1.0);
        let v = se_kernel(&[0.0], &[1.0], &p).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-12);
        let far = se_kernel(&[0.0], &[50.0], &p).unwrap();
        assert!(far < 1e-300);
    }

    #[test]
    fn se_rejects_nonpositive_lengthscale() {
        let p = SeParams {
            lengthscales: vec![0.0],
            variance: 1.0,
        };
        assert!(se_kernel(&[0.0], &[1.0], &p).is_err());
    }

    #[test]
    fn mf_base_at_lowest_level() {
        let p = MfParams {
            base: SeParams::isotropic(1, 1.0, 1.0),
            error: SeParams::isotropic(1, 1.0, 0.5),
            levels: 3,
        };
        let k1 = se_kernel(&[0.1], &[0.4], &p.base).unwrap();
        assert_eq!(mf_kernel(&[0.1], 1, &[0.4], 1, &p).unwrap(), k1);
    }

    #[test]
    fn mf_min_rule() {
        // choose scales so k1(x,x2) = 0.5 and k_e(x,x2) = 0.2 at x = x2
        let p = MfParams {
            base: SeParams::isotropic(1, 1.0, 0.5),
            error: SeParams::isotropic(1, 1.0, 0.2),
            levels: 3,
        };
        let v = mf_kernel(&[0.0], 2, &[0.0], 3, &p).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn mf_symmetric_in_pairs() {
        let p = MfParams {
            base: SeParams::isotropic(2, 0.7, 1.3),
            error: SeParams::isotropic(2, 0.4, 0.6),
            levels: 4,
        };
        let a = mf_kernel(&[0.1, 0.9], 2, &[0.5, 0.2], 4, &p).unwrap();
        let b = mf_kernel(&[0.5, 0.2], 4, &[0.1, 0.9], 2, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mf_rejects_bad_level() {
        let p = MfParams {
            base: SeParams::isotropic(1, 1.0, 1.0),
            error: SeParams::isotropic(1, 1.0, 1.0),
            levels: 2,
        };
        assert!(mf_kernel(&[0.0], 0, &[0.0], 1, &p).is_err());
        assert!(mf_kernel(&[0.0], 3, &[0.0], 1, &p).is_err());
    }

    #[test]
    fn cf_product_form() {
        let p = CfParams {
            input: SeParams::isotropic(1, 1.0, 1.0),
            bandwidth: 0.5,
        };
        assert_eq!(cf_kernel(&[0.0], 1.0, &[0.0], 1.0, &p).unwrap(), 1.0);
        let v = cf_kernel(&[0.0], 0.0, &[0.0], 1.0, &p).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.1353).abs() < 1e-4);
    }

    #[test]
    fn cf_wide_bandwidth_limit() {
        let p = CfParams {
            input: SeParams::isotropic(1, 1.0, 1.0),
            bandwidth: 1e9,
        };
        let v = cf_kernel(&[0.2], 0.0, &[0.2], 1.0, &p).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cf_rejects_out_of_range_fidelity() {
        let p = CfParams {
            input: SeParams::isotropic(1, 1.0, 1.0),
            bandwidth: 0.5,
        };
        assert!(cf_kernel(&[0.0], -0.1, &[0.0], 1.0, &p).is_err());
        assert!(cf_kernel(&[0.0], 0.5, &[0.0], 1.1, &p).is_err());
    }
}
