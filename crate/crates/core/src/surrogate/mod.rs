//! Gaussian-process surrogates: single-fidelity, recursive discrete
//! multi-fidelity, and product-kernel continuous-fidelity, with shared
//! predictive machinery and marginal-likelihood hyperparameter fitting.

pub mod fit;
pub mod gp;
pub mod kernel;

pub use fit::{fit_hyperparameters, fit_surrogate, SurrogateKind};
pub use gp::FittedSurrogate;
pub use kernel::{
    cf_kernel, mf_kernel, se_kernel, CfParams, GpHyperParams, KernelParams, MfParams, SeParams,
    NOISE_FLOOR,
};
