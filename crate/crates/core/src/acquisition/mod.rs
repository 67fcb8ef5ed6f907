//! Output-space entropy acquisition functions: MESMO (basic), MESMOC
//! (constrained), MF-OSEMO TG/NI (discrete multi-fidelity), and iMOCA T/E
//! (continuous-fidelity), with their shared entropy primitives, Pareto-front
//! sampling, and the continuous-fidelity search-space reduction.

pub mod alphas;
pub mod cost;
pub mod entropy;
pub mod fidelity;
pub mod fronts;

pub use alphas::{
    imoca_e_alpha, imoca_t_alpha, mesmo_alpha, mesmoc_alpha, mfosemo_ni_alpha, mfosemo_tg_alpha,
};
pub use cost::CostModel;
pub use entropy::{
    esg_moments, mesmo_term, ni_entropy, truncated_gaussian_entropy, NiInputs, GAUSSIAN_ENTROPY,
};
pub use fidelity::{reduce_fidelity_space, GapFilter};
pub use fronts::{sample_pareto_fronts, ParetoFrontSample};

/// Shared acquisition configuration.
#[derive(Debug, Clone)]
pub struct AcquisitionConfig {
    /// Number of Monte-Carlo Pareto-front samples S.
    pub n_samples: usize,
    /// Simpson panels for the NI and ESG integrals.
    pub panels: usize,
    /// Integration half-width in posterior standard deviations.
    pub integration_half_width: f64,
    /// Degeneracy threshold: 1 - tau^2 below this substitutes the
    /// truncated-Gaussian term.
    pub tau_epsilon: f64,
    /// Random-Fourier-feature count for posterior function draws.
    pub n_features: usize,
    /// Cheap-solver population and evaluation budget for front sampling.
    pub nsga_population: usize,
    pub nsga_evaluations: usize,
    /// Candidate grid resolution over the fidelity space [0, 1).
    pub fidelity_grid: usize,
    /// Threshold rule for the fidelity-reduction gap filter.
    pub gap_filter: GapFilter,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            n_samples: 10,
            panels: 256,
            integration_half_width: 5.0,
            tau_epsilon: 1e-6,
            n_features: crate::sampling::DEFAULT_N_FEATURES,
            nsga_population: 100,
            nsga_evaluations: 1500,
            fidelity_grid: 20,
            gap_filter: GapFilter::default(),
        }
    }
}
