//! Monte-Carlo Pareto-front samples: draw posterior functions for every
//! objective (and constraint), then solve the cheap MO problem over the
//! sampled functions with NSGA-II.

use std::sync::Arc;

use crate::acquisition::AcquisitionConfig;
use crate::domain::BoxDomain;
use crate::error::Result;
use crate::math::RngStream;
use crate::nsga2::{nsga2, EvolutionConfig};
use crate::sampling::{build_feature_map, sample_posterior_function};
use crate::surrogate::FittedSurrogate;

/// One sampled Pareto front together with its per-output maxima (length K,
/// or K+L when constraints participate).
#[derive(Debug, Clone)]
pub struct ParetoFrontSample {
    pub front: Vec<Vec<f64>>,
    pub maxima: Vec<f64>,
    /// Set when the constrained sampled problem never produced a feasible
    /// point and the unconstrained front was used instead.
    pub degenerate: bool,
}

const FEASIBILITY_RETRIES: usize = 5;

/// Draw S Pareto-front samples. Every objective (and constraint) is sampled
/// at its highest fidelity via random Fourier features; each sampled problem
/// is solved by (constrained) NSGA-II.
pub fn sample_pareto_fronts(
    objectives: &[FittedSurrogate],
    constraints: Option<&[FittedSurrogate]>,
    domain: &BoxDomain,
    config: &AcquisitionConfig,
    rng: &mut RngStream,
) -> Result<Vec<ParetoFrontSample>> {
    (0..config.n_samples)
        .map(|_| sample_one_front(objectives, constraints, domain, config, rng))
        .collect()
}

fn sample_one_front(
    objectives: &[FittedSurrogate],
    constraints: Option<&[FittedSurrogate]>,
    domain: &BoxDomain,
    config: &AcquisitionConfig,
    rng: &mut RngStream,
) -> Result<ParetoFrontSample> {
    let mut attempts = 0;
    loop {
        let sampled_objectives = draw_functions(objectives, config, rng)?;
        let sampled_constraints = match constraints {
            Some(models) => Some(draw_functions(models, config, rng)?),
            None => None,
        };
        let objective_fn = |x: &[f64]| -> Vec<f64> {
            sampled_objectives.iter().map(|f| f.evaluate(x)).collect()
        };
        let constraint_fn = sampled_constraints.as_ref().map(|fs| {
            move |x: &[f64]| -> Vec<f64> { fs.iter().map(|f| f.evaluate(x)).collect() }
        });
        let mut evo = EvolutionConfig::new(rng.derive_seed());
        evo.population = config.nsga_population;
        evo.max_evaluations = config.nsga_evaluations;
        let archive = match &constraint_fn {
            Some(c) => nsga2(&objective_fn, Some(c), domain, &evo)?,
            None => nsga2(&objective_fn, None, domain, &evo)?,
        };
        if !archive.any_feasible && attempts < FEASIBILITY_RETRIES {
            attempts += 1;
            continue;
        }
        // constraint maxima come from the archive members' sampled
        // constraint values
        let mut maxima = vec![f64::NEG_INFINITY; objectives.len()];
        for p in &archive.objectives {
            for (m, v) in maxima.iter_mut().zip(p) {
                *m = m.max(*v);
            }
        }
        if constraints.is_some() {
            let l = constraints.map_or(0, |c| c.len());
            let mut c_maxima = vec![f64::NEG_INFINITY; l];
            for cs in &archive.constraints {
                for (m, v) in c_maxima.iter_mut().zip(cs) {
                    *m = m.max(*v);
                }
            }
            maxima.extend(c_maxima);
        }
        return Ok(ParetoFrontSample {
            front: archive.objectives,
            maxima,
            degenerate: !archive.any_feasible,
        });
    }
}

fn draw_functions(
    models: &[FittedSurrogate],
    config: &AcquisitionConfig,
    rng: &mut RngStream,
) -> Result<Vec<crate::sampling::SampledFunction>> {
    models
        .iter()
        .enumerate()
        .map(|(j, model)| {
            let map = Arc::new(build_feature_map(model.params(), config.n_features, rng)?);
            sample_posterior_function(model, &map, j, rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Fidelity;
    use crate::pareto::pareto_front;
    use crate::surrogate::{GpHyperParams, KernelParams, SeParams};

    fn toy_model(seed_points: &[(f64, f64)]) -> FittedSurrogate {
        FittedSurrogate::with_params(
            BoxDomain::unit(1),
            seed_points.iter().map(|(x, _)| vec![*x]).collect(),
            vec![Fidelity::None; seed_points.len()],
            seed_points.iter().map(|(_, y)| *y).collect(),
            GpHyperParams::new(
                KernelParams::Single(SeParams::isotropic(1, 0.3, 1.0)),
                1e-6,
            ),
        )
        .unwrap()
    }

    fn small_config(s: usize) -> AcquisitionConfig {
        let mut c = AcquisitionConfig::default();
        c.n_samples = s;
        c.n_features = 128;
        c.nsga_population = 20;
        c.nsga_evaluations = 200;
        c
    }

    #[test]
    fn single_sample_front_is_non_dominated() {
        let m1 = toy_model(&[(0.2, 0.5), (0.8, -0.3)]);
        let m2 = toy_model(&[(0.3, -0.2), (0.7, 0.4)]);
        let domain = BoxDomain::unit(1);
        let samples = sample_pareto_fronts(
            &[m1, m2],
            None,
            &domain,
            &small_config(1),
            &mut RngStream::new(1),
        )
        .unwrap();
        assert_eq!(samples.len(), 1);
        let s = &samples[0];
        assert!(!s.degenerate);
        let again = pareto_front(&s.front).unwrap();
        assert_eq!(again.len(), s.front.len());
        // maxima consistent with the front
        for j in 0..2 {
            let m = s.front.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(m, s.maxima[j]);
        }
    }

    #[test]
    fn fixed_seed_fronts_are_identical() {
        let m1 = toy_model(&[(0.2, 0.5), (0.8, -0.3)]);
        let m2 = toy_model(&[(0.3, -0.2), (0.7, 0.4)]);
        let domain = BoxDomain::unit(1);
        let config = small_config(3);
        let a = sample_pareto_fronts(
            &[m1.clone(), m2.clone()],
            None,
            &domain,
            &config,
            &mut RngStream::new(7),
        )
        .unwrap();
        let b =
            sample_pareto_fronts(&[m1, m2], None, &domain, &config, &mut RngStream::new(7))
                .unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.front, sb.front);
            assert_eq!(sa.maxima, sb.maxima);
        }
    }

    #[test]
    fn infeasible_constraint_model_flags_degenerate() {
        let m1 = toy_model(&[(0.2, 0.5), (0.8, -0.3)]);
        // constraint surrogate trained far below zero everywhere
        let c = toy_model(&[(0.1, -30.0), (0.5, -30.0), (0.9, -30.0)]);
        let domain = BoxDomain::unit(1);
        let samples = sample_pareto_fronts(
            &[m1],
            Some(&[c]),
            &domain,
            &small_config(1),
            &mut RngStream::new(3),
        )
        .unwrap();
        assert!(samples[0].degenerate);
        assert_eq!(samples[0].maxima.len(), 2); // K + L maxima
    }

    #[test]
    fn constrained_sample_carries_constraint_maxima() {
        let m1 = toy_model(&[(0.2, 0.5), (0.8, -0.3)]);
        let c = toy_model(&[(0.1, 0.5), (0.5, 0.8), (0.9, 0.2)]);
        let domain = BoxDomain::unit(1);
        let samples = sample_pareto_fronts(
            &[m1],
            Some(&[c]),
            &domain,
            &small_config(2),
            &mut RngStream::new(4),
        )
        .unwrap();
        for s in &samples {
            assert!(!s.degenerate);
            assert_eq!(s.maxima.len(), 2);
            assert!(s.maxima[1].is_finite());
        }
    }
}
