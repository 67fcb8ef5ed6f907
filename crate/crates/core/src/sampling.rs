//! Random-Fourier-feature draws from GP posteriors.
//!
//! Each sampled function is the finite parametrization phi(x)^T theta with
//! theta drawn from its Gaussian posterior given the data. Multi- and
//! continuous-fidelity models sample only the highest-fidelity function;
//! lower-fidelity observations enter the weight posterior through the
//! per-observation fidelity correlation with the top fidelity.

use std::sync::Arc;

use crate::dataset::Fidelity;
use crate::error::{CoreError, Result};
use crate::math::{RngStream, SpdMatrix};
use crate::surrogate::{FittedSurrogate, GpHyperParams, KernelParams};

/// Default feature count; trades kernel-approximation error against the cost
/// of the weight-posterior factorization.
pub const DEFAULT_N_FEATURES: usize = 500;

/// Finite cosine feature map approximating a stationary kernel.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    n_features: usize,
    dim: usize,
    /// n_features x dim, row-major.
    frequencies: Vec<f64>,
    offsets: Vec<f64>,
    amplitude: f64,
    weighting: FidelityWeighting,
}

/// How a training observation's fidelity scales its feature vector in the
/// highest-fidelity weight regression.
#[derive(Debug, Clone)]
enum FidelityWeighting {
    None,
    /// Prior-variance ratio k_m(0)/k_M(0) of the recursive kernel.
    MultiFidelity { base_var: f64, err_var: f64, levels: usize },
    /// Fidelity-kernel correlation with z = 1.
    ContinuousFidelity { bandwidth: f64 },
}

impl FeatureMap {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Feature vector at an input point (highest-fidelity features).
    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.n_features)
            .map(|i| {
                let row = &self.frequencies[i * self.dim..(i + 1) * self.dim];
                let arg: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
                self.amplitude * (arg + self.offsets[i]).cos()
            })
            .collect()
    }

    /// Scale applied to an observation's features given its fidelity.
    fn observation_weight(&self, f: Fidelity) -> f64 {
        match (&self.weighting, f) {
            (FidelityWeighting::None, _) => 1.0,
            (
                FidelityWeighting::MultiFidelity {
                    base_var,
                    err_var,
                    levels,
                },
                Fidelity::Level(m),
            ) => {
                let top = base_var + (*levels as f64 - 1.0) * err_var;
                (base_var + (m as f64 - 1.0) * err_var) / top
            }
            (FidelityWeighting::ContinuousFidelity { bandwidth }, Fidelity::Z(z)) => {
                let r = (z - 1.0) / bandwidth;
                (-0.5 * r * r).exp()
            }
            _ => panic!("fidelity kind does not match feature map"),
        }
    }
}

/// Draw frequencies from the spectral density of the model's
/// highest-fidelity kernel; offsets uniform on [0, 2 pi). Deterministic per
/// seed.
pub fn build_feature_map(
    params: &GpHyperParams,
    n_features: usize,
    rng: &mut RngStream,
) -> Result<FeatureMap> {
    if n_features == 0 {
        return Err(CoreError::InvalidArgument(
            "build_feature_map: need at least one feature",
        ));
    }
    let (dim, total_var, weighting) = match &params.kernel {
        KernelParams::Single(se) => (se.lengthscales.len(), se.variance, FidelityWeighting::None),
        KernelParams::MultiFidelity(mf) => (
            mf.base.lengthscales.len(),
            mf.base.variance + (mf.levels as f64 - 1.0) * mf.error.variance,
            FidelityWeighting::MultiFidelity {
                base_var: mf.base.variance,
                err_var: mf.error.variance,
                levels: mf.levels,
            },
        ),
        KernelParams::ContinuousFidelity(cf) => (
            cf.input.lengthscales.len(),
            cf.input.variance,
            FidelityWeighting::ContinuousFidelity {
                bandwidth: cf.bandwidth,
            },
        ),
    };
    let mut frequencies = Vec::with_capacity(n_features * dim);
    for _ in 0..n_features {
        let scales: &[f64] = match &params.kernel {
            KernelParams::Single(se) => &se.lengthscales,
            KernelParams::ContinuousFidelity(cf) => &cf.input.lengthscales,
            KernelParams::MultiFidelity(mf) => {
                // the top-fidelity kernel is a two-component SE mixture;
                // pick the component proportionally to its variance share
                let top = mf.base.variance + (mf.levels as f64 - 1.0) * mf.error.variance;
                if rng.uniform() * top < mf.base.variance {
                    &mf.base.lengthscales
                } else {
                    &mf.error.lengthscales
                }
            }
        };
        for l in scales {
            frequencies.push(rng.normal() / l);
        }
    }
    let offsets = (0..n_features)
        .map(|_| rng.uniform_in(0.0, 2.0 * std::f64::consts::PI))
        .collect();
    Ok(FeatureMap {
        n_features,
        dim,
        frequencies,
        offsets,
        amplitude: (2.0 * total_var / n_features as f64).sqrt(),
        weighting,
    })
}

/// A posterior function draw: deterministic once (map, theta) are fixed.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub map: Arc<FeatureMap>,
    pub theta: Vec<f64>,
    pub objective_index: usize,
}

impl SampledFunction {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        evaluate_sample(self, x)
    }
}

/// phi(x)^T theta.
pub fn evaluate_sample(f: &SampledFunction, x: &[f64]) -> f64 {
    f.map
        .features(x)
        .iter()
        .zip(&f.theta)
        .map(|(a, b)| a * b)
        .sum()
}

/// Draw theta from N(A^-1 Phi^T Y, sigma^2 A^-1) with A = Phi^T Phi +
/// sigma^2 I. With no data this reduces to the prior theta ~ N(0, I).
///
/// When there are fewer observations than features the draw goes through the
/// equivalent n x n system (Matheron's update), which is much cheaper and has
/// exactly the stated distribution.
pub fn sample_posterior_function(
    model: &FittedSurrogate,
    map: &Arc<FeatureMap>,
    objective_index: usize,
    rng: &mut RngStream,
) -> Result<SampledFunction> {
    let n = model.len();
    let f = map.n_features();
    let theta0 = rng.normal_vec(f);
    if n == 0 {
        return Ok(SampledFunction {
            map: Arc::clone(map),
            theta: theta0,
            objective_index,
        });
    }
    let sigma2 = model.params().noise;
    let sigma = sigma2.sqrt();
    // weighted design matrix rows
    let phi: Vec<Vec<f64>> = model
        .train_x()
        .iter()
        .zip(model.train_fid())
        .map(|(x, fid)| {
            let w = map.observation_weight(*fid);
            map.features(x).into_iter().map(|v| v * w).collect()
        })
        .collect();
    let y = model.train_y();

    let theta = if n < f {
        // theta = theta0 + Phi^T (Phi Phi^T + sigma^2 I)^-1 (y - Phi theta0 - eps)
        let noise: Vec<f64> = (0..n).map(|_| sigma * rng.normal()).collect();
        let residual: Vec<f64> = (0..n)
            .map(|i| {
                let fit: f64 = phi[i].iter().zip(&theta0).map(|(a, b)| a * b).sum();
                y[i] - fit - noise[i]
            })
            .collect();
        let gram = SpdMatrix::from_fn(n, |i, j| {
            let mut v: f64 = phi[i].iter().zip(&phi[j]).map(|(a, b)| a * b).sum();
            if i == j {
                v += sigma2;
            }
            v
        });
        let v = gram.cholesky()?.solve(&residual);
        let mut theta = theta0;
        for (i, vi) in v.iter().enumerate() {
            for (t, p) in theta.iter_mut().zip(&phi[i]) {
                *t += p * vi;
            }
        }
        theta
    } else {
        // direct factorization of A = Phi^T Phi + sigma^2 I
        let a = SpdMatrix::from_fn(f, |p, q| {
            let mut v: f64 = (0..n).map(|i| phi[i][p] * phi[i][q]).sum();
            if p == q {
                v += sigma2;
            }
            v
        });
        let chol = a.cholesky()?;
        let phit_y: Vec<f64> = (0..f)
            .map(|p| (0..n).map(|i| phi[i][p] * y[i]).sum())
            .collect();
        let mean = chol.solve(&phit_y);
        // covariance sigma^2 A^-1: draw mean + sigma L^-T u
        let mut u = theta0;
        chol.solve_lower_transpose_in_place(&mut u);
        mean.iter().zip(&u).map(|(m, ui)| m + sigma * ui).collect()
    };

    Ok(SampledFunction {
        map: Arc::clone(map),
        theta,
        objective_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::surrogate::{CfParams, SeParams};

    fn se_model(xs: Vec<Vec<f64>>, ys: Vec<f64>, noise: f64) -> FittedSurrogate {
        let n = xs.len();
        FittedSurrogate::with_params(
            BoxDomain::unit(1),
            xs,
            vec![Fidelity::None; n],
            ys,
            GpHyperParams::new(
                KernelParams::Single(SeParams::isotropic(1, 0.3, 1.0)),
                noise,
            ),
        )
        .unwrap()
    }

    #[test]
    fn map_is_deterministic_per_seed() {
        let params = GpHyperParams::new(
            KernelParams::Single(SeParams::isotropic(2, 0.5, 1.0)),
            1e-8,
        );
        let a = build_feature_map(&params, 64, &mut RngStream::new(4)).unwrap();
        let b = build_feature_map(&params, 64, &mut RngStream::new(4)).unwrap();
        assert_eq!(a.frequencies, b.frequencies);
        assert_eq!(a.offsets, b.offsets);
    }

    #[test]
    fn long_lengthscale_gives_small_frequencies() {
        let params = GpHyperParams::new(
            KernelParams::Single(SeParams::isotropic(1, 1e6, 1.0)),
            1e-8,
        );
        let map = build_feature_map(&params, 128, &mut RngStream::new(1)).unwrap();
        assert!(map.frequencies.iter().all(|w| w.abs() < 1e-3));
        // features are then nearly constant in x
        let f0 = map.features(&[0.0]);
        let f1 = map.features(&[1.0]);
        let max_diff = f0
            .iter()
            .zip(&f1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-3);
    }

    #[test]
    fn feature_inner_product_approximates_kernel() {
        // Monte-Carlo check of the kernel approximation. With the
        // random-offset construction the per-pair estimator noise is
        // ~ sqrt(3/(2F)), so the worst error over 100 pairs sits near 0.1 at
        // F = 1024 and shrinks with F.
        let params = GpHyperParams::new(
            KernelParams::Single(SeParams::isotropic(2, 0.4, 1.0)),
            1e-8,
        );
        let max_err = |n_features: usize| -> f64 {
            let map = build_feature_map(&params, n_features, &mut RngStream::new(9)).unwrap();
            let mut rng = RngStream::new(10);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let x = vec![rng.uniform(), rng.uniform()];
                let x2 = vec![rng.uniform(), rng.uniform()];
                let approx: f64 = map
                    .features(&x)
                    .iter()
                    .zip(map.features(&x2))
                    .map(|(a, b)| a * b)
                    .sum();
                let exact = params.kernel.eval(&x, Fidelity::None, &x2, Fidelity::None);
                worst = worst.max((approx - exact).abs());
            }
            worst
        };
        let coarse = max_err(1024);
        assert!(coarse < 0.1, "max kernel approximation error {coarse}");
        let fine = max_err(8192);
        assert!(fine < 0.05, "max kernel approximation error {fine}");
        assert!(fine < coarse);
    }

    #[test]
    fn prior_theta_is_standard_normal() {
        let model = se_model(vec![], vec![], 1e-8);
        let params = model.params().clone();
        let map = Arc::new(build_feature_map(&params, 32, &mut RngStream::new(2)).unwrap());
        let mut rng = RngStream::new(3);
        let draws = 10_000;
        let mut sum = vec![0.0; 32];
        for _ in 0..draws {
            let s = sample_posterior_function(&model, &map, 0, &mut rng).unwrap();
            for (acc, t) in sum.iter_mut().zip(&s.theta) {
                *acc += t;
            }
        }
        let se = 1.0 / (draws as f64).sqrt();
        for acc in sum {
            let mean = acc / draws as f64;
            assert!(mean.abs() < 3.0 * se + 0.01, "prior mean {mean}");
        }
    }

    #[test]
    fn noise_free_samples_interpolate_training_data() {
        let xs = vec![vec![0.25], vec![0.5], vec![0.75]];
        let ys = vec![0.4, -0.2, 0.6];
        let model = se_model(xs.clone(), ys.clone(), 1e-8);
        let map = Arc::new(
            build_feature_map(model.params(), 2048, &mut RngStream::new(5)).unwrap(),
        );
        let mut rng = RngStream::new(6);
        for _ in 0..5 {
            let s = sample_posterior_function(&model, &map, 0, &mut rng).unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                assert!((s.evaluate(x) - y).abs() < 0.05);
            }
        }
    }

    #[test]
    fn sample_moments_match_gp_posterior() {
        let xs = vec![vec![0.2], vec![0.6], vec![0.9]];
        let ys = vec![0.5, -0.3, 0.2];
        let model = se_model(xs, ys, 1e-4);
        let map = Arc::new(
            build_feature_map(model.params(), 4096, &mut RngStream::new(11)).unwrap(),
        );
        let mut rng = RngStream::new(12);
        let n_draws = 1000;
        let queries = [[0.35], [0.75]];
        let mut values = vec![Vec::with_capacity(n_draws); queries.len()];
        for _ in 0..n_draws {
            let s = sample_posterior_function(&model, &map, 0, &mut rng).unwrap();
            for (q, store) in queries.iter().zip(values.iter_mut()) {
                store.push(s.evaluate(q));
            }
        }
        for (q, store) in queries.iter().zip(&values) {
            let (mu, var) = model.posterior(q, Fidelity::None).unwrap();
            let mean = store.iter().sum::<f64>() / n_draws as f64;
            let sample_var =
                store.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n_draws - 1) as f64;
            let se_mean = (var / n_draws as f64).sqrt();
            let se_var = var * (2.0 / (n_draws as f64 - 1.0)).sqrt();
            assert!(
                (mean - mu).abs() < 3.0 * se_mean + 0.02,
                "mean {mean} vs {mu}"
            );
            assert!(
                (sample_var - var).abs() < 3.0 * se_var + 0.02,
                "var {sample_var} vs {var}"
            );
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let model = se_model(vec![vec![0.4]], vec![1.0], 1e-6);
        let map = Arc::new(
            build_feature_map(model.params(), 256, &mut RngStream::new(7)).unwrap(),
        );
        let s = sample_posterior_function(&model, &map, 0, &mut RngStream::new(8)).unwrap();
        let a = s.evaluate(&[0.3]);
        let b = s.evaluate(&[0.3]);
        assert_eq!(a.to_bits(), b.to_bits());
        // theta = 0 gives the zero function; theta = e_1 gives the first feature
        let zero = SampledFunction {
            map: Arc::clone(&map),
            theta: vec![0.0; 256],
            objective_index: 0,
        };
        assert_eq!(zero.evaluate(&[0.5]), 0.0);
        let mut e1 = vec![0.0; 256];
        e1[0] = 1.0;
        let first = SampledFunction {
            map: Arc::clone(&map),
            theta: e1,
            objective_index: 0,
        };
        assert_eq!(first.evaluate(&[0.5]), map.features(&[0.5])[0]);
    }

    #[test]
    fn sampled_covariance_matches_posterior_covariance() {
        let xs = vec![vec![0.3], vec![0.7]];
        let ys = vec![0.2, -0.4];
        let model = se_model(xs, ys, 1e-4);
        let map = Arc::new(
            build_feature_map(model.params(), 4096, &mut RngStream::new(21)).unwrap(),
        );
        let mut rng = RngStream::new(22);
        let n_draws = 2000;
        let (qa, qb) = ([0.45], [0.55]);
        let mut va = Vec::with_capacity(n_draws);
        let mut vb = Vec::with_capacity(n_draws);
        for _ in 0..n_draws {
            let s = sample_posterior_function(&model, &map, 0, &mut rng).unwrap();
            va.push(s.evaluate(&qa));
            vb.push(s.evaluate(&qb));
        }
        let ma = va.iter().sum::<f64>() / n_draws as f64;
        let mb = vb.iter().sum::<f64>() / n_draws as f64;
        let cov_hat = va
            .iter()
            .zip(&vb)
            .map(|(a, b)| (a - ma) * (b - mb))
            .sum::<f64>()
            / (n_draws - 1) as f64;
        // posterior covariance between the two query points from the exact GP
        let kernel = model.kernel();
        let k_ab = kernel.eval(&qa, Fidelity::None, &qb, Fidelity::None);
        let gram = SpdMatrix::from_fn(2, |i, j| {
            let pts = [[0.3], [0.7]];
            let mut v = kernel.eval(&pts[i], Fidelity::None, &pts[j], Fidelity::None);
            if i == j {
                v += model.params().noise;
            }
            v
        });
        let chol = gram.cholesky().unwrap();
        let ka: Vec<f64> = [[0.3], [0.7]]
            .iter()
            .map(|p| kernel.eval(&qa, Fidelity::None, p.as_slice(), Fidelity::None))
            .collect();
        let kb: Vec<f64> = [[0.3], [0.7]]
            .iter()
            .map(|p| kernel.eval(&qb, Fidelity::None, p.as_slice(), Fidelity::None))
            .collect();
        let wa = chol.solve_lower(&ka);
        let wb = chol.solve_lower(&kb);
        let cov = k_ab - wa.iter().zip(&wb).map(|(a, b)| a * b).sum::<f64>();
        let (_, var_a) = model.posterior(&qa, Fidelity::None).unwrap();
        let (_, var_b) = model.posterior(&qb, Fidelity::None).unwrap();
        let se = (var_a * var_b / n_draws as f64).sqrt() + (2.0 / n_draws as f64).sqrt() * cov.abs();
        assert!(
            (cov_hat - cov).abs() < 3.0 * se + 0.02,
            "cov {cov_hat} vs {cov}"
        );
    }

    #[test]
    fn sample_paths_are_smooth() {
        let model = se_model(vec![vec![0.5]], vec![0.3], 1e-6);
        let map = Arc::new(
            build_feature_map(model.params(), 512, &mut RngStream::new(31)).unwrap(),
        );
        let s = sample_posterior_function(&model, &map, 0, &mut RngStream::new(32)).unwrap();
        let h = 1e-3;
        for i in 1..99 {
            let x = i as f64 / 100.0;
            let second =
                (s.evaluate(&[x + h]) - 2.0 * s.evaluate(&[x]) + s.evaluate(&[x - h])) / (h * h);
            assert!(second.abs() < 1e4, "second difference blow-up at {x}");
        }
    }

    #[test]
    fn cf_model_lower_fidelity_data_informs_top_sample() {
        // dense low-fidelity data with high fidelity correlation pins the
        // sampled top-fidelity function near the data
        let n = 12;
        let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (4.0 * x[0]).sin()).collect();
        let model = FittedSurrogate::with_params(
            BoxDomain::unit(1),
            xs.clone(),
            vec![Fidelity::Z(0.9); n],
            ys.clone(),
            GpHyperParams::new(
                KernelParams::ContinuousFidelity(CfParams {
                    input: SeParams::isotropic(1, 0.35, 1.0),
                    bandwidth: 2.0,
                }),
                1e-6,
            ),
        )
        .unwrap();
        let map = Arc::new(
            build_feature_map(model.params(), 1024, &mut RngStream::new(41)).unwrap(),
        );
        let mut rng = RngStream::new(42);
        let mut rms = 0.0;
        let draws = 20;
        for _ in 0..draws {
            let s = sample_posterior_function(&model, &map, 0, &mut rng).unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                let e = s.evaluate(x) - y;
                rms += e * e;
            }
        }
        rms = (rms / (draws * n) as f64).sqrt();
        // an uninformed prior would have rms ~ 1; correlated data shrinks it
        assert!(rms < 0.5, "rms {rms}");
    }
}
