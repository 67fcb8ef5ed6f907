//! Synthetic benchmark suite with fidelity cost models, a constrained toy
//! problem, and reference-front generation.
//!
//! All benchmarks are in maximization form. The highest fidelity (z = 1 or
//! the top discrete level) evaluates the canonical function exactly.

use std::sync::Arc;

use crate::acquisition::CostModel;
use crate::dataset::{FidelityMode, FidelityVector};
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::nsga2::{nsga2, EvolutionConfig};
use crate::pareto::{pareto_front, ParetoFront};

/// A benchmark problem definition.
#[derive(Clone)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub domain: BoxDomain,
    pub k: usize,
    pub l: usize,
    pub fidelity_mode: FidelityMode,
    /// Discrete benchmarks: number of levels per objective.
    pub levels: Vec<usize>,
    pub cost: CostModel,
    /// Evaluate objectives (and constraints) at the given fidelity.
    #[allow(clippy::type_complexity)]
    pub eval: Arc<dyn Fn(&[f64], &FidelityVector) -> Vec<f64> + Send + Sync>,
}

impl std::fmt::Debug for BenchmarkSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BenchmarkSpec")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("l", &self.l)
            .field("fidelity_mode", &self.fidelity_mode)
            .finish()
    }
}

impl BenchmarkSpec {
    /// Highest-fidelity objective values at x.
    pub fn evaluate_highest(&self, x: &[f64]) -> Vec<f64> {
        let fid = self.highest_fidelity();
        (self.eval)(x, &fid)[..self.k].to_vec()
    }

    pub fn highest_fidelity(&self) -> FidelityVector {
        match self.fidelity_mode {
            FidelityMode::None => FidelityVector::None,
            FidelityMode::Discrete => FidelityVector::Discrete(self.levels.clone()),
            FidelityMode::Continuous => FidelityVector::Continuous(vec![1.0; self.k]),
        }
    }

    pub fn by_name(name: &str) -> Option<BenchmarkSpec> {
        match name {
            "branin-currin" => Some(branin_currin_spec()),
            "ackley-rosen-sphere" | "ars" => Some(ackley_rosen_sphere_spec()),
            "dtlz1" => Some(dtlz1_spec()),
            "qv" => Some(qv_spec()),
            "constrained-toy" => Some(constrained_toy_spec()),
            _ => None,
        }
    }

    pub fn all_names() -> &'static [&'static str] {
        &[
            "branin-currin",
            "ackley-rosen-sphere",
            "dtlz1",
            "qv",
            "constrained-toy",
        ]
    }
}

/// Branin (fidelity-perturbed coefficients) on its canonical box rescaled to
/// [0,1]^2. Cost 0.05 + z^6.5.
fn branin_fidelity(u: &[f64], z: f64) -> f64 {
    let x1 = 15.0 * u[0] - 5.0;
    let x2 = 15.0 * u[1];
    let pi = std::f64::consts::PI;
    let a = 1.0;
    let b = 5.1 / (4.0 * pi * pi) - 0.01 * (1.0 - z);
    let c = 5.0 / pi - 0.1 * (1.0 - z);
    let r = 6.0;
    let s = 10.0;
    let t = 1.0 / (8.0 * pi) + 0.05 * (1.0 - z);
    -(a * (x2 - b * x1 * x1 + c * x1 - r).powi(2) + s * (1.0 - t) * x1.cos() + s)
}

/// Currin exponential with fidelity-damped exponential factor on [0,1]^2.
/// Cost 0.1 + z^2. The x2 = 0 boundary takes the exp(-1/(2 x2)) -> 0 limit.
fn currin_fidelity(u: &[f64], z: f64) -> f64 {
    let x1 = u[0];
    let x2 = u[1];
    let damp = if x2 <= 0.0 {
        0.0
    } else {
        (-1.0 / (2.0 * x2)).exp()
    };
    let factor = 1.0 - 0.1 * (1.0 - z) * damp;
    let ratio = (2300.0 * x1.powi(3) + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0)
        / (100.0 * x1.powi(3) + 500.0 * x1 * x1 + 4.0 * x1 + 20.0);
    -(factor * ratio)
}

/// Branin-Currin: K = 2 over [0,1]^2, continuous fidelities.
pub fn branin_currin(x: &[f64], z: &[f64]) -> Vec<f64> {
    vec![branin_fidelity(x, z[0]), currin_fidelity(x, z[1])]
}

pub fn branin_currin_spec() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "branin-currin",
        domain: BoxDomain::unit(2),
        k: 2,
        l: 0,
        fidelity_mode: FidelityMode::Continuous,
        levels: vec![],
        cost: CostModel::Continuous {
            per_objective: vec![
                Arc::new(|_: &[f64], z: f64| 0.05 + z.powf(6.5)),
                Arc::new(|_: &[f64], z: f64| 0.1 + z * z),
            ],
        },
        eval: Arc::new(|x, fid| match fid {
            FidelityVector::Continuous(z) => branin_currin(x, z),
            _ => panic!("branin-currin expects continuous fidelities"),
        }),
    }
}

/// Ackley, Rosenbrock, Sphere: K = 3 over [-2,2]^5, continuous fidelities,
/// all with cost 0.05 + z^6.5.
pub fn ackley_rosen_sphere(x: &[f64], z: &[f64]) -> Vec<f64> {
    let d = x.len() as f64;
    let ackley = {
        let rms = (x.iter().map(|v| v * v).sum::<f64>() / d).sqrt();
        let cos_mean = x
            .iter()
            .map(|v| (2.0 * std::f64::consts::PI * v).cos())
            .sum::<f64>()
            / d;
        -(-20.0 * (-0.2 * rms).exp() - cos_mean.exp() + std::f64::consts::E + 20.0)
            - 0.01 * (1.0 - z[0])
    };
    let rosen = -(0..x.len() - 1)
        .map(|i| {
            let head = x[i + 1] - x[i] * x[i] + 0.01 * (1.0 - z[1]);
            100.0 * head * head + (1.0 - x[i]) * (1.0 - x[i])
        })
        .sum::<f64>();
    let sphere = -x.iter().map(|v| v * v).sum::<f64>() - 0.01 * (1.0 - z[2]);
    vec![ackley, rosen, sphere]
}

pub fn ackley_rosen_sphere_spec() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "ackley-rosen-sphere",
        domain: BoxDomain::new(vec![-2.0; 5], vec![2.0; 5]).unwrap(),
        k: 3,
        l: 0,
        fidelity_mode: FidelityMode::Continuous,
        levels: vec![],
        cost: CostModel::Continuous {
            per_objective: vec![Arc::new(|_: &[f64], z: f64| 0.05 + z.powf(6.5)); 3],
        },
        eval: Arc::new(|x, fid| match fid {
            FidelityVector::Continuous(z) => ackley_rosen_sphere(x, z),
            _ => panic!("ackley-rosen-sphere expects continuous fidelities"),
        }),
    }
}

/// Fidelity values of the three DTLZ1 levels.
pub const DTLZ1_Z: [f64; 3] = [0.2, 0.6, 1.0];

/// DTLZ1 variant: K = 6 over [0,1]^5, three discrete fidelities per
/// objective with costs {0.01, 0.1, 1}; g_j = f_j - e(x, z),
/// e = sum_i a cos(10 pi a x_i + 0.5 pi a + pi) with a = 1 - z.
pub fn dtlz1_mf(x: &[f64], level: usize) -> Vec<f64> {
    let z = DTLZ1_Z[level - 1];
    let d = x.len();
    let r = 100.0
        * (d as f64
            + x.iter()
                .map(|v| {
                    let c = v - 0.5;
                    c * c - (10.0 * std::f64::consts::PI * c).cos()
                })
                .sum::<f64>());
    let half = 0.5 * (1.0 + r);
    let mut f = Vec::with_capacity(6);
    f.push(-half * x.iter().product::<f64>());
    for j in 2..=5 {
        let lead: f64 = x[..6 - j].iter().product();
        f.push(-half * (1.0 - x[6 - j]) * lead);
    }
    f.push(-half * (1.0 - x[0]));
    let a = 1.0 - z;
    let err: f64 = x
        .iter()
        .map(|v| {
            a * (10.0 * std::f64::consts::PI * a * v
                + 0.5 * std::f64::consts::PI * a
                + std::f64::consts::PI)
                .cos()
        })
        .sum();
    f.iter().map(|fj| fj - err).collect()
}

pub fn dtlz1_spec() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "dtlz1",
        domain: BoxDomain::unit(5),
        k: 6,
        l: 0,
        fidelity_mode: FidelityMode::Discrete,
        levels: vec![3; 6],
        cost: CostModel::Discrete {
            per_level: vec![vec![0.01, 0.1, 1.0]; 6],
        },
        eval: Arc::new(|x, fid| match fid {
            FidelityVector::Discrete(m) => {
                // each objective may sit at its own level
                (0..6).map(|j| dtlz1_mf(x, m[j])[j]).collect()
            }
            _ => panic!("dtlz1 expects discrete fidelities"),
        }),
    }
}

/// Mean guard for the fourth root: off the canonical domain the mean inside
/// (.)^(1/4) can go negative; it is clamped at 1e-12.
fn fourth_root_of_mean(sum: f64, d: f64) -> f64 {
    (sum / d).max(1e-12).powf(0.25)
}

/// QV variant: K = 2 over [-5,5]^8. f1 has a single fidelity; f2 has two
/// (low weights the squared term by alpha = [0.9, 1.1, ...]) with costs
/// {0.1, 1}.
pub fn qv_mf(x: &[f64], f2_level: usize) -> Vec<f64> {
    let d = x.len() as f64;
    let pi = std::f64::consts::PI;
    let s1: f64 = x.iter().map(|v| v * v - 20.0 * pi * v + 10.0).sum();
    let f1 = -fourth_root_of_mean(s1, d);
    let alpha = [0.9, 1.1, 0.9, 1.1, 0.9, 1.1, 0.9, 1.1];
    let s2: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = v - 1.5;
            let w = if f2_level == 1 { alpha[i] } else { 1.0 };
            w * c * c - 20.0 * pi * c + 10.0
        })
        .sum();
    let f2 = -fourth_root_of_mean(s2, d);
    vec![f1, f2]
}

pub fn qv_spec() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "qv",
        domain: BoxDomain::new(vec![-5.0; 8], vec![5.0; 8]).unwrap(),
        k: 2,
        l: 0,
        fidelity_mode: FidelityMode::Discrete,
        levels: vec![1, 2],
        cost: CostModel::Discrete {
            per_level: vec![vec![1.0], vec![0.1, 1.0]],
        },
        eval: Arc::new(|x, fid| match fid {
            FidelityVector::Discrete(m) => {
                let vals = qv_mf(x, m[1]);
                vec![vals[0], vals[1]]
            }
            _ => panic!("qv expects discrete fidelities"),
        }),
    }
}

/// Constrained toy problem: Branin-Currin objectives at the highest fidelity
/// with C1 = 0.75 - ||x - (0.5, 0.5)||^2 and C2 = x1 + x2 - 0.4; feasibility
/// is both >= 0.
pub fn constrained_toy(x: &[f64]) -> Vec<f64> {
    let obj = branin_currin(x, &[1.0, 1.0]);
    let c1 = 0.75 - ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2));
    let c2 = x[0] + x[1] - 0.4;
    vec![obj[0], obj[1], c1, c2]
}

pub fn constrained_toy_spec() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "constrained-toy",
        domain: BoxDomain::unit(2),
        k: 2,
        l: 2,
        fidelity_mode: FidelityMode::None,
        levels: vec![],
        cost: CostModel::Uniform { k: 2 },
        eval: Arc::new(|x, _fid| constrained_toy(x)),
    }
}

/// Default seed and budget for cached reference fronts.
pub const REFERENCE_SEED: u64 = 2024;
pub const REFERENCE_EVALUATIONS: usize = 100_000;

/// Reference front for R2: a long fixed-seed NSGA-II run over the true
/// highest-fidelity functions (restricted to the feasible region when the
/// benchmark is constrained).
pub fn reference_front(spec: &BenchmarkSpec, evaluations: usize, seed: u64) -> Result<ParetoFront> {
    let mut config = EvolutionConfig::new(seed);
    config.max_evaluations = evaluations;
    let eval = Arc::clone(&spec.eval);
    let fid = spec.highest_fidelity();
    let k = spec.k;
    let objectives = move |x: &[f64]| -> Vec<f64> { eval(x, &fid)[..k].to_vec() };
    let archive = if spec.l > 0 {
        let eval_c = Arc::clone(&spec.eval);
        let fid_c = spec.highest_fidelity();
        let l_range = k..k + spec.l;
        let constraints =
            move |x: &[f64]| -> Vec<f64> { eval_c(x, &fid_c)[l_range.clone()].to_vec() };
        nsga2(&objectives, Some(&constraints), &spec.domain, &config)?
    } else {
        nsga2(&objectives, None, &spec.domain, &config)?
    };
    pareto_front(&archive.objectives)
}

/// Content-addressed cache filename for a benchmark's reference front.
pub fn reference_cache_name(benchmark: &str, seed: u64) -> String {
    format!("{benchmark}_ref_{seed}.csv")
}

/// PHV reference point derived from a front: componentwise minimum minus 1%
/// of each objective's range (so every front point dominates it).
pub fn phv_reference_from(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = points
        .first()
        .ok_or(CoreError::InvalidArgument("phv reference from empty set"))?
        .len();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for p in points {
        for j in 0..k {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    Ok((0..k)
        .map(|j| lo[j] - 0.01 * (hi[j] - lo[j]).max(1e-9))
        .collect())
}
