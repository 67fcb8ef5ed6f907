//! Initial design and acquisition maximization.

use crate::dataset::{Dataset, FidelityMode, FidelityVector, Observation};
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::math::RngStream;
use crate::optimizer::problem::Problem;

/// Uniform-random initial design. In fidelity modes the points are spread
/// across fidelities: discrete levels cycle so per-level counts differ by at
/// most one; continuous mode alternates the highest fidelity with a uniform
/// draw.
pub fn initial_design(problem: &Problem, n0: usize, rng: &mut RngStream) -> Result<Dataset> {
    if n0 < 2 {
        return Err(CoreError::InvalidArgument("initial_design: need n0 >= 2"));
    }
    let mut data = Dataset::new(problem.k, problem.l, problem.fidelity_mode);
    for i in 0..n0 {
        let x = problem.domain.sample(rng);
        let fidelity = match problem.fidelity_mode {
            FidelityMode::None => FidelityVector::None,
            FidelityMode::Discrete => FidelityVector::Discrete(
                problem.levels.iter().map(|m| 1 + i % m).collect(),
            ),
            FidelityMode::Continuous => {
                if i % 2 == 0 {
                    FidelityVector::Continuous(vec![1.0; problem.k])
                } else {
                    FidelityVector::Continuous((0..problem.k).map(|_| rng.uniform()).collect())
                }
            }
        };
        let y = (problem.eval)(&x, &fidelity);
        let cost = problem.cost.normalized_total(&x, &fidelity);
        data.push(Observation {
            x,
            fidelity,
            y,
            cost,
        })?;
    }
    Ok(data)
}

/// Scored candidate returned by an acquisition closure: the best fidelity
/// vector for that input, its score, and the posterior-mean constraint
/// violation (zero when unconstrained or all means nonnegative).
#[derive(Debug, Clone)]
pub struct CandidateScore {
    pub score: f64,
    pub fidelity: FidelityVector,
    pub violation: f64,
}

/// Result of an acquisition search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub fidelity: FidelityVector,
    pub score: f64,
    /// True when no candidate in the sampled pool satisfied the
    /// posterior-mean feasibility filter and the least-violating candidate
    /// was returned instead.
    pub feasibility_fallback: bool,
}

#[derive(Debug, Clone)]
struct Scored {
    x: Vec<f64>,
    score: CandidateScore,
}

/// Feasible-first comparison: any zero-violation candidate beats any
/// violating one; ties break on score (higher better) then violation
/// (lower better).
fn better(a: &Scored, b: &Scored) -> bool {
    let fa = a.score.violation <= 0.0;
    let fb = b.score.violation <= 0.0;
    match (fa, fb) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.score.score > b.score.score,
        (false, false) => a.score.violation < b.score.violation,
    }
}

const REFINE_STEPS: usize = 20;
const STEP_START: f64 = 0.1;
const STEP_END: f64 = 0.01;

/// Maximize an acquisition closure over the domain: `candidates` uniform
/// draws followed by coordinate-descent refinements (shrinking step
/// 0.1 -> 0.01 of each dimension's range) from the best 10 candidates.
/// The returned score is >= every scored candidate's score under the
/// feasible-first ordering.
pub fn optimize_acquisition(
    score_fn: &dyn Fn(&[f64]) -> Result<CandidateScore>,
    domain: &BoxDomain,
    candidates: usize,
    refinements: usize,
    rng: &mut RngStream,
) -> Result<SearchOutcome> {
    let mut pool: Vec<Scored> = Vec::with_capacity(candidates);
    for _ in 0..candidates.max(1) {
        let x = domain.sample(rng);
        let score = score_fn(&x)?;
        pool.push(Scored { x, score });
    }
    pool.sort_by(|a, b| {
        if better(a, b) {
            std::cmp::Ordering::Less
        } else if better(b, a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let mut best = pool[0].clone();

    let starts = refinements.min(pool.len());
    for start in pool.into_iter().take(starts) {
        let mut current = start;
        let shrink = (STEP_END / STEP_START).powf(1.0 / (REFINE_STEPS.max(2) - 1) as f64);
        let mut step = STEP_START;
        for _ in 0..REFINE_STEPS {
            for dim in 0..domain.dim() {
                for dir in [1.0, -1.0] {
                    let mut x = current.x.clone();
                    x[dim] += dir * step * domain.range(dim);
                    domain.clip(&mut x);
                    let score = score_fn(&x)?;
                    let cand = Scored { x, score };
                    if better(&cand, &current) {
                        current = cand;
                    }
                }
            }
            step *= shrink;
        }
        if better(&current, &best) {
            best = current;
        }
    }

    Ok(SearchOutcome {
        x: best.x,
        fidelity: best.score.fidelity,
        feasibility_fallback: best.score.violation > 0.0,
        score: best.score.score,
    })
}
