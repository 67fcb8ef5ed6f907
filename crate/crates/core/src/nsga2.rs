//! NSGA-II solver for the cheap multi-objective problems posed over sampled
//! surrogate functions, with Deb's feasibility rule for constrained variants.
//!
//! The solver keeps an external archive of the non-dominated evaluated points
//! (feasible ones when constraints are present), so archive quality is
//! monotone in the evaluation budget.

use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::math::RngStream;
use crate::pareto::{dominates, pareto_front_with_inputs, ParetoFront};

/// Solver configuration. The evaluation budget counts every point evaluated,
/// including the initial population.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub population: usize,
    pub max_evaluations: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; defaults to 1/d.
    pub mutation_prob: Option<f64>,
    pub seed: u64,
}

impl EvolutionConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            population: 100,
            max_evaluations: 1500,
            crossover_prob: 0.9,
            mutation_prob: None,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 4 || self.population % 2 != 0 {
            return Err(CoreError::InvalidArgument(
                "EvolutionConfig: population must be even and >= 4",
            ));
        }
        if self.max_evaluations < self.population {
            return Err(CoreError::InvalidArgument(
                "EvolutionConfig: evaluation budget below population size",
            ));
        }
        Ok(())
    }
}

const SBX_ETA: f64 = 15.0;
const MUTATION_ETA: f64 = 20.0;
/// Archive is pruned by crowding once it exceeds this size.
const ARCHIVE_CAP: usize = 2000;

/// Candidate solution with NSGA-II bookkeeping.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub objectives: Vec<f64>,
    pub constraints: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn violation(&self) -> f64 {
        self.constraints.iter().map(|c| (-c).max(0.0)).sum()
    }

    fn feasible(&self) -> bool {
        self.constraints.iter().all(|c| *c >= 0.0)
    }
}

/// Result of a solver run: mutually non-dominated archive with inputs,
/// objective values, and (when constrained) constraint values.
#[derive(Debug, Clone)]
pub struct MooArchive {
    pub inputs: Vec<Vec<f64>>,
    pub objectives: Vec<Vec<f64>>,
    pub constraints: Vec<Vec<f64>>,
    /// False when no feasible point was ever evaluated; the archive then
    /// holds the unconstrained non-dominated set instead.
    pub any_feasible: bool,
}

impl MooArchive {
    pub fn front(&self) -> ParetoFront {
        ParetoFront {
            points: self.objectives.clone(),
            inputs: Some(self.inputs.clone()),
        }
    }
}

/// Partition a population into non-domination ranks (rank 0 is the
/// non-dominated set). Constraint handling follows Deb's rule.
pub fn non_dominated_sort(pop: &[Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&pop[i], &pop[j]) {
                dominated_by[i].push(j);
                counts[j] += 1;
            } else if constrained_dominates(&pop[j], &pop[i]) {
                dominated_by[j].push(i);
                counts[i] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                counts[j] -= 1;
                if counts[j] == 0 {
                    next.push(j);
                }
            }
        }
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Deb's constrained dominance: feasible beats infeasible, infeasible compare
/// by total violation, feasible compare by Pareto dominance.
fn constrained_dominates(a: &Individual, b: &Individual) -> bool {
    match (a.feasible(), b.feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation() < b.violation(),
        (true, true) => dominates(&a.objectives, &b.objectives),
    }
}

/// Crowding distances for one front. Boundary points get infinity; interior
/// points accumulate normalized neighbor gaps per objective.
pub fn crowding_distance(front: &[Individual]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let k = front[0].objectives.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for j in 0..k {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            front[a].objectives[j]
                .partial_cmp(&front[b].objectives[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let lo = front[order[0]].objectives[j];
        let hi = front[order[n - 1]].objectives[j];
        let range = hi - lo;
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if range <= 1e-12 {
            continue; // degenerate objective; no gap information
        }
        for w in 1..n - 1 {
            let gap =
                front[order[w + 1]].objectives[j] - front[order[w - 1]].objectives[j];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Maximize K cheap objectives (subject to optional cheap constraints
/// `c_i(x) >= 0`) over a box with NSGA-II. Deterministic per config seed.
pub fn nsga2(
    objectives: &dyn Fn(&[f64]) -> Vec<f64>,
    constraints: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    domain: &BoxDomain,
    config: &EvolutionConfig,
) -> Result<MooArchive> {
    config.validate()?;
    let mut rng = RngStream::new(config.seed);
    let d = domain.dim();
    let mutation_prob = config.mutation_prob.unwrap_or(1.0 / d as f64);
    let mut archive = Archive::new(constraints.is_some());

    let evaluate = |x: Vec<f64>, archive: &mut Archive| -> Individual {
        let objectives_v = objectives(&x);
        let constraints_v = constraints.map(|c| c(&x)).unwrap_or_default();
        let ind = Individual {
            genome: x,
            objectives: objectives_v,
            constraints: constraints_v,
            rank: 0,
            crowding: 0.0,
        };
        archive.offer(&ind);
        ind
    };

    let mut pop: Vec<Individual> = (0..config.population)
        .map(|_| evaluate(domain.sample(&mut rng), &mut archive))
        .collect();
    let mut evaluations = pop.len();
    assign_rank_and_crowding(&mut pop);

    while evaluations + config.population <= config.max_evaluations {
        let mut offspring = Vec::with_capacity(config.population);
        while offspring.len() < config.population {
            let p1 = tournament(&pop, &mut rng);
            let p2 = tournament(&pop, &mut rng);
            let (mut c1, mut c2) = sbx_crossover(
                &pop[p1].genome,
                &pop[p2].genome,
                domain,
                config.crossover_prob,
                &mut rng,
            );
            polynomial_mutation(&mut c1, domain, mutation_prob, &mut rng);
            polynomial_mutation(&mut c2, domain, mutation_prob, &mut rng);
            offspring.push(evaluate(c1, &mut archive));
            if offspring.len() < config.population {
                offspring.push(evaluate(c2, &mut archive));
            }
        }
        evaluations += offspring.len();
        pop.extend(offspring);
        pop = environmental_selection(pop, config.population);
    }

    Ok(archive.finish())
}

fn assign_rank_and_crowding(pop: &mut [Individual]) {
    let fronts = non_dominated_sort(pop);
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<Individual> = front.iter().map(|&i| pop[i].clone()).collect();
        let dist = crowding_distance(&members);
        for (slot, &i) in front.iter().enumerate() {
            pop[i].rank = rank;
            pop[i].crowding = dist[slot];
        }
    }
}

fn environmental_selection(mut pool: Vec<Individual>, target: usize) -> Vec<Individual> {
    assign_rank_and_crowding(&mut pool);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        pool[a].rank.cmp(&pool[b].rank).then(
            pool[b]
                .crowding
                .partial_cmp(&pool[a].crowding)
                .unwrap_or(std::cmp::Ordering::Equal),
        )
    });
    order.truncate(target);
    let mut selected: Vec<Individual> = order.into_iter().map(|i| pool[i].clone()).collect();
    assign_rank_and_crowding(&mut selected);
    selected
}

fn tournament(pop: &[Individual], rng: &mut RngStream) -> usize {
    let a = rng.index(pop.len());
    let b = rng.index(pop.len());
    let better = |i: usize, j: usize| {
        (pop[i].rank, std::cmp::Reverse(ordf(pop[i].crowding)))
            < (pop[j].rank, std::cmp::Reverse(ordf(pop[j].crowding)))
    };
    if better(b, a) {
        b
    } else {
        a
    }
}

fn ordf(v: f64) -> u64 {
    // monotone map good enough for comparing nonnegative crowding values
    v.max(0.0).min(f64::MAX).to_bits()
}

/// Simulated binary crossover with eta = 15, per-gene exchange.
fn sbx_crossover(
    a: &[f64],
    b: &[f64],
    domain: &BoxDomain,
    prob: f64,
    rng: &mut RngStream,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.uniform() < prob {
        for i in 0..a.len() {
            if rng.uniform() < 0.5 {
                let u = rng.uniform();
                let beta = if u <= 0.5 {
                    (2.0 * u).powf(1.0 / (SBX_ETA + 1.0))
                } else {
                    (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (SBX_ETA + 1.0))
                };
                c1[i] = 0.5 * ((1.0 + beta) * a[i] + (1.0 - beta) * b[i]);
                c2[i] = 0.5 * ((1.0 - beta) * a[i] + (1.0 + beta) * b[i]);
            }
        }
    }
    domain.clip(&mut c1);
    domain.clip(&mut c2);
    (c1, c2)
}

/// Polynomial mutation with eta = 20; genomes are repaired by clipping.
fn polynomial_mutation(x: &mut [f64], domain: &BoxDomain, prob: f64, rng: &mut RngStream) {
    for i in 0..x.len() {
        if rng.uniform() < prob {
            let u = rng.uniform();
            let delta = if u < 0.5 {
                (2.0 * u).powf(1.0 / (MUTATION_ETA + 1.0)) - 1.0
            } else {
                1.0 - (2.0 * (1.0 - u)).powf(1.0 / (MUTATION_ETA + 1.0))
            };
            x[i] += delta * domain.range(i);
        }
    }
    domain.clip(x);
}

/// External archive of non-dominated (feasible-preferred) evaluated points.
struct Archive {
    constrained: bool,
    members: Vec<Individual>,
    any_feasible: bool,
}

impl Archive {
    fn new(constrained: bool) -> Self {
        Self {
            constrained,
            members: Vec::new(),
            any_feasible: false,
        }
    }

    fn offer(&mut self, ind: &Individual) {
        if self.constrained && !ind.feasible() {
            if !self.any_feasible {
                self.offer_unconstrained(ind);
            }
            return;
        }
        if self.constrained && !self.any_feasible {
            // first feasible point: drop the infeasible placeholder archive
            self.members.clear();
            self.any_feasible = true;
        }
        self.insert(ind);
    }

    /// Fallback archive over plain dominance while nothing is feasible.
    fn offer_unconstrained(&mut self, ind: &Individual) {
        self.insert(ind);
    }

    fn insert(&mut self, ind: &Individual) {
        if self
            .members
            .iter()
            .any(|m| dominates(&m.objectives, &ind.objectives) || m.objectives == ind.objectives)
        {
            return;
        }
        self.members
            .retain(|m| !dominates(&ind.objectives, &m.objectives));
        self.members.push(ind.clone());
        if self.members.len() > ARCHIVE_CAP {
            self.prune();
        }
    }

    fn prune(&mut self) {
        let dist = crowding_distance(&self.members);
        let worst = dist
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.members.swap_remove(worst);
    }

    fn finish(self) -> MooArchive {
        let inputs: Vec<Vec<f64>> = self.members.iter().map(|m| m.genome.clone()).collect();
        let points: Vec<Vec<f64>> = self.members.iter().map(|m| m.objectives.clone()).collect();
        // canonical ordering via pareto_front (also re-checks mutual
        // non-dominance after any pruning)
        let front = pareto_front_with_inputs(&points, Some(&inputs))
            .expect("archive never empty after a run");
        let constraint_of = |x: &[f64]| {
            self.members
                .iter()
                .find(|m| m.genome == x)
                .map(|m| m.constraints.clone())
                .unwrap_or_default()
        };
        let constraints = front
            .inputs
            .as_ref()
            .map(|xs| xs.iter().map(|x| constraint_of(x)).collect())
            .unwrap_or_default();
        MooArchive {
            inputs: front.inputs.clone().unwrap_or_default(),
            objectives: front.points,
            constraints,
            any_feasible: !self.constrained || self.any_feasible,
        }
    }
}
