//! The BO driver loops: MESMO, MESMOC, MF-OSEMO (TG/NI), iMOCA (T/E), the
//! Naive-CFMO baseline, and a uniform-random baseline. All share the same
//! skeleton: fit surrogates, sample Pareto fronts, maximize an acquisition,
//! evaluate, log.

use std::time::Instant;

use crate::acquisition::entropy::GAUSSIAN_ENTROPY;
use crate::acquisition::{
    mesmo_term, mesmoc_alpha, reduce_fidelity_space, sample_pareto_fronts, AcquisitionConfig,
    ParetoFrontSample,
};
use crate::dataset::{Dataset, Fidelity, FidelityMode, FidelityVector, Observation};
use crate::domain::BoxDomain;
use crate::error::{CoreError, Result};
use crate::math::RngStream;
use crate::nsga2::{nsga2, EvolutionConfig};
use crate::optimizer::problem::{Budget, Problem, RunConfig, RunRecord, RunResult};
use crate::optimizer::search::{initial_design, optimize_acquisition, CandidateScore};
use crate::pareto::{hypervolume, pareto_front, r2_distance, ParetoFront};
use crate::surrogate::{fit_hyperparameters, FittedSurrogate, GpHyperParams, SurrogateKind};

/// MF-OSEMO entropy approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfVariant {
    Tg,
    Ni,
}

/// iMOCA entropy approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImocaVariant {
    T,
    E,
}

/// Pareto front of the posterior means at the highest fidelities (restricted
/// to posterior-mean-feasible inputs when constraint models are given),
/// found by the cheap solver.
pub fn recover_pareto_front(
    objective_models: &[FittedSurrogate],
    constraint_models: &[FittedSurrogate],
    domain: &BoxDomain,
    evaluations: usize,
    seed: u64,
) -> Result<ParetoFront> {
    let mut config = EvolutionConfig::new(seed);
    config.max_evaluations = evaluations;
    let objectives = |x: &[f64]| -> Vec<f64> {
        objective_models
            .iter()
            .map(|m| m.highest_posterior(x).map(|(mu, _)| mu).unwrap_or(0.0))
            .collect()
    };
    let archive = if constraint_models.is_empty() {
        nsga2(&objectives, None, domain, &config)?
    } else {
        let constraints = |x: &[f64]| -> Vec<f64> {
            constraint_models
                .iter()
                .map(|m| m.highest_posterior(x).map(|(mu, _)| mu).unwrap_or(0.0))
                .collect()
        };
        nsga2(&objectives, Some(&constraints), domain, &config)?
    };
    Ok(archive.front())
}

/// Shared driver state.
struct BoLoop<'a> {
    problem: &'a Problem,
    config: &'a RunConfig,
    data: Dataset,
    objective_models: Vec<FittedSurrogate>,
    constraint_models: Vec<FittedSurrogate>,
    objective_params: Vec<GpHyperParams>,
    constraint_params: Vec<GpHyperParams>,
    rng: RngStream,
    records: Vec<RunRecord>,
    cum_cost: f64,
    iterations_since_fit: usize,
    started: Instant,
}

impl<'a> BoLoop<'a> {
    fn start(problem: &'a Problem, config: &'a RunConfig) -> Result<Self> {
        let mut rng = RngStream::new(config.seed);
        let n0 = config.n_init_for(problem.domain.dim());
        let data = initial_design(problem, n0, &mut rng)?;
        let cum_cost = data.total_cost();
        if let Budget::Cost(b) = config.budget {
            if b <= cum_cost {
                return Err(CoreError::InvalidArgument(
                    "budget does not exceed the initial-design cost",
                ));
            }
        }
        let mut state = Self {
            problem,
            config,
            data,
            objective_models: Vec::new(),
            constraint_models: Vec::new(),
            objective_params: Vec::new(),
            constraint_params: Vec::new(),
            rng,
            records: Vec::new(),
            cum_cost,
            iterations_since_fit: 0,
            started: Instant::now(),
        };
        state.fit_models()?;
        Ok(state)
    }

    fn surrogate_kind(&self) -> SurrogateKind {
        match self.problem.fidelity_mode {
            FidelityMode::None => SurrogateKind::Single,
            FidelityMode::Discrete => SurrogateKind::MultiFidelity { levels: 0 },
            FidelityMode::Continuous => SurrogateKind::ContinuousFidelity,
        }
    }

    /// Full hyperparameter search for every output, then factorize.
    fn fit_models(&mut self) -> Result<()> {
        self.objective_params.clear();
        self.constraint_params.clear();
        for j in 0..self.problem.k {
            let kind = match self.surrogate_kind() {
                SurrogateKind::MultiFidelity { .. } => SurrogateKind::MultiFidelity {
                    levels: self.problem.levels[j],
                },
                other => other,
            };
            let (xs, fids, ys) = self.data.output_slice(j);
            let mut fit_rng = self.rng.fork();
            let params = fit_hyperparameters(
                &self.problem.domain,
                &xs,
                &fids,
                &ys,
                kind,
                &mut fit_rng,
            )?;
            self.objective_params.push(params);
        }
        for i in 0..self.problem.l {
            let (xs, fids, ys) = self.data.output_slice(self.problem.k + i);
            let mut fit_rng = self.rng.fork();
            let params = fit_hyperparameters(
                &self.problem.domain,
                &xs,
                &fids,
                &ys,
                SurrogateKind::Single,
                &mut fit_rng,
            )?;
            self.constraint_params.push(params);
        }
        self.iterations_since_fit = 0;
        self.refactorize()
    }

    /// Rebuild factorizations from the current hyperparameters and data.
    fn refactorize(&mut self) -> Result<()> {
        self.objective_models.clear();
        self.constraint_models.clear();
        for j in 0..self.problem.k {
            let (xs, fids, ys) = self.data.output_slice(j);
            self.objective_models.push(FittedSurrogate::with_params(
                self.problem.domain.clone(),
                xs,
                fids,
                ys,
                self.objective_params[j].clone(),
            )?);
        }
        for i in 0..self.problem.l {
            let (xs, fids, ys) = self.data.output_slice(self.problem.k + i);
            self.constraint_models.push(FittedSurrogate::with_params(
                self.problem.domain.clone(),
                xs,
                fids,
                ys,
                self.constraint_params[i].clone(),
            )?);
        }
        Ok(())
    }

    fn maybe_refit(&mut self) -> Result<()> {
        if self.iterations_since_fit >= self.config.hyperfit_interval {
            self.fit_models()
        } else {
            Ok(())
        }
    }

    fn sample_fronts(&mut self) -> Result<Vec<ParetoFrontSample>> {
        let constraints = if self.constraint_models.is_empty() {
            None
        } else {
            Some(self.constraint_models.as_slice())
        };
        sample_pareto_fronts(
            &self.objective_models,
            constraints,
            &self.problem.domain,
            &self.config.acquisition,
            &mut self.rng,
        )
    }

    fn observed_phv(&self) -> f64 {
        let Some(reference) = &self.problem.phv_reference else {
            return 0.0;
        };
        let outputs = self.data.highest_fidelity_outputs(&self.problem.levels);
        if outputs.is_empty() {
            return 0.0;
        }
        pareto_front(&outputs)
            .and_then(|f| hypervolume(&f, reference))
            .map(|h| h.value)
            .unwrap_or(0.0)
    }

    fn recovery_due(&self, t: usize) -> bool {
        t % self.config.recovery_interval == 0
    }

    fn recover(&mut self) -> Result<ParetoFront> {
        let seed = self.rng.derive_seed();
        recover_pareto_front(
            &self.objective_models,
            &self.constraint_models,
            &self.problem.domain,
            self.config.acquisition.nsga_evaluations,
            seed,
        )
    }

    /// Evaluate the chosen point, update the data and factorizations, and
    /// append a log record. Returns false when the callback produced
    /// non-finite output (partial-result abort).
    fn evaluate_and_log(
        &mut self,
        t: usize,
        x: Vec<f64>,
        fidelity: FidelityVector,
        mut flags: Vec<String>,
    ) -> Result<bool> {
        let y = (self.problem.eval)(&x, &fidelity);
        let healthy = y.len() == self.problem.k + self.problem.l
            && y.iter().all(|v| v.is_finite());
        if !healthy {
            flags.push("evaluation_error".to_string());
        }
        let cost = self.problem.cost.normalized_total(&x, &fidelity);
        self.cum_cost += cost;
        if healthy {
            self.data.push(Observation {
                x: x.clone(),
                fidelity: fidelity.clone(),
                y: y.clone(),
                cost,
            })?;
            self.iterations_since_fit += 1;
            self.refactorize()?;
        }
        let (phv_recovered, r2) = if healthy && self.recovery_due(t) {
            self.recovered_metrics()?
        } else {
            (None, None)
        };
        self.records.push(RunRecord {
            iter: t,
            cum_cost: self.cum_cost,
            phv_observed: self.observed_phv(),
            phv_recovered,
            r2,
            x,
            fidelity,
            y,
            elapsed_s: if self.config.record_wall_time {
                self.started.elapsed().as_secs_f64()
            } else {
                0.0
            },
            flags,
        });
        Ok(healthy)
    }

    /// Metric-quality assessment of the recovered front: evaluate the true
    /// highest-fidelity functions at the recovered Pareto set (offline, not
    /// charged to the budget) and measure that front.
    fn recovered_metrics(&mut self) -> Result<(Option<f64>, Option<f64>)> {
        let front = self.recover()?;
        let Some(inputs) = &front.inputs else {
            return Ok((None, None));
        };
        let top = self.problem.highest_fidelity();
        let true_points: Vec<Vec<f64>> = inputs
            .iter()
            .map(|x| (self.problem.eval)(x, &top)[..self.problem.k].to_vec())
            .filter(|y| y.iter().all(|v| v.is_finite()))
            .collect();
        if true_points.is_empty() {
            return Ok((None, None));
        }
        let true_front = pareto_front(&true_points)?;
        let phv = self
            .problem
            .phv_reference
            .as_ref()
            .and_then(|r| hypervolume(&true_front, r).ok())
            .map(|h| h.value);
        let r2 = self
            .problem
            .reference_front
            .as_ref()
            .and_then(|rf| r2_distance(rf, &true_front).ok());
        Ok((phv, r2))
    }

    /// Stop before the budget would be exceeded.
    fn within_budget(&self, t: usize, next_cost: f64) -> bool {
        match self.config.budget {
            Budget::Iterations(n) => t <= n,
            Budget::Cost(b) => self.cum_cost + next_cost <= b + 1e-9,
        }
    }

    fn finish(mut self) -> Result<RunResult> {
        // make sure the final record carries recovered metrics
        if let Some(last) = self.records.last() {
            if last.phv_recovered.is_none() && !last.flags.contains(&"evaluation_error".into()) {
                let (phv, r2) = self.recovered_metrics()?;
                let last = self.records.last_mut().unwrap();
                last.phv_recovered = phv;
                last.r2 = r2;
            }
        }
        let recovered_front = self.recover()?;
        Ok(RunResult {
            dataset: self.data,
            recovered_front,
            records: self.records,
        })
    }
}

/// MESMO (Algorithm for the basic MOO problem): single-fidelity,
/// unconstrained.
pub fn run_mesmo(problem: &Problem, config: &RunConfig) -> Result<RunResult> {
    if problem.fidelity_mode != FidelityMode::None || problem.l != 0 {
        return Err(CoreError::InvalidArgument(
            "run_mesmo expects a single-fidelity unconstrained problem",
        ));
    }
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        if !state.within_budget(t, problem.k as f64) {
            break;
        }
        state.maybe_refit()?;
        let samples = state.sample_fronts()?;
        let models = &state.objective_models;
        let score = |x: &[f64]| -> Result<CandidateScore> {
            Ok(CandidateScore {
                score: crate::acquisition::mesmo_alpha(models, &samples, x)?,
                fidelity: FidelityVector::None,
                violation: 0.0,
            })
        };
        let mut acq_rng = state.rng.fork();
        let outcome = optimize_acquisition(
            &score,
            &problem.domain,
            config.acq_candidates,
            config.acq_refinements,
            &mut acq_rng,
        )?;
        let flags = degenerate_flags(&samples);
        if !state.evaluate_and_log(t, outcome.x, outcome.fidelity, flags)? {
            break;
        }
    }
    state.finish()
}

/// MESMOC: constrained single-fidelity; acquisition candidates are filtered
/// by nonnegative posterior constraint means, falling back to the
/// least-violating candidate (flagged) when none qualifies.
pub fn run_mesmoc(problem: &Problem, config: &RunConfig) -> Result<RunResult> {
    if problem.fidelity_mode != FidelityMode::None || problem.l == 0 {
        return Err(CoreError::InvalidArgument(
            "run_mesmoc expects a single-fidelity problem with constraints",
        ));
    }
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        if !state.within_budget(t, (problem.k + problem.l) as f64) {
            break;
        }
        state.maybe_refit()?;
        let samples = state.sample_fronts()?;
        let objectives = &state.objective_models;
        let constraints = &state.constraint_models;
        let score = |x: &[f64]| -> Result<CandidateScore> {
            let mut violation = 0.0;
            for c in constraints {
                let (mu, _) = c.highest_posterior(x)?;
                violation += (-mu).max(0.0);
            }
            Ok(CandidateScore {
                score: mesmoc_alpha(objectives, constraints, &samples, x)?,
                fidelity: FidelityVector::None,
                violation,
            })
        };
        let mut acq_rng = state.rng.fork();
        let outcome = optimize_acquisition(
            &score,
            &problem.domain,
            config.acq_candidates,
            config.acq_refinements,
            &mut acq_rng,
        )?;
        let mut flags = degenerate_flags(&samples);
        if outcome.feasibility_fallback {
            flags.push("feasibility_fallback".to_string());
        }
        if !state.evaluate_and_log(t, outcome.x, outcome.fidelity, flags)? {
            break;
        }
    }
    state.finish()
}

/// Per-(objective, fidelity) information-gain table for one candidate input,
/// used to score every fidelity combination without re-querying the
/// surrogates.
fn mf_gain_table(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    levels: &[usize],
    variant: MfVariant,
    acq: &AcquisitionConfig,
) -> Result<Vec<Vec<f64>>> {
    let s = samples.len() as f64;
    let mut gains = Vec::with_capacity(models.len());
    for (j, model) in models.iter().enumerate() {
        let top = levels[j];
        let mut per_level = Vec::with_capacity(top);
        for m in 1..=top {
            let (mu, var) = model.posterior(x, Fidelity::Level(m))?;
            let sd = var.sqrt();
            if sd <= 1e-12 {
                per_level.push(0.0);
                continue;
            }
            let gain = match variant {
                MfVariant::Tg => {
                    samples
                        .iter()
                        .map(|sample| mesmo_term((sample.maxima[j] - mu) / sd))
                        .sum::<f64>()
                        / s
                }
                MfVariant::Ni => {
                    let h1 = GAUSSIAN_ENTROPY + sd.ln();
                    let mut h2 = 0.0;
                    for sample in samples {
                        h2 += if m == top {
                            crate::acquisition::truncated_gaussian_entropy(
                                mu,
                                sd,
                                sample.maxima[j],
                            )?
                        } else {
                            crate::acquisition::alphas::mfosemo_ni_entropy(
                                model,
                                x,
                                m,
                                sample.maxima[j],
                                acq,
                            )?
                        };
                    }
                    h1 - h2 / s
                }
            };
            per_level.push(gain);
        }
        gains.push(per_level);
    }
    Ok(gains)
}

/// Enumerate fidelity combinations (mixed radix) maximizing
/// sum_j gain[j][f_j] / sum_j cost[j][f_j].
fn best_combo(gains: &[Vec<f64>], costs: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let k = gains.len();
    let mut idx = vec![0usize; k];
    let mut best_idx = idx.clone();
    let mut best = f64::NEG_INFINITY;
    loop {
        let gain: f64 = (0..k).map(|j| gains[j][idx[j]]).sum();
        let cost: f64 = (0..k).map(|j| costs[j][idx[j]]).sum();
        let score = gain / cost;
        if score > best {
            best = score;
            best_idx = idx.clone();
        }
        // increment
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < gains[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == k {
                return (best_idx, best);
            }
        }
    }
}

/// MF-OSEMO: discrete multi-fidelity, budgeted by total normalized cost.
pub fn run_mfosemo(problem: &Problem, config: &RunConfig, variant: MfVariant) -> Result<RunResult> {
    if problem.fidelity_mode != FidelityMode::Discrete {
        return Err(CoreError::InvalidArgument(
            "run_mfosemo expects a discrete multi-fidelity problem",
        ));
    }
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        if let Budget::Iterations(n) = config.budget {
            if t > n {
                break;
            }
        }
        state.maybe_refit()?;
        let samples = state.sample_fronts()?;
        let models = &state.objective_models;
        let acq = &config.acquisition;
        let levels = &problem.levels;
        let cost_model = &problem.cost;
        let score = |x: &[f64]| -> Result<CandidateScore> {
            let gains = mf_gain_table(models, &samples, x, levels, variant, acq)?;
            let costs: Vec<Vec<f64>> = (0..problem.k)
                .map(|j| {
                    (1..=levels[j])
                        .map(|m| {
                            let mut fid = levels.clone();
                            fid[j] = m;
                            cost_model.objective_cost(j, x, &FidelityVector::Discrete(fid))
                        })
                        .collect()
                })
                .collect();
            let norm_costs: Vec<Vec<f64>> = costs
                .iter()
                .map(|c| {
                    let top = *c.last().unwrap();
                    c.iter().map(|v| v / top).collect()
                })
                .collect();
            let (combo, score) = best_combo(&gains, &norm_costs);
            Ok(CandidateScore {
                score,
                fidelity: FidelityVector::Discrete(combo.iter().map(|m| m + 1).collect()),
                violation: 0.0,
            })
        };
        let mut acq_rng = state.rng.fork();
        let outcome = optimize_acquisition(
            &score,
            &problem.domain,
            config.acq_candidates,
            config.acq_refinements,
            &mut acq_rng,
        )?;
        let next_cost = problem.cost.normalized_total(&outcome.x, &outcome.fidelity);
        if !state.within_budget(t, next_cost) {
            break;
        }
        let flags = degenerate_flags(&samples);
        if !state.evaluate_and_log(t, outcome.x, outcome.fidelity, flags)? {
            break;
        }
    }
    state.finish()
}

/// Per-(objective, candidate fidelity) numerator table for iMOCA.
fn imoca_gain_table(
    models: &[FittedSurrogate],
    samples: &[ParetoFrontSample],
    x: &[f64],
    t: usize,
    cost: &crate::acquisition::CostModel,
    variant: ImocaVariant,
    acq: &AcquisitionConfig,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let s = samples.len() as f64;
    let mut z_sets = Vec::with_capacity(models.len());
    let mut gains = Vec::with_capacity(models.len());
    let mut costs = Vec::with_capacity(models.len());
    for (j, model) in models.iter().enumerate() {
        let z_set = reduce_fidelity_space(model, x, t, j, cost, acq.fidelity_grid, acq.gap_filter)?;
        let mut per_z = Vec::with_capacity(z_set.len());
        let mut cost_z = Vec::with_capacity(z_set.len());
        // highest-fidelity posterior shared by all E-terms of this objective
        let (mu_f, var_f) = model.posterior(x, Fidelity::Z(1.0))?;
        let sd_f = var_f.sqrt();
        for &z in &z_set {
            let (mu_g, var_g) = model.posterior(x, Fidelity::Z(z))?;
            let sd_g = var_g.sqrt();
            let gain = if sd_g <= 1e-12 {
                0.0
            } else {
                match variant {
                    ImocaVariant::T => {
                        samples
                            .iter()
                            .map(|sample| mesmo_term((sample.maxima[j] - mu_g) / sd_g))
                            .sum::<f64>()
                            / s
                    }
                    ImocaVariant::E => {
                        if sd_f <= 1e-12 {
                            0.0
                        } else {
                            let cross =
                                model.cross_covariance(x, Fidelity::Z(z), Fidelity::Z(1.0))?;
                            let tau = (cross / (sd_g * sd_f)).clamp(-1.0, 1.0);
                            let degenerate = 1.0 - tau * tau < acq.tau_epsilon;
                            let mut total = 0.0;
                            for sample in samples {
                                if degenerate {
                                    total += mesmo_term((sample.maxima[j] - mu_g) / sd_g);
                                } else {
                                    let gamma_f = (sample.maxima[j] - mu_f) / sd_f;
                                    total += 0.5
                                        * tau
                                        * tau
                                        * gamma_f
                                        * crate::math::hazard(gamma_f)
                                        - crate::math::ln_std_normal_cdf(gamma_f)
                                        + crate::acquisition::entropy::esg_expectation_ln_cdf(
                                            gamma_f,
                                            tau,
                                            acq.integration_half_width,
                                            acq.panels,
                                        )?;
                                }
                            }
                            total / s
                        }
                    }
                }
            };
            per_z.push(gain);
            cost_z.push(cost.normalized_continuous(j, x, z));
        }
        z_sets.push(z_set);
        gains.push(per_z);
        costs.push(cost_z);
    }
    Ok((z_sets, gains, costs))
}

/// iMOCA: continuous-fidelity joint (x, z) selection over the reduced
/// fidelity space, budgeted by total normalized cost.
pub fn run_imoca(problem: &Problem, config: &RunConfig, variant: ImocaVariant) -> Result<RunResult> {
    if problem.fidelity_mode != FidelityMode::Continuous {
        return Err(CoreError::InvalidArgument(
            "run_imoca expects a continuous-fidelity problem",
        ));
    }
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        if let Budget::Iterations(n) = config.budget {
            if t > n {
                break;
            }
        }
        state.maybe_refit()?;
        let samples = state.sample_fronts()?;
        let models = &state.objective_models;
        let acq = &config.acquisition;
        let cost_model = &problem.cost;
        let score = |x: &[f64]| -> Result<CandidateScore> {
            let (z_sets, gains, costs) =
                imoca_gain_table(models, &samples, x, t, cost_model, variant, acq)?;
            let (combo, score) = best_combo(&gains, &costs);
            let z: Vec<f64> = combo.iter().zip(&z_sets).map(|(i, zs)| zs[*i]).collect();
            Ok(CandidateScore {
                score,
                fidelity: FidelityVector::Continuous(z),
                violation: 0.0,
            })
        };
        let mut acq_rng = state.rng.fork();
        let outcome = optimize_acquisition(
            &score,
            &problem.domain,
            config.acq_candidates,
            config.acq_refinements,
            &mut acq_rng,
        )?;
        let next_cost = problem.cost.normalized_total(&outcome.x, &outcome.fidelity);
        if !state.within_budget(t, next_cost) {
            break;
        }
        let flags = degenerate_flags(&samples);
        if !state.evaluate_and_log(t, outcome.x, outcome.fidelity, flags)? {
            break;
        }
    }
    state.finish()
}

/// Naive-CFMO baseline: select x by the MESMO acquisition at the highest
/// fidelity, then evaluate each objective at the cheapest fidelity in its
/// reduced set.
pub fn run_naive_cfmo(problem: &Problem, config: &RunConfig) -> Result<RunResult> {
    if problem.fidelity_mode != FidelityMode::Continuous {
        return Err(CoreError::InvalidArgument(
            "run_naive_cfmo expects a continuous-fidelity problem",
        ));
    }
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        if let Budget::Iterations(n) = config.budget {
            if t > n {
                break;
            }
        }
        state.maybe_refit()?;
        let samples = state.sample_fronts()?;
        let models = &state.objective_models;
        // Step 1: input by highest-fidelity information gain only.
        let score = |x: &[f64]| -> Result<CandidateScore> {
            Ok(CandidateScore {
                score: crate::acquisition::mesmo_alpha(models, &samples, x)?,
                fidelity: FidelityVector::Continuous(vec![1.0; problem.k]),
                violation: 0.0,
            })
        };
        let mut acq_rng = state.rng.fork();
        let outcome = optimize_acquisition(
            &score,
            &problem.domain,
            config.acq_candidates,
            config.acq_refinements,
            &mut acq_rng,
        )?;
        // Step 2: cheapest valid fidelity per objective.
        let mut z = Vec::with_capacity(problem.k);
        for (j, model) in state.objective_models.iter().enumerate() {
            let z_set = reduce_fidelity_space(
                model,
                &outcome.x,
                t,
                j,
                &problem.cost,
                config.acquisition.fidelity_grid,
                config.acquisition.gap_filter,
            )?;
            let cheapest = z_set
                .iter()
                .copied()
                .min_by(|a, b| {
                    problem
                        .cost
                        .normalized_continuous(j, &outcome.x, *a)
                        .partial_cmp(&problem.cost.normalized_continuous(j, &outcome.x, *b))
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(1.0);
            z.push(cheapest);
        }
        let fidelity = FidelityVector::Continuous(z);
        let next_cost = problem.cost.normalized_total(&outcome.x, &fidelity);
        if !state.within_budget(t, next_cost) {
            break;
        }
        let flags = degenerate_flags(&samples);
        if !state.evaluate_and_log(t, outcome.x, fidelity, flags)? {
            break;
        }
    }
    state.finish()
}

/// Uniform-random baseline at the highest fidelity (same logging and cost
/// accounting as the BO drivers).
pub fn run_random_search(problem: &Problem, config: &RunConfig) -> Result<RunResult> {
    let mut state = BoLoop::start(problem, config)?;
    let mut t = 0;
    loop {
        t += 1;
        let fidelity = problem.highest_fidelity();
        let x = problem.domain.sample(&mut state.rng);
        let next_cost = problem.cost.normalized_total(&x, &fidelity);
        if !state.within_budget(t, next_cost) {
            break;
        }
        if !state.evaluate_and_log(t, x, fidelity, Vec::new())? {
            break;
        }
    }
    state.finish()
}

fn degenerate_flags(samples: &[ParetoFrontSample]) -> Vec<String> {
    if samples.iter().any(|s| s.degenerate) {
        vec!["degenerate_front_sample".to_string()]
    } else {
        Vec::new()
    }
}
