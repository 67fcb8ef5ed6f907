//! Evaluation-cost models and their normalization by highest-fidelity cost.

use std::sync::Arc;

use crate::dataset::FidelityVector;

/// Per-objective evaluation cost. Normalized total cost divides each
/// objective's cost by that objective's highest-fidelity cost, so the total
/// equals K at the highest fidelity vector.
#[derive(Clone)]
pub enum CostModel {
    /// Single-fidelity problems: each evaluation costs K (one unit per
    /// objective at the true function).
    Uniform { k: usize },
    /// lambda[j][m-1] is the cost of objective j at level m.
    Discrete { per_level: Vec<Vec<f64>> },
    /// C_j(x, z_j), cost of objective j at continuous fidelity z_j.
    Continuous {
        #[allow(clippy::type_complexity)]
        per_objective: Vec<Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>>,
    },
}

impl std::fmt::Debug for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostModel::Uniform { k } => write!(f, "CostModel::Uniform {{ k: {k} }}"),
            CostModel::Discrete { per_level } => {
                write!(f, "CostModel::Discrete {{ per_level: {per_level:?} }}")
            }
            CostModel::Continuous { per_objective } => {
                write!(f, "CostModel::Continuous {{ k: {} }}", per_objective.len())
            }
        }
    }
}

impl CostModel {
    pub fn k(&self) -> usize {
        match self {
            CostModel::Uniform { k } => *k,
            CostModel::Discrete { per_level } => per_level.len(),
            CostModel::Continuous { per_objective } => per_objective.len(),
        }
    }

    /// Raw (unnormalized) cost of evaluating objective `j` at the fidelity
    /// encoded in `fid`.
    pub fn objective_cost(&self, j: usize, x: &[f64], fid: &FidelityVector) -> f64 {
        match (self, fid) {
            (CostModel::Uniform { .. }, _) => 1.0,
            (CostModel::Discrete { per_level }, FidelityVector::Discrete(m)) => {
                per_level[j][m[j] - 1]
            }
            (CostModel::Continuous { per_objective }, FidelityVector::Continuous(z)) => {
                per_objective[j](x, z[j])
            }
            _ => panic!("fidelity kind does not match cost model"),
        }
    }

    fn objective_top_cost(&self, j: usize, x: &[f64]) -> f64 {
        match self {
            CostModel::Uniform { .. } => 1.0,
            CostModel::Discrete { per_level } => *per_level[j].last().unwrap(),
            CostModel::Continuous { per_objective } => per_objective[j](x, 1.0),
        }
    }

    /// Total normalized cost: sum over objectives of cost at the chosen
    /// fidelity divided by the highest-fidelity cost. Equals K at the highest
    /// fidelity vector.
    pub fn normalized_total(&self, x: &[f64], fid: &FidelityVector) -> f64 {
        (0..self.k())
            .map(|j| self.objective_cost(j, x, fid) / self.objective_top_cost(j, x))
            .sum()
    }

    /// Normalized cost of a single objective at a continuous fidelity.
    pub fn normalized_continuous(&self, j: usize, x: &[f64], z: f64) -> f64 {
        match self {
            CostModel::Continuous { per_objective } => {
                per_objective[j](x, z) / per_objective[j](x, 1.0)
            }
            _ => 1.0,
        }
    }
}
