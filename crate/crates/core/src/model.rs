//! Linear support vector classifier trained by dual coordinate descent on
//! the L1 hinge loss.
//!
//! The primal problem is `min_w 0.5*||w||^2 + c * sum_i max(0, 1 - y_i w.x_i)`
//! with y in {-1,+1}. The solver sweeps the dual variables in a seeded random
//! permutation per pass and stops once the largest projected-gradient
//! violation over a full pass drops below the tolerance. With a fixed seed
//! the result is bit-identical across runs and thread counts.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featurize::FeatureMatrix;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("degenerate task: training data must contain both classes")]
    DegenerateTask,
    #[error("invalid training parameter: {0}")]
    InvalidParams(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("row column {column} out of range for model with {columns} weights")]
    DimensionMismatch { column: usize, columns: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainParams {
    /// Regularization trade-off; larger values penalize hinge violations more.
    pub c: f64,
    /// Stopping threshold on the maximal projected-gradient violation.
    pub tolerance: f64,
    pub max_passes: usize,
    pub seed: u64,
    /// Learn a bias via an augmented always-on feature (regularized).
    pub fit_bias: bool,
    /// Extra cost multiplier applied to positive examples (1.0 = unweighted).
    pub positive_cost: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            c: 1.0,
            tolerance: 0.1,
            max_passes: 1000,
            seed: 0,
            fit_bias: true,
            positive_cost: 1.0,
        }
    }
}

impl TrainParams {
    fn validate(&self) -> Result<(), ModelError> {
        if !(self.c > 0.0) {
            return Err(ModelError::InvalidParams(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.tolerance > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(ModelError::InvalidParams("max_passes must be >= 1".into()));
        }
        if !(self.positive_cost > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "positive_cost must be > 0, got {}",
                self.positive_cost
            )));
        }
        Ok(())
    }
}

/// The learned separator: one weight per feature column plus a bias term
/// (zero when `fit_bias` was off).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Solver diagnostics, mainly for tests and audits.
#[derive(Debug, Clone)]
pub struct SolverStats {
    /// Final dual variables, one per training row; each lies in [0, C_i].
    pub alphas: Vec<f64>,
    pub passes: usize,
    pub final_violation: f64,
    pub converged: bool,
}

impl LinearModel {
    /// w.x + bias over a sparse binary row.
    pub fn decision_value(&self, row: &[usize]) -> Result<f64, ModelError> {
        let mut sum = self.bias;
        for &column in row {
            let weight = self
                .weights
                .get(column)
                .ok_or(ModelError::DimensionMismatch {
                    column,
                    columns: self.weights.len(),
                })?;
            sum += weight;
        }
        Ok(sum)
    }

    /// 1 iff the decision value is strictly positive; exact ties go to 0.
    pub fn predict(&self, row: &[usize]) -> Result<bool, ModelError> {
        Ok(self.decision_value(row)? > 0.0)
    }

    /// Primal objective 0.5*||w||^2 + c * sum hinge at this model.
    pub fn primal_objective(&self, matrix: &FeatureMatrix, labels: &[bool], params: &TrainParams) -> f64 {
        let mut reg = self.weights.iter().map(|w| w * w).sum::<f64>();
        if params.fit_bias {
            reg += self.bias * self.bias;
        }
        let mut loss = 0.0;
        for (i, &positive) in labels.iter().enumerate() {
            let y = if positive { 1.0 } else { -1.0 };
            let margin = 1.0 - y * self.decision_value(matrix.row(i)).expect("dimensions checked");
            let cost = if positive { params.c * params.positive_cost } else { params.c };
            loss += cost * margin.max(0.0);
        }
        0.5 * reg + loss
    }
}

/// Train a model; see [`train_detailed`] for solver diagnostics.
pub fn train(
    matrix: &FeatureMatrix,
    labels: &[bool],
    params: &TrainParams,
) -> Result<LinearModel, ModelError> {
    train_detailed(matrix, labels, params).map(|(model, _)| model)
}

pub fn train_detailed(
    matrix: &FeatureMatrix,
    labels: &[bool],
    params: &TrainParams,
) -> Result<(LinearModel, SolverStats), ModelError> {
    params.validate()?;
    let rows = matrix.rows();
    if rows != labels.len() {
        return Err(ModelError::InvalidParams(format!(
            "matrix has {rows} rows but {} labels given",
            labels.len()
        )));
    }
    if rows < 2 || labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(ModelError::DegenerateTask);
    }

    let columns = matrix.columns();
    let width = columns + usize::from(params.fit_bias);
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let upper: Vec<f64> = labels
        .iter()
        .map(|&l| if l { params.c * params.positive_cost } else { params.c })
        .collect();
    // Q_ii = x_i . x_i; binary features make this the row's nonzero count.
    let q_diag: Vec<f64> = (0..rows)
        .map(|i| matrix.row(i).len() as f64 + if params.fit_bias { 1.0 } else { 0.0 })
        .collect();

    let mut w = vec![0.0f64; width];
    let mut alphas = vec![0.0f64; rows];
    let mut order: Vec<usize> = (0..rows).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut passes = 0;
    let mut violation = f64::INFINITY;
    let mut converged = false;
    while passes < params.max_passes {
        order.shuffle(&mut rng);
        violation = 0.0;
        for &i in &order {
            let yi = y[i];
            let mut wx = if params.fit_bias { w[columns] } else { 0.0 };
            for &c in matrix.row(i) {
                wx += w[c];
            }
            let gradient = yi * wx - 1.0;
            if !gradient.is_finite() {
                return Err(ModelError::SolverFailure(format!(
                    "non-finite dual gradient at row {i}"
                )));
            }
            let alpha = alphas[i];
            let projected = if alpha <= 0.0 {
                gradient.min(0.0)
            } else if alpha >= upper[i] {
                gradient.max(0.0)
            } else {
                gradient
            };
            violation = violation.max(projected.abs());
            if projected == 0.0 {
                continue;
            }
            let updated = if q_diag[i] > 0.0 {
                (alpha - gradient / q_diag[i]).clamp(0.0, upper[i])
            } else if gradient < 0.0 {
                // Empty row without bias: the dual is linear in this variable.
                upper[i]
            } else {
                0.0
            };
            let delta = updated - alpha;
            if delta != 0.0 {
                alphas[i] = updated;
                let step = delta * yi;
                for &c in matrix.row(i) {
                    w[c] += step;
                }
                if params.fit_bias {
                    w[columns] += step;
                }
            }
        }
        passes += 1;
        if violation <= params.tolerance {
            converged = true;
            break;
        }
    }

    let bias = if params.fit_bias { w[columns] } else { 0.0 };
    w.truncate(columns);
    let model = LinearModel { weights: w, bias };
    if model.weights.iter().any(|v| !v.is_finite()) || !model.bias.is_finite() {
        return Err(ModelError::SolverFailure("non-finite weight vector".into()));
    }
    Ok((
        model,
        SolverStats {
            alphas,
            passes,
            final_violation: violation,
            converged,
        },
    ))
}
