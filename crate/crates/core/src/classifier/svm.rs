//! Soft-margin linear SVM.
//!
//! Minimizes the averaged hinge objective
//!
//! ```text
//! ½(‖w‖² + b²) + C/N · Σ max(0, 1 − yᵢ(w·zᵢ + b))
//! ```
//!
//! over standardized features `z` by dual coordinate descent. The bias is
//! regularized through an implicit constant feature. Each pass visits the
//! samples in a permutation drawn from the seeded RNG, so training is a pure
//! function of the inputs and the seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::SwbLabel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub regularization: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            regularization: 1.0,
            max_iterations: 10_000,
            tolerance: 1e-6,
            seed: 42,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.regularization > 0.0 && self.regularization.is_finite()) {
            return Err(Error::InvalidConfig("regularization must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Per-feature centering and scaling fitted on a training set.
///
/// Constant features are dropped: they keep a unit scale and are recorded in
/// `dropped`, and the model assigns them zero weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub dropped: Vec<usize>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len() as f64;
        let dim = rows.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);

        let mut scale = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in scale.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut dropped = Vec::new();
        for (j, s) in scale.iter_mut().enumerate() {
            *s = (*s / n).sqrt();
            if *s <= 1e-12 * (1.0 + mean[j].abs()) {
                *s = 1.0;
                dropped.push(j);
            }
        }
        Standardizer { mean, scale, dropped }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_dropped(&self, j: usize) -> bool {
        self.dropped.binary_search(&j).is_ok()
    }

    /// Standardized copy of `x`; dropped features map to 0.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        for &j in &self.dropped {
            out[j] = 0.0;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub passes: usize,
    pub converged: bool,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// One weight per raw feature, in standardized units.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub training: Option<TrainingSummary>,
}

impl LinearModel {
    /// Model with identity standardization, mostly useful for tests and
    /// hand-built rules.
    pub fn from_parts(weights: Vec<f64>, bias: f64) -> Self {
        let dim = weights.len();
        LinearModel {
            weights,
            bias,
            standardizer: Standardizer {
                mean: vec![0.0; dim],
                scale: vec![1.0; dim],
                dropped: Vec::new(),
            },
            training: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Signed decision value after standardization.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} features, got {}",
                self.dim(),
                x.len()
            )));
        }
        if let Some(column) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row: 0, column });
        }
        let s = &self.standardizer;
        let mut margin = self.bias;
        for j in 0..x.len() {
            if self.weights[j] != 0.0 {
                margin += self.weights[j] * (x[j] - s.mean[j]) / s.scale[j];
            }
        }
        Ok(margin)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(SwbLabel, f64)> {
        let margin = self.decision(x)?;
        Ok((SwbLabel::from_margin(margin), margin))
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<(SwbLabel, f64)>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    /// Primal objective of this model on raw (unstandardized) rows.
    pub fn objective(&self, rows: &[Vec<f64>], y: &[SwbLabel], regularization: f64) -> f64 {
        let z: Vec<Vec<f64>> = rows.iter().map(|r| self.standardizer.transform(r)).collect();
        hinge_objective(&self.weights, self.bias, &z, y, regularization)
    }
}

/// `½(‖w‖² + b²) + C/N · Σ hinge` over already standardized rows.
pub fn hinge_objective(
    weights: &[f64],
    bias: f64,
    standardized: &[Vec<f64>],
    y: &[SwbLabel],
    regularization: f64,
) -> f64 {
    let reg = 0.5 * (dot(weights, weights) + bias * bias);
    let loss: f64 = standardized
        .iter()
        .zip(y)
        .map(|(z, l)| (1.0 - l.sign() * (dot(weights, z) + bias)).max(0.0))
        .sum();
    reg + regularization * loss / standardized.len() as f64
}

pub(crate) fn check_training_set(x: &[Vec<f64>], y: &[SwbLabel]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let highs = y.iter().filter(|l| l.is_high()).count();
    if x.len() < 2 || highs == 0 || highs == y.len() {
        return Err(Error::SingleClassTrainingSet);
    }
    let dim = x[0].len();
    for (row, r) in x.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "row {row} has {} features, expected {dim}",
                r.len()
            )));
        }
        if let Some(column) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row, column });
        }
    }
    Ok(dim)
}

pub fn train_linear_svm(x: &[Vec<f64>], y: &[SwbLabel], params: &SvmParams) -> Result<LinearModel> {
    params.validate()?;
    let dim = check_training_set(x, y)?;
    let standardizer = Standardizer::fit(x);
    let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.transform(r)).collect();
    let n = z.len();
    let upper = params.regularization / n as f64;
    let diag: Vec<f64> = z.iter().map(|r| dot(r, r) + 1.0).collect();
    let signs: Vec<f64> = y.iter().map(|l| l.sign()).collect();

    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut previous = 0.0;
    let mut summary = TrainingSummary {
        passes: 0,
        converged: false,
        objective: 0.0,
    };

    for pass in 0..params.max_iterations {
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let g = signs[i] * (dot(&w, &z[i]) + b) - 1.0;
            let projected = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= upper {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(projected.abs());
            if projected != 0.0 {
                let updated = (alpha[i] - g / diag[i]).clamp(0.0, upper);
                let step = (updated - alpha[i]) * signs[i];
                if step != 0.0 {
                    for (wj, zj) in w.iter_mut().zip(&z[i]) {
                        *wj += step * zj;
                    }
                    b += step;
                }
                alpha[i] = updated;
            }
        }
        let dual = alpha.iter().sum::<f64>() - 0.5 * (dot(&w, &w) + b * b);
        let change = (dual - previous).abs();
        previous = dual;
        summary.passes = pass + 1;
        if change <= params.tolerance && max_violation <= params.tolerance {
            summary.converged = true;
            break;
        }
    }

    summary.objective = hinge_objective(&w, b, &z, y, params.regularization);
    Ok(LinearModel {
        weights: w,
        bias: b,
        standardizer,
        training: Some(summary),
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
