//! Ordinary least squares baseline, solved by ridge-damped normal equations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

const RIDGE_LAMBDA: f64 = 1e-6;

/// Linear regression model: `predict(x) = intercept + weights . x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::ShapeError(format!(
                "expected {} features, got {}",
                self.weights.len(),
                x.len()
            )));
        }
        let dot: f64 = self.weights.iter().zip(x.values()).map(|(w, v)| w * v).sum();
        Ok(self.intercept + dot)
    }
}

/// Fits least squares on centered columns with a small ridge term for rank
/// safety. Zero-variance columns get weight 0; if every column is constant
/// the model degrades to intercept-only at the target mean.
pub fn fit_linear(features: &[FeatureVector], targets: &[f64]) -> Result<LinearModel> {
    if features.is_empty() {
        return Err(Error::EmptyInput("features"));
    }
    if features.len() != targets.len() {
        return Err(Error::ShapeError(format!(
            "{} feature rows vs {} targets",
            features.len(),
            targets.len()
        )));
    }
    let width = features[0].len();
    if features.iter().any(|f| f.len() != width) {
        return Err(Error::ShapeError("ragged feature rows".to_string()));
    }

    let n = features.len();
    let mean_y = targets.iter().sum::<f64>() / n as f64;

    let mut col_means = vec![0.0; width];
    for row in features {
        for (m, v) in col_means.iter_mut().zip(row.values()) {
            *m += v;
        }
    }
    for m in &mut col_means {
        *m /= n as f64;
    }

    let active: Vec<usize> = (0..width)
        .filter(|&j| {
            let var: f64 = features
                .iter()
                .map(|r| {
                    let d = r.values()[j] - col_means[j];
                    d * d
                })
                .sum::<f64>()
                / n as f64;
            var > 1e-12 * (1.0 + col_means[j] * col_means[j])
        })
        .collect();

    if active.is_empty() {
        return Ok(LinearModel { weights: vec![0.0; width], intercept: mean_y });
    }

    let x = DMatrix::from_fn(n, active.len(), |i, j| {
        features[i].values()[active[j]] - col_means[active[j]]
    });
    let y = DVector::from_fn(n, |i, _| targets[i] - mean_y);

    let mut xtx = x.transpose() * &x;
    for j in 0..active.len() {
        xtx[(j, j)] += RIDGE_LAMBDA;
    }
    let xty = x.transpose() * y;
    let solution = xtx
        .cholesky()
        .map(|c| c.solve(&xty))
        .ok_or_else(|| Error::ShapeError("normal equations not solvable".to_string()))?;

    let mut weights = vec![0.0; width];
    for (slot, &j) in active.iter().enumerate() {
        weights[j] = solution[slot];
    }
    let intercept = mean_y
        - weights
            .iter()
            .zip(&col_means)
            .map(|(w, m)| w * m)
            .sum::<f64>();

    if weights.iter().any(|w| !w.is_finite()) || !intercept.is_finite() {
        return Err(Error::ShapeError("non-finite linear coefficients".to_string()));
    }
    Ok(LinearModel { weights, intercept })
}
