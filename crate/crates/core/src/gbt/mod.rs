//! Gradient-boosted regression trees with pluggable loss (squared error or
//! pinball), plus a least-squares linear baseline.
//!
//! Pinball loss has a sign-only gradient and no useful Hessian, so trees are
//! grown on the gradient signal and every leaf is then refit to the
//! empirical q-quantile of the residuals it owns; squared error refits to
//! the residual mean, which coincides with the classic residual-fitting
//! step.

mod linear;
mod tree;

pub use linear::{fit_linear, LinearModel};
pub use tree::TreeNode;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::stats;

/// Training objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Loss {
    SquaredError,
    Pinball { q: f64 },
}

impl Loss {
    pub fn validate(&self) -> Result<()> {
        match self {
            Loss::SquaredError => Ok(()),
            Loss::Pinball { q } => {
                if *q > 0.0 && *q < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidQuantile(*q))
                }
            }
        }
    }

    /// Per-sample loss value.
    pub fn loss(&self, y: f64, yhat: f64) -> f64 {
        match self {
            Loss::SquaredError => {
                let d = y - yhat;
                d * d
            }
            Loss::Pinball { q } => {
                let d = y - yhat;
                if d >= 0.0 {
                    q * d
                } else {
                    (q - 1.0) * d
                }
            }
        }
    }
}

/// Pinball (quantile) loss: `q(y - yhat)` on underprediction,
/// `(q - 1)(y - yhat)` on overprediction.
pub fn pinball_loss(y: f64, yhat: f64, q: f64) -> Result<f64> {
    let loss = Loss::Pinball { q };
    loss.validate()?;
    Ok(loss.loss(y, yhat))
}

/// Boosting knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub num_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            num_rounds: 200,
            learning_rate: 0.1,
            max_depth: 6,
            min_samples_leaf: 20,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.num_rounds == 0 || self.max_depth == 0 || self.min_samples_leaf == 0 {
            return Err(Error::InvalidSpec(
                "num_rounds, max_depth and min_samples_leaf must be positive".to_string(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "learning_rate must be in (0,1], got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    /// Small tuning grid over learning rate, rounds and depth.
    pub fn default_grid() -> Vec<Hyperparams> {
        let mut grid = Vec::new();
        for &learning_rate in &[0.05, 0.1] {
            for &num_rounds in &[100usize, 300] {
                for &max_depth in &[4usize, 6] {
                    grid.push(Hyperparams {
                        num_rounds,
                        learning_rate,
                        max_depth,
                        min_samples_leaf: 20,
                        seed: 0,
                    });
                }
            }
        }
        grid
    }
}

/// A fitted boosted-tree ensemble.
///
/// `predict(x) = max(floor, base_score + learning_rate * sum(tree(x)))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub base_score: f64,
    pub learning_rate: f64,
    pub loss: Loss,
    pub num_features: usize,
    pub prediction_floor: f64,
    pub trees: Vec<TreeNode>,
    /// Mean training loss after each round (index 0 = base score only).
    #[serde(skip)]
    pub train_loss_curve: Vec<f64>,
}

impl BoostedModel {
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        self.check_width(x)?;
        Ok(self.raw_predict(x.values()).max(self.prediction_floor))
    }

    fn raw_predict(&self, values: &[f64]) -> f64 {
        // Accumulated tree by tree so truncated models and staged
        // checkpoints agree bit for bit.
        self.trees.iter().fold(self.base_score, |acc, t| {
            acc + self.learning_rate * t.evaluate(values)
        })
    }

    /// Predictions after each requested round count, one vector per entry of
    /// `at_rounds` (ascending). Walking the ensemble once serves every
    /// checkpoint, which is what the hyperparameter tuner relies on.
    pub fn staged_predictions(
        &self,
        xs: &[FeatureVector],
        at_rounds: &[usize],
    ) -> Result<Vec<Vec<f64>>> {
        for pair in at_rounds.windows(2) {
            if pair[1] < pair[0] {
                return Err(Error::InvalidSpec("checkpoints must be ascending".to_string()));
            }
        }
        if at_rounds.last().is_some_and(|&r| r > self.trees.len()) {
            return Err(Error::InvalidSpec(format!(
                "checkpoint beyond {} trained rounds",
                self.trees.len()
            )));
        }
        let mut out = vec![Vec::with_capacity(xs.len()); at_rounds.len()];
        for x in xs {
            self.check_width(x)?;
            let mut acc = self.base_score;
            let mut next_tree = 0usize;
            for (slot, &rounds) in at_rounds.iter().enumerate() {
                while next_tree < rounds {
                    acc += self.learning_rate * self.trees[next_tree].evaluate(x.values());
                    next_tree += 1;
                }
                out[slot].push(acc.max(self.prediction_floor));
            }
        }
        Ok(out)
    }

    /// A copy keeping only the first `rounds` trees; predictions match the
    /// corresponding staged checkpoint exactly.
    pub fn truncated(&self, rounds: usize) -> Result<BoostedModel> {
        if rounds > self.trees.len() {
            return Err(Error::InvalidSpec(format!(
                "cannot truncate to {rounds} rounds, model has {}",
                self.trees.len()
            )));
        }
        Ok(BoostedModel {
            trees: self.trees[..rounds].to_vec(),
            train_loss_curve: if self.train_loss_curve.is_empty() {
                Vec::new()
            } else {
                self.train_loss_curve[..=rounds].to_vec()
            },
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<BoostedModel> {
        Ok(serde_json::from_str(text)?)
    }

    fn check_width(&self, x: &FeatureVector) -> Result<()> {
        if x.len() != self.num_features {
            return Err(Error::ShapeError(format!(
                "expected {} features, got {}",
                self.num_features,
                x.len()
            )));
        }
        Ok(())
    }
}

/// Trains a boosted ensemble with exact greedy splits.
pub fn fit(
    features: &[FeatureVector],
    targets: &[f64],
    loss: Loss,
    hp: &Hyperparams,
) -> Result<BoostedModel> {
    loss.validate()?;
    hp.validate()?;
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
    if features.len() < hp.min_samples_leaf {
        return Err(Error::InsufficientData(format!(
            "{} samples with min_samples_leaf {}",
            features.len(),
            hp.min_samples_leaf
        )));
    }
    let width = features[0].len();
    if features.iter().any(|f| f.len() != width) {
        return Err(Error::ShapeError("ragged feature rows".to_string()));
    }

    let n = features.len();
    let cols: Vec<Vec<f64>> = (0..width)
        .map(|f| features.iter().map(|row| row.values()[f]).collect())
        .collect();

    let base_score = match loss {
        Loss::SquaredError => stats::mean(targets),
        Loss::Pinball { q } => stats::quantile(targets, q),
    };

    let mut preds = vec![base_score; n];
    let mut curve = Vec::with_capacity(hp.num_rounds + 1);
    curve.push(mean_loss(&loss, targets, &preds));

    let params = tree::GrowParams {
        max_depth: hp.max_depth,
        min_samples_leaf: hp.min_samples_leaf,
    };
    let root_order = tree::presort(&cols, n);

    let mut trees = Vec::with_capacity(hp.num_rounds);
    for _ in 0..hp.num_rounds {
        let grads: Vec<f64> = match loss {
            Loss::SquaredError => targets.iter().zip(&preds).map(|(y, p)| y - p).collect(),
            Loss::Pinball { q } => targets
                .iter()
                .zip(&preds)
                .map(|(y, p)| if y >= p { q } else { q - 1.0 })
                .collect(),
        };

        let built = tree::grow(&cols, &grads, root_order.clone(), 0, &params);
        let tree = tree::finalize(built, &mut |samples| {
            let residuals: Vec<f64> = samples
                .iter()
                .map(|&i| targets[i as usize] - preds[i as usize])
                .collect();
            let value = match loss {
                Loss::SquaredError => stats::mean(&residuals),
                Loss::Pinball { q } => stats::quantile(&residuals, q),
            };
            for &i in samples {
                preds[i as usize] += hp.learning_rate * value;
            }
            value
        });
        trees.push(tree);
        curve.push(mean_loss(&loss, targets, &preds));
    }

    Ok(BoostedModel {
        base_score,
        learning_rate: hp.learning_rate,
        loss,
        num_features: width,
        prediction_floor: 0.0,
        trees,
        train_loss_curve: curve,
    })
}

fn mean_loss(loss: &Loss, targets: &[f64], preds: &[f64]) -> f64 {
    targets
        .iter()
        .zip(preds)
        .map(|(y, p)| loss.loss(*y, *p))
        .sum::<f64>()
        / targets.len() as f64
}
