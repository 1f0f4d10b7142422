//! Exact greedy regression-tree growing on pre-sorted feature index lists.
//!
//! Each node carries one index list per feature, already sorted by that
//! feature's value; splits scan candidates at boundaries between distinct
//! values and children are produced by order-preserving partition, so no
//! re-sorting happens below the root.

use serde::{Deserialize, Serialize};

/// A fitted regression tree node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        value: f64,
    },
}

impl TreeNode {
    /// Routes a sample to its leaf value. `x <= threshold` goes left.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Internal { feature_index, threshold, left, right } => {
                    node = if x[*feature_index] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.num_leaves() + right.num_leaves(),
        }
    }
}

/// Tree structure before leaf values are assigned: leaves hold the training
/// samples they own so the caller can refit values against any loss.
pub(crate) enum BuildNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<BuildNode>,
        right: Box<BuildNode>,
    },
    Leaf {
        samples: Vec<u32>,
    },
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Sorts sample indices by each feature once; ties keep index order.
pub(crate) fn presort(cols: &[Vec<f64>], n: usize) -> Vec<Vec<u32>> {
    cols.iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            idx
        })
        .collect()
}

/// Grows a tree on `grads` as regression targets.
pub(crate) fn grow(
    cols: &[Vec<f64>],
    grads: &[f64],
    sorted: Vec<Vec<u32>>,
    depth: usize,
    params: &GrowParams,
) -> BuildNode {
    let n = sorted[0].len();
    if depth >= params.max_depth || n < 2 * params.min_samples_leaf {
        return BuildNode::Leaf { samples: sorted.into_iter().next().expect("one feature list") };
    }

    let total: f64 = sorted[0].iter().map(|&i| grads[i as usize]).sum();
    let parent_score = total * total / n as f64;
    // Guard against float dust being mistaken for a real gain.
    let min_gain = 1e-12 * (1.0 + parent_score.abs());

    let mut best: Option<BestSplit> = None;
    for (feature, order) in sorted.iter().enumerate() {
        let col = &cols[feature];
        let mut left_sum = 0.0;
        let mut left_n = 0usize;
        let mut prev_value = col[order[0] as usize];
        for &i in order {
            let value = col[i as usize];
            if value > prev_value {
                let right_n = n - left_n;
                if left_n >= params.min_samples_leaf && right_n >= params.min_samples_leaf {
                    let right_sum = total - left_sum;
                    let gain = left_sum * left_sum / left_n as f64
                        + right_sum * right_sum / right_n as f64
                        - parent_score;
                    // Strict improvement keeps the lowest feature index and
                    // the lowest threshold on ties.
                    if gain > min_gain && best.as_ref().map_or(true, |b| gain > b.gain) {
                        best = Some(BestSplit {
                            gain,
                            feature,
                            threshold: 0.5 * (prev_value + value),
                        });
                    }
                }
                prev_value = value;
            }
            left_sum += grads[i as usize];
            left_n += 1;
        }
    }

    let Some(split) = best else {
        return BuildNode::Leaf { samples: sorted.into_iter().next().expect("one feature list") };
    };

    let split_col = &cols[split.feature];
    let mut left_lists = Vec::with_capacity(sorted.len());
    let mut right_lists = Vec::with_capacity(sorted.len());
    for order in sorted {
        let mut left = Vec::with_capacity(order.len());
        let mut right = Vec::with_capacity(order.len());
        for i in order {
            if split_col[i as usize] <= split.threshold {
                left.push(i);
            } else {
                right.push(i);
            }
        }
        left_lists.push(left);
        right_lists.push(right);
    }

    BuildNode::Internal {
        feature_index: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(cols, grads, left_lists, depth + 1, params)),
        right: Box::new(grow(cols, grads, right_lists, depth + 1, params)),
    }
}

/// Converts a grown structure into a `TreeNode`, computing each leaf value
/// from its samples (and reporting the assignment to the caller).
pub(crate) fn finalize(
    node: BuildNode,
    leaf_value: &mut impl FnMut(&[u32]) -> f64,
) -> TreeNode {
    match node {
        BuildNode::Leaf { samples } => TreeNode::Leaf { value: leaf_value(&samples) },
        BuildNode::Internal { feature_index, threshold, left, right } => TreeNode::Internal {
            feature_index,
            threshold,
            left: Box::new(finalize(*left, leaf_value)),
            right: Box::new(finalize(*right, leaf_value)),
        },
    }
}
