//! Bagged CART trees: Gini splits at value midpoints, grown until every
//! leaf is pure (or its rows are indistinguishable), one tree per seeded
//! bootstrap sample, combined by majority vote.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::derive_seed;
use crate::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        label: Label,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A binary tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

fn gini(ones: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = ones as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn majority(ones: usize, total: usize) -> Label {
    // ties go to 1
    Label::from(2 * ones >= total)
}

struct BestSplit {
    cost: f64,
    feature: usize,
    threshold: f64,
}

#[allow(clippy::needless_range_loop)]
fn best_split(rows: &[Vec<f64>], labels: &[Label], idx: &[usize]) -> Option<BestSplit> {
    let dim = rows[idx[0]].len();
    let total = idx.len();
    let total_ones = idx.iter().filter(|&&i| labels[i] == 1).count();
    let mut best: Option<BestSplit> = None;
    let mut order = idx.to_vec();
    for feature in 0..dim {
        order.sort_by(|&a, &b| {
            rows[a][feature]
                .total_cmp(&rows[b][feature])
                .then(a.cmp(&b))
        });
        let mut left_ones = 0;
        for pos in 0..total - 1 {
            left_ones += usize::from(labels[order[pos]] == 1);
            let lo = rows[order[pos]][feature];
            let hi = rows[order[pos + 1]][feature];
            if lo == hi {
                continue;
            }
            let n_left = pos + 1;
            let n_right = total - n_left;
            let cost = n_left as f64 * gini(left_ones, n_left)
                + n_right as f64 * gini(total_ones - left_ones, n_right);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                let mut threshold = lo + 0.5 * (hi - lo);
                if threshold >= hi {
                    // adjacent floats: the midpoint rounds up to `hi`
                    threshold = lo;
                }
                best = Some(BestSplit {
                    cost,
                    feature,
                    threshold,
                });
            }
        }
    }
    best
}

impl DecisionTree {
    /// Grows a tree on the rows listed in `idx` (duplicates allowed).
    pub fn fit(rows: &[Vec<f64>], labels: &[Label], idx: &[usize]) -> Self {
        let mut nodes = vec![TreeNode::Leaf { label: 1 }];
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, idx.to_vec())];
        while let Some((slot, members)) = stack.pop() {
            let ones = members.iter().filter(|&&i| labels[i] == 1).count();
            let label = majority(ones, members.len());
            if ones == 0 || ones == members.len() {
                nodes[slot] = TreeNode::Leaf { label };
                continue;
            }
            let Some(split) = best_split(rows, labels, &members) else {
                nodes[slot] = TreeNode::Leaf { label };
                continue;
            };
            let (left, right): (Vec<usize>, Vec<usize>) = members
                .into_iter()
                .partition(|&i| rows[i][split.feature] <= split.threshold);
            let l = nodes.len();
            nodes.push(TreeNode::Leaf { label });
            nodes.push(TreeNode::Leaf { label });
            nodes[slot] = TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: l,
                right: l + 1,
            };
            stack.push((l + 1, right));
            stack.push((l, left));
        }
        Self { nodes }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { label } => return label,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 1usize)];
        while let Some((at, d)) = stack.pop() {
            best = best.max(d);
            if let TreeNode::Split { left, right, .. } = self.nodes[at] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }
}

/// The `n` row indices (drawn with replacement) that tree `tree_index`
/// of an ensemble seeded with `seed` is trained on.
pub fn bootstrap_indices(seed: u64, tree_index: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tree_index as u64));
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedTreesModel {
    pub trees: Vec<DecisionTree>,
}

impl BaggedTreesModel {
    /// Trees are grown in parallel; each draws its bootstrap from its own
    /// stream derived from `(seed, tree index)`, so the result does not
    /// depend on scheduling.
    pub fn fit(rows: &[Vec<f64>], labels: &[Label], n_trees: usize, seed: u64) -> Self {
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| DecisionTree::fit(rows, labels, &bootstrap_indices(seed, t, rows.len())))
            .collect();
        Self { trees }
    }

    fn votes_for_one(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict(x) == 1).count()
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        majority(self.votes_for_one(x), self.trees.len())
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.votes_for_one(x) as f64 / self.trees.len() as f64
    }
}
