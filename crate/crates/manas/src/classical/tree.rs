//! CART-style binary decision tree on Gini impurity.
//!
//! Thresholds are midpoints between adjacent distinct values of a feature
//! within the node's samples; a sample goes left when value ≤ threshold.
//! A node splits whenever it is impure, the depth limit permits, and some
//! candidate split leaves both children non-empty; zero-gain splits are
//! allowed, which is what guarantees pure leaves (hence 100% training
//! accuracy) on distinct rows. Equal gains resolve to the lower feature
//! index, then the lower threshold, by visiting candidates in that order.

use super::ClassicalHyperparams;
use crate::rng::Lcg64;
use crate::vectorize::{CountVector, FeatureMatrix};

/// One node of the arena; children are arena indices.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { counts: [usize; 2] },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A trained tree: arena of nodes with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    dimension: usize,
}

impl TreeModel {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub(crate) fn with_dimension(nodes: Vec<TreeNode>, dimension: usize) -> TreeModel {
        TreeModel { nodes, dimension }
    }

    /// Class-1 proportion of the leaf the vector reaches.
    pub fn proba(&self, vector: &CountVector) -> f64 {
        let mut index = 0;
        loop {
            match &self.nodes[index] {
                TreeNode::Leaf { counts } => {
                    let total = counts[0] + counts[1];
                    return counts[1] as f64 / total as f64;
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let value = f64::from(vector.count(*feature));
                    index = if value <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Candidate feature source for one split: `None` means all features.
pub(super) type FeaturePicker<'a> = dyn FnMut() -> Option<Vec<usize>> + 'a;

struct Builder<'a> {
    rows: &'a [CountVector],
    labels: &'a [u8],
    max_depth: Option<usize>,
    nodes: Vec<TreeNode>,
}

fn gini(counts: [usize; 2]) -> f64 {
    let total = (counts[0] + counts[1]) as f64;
    let p0 = counts[0] as f64 / total;
    let p1 = counts[1] as f64 / total;
    1.0 - p0 * p0 - p1 * p1
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl<'a> Builder<'a> {
    fn tally(&self, samples: &[usize]) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for &s in samples {
            counts[self.labels[s] as usize] += 1;
        }
        counts
    }

    /// Scans one feature for the highest-gain midpoint threshold. Candidates
    /// are visited in ascending threshold order, so the first strict
    /// improvement wins and ties keep the lower threshold.
    fn best_threshold(
        &self,
        samples: &[usize],
        feature: usize,
        parent_gini: f64,
    ) -> Option<(f64, f64)> {
        let mut values: Vec<(f64, u8)> = samples
            .iter()
            .map(|&s| (f64::from(self.rows[s].count(feature)), self.labels[s]))
            .collect();
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let total = self.tally(samples);
        let n = samples.len() as f64;
        let mut left = [0usize; 2];
        let mut best: Option<(f64, f64)> = None;
        for i in 0..values.len() - 1 {
            left[values[i].1 as usize] += 1;
            if values[i].0 == values[i + 1].0 {
                continue;
            }
            let threshold = (values[i].0 + values[i + 1].0) / 2.0;
            let right = [total[0] - left[0], total[1] - left[1]];
            let n_left = (left[0] + left[1]) as f64;
            let n_right = n - n_left;
            let weighted = (n_left * gini(left) + n_right * gini(right)) / n;
            let gain = parent_gini - weighted;
            if best.is_none() || gain > best.unwrap().0 {
                best = Some((gain, threshold));
            }
        }
        best
    }

    /// Best split over the candidate features, ties to the lower feature.
    fn best_split(
        &self,
        samples: &[usize],
        candidates: &[usize],
        parent_gini: f64,
    ) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        for &feature in candidates {
            if let Some((gain, threshold)) = self.best_threshold(samples, feature, parent_gini) {
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        gain,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn build_node(&mut self, samples: Vec<usize>, depth: usize, picker: &mut FeaturePicker) -> usize {
        let counts = self.tally(&samples);
        let at_limit = self.max_depth.is_some_and(|d| depth >= d);
        if counts[0] == 0 || counts[1] == 0 || at_limit {
            self.nodes.push(TreeNode::Leaf { counts });
            return self.nodes.len() - 1;
        }

        let parent_gini = gini(counts);
        let dimension = self.rows[samples[0]].dimension();
        let subset = picker();
        let mut split = match &subset {
            Some(features) => self.best_split(&samples, features, parent_gini),
            None => None,
        };
        if split.is_none() {
            // either all features were requested, or the sampled subset was
            // constant on this node; fall back to the full feature range
            let all: Vec<usize> = (0..dimension).collect();
            split = self.best_split(&samples, &all, parent_gini);
        }
        let Some(split) = split else {
            self.nodes.push(TreeNode::Leaf { counts });
            return self.nodes.len() - 1;
        };

        let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&s| f64::from(self.rows[s].count(split.feature)) <= split.threshold);

        // reserve the slot so child indices land after their parent
        let index = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { counts });
        let left = self.build_node(left_samples, depth + 1, picker);
        let right = self.build_node(right_samples, depth + 1, picker);
        self.nodes[index] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        index
    }
}

/// Builds one tree over `samples` (indices into `rows`, repeats allowed for
/// bootstrap resamples). `picker` supplies the candidate features per split.
pub(super) fn build_tree(
    rows: &[CountVector],
    labels: &[u8],
    samples: Vec<usize>,
    max_depth: Option<usize>,
    picker: &mut FeaturePicker,
) -> TreeModel {
    let dimension = rows.first().map_or(0, CountVector::dimension);
    let mut builder = Builder {
        rows,
        labels,
        max_depth,
        nodes: Vec::new(),
    };
    let root = builder.build_node(samples, 0, picker);
    debug_assert_eq!(root, 0);
    TreeModel::with_dimension(builder.nodes, dimension)
}

pub fn train(features: &FeatureMatrix, params: &ClassicalHyperparams) -> TreeModel {
    // the plain tree is deterministic; the seed feeds no randomness here
    let _ = Lcg64::new(params.seed);
    let samples: Vec<usize> = (0..features.len()).collect();
    build_tree(
        &features.rows,
        &features.labels,
        samples,
        params.tree_max_depth,
        &mut || None,
    )
}

#[cfg(test)]
pub(super) fn train_accuracy(model: &TreeModel, features: &FeatureMatrix) -> f64 {
    let correct = features
        .rows
        .iter()
        .zip(&features.labels)
        .filter(|(row, &label)| u8::from(model.proba(row) >= 0.5) == label)
        .count();
    correct as f64 / features.len() as f64
}
