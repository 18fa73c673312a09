//! Random forest: bagged decision trees with per-split feature subsampling.
//!
//! Tree `t` draws all of its randomness from its own generator seeded with
//! `seed + t`, so trees are independent of each other and the forest is
//! reproducible whether trees are built sequentially or in parallel.

use super::tree::{build_tree, TreeModel};
use super::ClassicalHyperparams;
use crate::rng::Lcg64;
use crate::vectorize::{CountVector, FeatureMatrix};

/// Trained forest. Prediction averages per-tree leaf probabilities (soft
/// voting) and thresholds the mean at 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub tree_seeds: Vec<u64>,
}

impl ForestModel {
    pub fn dimension(&self) -> usize {
        self.trees.first().map_or(0, TreeModel::dimension)
    }

    /// Mean class-1 probability over all trees.
    pub fn proba(&self, vector: &CountVector) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.proba(vector)).sum();
        sum / self.trees.len() as f64
    }
}

pub fn train(features: &FeatureMatrix, params: &ClassicalHyperparams) -> ForestModel {
    let n = features.len();
    let dimension = features.dimension();
    let subset_size = if params.rfc_sqrt_features {
        ((dimension as f64).sqrt().floor() as usize).max(1)
    } else {
        dimension
    };

    let tree_seeds: Vec<u64> = (0..params.rfc_n_trees as u64)
        .map(|t| params.seed.wrapping_add(t))
        .collect();
    let trees = tree_seeds
        .iter()
        .map(|&tree_seed| {
            let mut rng = Lcg64::new(tree_seed);
            let samples: Vec<usize> = if params.rfc_bootstrap {
                (0..n).map(|_| rng.below(n)).collect()
            } else {
                (0..n).collect()
            };
            let mut picker = || {
                if subset_size < dimension {
                    Some(rng.sample_indices(dimension, subset_size))
                } else {
                    None
                }
            };
            build_tree(
                &features.rows,
                &features.labels,
                samples,
                params.tree_max_depth,
                &mut picker,
            )
        })
        .collect();

    ForestModel { trees, tree_seeds }
}

#[cfg(test)]
mod tests {
    use super::super::tests::synthetic_features;
    use super::super::{
        predict_proba, train_classifier, Algorithm, ClassicalHyperparams, TrainedClassicalModel,
    };
    use super::*;

    fn forest_of(model: TrainedClassicalModel) -> ForestModel {
        match model {
            TrainedClassicalModel::Rfc(f) => f,
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_tree_without_randomness_equals_the_plain_tree() {
        let (train, test) = synthetic_features(120, 0.7, 0.75, 83);
        let mut rfc_params = ClassicalHyperparams::new(Algorithm::Rfc);
        rfc_params.rfc_n_trees = 1;
        rfc_params.rfc_bootstrap = false;
        rfc_params.rfc_sqrt_features = false;
        let forest = forest_of(train_classifier(&train, &rfc_params).unwrap());

        let dtc_params = ClassicalHyperparams::new(Algorithm::Dtc);
        let tree = match train_classifier(&train, &dtc_params).unwrap() {
            TrainedClassicalModel::Dtc(t) => t,
            _ => unreachable!(),
        };

        assert_eq!(forest.trees.len(), 1);
        assert_eq!(forest.trees[0], tree);
        for row in train.rows.iter().chain(&test.rows) {
            assert_eq!(
                forest.proba(row).to_bits(),
                tree.proba(row).to_bits()
            );
        }
    }

    #[test]
    fn forest_has_the_configured_tree_count_and_seeds() {
        let (train, _) = synthetic_features(80, 0.7, 0.75, 89);
        let mut params = ClassicalHyperparams::new(Algorithm::Rfc);
        params.rfc_n_trees = 17;
        params.seed = 1000;
        let forest = forest_of(train_classifier(&train, &params).unwrap());
        assert_eq!(forest.trees.len(), 17);
        let expected: Vec<u64> = (1000..1017).collect();
        assert_eq!(forest.tree_seeds, expected);
    }

    #[test]
    fn forest_probability_is_the_tree_average() {
        let (train, test) = synthetic_features(100, 0.6, 0.75, 97);
        let mut params = ClassicalHyperparams::new(Algorithm::Rfc);
        params.rfc_n_trees = 25;
        let model = train_classifier(&train, &params).unwrap();
        let forest = match &model {
            TrainedClassicalModel::Rfc(f) => f,
            _ => unreachable!(),
        };
        for row in &test.rows {
            let per_tree: Vec<f64> = forest.trees.iter().map(|t| t.proba(row)).collect();
            let mean = per_tree.iter().sum::<f64>() / per_tree.len() as f64;
            let p = predict_proba(&model, row).unwrap();
            assert_eq!(p.to_bits(), mean.to_bits());
            let lo = per_tree.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = per_tree.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
        }
    }

    #[test]
    fn different_seeds_build_different_forests() {
        let (train, _) = synthetic_features(100, 0.6, 0.75, 101);
        let mut a_params = ClassicalHyperparams::new(Algorithm::Rfc);
        a_params.rfc_n_trees = 5;
        let mut b_params = a_params.clone();
        b_params.seed = 12345;
        let a = forest_of(train_classifier(&train, &a_params).unwrap());
        let b = forest_of(train_classifier(&train, &b_params).unwrap());
        assert_ne!(a, b);
    }

    #[test]
    fn bootstrap_trees_differ_from_each_other() {
        let (train, _) = synthetic_features(100, 0.6, 0.75, 103);
        let mut params = ClassicalHyperparams::new(Algorithm::Rfc);
        params.rfc_n_trees = 8;
        let forest = forest_of(train_classifier(&train, &params).unwrap());
        let distinct = forest
            .trees
            .iter()
            .any(|t| *t != forest.trees[0]);
        assert!(distinct, "all bootstrap trees came out identical");
    }
}
