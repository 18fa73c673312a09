//! K-Nearest Neighbors over raw count vectors with euclidean distance.

use super::ClassicalHyperparams;
use crate::vectorize::{CountVector, FeatureMatrix};

/// Stored training data: KNN defers all work to query time.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub rows: Vec<CountVector>,
    pub labels: Vec<u8>,
    pub k: usize,
}

impl KnnModel {
    pub fn dimension(&self) -> usize {
        self.rows.first().map_or(0, CountVector::dimension)
    }

    /// Squared euclidean distance over the union of non-zero indices.
    fn distance_squared(a: &CountVector, b: &CountVector) -> f64 {
        let mut sum = 0.0;
        let mut ia = a.entries().peekable();
        let mut ib = b.entries().peekable();
        loop {
            match (ia.peek().copied(), ib.peek().copied()) {
                (Some((xi, xc)), Some((yi, yc))) => {
                    if xi == yi {
                        let d = f64::from(xc) - f64::from(yc);
                        sum += d * d;
                        ia.next();
                        ib.next();
                    } else if xi < yi {
                        sum += f64::from(xc) * f64::from(xc);
                        ia.next();
                    } else {
                        sum += f64::from(yc) * f64::from(yc);
                        ib.next();
                    }
                }
                (Some((_, xc)), None) => {
                    sum += f64::from(xc) * f64::from(xc);
                    ia.next();
                }
                (None, Some((_, yc))) => {
                    sum += f64::from(yc) * f64::from(yc);
                    ib.next();
                }
                (None, None) => return sum,
            }
        }
    }

    /// Fraction of the k nearest training rows labeled 1. Distance ties are
    /// broken by lower training index, so the neighbor set is deterministic.
    pub fn proba(&self, vector: &CountVector) -> f64 {
        let mut distances: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(index, row)| (Self::distance_squared(row, vector), index))
            .collect();
        distances.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let votes = distances[..self.k]
            .iter()
            .filter(|&&(_, index)| self.labels[index] == 1)
            .count();
        votes as f64 / self.k as f64
    }
}

pub fn train(features: &FeatureMatrix, params: &ClassicalHyperparams) -> KnnModel {
    KnnModel {
        rows: features.rows.clone(),
        labels: features.labels.clone(),
        k: params.knn_k,
    }
}
