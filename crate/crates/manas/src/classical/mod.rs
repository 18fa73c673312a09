//! The six classical classifiers of the comparative study: Multinomial
//! Naive Bayes, Logistic Regression, K-Nearest Neighbors, Decision Tree,
//! Random Forest, and a linear Support Vector Classifier, all trained on
//! Bag-of-Words count features.
//!
//! Every algorithm is implemented from first principles. Training is
//! deterministic given the feature matrix and hyperparameters (including the
//! seed), so repeated runs produce bit-identical models.

mod forest;
mod knn;
mod linear;
mod mnb;
mod tree;

pub use forest::ForestModel;
pub use knn::KnnModel;
pub use linear::LinearModel;
pub use mnb::MnbModel;
pub use tree::{TreeModel, TreeNode};

use crate::vectorize::{CountVector, FeatureMatrix};
use thiserror::Error;

/// Errors raised during classical training or inference.
#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("training data contains a single class; need both labels")]
    SingleClassTraining,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("feature dimension mismatch: model {expected}, input {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}

/// The classical algorithm inventory, in the row order the study's result
/// tables use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mnb,
    Rfc,
    Dtc,
    Svc,
    Knn,
    Lr,
}

impl Algorithm {
    /// All six algorithms in report row order.
    pub fn all() -> [Algorithm; 6] {
        [
            Algorithm::Mnb,
            Algorithm::Rfc,
            Algorithm::Dtc,
            Algorithm::Svc,
            Algorithm::Knn,
            Algorithm::Lr,
        ]
    }

    /// Lowercase identifier used in filenames and the CLI.
    pub fn key(&self) -> &'static str {
        match self {
            Algorithm::Mnb => "mnb",
            Algorithm::Rfc => "rfc",
            Algorithm::Dtc => "dtc",
            Algorithm::Svc => "svc",
            Algorithm::Knn => "knn",
            Algorithm::Lr => "lr",
        }
    }

    /// Display name used in report tables.
    pub fn display(&self) -> &'static str {
        match self {
            Algorithm::Mnb => "MNB",
            Algorithm::Rfc => "RFC",
            Algorithm::Dtc => "DTC",
            Algorithm::Svc => "SVC",
            Algorithm::Knn => "K-NN",
            Algorithm::Lr => "LR",
        }
    }

    pub fn parse(key: &str) -> Option<Algorithm> {
        match key.to_ascii_lowercase().as_str() {
            "mnb" => Some(Algorithm::Mnb),
            "rfc" => Some(Algorithm::Rfc),
            "dtc" => Some(Algorithm::Dtc),
            "svc" => Some(Algorithm::Svc),
            "knn" | "k-nn" => Some(Algorithm::Knn),
            "lr" => Some(Algorithm::Lr),
            _ => None,
        }
    }
}

/// Hyperparameters for all six algorithms.
///
/// The comparative study pins none of these, so the defaults follow common
/// toolkit settings and are fixed here for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalHyperparams {
    pub algorithm: Algorithm,
    pub mnb_alpha: f64,
    pub knn_k: usize,
    pub tree_max_depth: Option<usize>,
    pub rfc_n_trees: usize,
    pub rfc_sqrt_features: bool,
    pub rfc_bootstrap: bool,
    pub lr_learning_rate: f64,
    pub lr_l2: f64,
    pub lr_epochs: usize,
    pub svc_c: f64,
    pub svc_learning_rate: f64,
    pub svc_epochs: usize,
    pub seed: u64,
}

impl ClassicalHyperparams {
    pub fn new(algorithm: Algorithm) -> Self {
        ClassicalHyperparams {
            algorithm,
            mnb_alpha: 1.0,
            knn_k: 5,
            tree_max_depth: None,
            rfc_n_trees: 100,
            rfc_sqrt_features: true,
            rfc_bootstrap: true,
            lr_learning_rate: 0.1,
            lr_l2: 1e-4,
            lr_epochs: 300,
            svc_c: 1.0,
            svc_learning_rate: 0.01,
            svc_epochs: 300,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), ClassicalError> {
        let positive = [
            ("mnb_alpha", self.mnb_alpha),
            ("lr_learning_rate", self.lr_learning_rate),
            ("svc_c", self.svc_c),
            ("svc_learning_rate", self.svc_learning_rate),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ClassicalError::InvalidHyperparameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.lr_l2 < 0.0 || !self.lr_l2.is_finite() {
            return Err(ClassicalError::InvalidHyperparameter(format!(
                "lr_l2 must be non-negative, got {}",
                self.lr_l2
            )));
        }
        if self.knn_k == 0 || self.knn_k.is_multiple_of(2) {
            return Err(ClassicalError::InvalidHyperparameter(format!(
                "knn_k must be an odd positive integer, got {}",
                self.knn_k
            )));
        }
        if self.rfc_n_trees == 0 {
            return Err(ClassicalError::InvalidHyperparameter(
                "rfc_n_trees must be positive".into(),
            ));
        }
        if self.tree_max_depth == Some(0) {
            return Err(ClassicalError::InvalidHyperparameter(
                "tree_max_depth must be positive when set".into(),
            ));
        }
        if self.lr_epochs == 0 || self.svc_epochs == 0 {
            return Err(ClassicalError::InvalidHyperparameter(
                "epochs must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A trained classical model, tagged by algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedClassicalModel {
    Mnb(MnbModel),
    Lr(LinearModel),
    Svc(LinearModel),
    Knn(KnnModel),
    Dtc(TreeModel),
    Rfc(ForestModel),
}

impl TrainedClassicalModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            TrainedClassicalModel::Mnb(_) => Algorithm::Mnb,
            TrainedClassicalModel::Lr(_) => Algorithm::Lr,
            TrainedClassicalModel::Svc(_) => Algorithm::Svc,
            TrainedClassicalModel::Knn(_) => Algorithm::Knn,
            TrainedClassicalModel::Dtc(_) => Algorithm::Dtc,
            TrainedClassicalModel::Rfc(_) => Algorithm::Rfc,
        }
    }

    /// Feature dimension the model was trained on.
    pub fn dimension(&self) -> usize {
        match self {
            TrainedClassicalModel::Mnb(m) => m.dimension(),
            TrainedClassicalModel::Lr(m) | TrainedClassicalModel::Svc(m) => m.dimension(),
            TrainedClassicalModel::Knn(m) => m.dimension(),
            TrainedClassicalModel::Dtc(m) => m.dimension(),
            TrainedClassicalModel::Rfc(m) => m.dimension(),
        }
    }
}

fn require_both_classes(labels: &[u8]) -> Result<(), ClassicalError> {
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(ClassicalError::SingleClassTraining);
    }
    Ok(())
}

/// Trains the classifier selected by `params.algorithm`.
pub fn train_classifier(
    features: &FeatureMatrix,
    params: &ClassicalHyperparams,
) -> Result<TrainedClassicalModel, ClassicalError> {
    params.validate()?;
    if features.is_empty() {
        return Err(ClassicalError::InsufficientData(
            "feature matrix is empty".into(),
        ));
    }
    match params.algorithm {
        Algorithm::Mnb => {
            require_both_classes(&features.labels)?;
            Ok(TrainedClassicalModel::Mnb(mnb::train(features, params)))
        }
        Algorithm::Lr => {
            require_both_classes(&features.labels)?;
            Ok(TrainedClassicalModel::Lr(linear::train_logistic(
                features, params,
            )))
        }
        Algorithm::Svc => {
            require_both_classes(&features.labels)?;
            Ok(TrainedClassicalModel::Svc(linear::train_svc(
                features, params,
            )))
        }
        Algorithm::Knn => {
            if features.len() < params.knn_k {
                return Err(ClassicalError::InsufficientData(format!(
                    "KNN needs at least k={} training rows, got {}",
                    params.knn_k,
                    features.len()
                )));
            }
            Ok(TrainedClassicalModel::Knn(knn::train(features, params)))
        }
        Algorithm::Dtc => {
            require_both_classes(&features.labels)?;
            Ok(TrainedClassicalModel::Dtc(tree::train(features, params)))
        }
        Algorithm::Rfc => {
            require_both_classes(&features.labels)?;
            Ok(TrainedClassicalModel::Rfc(forest::train(features, params)))
        }
    }
}

fn check_dimension(model: &TrainedClassicalModel, vector: &CountVector) -> Result<(), ClassicalError> {
    let expected = model.dimension();
    if vector.dimension() != expected {
        return Err(ClassicalError::DimensionMismatch {
            expected,
            actual: vector.dimension(),
        });
    }
    Ok(())
}

/// Probability that `vector` belongs to class 1.
pub fn predict_proba(
    model: &TrainedClassicalModel,
    vector: &CountVector,
) -> Result<f64, ClassicalError> {
    check_dimension(model, vector)?;
    Ok(match model {
        TrainedClassicalModel::Mnb(m) => m.proba(vector),
        TrainedClassicalModel::Lr(m) | TrainedClassicalModel::Svc(m) => m.proba(vector),
        TrainedClassicalModel::Knn(m) => m.proba(vector),
        TrainedClassicalModel::Dtc(m) => m.proba(vector),
        TrainedClassicalModel::Rfc(m) => m.proba(vector),
    })
}

/// Hard class label: 1 iff [`predict_proba`] is at least 0.5.
pub fn predict(model: &TrainedClassicalModel, vector: &CountVector) -> Result<u8, ClassicalError> {
    Ok(if predict_proba(model, vector)? >= 0.5 { 1 } else { 0 })
}

/// Convenience: probabilities for a whole feature matrix, row order kept.
pub fn predict_proba_all(
    model: &TrainedClassicalModel,
    rows: &[CountVector],
) -> Result<Vec<f64>, ClassicalError> {
    rows.iter().map(|row| predict_proba(model, row)).collect()
}

/// Sigmoid shared by the linear models and SVC calibration.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Sparse dot product between a count vector and a dense weight vector.
pub(crate) fn dot(vector: &CountVector, weights: &[f64]) -> f64 {
    vector
        .entries()
        .map(|(index, count)| f64::from(count) * weights[index])
        .sum()
}
