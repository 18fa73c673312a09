//! Evaluation statistics for binary classifiers: confusion matrix, per-class
//! precision/recall/F1 with macro and weighted aggregates, and the error
//! rates reported alongside them (FPR, FNR, NPV, FDR, MAE, MSE, RMSE,
//! log loss, accuracy, sensitivity, specificity).
//!
//! Every ratio with a zero denominator is defined as 0. All arithmetic stays
//! in full f64 precision; rounding happens only when reports are rendered.

use thiserror::Error;

/// Clip bound applied to probabilities inside [`log_loss`].
pub const LOG_LOSS_CLIP: f64 = 1e-15;

/// Errors raised on malformed metric inputs.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input: metrics need at least one sample")]
    EmptyInput,
    #[error("label {value} at position {index} is not binary")]
    InvalidLabelValue { index: usize, value: u8 },
    #[error("probability {value} at position {index} is outside [0,1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
}

/// Binary confusion counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same counts with the roles of the classes exchanged, i.e. class 0
    /// treated as positive.
    pub fn swapped(&self) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

/// Per-class precision, recall, F1, and support for both classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassReport {
    /// Index 0 holds class 0 treated as positive, index 1 class 1.
    pub precision: [f64; 2],
    pub recall: [f64; 2],
    pub f1: [f64; 2],
    pub support: [usize; 2],
}

/// Macro (unweighted) and support-weighted averages over the two classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateReport {
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
}

/// Error-rate panel reported next to the confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub fpr: f64,
    pub fnr: f64,
    pub npv: f64,
    pub fdr: f64,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub log_loss: f64,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// True when any contributing ratio hit the zero-denominator convention,
    /// e.g. a test partition containing a single class.
    pub degenerate: bool,
}

fn validate_labels(values: &[u8]) -> Result<(), MetricsError> {
    for (index, &value) in values.iter().enumerate() {
        if value > 1 {
            return Err(MetricsError::InvalidLabelValue { index, value });
        }
    }
    Ok(())
}

fn check_lengths(left: usize, right: usize) -> Result<(), MetricsError> {
    if left != right {
        return Err(MetricsError::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

/// `numerator / denominator`, or 0 when the denominator is 0.
fn ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Counts true/false positives/negatives with class 1 as positive.
pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix, MetricsError> {
    check_lengths(y_true.len(), y_pred.len())?;
    validate_labels(y_true)?;
    validate_labels(y_pred)?;
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.fn_ += 1,
            _ => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// tp / (tp + fp), 0 when no positive predictions exist.
pub fn precision(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fp)
}

/// tp / (tp + fn), 0 when no positive samples exist.
pub fn recall(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fn_)
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1(cm: &ConfusionMatrix) -> f64 {
    let p = precision(cm);
    let r = recall(cm);
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// (tp + tn) / N.
pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp + cm.tn, cm.total())
}

/// Per-class metrics (each class treated as positive in turn) plus macro and
/// support-weighted aggregates.
pub fn class_report(
    y_true: &[u8],
    y_pred: &[u8],
) -> Result<(ClassReport, AggregateReport), MetricsError> {
    let cm1 = confusion_matrix(y_true, y_pred)?;
    let cm0 = cm1.swapped();
    let per_class = [cm0, cm1];

    let mut report = ClassReport {
        precision: [0.0; 2],
        recall: [0.0; 2],
        f1: [0.0; 2],
        support: [0; 2],
    };
    for (c, cm) in per_class.iter().enumerate() {
        report.precision[c] = precision(cm);
        report.recall[c] = recall(cm);
        report.f1[c] = f1(cm);
        report.support[c] = cm.tp + cm.fn_;
    }

    let n = cm1.total() as f64;
    let weight = [report.support[0] as f64 / n, report.support[1] as f64 / n];
    let aggregate = AggregateReport {
        macro_precision: (report.precision[0] + report.precision[1]) / 2.0,
        macro_recall: (report.recall[0] + report.recall[1]) / 2.0,
        macro_f1: (report.f1[0] + report.f1[1]) / 2.0,
        weighted_precision: weight[0] * report.precision[0] + weight[1] * report.precision[1],
        weighted_recall: weight[0] * report.recall[0] + weight[1] * report.recall[1],
        weighted_f1: weight[0] * report.f1[0] + weight[1] * report.f1[1],
    };
    Ok((report, aggregate))
}

/// Clipped binary cross-entropy over class-1 probabilities.
pub fn log_loss(y_true: &[u8], y_prob: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(y_true.len(), y_prob.len())?;
    validate_labels(y_true)?;
    let mut sum = 0.0;
    for (index, (&y, &p)) in y_true.iter().zip(y_prob).enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(MetricsError::ProbabilityOutOfRange { index, value: p });
        }
        let p = p.clamp(LOG_LOSS_CLIP, 1.0 - LOG_LOSS_CLIP);
        sum += if y == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(-sum / y_true.len() as f64)
}

/// Computes the full error panel from labels, hard predictions, and class-1
/// probabilities.
pub fn error_report(
    y_true: &[u8],
    y_pred: &[u8],
    y_prob: &[f64],
) -> Result<ErrorReport, MetricsError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let cm = confusion_matrix(y_true, y_pred)?;
    let ll = log_loss(y_true, y_prob)?;

    let mut mae = 0.0;
    let mut mse = 0.0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        let e = f64::from(t) - f64::from(p);
        mae += e.abs();
        mse += e * e;
    }
    let n = y_true.len() as f64;
    mae /= n;
    mse /= n;

    let degenerate = [
        cm.fp + cm.tn,
        cm.fn_ + cm.tp,
        cm.tn + cm.fn_,
        cm.fp + cm.tp,
    ]
    .contains(&0);

    Ok(ErrorReport {
        fpr: ratio(cm.fp, cm.fp + cm.tn),
        fnr: ratio(cm.fn_, cm.fn_ + cm.tp),
        npv: ratio(cm.tn, cm.tn + cm.fn_),
        fdr: ratio(cm.fp, cm.fp + cm.tp),
        mae,
        mse,
        rmse: mse.sqrt(),
        log_loss: ll,
        accuracy: accuracy(&cm),
        sensitivity: recall(&cm),
        specificity: recall(&cm.swapped()),
        degenerate,
    })
}
