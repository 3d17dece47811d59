//! Stratified cross-validation, confusion counts, rate metrics and ROC.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{self, ClassifierError, TrainConfig};
use crate::features::LabeledDataset;
use crate::seed::derive_seed;
use crate::Label;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("label {label} has {count} row(s), fewer than the {folds} folds")]
    TooFewPerClass {
        label: Label,
        count: usize,
        folds: usize,
    },
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("nothing to evaluate")]
    Empty,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("ROC needs both classes; only label {0} present")]
    SingleClassLabels(Label),
    #[error("score {index} is not finite")]
    NonFiniteScore { index: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(Label),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

/// Splits row indices into `k` folds, class by class.
///
/// Each class is shuffled with a seeded RNG and dealt round-robin, the
/// deal continuing across classes so fold sizes also differ by at most 1.
/// Indices within a fold are ascending.
pub fn stratified_kfold(
    labels: &[Label],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::TooFewFolds(k));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(EvalError::InvalidLabel(bad));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for label in [0, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.len() < k {
            return Err(EvalError::TooFewPerClass {
                label,
                count: members.len(),
                folds: k,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        self.tp += other.tp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
        self.fp += other.fp;
    }
}

impl fmt::Display for ConfusionMatrix {
    /// 2×2 table, rows = true class, columns = predicted class.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = [self.tp, self.fn_, self.tn, self.fp]
            .iter()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1)
            .max(3);
        writeln!(
            f,
            "{:>10} {:>w$} {:>w$}",
            "",
            "pred+",
            "pred-",
            w = w.max(5)
        )?;
        writeln!(
            f,
            "{:>10} {:>w$} {:>w$}",
            "true+",
            self.tp,
            self.fn_,
            w = w.max(5)
        )?;
        write!(
            f,
            "{:>10} {:>w$} {:>w$}",
            "true-",
            self.fp,
            self.tn,
            w = w.max(5)
        )
    }
}

/// Counts predictions against truth with respect to the `positive` label.
pub fn confusion(
    y_true: &[Label],
    y_pred: &[Label],
    positive: Label,
) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == positive, p == positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, recall, specificity, precision and F1, as unrounded percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub rec: f64,
    pub spe: f64,
    pub pre: f64,
    pub f1: f64,
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Acc {:.2} Rec {:.2} Spe {:.2} Pre {:.2} F1 {:.2}",
            self.acc, self.rec, self.spe, self.pre, self.f1
        )
    }
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// The five rate metrics. A zero denominator yields 0.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let rec = pct(cm.tp, cm.tp + cm.fn_);
    let pre = pct(cm.tp, cm.tp + cm.fp);
    let f1 = if pre + rec > 0.0 {
        2.0 * pre * rec / (pre + rec)
    } else {
        0.0
    };
    Ok(MetricsReport {
        acc: pct(cm.tp + cm.tn, cm.total()),
        rec,
        spe: pct(cm.tn, cm.tn + cm.fp),
        pre,
        f1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Predict positive when `score >= threshold`; +∞ for the origin.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC over the distinct score values, highest first, with label 1 as the
/// positive class. Tied scores form one point; AUC is the trapezoidal area,
/// which equals the Mann–Whitney statistic with ties counted ½.
pub fn roc(scores: &[f64], y_true: &[Label]) -> Result<RocCurve, EvalError> {
    if scores.len() != y_true.len() {
        return Err(EvalError::LengthMismatch(scores.len(), y_true.len()));
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore { index });
    }
    let positives = y_true.iter().filter(|&&l| l == 1).count();
    let negatives = y_true.len() - positives;
    if positives == 0 {
        return Err(EvalError::SingleClassLabels(0));
    }
    if negatives == 0 {
        return Err(EvalError::SingleClassLabels(1));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == threshold {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // trapezoid in count units, normalized once at the end
        area += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 * 0.5;
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold,
        });
    }
    Ok(RocCurve {
        points,
        auc: area / (positives as f64 * negatives as f64),
    })
}

/// Pooled out-of-fold results for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    pub roc: RocCurve,
    /// Out-of-fold score for label 1, per dataset row.
    pub scores: Vec<f64>,
    pub predictions: Vec<Label>,
    pub positive: Label,
}

/// Stratified k-fold cross-validation with every row predicted exactly once.
///
/// Folds depend only on `(labels, k, seed)`, so configurations evaluated
/// with the same seed share splits. Bagged-tree models in fold `f` are
/// seeded with `derive_seed(config.seed, f)`. Folds run in parallel and
/// are pooled in fold order.
///
/// `positive` selects which label counts as positive for the confusion
/// matrix and the ROC (scores are mirrored to `1 − score` when it is 0).
pub fn cross_validate(
    config: &TrainConfig,
    data: &LabeledDataset,
    k: usize,
    seed: u64,
    positive: Label,
) -> Result<CvReport, EvalError> {
    if positive > 1 {
        return Err(EvalError::InvalidLabel(positive));
    }
    let folds = stratified_kfold(data.labels(), k, seed)?;
    let n = data.len();

    // (row index, predicted label, score) per held-out row
    type FoldResult = Result<Vec<(usize, Label, f64)>, EvalError>;
    let fold_results: Vec<FoldResult> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
            let mut fold_config = config.clone();
            fold_config.seed = derive_seed(config.seed, f as u64);
            let model = classifiers::fit(&fold_config, &data.subset(&train))?;
            test.iter()
                .map(|&i| {
                    let x = &data.rows()[i];
                    Ok((i, model.predict(x)?, model.score(x)?))
                })
                .collect()
        })
        .collect();

    let mut predictions = vec![0; n];
    let mut scores = vec![0.0; n];
    for fold in fold_results {
        for (i, p, s) in fold? {
            predictions[i] = p;
            scores[i] = s;
        }
    }

    let cm = confusion(data.labels(), &predictions, positive)?;
    let truth: Vec<Label> = data
        .labels()
        .iter()
        .map(|&l| Label::from(l == positive))
        .collect();
    let pos_scores: Vec<f64> = if positive == 1 {
        scores.clone()
    } else {
        scores.iter().map(|s| 1.0 - s).collect()
    };
    Ok(CvReport {
        confusion: cm,
        metrics: metrics(&cm)?,
        roc: roc(&pos_scores, &truth)?,
        scores,
        predictions,
        positive,
    })
}
