//! Five binary classifiers behind one fit / predict / score contract.
//!
//! | algorithm      | fitted parameters                               | score             |
//! |----------------|-------------------------------------------------|-------------------|
//! | `knn`          | training rows and labels                        | neighbor vote share |
//! | `lda`          | class means, pooled inverse covariance, priors  | Gaussian posterior |
//! | `logreg`       | weights + bias (damped Newton, L2)              | sigmoid           |
//! | `svm_linear`   | weights + bias (dual coordinate descent, hinge) | sigmoid of margin |
//! | `bagged_trees` | CART trees on seeded bootstraps                 | tree vote share   |
//!
//! `score` is the confidence for label 1, and `predict` returns 1 exactly
//! when `score ≥ 0.5`, except for kNN vote ties, which go to the label of
//! the single nearest neighbor.

mod knn;
mod lda;
mod linear;
mod logreg;
mod scaler;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::LabeledDataset;
use crate::Label;

pub use knn::KnnModel;
pub use lda::LdaModel;
pub use linear::LinearModel;
pub use logreg::{logreg_objective, LOGREG_GRADIENT_TOL, LOGREG_MAX_ITER};
pub use scaler::Scaler;
pub use svm::{svm_duality_gap, SVM_GAP_TOL, SVM_MAX_EPOCHS};
pub use tree::{bootstrap_indices, BaggedTreesModel, DecisionTree, TreeNode};

/// Version tag written into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("training data contains only label {0}; both classes are required")]
    SingleClassData(Label),
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("feature {index} of row {row} is not finite")]
    NonFiniteFeature { row: usize, index: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("model blob: {0}")]
    Serialization(String),
    #[error("model blob has format version {0}, expected {MODEL_FORMAT_VERSION}")]
    UnsupportedVersion(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Knn,
    Lda,
    #[serde(rename = "logreg")]
    LogReg,
    SvmLinear,
    BaggedTrees,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::BaggedTrees,
        Algorithm::Knn,
        Algorithm::Lda,
        Algorithm::LogReg,
        Algorithm::SvmLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Knn => "knn",
            Algorithm::Lda => "lda",
            Algorithm::LogReg => "logreg",
            Algorithm::SvmLinear => "svm_linear",
            Algorithm::BaggedTrees => "bagged_trees",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ClassifierError::UnknownAlgorithm(s.to_string()))
    }
}

/// Hyperparameters for [`fit`]. Only the fields of the chosen algorithm
/// are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    /// Neighbor count for kNN.
    pub k: usize,
    /// Soft-margin weight for the SVM.
    pub c: f64,
    /// L2 strength for logistic regression.
    pub lambda: f64,
    /// Ensemble size for bagged trees.
    pub n_trees: usize,
    /// Bootstrap RNG seed for bagged trees.
    pub seed: u64,
    /// Z-score each feature with training-set statistics before fitting.
    pub standardize: bool,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            k: 10,
            c: 1.0,
            lambda: 1e-4,
            n_trees: 30,
            seed: 0,
            standardize: false,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |msg: String| Err(ClassifierError::InvalidConfig(msg));
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if self.n_trees < 1 {
            return bad("n_trees must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Knn(KnnModel),
    Lda(LdaModel),
    #[serde(rename = "logreg")]
    LogReg(LinearModel),
    SvmLinear(LinearModel),
    BaggedTrees(BaggedTreesModel),
}

/// A fitted classifier. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub feature_dim: usize,
    pub scaler: Option<Scaler>,
    pub params: ModelParams,
}

#[derive(Serialize, Deserialize)]
struct ModelBlob {
    format_version: u32,
    model: TrainedModel,
}

impl TrainedModel {
    pub fn to_json(&self) -> Result<String, ClassifierError> {
        serde_json::to_string(&ModelBlob {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })
        .map_err(|e| ClassifierError::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, ClassifierError> {
        let blob: ModelBlob =
            serde_json::from_str(s).map_err(|e| ClassifierError::Serialization(e.to_string()))?;
        if blob.format_version != MODEL_FORMAT_VERSION {
            return Err(ClassifierError::UnsupportedVersion(blob.format_version));
        }
        Ok(blob.model)
    }

    fn check_input(&self, x: &[f64]) -> Result<(), ClassifierError> {
        if x.len() != self.feature_dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.feature_dim,
                got: x.len(),
            });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature { row: 0, index });
        }
        Ok(())
    }

    fn with_scaled<T>(&self, x: &[f64], f: impl FnOnce(&[f64]) -> T) -> Result<T, ClassifierError> {
        self.check_input(x)?;
        Ok(match &self.scaler {
            Some(s) => f(&s.transform(x)),
            None => f(x),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label, ClassifierError> {
        self.with_scaled(x, |x| match &self.params {
            ModelParams::Knn(m) => m.predict(x),
            ModelParams::Lda(m) => m.predict(x),
            ModelParams::LogReg(m) | ModelParams::SvmLinear(m) => m.predict(x),
            ModelParams::BaggedTrees(m) => m.predict(x),
        })
    }

    pub fn score(&self, x: &[f64]) -> Result<f64, ClassifierError> {
        self.with_scaled(x, |x| match &self.params {
            ModelParams::Knn(m) => m.score(x),
            ModelParams::Lda(m) => m.score(x),
            ModelParams::LogReg(m) | ModelParams::SvmLinear(m) => m.score(x),
            ModelParams::BaggedTrees(m) => m.score(x),
        })
    }
}

/// Fits the configured algorithm.
pub fn fit(config: &TrainConfig, data: &LabeledDataset) -> Result<TrainedModel, ClassifierError> {
    config.validate()?;
    let dim = data.dim();
    if dim == 0 {
        return Err(ClassifierError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    for (row, r) in data.rows().iter().enumerate() {
        if let Some(index) = r.iter().position(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature { row, index });
        }
    }
    for label in [0, 1] {
        if data.count_label(label) == 0 {
            return Err(ClassifierError::SingleClassData(1 - label));
        }
    }

    let scaler = config.standardize.then(|| Scaler::fit(data.rows()));
    let scaled;
    let rows: &[Vec<f64>] = match &scaler {
        Some(s) => {
            scaled = data
                .rows()
                .iter()
                .map(|r| s.transform(r))
                .collect::<Vec<_>>();
            &scaled
        }
        None => data.rows(),
    };
    let labels = data.labels();

    let params = match config.algorithm {
        Algorithm::Knn => ModelParams::Knn(KnnModel::fit(rows, labels, config.k)),
        Algorithm::Lda => ModelParams::Lda(LdaModel::fit(rows, labels)),
        Algorithm::LogReg => ModelParams::LogReg(logreg::fit(rows, labels, config.lambda)),
        Algorithm::SvmLinear => ModelParams::SvmLinear(svm::fit(rows, labels, config.c)),
        Algorithm::BaggedTrees => ModelParams::BaggedTrees(BaggedTreesModel::fit(
            rows,
            labels,
            config.n_trees,
            config.seed,
        )),
    };
    Ok(TrainedModel {
        algorithm: config.algorithm,
        feature_dim: dim,
        scaler,
        params,
    })
}

pub fn predict(model: &TrainedModel, x: &[f64]) -> Result<Label, ClassifierError> {
    model.predict(x)
}

pub fn score(model: &TrainedModel, x: &[f64]) -> Result<f64, ClassifierError> {
    model.score(x)
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
