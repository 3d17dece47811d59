//! EMD-based acoustic signal classification.
//!
//! The pipeline runs in five stages, one module each:
//!
//! * [`signal`] decodes RIFF/WAVE audio and z-normalizes it.
//! * [`emd`] splits a signal into up to five intrinsic mode functions by
//!   envelope-mean sifting.
//! * [`features`] turns a decomposition into a fixed 45-value feature row
//!   (9 measures for each of 5 IMFs).
//! * [`classifiers`] fits kNN, LDA, logistic regression, a linear SVM and
//!   bagged CART trees behind one fit/predict/score contract.
//! * [`evaluation`] runs stratified k-fold cross-validation and reports
//!   confusion matrices, the five rate metrics and ROC/AUC.

pub mod classifiers;
pub mod emd;
pub mod evaluation;
pub mod features;
pub mod signal;

mod seed;

pub use classifiers::{fit, predict, score, Algorithm, ClassifierError, TrainConfig, TrainedModel};
pub use emd::{decompose, EmdError, ImfDecomposition, DEFAULT_MAX_IMFS};
pub use evaluation::{
    confusion, cross_validate, metrics, roc, stratified_kfold, ConfusionMatrix, CvReport,
    EvalError, MetricsReport, RocCurve,
};
pub use features::{
    extract_feature_vector, FeatureError, FeatureVector, LabeledDataset, FEATURES_PER_IMF,
    FEATURE_DIM,
};
pub use seed::derive_seed;
pub use signal::{decode_wav, encode_wav_pcm16, z_normalize, Signal, SignalError};

/// Binary class label: 0 = negative, 1 = positive.
pub type Label = u8;

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Emd(#[from] EmdError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
