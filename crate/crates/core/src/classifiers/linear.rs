use serde::{Deserialize, Serialize};

use super::{dot, sigmoid};
use crate::Label;

/// Weight vector and bias; decision value `w·x + b`, score its sigmoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Newton iterations (logreg) or epochs (svm) actually run.
    pub iterations: usize,
}

impl LinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from(self.decision(x) >= 0.0)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }
}
