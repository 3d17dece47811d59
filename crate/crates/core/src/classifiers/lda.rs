use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{dot, sigmoid};
use crate::Label;

/// Ridge added to the pooled covariance diagonal, relative to trace/dim.
pub const LDA_RIDGE: f64 = 1e-6;

/// Two-class linear discriminant with a shared (pooled) covariance.
///
/// The discriminant `w·x + b` is the log posterior odds of label 1 under
/// the equal-covariance Gaussian model, so `score = sigmoid(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub means: [Vec<f64>; 2],
    /// Row-major inverse of the ridge-stabilized pooled covariance.
    pub inv_cov: Vec<Vec<f64>>,
    pub priors: [f64; 2],
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn class_mean(rows: &[Vec<f64>], labels: &[Label], class: Label, dim: usize) -> (Vec<f64>, usize) {
    let mut m = vec![0.0; dim];
    let mut n = 0;
    for (r, _) in rows.iter().zip(labels).filter(|(_, &l)| l == class) {
        m.iter_mut().zip(r).for_each(|(a, v)| *a += v);
        n += 1;
    }
    m.iter_mut().for_each(|a| *a /= n as f64);
    (m, n)
}

fn spd_inverse(mut cov: DMatrix<f64>) -> DMatrix<f64> {
    let dim = cov.nrows();
    let mut jitter = 0.0;
    loop {
        if let Some(ch) = cov.clone().cholesky() {
            return ch.inverse();
        }
        // numerically indefinite despite the ridge
        let step = if jitter == 0.0 { 1e-12 } else { jitter * 10.0 };
        for i in 0..dim {
            cov[(i, i)] += step - jitter;
        }
        jitter = step;
    }
}

impl LdaModel {
    pub fn fit(rows: &[Vec<f64>], labels: &[Label]) -> Self {
        let dim = rows[0].len();
        let (mu0, n0) = class_mean(rows, labels, 0, dim);
        let (mu1, n1) = class_mean(rows, labels, 1, dim);
        let n = (n0 + n1) as f64;

        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for (r, &l) in rows.iter().zip(labels) {
            let mu = if l == 1 { &mu1 } else { &mu0 };
            let d = DVector::from_iterator(dim, r.iter().zip(mu).map(|(a, b)| a - b));
            cov.ger(1.0, &d, &d, 1.0);
        }
        cov /= (n - 2.0).max(1.0);
        let trace = cov.trace();
        let ridge = if trace > 0.0 {
            LDA_RIDGE * trace / dim as f64
        } else {
            LDA_RIDGE
        };
        for i in 0..dim {
            cov[(i, i)] += ridge;
        }
        let inv = spd_inverse(cov);

        let diff = DVector::from_iterator(dim, mu1.iter().zip(&mu0).map(|(a, b)| a - b));
        let w = &inv * diff;
        let weights: Vec<f64> = w.iter().copied().collect();
        let midpoint: Vec<f64> = mu1.iter().zip(&mu0).map(|(a, b)| 0.5 * (a + b)).collect();
        let priors = [n0 as f64 / n, n1 as f64 / n];
        let bias = -dot(&weights, &midpoint) + (priors[1] / priors[0]).ln();

        Self {
            means: [mu0, mu1],
            inv_cov: inv
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            priors,
            weights,
            bias,
        }
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from(self.discriminant(x) >= 0.0)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.discriminant(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_classes_split_on_first_axis() {
        let offsets = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (class, cx) in [(0u8, -1.0), (1u8, 1.0)] {
            for (dx, dy) in offsets {
                rows.push(vec![cx + dx, dy]);
                labels.push(class);
            }
        }
        let m = LdaModel::fit(&rows, &labels);
        assert!(m.weights[0] > 0.0);
        assert!(m.weights[1].abs() < 1e-12);
        let boundary = -m.bias / m.weights[0];
        assert!(boundary.abs() < 1e-9);
        assert!((m.score(&[0.0, 3.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collinear_features_stay_finite() {
        // second feature duplicates the first: singular covariance without ridge
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let v = i as f64 + if i % 2 == 0 { 0.3 } else { 0.0 };
                vec![v, v]
            })
            .collect();
        let labels: Vec<Label> = (0..10).map(|i| u8::from(i >= 5)).collect();
        let m = LdaModel::fit(&rows, &labels);
        assert!(m.weights.iter().all(|w| w.is_finite()));
        assert_eq!(m.predict(&[9.0, 9.0]), 1);
        assert_eq!(m.predict(&[0.0, 0.0]), 0);
    }
}
