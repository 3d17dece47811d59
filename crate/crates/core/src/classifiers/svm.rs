//! Linear soft-margin SVM by dual coordinate descent.
//!
//! Each row is augmented with a constant 1 so the bias is the last weight
//! (and is regularized along with the rest). The primal is
//!
//! ```text
//! P(w) = ½‖w‖² + C Σ max(0, 1 − yᵢ w·x̂ᵢ)
//! ```
//!
//! and the dual, over 0 ≤ αᵢ ≤ C, is `D(α) = Σαᵢ − ½‖Σ αᵢ yᵢ x̂ᵢ‖²`.
//! Coordinates are visited in row order every epoch; no shuffling and no
//! shrinking.

use super::dot;
use super::linear::LinearModel;
use crate::Label;

pub const SVM_MAX_EPOCHS: usize = 1000;
pub const SVM_GAP_TOL: f64 = 1e-6;

fn sign(label: Label) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Primal minus dual objective for weights `w_aug` (bias last) built from
/// the multipliers `alpha`.
pub fn svm_duality_gap(
    rows: &[Vec<f64>],
    labels: &[Label],
    c: f64,
    w_aug: &[f64],
    alpha: &[f64],
) -> f64 {
    let d = w_aug.len() - 1;
    let norm2 = dot(w_aug, w_aug);
    let hinge: f64 = rows
        .iter()
        .zip(labels)
        .map(|(r, &y)| (1.0 - sign(y) * (dot(&w_aug[..d], r) + w_aug[d])).max(0.0))
        .sum();
    let primal = 0.5 * norm2 + c * hinge;
    let dual = alpha.iter().sum::<f64>() - 0.5 * norm2;
    primal - dual
}

pub(super) fn fit(rows: &[Vec<f64>], labels: &[Label], c: f64) -> LinearModel {
    let d = rows[0].len();
    let n = rows.len();
    let mut w = vec![0.0; d + 1];
    let mut alpha = vec![0.0; n];
    let q_diag: Vec<f64> = rows.iter().map(|r| dot(r, r) + 1.0).collect();

    let mut epochs = 0;
    while epochs < SVM_MAX_EPOCHS {
        for i in 0..n {
            let y = sign(labels[i]);
            let xi = &rows[i];
            let grad = y * (dot(&w[..d], xi) + w[d]) - 1.0;
            let projected = if alpha[i] == 0.0 {
                grad.min(0.0)
            } else if alpha[i] == c {
                grad.max(0.0)
            } else {
                grad
            };
            if projected == 0.0 {
                continue;
            }
            let old = alpha[i];
            alpha[i] = (old - grad / q_diag[i]).clamp(0.0, c);
            let delta = (alpha[i] - old) * y;
            if delta != 0.0 {
                w[..d]
                    .iter_mut()
                    .zip(xi)
                    .for_each(|(wj, x)| *wj += delta * x);
                w[d] += delta;
            }
        }
        epochs += 1;
        if svm_duality_gap(rows, labels, c, &w, &alpha) <= SVM_GAP_TOL {
            break;
        }
    }
    let bias = w[d];
    w.truncate(d);
    LinearModel {
        weights: w,
        bias,
        iterations: epochs,
    }
}
