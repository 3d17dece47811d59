//! L2-regularized logistic regression fitted by damped Newton steps.
//!
//! Objective over θ = (w, b):
//!
//! ```text
//! f(θ) = (1/n) Σ [softplus(zᵢ) − yᵢ zᵢ] + (λ/2)‖w‖²,   zᵢ = w·xᵢ + b
//! ```
//!
//! The bias is not penalized.

use nalgebra::{DMatrix, DVector};

use super::linear::LinearModel;
use super::{dot, sigmoid};
use crate::Label;

pub const LOGREG_GRADIENT_TOL: f64 = 1e-8;
pub const LOGREG_MAX_ITER: usize = 100;

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// The regularized mean negative log-likelihood at `(weights, bias)`.
pub fn logreg_objective(
    rows: &[Vec<f64>],
    labels: &[Label],
    lambda: f64,
    weights: &[f64],
    bias: f64,
) -> f64 {
    let n = rows.len() as f64;
    let nll: f64 = rows
        .iter()
        .zip(labels)
        .map(|(r, &y)| {
            let z = dot(weights, r) + bias;
            softplus(z) - f64::from(y) * z
        })
        .sum();
    nll / n + 0.5 * lambda * dot(weights, weights)
}

struct Problem<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [Label],
    lambda: f64,
    dim: usize,
}

impl Problem<'_> {
    fn objective(&self, theta: &DVector<f64>) -> f64 {
        let (w, b) = (theta.as_slice(), theta[self.dim]);
        logreg_objective(self.rows, self.labels, self.lambda, &w[..self.dim], b)
    }

    fn gradient_and_hessian(&self, theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim;
        let n = self.rows.len() as f64;
        let w = &theta.as_slice()[..d];
        let b = theta[d];
        let mut g = DVector::<f64>::zeros(d + 1);
        let mut h = DMatrix::<f64>::zeros(d + 1, d + 1);
        let mut xt = DVector::<f64>::zeros(d + 1);
        for (r, &y) in self.rows.iter().zip(self.labels) {
            let p = sigmoid(dot(w, r) + b);
            xt.as_mut_slice()[..d].copy_from_slice(r);
            xt[d] = 1.0;
            g.axpy((p - f64::from(y)) / n, &xt, 1.0);
            h.ger(p * (1.0 - p) / n, &xt, &xt, 1.0);
        }
        for i in 0..d {
            g[i] += self.lambda * theta[i];
            h[(i, i)] += self.lambda;
        }
        (g, h)
    }
}

fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let dim = h.nrows();
    let mut jitter = 0.0;
    loop {
        let mut hj = h.clone();
        for i in 0..dim {
            hj[(i, i)] += jitter;
        }
        if let Some(ch) = hj.cholesky() {
            return -ch.solve(g);
        }
        jitter = if jitter == 0.0 { 1e-12 } else { jitter * 10.0 };
    }
}

pub(super) fn fit(rows: &[Vec<f64>], labels: &[Label], lambda: f64) -> LinearModel {
    let dim = rows[0].len();
    let problem = Problem {
        rows,
        labels,
        lambda,
        dim,
    };
    let mut theta = DVector::<f64>::zeros(dim + 1);
    let mut f = problem.objective(&theta);
    let mut iterations = 0;
    while iterations < LOGREG_MAX_ITER {
        let (g, h) = problem.gradient_and_hessian(&theta);
        if g.norm() <= LOGREG_GRADIENT_TOL {
            break;
        }
        let step = newton_direction(h, &g);
        let slope = g.dot(&step);
        // Armijo backtracking; a full step is taken near the optimum.
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let candidate = &theta + &step * t;
            let fc = problem.objective(&candidate);
            if fc <= f + 1e-4 * t * slope {
                theta = candidate;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // Near the optimum the objective is flat to rounding and Armijo
            // cannot see progress; the undamped step still shrinks the
            // gradient. Far from it, give up.
            if g.norm() > 1e-4 {
                break;
            }
            theta += &step;
            f = problem.objective(&theta);
        }
    }
    LinearModel {
        weights: theta.as_slice()[..dim].to_vec(),
        bias: theta[dim],
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_clusters_score_half_at_midpoint() {
        let rows = vec![
            vec![-2.0, 1.0],
            vec![-3.0, -1.0],
            vec![2.0, -1.0],
            vec![3.0, 1.0],
        ];
        let labels = vec![0, 0, 1, 1];
        let m = fit(&rows, &labels, 1e-4);
        assert!((m.score(&[0.0, 0.0]) - 0.5).abs() < 1e-6);
        assert_eq!(m.predict(&[2.5, 0.0]), 1);
    }

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for z in [-5.0, -0.3, 0.0, 0.7, 4.0] {
            assert!((softplus(z) - (1.0 + f64::exp(z)).ln()).abs() < 1e-14);
        }
        assert_eq!(softplus(1000.0), 1000.0);
    }
}
