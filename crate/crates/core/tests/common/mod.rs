//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use imfclass_core::{Label, LabeledDataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Two isotropic unit-variance Gaussians at ±2·e₁ in 2-D, `per_class`
/// rows each, interleaved (0, 1, 0, 1, ...).
pub fn two_gaussians(per_class: usize, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut rows = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        for (label, center) in [(0u8, -2.0), (1u8, 2.0)] {
            let z = normal_vec(&mut r, 2);
            rows.push(vec![center + z[0], z[1]]);
            labels.push(label);
        }
    }
    LabeledDataset::new(rows, labels).unwrap()
}

pub fn tone(freq: f64, rate: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate).sin())
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Middle 90% of `0..n`.
pub fn interior(n: usize) -> std::ops::Range<usize> {
    n / 20..n - n / 20
}

/// Neighborhood scan: walk outwards from `i` over equal values, then
/// compare the flanks; `i` is reported only if it is the run midpoint.
pub fn brute_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        let mut lo = i;
        while lo > 0 && x[lo - 1] == x[i] {
            lo -= 1;
        }
        let mut hi = i;
        while hi < n - 1 && x[hi + 1] == x[i] {
            hi += 1;
        }
        if lo == 0 || hi == n - 1 || i != (lo + hi) / 2 {
            continue;
        }
        if x[lo - 1] < x[i] && x[hi + 1] < x[i] {
            maxima.push(i);
        }
        if x[lo - 1] > x[i] && x[hi + 1] > x[i] {
            minima.push(i);
        }
    }
    (maxima, minima)
}

/// Sign-change count skipping zeros, written independently of the library.
pub fn brute_zero_crossings(x: &[f64]) -> usize {
    let nz: Vec<f64> = x.iter().copied().filter(|v| *v != 0.0).collect();
    nz.windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count()
}

/// Dense Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Natural cubic spline via the full 4(n−1) piecewise-coefficient system,
/// evaluated at `0..len` with linear continuation outside the knots.
pub fn dense_natural_spline(xs: &[f64], ys: &[f64], len: usize) -> Vec<f64> {
    let m = xs.len() - 1;
    let u = 4 * m;
    let mut a = vec![vec![0.0; u]; u];
    let mut b = vec![0.0; u];
    let mut row = 0;
    let c = |seg: usize, k: usize| 4 * seg + k;
    for s in 0..m {
        let h = xs[s + 1] - xs[s];
        a[row][c(s, 0)] = 1.0;
        b[row] = ys[s];
        row += 1;
        a[row][c(s, 0)] = 1.0;
        a[row][c(s, 1)] = h;
        a[row][c(s, 2)] = h * h;
        a[row][c(s, 3)] = h * h * h;
        b[row] = ys[s + 1];
        row += 1;
        if s + 1 < m {
            // first and second derivative continuity at xs[s+1]
            a[row][c(s, 1)] = 1.0;
            a[row][c(s, 2)] = 2.0 * h;
            a[row][c(s, 3)] = 3.0 * h * h;
            a[row][c(s + 1, 1)] = -1.0;
            row += 1;
            a[row][c(s, 2)] = 2.0;
            a[row][c(s, 3)] = 6.0 * h;
            a[row][c(s + 1, 2)] = -2.0;
            row += 1;
        }
    }
    a[row][c(0, 2)] = 2.0;
    row += 1;
    let h = xs[m] - xs[m - 1];
    a[row][c(m - 1, 2)] = 2.0;
    a[row][c(m - 1, 3)] = 6.0 * h;
    row += 1;
    assert_eq!(row, u);
    let coef = solve_dense(a, b);

    (0..len)
        .map(|t| {
            let x = t as f64;
            if x <= xs[0] {
                return coef[0] + coef[1] * (x - xs[0]);
            }
            if x >= xs[m] {
                let h = xs[m] - xs[m - 1];
                let slope = coef[c(m - 1, 1)]
                    + 2.0 * coef[c(m - 1, 2)] * h
                    + 3.0 * coef[c(m - 1, 3)] * h * h;
                return ys[m] + slope * (x - xs[m]);
            }
            let s = (0..m).find(|&s| x <= xs[s + 1]).unwrap();
            let d = x - xs[s];
            coef[c(s, 0)] + coef[c(s, 1)] * d + coef[c(s, 2)] * d * d + coef[c(s, 3)] * d * d * d
        })
        .collect()
}

/// Pairwise Mann–Whitney AUC with ties counted ½.
pub fn mann_whitney_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Exhaustive kNN: rank by true Euclidean distance (with sqrt), ties by
/// lower index, majority vote, vote ties to the nearest row's label.
pub fn brute_knn(rows: &[Vec<f64>], labels: &[Label], k: usize, q: &[f64]) -> Label {
    let mut d: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let s: f64 = r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
            (s.sqrt(), i)
        })
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let top = &d[..k.min(d.len())];
    let ones = top.iter().filter(|(_, i)| labels[*i] == 1).count();
    let zeros = top.len() - ones;
    if ones > zeros {
        1
    } else if zeros > ones {
        0
    } else {
        labels[top[0].1]
    }
}

/// Histogram by explicit edge comparison: cell j holds lo + j·w ≤ x < lo + (j+1)·w.
pub fn brute_entropy(x: &[f64], bins: usize) -> f64 {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return 0.0;
    }
    let w = (hi - lo) / bins as f64;
    let n = x.len() as f64;
    let mut h = 0.0;
    for j in 0..bins {
        let left = lo + j as f64 * w;
        let right = lo + (j + 1) as f64 * w;
        let count = x
            .iter()
            .filter(|&&v| v >= left && (v < right || (j == bins - 1 && v <= hi)))
            .count();
        if count > 0 {
            let p = count as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Mean logistic loss plus (λ/2)‖w‖² with `theta` = weights then bias.
pub fn logreg_objective(rows: &[Vec<f64>], labels: &[Label], lambda: f64, theta: &[f64]) -> f64 {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut f = 0.0;
    for (x, &y) in rows.iter().zip(labels) {
        let z: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + theta[d];
        // log(1 + e^z) − y z, evaluated stably
        f += z.max(0.0) + (-z.abs()).exp().ln_1p() - f64::from(y) * z;
    }
    f / n + 0.5 * lambda * theta[..d].iter().map(|w| w * w).sum::<f64>()
}

pub fn logreg_gradient(
    rows: &[Vec<f64>],
    labels: &[Label],
    lambda: f64,
    theta: &[f64],
) -> Vec<f64> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut g = vec![0.0; d + 1];
    for (x, &y) in rows.iter().zip(labels) {
        let z: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() + theta[d];
        let p = 1.0 / (1.0 + (-z).exp());
        for j in 0..d {
            g[j] += (p - f64::from(y)) * x[j] / n;
        }
        g[d] += (p - f64::from(y)) / n;
    }
    for j in 0..d {
        g[j] += lambda * theta[j];
    }
    g
}

pub fn logreg_central_difference(
    rows: &[Vec<f64>],
    labels: &[Label],
    lambda: f64,
    theta: &[f64],
) -> Vec<f64> {
    let h = 1e-5;
    (0..theta.len())
        .map(|j| {
            let mut up = theta.to_vec();
            let mut down = theta.to_vec();
            up[j] += h;
            down[j] -= h;
            (logreg_objective(rows, labels, lambda, &up)
                - logreg_objective(rows, labels, lambda, &down))
                / (2.0 * h)
        })
        .collect()
}
