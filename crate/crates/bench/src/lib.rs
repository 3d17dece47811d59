//! Deterministic inputs for the criterion benches.

use imfclass_core::{derive_seed, Label, LabeledDataset, FEATURE_DIM};

/// Uniform value in [-1, 1) from a hashed counter.
fn unit(seed: u64, i: u64) -> f64 {
    (derive_seed(seed, i) >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Rough noise: sum of four uniforms per sample.
pub fn noise(seed: u64, n: usize) -> Vec<f64> {
    (0..n as u64)
        .map(|i| (0..4).map(|j| unit(seed, 4 * i + j)).sum())
        .collect()
}

pub fn two_tones(n: usize, rate: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            (2.0 * PI * 50.0 * t).sin() + (2.0 * PI * 5.0 * t).sin()
        })
        .collect()
}

/// Two shifted clouds in feature space, `per_class` rows each.
pub fn feature_dataset(per_class: usize, seed: u64) -> LabeledDataset {
    let mut rows = Vec::with_capacity(2 * per_class);
    let mut labels: Vec<Label> = Vec::with_capacity(2 * per_class);
    for i in 0..2 * per_class {
        let label = (i % 2) as Label;
        let shift = if label == 1 { 0.5 } else { -0.5 };
        let base = (i * FEATURE_DIM) as u64;
        rows.push(
            (0..FEATURE_DIM as u64)
                .map(|j| unit(seed, base + j) + shift)
                .collect(),
        );
        labels.push(label);
    }
    LabeledDataset::new(rows, labels).expect("well-formed rows")
}
