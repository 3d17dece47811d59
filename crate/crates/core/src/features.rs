//! The 45-value IMF feature row: 9 measures for each of IMF1..IMF5.
//!
//! Per-IMF block order: mean absolute value, sample standard deviation,
//! RMS, skewness, excess kurtosis, zero-crossing rate (per second),
//! Shannon entropy (bits, 64-bin amplitude histogram), Hjorth mobility,
//! Hjorth complexity. Blocks for IMFs the decomposition did not produce are
//! all zero.

use serde::{Deserialize, Serialize};

use crate::emd::{self, ImfDecomposition};
use crate::Label;

pub const FEATURE_IMFS: usize = 5;
pub const FEATURES_PER_IMF: usize = 9;
pub const FEATURE_DIM: usize = FEATURE_IMFS * FEATURES_PER_IMF;
pub const ENTROPY_BINS: usize = 64;

/// Feature names within one IMF block, in output order.
pub const FEATURE_NAMES: [&str; FEATURES_PER_IMF] = [
    "mean_abs",
    "std",
    "rms",
    "skewness",
    "kurtosis",
    "zcr",
    "entropy",
    "mobility",
    "complexity",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("sequence has {got} samples, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("feature row has {got} values, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("value {index} is not finite")]
    NonFinite { index: usize },
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(Label),
    #[error("dataset is empty")]
    Empty,
}

/// One signal's 45 features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    source_id: String,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, source_id: impl Into<String>) -> Result<Self, FeatureError> {
        if values.len() != FEATURE_DIM {
            return Err(FeatureError::DimensionMismatch {
                got: values.len(),
                expected: FEATURE_DIM,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite { index });
        }
        Ok(Self {
            values,
            source_id: source_id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Feature rows with parallel binary labels.
///
/// Rows share one dimension, which need not be 45: the classifiers accept
/// any width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self, FeatureError> {
        if rows.len() != labels.len() {
            return Err(FeatureError::LengthMismatch {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        if rows.is_empty() {
            return Err(FeatureError::Empty);
        }
        let dim = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(FeatureError::DimensionMismatch {
                got: bad.len(),
                expected: dim,
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(FeatureError::InvalidLabel(bad));
        }
        Ok(Self { rows, labels })
    }

    pub fn from_feature_vectors(
        vectors: Vec<FeatureVector>,
        labels: Vec<Label>,
    ) -> Result<Self, FeatureError> {
        Self::new(
            vectors
                .into_iter()
                .map(FeatureVector::into_values)
                .collect(),
            labels,
        )
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Rows at `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn population_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn first_difference(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn mean_abs(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
}

/// Standard deviation with the n−1 divisor; 0 for fewer than 2 samples.
pub fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Central moments m2, m3, m4 (population).
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let m = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Population skewness m3 / m2^1.5; 0 when the variance is 0.
pub fn skewness(x: &[f64]) -> f64 {
    let (m2, m3, _) = central_moments(x);
    if m2 <= 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Population excess kurtosis m4 / m2² − 3; 0 when the variance is 0.
pub fn excess_kurtosis(x: &[f64]) -> f64 {
    let (m2, _, m4) = central_moments(x);
    if m2 <= 0.0 {
        0.0
    } else {
        m4 / (m2 * m2) - 3.0
    }
}

/// Zero crossings per second: crossings × rate / (n − 1).
pub fn zero_crossing_rate(samples: &[f64], sample_rate_hz: u32) -> Result<f64, FeatureError> {
    if samples.len() < 2 {
        return Err(FeatureError::TooShort {
            got: samples.len(),
            need: 2,
        });
    }
    if sample_rate_hz == 0 {
        return Err(FeatureError::InvalidSampleRate);
    }
    let crossings = emd::zero_crossings(samples) as f64;
    Ok(crossings * f64::from(sample_rate_hz) / (samples.len() - 1) as f64)
}

/// Counts per uniform amplitude cell over `[min, max]`. The top edge is
/// closed: `max` lands in the last cell.
pub fn amplitude_histogram(samples: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        counts[0] = samples.len();
        return counts;
    }
    for &v in samples {
        let cell = (((v - lo) / span) * bins as f64).floor() as usize;
        counts[cell.min(bins - 1)] += 1;
    }
    counts
}

/// Shannon entropy in bits of the amplitude histogram.
pub fn shannon_entropy(samples: &[f64], bins: usize) -> Result<f64, FeatureError> {
    if samples.len() < 2 {
        return Err(FeatureError::TooShort {
            got: samples.len(),
            need: 2,
        });
    }
    if bins == 0 {
        return Err(FeatureError::NoBins);
    }
    let n = samples.len() as f64;
    let h = amplitude_histogram(samples, bins)
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    // a single occupied cell sums to -0.0
    Ok(h + 0.0)
}

/// Hjorth descriptors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hjorth {
    pub activity: f64,
    pub mobility: f64,
    pub complexity: f64,
}

fn mobility_of(x: &[f64], var_x: f64) -> f64 {
    if var_x <= 0.0 {
        return 0.0;
    }
    (population_variance(&first_difference(x)) / var_x).sqrt()
}

/// Activity (variance), mobility sqrt(var(Δx)/var(x)) and complexity
/// mobility(Δx)/mobility(x), with 0 wherever a denominator vanishes.
pub fn hjorth(samples: &[f64]) -> Result<Hjorth, FeatureError> {
    if samples.len() < 3 {
        return Err(FeatureError::TooShort {
            got: samples.len(),
            need: 3,
        });
    }
    let activity = population_variance(samples);
    let mobility = mobility_of(samples, activity);
    let complexity = if mobility <= 0.0 {
        0.0
    } else {
        let dx = first_difference(samples);
        mobility_of(&dx, population_variance(&dx)) / mobility
    };
    Ok(Hjorth {
        activity,
        mobility,
        complexity,
    })
}

/// The 9 block features for one IMF, in block order.
pub fn imf_block(imf: &[f64], sample_rate_hz: u32) -> [f64; FEATURES_PER_IMF] {
    let zcr = zero_crossing_rate(imf, sample_rate_hz).unwrap_or(0.0);
    let entropy = shannon_entropy(imf, ENTROPY_BINS).unwrap_or(0.0);
    let hj = hjorth(imf).unwrap_or(Hjorth {
        activity: 0.0,
        mobility: 0.0,
        complexity: 0.0,
    });
    [
        mean_abs(imf),
        sample_std(imf),
        rms(imf),
        skewness(imf),
        excess_kurtosis(imf),
        zcr,
        entropy,
        hj.mobility,
        hj.complexity,
    ]
}

/// Builds the 45-value row from the first five IMFs of `dec`.
pub fn extract_feature_vector(
    dec: &ImfDecomposition,
    sample_rate_hz: u32,
    source_id: impl Into<String>,
) -> FeatureVector {
    let mut values = vec![0.0; FEATURE_DIM];
    for (block, imf) in dec.imfs.iter().take(FEATURE_IMFS).enumerate() {
        let start = block * FEATURES_PER_IMF;
        values[start..start + FEATURES_PER_IMF].copy_from_slice(&imf_block(imf, sample_rate_hz));
    }
    // Non-finite values can only come from non-finite IMF samples; zero them
    // so the row invariant holds.
    for v in &mut values {
        if !v.is_finite() {
            *v = 0.0;
        }
    }
    FeatureVector {
        values,
        source_id: source_id.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zcr_examples() {
        assert_eq!(zero_crossing_rate(&[1.0, -1.0, 1.0], 2).unwrap(), 2.0);
        assert_eq!(zero_crossing_rate(&[1.0, 2.0, 3.0], 44100).unwrap(), 0.0);
        assert!(matches!(
            zero_crossing_rate(&[1.0], 10),
            Err(FeatureError::TooShort { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&[2.0; 10], 64).unwrap(), 0.0);
        let ramp: Vec<f64> = (0..64).map(f64::from).collect();
        assert_eq!(amplitude_histogram(&ramp, 64), vec![1; 64]);
        assert!((shannon_entropy(&ramp, 64).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(shannon_entropy(&ramp, 0), Err(FeatureError::NoBins));
    }

    #[test]
    fn hjorth_examples() {
        let ramp: Vec<f64> = (0..50).map(|i| 0.5 * i as f64).collect();
        let h = hjorth(&ramp).unwrap();
        assert!(h.mobility.abs() < 1e-12);
        assert_eq!(h.complexity, 0.0);

        let h = hjorth(&[4.0; 8]).unwrap();
        assert_eq!((h.activity, h.mobility, h.complexity), (0.0, 0.0, 0.0));

        let sine: Vec<f64> = (0..1000)
            .map(|i| (2.0 * PI * 10.0 * i as f64 / 1000.0).sin())
            .collect();
        let h = hjorth(&sine).unwrap();
        let expected = 2.0 * PI * 10.0 / 1000.0;
        assert!(
            (h.mobility - expected).abs() / expected < 0.02,
            "{}",
            h.mobility
        );
        assert!((h.complexity - 1.0).abs() < 0.02, "{}", h.complexity);
    }

    #[test]
    fn moments_of_zero_variance_are_zero() {
        assert_eq!(skewness(&[1.0; 5]), 0.0);
        assert_eq!(excess_kurtosis(&[1.0; 5]), 0.0);
    }

    #[test]
    fn moments_of_small_sequence() {
        // x = [0, 0, 0, 4]: mean 1, m2 = 3, m3 = 6, m4 = 21
        let x = [0.0, 0.0, 0.0, 4.0];
        assert!((skewness(&x) - 6.0 / 3f64.powf(1.5)).abs() < 1e-12);
        assert!((excess_kurtosis(&x) - (21.0 / 9.0 - 3.0)).abs() < 1e-12);
        assert_eq!(mean_abs(&[-1.0, 3.0]), 2.0);
        assert!((rms(&[3.0, 4.0]) - (12.5f64).sqrt()).abs() < 1e-15);
        assert!((sample_std(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_decomposition_gives_zero_row() {
        let dec = ImfDecomposition {
            imfs: vec![],
            residual: vec![0.0; 10],
            sift_counts: vec![],
            stop: emd::StopReason::ResidualExhausted,
        };
        let fv = extract_feature_vector(&dec, 8000, "x");
        assert_eq!(fv.values(), &[0.0; FEATURE_DIM][..]);
    }

    #[test]
    fn dataset_validation() {
        assert!(matches!(
            LabeledDataset::new(vec![vec![1.0]], vec![]),
            Err(FeatureError::LengthMismatch { .. })
        ));
        assert!(matches!(
            LabeledDataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1]),
            Err(FeatureError::DimensionMismatch { .. })
        ));
        assert_eq!(
            LabeledDataset::new(vec![vec![1.0]], vec![2]),
            Err(FeatureError::InvalidLabel(2))
        );
        assert_eq!(
            LabeledDataset::new(vec![], vec![]),
            Err(FeatureError::Empty)
        );
        assert!(FeatureVector::new(vec![0.0; 44], "").is_err());
    }
}
