//! Empirical mode decomposition by envelope-mean sifting.
//!
//! Local extrema are located, natural cubic splines are run through the
//! maxima and the minima, and the mean of the two envelopes is subtracted
//! until what is left is an intrinsic mode function (IMF). The IMF is then
//! removed from the running residual and the process repeats.
//!
//! An IMF here is a sequence whose zero-crossing count and extrema count
//! differ by at most one and whose envelope mean stays within
//! [`SYMMETRY_TOLERANCE`] of its peak amplitude.

use serde::{Deserialize, Serialize};

use crate::signal::Signal;

/// Default number of IMFs per decomposition.
pub const DEFAULT_MAX_IMFS: usize = 5;

/// Hard cap on sifting iterations for one IMF.
pub const MAX_SIFT_ITERATIONS: usize = 100;

/// Envelope-mean bound, relative to `max |h|`, for the symmetry condition.
pub const SYMMETRY_TOLERANCE: f64 = 0.05;

/// Extrema mirrored about each signal end before fitting an envelope.
const MIRRORED_EXTREMA: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmdError {
    #[error("sequence has {0} samples, need at least 3")]
    TooShort(usize),
    #[error("spline needs at least 2 knots, got {0}")]
    InsufficientKnots(usize),
    #[error("knot positions must be strictly increasing and finite")]
    UnorderedKnots,
    #[error("knot position and value lists differ in length ({0} vs {1})")]
    KnotLengthMismatch(usize, usize),
    #[error("need at least 2 maxima and 2 minima, found {maxima} and {minima}")]
    InsufficientExtrema { maxima: usize, minima: usize },
}

/// Indices of the local maxima and minima of a sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremaSet {
    pub maxima_idx: Vec<usize>,
    pub minima_idx: Vec<usize>,
}

impl ExtremaSet {
    pub fn total(&self) -> usize {
        self.maxima_idx.len() + self.minima_idx.len()
    }

    /// At least two of each kind, the minimum needed for two envelopes.
    pub fn supports_envelopes(&self) -> bool {
        self.maxima_idx.len() >= 2 && self.minima_idx.len() >= 2
    }
}

/// Finds strict local maxima and minima.
///
/// A run of equal samples flanked on both sides by strictly smaller
/// (larger) values is one maximum (minimum) located at the run midpoint,
/// rounded down. The first and last samples are never extrema.
pub fn find_local_extrema(samples: &[f64]) -> Result<ExtremaSet, EmdError> {
    let n = samples.len();
    if n < 3 {
        return Err(EmdError::TooShort(n));
    }
    let mut set = ExtremaSet::default();
    // Runs of equal values: [start, end] inclusive.
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && samples[end + 1] == samples[start] {
            end += 1;
        }
        if start > 0 && end < n - 1 {
            let v = samples[start];
            let (before, after) = (samples[start - 1], samples[end + 1]);
            let mid = (start + end) / 2;
            if v > before && v > after {
                set.maxima_idx.push(mid);
            } else if v < before && v < after {
                set.minima_idx.push(mid);
            }
        }
        start = end + 1;
    }
    Ok(set)
}

/// Number of sign changes between nonzero samples.
///
/// A zero sample inherits the sign of the last nonzero sample before it, so
/// `[1, 0, -1]` crosses once and `[1, 0, 1]` not at all.
pub fn zero_crossings(samples: &[f64]) -> usize {
    let mut last_positive: Option<bool> = None;
    let mut count = 0;
    for &s in samples {
        if s == 0.0 {
            continue;
        }
        let positive = s > 0.0;
        if let Some(prev) = last_positive {
            if prev != positive {
                count += 1;
            }
        }
        last_positive = Some(positive);
    }
    count
}

/// Natural cubic spline: zero second derivative at both end knots, linear
/// continuation outside the knot range.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, EmdError> {
        if xs.len() != ys.len() {
            return Err(EmdError::KnotLengthMismatch(xs.len(), ys.len()));
        }
        let n = xs.len();
        if n < 2 {
            return Err(EmdError::InsufficientKnots(n));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EmdError::UnorderedKnots);
        }

        // Tridiagonal system for the interior second derivatives, solved by
        // forward elimination and back substitution (Thomas algorithm).
        let mut second = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for k in 0..m {
                let i = k + 1;
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[k] = 2.0 * (h0 + h1);
                upper[k] = h1;
                rhs[k] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for k in 1..m {
                let lower = xs[k + 1] - xs[k];
                let w = lower / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = (rhs[k] - upper[k] * second[k + 2]) / diag[k];
            }
        }
        Ok(Self { xs, ys, second })
    }

    fn segment_value(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }

    fn end_slope(&self, left: bool) -> f64 {
        let n = self.xs.len();
        if left {
            let h = self.xs[1] - self.xs[0];
            (self.ys[1] - self.ys[0]) / h - h * (2.0 * self.second[0] + self.second[1]) / 6.0
        } else {
            let h = self.xs[n - 1] - self.xs[n - 2];
            (self.ys[n - 1] - self.ys[n - 2]) / h
                + h * (self.second[n - 2] + 2.0 * self.second[n - 1]) / 6.0
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + (x - self.xs[0]) * self.end_slope(true);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + (x - self.xs[n - 1]) * self.end_slope(false);
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        self.segment_value(i, x)
    }

    /// Evaluates at the integer positions `0..n`.
    pub fn eval_grid(&self, n: usize) -> Vec<f64> {
        let last = self.xs.len() - 1;
        let mut seg = 0;
        (0..n)
            .map(|t| {
                let x = t as f64;
                if x <= self.xs[0] || x >= self.xs[last] {
                    return self.eval(x);
                }
                while self.xs[seg + 1] < x {
                    seg += 1;
                }
                self.segment_value(seg, x)
            })
            .collect()
    }
}

/// Natural cubic spline through `(knot_idx[i], knot_val[i])`, sampled at
/// every integer position `0..n`.
///
/// The knots are used as given. Envelope construction adds mirrored end
/// knots itself; see [`mean_envelope`].
pub fn spline_envelope(
    knot_idx: &[usize],
    knot_val: &[f64],
    n: usize,
) -> Result<Vec<f64>, EmdError> {
    let xs = knot_idx.iter().map(|&i| i as f64).collect();
    let spline = NaturalCubicSpline::new(xs, knot_val.to_vec())?;
    Ok(spline.eval_grid(n))
}

/// Spline through `idx` plus the nearest extrema mirrored about both ends.
fn mirrored_envelope(samples: &[f64], idx: &[usize]) -> Result<Vec<f64>, EmdError> {
    let n = samples.len();
    let last = (n - 1) as f64;
    let k = MIRRORED_EXTREMA.min(idx.len());
    let mut xs = Vec::with_capacity(idx.len() + 2 * k);
    let mut ys = Vec::with_capacity(idx.len() + 2 * k);
    for &i in idx[..k].iter().rev() {
        xs.push(-(i as f64));
        ys.push(samples[i]);
    }
    for &i in idx {
        xs.push(i as f64);
        ys.push(samples[i]);
    }
    for &i in idx[idx.len() - k..].iter().rev() {
        xs.push(2.0 * last - i as f64);
        ys.push(samples[i]);
    }
    Ok(NaturalCubicSpline::new(xs, ys)?.eval_grid(n))
}

/// Upper and lower envelopes, each a natural spline through the extrema of
/// one kind with the two nearest extrema mirrored about each endpoint.
pub fn envelopes(samples: &[f64]) -> Result<(Vec<f64>, Vec<f64>), EmdError> {
    let ext = find_local_extrema(samples)?;
    envelopes_from(samples, &ext)
}

fn envelopes_from(samples: &[f64], ext: &ExtremaSet) -> Result<(Vec<f64>, Vec<f64>), EmdError> {
    if !ext.supports_envelopes() {
        return Err(EmdError::InsufficientExtrema {
            maxima: ext.maxima_idx.len(),
            minima: ext.minima_idx.len(),
        });
    }
    Ok((
        mirrored_envelope(samples, &ext.maxima_idx)?,
        mirrored_envelope(samples, &ext.minima_idx)?,
    ))
}

/// Per-sample mean of the upper and lower envelopes.
pub fn mean_envelope(samples: &[f64]) -> Result<Vec<f64>, EmdError> {
    let (upper, lower) = envelopes(samples)?;
    Ok(upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| 0.5 * (u + l))
        .collect())
}

/// Outcome of the IMF test with the counts behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfCheck {
    pub is_imf: bool,
    pub zero_crossings: usize,
    pub maxima: usize,
    pub minima: usize,
    /// `max |mean envelope|`; `None` when there are too few extrema for envelopes.
    pub max_abs_mean_envelope: Option<f64>,
    pub peak_amplitude: f64,
}

impl ImfCheck {
    pub fn extrema(&self) -> usize {
        self.maxima + self.minima
    }

    pub fn counts_condition(&self) -> bool {
        self.zero_crossings.abs_diff(self.extrema()) <= 1
    }

    pub fn symmetry_condition(&self) -> bool {
        self.maxima >= 2
            && self.minima >= 2
            && self
                .max_abs_mean_envelope
                .is_some_and(|m| m <= SYMMETRY_TOLERANCE * self.peak_amplitude)
    }
}

/// Runs the IMF test and hands back the mean envelope so sifting can reuse it.
fn check_with_envelope(samples: &[f64]) -> Result<(ImfCheck, Option<Vec<f64>>), EmdError> {
    let ext = find_local_extrema(samples)?;
    let mean = match envelopes_from(samples, &ext) {
        Ok((upper, lower)) => Some(
            upper
                .iter()
                .zip(&lower)
                .map(|(u, l)| 0.5 * (u + l))
                .collect::<Vec<f64>>(),
        ),
        Err(EmdError::InsufficientExtrema { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut check = ImfCheck {
        is_imf: false,
        zero_crossings: zero_crossings(samples),
        maxima: ext.maxima_idx.len(),
        minima: ext.minima_idx.len(),
        max_abs_mean_envelope: mean
            .as_ref()
            .map(|m| m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))),
        peak_amplitude: samples.iter().fold(0.0f64, |acc, v| acc.max(v.abs())),
    };
    check.is_imf = check.counts_condition() && check.symmetry_condition();
    Ok((check, mean))
}

/// Tests both IMF conditions: zero crossings and extrema differ by at most
/// one, and the envelope mean is within [`SYMMETRY_TOLERANCE`]·`max |x|`.
pub fn is_imf(samples: &[f64]) -> Result<ImfCheck, EmdError> {
    Ok(check_with_envelope(samples)?.0)
}

/// Result of sifting one IMF candidate.
#[derive(Debug, Clone)]
pub struct SiftOutcome {
    pub imf: Vec<f64>,
    pub iterations: usize,
    /// `true` when `imf` passed [`is_imf`]; `false` when the iteration cap
    /// was hit or the candidate ran out of extrema first.
    pub converged: bool,
}

/// Subtracts the envelope mean until the candidate is an IMF or
/// [`MAX_SIFT_ITERATIONS`] subtractions have been made.
///
/// The IMF test runs before each subtraction, so an input that already
/// is an IMF comes back unchanged with zero iterations.
pub fn sift(samples: &[f64]) -> Result<SiftOutcome, EmdError> {
    let ext = find_local_extrema(samples)?;
    if !ext.supports_envelopes() {
        return Err(EmdError::InsufficientExtrema {
            maxima: ext.maxima_idx.len(),
            minima: ext.minima_idx.len(),
        });
    }
    let mut h = samples.to_vec();
    let mut iterations = 0;
    loop {
        let (check, mean) = check_with_envelope(&h)?;
        if check.is_imf {
            return Ok(SiftOutcome {
                imf: h,
                iterations,
                converged: true,
            });
        }
        let Some(mean) = mean else {
            break;
        };
        if iterations == MAX_SIFT_ITERATIONS {
            break;
        }
        h.iter_mut().zip(&mean).for_each(|(v, m)| *v -= m);
        iterations += 1;
    }
    Ok(SiftOutcome {
        imf: h,
        iterations,
        converged: false,
    })
}

/// Why a decomposition stopped adding IMFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// `max_imfs` IMFs were extracted.
    MaxImfs,
    /// The residual has fewer than 2 maxima or fewer than 2 minima.
    ResidualExhausted,
    /// Sifting the residual did not produce an IMF within the iteration cap;
    /// the unconverged candidate stays in the residual.
    SiftDidNotConverge,
}

/// IMFs in extraction order (highest frequency first) plus the residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImfDecomposition {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub sift_counts: Vec<usize>,
    pub stop: StopReason,
}

impl ImfDecomposition {
    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual.is_empty()
    }

    /// Σ imfs + residual.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            out.iter_mut().zip(imf).for_each(|(o, v)| *o += v);
        }
        out
    }
}

/// Decomposes a signal into at most `max_imfs` IMFs and a residual.
///
/// The input is expected to be z-normalized. Signals too short or too
/// smooth to carry two maxima and two minima yield no IMFs.
pub fn decompose(signal: &Signal, max_imfs: usize) -> ImfDecomposition {
    decompose_samples(signal.samples(), max_imfs)
}

/// [`decompose`] over a bare sample slice.
pub fn decompose_samples(samples: &[f64], max_imfs: usize) -> ImfDecomposition {
    let mut residual = samples.to_vec();
    let mut imfs = Vec::new();
    let mut sift_counts = Vec::new();
    let mut stop = StopReason::MaxImfs;

    while imfs.len() < max_imfs {
        let Ok(outcome) = sift(&residual) else {
            stop = StopReason::ResidualExhausted;
            break;
        };
        if !outcome.converged {
            stop = StopReason::SiftDidNotConverge;
            break;
        }
        residual
            .iter_mut()
            .zip(&outcome.imf)
            .for_each(|(r, v)| *r -= v);
        imfs.push(outcome.imf);
        sift_counts.push(outcome.iterations);
    }
    ImfDecomposition {
        imfs,
        residual,
        sift_counts,
        stop,
    }
}
