//! Batch front-end: WAV manifest → decomposition → feature cache →
//! five-classifier comparison report.
//!
//! Everything the `imfclass` binary does is available here so it can be
//! driven in-process.

mod cache;
mod error;
mod manifest;
mod pipeline;

pub use cache::{read_cache, write_cache, CacheRow};
pub use error::CliError;
pub use manifest::{load_manifest, ManifestEntry};
pub use pipeline::{
    run_decompose, run_evaluate, run_extract, EvaluateSummary, ExtractSummary, RunConfig,
    CACHE_FILE, CONFUSION_FILE, ERRORS_FILE, METRICS_FILE, SUMMARY_FILE,
};
