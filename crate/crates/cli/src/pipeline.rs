use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use imfclass_core::{
    decode_wav, decompose, derive_seed, extract_feature_vector, z_normalize, Algorithm, CvReport,
    Label, TrainConfig, DEFAULT_MAX_IMFS, FEATURE_DIM,
};
use rayon::prelude::*;

use crate::cache::{read_cache, to_dataset, write_cache, CacheRow};
use crate::manifest::{load_manifest, ManifestEntry};
use crate::CliError;

pub const CACHE_FILE: &str = "features.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const CONFUSION_FILE: &str = "confusion.txt";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Sub-seed stream tags under the run seed.
const FOLD_STREAM: u64 = 0;
const MODEL_STREAM: u64 = 1;

/// Pipeline settings shared by `extract` and `evaluate`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_imfs: usize,
    pub folds: usize,
    pub seed: u64,
    pub positive: Label,
    pub knn_k: usize,
    pub svm_c: f64,
    pub n_trees: usize,
    pub logreg_lambda: f64,
    /// Z-score features inside each training fold before fitting.
    pub standardize: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_imfs: DEFAULT_MAX_IMFS,
            folds: 5,
            seed: 42,
            positive: 1,
            knn_k: 10,
            svm_c: 1.0,
            n_trees: 30,
            logreg_lambda: 1e-4,
            standardize: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::InvalidConfig(m));
        if !(1..=10).contains(&self.max_imfs) {
            return bad(format!("max-imfs must be in 1..=10, got {}", self.max_imfs));
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        if self.positive > 1 {
            return bad(format!(
                "positive label must be 0 or 1, got {}",
                self.positive
            ));
        }
        for a in Algorithm::ALL {
            self.train_config(a)
                .validate()
                .map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }

    pub fn train_config(&self, algorithm: Algorithm) -> TrainConfig {
        TrainConfig {
            algorithm,
            k: self.knn_k,
            c: self.svm_c,
            lambda: self.logreg_lambda,
            n_trees: self.n_trees,
            seed: derive_seed(self.seed, MODEL_STREAM),
            standardize: self.standardize,
        }
    }

    pub fn fold_seed(&self) -> u64 {
        derive_seed(self.seed, FOLD_STREAM)
    }
}

#[derive(Debug, Clone)]
pub struct ExtractSummary {
    pub cache_path: PathBuf,
    pub errors_path: PathBuf,
    pub rows: usize,
    pub failures: usize,
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}

fn extract_one(entry: &ManifestEntry, max_imfs: usize) -> Result<CacheRow, String> {
    let bytes = std::fs::read(&entry.path).map_err(|e| format!("read failed: {e}"))?;
    let signal = decode_wav(&bytes)
        .map_err(|e| e.to_string())?
        .with_source_id(entry.source_id.as_str());
    let normalized = z_normalize(&signal).map_err(|e| e.to_string())?;
    let dec = decompose(&normalized, max_imfs);
    let fv = extract_feature_vector(&dec, signal.sample_rate_hz(), entry.source_id.as_str());
    Ok(CacheRow {
        source_id: entry.source_id.clone(),
        values: fv.into_values(),
        label: entry.label,
    })
}

/// decode → z-normalize → decompose → 45 features, for every manifest entry.
///
/// Files are processed in parallel; `features.csv` and `errors.csv` are
/// written in manifest order. Per-file failures go to the sidecar and the
/// run continues; it fails only if no file succeeds.
pub fn run_extract(
    manifest: &Path,
    out_dir: &Path,
    config: &RunConfig,
) -> Result<ExtractSummary, CliError> {
    config.validate()?;
    let entries = load_manifest(manifest)?;
    create_dir(out_dir)?;

    let results: Vec<Result<CacheRow, String>> = entries
        .par_iter()
        .map(|e| extract_one(e, config.max_imfs))
        .collect();

    let mut rows = Vec::new();
    let mut errors = String::from("source_id,error\n");
    let mut failures = 0;
    let mut sidecar = csv::Writer::from_writer(Vec::new());
    for (entry, result) in entries.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(message) => {
                failures += 1;
                sidecar
                    .write_record([entry.source_id.as_str(), message.as_str()])
                    .expect("writing to memory");
            }
        }
    }
    errors.push_str(
        &String::from_utf8(sidecar.into_inner().expect("flush to memory")).expect("utf-8"),
    );

    let cache_path = out_dir.join(CACHE_FILE);
    let errors_path = out_dir.join(ERRORS_FILE);
    write_file(&errors_path, &errors)?;
    if rows.is_empty() {
        return Err(CliError::NoFilesSucceeded(entries.len()));
    }
    write_cache(&cache_path, &rows, FEATURE_DIM)?;
    Ok(ExtractSummary {
        cache_path,
        errors_path,
        rows: rows.len(),
        failures,
    })
}

#[derive(Debug, Clone)]
pub struct EvaluateSummary {
    /// Sorted by accuracy descending, then algorithm name.
    pub ranked: Vec<(Algorithm, CvReport)>,
    pub out_dir: PathBuf,
}

fn roc_csv(report: &CvReport) -> String {
    let mut s = String::from("fpr,tpr,threshold\n");
    for p in &report.roc.points {
        writeln!(s, "{},{},{}", p.fpr, p.tpr, p.threshold).unwrap();
    }
    s
}

/// Cross-validates all five algorithms on the cached features with shared
/// folds and writes the metrics CSV, one ROC CSV per algorithm, the
/// confusion matrices and a ranked summary.
pub fn run_evaluate(
    cache: &Path,
    out_dir: &Path,
    config: &RunConfig,
) -> Result<EvaluateSummary, CliError> {
    config.validate()?;
    let rows = read_cache(cache)?;
    if rows.is_empty() {
        return Err(CliError::BadRecord {
            path: cache.to_path_buf(),
            line: 1,
            message: "feature cache has no rows".into(),
        });
    }
    let data = to_dataset(&rows)?;
    create_dir(out_dir)?;

    let mut ranked = Vec::new();
    for algorithm in Algorithm::ALL {
        let report = imfclass_core::cross_validate(
            &config.train_config(algorithm),
            &data,
            config.folds,
            config.fold_seed(),
            config.positive,
        )?;
        ranked.push((algorithm, report));
    }
    ranked.sort_by(|(a, ra), (b, rb)| {
        rb.metrics
            .acc
            .total_cmp(&ra.metrics.acc)
            .then_with(|| a.name().cmp(b.name()))
    });

    let mut metrics = String::from("algorithm,acc,rec,spe,pre,f1,auc\n");
    let mut confusion = String::new();
    let mut summary = String::new();
    writeln!(
        summary,
        "rows {}  (label 1: {}, label 0: {})  folds {}  seed {}  positive label {}  standardize {}",
        data.len(),
        data.count_label(1),
        data.count_label(0),
        config.folds,
        config.seed,
        config.positive,
        config.standardize
    )
    .unwrap();
    writeln!(
        summary,
        "{:<4} {:<14} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "rank", "algorithm", "acc", "rec", "spe", "pre", "f1", "auc"
    )
    .unwrap();

    for (rank, (algorithm, r)) in ranked.iter().enumerate() {
        let m = &r.metrics;
        writeln!(
            metrics,
            "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.4}",
            algorithm, m.acc, m.rec, m.spe, m.pre, m.f1, r.roc.auc
        )
        .unwrap();
        writeln!(
            summary,
            "{:<4} {:<14} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.4}",
            rank + 1,
            algorithm.name(),
            m.acc,
            m.rec,
            m.spe,
            m.pre,
            m.f1,
            r.roc.auc
        )
        .unwrap();
        writeln!(confusion, "[{algorithm}] positive label {}", r.positive).unwrap();
        writeln!(confusion, "{}\n", r.confusion).unwrap();
        write_file(&out_dir.join(format!("roc_{algorithm}.csv")), &roc_csv(r))?;
    }

    write_file(&out_dir.join(METRICS_FILE), &metrics)?;
    write_file(&out_dir.join(CONFUSION_FILE), &confusion)?;
    write_file(&out_dir.join(SUMMARY_FILE), &summary)?;
    Ok(EvaluateSummary {
        ranked,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Writes the decomposition of one WAV file as
/// `t,input,imf1..imfK,residual` with K = max(5, max_imfs). `input` is the
/// z-normalized signal that was decomposed; missing IMFs are empty fields.
pub fn run_decompose(wav: &Path, out_csv: &Path, max_imfs: usize) -> Result<usize, CliError> {
    if !(1..=10).contains(&max_imfs) {
        return Err(CliError::InvalidConfig(format!(
            "max-imfs must be in 1..=10, got {max_imfs}"
        )));
    }
    let bytes = std::fs::read(wav).map_err(|e| CliError::io(wav, e))?;
    let signal = decode_wav(&bytes).map_err(imfclass_core::Error::from)?;
    let normalized = z_normalize(&signal).map_err(imfclass_core::Error::from)?;
    let dec = decompose(&normalized, max_imfs);
    let columns = max_imfs.max(DEFAULT_MAX_IMFS);
    let rate = f64::from(signal.sample_rate_hz());

    let mut out = String::from("t,input");
    for i in 1..=columns {
        write!(out, ",imf{i}").unwrap();
    }
    out.push_str(",residual\n");
    for (i, x) in normalized.samples().iter().enumerate() {
        write!(out, "{},{}", i as f64 / rate, x).unwrap();
        for c in 0..columns {
            match dec.imfs.get(c) {
                Some(imf) => write!(out, ",{}", imf[i]).unwrap(),
                None => out.push(','),
            }
        }
        writeln!(out, ",{}", dec.residual[i]).unwrap();
    }
    if let Some(parent) = out_csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(out_csv, &out)?;
    Ok(dec.imfs.len())
}
