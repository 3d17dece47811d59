use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imfclass_cli::{run_decompose, run_evaluate, run_extract, CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "imfclass",
    version,
    about = "IMF feature extraction and binary classifier comparison for WAV recordings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode, normalize and decompose every manifest entry into a feature cache.
    Extract {
        /// CSV with header `path,label`; relative paths resolve against its directory.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_imfs: usize,
    },
    /// Cross-validate all five classifiers on a feature cache.
    Evaluate {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Dump the decomposition of one WAV file as CSV.
    Decompose {
        #[arg(long)]
        wav: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_imfs: usize,
    },
    /// Print the version.
    Version,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Label treated as the positive class in reported metrics.
    #[arg(long, default_value_t = 1)]
    positive: u8,
    #[arg(long, default_value_t = 10)]
    knn_k: usize,
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    #[arg(long, default_value_t = 30)]
    trees: usize,
    #[arg(long, default_value_t = 1e-4)]
    logreg_lambda: f64,
    /// Feed raw features to the classifiers instead of per-fold z-scores.
    #[arg(long)]
    raw_features: bool,
}

impl EvalArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            folds: self.folds,
            seed: self.seed,
            positive: self.positive,
            knn_k: self.knn_k,
            svm_c: self.svm_c,
            n_trees: self.trees,
            logreg_lambda: self.logreg_lambda,
            standardize: !self.raw_features,
            ..RunConfig::default()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract {
            manifest,
            out,
            max_imfs,
        } => {
            let config = RunConfig {
                max_imfs,
                ..RunConfig::default()
            };
            let s = run_extract(&manifest, &out, &config)?;
            println!(
                "extracted {} rows -> {} ({} failed, see {})",
                s.rows,
                s.cache_path.display(),
                s.failures,
                s.errors_path.display()
            );
        }
        Command::Evaluate { cache, out, eval } => {
            let s = run_evaluate(&cache, &out, &eval.config())?;
            for (rank, (algorithm, report)) in s.ranked.iter().enumerate() {
                println!(
                    "{:>2}. {:<13} acc {:6.2}  auc {:.4}",
                    rank + 1,
                    algorithm.name(),
                    report.metrics.acc,
                    report.roc.auc
                );
            }
            println!("reports written to {}", s.out_dir.display());
        }
        Command::Decompose { wav, out, max_imfs } => {
            let n = run_decompose(&wav, &out, max_imfs)?;
            println!("{n} IMFs -> {}", out.display());
        }
        Command::Version => println!("imfclass {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
