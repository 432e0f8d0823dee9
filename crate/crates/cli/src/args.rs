//! Command-line flags and their merge onto a file configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poqg_core::baselines::BorderlineKind;
use poqg_core::eval::{ClassifierSpec, LogisticConfig};
use poqg_core::neighbors::DensityDenominator;
use poqg_core::poqg::{AnchorMode, PairSampling, QKernel};
use poqg_core::resample::MethodId;
use serde::de::DeserializeOwned;

use crate::config::{load_config_file, CommandKind, DataFormat, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "poqg",
    version,
    about = "Oversampling benchmarks for imbalanced binary classification",
    args_conflicts_with_subcommands = true,
    subcommand_required = false,
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Re-run the configuration recorded in a run.json.
    #[arg(long, value_name = "RUN_JSON", requires = "out")]
    pub replay: Option<PathBuf>,

    /// Output directory for --replay.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resample one dataset and write the result with provenance.
    Resample(ResampleArgs),
    /// Cross-validate several methods on several datasets and compare them.
    Compare(CompareArgs),
    /// Grid-search PO-QG hyperparameters on one dataset.
    Grid(GridArgs),
    /// Run every method on the synthetic 2-D case study and write scatter data.
    Demo(DemoArgs),
}

/// Parse a lowercase enum name through its serde representation.
fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase().replace('-', "_")))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for all randomness.
    #[arg(long, env = "POQG_SEED")]
    pub seed: Option<u64>,

    /// Input format; `auto` reads `.dat` as KEEL and anything else as CSV.
    #[arg(long, value_parser = serde_enum::<DataFormat>)]
    pub format: Option<DataFormat>,

    /// Drop nominal KEEL attributes instead of rejecting the file.
    #[arg(long)]
    pub drop_nominal: bool,

    /// CSV class column (name, or zero-based index).
    #[arg(long)]
    pub label_column: Option<String>,

    /// CSV value that marks the minority class.
    #[arg(long)]
    pub minority_label: Option<String>,

    /// CSV value that marks the majority class; other values are rejected.
    #[arg(long)]
    pub majority_label: Option<String>,

    /// CSV input has no header row.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct PoqgArgs {
    /// Neighbour count (PO-QG `k`; also the baselines' `k_neighbors` for `resample`).
    #[arg(long)]
    pub k: Option<usize>,
    /// Majority density exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// q-Gaussian length scale.
    #[arg(long)]
    pub beta: Option<f64>,
    /// q-Gaussian shape.
    #[arg(long)]
    pub q: Option<f64>,
    /// Number of synthetics (default: the class gap).
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long, value_parser = serde_enum::<AnchorMode>)]
    pub anchor_mode: Option<AnchorMode>,
    #[arg(long, value_parser = serde_enum::<PairSampling>)]
    pub pair_sampling: Option<PairSampling>,
    /// `literal` (default) or `continuous` q-Gaussian kernel.
    #[arg(long, value_parser = serde_enum::<QKernel>)]
    pub q_kernel: Option<QKernel>,
    #[arg(long, value_parser = serde_enum::<DensityDenominator>)]
    pub density_denominator: Option<DensityDenominator>,
    #[arg(long)]
    pub eps_div: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Borderline-SMOTE neighbourhood used to find danger points.
    #[arg(long)]
    pub m_neighbors: Option<usize>,
    #[arg(long, value_parser = serde_enum::<BorderlineKind>)]
    pub borderline_kind: Option<BorderlineKind>,
    /// ENN vote size.
    #[arg(long)]
    pub enn_k: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassifierKind {
    Knn,
    Logistic,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierKind>,
    /// Neighbours for the k-NN classifier.
    #[arg(long)]
    pub classifier_k: Option<usize>,
    /// Gradient-descent epochs for the logistic classifier.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    /// Min-max scale features, fit on each training fold.
    #[arg(long)]
    pub scale: bool,
    /// Also report the FPR-based G-Mean/AUC variants (labelled paper_literal_*).
    #[arg(long)]
    pub paper_literal: bool,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    #[arg(long)]
    pub method: Option<MethodId>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub poqg: PoqgArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(required = true)]
    pub datasets: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated methods (default: all six plus no resampling).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<MethodId>>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub poqg: PoqgArgs,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Baseline SMOTE-side neighbour count.
    #[arg(long)]
    pub k_neighbors: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    pub out: PathBuf,
    #[arg(long, env = "POQG_SEED")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn base(config: &Option<PathBuf>) -> CliResult<RunConfig> {
    match config {
        Some(p) => load_config_file(p),
        None => Ok(RunConfig::default()),
    }
}

impl CommonArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.seed, self.seed);
        set(&mut c.data.format, self.format);
        c.data.drop_nominal |= self.drop_nominal;
        set(&mut c.data.label_column, self.label_column);
        set(&mut c.data.minority_label, self.minority_label);
        if self.majority_label.is_some() {
            c.data.majority_label = self.majority_label;
        }
        if self.no_header {
            c.data.has_header = false;
        }
    }
}

impl PoqgArgs {
    fn apply(self, c: &mut RunConfig) {
        let p = &mut c.poqg;
        set(&mut p.k, self.k);
        set(&mut p.alpha, self.alpha);
        set(&mut p.beta, self.beta);
        set(&mut p.q, self.q);
        if self.target.is_some() {
            p.target = self.target;
        }
        set(&mut p.anchor_mode, self.anchor_mode);
        set(&mut p.pair_sampling, self.pair_sampling);
        set(&mut p.q_kernel, self.q_kernel);
        set(&mut p.density_denominator, self.density_denominator);
        set(&mut p.eps_div, self.eps_div);
    }
}

impl BaselineArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.baseline.m_neighbors, self.m_neighbors);
        set(&mut c.baseline.borderline_kind, self.borderline_kind);
        set(&mut c.baseline.enn_k, self.enn_k);
    }
}

impl EvalArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.folds, self.folds);
        let kind = self.classifier.unwrap_or(match c.classifier {
            ClassifierSpec::Knn { .. } => ClassifierKind::Knn,
            ClassifierSpec::Logistic(_) => ClassifierKind::Logistic,
        });
        c.classifier = match (kind, c.classifier) {
            (ClassifierKind::Knn, ClassifierSpec::Knn { k }) => ClassifierSpec::Knn {
                k: self.classifier_k.unwrap_or(k),
            },
            (ClassifierKind::Knn, _) => ClassifierSpec::Knn {
                k: self.classifier_k.unwrap_or(5),
            },
            (ClassifierKind::Logistic, prev) => {
                let mut l = match prev {
                    ClassifierSpec::Logistic(l) => l,
                    _ => LogisticConfig::default(),
                };
                set(&mut l.epochs, self.epochs);
                set(&mut l.learning_rate, self.learning_rate);
                set(&mut l.l2, self.l2);
                ClassifierSpec::Logistic(l)
            }
        };
        c.cv.scale |= self.scale;
        c.cv.paper_literal |= self.paper_literal;
    }
}

/// What `main` should do.
#[derive(Debug)]
pub enum Invocation {
    Run { config: RunConfig, out: PathBuf },
}

impl Cli {
    pub fn into_invocation(self) -> CliResult<Invocation> {
        if let Some(path) = self.replay {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                crate::error::CliError::config(format!("cannot read {}: {e}", path.display()))
            })?;
            let config = crate::config::parse_run_json(&text)?;
            return Ok(Invocation::Run {
                config,
                out: self.out.expect("clap enforces --out"),
            });
        }
        let command = self
            .command
            .ok_or_else(|| crate::error::CliError::config("no command given"))?;
        let (config, out) = command.into_run_config()?;
        Ok(Invocation::Run { config, out })
    }
}

impl Command {
    pub fn into_run_config(self) -> CliResult<(RunConfig, PathBuf)> {
        match self {
            Command::Resample(a) => {
                let mut c = base(&a.common.config)?;
                c.command = Some(CommandKind::Resample);
                if let Some(k) = a.poqg.k {
                    c.baseline.k_neighbors = k;
                }
                a.common.apply(&mut c);
                a.poqg.apply(&mut c);
                a.baseline.apply(&mut c);
                set(&mut c.method, a.method);
                c.inputs = vec![a.input];
                Ok((c, a.out))
            }
            Command::Compare(a) => {
                let mut c = base(&a.common.config)?;
                c.command = Some(CommandKind::Compare);
                a.common.apply(&mut c);
                a.poqg.apply(&mut c);
                a.baseline.apply(&mut c);
                a.eval.apply(&mut c);
                set(&mut c.baseline.k_neighbors, a.k_neighbors);
                if let Some(mut m) = a.methods {
                    m.sort();
                    m.dedup();
                    c.methods = m;
                }
                c.inputs = a.datasets;
                Ok((c, a.out))
            }
            Command::Grid(a) => {
                let mut c = base(&a.common.config)?;
                c.command = Some(CommandKind::Grid);
                a.common.apply(&mut c);
                a.eval.apply(&mut c);
                set(&mut c.grid.k, a.k);
                set(&mut c.grid.alpha, a.alpha);
                set(&mut c.grid.beta, a.beta);
                set(&mut c.grid.q, a.q);
                c.inputs = vec![a.dataset];
                Ok((c, a.out))
            }
            Command::Demo(a) => {
                let mut c = base(&a.config)?;
                c.command = Some(CommandKind::Demo);
                set(&mut c.seed, a.seed);
                c.inputs.clear();
                Ok((c, a.out))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    fn parse(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(args).unwrap();
        match cli.into_invocation().unwrap() {
            Invocation::Run { config, .. } => config,
        }
    }

    #[test]
    fn resample_flags_override_defaults() {
        let c = parse(&[
            "poqg", "resample", "in.dat", "out", "--method", "poqg", "--k", "5", "--alpha", "0.5", "--beta", "0.1",
            "--q", "1.7", "--seed", "42",
        ]);
        assert_eq!(c.command, Some(CommandKind::Resample));
        assert_eq!((c.poqg.k, c.poqg.alpha, c.poqg.beta, c.poqg.q, c.seed), (5, 0.5, 0.1, 1.7, 42));
        assert_eq!(c.inputs, vec![PathBuf::from("in.dat")]);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 3\nfolds = 4\n[poqg]\nalpha = 0.7\nq = 1.5\n").unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["poqg", "compare", "a.dat", "b.dat", "--out", "o", "--config", p, "--q", "1.3"]);
        assert_eq!((c.seed, c.folds, c.poqg.alpha, c.poqg.q), (3, 4, 0.7, 1.3));
        let c = parse(&["poqg", "compare", "a.dat", "--out", "o", "--config", p, "--methods", "PO-QG,smote"]);
        assert_eq!(c.methods, vec![MethodId::Smote, MethodId::Poqg]);
    }

    #[test]
    fn grid_lists_and_classifier() {
        let c = parse(&[
            "poqg", "grid", "d.dat", "--out", "o", "--k", "5,7", "--q", "1.5", "--classifier", "logistic", "--epochs",
            "10",
        ]);
        assert_eq!(c.grid.k, vec![5, 7]);
        assert_eq!(c.grid.len(), 2 * 3 * 3);
        assert!(matches!(c.classifier, ClassifierSpec::Logistic(l) if l.epochs == 10));
    }

    #[test]
    fn enum_flags_use_snake_names() {
        let c = parse(&["poqg", "resample", "i", "o", "--q-kernel", "continuous", "--pair-sampling", "with-replacement"]);
        assert_eq!(c.poqg.q_kernel, QKernel::Continuous);
        assert_eq!(c.poqg.pair_sampling, PairSampling::WithReplacement);
        assert!(Cli::try_parse_from(["poqg", "resample", "i", "o", "--q-kernel", "wobbly"]).is_err());
    }
}
