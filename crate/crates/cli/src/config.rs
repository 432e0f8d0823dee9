//! Run configuration: read from a TOML file, overridden by flags, and
//! written back as `run.json` so every run can be replayed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use poqg_core::baselines::{BaselineConfig, BaselineMethod, BorderlineKind};
use poqg_core::data::{load_csv, load_keel_with, CsvOptions, KeelOptions, LabelColumn};
use poqg_core::eval::{ClassifierSpec, CvOptions};
use poqg_core::poqg::{PoqgConfig, GRID_ALPHA, GRID_BETA, GRID_K, GRID_Q};
use poqg_core::resample::MethodId;
use poqg_core::{Dataset, ResamplerSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Resample,
    Compare,
    Grid,
    Demo,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    /// KEEL for `.dat` files, CSV otherwise.
    #[default]
    Auto,
    Keel,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataOptions {
    pub format: DataFormat,
    /// Drop nominal KEEL inputs instead of rejecting the file.
    pub drop_nominal: bool,
    /// CSV class column, by name or zero-based index.
    pub label_column: String,
    pub minority_label: String,
    pub majority_label: Option<String>,
    pub has_header: bool,
}

impl Default for DataOptions {
    fn default() -> Self {
        DataOptions {
            format: DataFormat::Auto,
            drop_nominal: false,
            label_column: "label".into(),
            minority_label: "1".into(),
            majority_label: None,
            has_header: true,
        }
    }
}

impl DataOptions {
    pub fn load(&self, path: &Path) -> poqg_core::Result<Dataset> {
        let keel = match self.format {
            DataFormat::Keel => true,
            DataFormat::Csv => false,
            DataFormat::Auto => path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("dat")),
        };
        if keel {
            load_keel_with(
                path,
                &KeelOptions {
                    drop_nominal: self.drop_nominal,
                },
            )
        } else {
            let label_column: LabelColumn = self.label_column.parse().expect("infallible");
            let opts = CsvOptions {
                majority_label: self.majority_label.clone(),
                has_header: self.has_header,
                ..CsvOptions::new(label_column, self.minority_label.clone())
            };
            load_csv(path, &opts)
        }
    }
}

/// Baseline parameters shared by all five baseline methods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSettings {
    pub k_neighbors: usize,
    pub m_neighbors: usize,
    pub borderline_kind: BorderlineKind,
    pub enn_k: usize,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        let b = BaselineConfig::new(BaselineMethod::Smote);
        BaselineSettings {
            k_neighbors: b.k_neighbors,
            m_neighbors: b.m_neighbors,
            borderline_kind: b.borderline_kind,
            enn_k: b.enn_k,
        }
    }
}

impl BaselineSettings {
    pub fn config(&self, method: BaselineMethod, seed: u64) -> BaselineConfig {
        BaselineConfig {
            k_neighbors: self.k_neighbors,
            m_neighbors: self.m_neighbors,
            borderline_kind: self.borderline_kind,
            enn_k: self.enn_k,
            seed,
            ..BaselineConfig::new(method)
        }
    }
}

/// Values searched by `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub k: Vec<usize>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub q: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            k: GRID_K.to_vec(),
            alpha: GRID_ALPHA.to_vec(),
            beta: GRID_BETA.to_vec(),
            q: GRID_Q.to_vec(),
        }
    }
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.k.len() * self.alpha.len() * self.beta.len() * self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All combinations in (k, alpha, beta, q) lexicographic order.
    pub fn configs(&self, base: &PoqgConfig) -> Vec<PoqgConfig> {
        let mut out = Vec::with_capacity(self.len());
        for &k in &self.k {
            for &alpha in &self.alpha {
                for &beta in &self.beta {
                    for &q in &self.q {
                        out.push(PoqgConfig {
                            k,
                            alpha,
                            beta,
                            q,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

/// Everything that determines a run's outputs. The output directory is
/// deliberately absent so a replay into another directory is byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub data: DataOptions,
    /// Method for `resample`.
    pub method: MethodId,
    /// Methods for `compare`, reported in the fixed column order.
    pub methods: Vec<MethodId>,
    pub poqg: PoqgConfig,
    /// Per-dataset PO-QG settings for `compare`, keyed by dataset id (the
    /// input file stem).
    pub poqg_overrides: BTreeMap<String, PoqgConfig>,
    pub baseline: BaselineSettings,
    pub folds: usize,
    pub classifier: ClassifierSpec,
    pub cv: CvOptions,
    pub grid: GridSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 0,
            inputs: Vec::new(),
            data: DataOptions::default(),
            method: MethodId::Poqg,
            methods: MethodId::ALL.to_vec(),
            poqg: PoqgConfig::default(),
            poqg_overrides: BTreeMap::new(),
            baseline: BaselineSettings::default(),
            folds: 5,
            classifier: ClassifierSpec::default(),
            cv: CvOptions::default(),
            grid: GridSpec::default(),
        }
    }
}

/// Parse a TOML run configuration. Unknown keys are errors.
pub fn parse_config_toml(text: &str) -> CliResult<RunConfig> {
    toml::from_str(text).map_err(|e| CliError::config(format!("config file: {e}")))
}

pub fn load_config_file(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_toml(&text).map_err(|e| e.context(path.display()))
}

/// Parse a `run.json` written by an earlier run.
pub fn parse_run_json(text: &str) -> CliResult<RunConfig> {
    serde_json::from_str(text).map_err(|e| CliError::config(format!("run record: {e}")))
}

impl RunConfig {
    /// Dataset id used in reports: the file stem.
    pub fn dataset_id(path: &Path) -> String {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    }

    pub fn poqg_for(&self, dataset: &str) -> PoqgConfig {
        self.poqg_overrides.get(dataset).unwrap_or(&self.poqg).clone()
    }

    pub fn spec_for(&self, method: MethodId, dataset: &str) -> ResamplerSpec {
        match method {
            MethodId::None => ResamplerSpec::None,
            MethodId::Poqg => ResamplerSpec::Poqg(self.poqg_for(dataset)),
            other => ResamplerSpec::Baseline(
                self.baseline
                    .config(other.baseline().expect("baseline method"), self.seed),
            ),
        }
    }

    /// Check everything that can be checked without touching data.
    pub fn validate(&self) -> CliResult<()> {
        let command = self
            .command
            .ok_or_else(|| CliError::config("run record has no command"))?;
        self.poqg.validate()?;
        for (ds, cfg) in &self.poqg_overrides {
            cfg.validate().map_err(|e| CliError::from(e).context(format!("poqg_overrides.{ds}")))?;
        }
        self.baseline.config(BaselineMethod::Smote, 0).validate()?;
        match command {
            CommandKind::Resample | CommandKind::Grid if self.inputs.len() != 1 => {
                return Err(CliError::config("exactly one input dataset is required"));
            }
            CommandKind::Compare if self.inputs.is_empty() => {
                return Err(CliError::config("at least one dataset is required"));
            }
            _ => {}
        }
        if command == CommandKind::Compare && self.methods.len() < 2 {
            return Err(CliError::config("compare needs at least two methods"));
        }
        if matches!(command, CommandKind::Compare | CommandKind::Grid) {
            if self.folds < 2 {
                return Err(CliError::config("folds must be at least 2"));
            }
            match self.classifier {
                ClassifierSpec::Knn { k: 0 } => return Err(CliError::config("classifier k must be positive")),
                ClassifierSpec::Logistic(l) if !(l.learning_rate > 0.0) => {
                    return Err(CliError::config("learning rate must be positive"))
                }
                _ => {}
            }
        }
        if command == CommandKind::Grid {
            if self.grid.is_empty() {
                return Err(CliError::config("grid is empty"));
            }
            for cfg in self.grid.configs(&self.poqg) {
                cfg.validate()?;
            }
        }
        let mut ids: Vec<String> = self.inputs.iter().map(|p| Self::dataset_id(p)).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::config(format!("two inputs share the dataset id `{}`", w[0])));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes") + "\n"
    }
}
