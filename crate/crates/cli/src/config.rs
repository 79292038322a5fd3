//! Experiment configuration.
//!
//! Each subcommand starts from its own default [`ExperimentConfig`]. A TOML
//! file, then `--set key=value` overrides, then `--seed`/`--out` are layered
//! on top, and the merged document is deserialized with unknown keys
//! rejected.
//!
//! Component seeds are derived from the master seed by fixed offsets:
//!
//! | stream                       | seed              |
//! |------------------------------|-------------------|
//! | parameter initialization     | `seed`            |
//! | dataset generation           | `seed + 1`        |
//! | train/test split             | `seed + 2`        |
//! | optimizer comparison, run i  | `seed + i`        |

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::CliError;

pub const SEED_OFFSET_INIT: u64 = 0;
pub const SEED_OFFSET_DATA: u64 = 1;
pub const SEED_OFFSET_SPLIT: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Landscape,
    SpectrumEvolution,
    Perturb,
    TrainQnn,
    TrainFfnn,
    CompareOptimizers,
    GenData,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Landscape,
        Self::SpectrumEvolution,
        Self::Perturb,
        Self::TrainQnn,
        Self::TrainFfnn,
        Self::CompareOptimizers,
        Self::GenData,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Landscape => "landscape",
            Self::SpectrumEvolution => "spectrum-evolution",
            Self::Perturb => "perturb",
            Self::TrainQnn => "train-qnn",
            Self::TrainFfnn => "train-ffnn",
            Self::CompareOptimizers => "compare-optimizers",
            Self::GenData => "gen-data",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Toy,
    Layered,
    Reuploading,
    Ffnn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub qubits: usize,
    pub layers: usize,
    /// Hidden widths of the FFNN.
    pub hidden: Vec<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Toy,
            qubits: 2,
            layers: 1,
            hidden: vec![12, 10],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Global,
    Local,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Zero,
    Uniform,
    Ghz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossConfig {
    pub kind: LossKind,
    /// Target state of the global loss.
    pub target: TargetKind,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            kind: LossKind::Global,
            target: TargetKind::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerName {
    Gd,
    HessianLr,
    Qng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub kind: OptimizerName,
    pub epochs: usize,
    /// Step size of GD and QNG.
    pub eta: f64,
    pub recompute_every: usize,
    pub eta_cap: f64,
    pub lambda_reg: f64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            kind: OptimizerName::Gd,
            epochs: 200,
            eta: 0.1,
            recompute_every: 10,
            eta_cap: 2.0,
            lambda_reg: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub n: usize,
    pub train_fraction: f64,
    /// Read points from this CSV instead of generating them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            n: 250,
            train_fraction: 0.8,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianScope {
    /// Every circuit parameter.
    All,
    /// Only the two grid parameters.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Parameter indices on the two grid axes.
    pub free: [usize; 2],
    /// Value of every other parameter.
    pub fixed: f64,
    pub min: f64,
    pub max: f64,
    pub resolution: usize,
    pub marked: Vec<[f64; 2]>,
    pub hessian: HessianScope,
    /// Also train from a seeded start and classify where training ends.
    pub train: bool,
    /// Side length of the prediction maps of the classifiers.
    pub prediction_resolution: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            free: [0, 1],
            fixed: 0.0,
            min: -PI,
            max: PI,
            resolution: 41,
            marked: vec![[0.0, 0.0], [FRAC_PI_2, FRAC_PI_2]],
            hessian: HessianScope::All,
            train: false,
            prediction_resolution: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Hessian snapshot interval in epochs.
    pub every: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { every: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    /// The grid is `i * max_epsilon / steps` for `i` in `-steps..=steps`.
    pub max_epsilon: f64,
    pub steps: usize,
    /// Converged parameters (`index,value` CSV); trained in-process if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            max_epsilon: 0.5,
            steps: 10,
            params: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// Number of shared-seed optimizer triples.
    pub runs: usize,
    /// Loss level whose first-hit epoch is compared.
    pub threshold: f64,
    /// QNG step size; GD uses `optimizer.eta`.
    pub qng_eta: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            runs: 5,
            threshold: 0.5,
            qng_eta: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: PathBuf,
    pub model: ModelConfig,
    pub loss: LossConfig,
    pub optimizer: OptimizerSection,
    pub dataset: DatasetConfig,
    pub grid: GridConfig,
    pub spectrum: SpectrumConfig,
    pub perturb: PerturbConfig,
    pub compare: CompareConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::defaults_for(Experiment::Landscape)
    }
}

impl ExperimentConfig {
    /// Documented defaults of each subcommand.
    pub fn defaults_for(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            seed: 0,
            out: PathBuf::from("out").join(experiment.as_str()),
            model: ModelConfig::default(),
            loss: LossConfig::default(),
            optimizer: OptimizerSection::default(),
            dataset: DatasetConfig::default(),
            grid: GridConfig::default(),
            spectrum: SpectrumConfig::default(),
            perturb: PerturbConfig::default(),
            compare: CompareConfig::default(),
        };
        match experiment {
            Experiment::Landscape => {
                c.seed = 2;
                c.optimizer.eta = 0.5;
            }
            Experiment::SpectrumEvolution | Experiment::Perturb => {
                c.seed = 1;
                c.model = ModelConfig {
                    kind: ModelKind::Layered,
                    qubits: 4,
                    layers: 4,
                    ..ModelConfig::default()
                };
                c.loss.target = TargetKind::Uniform;
                c.optimizer.eta = 0.5;
                c.optimizer.epochs = 500;
            }
            Experiment::TrainQnn => {
                c.seed = 7;
                c.model = ModelConfig {
                    kind: ModelKind::Reuploading,
                    qubits: 4,
                    layers: 4,
                    ..ModelConfig::default()
                };
                c.loss.kind = LossKind::Square;
                c.optimizer.eta = 0.002;
                c.optimizer.epochs = 1500;
            }
            Experiment::TrainFfnn => {
                c.seed = 7;
                c.model = ModelConfig {
                    kind: ModelKind::Ffnn,
                    qubits: 4,
                    layers: 4,
                    ..ModelConfig::default()
                };
                c.loss.kind = LossKind::Square;
                c.optimizer.eta = 0.01;
                c.optimizer.epochs = 5000;
            }
            Experiment::CompareOptimizers => {
                c.model = ModelConfig {
                    kind: ModelKind::Layered,
                    qubits: 8,
                    layers: 4,
                    ..ModelConfig::default()
                };
                c.loss.target = TargetKind::Uniform;
                c.optimizer.eta = 0.1;
                c.optimizer.epochs = 300;
            }
            Experiment::GenData => {
                c.dataset.n = 10_000;
            }
        }
        c
    }

    /// Resolves the configuration of `experiment` from defaults, an optional
    /// TOML document, dotted-key overrides, and the seed/output flags.
    pub fn resolve(
        experiment: Experiment,
        document: Option<&str>,
        overrides: &[String],
        seed: Option<u64>,
        out: Option<&Path>,
    ) -> Result<Self, CliError> {
        let mut merged = Value::try_from(Self::defaults_for(experiment))
            .map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(text) = document {
            let user: Table = toml::from_str(text)?;
            if let Some(name) = user.get("experiment") {
                if name.as_str() != Some(experiment.as_str()) {
                    return Err(CliError::Config(format!(
                        "config is for experiment {name}, running `{experiment}`"
                    )));
                }
            }
            merge(&mut merged, Value::Table(user));
        }
        for item in overrides {
            apply_override(&mut merged, item)?;
        }
        let mut config: Self = merged.try_into()?;
        if let Some(seed) = seed {
            config.seed = seed;
        }
        if let Some(out) = out {
            config.out = out.to_path_buf();
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn init_seed(&self) -> u64 {
        self.seed.wrapping_add(SEED_OFFSET_INIT)
    }

    pub fn data_seed(&self) -> u64 {
        self.seed.wrapping_add(SEED_OFFSET_DATA)
    }

    pub fn split_seed(&self) -> u64 {
        self.seed.wrapping_add(SEED_OFFSET_SPLIT)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let m = &self.model;
        if m.kind != ModelKind::Ffnn && m.qubits == 0 {
            return bad("model.qubits must be at least 1".into());
        }
        if matches!(m.kind, ModelKind::Layered | ModelKind::Reuploading) && (m.qubits < 2 || m.layers == 0) {
            return bad("layered circuits need qubits >= 2 and layers >= 1".into());
        }
        if m.kind == ModelKind::Ffnn && m.hidden.contains(&0) {
            return bad("model.hidden widths must be positive".into());
        }
        if m.qubits > 16 {
            return bad(format!("model.qubits = {} exceeds the simulator limit of 16", m.qubits));
        }
        let circuit_loss = matches!(self.loss.kind, LossKind::Global | LossKind::Local);
        let data_model = matches!(m.kind, ModelKind::Reuploading | ModelKind::Ffnn);
        if circuit_loss == data_model {
            return bad(format!(
                "loss.kind {:?} does not fit model.kind {:?}",
                self.loss.kind, m.kind
            ));
        }
        let o = &self.optimizer;
        if !(o.eta > 0.0 && o.eta_cap > 0.0 && o.lambda_reg > 0.0) || o.recompute_every == 0 {
            return bad("optimizer step sizes, cap and regularizer must be positive".into());
        }
        let d = &self.dataset;
        if d.n == 0 || !(d.train_fraction > 0.0 && d.train_fraction < 1.0) {
            return bad("dataset.n must be positive and train_fraction in (0, 1)".into());
        }
        let g = &self.grid;
        if g.resolution < 2 || g.prediction_resolution < 2 || g.max <= g.min || g.free[0] == g.free[1] {
            return bad("grid needs two distinct free axes, max > min and resolutions >= 2".into());
        }
        if self.spectrum.every == 0 {
            return bad("spectrum.every must be at least 1".into());
        }
        if !(self.perturb.max_epsilon > 0.0) || self.perturb.steps == 0 {
            return bad("perturb.max_epsilon and perturb.steps must be positive".into());
        }
        if self.compare.runs == 0 || !(self.compare.qng_eta > 0.0) {
            return bad("compare.runs and compare.qng_eta must be positive".into());
        }
        Ok(())
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Table(b), Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `a.b.c=value`. The value is read as a TOML literal, or as a bare
/// string when it does not parse.
pub fn apply_override(doc: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    let value = toml::from_str::<Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim().to_string()));

    let mut node = doc;
    for part in &path[..path.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{key}` does not name a config section")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| CliError::Config(format!("`{key}` does not name a config section")))?;
    let leaf = path[path.len() - 1].to_string();
    // Integer literals assigned to float keys stay floats.
    let value = match (table.get(&leaf), value) {
        (Some(Value::Float(_)), Value::Integer(i)) => Value::Float(i as f64),
        (_, v) => v,
    };
    table.insert(leaf, value);
    Ok(())
}
