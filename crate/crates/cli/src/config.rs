//! Run configuration: TOML or JSON, every parameter under an explicit key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use criticality::feynman_kac::DEFAULT_DT_FRACTION;
use criticality::models::{DiffusionRecipe, StableRecipe};
use criticality::potential::{DEFAULT_LIMIT_TOL, DEFAULT_RECURRENCE_TOL};
use criticality::spectral::DEFAULT_TOL;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Build,
    Spectrum,
    Classify,
    Capacity,
    Khtest,
    CriticalCert,
    Hardy,
    Simulate,
    Sweep,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Build => "build",
            Task::Spectrum => "spectrum",
            Task::Classify => "classify",
            Task::Capacity => "capacity",
            Task::Khtest => "khtest",
            Task::CriticalCert => "critical-cert",
            Task::Hardy => "hardy",
            Task::Simulate => "simulate",
            Task::Sweep => "sweep",
        }
    }
}

/// Which density the stable recipe carries as `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StablePotential {
    /// `κ(δ) |x|^{−α}`.
    #[default]
    Hardy,
    /// `|x|^{−(d+α)/2}`.
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    #[serde(flatten)]
    pub recipe: StableRecipe,
    #[serde(default)]
    pub potential: StablePotential,
}

/// A model stored as JSON (as written by `build`), with `μ` either inline
/// or taken from the file's `mu` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSpec {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Recipe {
    Stable(StableSpec),
    Diffusion(DiffusionSpec),
    Model(FileSpec),
}

/// `DiffusionRecipe` with its scale tag kept flat next to `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub scale: String,
    pub p: f64,
    pub grid: criticality::models::GeometricGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<criticality::models::RadialPower>,
}

impl DiffusionSpec {
    pub fn recipe(&self) -> Result<DiffusionRecipe, CliError> {
        match self.scale.as_str() {
            "pow" => Ok(DiffusionRecipe {
                scale: criticality::models::Scale::Pow { p: self.p },
                grid: self.grid,
                mu: self.mu,
            }),
            other => Err(CliError::Config(format!(
                "unknown diffusion scale {other:?}; expected \"pow\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Band around `λ = 1` for verdicts and the harmonicity residual.
    pub classify: f64,
    /// Relative capacity limit below which an exhaustion is recurrent.
    pub recurrence: f64,
    /// Window around 1 for the extrapolated `λ(ν)`.
    pub limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            classify: DEFAULT_TOL,
            recurrence: DEFAULT_RECURRENCE_TOL,
            limit: DEFAULT_LIMIT_TOL,
        }
    }
}

fn default_core_radius() -> f64 {
    1.0
}

/// Truncation schedule. Stable recipes read `levels` as ball radii; the
/// diffusion certificate reads them as node counts of central windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionSpec {
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default = "default_core_radius")]
    pub core_radius: f64,
    /// Use the `|x|^{−δ}`-transformed forms for capacities.
    #[serde(default)]
    pub transformed: bool,
}

impl Default for ExhaustionSpec {
    fn default() -> Self {
        ExhaustionSpec {
            levels: Vec::new(),
            core_radius: default_core_radius(),
            transformed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Walk {
    /// Exact simulation of the truncated chain.
    #[default]
    Chain,
    /// Euler scheme for the stable process in the ball of radius `radius`.
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    #[default]
    One,
    /// `1/(1 + |x|)`.
    Decay,
    /// `|x|^{−δ}`; the run reports `p_t h / h`.
    H,
}

fn default_dt_fraction() -> f64 {
    DEFAULT_DT_FRACTION
}

fn default_cap() -> f64 {
    1e3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSpec {
    #[serde(default)]
    pub walk: Walk,
    pub t: f64,
    pub n_paths: usize,
    /// Start points; chain walks use the nearest node.
    pub probes: Vec<Vec<f64>>,
    #[serde(default)]
    pub f: TestFunction,
    /// Truncation level `M` of the continuum potential.
    #[serde(default = "default_cap")]
    pub cap: f64,
    /// Killing radius of the continuum walk; defaults to the recipe's `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_dt_fraction")]
    pub dt_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Values of `δ`; when empty, `points` evenly spaced values in `[0, d − α]`.
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub points: usize,
    /// Also compute `λ(μ^δ)` on the recipe's truncation.
    #[serde(default = "default_true")]
    pub lambda: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub recipe: Recipe,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub exhaustion: ExhaustionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Directory for the JSON report and CSV table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str, format: Format) -> Result<RunConfig, CliError> {
        match format {
            Format::Toml => toml::from_str(text).map_err(|e| CliError::Config(e.to_string())),
            Format::Json => serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string())),
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::parse(&text, Format::from_path(path))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Toml => toml::to_string(self).expect("config renders as TOML"),
            Format::Json => serde_json::to_string_pretty(self).expect("config renders as JSON"),
        }
    }

    /// Checks the fields `task` needs.
    pub fn validate(&self, task: Task) -> Result<(), CliError> {
        let t = &self.tolerances;
        if !(t.classify > 0.0 && t.recurrence > 0.0 && t.limit > 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        // the capacity verdict extrapolates over the last three levels
        let min_levels = match task {
            Task::Capacity => 3,
            Task::Khtest | Task::CriticalCert => 2,
            _ => 0,
        };
        if self.exhaustion.levels.len() < min_levels {
            return Err(CliError::Config(format!(
                "task {} needs at least {min_levels} exhaustion levels: set exhaustion.levels or pass --levels",
                task.name()
            )));
        }
        if matches!(task, Task::Capacity | Task::Khtest)
            && !matches!(self.recipe, Recipe::Stable(_))
        {
            return Err(CliError::Config(format!(
                "task {} builds nested truncations and needs kind = \"stable\"",
                task.name()
            )));
        }
        if task == Task::Simulate {
            if self.seed.is_none() {
                return Err(CliError::Config(
                    "simulate needs a seed: set seed or pass --seed".into(),
                ));
            }
            let s = self
                .simulate
                .as_ref()
                .ok_or_else(|| CliError::Config("simulate needs a [simulate] section".into()))?;
            if !(s.t > 0.0) || s.n_paths < 2 || s.probes.is_empty() {
                return Err(CliError::Config(
                    "simulate needs t > 0, n_paths >= 2 and at least one probe".into(),
                ));
            }
        }
        if task == Task::Sweep && !matches!(self.recipe, Recipe::Stable(_)) {
            return Err(CliError::Config(
                "sweep runs over δ and needs kind = \"stable\"".into(),
            ));
        }
        Ok(())
    }
}
