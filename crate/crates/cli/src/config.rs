use std::fs;
use std::path::{Path, PathBuf};

use langford_mrf::algebra::{PolyVectorField, Polynomial};
use langford_mrf::langford::{ModelError, Params, ParamsDescription, PerturbedSystem, SystemDescription};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::CliError;

pub const SEED_ENV: &str = "LANGFORD_MRF_SEED";

/// Largest ansatz degree `find` accepts.
pub const MAX_DEGREE: u32 = 6;

/// Contents of `--config`. Every section is optional and falls back to
/// defaults; unknown keys are rejected at every level.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    /// Inline system description, or a path to one (relative to the
    /// config file).
    pub system: Option<Box<RawValue>>,
    /// Second system for `compare`.
    pub system_b: Option<Box<RawValue>>,
    /// Parameters for `find`; taken from `system` when absent.
    pub params: Option<ParamsDescription>,
    #[serde(default)]
    pub integrator: langford_mrf::ode::IntegratorConfig,
    #[serde(default)]
    pub find: FindSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub lyapunov: LyapunovSection,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub periodic: PeriodicSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FindSection {
    pub degree: u32,
}

impl Default for FindSection {
    fn default() -> Self {
        Self { degree: 2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub t0: f64,
    pub t1: f64,
    pub x0: [f64; 3],
    pub samples: usize,
    pub svg: bool,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { t0: 0.0, t1: 100.0, x0: [0.01, 0.02, 3.0], samples: 2001, svg: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovSection {
    pub x0: [f64; 3],
    pub transient: f64,
    pub total: f64,
    pub renorm: f64,
}

impl Default for LyapunovSection {
    fn default() -> Self {
        Self { x0: [0.01, 0.02, 3.0], transient: 50.0, total: 2000.0, renorm: 0.05 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    /// Half-width `T` of the interval `[-T, T]`.
    #[serde(rename = "T")]
    pub half_width: f64,
    pub points: usize,
    /// Points are drawn uniformly from `[-box, box]^3`.
    #[serde(rename = "box")]
    pub box_half: f64,
    pub threshold: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self { half_width: 1.0, points: 10, box_half: 0.5, threshold: 1e-6 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicSection {
    /// One of `T4i .. T6ii`; chosen from the family and `b` when absent.
    pub theorem: Option<String>,
    pub omega: Option<f64>,
    pub floquet: bool,
    pub samples: Option<usize>,
}

/// An explicit autonomous field, e.g. `{"field": ["0", "0", "0"]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDescription {
    pub field: [String; 3],
}

/// A system read from the config: one of the parameterized families, or a
/// bare polynomial field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SystemInput {
    Family(SystemDescription),
    Field(FieldDescription),
}

impl SystemInput {
    pub fn build(&self) -> Result<PerturbedSystem, CliError> {
        match self {
            SystemInput::Family(d) => d.build().map_err(model_error),
            SystemInput::Field(f) => {
                let mut comps = Vec::with_capacity(3);
                for (name, text) in ["x", "y", "z"].iter().zip(&f.field) {
                    let p: Polynomial = text
                        .parse()
                        .map_err(|e| CliError::Validation(format!("field component {name}: {e}")))?;
                    comps.push(p);
                }
                let [px, py, pz]: [Polynomial; 3] = comps.try_into().expect("three components");
                Ok(PerturbedSystem::autonomous(PolyVectorField::new(px, py, pz)))
            }
        }
    }

    pub fn params(&self) -> Result<Option<Params>, CliError> {
        match self {
            SystemInput::Family(d) => d.params.parse().map(Some).map_err(model_error),
            SystemInput::Field(_) => Ok(None),
        }
    }
}

pub fn model_error(e: ModelError) -> CliError {
    CliError::Validation(e.to_string())
}

/// Deserializes `text`, reporting the failing field path and position.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = if path == "." { String::new() } else { format!(" at `{path}`") };
        CliError::Validation(format!("{origin}{at}: {inner}"))
    })
}

/// A loaded config together with the directory relative paths resolve
/// against.
#[derive(Debug, Default)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self { config: RunConfig::default(), base_dir: PathBuf::from(".") });
        };
        let text = read(path)?;
        let config = parse_json(&text, &path.display().to_string())?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn system(&self) -> Result<SystemInput, CliError> {
        self.resolve_system(self.config.system.as_deref(), "system")
    }

    pub fn system_b(&self) -> Result<SystemInput, CliError> {
        self.resolve_system(self.config.system_b.as_deref(), "system_b")
    }

    fn resolve_system(&self, raw: Option<&RawValue>, key: &str) -> Result<SystemInput, CliError> {
        let raw = raw.ok_or_else(|| CliError::Validation(format!("config has no `{key}`")))?;
        if let Ok(rel) = serde_json::from_str::<String>(raw.get()) {
            let path = self.base_dir.join(rel);
            let text = read(&path)?;
            return parse_system(&text, &path.display().to_string());
        }
        parse_system(raw.get(), key)
    }
}

pub fn parse_system(text: &str, origin: &str) -> Result<SystemInput, CliError> {
    let probe: serde_json::Value = parse_json(text, origin)?;
    if probe.get("field").is_some() {
        parse_json(text, origin).map(SystemInput::Field)
    } else {
        parse_json(text, origin).map(SystemInput::Family)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// Seed precedence: command-line flag, then the environment, then the
/// config file, then zero.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(config.unwrap_or(0)),
        Err(e) => Err(CliError::Validation(format!("{SEED_ENV}: {e}"))),
    }
}

pub fn require_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {v}")))
    }
}

pub fn require_finite(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be finite, got {v:?}")))
    }
}
