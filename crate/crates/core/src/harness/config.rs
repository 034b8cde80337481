use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::controller::{DEFAULT_DELTA, DEFAULT_V};
use crate::error::{Error, Result};
use crate::models::{FileDownloadModel, FilePenalty, RenewalModel, SyntheticModel};

pub const DEFAULT_FRAMES: u64 = 200_000;
pub const DEFAULT_REPLICATIONS: usize = 5;
/// Exponent used for the file model's exponential-type bound.
pub const FILE_MODEL_ETA: f64 = 0.3;
/// Slack of the always-idle policy in the file model (zero power against a
/// budget of one unit per slot).
pub const FILE_MODEL_XI: f64 = 1.0;

/// Which model a run uses.
///
/// Text forms: `file` (or `file_download`), `file_active` for the variant
/// charging the delay weight on every frame, and `synthetic:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSelection {
    FileDownload,
    FileDownloadActiveSlot,
    Synthetic(PathBuf),
}

impl ModelSelection {
    pub fn load(&self) -> Result<Box<dyn RenewalModel>> {
        Ok(match self {
            ModelSelection::FileDownload => {
                Box::new(FileDownloadModel::new(FilePenalty::ServiceWeighted))
            }
            ModelSelection::FileDownloadActiveSlot => {
                Box::new(FileDownloadModel::new(FilePenalty::ActiveSlot))
            }
            ModelSelection::Synthetic(path) => Box::new(SyntheticModel::from_path(path)?),
        })
    }

    /// `(η, B, ξ)` defaults where the model supports them.
    pub fn default_bound_inputs(&self) -> Result<Option<BoundInputsConfig>> {
        let penalty = match self {
            ModelSelection::FileDownload => FilePenalty::ServiceWeighted,
            ModelSelection::FileDownloadActiveSlot => FilePenalty::ActiveSlot,
            ModelSelection::Synthetic(_) => return Ok(None),
        };
        let b = FileDownloadModel::new(penalty).exponential_bound(FILE_MODEL_ETA)?;
        Ok(Some(BoundInputsConfig {
            eta: FILE_MODEL_ETA,
            b,
            xi: FILE_MODEL_XI,
        }))
    }
}

impl fmt::Display for ModelSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSelection::FileDownload => f.write_str("file"),
            ModelSelection::FileDownloadActiveSlot => f.write_str("file_active"),
            ModelSelection::Synthetic(p) => write!(f, "synthetic:{}", p.display()),
        }
    }
}

impl FromStr for ModelSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "file" | "file_download" => Ok(ModelSelection::FileDownload),
            "file_active" | "file_download_active" => Ok(ModelSelection::FileDownloadActiveSlot),
            _ => match s.strip_prefix("synthetic:") {
                Some(path) if !path.is_empty() => Ok(ModelSelection::Synthetic(path.into())),
                _ => Err(Error::Config(format!(
                    "unknown model '{s}' (expected file, file_active or synthetic:<path>)"
                ))),
            },
        }
    }
}

impl Serialize for ModelSelection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Truncation ceiling: a number, or `"auto"` for 1.5 times the largest
/// per-pair ratio of the model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThetaMax {
    #[default]
    Auto,
    Fixed(f64),
}

impl ThetaMax {
    pub fn resolve(&self, model: &dyn RenewalModel) -> Result<f64> {
        match *self {
            ThetaMax::Auto => crate::models::auto_theta_max(model),
            ThetaMax::Fixed(x) if x > 0.0 && x.is_finite() => Ok(x),
            ThetaMax::Fixed(x) => Err(Error::Config(format!(
                "theta_max must be positive, got {x}"
            ))),
        }
    }
}

impl FromStr for ThetaMax {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(ThetaMax::Auto);
        }
        s.parse::<f64>()
            .map(ThetaMax::Fixed)
            .map_err(|_| Error::Config(format!("theta_max must be a number or 'auto', got '{s}'")))
    }
}

impl Serialize for ThetaMax {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ThetaMax::Auto => s.serialize_str("auto"),
            ThetaMax::Fixed(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ThetaMax {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ThetaMax::Fixed(x)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputsConfig {
    pub eta: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub xi: f64,
}

fn default_frames() -> u64 {
    DEFAULT_FRAMES
}

fn default_v() -> f64 {
    DEFAULT_V
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_parallelism() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSelection,
    #[serde(default = "default_frames")]
    pub frames: u64,
    /// When set, run until the total slot count reaches this value instead
    /// of a fixed number of frames.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_budget: Option<f64>,
    #[serde(rename = "V", default = "default_v")]
    pub v: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub theta_max: ThetaMax,
    #[serde(default)]
    pub seed: u64,
    /// Output path prefix; nothing is written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Write per-frame records.
    #[serde(default)]
    pub records: bool,
    /// Write records plus the diagnostics table and hitting times.
    #[serde(default)]
    pub diagnostics: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_inputs: Option<BoundInputsConfig>,
}

impl RunConfig {
    pub fn new(model: ModelSelection) -> Self {
        Self {
            model,
            frames: DEFAULT_FRAMES,
            slot_budget: None,
            v: DEFAULT_V,
            delta: DEFAULT_DELTA,
            theta_max: ThetaMax::Auto,
            seed: 0,
            output: None,
            records: false,
            diagnostics: false,
            bound_inputs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 && self.slot_budget.is_none() {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if let Some(b) = self.slot_budget {
            if !(b >= 1.0 && b.is_finite()) {
                return Err(Error::Config(format!(
                    "slot_budget must be at least 1, got {b}"
                )));
            }
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::Config(format!("V must be positive, got {}", self.v)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.5) {
            return Err(Error::Config(format!(
                "delta must lie in (0, 1.5], got {}",
                self.delta
            )));
        }
        if let ThetaMax::Fixed(x) = self.theta_max {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Config(format!(
                    "theta_max must be positive, got {x}"
                )));
            }
        }
        if let Some(b) = &self.bound_inputs {
            if !(b.eta > 0.0 && b.b > 0.0 && b.xi > 0.0) {
                return Err(Error::Config(
                    "bound inputs eta, B, xi must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    #[serde(rename = "V_list")]
    pub v_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SweepConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.v_list.is_empty() || self.delta_list.is_empty() {
            return Err(Error::Config(
                "V_list and delta_list must be nonempty".into(),
            ));
        }
        if self.replications == 0 || self.parallelism == 0 {
            return Err(Error::Config(
                "replications and parallelism must be at least 1".into(),
            ));
        }
        for &v in &self.v_list {
            let mut point = self.base.clone();
            point.v = v;
            for &d in &self.delta_list {
                point.delta = d;
                point.validate()?;
            }
        }
        self.base.validate()
    }
}
