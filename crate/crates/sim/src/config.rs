//! TOML experiment configuration.
//!
//! ```toml
//! pattern = "3gpp"            # iso | 3gpp | tabulated
//! density_per_km2 = 100.0
//! drops = 10000
//! seed = 1
//! bits = "inf"                # or an integer bit count
//!
//! [radio]
//! tx_power_dbm = 30.0
//! ```
//!
//! Every key is optional and unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use mmwave_core::antenna::{ArrayConfig, ParametricPatch, PhaseResolution, TabulatedPattern};
use mmwave_core::channel::{GainComposition, PathLossParams};
use mmwave_core::network::RadioConstants;
use mmwave_core::sim::{parse_resolution, InterfererLoad, PatternKind, Scenario};
use serde::{Deserialize, Serialize};

use crate::pattern_csv;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Pattern(#[from] pattern_csv::PatternCsvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternName {
    #[serde(rename = "iso")]
    Iso,
    #[serde(rename = "3gpp")]
    ThreeGpp,
    #[serde(rename = "tabulated")]
    Tabulated,
}

impl std::str::FromStr for PatternName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iso" => Ok(PatternName::Iso),
            "3gpp" => Ok(PatternName::ThreeGpp),
            "tabulated" | "tab" => Ok(PatternName::Tabulated),
            other => Err(format!("unknown pattern '{other}' (expected iso, 3gpp or tabulated)")),
        }
    }
}

impl PatternName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatternName::Iso => "iso",
            PatternName::ThreeGpp => "3gpp",
            PatternName::Tabulated => "tabulated",
        }
    }
}

/// A bit count or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BitsRepr", into = "BitsRepr")]
pub struct Bits(pub PhaseResolution);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BitsRepr {
    Count(u32),
    Text(String),
}

impl TryFrom<BitsRepr> for Bits {
    type Error = String;

    fn try_from(r: BitsRepr) -> Result<Self, String> {
        let text = match r {
            BitsRepr::Count(b) => b.to_string(),
            BitsRepr::Text(t) => t,
        };
        parse_resolution(&text).map(Bits).map_err(|e| e.to_string())
    }
}

impl From<Bits> for BitsRepr {
    fn from(b: Bits) -> Self {
        match b.0 {
            PhaseResolution::Bits(n) => BitsRepr::Count(n),
            PhaseResolution::Unbounded => BitsRepr::Text("inf".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub pattern: PatternName,
    /// CSV table for `pattern = "tabulated"`; the built-in synthetic patch
    /// is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern_file: Option<PathBuf>,
    pub density_per_km2: f64,
    pub region_side_m: f64,
    pub drops: u64,
    pub seed: u64,
    pub bits: Bits,
    pub gain_composition: GainComposition,
    pub interferer_load: InterfererLoad,
    pub ue_panel_window_deg: f64,
    pub patch: ParametricPatch,
    /// Defaults depend on the pattern (tabulated uses its own spacing).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_array: Option<ArrayConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_array: Option<ArrayConfig>,
    pub radio: RadioConstants,
    pub path_loss: PathLossParams,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let s = Scenario::default();
        ConfigFile {
            pattern: PatternName::ThreeGpp,
            pattern_file: None,
            density_per_km2: s.density_per_km2,
            region_side_m: s.region_side_m,
            drops: s.drops,
            seed: s.seed,
            bits: Bits(s.quantization),
            gain_composition: s.gain_composition,
            interferer_load: s.interferer_load,
            ue_panel_window_deg: s.ue_panel_window_deg,
            patch: ParametricPatch::default(),
            bs_array: None,
            ue_array: None,
            radio: s.constants,
            path_loss: s.path_loss,
        }
    }
}

impl ConfigFile {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text, path)?;
        // pattern files are relative to the config that names them
        if let (Some(file), Some(dir)) = (&cfg.pattern_file, path.parent()) {
            if file.is_relative() {
                cfg.pattern_file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn pattern_kind(&self) -> Result<PatternKind, ConfigError> {
        Ok(match self.pattern {
            PatternName::Iso => PatternKind::Iso,
            PatternName::ThreeGpp => PatternKind::ThreeGpp(self.patch),
            PatternName::Tabulated => {
                let table = match &self.pattern_file {
                    Some(p) => pattern_csv::read_file(p)?,
                    None => TabulatedPattern::synthetic_patch(),
                };
                PatternKind::Tabulated(Arc::new(table))
            }
        })
    }

    /// Resolves and validates the scenario this file describes.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        if self.pattern_file.is_some() && self.pattern != PatternName::Tabulated {
            return Err(ConfigError::Invalid("pattern_file requires pattern = \"tabulated\"".into()));
        }
        let mut s = Scenario::for_pattern(self.pattern_kind()?);
        if let Some(a) = self.bs_array {
            s.bs_array = a;
        }
        if let Some(a) = self.ue_array {
            s.ue_array = a;
        }
        s.constants = self.radio;
        s.path_loss = self.path_loss;
        s.density_per_km2 = self.density_per_km2;
        s.region_side_m = self.region_side_m;
        s.drops = self.drops;
        s.seed = self.seed;
        s.quantization = self.bits.0;
        s.gain_composition = self.gain_composition;
        s.interferer_load = self.interferer_load;
        s.ue_panel_window_deg = self.ue_panel_window_deg;
        s.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(s)
    }

    /// The file with array geometry filled in, so an echo of it needs no
    /// pattern-dependent defaults to reproduce a run.
    pub fn resolved(&self, s: &Scenario) -> ConfigFile {
        ConfigFile {
            bs_array: Some(s.bs_array),
            ue_array: Some(s.ue_array),
            ..self.clone()
        }
    }
}
