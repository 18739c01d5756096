//! Optional TOML configuration. Keys mirror the long flag names with
//! underscores; flags given on the command line win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

/// A number or a string. Tolerances written as TOML floats are read back
/// through their shortest decimal form, so `0.38` means exactly 38/100.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rho: Option<f64>,
    pub tau_g: Option<Scalar>,
    pub tau_r: Option<Scalar>,
    pub w: Option<usize>,
    pub n: Option<usize>,
    pub dynamic: Option<String>,
    pub seed: Option<u64>,
    pub max_steps: Option<u64>,
    pub reps: Option<usize>,
    pub grid: Option<usize>,
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
    pub events: Option<bool>,
    pub threads: Option<usize>,
}

pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow::anyhow!("parsing {}: {e}", path.display()))
}
