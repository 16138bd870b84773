use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qcap::depolarizing::lambda_range;

pub const OUT_DIR_ENV: &str = "QCAP_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Everything a run depends on. Echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Random restarts for every numerical optimization.
    pub restarts: usize,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    /// Verify only: subset of registered checks. Empty means all.
    pub checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub bits: bool,
    pub strict: bool,
    pub unchecked_lambda: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3],
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            p_grid: vec![1.5, 2.0, 3.0],
            trials: 100,
            seed: 0,
            restarts: 200,
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            out: None,
            format: Format::Json,
            bits: false,
            strict: false,
            unchecked_lambda: false,
        }
    }
}

/// Largest dimension any command accepts.
pub const MAX_DIM: usize = 12;

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            _ => toml::from_str(&text)?,
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.dims.is_empty() || self.lambdas.is_empty() || self.p_grid.is_empty() {
            bail!("dims, lambdas and p-grid must all be non-empty");
        }
        if let Some(d) = self.dims.iter().find(|d| !(2..=MAX_DIM).contains(*d)) {
            bail!("dimension {d} outside 2..={MAX_DIM}");
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
            bail!("p = {p} must be a finite value >= 1");
        }
        if let Some(l) = self.lambdas.iter().find(|l| !l.is_finite()) {
            bail!("lambda = {l} is not finite");
        }
        if self.trials == 0 || self.restarts == 0 {
            bail!("trials and restarts must be positive");
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            bail!("tolerance for {k} must be a non-negative number, got {v}");
        }
        if !self.unchecked_lambda {
            for &d in &self.dims {
                let (lo, hi) = lambda_range(d);
                if let Some(l) = self.lambdas.iter().find(|l| **l < lo || **l > hi) {
                    bail!(
                        "lambda = {l} is outside the completely positive range [{lo}, {hi}] for d = {d}; \
                         pass --unchecked-lambda to probe it anyway"
                    );
                }
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }

    /// Where the report goes: `--out`, else `$QCAP_OUT_DIR/<command>.<ext>`,
    /// else stdout.
    pub fn output_path(&self, command: &str) -> Option<PathBuf> {
        if let Some(p) = &self.out {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.{}", self.format.extension())))
    }
}
