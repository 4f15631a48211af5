//! Run configuration: defaults, then an optional JSON file, then explicit
//! command-line flags.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use mccm::MccmVariant;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Classifier selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Fm,
    Cs,
    Le,
    GeoNn,
    EuclidHull,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Fm, Method::Cs, Method::Le, Method::GeoNn, Method::EuclidHull];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fm => "fm",
            Method::Cs => "cs",
            Method::Le => "le",
            Method::GeoNn => "geo-nn",
            Method::EuclidHull => "euclid-hull",
        }
    }

    pub fn variant(self) -> Option<MccmVariant> {
        match self {
            Method::Fm => Some(MccmVariant::Fm),
            Method::Cs => Some(MccmVariant::Cs),
            Method::Le => Some(MccmVariant::Le),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpgConfig {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub line_search_memory: usize,
    pub step_min: f64,
    pub step_max: f64,
    pub armijo_c: f64,
}

impl Default for SpgConfig {
    fn default() -> Self {
        let p = mccm::SpgParams::default();
        Self {
            max_iter: p.max_iter,
            grad_tol: p.grad_tol,
            line_search_memory: p.line_search_memory,
            step_min: p.step_min,
            step_max: p.step_max,
            armijo_c: p.armijo_c,
        }
    }
}

impl SpgConfig {
    pub fn params(&self) -> mccm::SpgParams {
        mccm::SpgParams {
            max_iter: self.max_iter,
            grad_tol: self.grad_tol,
            line_search_memory: self.line_search_memory,
            step_min: self.step_min,
            step_max: self.step_max,
            armijo_c: self.armijo_c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeanConfig {
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub step: f64,
}

impl Default for MeanConfig {
    fn default() -> Self {
        let p = mccm::MeanParams::default();
        Self {
            tol: p.tol,
            max_iter: p.max_iter,
            step: p.step,
        }
    }
}

impl MeanConfig {
    pub fn params(&self) -> mccm::MeanParams {
        mccm::MeanParams {
            tol: self.tol,
            max_iter: self.max_iter,
            step: self.step,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub variant: Method,
    pub spg: SpgConfig,
    pub mean: MeanConfig,
    /// Descriptor ridge; `None` means `1e-6·trace/k`.
    pub ridge: Option<f64>,
    /// Overrides the command's own default seed when set.
    pub seed: Option<u64>,
    pub threads: usize,
    /// Include optimal weights in reports.
    pub weights: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: Method::Fm,
            spg: SpgConfig::default(),
            mean: MeanConfig::default(),
            ridge: None,
            seed: None,
            threads: 1,
            weights: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.spg.params().validate()?;
        self.mean.params().validate()?;
        if let Some(r) = self.ridge {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(CliError::Usage("ridge must be finite and >= 0".into()));
            }
        }
        if self.threads == 0 {
            return Err(CliError::Usage("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| CliError::ThreadPool(e.to_string()))
    }
}
