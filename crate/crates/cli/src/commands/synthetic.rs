use std::time::Instant;

use mccm::synth::{error_trial, ErrorTable, ErrorTrialConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::millis;
use crate::config::RunConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSettings {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub condition_cap: f64,
    pub tangent_norm: f64,
}

/// Mean absolute error per multiplier, one vector per variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantErrors {
    pub fm: Vec<f64>,
    pub cs: Vec<f64>,
    pub le: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantFailures {
    pub fm: Vec<usize>,
    pub cs: Vec<usize>,
    pub le: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticReport {
    pub schema: u32,
    pub command: String,
    pub config: SyntheticSettings,
    pub multipliers: Vec<f64>,
    /// NaN (serialized as null) where every trial failed.
    pub mean_error: VariantErrors,
    pub failures: VariantFailures,
    pub elapsed_ms: f64,
}

/// Runs the approximation-error study, trials spread over the configured
/// thread pool. Each trial has its own RNG stream, so the table does not
/// depend on the thread count.
pub fn run_synthetic(study: &ErrorTrialConfig, cfg: &RunConfig) -> Result<(SyntheticReport, ErrorTable)> {
    cfg.validate()?;
    study.validate()?;
    let spg = cfg.spg.params();
    let mean = cfg.mean.params();
    let pool = cfg.pool()?;
    let start = Instant::now();
    let trials: Vec<_> = pool.install(|| {
        (0..study.trials)
            .into_par_iter()
            .map(|i| error_trial(study, i, &spg, &mean))
            .collect()
    });
    let table = ErrorTable::from_trials(study, &trials);
    let [fm, cs, le] = table.mean_error.clone();
    let [ffm, fcs, fle] = table.failures.clone();
    let report = SyntheticReport {
        schema: 1,
        command: "synthetic".into(),
        config: SyntheticSettings {
            dim: study.dim,
            trials: study.trials,
            seed: study.seed,
            condition_cap: study.condition_cap,
            tangent_norm: study.tangent_norm,
        },
        multipliers: study.multipliers.clone(),
        mean_error: VariantErrors { fm, cs, le },
        failures: VariantFailures {
            fm: ffm,
            cs: fcs,
            le: fle,
        },
        elapsed_ms: millis(start.elapsed()),
    };
    Ok((report, table))
}
