//! Configuration resolution: command-line flags override config-file
//! fields, which override the built-in defaults.

use crate::error::{CliError, CliResult};
use serde::Deserialize;
use std::path::Path;
use surro_core::{ChangepointConfig, IaaftConfig, PeakConfig};

/// Optional JSON config file mirroring the flag names, e.g.
/// `{"changepoint": {"lambda": 0.95}, "iaaft": {"max_iter": 500}}`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub changepoint: ChangepointOverrides,
    #[serde(default)]
    pub peaks: PeakOverrides,
    #[serde(default)]
    pub iaaft: IaaftOverrides,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangepointOverrides {
    pub lambda: Option<f64>,
    pub kappa: Option<usize>,
    pub sigma_mult: Option<f64>,
    pub density: Option<f64>,
    pub min_separation: Option<usize>,
    pub warmup: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakOverrides {
    pub min_distance: Option<usize>,
    pub max_interval: Option<usize>,
    pub prominence: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IaaftOverrides {
    pub n_surrogates: Option<usize>,
    pub max_iter: Option<usize>,
    pub mse_threshold: Option<f64>,
    pub edge_fraction: Option<f64>,
    pub point_margin: Option<usize>,
}

pub fn load(path: Option<&Path>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let raw = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&raw)
                .map_err(|e| CliError::Data(format!("malformed config {}: {e}", p.display())))
        }
    }
}

impl ChangepointOverrides {
    /// Flags (self) over file values over defaults.
    pub fn resolve(&self, file: &ChangepointOverrides) -> ChangepointConfig {
        let d = ChangepointConfig::default();
        ChangepointConfig {
            lambda: self.lambda.or(file.lambda).unwrap_or(d.lambda),
            kappa: self.kappa.or(file.kappa).unwrap_or(d.kappa),
            sigma_mult: self.sigma_mult.or(file.sigma_mult).unwrap_or(d.sigma_mult),
            density: self.density.or(file.density).unwrap_or(d.density),
            min_separation: self
                .min_separation
                .or(file.min_separation)
                .unwrap_or(d.min_separation),
            warmup: self.warmup.or(file.warmup).unwrap_or(d.warmup),
        }
    }
}

impl PeakOverrides {
    pub fn resolve(&self, file: &PeakOverrides) -> PeakConfig {
        let d = PeakConfig::default();
        PeakConfig {
            min_distance: self.min_distance.or(file.min_distance).unwrap_or(d.min_distance),
            max_interval: self.max_interval.or(file.max_interval).unwrap_or(d.max_interval),
            prominence: self.prominence.or(file.prominence).or(d.prominence),
        }
    }
}

impl IaaftOverrides {
    pub fn resolve(&self, file: &IaaftOverrides, base: IaaftConfig, seed: u64) -> IaaftConfig {
        IaaftConfig {
            n_surrogates: self.n_surrogates.or(file.n_surrogates).unwrap_or(base.n_surrogates),
            max_iter: self.max_iter.or(file.max_iter).unwrap_or(base.max_iter),
            mse_threshold: self
                .mse_threshold
                .or(file.mse_threshold)
                .unwrap_or(base.mse_threshold),
            edge_fraction: self
                .edge_fraction
                .or(file.edge_fraction)
                .unwrap_or(base.edge_fraction),
            point_margin: self.point_margin.or(file.point_margin).unwrap_or(base.point_margin),
            rng_seed: seed,
        }
    }
}
