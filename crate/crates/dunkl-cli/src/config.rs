//! Versioned JSON configuration for the harness.

use dunkl_core::error::{Error, Result};
use dunkl_core::hardy::{CellConfig, SweepConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaPolicy {
    pub grid_size: usize,
    pub outside_probes: bool,
}

impl Default for SigmaPolicy {
    fn default() -> Self {
        SigmaPolicy {
            grid_size: 5,
            outside_probes: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Per-axis order used by the validate cross-checks.
    pub validate_order: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { validate_order: 60 }
    }
}

fn default_radii() -> Vec<i32> {
    (-6..=6).collect()
}

fn default_seeds() -> Vec<u32> {
    vec![0, 1, 2]
}

/// Top-level harness configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub schema_version: u32,
    pub cells: Vec<CellConfig>,
    #[serde(default)]
    pub sigma_policy: SigmaPolicy,
    #[serde(default = "default_radii")]
    pub radii_exponents: Vec<i32>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u32>,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
    /// Base RNG seed for the randomized validate probes.
    #[serde(default)]
    pub rng_seed: u64,
}

impl HarnessConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: HarnessConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
        config.validate_shape()?;
        Ok(config)
    }

    pub fn validate_shape(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.cells.is_empty() {
            return Err(Error::Config("config lists no cells".into()));
        }
        for cell in &self.cells {
            if !(cell.p > 0.0 && cell.p <= 1.0) {
                return Err(Error::Config(format!(
                    "cell '{}': p must lie in (0, 1], got {}",
                    cell.label, cell.p
                )));
            }
            if cell.multiplicities.iter().any(|&k| k < 0.0) {
                return Err(Error::Config(format!(
                    "cell '{}': multiplicities must be nonnegative",
                    cell.label
                )));
            }
            // preset / dimension / multiplicity-count errors surface here
            cell.measure_context()?;
        }
        Ok(())
    }

    /// Restrict to cells whose label contains `filter`.
    pub fn filtered(&self, filter: Option<&str>) -> Result<Vec<CellConfig>> {
        let cells: Vec<CellConfig> = match filter {
            None => self.cells.clone(),
            Some(f) => self
                .cells
                .iter()
                .filter(|c| c.label.contains(f))
                .cloned()
                .collect(),
        };
        if cells.is_empty() {
            return Err(Error::Config(format!(
                "cell filter {filter:?} matches nothing"
            )));
        }
        Ok(cells)
    }

    pub fn sweep_config(&self, filter: Option<&str>) -> Result<SweepConfig> {
        Ok(SweepConfig {
            cells: self.filtered(filter)?,
            sigma_grid: self.sigma_policy.grid_size,
            outside_probes: self.sigma_policy.outside_probes,
            radii_exponents: self.radii_exponents.clone(),
            seeds: self.seeds.clone(),
        })
    }
}
