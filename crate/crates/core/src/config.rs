//! Every tunable default in one place. Reports embed the resolved block.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorConfig {
    /// Grid size for the determinant winding number.
    pub winding_grid: usize,
    /// Allowed distance of the raw winding from an integer.
    pub winding_guard: f64,
    /// Below this `|det f|` the symbol counts as singular on the circle.
    pub det_floor: f64,
    /// Block-Toeplitz truncation sizes tried in order.
    pub truncations: Vec<usize>,
    /// Required ratio of last to first solution block norm.
    pub decay_tol: f64,
    /// Max residual of `f - f_- f_+` on the check grid.
    pub residual_tol: f64,
    /// Points of the residual check grid.
    pub residual_grid: usize,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            winding_grid: 1024,
            winding_guard: 0.05,
            det_floor: 1e-10,
            truncations: vec![128, 256, 512],
            decay_tol: 1e-10,
            residual_tol: 1e-9,
            residual_grid: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapConfig {
    pub frozen_samples: usize,
    pub section_sizes: Vec<usize>,
    pub singular_floor: f64,
    /// Relative agreement required between the two largest sections.
    pub stabilization_band: f64,
    /// Angle samples for 3D families.
    pub theta_samples: usize,
    /// Lanczos step cap per section.
    pub max_iterations: usize,
    /// Lanczos stops once the Ritz estimate moves less than this, relatively.
    pub eig_rel_tol: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            frozen_samples: 64,
            section_sizes: vec![64, 128, 256],
            singular_floor: 1e-3,
            stabilization_band: 0.2,
            theta_samples: 64,
            max_iterations: 300,
            eig_rel_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BulkConfig {
    /// Eigenvalues closer to zero than this are a hard error at fixed points.
    pub energy_floor: f64,
    pub commutator_tol: f64,
    /// Allowed distance of parity traces from integers.
    pub parity_guard: f64,
    /// Torus grid used for the bulk gap.
    pub torus_grid: usize,
}

impl Default for BulkConfig {
    fn default() -> Self {
        BulkConfig { energy_floor: 1e-9, commutator_tol: 1e-9, parity_guard: 1e-6, torus_grid: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CornerConfig {
    pub side: usize,
    /// Stability partner is `side + side_step`.
    pub side_step: usize,
    /// Zero-mode threshold relative to the bulk gap.
    pub zero_tol_rel: f64,
    /// Localization radius as a fraction of the side.
    pub loc_radius_frac: f64,
    /// Minimum weight inside the localization radius.
    pub loc_weight: f64,
}

impl Default for CornerConfig {
    fn default() -> Self {
        CornerConfig { side: 24, side_step: 8, zero_tol_rel: 1e-4, loc_radius_frac: 1.0 / 3.0, loc_weight: 0.6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub side: usize,
    pub theta_samples: usize,
    pub overlap: f64,
    /// Tracking window as a fraction of the smallest surface gap.
    pub window_frac: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { side: 16, theta_samples: 128, overlap: 0.7, window_frac: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindingConfig {
    /// Cells along each coordinate of a solid-torus patch.
    pub grid: usize,
    pub guard: f64,
    /// Run the winding oracle as part of `verify`.
    pub enabled: bool,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig { grid: 48, guard: 0.1, enabled: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub factor: FactorConfig,
    pub gap: GapConfig,
    pub bulk: BulkConfig,
    pub corner: CornerConfig,
    pub flow: FlowConfig,
    pub winding: WindingConfig,
}

impl Config {
    /// Defaults, overridden by the JSON file named in `QPI_CONFIG` if set.
    pub fn resolve() -> Result<Config> {
        match std::env::var_os("QPI_CONFIG") {
            Some(p) => Config::from_file(Path::new(&p)),
            None => Ok(Config::default()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("config {}: {e}", path.display())))
    }
}
