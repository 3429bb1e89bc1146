//! Job configuration: a single JSON file plus flag overrides; flags win.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use zdl_core::PrecisionConfig;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JobConfig {
    /// Window start T.
    pub t: Option<f64>,
    /// Window exponent a (H = T^a).
    pub a: Option<f64>,
    /// Mollifier exponent theta (X = T^theta).
    pub theta: Option<f64>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    /// Derivative orders for eval fan-out.
    pub k_orders: Option<Vec<usize>>,
    /// Evaluation points for eval.
    pub points: Option<Vec<f64>>,
    /// Use the standard mollifier coefficients.
    pub mollifier: Option<bool>,
    /// CSV file with explicit coefficients (header n,re,im).
    pub coefficients: Option<PathBuf>,
    /// Accept coefficients beyond the n^eps size gate.
    pub coeff_gate_override: Option<bool>,
    pub precision: Option<PrecisionConfig>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub suite: Option<String>,
    /// Sweep grid (full cartesian product).
    pub grid: Option<GridSpec>,
    pub checkpoint: Option<PathBuf>,
    /// Rectangle [sigma_min, sigma_max, t_min, t_max] for zero searches.
    #[serde(rename = "box")]
    pub rect: Option<[f64; 4]>,
    pub function: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub theta: Vec<f64>,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Later values (flags) override earlier ones (file).
    pub fn merged_with(mut self, over: JobConfig) -> JobConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            t, a, theta, k1, k2, k_orders, points, mollifier, coefficients, coeff_gate_override,
            precision, out, workers, suite, grid, checkpoint, rect, function, t_min, t_max
        );
        self
    }

    pub fn precision(&self) -> PrecisionConfig {
        self.precision.unwrap_or_default()
    }
}
