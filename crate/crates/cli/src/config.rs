//! TOML experiment configuration.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional cross-check against the invoked subcommand.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    /// "reference" (default) or a path to a circuit text file.
    pub circuit: Option<String>,
    /// Pauli string observable for custom circuits (e.g. "IZ"); the
    /// reference circuit defaults to Z on wire 1.
    pub observable: Option<String>,
    /// Evaluation point; defaults to the reference parameter point.
    pub theta: Option<Vec<f64>>,
    pub shots: Option<u64>,
    pub shot_grid: Option<Vec<u64>>,
    pub repetitions: Option<u64>,
    /// Derivative order for scaling sweeps: 1 (gradient) or 2 (Hessian).
    pub order: Option<usize>,
    pub estimators: Option<Vec<EstimatorConfig>>,
    /// "exact" (default) or "sampled" for the hessian/metric commands.
    pub eval: Option<String>,
    /// Diagonal formula for the metric command: "pi" (default) or "half".
    pub diag_form: Option<String>,
    /// Number of random verification points for reconstruct.
    pub checks: Option<u64>,
    pub optimizer: Option<OptimizerSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// "param-shift" | "scaled-param-shift" | "central" | "forward".
    pub kind: String,
    /// Step/shift grid; defaults depend on the kind.
    pub steps: Option<Vec<f64>>,
    /// Fixed weight for scaled-param-shift; omitted means the optimal
    /// per-element weight computed from exact quantities.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    /// Any of "gd", "newton", "diag-newton", "qng"; one trace per method.
    pub methods: Vec<String>,
    pub learning_rate: f64,
    /// "clamp" (default) | "shift" | "max-eig".
    pub regularizer: Option<String>,
    pub epsilon: Option<f64>,
    pub max_iterations: usize,
    /// Omitted means exact expectation values.
    pub shots: Option<u64>,
    pub trainable: Option<Vec<bool>>,
    pub theta0: Vec<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let config: ExperimentConfig = toml::from_str(text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((config, bytes))
    }

    pub fn check_experiment(&self, command: &str) -> Result<()> {
        if let Some(kind) = &self.experiment {
            if kind != command {
                return Err(CliError::Config(format!(
                    "config is for experiment '{kind}' but command is '{command}'"
                )));
            }
        }
        Ok(())
    }
}

/// Hash identifying (config bytes, effective seed); every CSV row carries
/// it so outputs are traceable to their inputs.
pub fn config_hash(config_bytes: &[u8], seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_bytes);
    hasher.update(seed.to_le_bytes());
    hex::encode(&hasher.finalize()[..8])
}

/// Log-spaced grid, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

pub fn default_step_grid(kind: &str) -> Vec<f64> {
    match kind {
        // shift rules keep away from the vanishing-denominator endpoints
        "param-shift" | "scaled-param-shift" => log_grid(0.05, FRAC_PI_2, 15),
        _ => log_grid(1e-3, FRAC_PI_2, 31),
    }
}

pub fn default_shot_grid() -> Vec<u64> {
    vec![100, 1_000, 10_000, 100_000, 1_000_000]
}
