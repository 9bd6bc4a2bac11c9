//! Experiment configuration: strict JSON (unknown fields are errors, so
//! typos in scientific configs fail loudly), one schema per subcommand,
//! each carrying a `kind` tag that must match the subcommand.

use qhl_core::diagnostics::{Functional, MicroSide, VolProxy};
use qhl_core::error::{Error as CoreError, Result as CoreResult};
use qhl_core::kernels::{KernelSpec, ScaledKernel};
use qhl_core::qhawkes::{QHawkesParams, DEFAULT_MAX_EVENTS};
use qhl_core::volterra::LimitModelSpec;
use serde::{Deserialize, Serialize};

fn default_one() -> f64 {
    1.0
}

fn default_max_events() -> usize {
    DEFAULT_MAX_EVENTS
}

fn default_n_grid() -> usize {
    512
}

fn default_n_steps() -> usize {
    512
}

fn default_rv_subwindow() -> usize {
    16
}

fn default_n_bootstrap() -> usize {
    1000
}

fn default_ci_level() -> f64 {
    0.99
}

fn default_q_list() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateHawkesConfig {
    pub kind: String,
    pub mu: f64,
    pub phi: KernelSpec,
    pub k: KernelSpec,
    pub horizon: f64,
    pub n_reps: usize,
    #[serde(default = "default_one")]
    pub phi_amplitude: f64,
    #[serde(default = "default_one")]
    pub phi_time_scale: f64,
    #[serde(default = "default_one")]
    pub k_amplitude: f64,
    #[serde(default = "default_one")]
    pub k_time_scale: f64,
    #[serde(default = "default_max_events")]
    pub max_events: usize,
}

impl SimulateHawkesConfig {
    pub fn params(&self) -> CoreResult<QHawkesParams> {
        let phi = ScaledKernel {
            mother: self.phi.clone(),
            amplitude: self.phi_amplitude,
            time_scale: self.phi_time_scale,
        };
        let k = ScaledKernel {
            mother: self.k.clone(),
            amplitude: self.k_amplitude,
            time_scale: self.k_time_scale,
        };
        let mut p = QHawkesParams::new(self.mu, phi, k, self.horizon)?;
        p.max_events = self.max_events;
        if self.n_reps == 0 {
            return Err(CoreError::Config("n_reps must be positive".into()));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateLimitConfig {
    pub kind: String,
    pub model: LimitModelSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    pub n_reps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub kind: String,
    pub micro: MicroSide,
    pub macro_spec: LimitModelSpec,
    pub t_ladder: Vec<f64>,
    pub n_reps: usize,
    #[serde(default = "default_n_grid")]
    pub n_grid: usize,
    #[serde(default = "default_n_steps")]
    pub n_steps_macro: usize,
    pub functional: Functional,
    #[serde(default)]
    pub save_paths: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZumbachConfigFile {
    pub kind: String,
    pub model: LimitModelSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    pub n_paths: usize,
    pub tau: f64,
    pub vol_proxy: VolProxy,
    #[serde(default)]
    pub burn_in_fraction: f64,
    #[serde(default = "default_rv_subwindow")]
    pub rv_subwindow: usize,
    #[serde(default = "default_n_bootstrap")]
    pub n_bootstrap: usize,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderConfig {
    pub kind: String,
    pub model: LimitModelSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    pub n_paths: usize,
    #[serde(default = "default_q_list")]
    pub q_list: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlTableConfig {
    pub kind: String,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl MlTableConfig {
    pub fn validate(&self) -> CoreResult<()> {
        if self.alphas.is_empty() || self.lambdas.is_empty() || self.t_grid.is_empty() {
            return Err(CoreError::Config(
                "ml-table needs non-empty alphas, lambdas and t_grid".into(),
            ));
        }
        Ok(())
    }
}
