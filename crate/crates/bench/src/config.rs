use serde::{Deserialize, Serialize};
use sesim_core::evolution::DEFAULT_THETA_MAX;
use sesim_core::types::units;

use crate::BenchError;

/// Default measurement budget `t_meas`, us.
pub const DEFAULT_T_MEAS: f64 = 0.1;

/// Default core count of the perfectly parallel classical machine.
pub const DEFAULT_PARALLEL_CORES: f64 = 1.0e6;

/// Sweep description. Loaded from JSON; unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    /// Run times, us.
    pub t_qc_list: Vec<f64>,
    /// Entry bound of the random instances, rad/us.
    #[serde(default = "default_g_max")]
    pub g_max: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Time on a single-thread pool.
    #[serde(default = "default_true")]
    pub exclusive_mode: bool,
    #[serde(default = "default_theta")]
    pub theta_max: f64,
    #[serde(default = "default_t_meas")]
    pub t_meas: f64,
    #[serde(default = "default_cores")]
    pub parallel_cores: f64,
    /// Cells faster than this are repeated in a batch and divided, seconds.
    #[serde(default = "default_min_cell")]
    pub min_cell_seconds: f64,
    /// Replaces the wall clock with a linear model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_timings: Option<SyntheticTimings>,
}

/// `ode = ode_intercept + ode_slope t_qc + ode_curvature t_qc^2` and
/// `diag = diag_time`, all seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTimings {
    pub ode_intercept: f64,
    /// Seconds per us of `t_qc`.
    pub ode_slope: f64,
    #[serde(default)]
    pub ode_curvature: f64,
    pub diag_time: f64,
}

fn default_g_max() -> f64 {
    units::mhz(100.0)
}
fn default_true() -> bool {
    true
}
fn default_theta() -> f64 {
    DEFAULT_THETA_MAX
}
fn default_t_meas() -> f64 {
    DEFAULT_T_MEAS
}
fn default_cores() -> f64 {
    DEFAULT_PARALLEL_CORES
}
fn default_min_cell() -> f64 {
    1.0e-3
}

impl BenchConfig {
    pub fn new(n_list: Vec<usize>, t_qc_list: Vec<f64>) -> Self {
        BenchConfig {
            n_list,
            t_qc_list,
            g_max: default_g_max(),
            repetitions: 5,
            seed: 0,
            exclusive_mode: true,
            theta_max: DEFAULT_THETA_MAX,
            t_meas: DEFAULT_T_MEAS,
            parallel_cores: DEFAULT_PARALLEL_CORES,
            min_cell_seconds: default_min_cell(),
            synthetic_timings: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: BenchConfig =
            serde_json::from_str(text).map_err(|e| BenchError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: String| Err(BenchError::Schema(m));
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 2) {
            return fail("n_list must be non-empty with every n >= 2".into());
        }
        if self.t_qc_list.len() < 2 {
            return fail("t_qc_list needs at least two run times".into());
        }
        if self.t_qc_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return fail("every t_qc must be positive".into());
        }
        let lo = self.t_qc_list.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.t_qc_list.iter().cloned().fold(0.0, f64::max);
        if hi < 10.0 * lo * (1.0 - 1e-12) {
            return fail(format!("t_qc_list must span a decade, got [{lo}, {hi}]"));
        }
        if self.repetitions < 3 {
            return fail(format!(
                "repetitions must be >= 3, got {}",
                self.repetitions
            ));
        }
        if !(self.g_max.is_finite() && self.g_max > 0.0) {
            return fail("g_max must be positive".into());
        }
        if !(self.theta_max > 0.0 && self.theta_max <= 0.5) {
            return fail("theta_max must lie in (0, 0.5]".into());
        }
        if !(self.t_meas.is_finite() && self.t_meas >= 0.0) {
            return fail("t_meas must be non-negative".into());
        }
        if !(self.parallel_cores.is_finite() && self.parallel_cores >= 1.0) {
            return fail("parallel_cores must be >= 1".into());
        }
        if !(self.min_cell_seconds.is_finite() && self.min_cell_seconds >= 0.0) {
            return fail("min_cell_seconds must be non-negative".into());
        }
        if let Some(s) = self.synthetic_timings {
            if ![s.ode_intercept, s.ode_slope, s.ode_curvature, s.diag_time]
                .iter()
                .all(|x| x.is_finite())
            {
                return fail("synthetic timings must be finite".into());
            }
        }
        Ok(())
    }
}
