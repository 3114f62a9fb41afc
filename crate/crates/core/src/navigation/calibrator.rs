//! Self-calibration of the model-based velocity against trusted earth-referenced
//! velocities: water-current estimate plus a running model-uncertainty figure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratorConfig {
    /// Smoothing time constant (s).
    pub tau: f64,
    /// A reference older than this does not pair with the next one (s).
    pub timeout: f64,
    pub sigma_init: f64,
    pub sigma_floor: f64,
}

impl Default for CalibratorConfig {
    fn default() -> Self {
        CalibratorConfig {
            tau: 12.0,
            timeout: 120.0,
            sigma_init: 0.2,
            sigma_floor: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibrator {
    pub config: CalibratorConfig,
    /// Water velocity over ground, north/east (m/s).
    pub current: (f64, f64),
    sigma2: f64,
    last_ref: Option<f64>,
    pub updates: u64,
}

impl Calibrator {
    pub fn new(config: CalibratorConfig) -> Self {
        Calibrator {
            config,
            current: (0.0, 0.0),
            sigma2: config.sigma_init * config.sigma_init,
            last_ref: None,
            updates: 0,
        }
    }

    pub fn model_sigma(&self) -> f64 {
        self.sigma2.sqrt().max(self.config.sigma_floor)
    }

    /// True once no reference has arrived for longer than the timeout.
    pub fn is_frozen(&self, t: f64) -> bool {
        self.last_ref.is_none_or(|tr| t - tr > self.config.timeout)
    }

    /// Folds in one residual `reference_earth - rotated_model` observed over
    /// `span` seconds ending at `t`.
    pub fn calibrate(&mut self, model_earth: (f64, f64), reference_earth: (f64, f64), span: f64, t: f64) {
        if !(span > 0.0) || span > self.config.timeout {
            self.last_ref = Some(t);
            return;
        }
        let res = (reference_earth.0 - model_earth.0, reference_earth.1 - model_earth.1);
        let a = 1.0 - (-span / self.config.tau).exp();
        let e = ((res.0 - self.current.0).powi(2) + (res.1 - self.current.1).powi(2)) * 0.5;
        self.current.0 += a * (res.0 - self.current.0);
        self.current.1 += a * (res.1 - self.current.1);
        self.sigma2 += a * (e - self.sigma2);
        self.last_ref = Some(t);
        self.updates += 1;
    }
}
