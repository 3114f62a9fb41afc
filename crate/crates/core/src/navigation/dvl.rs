use crate::measurement::DvlFrame;
use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DvlConfig {
    /// Instrument mounting (roll, pitch, yaw) relative to the body (rad).
    pub mount: (f64, f64, f64),
    /// Lateral/forward ratio that marks a suspect mounting in straight flight.
    pub mismatch_ratio: f64,
    /// Yaw rate below which the vehicle counts as flying straight (rad/s).
    pub straight_rate: f64,
    /// Averaging time constant for the lateral-velocity monitor (s).
    pub monitor_tau: f64,
}

impl Default for DvlConfig {
    fn default() -> Self {
        DvlConfig {
            mount: (0.0, 0.0, 0.0),
            mismatch_ratio: 0.3,
            straight_rate: 2f64.to_radians(),
            monitor_tau: 20.0,
        }
    }
}

/// Body and earth velocity after preprocessing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DvlVelocity {
    pub body: Vector3<f64>,
    pub earth: Vector3<f64>,
    pub mismatch: bool,
}

/// Rotates DVL data into the body frame, compensates ice drift and watches for
/// a mounting mismatch.
#[derive(Debug, Clone)]
pub struct DvlPreprocessor {
    pub config: DvlConfig,
    mean_u: f64,
    mean_v: f64,
    straight_time: f64,
    pub mismatch_events: u64,
}

impl DvlPreprocessor {
    pub fn new(config: DvlConfig) -> Self {
        DvlPreprocessor {
            config,
            mean_u: 0.0,
            mean_v: 0.0,
            straight_time: 0.0,
            mismatch_events: 0,
        }
    }

    /// `attitude` is (roll, pitch, heading); `ice_drift` is the north/east drift
    /// of the reference surface for an upward-looking instrument.
    pub fn process(
        &mut self,
        v: Vector3<f64>,
        frame: DvlFrame,
        attitude: (f64, f64, f64),
        ice_drift: Option<(f64, f64)>,
        yaw_rate: f64,
        dt: f64,
    ) -> DvlVelocity {
        let (mr, mp, my) = self.config.mount;
        let body = match frame {
            DvlFrame::Instrument => Rotation3::from_euler_angles(mr, mp, my) * v,
            DvlFrame::Body => v,
        };
        let mut earth = Rotation3::from_euler_angles(attitude.0, attitude.1, attitude.2) * body;
        if let Some((dn, de)) = ice_drift {
            earth += Vector3::new(dn, de, 0.0);
        }
        let mut mismatch = false;
        if yaw_rate.abs() < self.config.straight_rate && dt > 0.0 {
            let a = 1.0 - (-dt / self.config.monitor_tau).exp();
            self.mean_u += a * (body.x - self.mean_u);
            self.mean_v += a * (body.y - self.mean_v);
            self.straight_time += dt;
            if self.straight_time > self.config.monitor_tau
                && self.mean_v.abs() > self.config.mismatch_ratio * self.mean_u.abs().max(0.1)
            {
                mismatch = true;
                self.mismatch_events += 1;
            }
        }
        DvlVelocity { body, earth, mismatch }
    }
}
