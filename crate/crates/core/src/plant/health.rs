use super::ActuatorSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleHealth {
    pub battery_v: f64,
    pub motor_current: f64,
    pub internal_pressure: f64,
}

/// Linear pressure ramp starting at `start` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakInjection {
    pub start: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HealthParams {
    /// Motor amps per thrust percent.
    pub amps_per_pct: f64,
    /// Volts lost per ampere-second drawn.
    pub volts_per_amp_s: f64,
    pub leak: Option<LeakInjection>,
}

impl Default for HealthParams {
    fn default() -> Self {
        HealthParams {
            amps_per_pct: 0.05,
            volts_per_amp_s: 1e-5,
            leak: None,
        }
    }
}

impl Default for VehicleHealth {
    fn default() -> Self {
        VehicleHealth {
            battery_v: 16.8,
            motor_current: 0.0,
            internal_pressure: 100.0,
        }
    }
}

/// Advances battery, current and pressure by one tick ending at time `t`.
pub fn health_step(h: &VehicleHealth, act: &ActuatorSet, params: &HealthParams, t: f64, dt: f64) -> VehicleHealth {
    let current = params.amps_per_pct * act.thrust_pct.max(0.0);
    let pressure = match params.leak {
        Some(l) if t > l.start => h.internal_pressure + l.rate * dt.min(t - l.start),
        _ => h.internal_pressure,
    };
    VehicleHealth {
        battery_v: h.battery_v - params.volts_per_amp_s * current * dt,
        motor_current: current,
        internal_pressure: pressure,
    }
}
