//! Frontseat mission state machine and safety envelope.

use crate::plant::VehicleHealth;
use serde::{Deserialize, Serialize};

/// Window before actuator engagement signalled as ENGAGE_IMMINENT (s).
pub const ENGAGE_WARNING: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyEnvelope {
    pub max_depth: f64,
    pub min_voltage: f64,
    pub max_current: f64,
    pub max_internal_pressure: f64,
    pub actuator_engage_delay: f64,
    pub mission_end_time: f64,
    pub max_cruise_depth: f64,
    /// Disabling skips every envelope check.
    pub safety_enabled: bool,
}

impl Default for SafetyEnvelope {
    fn default() -> Self {
        SafetyEnvelope {
            max_depth: 50.0,
            min_voltage: 13.0,
            max_current: 8.0,
            max_internal_pressure: 110.0,
            actuator_engage_delay: 60.0,
            mission_end_time: 720.0,
            max_cruise_depth: 10.0,
            safety_enabled: true,
        }
    }
}

impl SafetyEnvelope {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("max_depth", self.max_depth),
            ("min_voltage", self.min_voltage),
            ("max_current", self.max_current),
            ("max_internal_pressure", self.max_internal_pressure),
            ("actuator_engage_delay", self.actuator_engage_delay),
            ("mission_end_time", self.mission_end_time),
            ("max_cruise_depth", self.max_cruise_depth),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{k} must be positive, got {v}"));
            }
        }
        if self.max_cruise_depth > self.max_depth {
            return Err("max_cruise_depth exceeds max_depth".into());
        }
        if self.mission_end_time <= self.actuator_engage_delay {
            return Err("mission_end_time must follow actuator_engage_delay".into());
        }
        Ok(())
    }

    /// First violated rule, checked in the order depth, voltage, current, pressure.
    pub fn violation(&self, health: &VehicleHealth, depth: f64) -> Option<SafeReason> {
        if !self.safety_enabled {
            return None;
        }
        if depth > self.max_cruise_depth.min(self.max_depth) {
            Some(SafeReason::Depth)
        } else if health.battery_v < self.min_voltage {
            Some(SafeReason::Voltage)
        } else if health.motor_current > self.max_current {
            Some(SafeReason::Current)
        } else if health.internal_pressure > self.max_internal_pressure {
            Some(SafeReason::Pressure)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SafeReason {
    Depth,
    Voltage,
    Current,
    Pressure,
}

impl SafeReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SafeReason::Depth => "depth",
            SafeReason::Voltage => "voltage",
            SafeReason::Current => "current",
            SafeReason::Pressure => "pressure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VehicleMode {
    LaunchWait,
    EngageImminent,
    MissionActive,
    MissionEnded,
    SafeMode(SafeReason),
}

impl VehicleMode {
    pub fn as_str(&self) -> String {
        match self {
            VehicleMode::LaunchWait => "LAUNCH_WAIT".into(),
            VehicleMode::EngageImminent => "ENGAGE_IMMINENT".into(),
            VehicleMode::MissionActive => "MISSION_ACTIVE".into(),
            VehicleMode::MissionEnded => "MISSION_ENDED".into(),
            VehicleMode::SafeMode(r) => format!("SAFE_MODE({})", r.as_str()),
        }
    }

    /// LED pattern id for the four nominal states.
    pub fn led_pattern(&self) -> Option<u8> {
        match self {
            VehicleMode::LaunchWait => Some(1),
            VehicleMode::EngageImminent => Some(2),
            VehicleMode::MissionActive => Some(3),
            VehicleMode::MissionEnded => Some(4),
            VehicleMode::SafeMode(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatusEvent {
    Led(u8),
    SafeMode(SafeReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FsmOutput {
    pub mode: VehicleMode,
    pub actuators_enabled: bool,
    /// Present only on a mode change.
    pub event: Option<StatusEvent>,
}

/// Advances the mission mode; `t` is time since launch and `depth` the navigated depth.
pub fn fsm_step(mode: VehicleMode, t: f64, health: &VehicleHealth, depth: f64, env: &SafetyEnvelope) -> FsmOutput {
    let next = match mode {
        VehicleMode::SafeMode(_) => mode,
        _ => match env.violation(health, depth) {
            Some(r) => VehicleMode::SafeMode(r),
            None => {
                let nominal = if t >= env.mission_end_time {
                    VehicleMode::MissionEnded
                } else if t >= env.actuator_engage_delay {
                    VehicleMode::MissionActive
                } else if t >= env.actuator_engage_delay - ENGAGE_WARNING {
                    VehicleMode::EngageImminent
                } else {
                    VehicleMode::LaunchWait
                };
                // never step backwards along the nominal sequence
                if rank(nominal) >= rank(mode) {
                    nominal
                } else {
                    mode
                }
            }
        },
    };
    let event = (next != mode).then(|| match next {
        VehicleMode::SafeMode(r) => StatusEvent::SafeMode(r),
        m => StatusEvent::Led(m.led_pattern().unwrap_or(0)),
    });
    FsmOutput {
        mode: next,
        actuators_enabled: next == VehicleMode::MissionActive,
        event,
    }
}

fn rank(m: VehicleMode) -> u8 {
    match m {
        VehicleMode::LaunchWait => 0,
        VehicleMode::EngageImminent => 1,
        VehicleMode::MissionActive => 2,
        VehicleMode::MissionEnded => 3,
        VehicleMode::SafeMode(_) => 4,
    }
}

/// Explicit operator reset, the only way out of SAFE_MODE.
pub fn operator_reset(_mode: VehicleMode) -> VehicleMode {
    VehicleMode::LaunchWait
}
