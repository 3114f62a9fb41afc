//! Heading, depth, roll and speed control with morphing-fin articulation.

pub mod mapper;
pub mod offsets;
pub mod pid;

pub use mapper::{
    map_correctives, map_correctives_unclamped, morphing_logic, thrust_map, ControlCorrectives, FinAction, FinCommand,
    FinState, SternAngles,
};
pub use offsets::{ImuOffsets, OffsetError};
pub use pid::{pid_step, PidGains, PidState};

use crate::angle::wrap_deg;
use crate::plant::ActuatorSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const PITCH_LIMIT_DEG: f64 = 25.0;

/// Gains for every loop in one operating mode. Errors are in degrees, metres
/// and m/s; heading, pitch and roll outputs are degrees, speed output is percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSet {
    pub heading: PidGains,
    pub depth: PidGains,
    pub pitch: PidGains,
    pub roll: PidGains,
    pub speed: PidGains,
}

impl Default for GainSet {
    fn default() -> Self {
        GainSet {
            heading: PidGains::p(0.8, 15.0),
            depth: PidGains {
                kp: 10.0,
                ki: 0.5,
                kd: 0.0,
                i_limit: 5.0,
                out_limit: PITCH_LIMIT_DEG,
            },
            pitch: PidGains::p(1.0, 15.0),
            roll: PidGains::p(0.5, 5.0),
            speed: PidGains::p(0.0, 100.0),
        }
    }
}

impl GainSet {
    /// Applies `loop_field` (e.g. `heading_kp`, `depth_i_limit`).
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let Some((lp, field)) = key.split_once('_') else {
            return false;
        };
        let g = match lp {
            "heading" => &mut self.heading,
            "depth" => &mut self.depth,
            "pitch" => &mut self.pitch,
            "roll" => &mut self.roll,
            "speed" => &mut self.speed,
            _ => return false,
        };
        g.set(field, value)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("unknown control mode {0}")]
    UnknownMode(String),
    #[error("unknown gain {0}")]
    UnknownGain(String),
}

/// Named gain sets; mode switches and gain edits are staged and applied at
/// the start of the next tick so a tick never sees a half-updated set.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGainSet {
    modes: BTreeMap<String, GainSet>,
    active: String,
    pending_mode: Option<String>,
    pending_gains: Vec<(String, f64)>,
}

impl ModeGainSet {
    pub fn new(default: GainSet) -> Self {
        let mut modes = BTreeMap::new();
        modes.insert("default".to_string(), default);
        ModeGainSet {
            modes,
            active: "default".to_string(),
            pending_mode: None,
            pending_gains: Vec::new(),
        }
    }

    pub fn insert(&mut self, name: &str, g: GainSet) {
        self.modes.insert(name.to_string(), g);
    }

    pub fn active_name(&self) -> &str {
        &self.active
    }

    pub fn active(&self) -> &GainSet {
        &self.modes[&self.active]
    }

    pub fn request_mode(&mut self, name: &str) -> Result<(), ControlError> {
        if !self.modes.contains_key(name) {
            return Err(ControlError::UnknownMode(name.to_string()));
        }
        self.pending_mode = Some(name.to_string());
        Ok(())
    }

    pub fn request_gain(&mut self, key: &str, value: f64) -> Result<(), ControlError> {
        if !GainSet::default().set(key, value) {
            return Err(ControlError::UnknownGain(key.to_string()));
        }
        self.pending_gains.push((key.to_string(), value));
        Ok(())
    }

    /// Applies staged changes; returns true when anything changed.
    fn commit(&mut self) -> bool {
        let mut changed = false;
        if let Some(m) = self.pending_mode.take() {
            changed |= m != self.active;
            self.active = m;
        }
        let gains = std::mem::take(&mut self.pending_gains);
        if let Some(set) = self.modes.get_mut(&self.active) {
            for (k, v) in gains {
                changed |= set.set(&k, v);
            }
        }
        changed
    }
}

/// Desired values from the helm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Setpoints {
    pub heading_deg: f64,
    pub speed: f64,
    pub depth: f64,
    /// Commanded pitch (deg) bypassing the depth loop.
    pub glide_pitch_deg: Option<f64>,
}

/// How the speed setpoint is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpeedUnits {
    /// m/s with a linear feed-forward `pct = pct_per_mps * speed`.
    MetersPerSecond { pct_per_mps: f64 },
    ThrustPercent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlConfig {
    pub speed_units: SpeedUnits,
    pub fins_enabled: bool,
    pub roll_compensation: bool,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            speed_units: SpeedUnits::MetersPerSecond { pct_per_mps: 40.0 },
            fins_enabled: true,
            roll_compensation: true,
        }
    }
}

/// Navigation quantities the controller needs (angles in rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlFeedback {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub depth: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub correctives: ControlCorrectives,
    pub command: ActuatorSet,
    pub fin: FinCommand,
    pub heading_error_deg: f64,
    pub desired_pitch_deg: f64,
    pub gains_reset: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct LoopStates {
    heading: PidState,
    depth: PidState,
    pitch: PidState,
    roll: PidState,
    speed: PidState,
}

#[derive(Debug, Clone)]
pub struct ControlEngine {
    pub config: ControlConfig,
    pub gains: ModeGainSet,
    states: LoopStates,
    fin_state: FinState,
}

impl ControlEngine {
    pub fn new(config: ControlConfig, gains: ModeGainSet) -> Self {
        ControlEngine {
            config,
            gains,
            states: LoopStates::default(),
            fin_state: FinState::Retracted,
        }
    }

    pub fn fin_state(&self) -> FinState {
        self.fin_state
    }

    pub fn reset(&mut self) {
        self.states = LoopStates::default();
        self.fin_state = FinState::Retracted;
    }

    /// One control tick. With `enabled == false` surfaces are centred, thrust
    /// is zero and fins are retracted.
    pub fn step(&mut self, sp: &Setpoints, fb: &ControlFeedback, dt: f64, enabled: bool) -> ControlOutput {
        let gains_reset = self.gains.commit();
        if gains_reset {
            self.states = LoopStates::default();
        }
        let g = *self.gains.active();
        let st = &mut self.states;

        let heading_error_deg = wrap_deg(sp.heading_deg - fb.psi.to_degrees());
        let psi_deg = pid_step(&g.heading, heading_error_deg, dt, &mut st.heading);

        let desired_pitch_deg = match sp.glide_pitch_deg {
            Some(p) => p.clamp(-PITCH_LIMIT_DEG, PITCH_LIMIT_DEG),
            // deeper target means nose down, which is negative pitch
            None => -pid_step(&g.depth, sp.depth - fb.depth, dt, &mut st.depth).clamp(-PITCH_LIMIT_DEG, PITCH_LIMIT_DEG),
        };
        let theta_deg = pid_step(&g.pitch, desired_pitch_deg - fb.theta.to_degrees(), dt, &mut st.pitch);
        let phi_deg = pid_step(&g.roll, -fb.phi.to_degrees(), dt, &mut st.roll);

        let (ff, speed_err) = match self.config.speed_units {
            SpeedUnits::MetersPerSecond { pct_per_mps } => (pct_per_mps * sp.speed, sp.speed - fb.speed),
            SpeedUnits::ThrustPercent => (sp.speed, 0.0),
        };
        let speed_corr = ff + pid_step(&g.speed, speed_err, dt, &mut st.speed);

        let correctives = ControlCorrectives {
            psi_corr: psi_deg.to_radians(),
            theta_corr: theta_deg.to_radians(),
            phi_corr: phi_deg.to_radians(),
            speed_corr,
        };

        let mix_phi = if self.config.roll_compensation { fb.phi } else { 0.0 };
        let stern = map_correctives(&correctives, mix_phi);
        let mut fin = morphing_logic(heading_error_deg, self.fin_state, correctives.psi_corr);
        if !self.config.fins_enabled || !enabled {
            fin.state = FinState::Retracted;
            fin.action = FinAction::Retract;
        }
        self.fin_state = fin.state;
        let (thrust, _) = thrust_map(speed_corr);

        let command = if enabled {
            ActuatorSet {
                uppr_rudd: stern.uppr,
                lowr_rudd: stern.lowr,
                port_elev: stern.port,
                stbd_elev: stern.stbd,
                fin_deploy: if fin.state == FinState::Deployed { 1.0 } else { 0.0 },
                fin_angle: fin.fin_angle,
                thrust_pct: thrust,
                rpm: 0.0,
            }
        } else {
            ActuatorSet::default()
        };
        ControlOutput {
            correctives,
            command,
            fin,
            heading_error_deg,
            desired_pitch_deg,
            gains_reset,
        }
    }
}
