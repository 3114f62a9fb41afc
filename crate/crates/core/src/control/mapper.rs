//! Actuator mapping: roll-compensated stern mixing, morphing-fin logic and
//! thrust mapping.

use serde::{Deserialize, Serialize};

pub const STERN_LIMIT_DEG: f64 = 15.0;
pub const FIN_LIMIT_DEG: f64 = 20.0;
pub const ROLL_CORR_LIMIT_DEG: f64 = 5.0;
pub const DEPLOY_ABOVE_DEG: f64 = 30.0;
pub const RETRACT_BELOW_DEG: f64 = 5.0;

/// Heading, pitch and roll correctives (rad) and thrust corrective (percent).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCorrectives {
    pub psi_corr: f64,
    pub theta_corr: f64,
    pub phi_corr: f64,
    pub speed_corr: f64,
}

/// Four stern surface angles (rad): upper rudder, lower rudder, port and starboard elevators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SternAngles {
    pub uppr: f64,
    pub lowr: f64,
    pub port: f64,
    pub stbd: f64,
}

/// Mixing before per-surface clamping.
pub fn map_correctives_unclamped(c: &ControlCorrectives, phi: f64) -> SternAngles {
    let (s, co) = phi.sin_cos();
    let pc = c.phi_corr.clamp(-ROLL_CORR_LIMIT_DEG.to_radians(), ROLL_CORR_LIMIT_DEG.to_radians());
    let rud = c.psi_corr * co - c.theta_corr * s;
    let elev = c.psi_corr * s + c.theta_corr * co;
    SternAngles {
        uppr: rud + pc,
        lowr: rud - pc,
        port: elev - pc,
        stbd: elev + pc,
    }
}

/// Roll-compensated mixing of correctives onto the stern surfaces, clamped to the stern limit.
pub fn map_correctives(c: &ControlCorrectives, phi: f64) -> SternAngles {
    let lim = STERN_LIMIT_DEG.to_radians();
    let a = map_correctives_unclamped(c, phi);
    SternAngles {
        uppr: a.uppr.clamp(-lim, lim),
        lowr: a.lowr.clamp(-lim, lim),
        port: a.port.clamp(-lim, lim),
        stbd: a.stbd.clamp(-lim, lim),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FinState {
    #[default]
    Retracted,
    Deployed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinAction {
    Deploy,
    Hold,
    Retract,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinCommand {
    pub state: FinState,
    pub action: FinAction,
    /// Counter-deflection (rad), meaningful once deployed.
    pub fin_angle: f64,
}

/// Hysteretic deploy/retract decision on the heading error (deg) and the
/// equal-and-opposite fin deflection for the current rudder command (rad).
pub fn morphing_logic(heading_error_deg: f64, state: FinState, rudder_cmd: f64) -> FinCommand {
    let e = heading_error_deg.abs();
    let (state, action) = if e > DEPLOY_ABOVE_DEG {
        (FinState::Deployed, FinAction::Deploy)
    } else if e < RETRACT_BELOW_DEG {
        (FinState::Retracted, FinAction::Retract)
    } else {
        (state, FinAction::Hold)
    };
    let lim = FIN_LIMIT_DEG.to_radians();
    FinCommand {
        state,
        action,
        fin_angle: (-rudder_cmd).clamp(-lim, lim),
    }
}

/// Clamped thrust percentage and its normalised value.
pub fn thrust_map(speed_corr: f64) -> (f64, f64) {
    let pct = speed_corr.clamp(0.0, 100.0);
    (pct, pct / 100.0)
}
