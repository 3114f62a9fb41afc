//! Passive helm, mission grammar, frontseat state machine and payload command ingest.

pub mod fsm;
pub mod mission;
pub mod payload;

pub use fsm::{fsm_step, operator_reset, FsmOutput, SafeReason, SafetyEnvelope, StatusEvent, VehicleMode};
pub use mission::{parse_mission, render, MissionError, MissionLeg};
pub use payload::PayloadIngest;

use crate::control::Setpoints;

#[derive(Debug, Clone, PartialEq)]
pub struct HelmOutput {
    pub desired: Setpoints,
    pub leg: Option<usize>,
    /// Non-empty only on the tick that activates a leg carrying overrides.
    pub gain_updates: Vec<(String, f64)>,
}

/// Hold-safe setpoints: zero thrust at the surface, keep the current heading.
pub fn hold_safe(current_heading_deg: f64) -> Setpoints {
    Setpoints {
        heading_deg: current_heading_deg,
        speed: 0.0,
        depth: 0.0,
        glide_pitch_deg: None,
    }
}

/// Step-hold playback of mission legs.
#[derive(Debug, Clone)]
pub struct PassiveHelm {
    legs: Vec<MissionLeg>,
    emitted: Option<usize>,
}

impl PassiveHelm {
    pub fn new(legs: Vec<MissionLeg>) -> Self {
        PassiveHelm { legs, emitted: None }
    }

    pub fn legs(&self) -> &[MissionLeg] {
        &self.legs
    }

    /// Index of the last leg with `start_time <= t`.
    pub fn active_leg(&self, t: f64) -> Option<usize> {
        self.legs.partition_point(|l| l.start_time <= t).checked_sub(1)
    }

    pub fn step(&mut self, t: f64, current_heading_deg: f64) -> HelmOutput {
        let leg = self.active_leg(t);
        let Some(i) = leg else {
            return HelmOutput {
                desired: hold_safe(current_heading_deg),
                leg,
                gain_updates: Vec::new(),
            };
        };
        let l = &self.legs[i];
        let gain_updates = if self.emitted != Some(i) {
            self.emitted = Some(i);
            l.gain_overrides.iter().map(|(k, v)| (k.clone(), *v)).collect()
        } else {
            Vec::new()
        };
        HelmOutput {
            desired: Setpoints {
                heading_deg: l.heading,
                speed: l.speed,
                depth: l.depth,
                glide_pitch_deg: None,
            },
            leg,
            gain_updates,
        }
    }
}
