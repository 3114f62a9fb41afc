use super::fsm::SafetyEnvelope;
use crate::control::Setpoints;

pub const KEY_HEADING: &str = "DESIRED_HEADING";
pub const KEY_SPEED: &str = "DESIRED_SPEED";
pub const KEY_DEPTH: &str = "DESIRED_DEPTH";

/// Latest setpoints commanded by a payload autonomy system.
#[derive(Debug, Clone)]
pub struct PayloadIngest {
    pub timeout: f64,
    heading: Option<f64>,
    speed: Option<f64>,
    depth: Option<f64>,
    last_t: Option<f64>,
    pub malformed: u64,
    pub accepted: u64,
}

impl PayloadIngest {
    pub fn new(timeout: f64) -> Self {
        PayloadIngest {
            timeout,
            heading: None,
            speed: None,
            depth: None,
            last_t: None,
            malformed: 0,
            accepted: 0,
        }
    }

    /// Ingests one key/value; anything unrecognised or non-numeric is counted and dropped.
    pub fn ingest(&mut self, key: &str, value: Option<f64>, t: f64) -> bool {
        let Some(v) = value.filter(|v| v.is_finite()) else {
            self.malformed += 1;
            return false;
        };
        let slot = match key {
            KEY_HEADING => &mut self.heading,
            KEY_SPEED if v >= 0.0 => &mut self.speed,
            KEY_DEPTH if v >= 0.0 => &mut self.depth,
            _ => {
                self.malformed += 1;
                return false;
            }
        };
        *slot = Some(v);
        self.last_t = Some(t);
        self.accepted += 1;
        true
    }

    pub fn is_live(&self, t: f64) -> bool {
        self.last_t.is_some_and(|lt| t - lt <= self.timeout)
    }

    /// Payload setpoints bound by the envelope, or `hold` after the watchdog expires.
    pub fn setpoints(&self, t: f64, hold: Setpoints, env: &SafetyEnvelope) -> Setpoints {
        if !self.is_live(t) {
            return hold;
        }
        let mut sp = Setpoints {
            heading_deg: self.heading.unwrap_or(hold.heading_deg),
            speed: self.speed.unwrap_or(hold.speed),
            depth: self.depth.unwrap_or(hold.depth),
            glide_pitch_deg: None,
        };
        if env.safety_enabled {
            sp.depth = sp.depth.min(env.max_cruise_depth);
        }
        sp
    }
}
