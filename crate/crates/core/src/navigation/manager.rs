use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NavStatus {
    Ok,
    Reinit,
    Degraded,
}

impl NavStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NavStatus::Ok => "OK",
            NavStatus::Reinit => "REINIT",
            NavStatus::Degraded => "DEGRADED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManagerConfig {
    /// Disagreement threshold in combined position sigmas.
    pub reinit_k: f64,
    /// Consecutive disagreeing fixes required before a reinit.
    pub reinit_count: u32,
    /// DVL mismatch flags that latch DEGRADED.
    pub mismatch_limit: u64,
    /// Silence after which the solution is DEGRADED (s).
    pub watchdog: f64,
}

impl Default for ManagerConfig {
    fn default() -> Self {
        ManagerConfig {
            reinit_k: 10.0,
            reinit_count: 2,
            mismatch_limit: 3,
            watchdog: 5.0,
        }
    }
}

/// What the engine should do with a trusted fix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixDecision {
    Fuse,
    Reinit,
}

/// Watches fused output for drift and faulty sensors.
#[derive(Debug, Clone)]
pub struct NavManager {
    pub config: ManagerConfig,
    disagreeing: u32,
    mismatches: u64,
    pub reinits: u64,
    reinit_pending: bool,
    last_input: Option<f64>,
}

impl NavManager {
    pub fn new(config: ManagerConfig) -> Self {
        NavManager {
            config,
            disagreeing: 0,
            mismatches: 0,
            reinits: 0,
            reinit_pending: false,
            last_input: None,
        }
    }

    pub fn note_input(&mut self, t: f64) {
        self.last_input = Some(t);
    }

    pub fn note_mismatch(&mut self) {
        self.mismatches += 1;
    }

    /// Decides on a fix `dist` metres from the solution given the solution and fix sigmas.
    pub fn assess_fix(&mut self, dist: f64, solution_sigma: f64, fix_sigma: f64) -> FixDecision {
        let limit = self.config.reinit_k * solution_sigma.hypot(fix_sigma);
        if dist > limit {
            self.disagreeing += 1;
            if self.disagreeing >= self.config.reinit_count {
                self.disagreeing = 0;
                self.reinits += 1;
                self.reinit_pending = true;
                return FixDecision::Reinit;
            }
        } else {
            self.disagreeing = 0;
        }
        FixDecision::Fuse
    }

    /// Status for the tick ending at `t`; consumes a pending reinit.
    pub fn status(&mut self, t: f64) -> NavStatus {
        let silent = self.last_input.is_none_or(|tl| t - tl > self.config.watchdog);
        if self.mismatches >= self.config.mismatch_limit || silent {
            self.reinit_pending = false;
            return NavStatus::Degraded;
        }
        if std::mem::take(&mut self.reinit_pending) {
            return NavStatus::Reinit;
        }
        NavStatus::Ok
    }
}
