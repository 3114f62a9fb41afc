use super::{ActuatorSet, BodyState, Environment, Plant};
use crate::measurement::{DvlFrame, Measurement};
use nalgebra::{Rotation3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Per-sensor Gaussian noise standard deviations (SI units, radians for angles).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSigmas {
    pub depth: f64,
    pub attitude: f64,
    pub rate: f64,
    pub gps: f64,
    pub lbl: f64,
    pub dvl: f64,
    pub rpm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    /// GPS only fixes above this depth.
    pub gps_max_depth: f64,
    pub gps_interval: f64,
    /// 0 disables LBL.
    pub lbl_interval: f64,
    /// 0 disables the DVL.
    pub dvl_interval: f64,
    /// Instrument yaw relative to the body (rad).
    pub dvl_mount_yaw: f64,
    /// Body-frame velocity bias of the DVL (m/s).
    pub dvl_bias: (f64, f64),
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            gps_max_depth: 0.3,
            gps_interval: 1.0,
            lbl_interval: 10.0,
            dvl_interval: 0.0,
            dvl_mount_yaw: 0.0,
            dvl_bias: (0.0, 0.0),
        }
    }
}

fn due(next: &mut f64, t: f64, interval: f64) -> bool {
    if interval <= 0.0 || t + 1e-9 < *next {
        return false;
    }
    *next = t + interval;
    true
}

/// Simulated sensor suite with a seeded noise source.
#[derive(Debug, Clone)]
pub struct Sensors {
    pub config: SensorConfig,
    rng: ChaCha8Rng,
    history: VecDeque<(f64, f64, f64)>,
    next_gps: f64,
    next_lbl: f64,
    next_dvl: f64,
}

impl Sensors {
    pub fn new(config: SensorConfig, seed: u64) -> Self {
        Sensors {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            history: VecDeque::new(),
            next_gps: 0.0,
            next_lbl: config.lbl_interval,
            next_dvl: 0.0,
        }
    }

    fn noise(&mut self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sigma)
            .map(|d| d.sample(&mut self.rng))
            .unwrap_or(0.0)
    }

    /// Truth position at time `t_n`, linearly interpolated from the recorded track.
    fn position_at(&self, t_n: f64) -> Option<(f64, f64)> {
        let first = self.history.front()?;
        if t_n <= first.0 {
            return Some((first.1, first.2));
        }
        let idx = self.history.partition_point(|h| h.0 < t_n);
        let b = self.history.get(idx).or(self.history.back())?;
        if idx == 0 || b.0 <= t_n {
            return Some((b.1, b.2));
        }
        let a = self.history[idx - 1];
        let f = (t_n - a.0) / (b.0 - a.0);
        Some((a.1 + f * (b.1 - a.1), a.2 + f * (b.2 - a.2)))
    }

    /// Emits all measurements due at time `t`.
    pub fn sense(
        &mut self,
        plant: &Plant,
        s: &BodyState,
        act: &ActuatorSet,
        env: &Environment,
        t: f64,
    ) -> Vec<Measurement> {
        let n = env.noise;
        let mut out = Vec::with_capacity(6);
        self.history.push_back((t, s.x, s.y));
        let keep = env.lbl_latency + 2.0 * self.config.lbl_interval.max(1.0);
        while self.history.front().is_some_and(|h| h.0 < t - keep) {
            self.history.pop_front();
        }

        out.push(Measurement::Depth {
            z: s.z + self.noise(n.depth),
            t,
        });
        out.push(Measurement::Imu {
            phi: s.phi + self.noise(n.attitude),
            theta: s.theta + self.noise(n.attitude),
            psi: s.psi + self.noise(n.attitude),
            p: s.p + self.noise(n.rate),
            q: s.q + self.noise(n.rate),
            r: s.r + self.noise(n.rate),
            t,
        });
        out.push(Measurement::Rpm {
            rpm: act.rpm + self.noise(n.rpm),
            t,
        });
        if s.z < self.config.gps_max_depth && due(&mut self.next_gps, t, self.config.gps_interval) {
            out.push(Measurement::Gps {
                x: s.x + self.noise(n.gps),
                y: s.y + self.noise(n.gps),
                t,
            });
        }
        if due(&mut self.next_lbl, t, self.config.lbl_interval) {
            let t_n = t - env.lbl_latency;
            if let Some((x, y)) = self.position_at(t_n) {
                out.push(Measurement::Lbl {
                    x: x + self.noise(n.lbl),
                    y: y + self.noise(n.lbl),
                    t_n,
                    t_rx: t,
                });
            }
        }
        if due(&mut self.next_dvl, t, self.config.dvl_interval) {
            let ve = plant.earth_velocity(s, env);
            let mut earth = Vector3::new(ve[0], ve[1], ve[2]);
            if let Some((dn, de)) = env.ice_drift {
                earth -= Vector3::new(dn, de, 0.0);
            }
            let body = Rotation3::from_euler_angles(s.phi, s.theta, s.psi).inverse() * earth;
            let body = body + Vector3::new(self.config.dvl_bias.0, self.config.dvl_bias.1, 0.0);
            let inst = Rotation3::from_euler_angles(0.0, 0.0, self.config.dvl_mount_yaw).inverse() * body;
            out.push(Measurement::Dvl {
                vx: inst.x + self.noise(n.dvl),
                vy: inst.y + self.noise(n.dvl),
                vz: inst.z + self.noise(n.dvl),
                t,
                frame: DvlFrame::Instrument,
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_scheduler_fires_once_per_period() {
        let mut next = 0.0;
        let fired: Vec<bool> = (0..40).map(|k| due(&mut next, k as f64 * 0.05, 1.0)).collect();
        assert_eq!(fired.iter().filter(|f| **f).count(), 2);
        assert!(fired[0] && fired[20]);
    }
}
