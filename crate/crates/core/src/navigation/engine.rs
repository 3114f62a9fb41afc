use super::calibrator::{Calibrator, CalibratorConfig};
use super::depth::DepthFilter;
use super::dvl::{DvlConfig, DvlPreprocessor};
use super::fusion::{BiasConfig, BiasLayer, FixOutcome, MainFilter};
use super::lbl::{lbl_extrapolate, slot, TrackBuffer, TrackSample, TRACK_WIDTH};
use super::manager::{FixDecision, ManagerConfig, NavManager, NavStatus};
use super::model::{model_velocity, rls_update, ModelParams, Regressors};
use crate::measurement::{Measurement, Stream};
use nalgebra::{Matrix2, Rotation3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavConfig {
    pub depth_max_rate: f64,
    pub depth_window: usize,
    pub sigma_depth: f64,
    pub sigma_fix: f64,
    pub sigma_dvl: f64,
    /// Position random-walk intensity (m^2/s).
    pub q_pos: f64,
    pub gate_k: f64,
    /// DVL data older than this is not used (s).
    pub dvl_valid_age: f64,
    pub track_period: f64,
    pub track_horizon: f64,
    pub online_identification: bool,
    /// Start position; without one the first fix initialises the filter.
    pub init_position: Option<(f64, f64)>,
    pub ice_drift: Option<(f64, f64)>,
    pub calibrator: CalibratorConfig,
    pub dvl: DvlConfig,
    pub bias: BiasConfig,
    pub manager: ManagerConfig,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig {
            depth_max_rate: 5.0,
            depth_window: 20,
            sigma_depth: 0.05,
            sigma_fix: 1.0,
            sigma_dvl: 0.02,
            q_pos: 0.01,
            gate_k: 5.0,
            dvl_valid_age: 1.0,
            track_period: 1.0,
            track_horizon: 600.0,
            online_identification: false,
            init_position: Some((0.0, 0.0)),
            ice_drift: None,
            calibrator: CalibratorConfig::default(),
            dvl: DvlConfig::default(),
            bias: BiasConfig::default(),
            manager: ManagerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NavBias {
    /// DVL body-frame velocity bias (m/s).
    pub dvl: (f64, f64),
    /// Flight-model body-frame velocity bias (m/s).
    pub model: (f64, f64),
}

/// Fused navigation output for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavSolution {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vn: f64,
    pub ve: f64,
    pub vd: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub cov: [[f64; 6]; 6],
    pub bias: NavBias,
    pub current_est: (f64, f64),
    pub model_sigma: f64,
    pub status: NavStatus,
}

impl Default for NavSolution {
    fn default() -> Self {
        NavSolution {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            vn: 0.0,
            ve: 0.0,
            vd: 0.0,
            phi: 0.0,
            theta: 0.0,
            psi: 0.0,
            cov: [[0.0; 6]; 6],
            bias: NavBias::default(),
            current_est: (0.0, 0.0),
            model_sigma: 0.0,
            status: NavStatus::Ok,
        }
    }
}

impl NavSolution {
    pub fn speed(&self) -> f64 {
        self.vn.hypot(self.ve)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("{stream:?} measurement at t = {t} is older than the last one ({last})")]
    OutOfOrder { stream: Stream, t: f64, last: f64 },
}

/// Counters exposed for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NavCounters {
    pub out_of_order: u64,
    pub stale_fixes: u64,
    pub gated_fixes: u64,
    pub depth_rejected: u64,
    pub rls_resets: u64,
    pub dvl_mismatch: u64,
}

/// Sequential navigation pipeline consuming a time-ordered measurement queue.
#[derive(Debug, Clone)]
pub struct NavEngine {
    pub config: NavConfig,
    pub params: ModelParams,
    pub calibrator: Calibrator,
    pub bias: BiasLayer,
    pub manager: NavManager,
    depth: DepthFilter,
    dvl: DvlPreprocessor,
    filter: Option<MainFilter>,
    track: TrackBuffer,
    queue: Vec<Measurement>,
    last_stream_t: [f64; 6],
    counters: NavCounters,
    t_prev: Option<f64>,
    att: (f64, f64, f64),
    rates: (f64, f64, f64),
    rpm: f64,
    model_vel: Vector3<f64>,
    dvl_last: Option<(f64, Vector3<f64>)>,
    acc: TrackSample,
    prev: Option<TrackRates>,
    last_fix: Option<(f64, (f64, f64), TrackSample)>,
    solution: NavSolution,
}

/// Integrands of the tracks at the previous tick (trapezoid rule).
#[derive(Debug, Clone, Copy)]
struct TrackRates {
    best: Vector2<f64>,
    model: Vector2<f64>,
    dvl: Option<Vector2<f64>>,
    cs: (f64, f64),
}

impl NavEngine {
    pub fn new(config: NavConfig, params: ModelParams) -> Self {
        let filter = config
            .init_position
            .map(|(x, y)| MainFilter::new(Vector3::new(x, y, 0.0), config.sigma_fix, config.q_pos));
        NavEngine {
            params,
            calibrator: Calibrator::new(config.calibrator),
            bias: BiasLayer::new(config.bias),
            manager: NavManager::new(config.manager),
            depth: DepthFilter::new(config.depth_max_rate, config.depth_window),
            dvl: DvlPreprocessor::new(config.dvl),
            filter,
            track: TrackBuffer::new(config.track_period, config.track_horizon),
            queue: Vec::new(),
            last_stream_t: [f64::NEG_INFINITY; 6],
            counters: NavCounters::default(),
            t_prev: None,
            att: (0.0, 0.0, 0.0),
            rates: (0.0, 0.0, 0.0),
            rpm: 0.0,
            model_vel: Vector3::zeros(),
            dvl_last: None,
            acc: [0.0; TRACK_WIDTH],
            prev: None,
            last_fix: None,
            solution: NavSolution::default(),
            config,
        }
    }

    /// Queues a measurement; per-stream timestamps must not decrease.
    pub fn push(&mut self, m: Measurement) -> Result<(), NavError> {
        let s = m.stream();
        let last = self.last_stream_t[s.index()];
        let t = match m {
            Measurement::Lbl { t_n, .. } => t_n,
            _ => m.time(),
        };
        if !(t >= last) {
            self.counters.out_of_order += 1;
            return Err(NavError::OutOfOrder { stream: s, t, last });
        }
        self.last_stream_t[s.index()] = t;
        self.queue.push(m);
        Ok(())
    }

    pub fn counters(&self) -> NavCounters {
        NavCounters {
            depth_rejected: self.depth.rejected,
            rls_resets: self.params.resets,
            dvl_mismatch: self.dvl.mismatch_events,
            ..self.counters
        }
    }

    pub fn solution(&self) -> &NavSolution {
        &self.solution
    }

    pub fn track(&self) -> &TrackBuffer {
        &self.track
    }

    fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_euler_angles(self.att.0, self.att.1, self.att.2)
    }

    /// Processes everything queued up to `t` and advances the solution to `t`.
    pub fn tick(&mut self, t: f64) -> NavSolution {
        self.queue
            .sort_by(|a, b| a.time().total_cmp(&b.time()).then(a.stream().cmp(&b.stream())));
        let split = self.queue.partition_point(|m| m.time() <= t + 1e-9);
        let due: Vec<Measurement> = self.queue.drain(..split).collect();

        let mut fixes = Vec::new();
        let mut new_depth = None;
        let mut dvl_new = false;
        for m in due {
            self.manager.note_input(m.time());
            match m {
                Measurement::Imu { phi, theta, psi, p, q, r, .. } => {
                    self.att = (phi, theta, psi);
                    self.rates = (p, q, r);
                }
                Measurement::Rpm { rpm, .. } => self.rpm = rpm,
                Measurement::Depth { z, t } => new_depth = self.depth.push(z, t),
                Measurement::Dvl { vx, vy, vz, t: td, frame } => {
                    let gap = self.dvl_last.map_or(0.0, |(tl, _)| td - tl);
                    let out = self.dvl.process(
                        Vector3::new(vx, vy, vz),
                        frame,
                        self.att,
                        self.config.ice_drift,
                        self.rates.2,
                        gap,
                    );
                    if out.mismatch {
                        self.manager.note_mismatch();
                    }
                    // ground-referenced body velocity, ice drift already removed
                    let body = self.rotation().inverse() * out.earth;
                    self.dvl_last = Some((td, body));
                    dvl_new = true;
                }
                Measurement::Gps { x, y, t } => fixes.push((x, y, t)),
                Measurement::Lbl { x, y, t_n, .. } => fixes.push((x, y, t_n)),
            }
        }

        let dt = self.t_prev.map_or(0.0, |tp| (t - tp).max(0.0));
        self.t_prev = Some(t);
        let rot = self.rotation();
        let z_est = self.filter.as_ref().map_or(0.0, |f| f.x[2]);

        let reg = Regressors {
            rpm: self.rpm,
            p: self.rates.0,
            q: self.rates.1,
            r: self.rates.2,
            z: z_est,
            u_prev: self.model_vel.x,
            v_prev: self.model_vel.y,
            w_prev: self.model_vel.z,
        };
        let mv = {
            let (u, v, w) = model_velocity(&reg, &self.params);
            Vector3::new(u, v, w)
        };
        let dvl_fresh = self
            .dvl_last
            .filter(|(td, _)| t - td <= self.config.dvl_valid_age)
            .map(|(_, b)| b);
        let dvl_corr = dvl_fresh.map(|b| b - Vector3::new(self.bias.dvl.x, self.bias.dvl.y, 0.0));
        if let (true, true, Some(c)) = (dvl_new, self.config.online_identification, dvl_corr) {
            rls_update(&mut self.params, &reg, (c.x, c.y, c.z));
        }
        self.model_vel = mv;

        self.bias.propagate(dt);
        if let (true, Some(c)) = (dvl_new, dvl_corr) {
            self.bias.update_model(mv.xy(), c.xy());
        }
        let model_body = Vector3::new(mv.x - self.bias.model.x, mv.y - self.bias.model.y, mv.z);
        let model_earth = rot * model_body;
        let cur = self.calibrator.current;
        let (v_best, sigma_v) = match dvl_corr {
            Some(c) => (rot * c, self.config.sigma_dvl),
            None => (
                model_earth + Vector3::new(cur.0, cur.1, 0.0),
                self.calibrator.model_sigma(),
            ),
        };

        let psi = self.att.2;
        let rates = TrackRates {
            best: v_best.xy(),
            model: model_earth.xy(),
            dvl: dvl_fresh.map(|b| (rot * b).xy()),
            cs: (psi.cos(), psi.sin()),
        };
        if let Some(p) = self.prev {
            let h = 0.5 * dt;
            let a = &mut self.acc;
            a[slot::ADAPT_X] += h * (p.best.x + rates.best.x);
            a[slot::ADAPT_Y] += h * (p.best.y + rates.best.y);
            a[slot::MODEL_X] += h * (p.model.x + rates.model.x);
            a[slot::MODEL_Y] += h * (p.model.y + rates.model.y);
            if let (Some(d0), Some(d1)) = (p.dvl, rates.dvl) {
                a[slot::DVL_X] += h * (d0.x + d1.x);
                a[slot::DVL_Y] += h * (d0.y + d1.y);
                a[slot::JC] += h * (p.cs.0 + rates.cs.0);
                a[slot::JS] += h * (p.cs.1 + rates.cs.1);
                a[slot::DVL_T] += dt;
            }
        }
        self.prev = Some(rates);
        self.track.push(t, self.acc);

        if let Some(f) = self.filter.as_mut() {
            f.predict(v_best, sigma_v, dt);
            if let Some(z) = new_depth {
                f.update_depth(z, self.config.sigma_depth);
            }
        }

        for (fx, fy, tn) in fixes {
            self.fuse_fix((fx, fy), tn, t);
        }

        let status = self.manager.status(t);
        self.solution = self.compose(t, status);
        self.solution
    }

    fn fuse_fix(&mut self, fix: (f64, f64), t_n: f64, t: f64) {
        let Some(now_fix) = lbl_extrapolate(fix, t_n, &self.track) else {
            self.counters.stale_fixes += 1;
            return;
        };
        let cfg = self.config;
        match self.filter.as_mut() {
            None => {
                let z = self.depth.value().unwrap_or(0.0);
                self.filter = Some(MainFilter::new(
                    Vector3::new(now_fix.0, now_fix.1, z),
                    cfg.sigma_fix,
                    cfg.q_pos,
                ));
            }
            Some(f) => {
                let dist = (now_fix.0 - f.x[0]).hypot(now_fix.1 - f.x[1]);
                match self.manager.assess_fix(dist, f.position_sigma(), cfg.sigma_fix) {
                    FixDecision::Reinit => f.reset_position(now_fix, cfg.sigma_fix),
                    FixDecision::Fuse => {
                        if let FixOutcome::Gated { .. } = f.update_position(now_fix, cfg.sigma_fix, cfg.gate_k) {
                            self.counters.gated_fixes += 1;
                        }
                    }
                }
            }
        }

        let Some(s_n) = self.track.at(t_n) else {
            return;
        };
        if let Some((t0, f0, s0)) = self.last_fix {
            let span = t_n - t0;
            if span > 0.0 {
                let dfix = Vector2::new(fix.0 - f0.0, fix.1 - f0.1);
                let dmodel = Vector2::new(
                    s_n[slot::MODEL_X] - s0[slot::MODEL_X],
                    s_n[slot::MODEL_Y] - s0[slot::MODEL_Y],
                );
                self.calibrator.calibrate(
                    (dmodel.x / span, dmodel.y / span),
                    (dfix.x / span, dfix.y / span),
                    span,
                    t,
                );
                if s_n[slot::DVL_T] - s0[slot::DVL_T] >= 0.95 * span {
                    let jc = s_n[slot::JC] - s0[slot::JC];
                    let js = s_n[slot::JS] - s0[slot::JS];
                    let ddvl = Vector2::new(
                        s_n[slot::DVL_X] - s0[slot::DVL_X],
                        s_n[slot::DVL_Y] - s0[slot::DVL_Y],
                    );
                    self.bias
                        .update_dvl(dfix, ddvl, Matrix2::new(jc, -js, js, jc), cfg.sigma_fix);
                }
            }
        }
        self.last_fix = Some((t_n, fix, s_n));
    }

    fn compose(&self, t: f64, status: NavStatus) -> NavSolution {
        let mut s = NavSolution {
            t,
            phi: self.att.0,
            theta: self.att.1,
            psi: self.att.2,
            bias: NavBias {
                dvl: (self.bias.dvl.x, self.bias.dvl.y),
                model: (self.bias.model.x, self.bias.model.y),
            },
            current_est: self.calibrator.current,
            model_sigma: self.calibrator.model_sigma(),
            status,
            ..Default::default()
        };
        if let Some(f) = &self.filter {
            s.x = f.x[0];
            s.y = f.x[1];
            s.z = f.x[2];
            s.vn = f.x[3];
            s.ve = f.x[4];
            s.vd = f.x[5];
            for i in 0..6 {
                for j in 0..6 {
                    s.cov[i][j] = f.p[(i, j)];
                }
            }
        } else {
            s.z = self.depth.value().unwrap_or(0.0);
        }
        s
    }
}
