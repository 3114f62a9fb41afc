//! Fixed-rate closed loop: sense, navigate, decide, control, actuate, integrate.

use super::config::ConfigError;
use super::scenario::{NavMode, Scenario, TICK};
use super::telemetry::TelemetryRow;
use crate::angle::heading_deg;
use crate::control::mapper::FinState;
use crate::control::{ControlEngine, ControlFeedback, ModeGainSet, Setpoints};
use crate::helm::{fsm_step, hold_safe, PassiveHelm, PayloadIngest, SafeReason, StatusEvent, VehicleMode};
use crate::measurement::Measurement;
use crate::navigation::model::{ModelParams, TermMask};
use crate::navigation::{NavEngine, NavSolution};
use crate::plant::{health_step, Sensors, VehicleHealth};
use crate::plant::{actuator_dynamics, ActuatorSet, BodyState, Plant};

/// A payload command injected at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct PayloadCommand {
    pub t: f64,
    pub key: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep every sensor measurement in the result.
    pub record_measurements: bool,
    /// Payload commands; when non-empty the payload ingest overrides the mission while live.
    pub payload: Vec<PayloadCommand>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunEnd {
    Completed,
    /// Mission cut short by the safety envelope.
    Safety(SafeReason),
    /// Numerical failure in the plant.
    Aborted(String),
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<TelemetryRow>,
    pub end: RunEnd,
    pub measurements: Vec<Measurement>,
    pub nav_rejected: u64,
    pub payload_malformed: u64,
}

/// Incremental simulation; one [`Simulation::step`] per control tick.
pub struct Simulation {
    plant: Plant,
    sensors: Sensors,
    nav: Option<NavEngine>,
    control: ControlEngine,
    helm: PassiveHelm,
    payload: Option<PayloadIngest>,
    pending: std::collections::VecDeque<PayloadCommand>,
    scenario: Scenario,
    truth: BodyState,
    actual: ActuatorSet,
    health: VehicleHealth,
    mode: VehicleMode,
    fin_state: FinState,
    nav_status: &'static str,
    k: u64,
    ticks: u64,
    options: RunOptions,
    pub result: RunResult,
}

impl Simulation {
    pub fn new(scenario: &Scenario, options: RunOptions) -> Result<Simulation, ConfigError> {
        let c = &scenario.config;
        c.validate()?;
        let plant = Plant::new(c.plant).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let nav = match scenario.nav {
            NavMode::Truth => None,
            NavMode::Hydroman => {
                let (a, b, g) = c.flight_model;
                let params = ModelParams::new(a, b, g, c.nav_lambda, TermMask::default());
                Some(NavEngine::new(c.nav, params))
            }
        };
        let mut pending: Vec<PayloadCommand> = options.payload.clone();
        pending.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(Simulation {
            sensors: Sensors::new(c.sensors, scenario.seed),
            nav,
            control: ControlEngine::new(c.control, ModeGainSet::new(c.gains)),
            helm: PassiveHelm::new(scenario.mission.clone()),
            payload: (!options.payload.is_empty()).then(|| PayloadIngest::new(c.payload_timeout)),
            pending: pending.into(),
            truth: BodyState::at_rest(c.initial_depth, c.initial_heading_deg.to_radians()),
            actual: ActuatorSet::default(),
            health: c.initial_health,
            mode: VehicleMode::LaunchWait,
            fin_state: FinState::Retracted,
            nav_status: "OK",
            k: 0,
            ticks: (scenario.duration / TICK).round() as u64,
            plant,
            scenario: scenario.clone(),
            options,
            result: RunResult {
                rows: Vec::new(),
                end: RunEnd::Completed,
                measurements: Vec::new(),
                nav_rejected: 0,
                payload_malformed: 0,
            },
        })
    }

    pub fn truth(&self) -> &BodyState {
        &self.truth
    }

    pub fn mode(&self) -> VehicleMode {
        self.mode
    }

    /// Runs one tick; returns the end cause once the run is over.
    pub fn step(&mut self) -> Option<RunEnd> {
        if self.k >= self.ticks {
            return Some(self.result.end.clone());
        }
        let t = self.k as f64 * TICK;
        let cfg = &self.scenario.config;
        let mut events: Vec<String> = Vec::new();
        if self.k == 0 {
            events.extend(self.mode.led_pattern().map(|n| format!("LED{n}")));
        }

        let meas = self.sensors.sense(&self.plant, &self.truth, &self.actual, &cfg.env, t);
        let sol = match &mut self.nav {
            Some(nav) => {
                for m in &meas {
                    if nav.push(*m).is_err() {
                        self.result.nav_rejected += 1;
                    }
                }
                nav.tick(t)
            }
            None => truth_solution(&self.plant, &self.truth, &cfg.env, t),
        };
        if self.options.record_measurements {
            self.result.measurements.extend(meas);
        }
        let status = sol.status.as_str();
        if status != self.nav_status {
            events.push(format!("NAV_{status}"));
            self.nav_status = status;
        }

        let fsm = fsm_step(self.mode, t, &self.health, sol.z, &cfg.envelope);
        match fsm.event {
            Some(StatusEvent::Led(n)) => events.push(format!("LED{n}")),
            Some(StatusEvent::SafeMode(r)) => events.push(format!("SAFE_MODE({})", r.as_str())),
            None => {}
        }
        self.mode = fsm.mode;

        let psi_deg = heading_deg(sol.psi);
        let helm = self.helm.step(t, psi_deg);
        let mut desired = helm.desired;
        if let Some(p) = &mut self.payload {
            while self.pending.front().is_some_and(|c| c.t <= t) {
                let c = self.pending.pop_front().expect("front exists");
                p.ingest(&c.key, c.value, t);
            }
            desired = p.setpoints(t, desired, &cfg.envelope);
            self.result.payload_malformed = p.malformed;
        }
        if !matches!(self.mode, VehicleMode::MissionActive) {
            desired = Setpoints {
                heading_deg: desired.heading_deg,
                ..hold_safe(psi_deg)
            };
        }
        for (key, v) in &helm.gain_updates {
            if self.control.gains.request_gain(key, *v).is_ok() {
                events.push(format!("GAIN({key}={v})"));
            }
        }
        let fb = ControlFeedback {
            phi: sol.phi,
            theta: sol.theta,
            psi: sol.psi,
            depth: sol.z,
            speed: sol.speed(),
        };
        let out = self.control.step(&desired, &fb, TICK, fsm.actuators_enabled);
        if out.fin.state != self.fin_state {
            events.push(match out.fin.state {
                FinState::Deployed => "FIN_DEPLOY".into(),
                FinState::Retracted => "FIN_RETRACT".into(),
            });
            self.fin_state = out.fin.state;
        }

        self.actual = actuator_dynamics(&out.command, &self.actual, &cfg.plant.limits, TICK);
        self.health = health_step(&self.health, &self.actual, &cfg.health, t + TICK, TICK);

        let s = &self.truth;
        let a = &self.actual;
        let cc = &out.correctives;
        self.result.rows.push(TelemetryRow {
            t,
            u: s.u,
            v: s.v,
            w: s.w,
            p_deg: s.p.to_degrees(),
            q_deg: s.q.to_degrees(),
            r_deg: s.r.to_degrees(),
            phi_deg: s.phi.to_degrees(),
            theta_deg: s.theta.to_degrees(),
            psi_deg: heading_deg(s.psi),
            x: s.x,
            y: s.y,
            z: s.z,
            speed: s.speed,
            nav_x: sol.x,
            nav_y: sol.y,
            nav_z: sol.z,
            nav_vn: sol.vn,
            nav_ve: sol.ve,
            nav_vd: sol.vd,
            nav_phi_deg: sol.phi.to_degrees(),
            nav_theta_deg: sol.theta.to_degrees(),
            nav_psi_deg: psi_deg,
            des_heading_deg: desired.heading_deg,
            des_speed: desired.speed,
            des_depth: desired.depth,
            psi_corr_deg: cc.psi_corr.to_degrees(),
            theta_corr_deg: cc.theta_corr.to_degrees(),
            phi_corr_deg: cc.phi_corr.to_degrees(),
            speed_corr: cc.speed_corr,
            uppr_deg: a.uppr_rudd.to_degrees(),
            lowr_deg: a.lowr_rudd.to_degrees(),
            port_deg: a.port_elev.to_degrees(),
            stbd_deg: a.stbd_elev.to_degrees(),
            fin_deploy: a.fin_deploy,
            fin_angle_deg: a.fin_angle.to_degrees(),
            thrust_pct: a.thrust_pct,
            rpm: a.rpm,
            mode: self.mode.as_str(),
            events: events.join(";"),
        });

        self.k += 1;
        if let VehicleMode::SafeMode(r) = self.mode {
            self.result.end = RunEnd::Safety(r);
            self.ticks = self.k;
            return Some(self.result.end.clone());
        }
        match self.plant.step(&self.truth, &self.actual, &cfg.env, TICK) {
            Ok(next) => self.truth = next,
            Err(e) => {
                self.result.end = RunEnd::Aborted(e.to_string());
                self.ticks = self.k;
                return Some(self.result.end.clone());
            }
        }
        None
    }

    pub fn finish(mut self) -> RunResult {
        while self.step().is_none() {}
        self.result
    }
}

fn truth_solution(plant: &Plant, s: &BodyState, env: &crate::plant::Environment, t: f64) -> NavSolution {
    let [vn, ve, vd] = plant.earth_velocity(s, env);
    NavSolution {
        t,
        x: s.x,
        y: s.y,
        z: s.z,
        vn,
        ve,
        vd,
        phi: s.phi,
        theta: s.theta,
        psi: s.psi,
        ..Default::default()
    }
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario, options: RunOptions) -> Result<RunResult, ConfigError> {
    Ok(Simulation::new(scenario, options)?.finish())
}
