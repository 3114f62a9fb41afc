//! `key=value` configuration with `[section]` headers.

use crate::control::{ControlConfig, GainSet, SpeedUnits};
use crate::helm::SafetyEnvelope;
use crate::hydromath::{self, Appendage, AppendageKind, HydroConfig};
use crate::navigation::model::{N_U, N_V, N_W};
use crate::navigation::NavConfig;
use crate::plant::{
    ActuatorLimits, Environment, HealthParams, LeakInjection, PitchParams, PlantParams, RollParams, SensorConfig,
    SurgeParams, VehicleHealth,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const DEFAULT_CONFIG: &str = include_str!("../../assets/default.conf");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("[{section}] {key}: {msg}")]
    Value { section: String, key: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn value_err(section: &str, key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        section: section.to_string(),
        key: key.to_string(),
        msg: msg.into(),
    }
}

/// Parsed sections; entries keep file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
    order: Vec<(String, String)>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Ini, ConfigError> {
        let mut ini = Ini::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| ConfigError::Syntax {
                line: i + 1,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err("unterminated section header"))?;
                section = name.trim().to_string();
                if section.is_empty() {
                    return Err(err("empty section name"));
                }
                continue;
            }
            if section.is_empty() {
                return Err(err("key outside any section"));
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(err("empty key"));
            }
            let sec = ini.sections.entry(section.clone()).or_default();
            if sec.insert(k.clone(), v).is_some() {
                return Err(err(&format!("duplicate key {k}")));
            }
            ini.order.push((section.clone(), k));
        }
        Ok(ini)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Entries in file order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.order
            .iter()
            .map(|(s, k)| (s.as_str(), k.as_str(), self.sections[s][k].as_str()))
    }
}

/// Everything needed to build one simulation except the mission.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub plant: PlantParams,
    pub env: Environment,
    pub sensors: SensorConfig,
    pub health: HealthParams,
    pub initial_health: VehicleHealth,
    pub nav: NavConfig,
    pub nav_lambda: f64,
    pub flight_model: ([f64; N_U], [f64; N_V], [f64; N_W]),
    pub gains: GainSet,
    pub control: ControlConfig,
    pub envelope: SafetyEnvelope,
    pub payload_timeout: f64,
    pub initial_depth: f64,
    pub initial_heading_deg: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Unit {
    One,
    Deg,
}

type Entry<'a> = (&'static str, &'static str, &'a mut f64, Unit);

macro_rules! table {
    ($( $sec:literal . $key:literal => $field:expr, $unit:ident; )*) => {
        vec![ $( ($sec, $key, &mut $field, Unit::$unit) ),* ]
    };
}

fn numeric_fields(c: &mut SimConfig) -> Vec<Entry<'_>> {
    let p = &mut c.plant;
    let g = &mut c.gains;
    table! {
        "hydro"."mass" => p.hydro.mass, One;
        "hydro"."i_zz" => p.hydro.i_zz, One;
        "hydro"."x_g" => p.hydro.x_g, One;
        "hydro"."y_vdot" => p.hydro.y_vdot, One;
        "hydro"."y_rdot" => p.hydro.y_rdot, One;
        "hydro"."n_vdot" => p.hydro.n_vdot, One;
        "hydro"."n_rdot" => p.hydro.n_rdot, One;
        "hydro"."y_v" => p.hydro.y_v, One;
        "hydro"."y_r" => p.hydro.y_r, One;
        "hydro"."n_v" => p.hydro.n_v, One;
        "hydro"."n_r" => p.hydro.n_r, One;
        "hydro"."rho" => p.hydro.rho, One;
        "hydro"."u_ref" => p.hydro.u_ref, One;
        "rudder"."lift_per_angle" => p.rudder.lift_per_angle, One;
        "rudder"."station" => p.rudder.station, One;
        "fin"."lift_per_angle" => p.fin.lift_per_angle, One;
        "fin"."station" => p.fin.station, One;
        "surge"."mass" => p.surge.mass, One;
        "surge"."k_thrust" => p.surge.k_thrust, One;
        "surge"."k_drag" => p.surge.k_drag, One;
        "surge"."turn_coupling" => p.surge.turn_coupling, One;
        "pitch"."gain" => p.pitch.gain, One;
        "pitch"."tau" => p.pitch.tau, One;
        "pitch"."buoyancy_rise" => p.pitch.buoyancy_rise, One;
        "roll"."tau" => p.roll.tau, One;
        "roll"."fixed_fin_roll_deg" => p.roll.fixed_fin_roll, Deg;
        "roll"."diff_gain" => p.roll.diff_gain, One;
        "roll"."yaw_moment" => p.roll.yaw_moment, One;
        "roll"."thrust_ref_pct" => p.roll.thrust_ref_pct, One;
        "limits"."stern_max_deg" => p.limits.stern_max, Deg;
        "limits"."fin_max_deg" => p.limits.fin_max, Deg;
        "limits"."slew_rate_deg" => p.limits.slew_rate, Deg;
        "limits"."deploy_time" => p.limits.deploy_time, One;
        "limits"."rpm_per_pct" => p.limits.rpm_per_pct, One;
        "environment"."current_n" => c.env.current_n, One;
        "environment"."current_e" => c.env.current_e, One;
        "environment"."water_density" => c.env.water_density, One;
        "environment"."prop_torque_roll_deg" => c.env.prop_torque_roll, Deg;
        "environment"."lbl_latency" => c.env.lbl_latency, One;
        "noise"."depth" => c.env.noise.depth, One;
        "noise"."attitude_deg" => c.env.noise.attitude, Deg;
        "noise"."rate_deg" => c.env.noise.rate, Deg;
        "noise"."gps" => c.env.noise.gps, One;
        "noise"."lbl" => c.env.noise.lbl, One;
        "noise"."dvl" => c.env.noise.dvl, One;
        "noise"."rpm" => c.env.noise.rpm, One;
        "sensors"."gps_max_depth" => c.sensors.gps_max_depth, One;
        "sensors"."gps_interval" => c.sensors.gps_interval, One;
        "sensors"."lbl_interval" => c.sensors.lbl_interval, One;
        "sensors"."dvl_interval" => c.sensors.dvl_interval, One;
        "sensors"."dvl_mount_yaw_deg" => c.sensors.dvl_mount_yaw, Deg;
        "sensors"."dvl_bias_x" => c.sensors.dvl_bias.0, One;
        "sensors"."dvl_bias_y" => c.sensors.dvl_bias.1, One;
        "health"."battery_v" => c.initial_health.battery_v, One;
        "health"."internal_pressure" => c.initial_health.internal_pressure, One;
        "health"."amps_per_pct" => c.health.amps_per_pct, One;
        "health"."volts_per_amp_s" => c.health.volts_per_amp_s, One;
        "navigation"."sigma_fix" => c.nav.sigma_fix, One;
        "navigation"."sigma_dvl" => c.nav.sigma_dvl, One;
        "navigation"."sigma_depth" => c.nav.sigma_depth, One;
        "navigation"."q_pos" => c.nav.q_pos, One;
        "navigation"."gate_k" => c.nav.gate_k, One;
        "navigation"."lambda" => c.nav_lambda, One;
        "navigation"."calibrator_tau" => c.nav.calibrator.tau, One;
        "navigation"."watchdog" => c.nav.manager.watchdog, One;
        "gains"."heading_kp" => g.heading.kp, One;
        "gains"."heading_ki" => g.heading.ki, One;
        "gains"."heading_kd" => g.heading.kd, One;
        "gains"."heading_i_limit" => g.heading.i_limit, One;
        "gains"."heading_out_limit" => g.heading.out_limit, One;
        "gains"."depth_kp" => g.depth.kp, One;
        "gains"."depth_ki" => g.depth.ki, One;
        "gains"."depth_kd" => g.depth.kd, One;
        "gains"."depth_i_limit" => g.depth.i_limit, One;
        "gains"."depth_out_limit" => g.depth.out_limit, One;
        "gains"."pitch_kp" => g.pitch.kp, One;
        "gains"."pitch_ki" => g.pitch.ki, One;
        "gains"."pitch_kd" => g.pitch.kd, One;
        "gains"."pitch_i_limit" => g.pitch.i_limit, One;
        "gains"."pitch_out_limit" => g.pitch.out_limit, One;
        "gains"."roll_kp" => g.roll.kp, One;
        "gains"."roll_ki" => g.roll.ki, One;
        "gains"."roll_kd" => g.roll.kd, One;
        "gains"."roll_i_limit" => g.roll.i_limit, One;
        "gains"."roll_out_limit" => g.roll.out_limit, One;
        "gains"."speed_kp" => g.speed.kp, One;
        "gains"."speed_ki" => g.speed.ki, One;
        "gains"."speed_kd" => g.speed.kd, One;
        "gains"."speed_i_limit" => g.speed.i_limit, One;
        "gains"."speed_out_limit" => g.speed.out_limit, One;
        "safety"."max_depth" => c.envelope.max_depth, One;
        "safety"."min_voltage" => c.envelope.min_voltage, One;
        "safety"."max_current" => c.envelope.max_current, One;
        "safety"."max_internal_pressure" => c.envelope.max_internal_pressure, One;
        "safety"."actuator_engage_delay" => c.envelope.actuator_engage_delay, One;
        "safety"."mission_end_time" => c.envelope.mission_end_time, One;
        "safety"."max_cruise_depth" => c.envelope.max_cruise_depth, One;
        "safety"."payload_timeout" => c.payload_timeout, One;
        "initial"."depth" => c.initial_depth, One;
        "initial"."heading_deg" => c.initial_heading_deg, One;
    }
}

const BOOL_KEYS: [(&str, &str); 4] = [
    ("control", "fins_enabled"),
    ("control", "roll_compensation"),
    ("safety", "safety_enabled"),
    ("navigation", "online_identification"),
];

const OPTIONAL_KEYS: [(&str, &str); 4] = [
    ("environment", "roll_hold_deg"),
    ("environment", "ice_drift"),
    ("health", "leak"),
    ("control", "speed_units"),
];

fn parse_f64(s: &str, sec: &str, key: &str) -> Result<f64, ConfigError> {
    let v: f64 = s.parse().map_err(|_| value_err(sec, key, format!("bad number {s:?}")))?;
    if !v.is_finite() {
        return Err(value_err(sec, key, "non-finite"));
    }
    Ok(v)
}

fn parse_pair(s: &str, sec: &str, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
    if s == "none" {
        return Ok(None);
    }
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| value_err(sec, key, "expected none or a,b"))?;
    Ok(Some((parse_f64(a.trim(), sec, key)?, parse_f64(b.trim(), sec, key)?)))
}

fn parse_list<const N: usize>(s: &str, sec: &str, key: &str) -> Result<[f64; N], ConfigError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|x| parse_f64(x.trim(), sec, key))
        .collect::<Result<_, _>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| value_err(sec, key, format!("expected {N} values, got {}", v.len())))
}

/// Degrees with radian round-off removed.
fn tidy_deg(rad: f64) -> f64 {
    let d = rad.to_degrees();
    format!("{d:.10e}").parse().unwrap_or(d)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ")
}

impl SimConfig {
    /// The configuration shipped with the crate.
    pub fn builtin() -> SimConfig {
        SimConfig::parse(DEFAULT_CONFIG).expect("shipped configuration parses")
    }

    /// Parses a complete configuration; every key must be present.
    pub fn parse(text: &str) -> Result<SimConfig, ConfigError> {
        let ini = Ini::parse(text)?;
        let mut c = skeleton();
        c.apply(&ini)?;
        let mut missing = Vec::new();
        for (s, k, _, _) in numeric_fields(&mut c.clone()) {
            if ini.get(s, k).is_none() {
                missing.push(format!("[{s}] {k}"));
            }
        }
        for (s, k) in BOOL_KEYS.iter().chain(OPTIONAL_KEYS.iter()) {
            if ini.get(s, k).is_none() {
                missing.push(format!("[{s}] {k}"));
            }
        }
        for k in ["alpha", "beta", "gamma"] {
            if ini.get("flight_model", k).is_none() {
                missing.push(format!("[flight_model] {k}"));
            }
        }
        if !missing.is_empty() {
            return Err(ConfigError::Invalid(format!("missing keys: {}", missing.join(", "))));
        }
        c.validate()?;
        Ok(c)
    }

    /// Overlays the recognised sections of `ini`; sections listed in `skip`
    /// are left for the caller.
    pub fn apply_overlay(&mut self, ini: &Ini, skip: &[&str]) -> Result<(), ConfigError> {
        let mut filtered = ini.clone();
        for s in skip {
            filtered.sections.remove(*s);
        }
        filtered.order.retain(|(s, _)| !skip.contains(&s.as_str()));
        self.apply(&filtered)?;
        self.validate()
    }

    fn apply(&mut self, ini: &Ini) -> Result<(), ConfigError> {
        for (sec, key, raw) in ini.entries() {
            if let Some((_, _, slot, unit)) = numeric_fields(self)
                .into_iter()
                .find(|(s, k, _, _)| *s == sec && *k == key)
            {
                let v = parse_f64(raw, sec, key)?;
                *slot = if unit == Unit::Deg { v.to_radians() } else { v };
                continue;
            }
            let flag = || match raw {
                "true" | "on" | "yes" => Ok(true),
                "false" | "off" | "no" => Ok(false),
                _ => Err(value_err(sec, key, "expected true or false")),
            };
            match (sec, key) {
                ("control", "fins_enabled") => self.control.fins_enabled = flag()?,
                ("control", "roll_compensation") => self.control.roll_compensation = flag()?,
                ("safety", "safety_enabled") => self.envelope.safety_enabled = flag()?,
                ("navigation", "online_identification") => self.nav.online_identification = flag()?,
                ("control", "speed_units") => {
                    self.control.speed_units = match raw.split_once(':') {
                        Some(("mps", k)) => SpeedUnits::MetersPerSecond {
                            pct_per_mps: parse_f64(k.trim(), sec, key)?,
                        },
                        None if raw == "pct" => SpeedUnits::ThrustPercent,
                        _ => return Err(value_err(sec, key, "expected pct or mps:<pct per m/s>")),
                    }
                }
                ("environment", "roll_hold_deg") => {
                    self.env.roll_hold = match raw {
                        "none" => None,
                        v => Some(parse_f64(v, sec, key)?.to_radians()),
                    }
                }
                ("environment", "ice_drift") => self.env.ice_drift = parse_pair(raw, sec, key)?,
                ("health", "leak") => {
                    self.health.leak = parse_pair(raw, sec, key)?.map(|(start, rate)| LeakInjection { start, rate })
                }
                ("flight_model", "alpha") => self.flight_model.0 = parse_list(raw, sec, key)?,
                ("flight_model", "beta") => self.flight_model.1 = parse_list(raw, sec, key)?,
                ("flight_model", "gamma") => self.flight_model.2 = parse_list(raw, sec, key)?,
                _ => return Err(value_err(sec, key, "unknown key")),
            }
        }
        self.nav.ice_drift = self.env.ice_drift;
        self.nav.dvl.mount = (0.0, 0.0, self.sensors.dvl_mount_yaw);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |m: String| Err(ConfigError::Invalid(m));
        if let Err(e) = self.plant.hydro.validate() {
            return inv(format!("hydro: {e}"));
        }
        if self.plant.rudder.kind != AppendageKind::Rudder || self.plant.fin.kind != AppendageKind::Fin {
            return inv("appendage kinds".into());
        }
        let positive = [
            ("surge.mass", self.plant.surge.mass),
            ("surge.k_drag", self.plant.surge.k_drag),
            ("pitch.tau", self.plant.pitch.tau),
            ("roll.tau", self.plant.roll.tau),
            ("roll.thrust_ref_pct", self.plant.roll.thrust_ref_pct),
            ("limits.deploy_time", self.plant.limits.deploy_time),
            ("limits.slew_rate", self.plant.limits.slew_rate),
        ];
        for (k, v) in positive {
            if v <= 0.0 {
                return inv(format!("{k} must be positive"));
            }
        }
        // surge mass is rigid-body mass plus added mass
        if self.plant.surge.mass < self.plant.hydro.mass {
            return inv("surge.mass must not be below hydro.mass".into());
        }
        if self.plant.surge.turn_coupling < 0.0 {
            return inv("surge.turn_coupling must be non-negative".into());
        }
        for (name, g) in [
            ("heading", self.gains.heading),
            ("depth", self.gains.depth),
            ("pitch", self.gains.pitch),
            ("roll", self.gains.roll),
            ("speed", self.gains.speed),
        ] {
            if !g.is_valid() {
                return inv(format!("gains for {name} loop are invalid"));
            }
        }
        if !(self.nav_lambda > 0.0 && self.nav_lambda <= 1.0) {
            return inv("navigation.lambda must be in (0, 1]".into());
        }
        self.envelope.validate().map_err(ConfigError::Invalid)
    }

    /// Text form accepted by [`SimConfig::parse`].
    pub fn render(&self) -> String {
        let b = |x: bool| if x { "true" } else { "false" }.to_string();
        let pair = |p: Option<(f64, f64)>| p.map_or("none".to_string(), |(a, b)| format!("{a}, {b}"));
        let su = match self.control.speed_units {
            SpeedUnits::ThrustPercent => "pct".to_string(),
            SpeedUnits::MetersPerSecond { pct_per_mps } => format!("mps:{pct_per_mps}"),
        };
        let (a, be, g) = &self.flight_model;
        let extras: Vec<(&str, &str, String)> = vec![
            ("environment", "roll_hold_deg", self.env.roll_hold.map_or("none".to_string(), |r| tidy_deg(r).to_string())),
            ("environment", "ice_drift", pair(self.env.ice_drift)),
            ("health", "leak", pair(self.health.leak.map(|l| (l.start, l.rate)))),
            ("navigation", "online_identification", b(self.nav.online_identification)),
            ("flight_model", "alpha", fmt_list(a)),
            ("flight_model", "beta", fmt_list(be)),
            ("flight_model", "gamma", fmt_list(g)),
            ("control", "fins_enabled", b(self.control.fins_enabled)),
            ("control", "roll_compensation", b(self.control.roll_compensation)),
            ("control", "speed_units", su),
            ("safety", "safety_enabled", b(self.envelope.safety_enabled)),
        ];
        let mut c = self.clone();
        let mut lines: Vec<(&str, String)> = numeric_fields(&mut c)
            .into_iter()
            .map(|(s, k, v, unit)| {
                let v = if unit == Unit::Deg { tidy_deg(*v) } else { *v };
                (s, format!("{k} = {v}"))
            })
            .collect();
        for (s, k, v) in extras {
            let line = format!("{k} = {v}");
            match lines.iter().rposition(|(ls, _)| *ls == s) {
                Some(i) => lines.insert(i + 1, (s, line)),
                None => lines.push((s, line)),
            }
        }
        let mut out = String::new();
        let mut last = "";
        for (s, line) in lines {
            if s != last {
                let _ = writeln!(out, "{}[{s}]", if last.is_empty() { "" } else { "\n" });
                last = s;
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Startup self-check of the hydrodynamic configuration at the reference speed:
    /// the bare hull is unstable, the rudder stabilises it and the fin station
    /// lies in the valid window.
    pub fn self_check(&self) -> Result<(), ConfigError> {
        let p = &self.plant;
        let u = p.hydro.u_ref;
        let inv = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if hydromath::is_stable(&p.hydro, u) {
            return inv("bare hull must be directionally unstable");
        }
        match hydromath::with_rudder(&p.hydro, &p.rudder, u) {
            Ok(c) if hydromath::is_stable(&c, u) => {}
            Ok(_) => return inv("rudder does not stabilise the hull"),
            Err(e) => return Err(ConfigError::Invalid(e.to_string())),
        }
        if !hydromath::fin_placement_valid(p.fin.station, &p.hydro, u) {
            return inv("fin station outside the valid window");
        }
        Ok(())
    }
}

fn skeleton() -> SimConfig {
    let app = |kind| Appendage {
        kind,
        lift_per_angle: 0.0,
        station: 0.0,
        geometry: None,
    };
    SimConfig {
        plant: PlantParams {
            hydro: HydroConfig {
                mass: 0.0,
                i_zz: 0.0,
                x_g: 0.0,
                y_vdot: 0.0,
                y_rdot: 0.0,
                n_vdot: 0.0,
                n_rdot: 0.0,
                y_v: 0.0,
                y_r: 0.0,
                n_v: 0.0,
                n_r: 0.0,
                rho: 0.0,
                u_ref: 0.0,
            },
            rudder: app(AppendageKind::Rudder),
            fin: app(AppendageKind::Fin),
            surge: SurgeParams {
                mass: 0.0,
                k_thrust: 0.0,
                k_drag: 0.0,
                turn_coupling: 0.0,
            },
            pitch: PitchParams {
                gain: 0.0,
                tau: 0.0,
                buoyancy_rise: 0.0,
            },
            roll: RollParams {
                tau: 0.0,
                fixed_fin_roll: 0.0,
                diff_gain: 0.0,
                yaw_moment: 0.0,
                thrust_ref_pct: 0.0,
            },
            limits: ActuatorLimits::default(),
        },
        env: Environment::default(),
        sensors: SensorConfig::default(),
        health: HealthParams::default(),
        initial_health: VehicleHealth::default(),
        nav: NavConfig::default(),
        nav_lambda: 1.0,
        flight_model: ([0.0; N_U], [0.0; N_V], [0.0; N_W]),
        gains: GainSet::default(),
        control: ControlConfig::default(),
        envelope: SafetyEnvelope::default(),
        payload_timeout: 5.0,
        initial_depth: 0.0,
        initial_heading_deg: 0.0,
    }
}
