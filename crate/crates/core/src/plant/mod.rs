//! Truth-side vehicle simulation: sway/yaw dynamics with appendage forcing,
//! auxiliary surge/pitch/roll channels, actuators, sensors and vehicle health.

mod actuators;
mod health;
mod sensors;

pub use actuators::{actuator_dynamics, ActuatorLimits, ActuatorSet};
pub use health::{health_step, HealthParams, LeakInjection, VehicleHealth};
pub use sensors::{NoiseSigmas, SensorConfig, Sensors};

use crate::angle::wrap_pi;
use crate::hydromath::{self, Appendage, HydroConfig};
use nalgebra::{Matrix2, SVector, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("sway/yaw mass matrix is singular (det = {0})")]
    SingularMass(f64),
    #[error("time step {0} outside (0, 0.1] s")]
    BadStep(f64),
    #[error("integration produced a non-finite state: {0:?}")]
    Diverged(Box<BodyState>),
    #[error(transparent)]
    Hydro(#[from] hydromath::HydroError),
}

/// Body and local-frame vehicle state. `x` north, `y` east, `z` depth.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyState {
    pub u: f64,
    pub v: f64,
    /// Heave is kinematic only and stays zero.
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Forward speed, mirrors `u`.
    pub speed: f64,
}

impl BodyState {
    pub fn at_rest(z: f64, psi: f64) -> Self {
        BodyState {
            z: z.max(0.0),
            psi: wrap_pi(psi),
            ..Default::default()
        }
    }

    pub fn cruising(u: f64, z: f64, psi: f64) -> Self {
        BodyState {
            u,
            speed: u,
            ..Self::at_rest(z, psi)
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.u, self.v, self.w, self.p, self.q, self.r, self.phi, self.theta, self.psi,
            self.x, self.y, self.z,
        ]
        .iter()
        .all(|c| c.is_finite())
    }
}

/// Water and disturbance environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub current_n: f64,
    pub current_e: f64,
    pub water_density: f64,
    /// Steady roll the propeller reaction torque would produce at reference thrust (rad).
    pub prop_torque_roll: f64,
    pub lbl_latency: f64,
    pub noise: NoiseSigmas,
    /// Moving ice sheet seen by an upward-looking DVL (m/s, north/east).
    pub ice_drift: Option<(f64, f64)>,
    /// Imposed roll angle overriding the roll channel (rad).
    pub roll_hold: Option<f64>,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            current_n: 0.0,
            current_e: 0.0,
            water_density: 1000.0,
            prop_torque_roll: 0.0,
            lbl_latency: 0.0,
            noise: NoiseSigmas::default(),
            ice_drift: None,
            roll_hold: None,
        }
    }
}

/// Surge channel: `m_s du/dt = k_t T - k_d u + c_vr v r u/u_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurgeParams {
    pub mass: f64,
    /// N per thrust percent.
    pub k_thrust: f64,
    pub k_drag: f64,
    pub turn_coupling: f64,
}

/// Pitch follows the net elevator with a first-order lag; authority scales with `(u/u_ref)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchParams {
    pub gain: f64,
    pub tau: f64,
    /// Rise rate from residual positive buoyancy (m/s).
    pub buoyancy_rise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollParams {
    pub tau: f64,
    /// Counter-roll of the fixed canted tail fins at reference speed (rad).
    pub fixed_fin_roll: f64,
    /// Roll per radian of differential surface deflection at reference speed.
    pub diff_gain: f64,
    /// Yaw moment per radian of roll (N m/rad).
    pub yaw_moment: f64,
    /// Thrust percent at which `prop_torque_roll` is quoted.
    pub thrust_ref_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    pub hydro: HydroConfig,
    pub rudder: Appendage,
    pub fin: Appendage,
    pub surge: SurgeParams,
    pub pitch: PitchParams,
    pub roll: RollParams,
    pub limits: ActuatorLimits,
}

impl PlantParams {
    fn mass_matrix(&self) -> Result<Matrix2<f64>, PlantError> {
        let h = &self.hydro;
        let m = Matrix2::new(
            h.mass - h.y_vdot,
            h.mass * h.x_g - h.y_rdot,
            h.mass * h.x_g - h.n_vdot,
            h.i_zz - h.n_rdot,
        );
        let det = m.determinant();
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(PlantError::SingularMass(det));
        }
        Ok(m)
    }

    /// Composed coefficients at forward speed `u` with the given fin deployment.
    pub fn composed_at(&self, u: f64, deploy: f64) -> Result<HydroConfig, PlantError> {
        let bare = self.hydro.at_speed(u);
        if u <= 1e-9 {
            return Ok(bare);
        }
        let uref = self.hydro.u_ref;
        let c = hydromath::with_rudder(&bare, &self.rudder.at_speed(u, uref), u)?;
        Ok(hydromath::with_fin(
            &c,
            &self.fin.at_speed(u, uref),
            deploy.clamp(0.0, 1.0),
            u,
        )?)
    }
}

/// Surface deflections resolved into the vehicle's horizontal and vertical planes.
pub fn effective_deflections(act: &ActuatorSet, phi: f64) -> (f64, f64, f64) {
    let rud = 0.5 * (act.uppr_rudd + act.lowr_rudd);
    let elev = 0.5 * (act.port_elev + act.stbd_elev);
    let (s, c) = phi.sin_cos();
    let yaw = rud * c + elev * s;
    let pitch = -rud * s + elev * c;
    let roll = 0.25 * ((act.uppr_rudd - act.lowr_rudd) + (act.stbd_elev - act.port_elev));
    (yaw, pitch, roll)
}

type X = SVector<f64, 9>;
const IU: usize = 0;
const IV: usize = 1;
const IR: usize = 2;
const IPHI: usize = 3;
const ITH: usize = 4;
const IPSI: usize = 5;
const IX: usize = 6;
const IY: usize = 7;
const IZ: usize = 8;

/// Fixed-step RK4 vehicle model.
#[derive(Debug, Clone)]
pub struct Plant {
    pub params: PlantParams,
    m_inv: Matrix2<f64>,
}

impl Plant {
    pub fn new(params: PlantParams) -> Result<Self, PlantError> {
        params
            .hydro
            .validate()
            .map_err(PlantError::Hydro)?;
        let m_inv = params
            .mass_matrix()?
            .try_inverse()
            .ok_or(PlantError::SingularMass(0.0))?;
        Ok(Plant { params, m_inv })
    }

    fn deriv(&self, x: &X, act: &ActuatorSet, env: &Environment) -> Result<X, PlantError> {
        let p = &self.params;
        let h = &p.hydro;
        let u = x[IU].max(0.0);
        let (v, r, phi, th, psi) = (x[IV], x[IR], x[IPHI], x[ITH], x[IPSI]);
        let s2 = (u / h.u_ref).powi(2);
        let c = p.composed_at(u, act.fin_deploy)?;
        let (d_yaw, d_pitch, d_roll) = effective_deflections(act, phi);
        let lr = p.rudder.lift_per_angle * s2;
        let lf = p.fin.lift_per_angle * s2 * act.fin_deploy;
        let fy = c.y_v * v + (c.y_r - h.mass * u) * r + lr * d_yaw + lf * act.fin_angle;
        let nz = c.n_v * v
            + (c.n_r - h.mass * h.x_g * u) * r
            + p.rudder.station * lr * d_yaw
            + p.fin.station * lf * act.fin_angle
            + p.roll.yaw_moment * phi;
        let acc = self.m_inv * Vector2::new(fy, nz);

        let sv = &p.surge;
        let du = (sv.k_thrust * act.thrust_pct - sv.k_drag * u + sv.turn_coupling * v * r * u / h.u_ref) / sv.mass;
        let dth = (p.pitch.gain * d_pitch * s2 - th) / p.pitch.tau;
        let dphi = match env.roll_hold {
            Some(_) => 0.0,
            None => {
                let bias = env.prop_torque_roll * act.thrust_pct / p.roll.thrust_ref_pct
                    - p.roll.fixed_fin_roll * s2;
                (bias + p.roll.diff_gain * d_roll * s2 - phi) / p.roll.tau
            }
        };
        let (sp, cp) = psi.sin_cos();
        let ct = th.cos();
        let mut d = X::zeros();
        d[IU] = du;
        d[IV] = acc[0];
        d[IR] = acc[1];
        d[IPHI] = dphi;
        d[ITH] = dth;
        d[IPSI] = r;
        d[IX] = u * ct * cp - v * sp + env.current_n;
        d[IY] = u * ct * sp + v * cp + env.current_e;
        d[IZ] = -u * th.sin() - p.pitch.buoyancy_rise;
        Ok(d)
    }

    /// Advances the state by `dt` with actuators held constant.
    pub fn step(
        &self,
        s: &BodyState,
        act: &ActuatorSet,
        env: &Environment,
        dt: f64,
    ) -> Result<BodyState, PlantError> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(PlantError::BadStep(dt));
        }
        let mut x0 = X::from_column_slice(&[s.u, s.v, s.r, s.phi, s.theta, s.psi, s.x, s.y, s.z]);
        if let Some(hold) = env.roll_hold {
            x0[IPHI] = hold;
        }
        let k1 = self.deriv(&x0, act, env)?;
        let k2 = self.deriv(&(x0 + k1 * (0.5 * dt)), act, env)?;
        let k3 = self.deriv(&(x0 + k2 * (0.5 * dt)), act, env)?;
        let k4 = self.deriv(&(x0 + k3 * dt), act, env)?;
        let x1 = x0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let out = BodyState {
            u: x1[IU],
            v: x1[IV],
            w: 0.0,
            p: (x1[IPHI] - x0[IPHI]) / dt,
            q: (x1[ITH] - x0[ITH]) / dt,
            r: x1[IR],
            phi: wrap_pi(x1[IPHI]),
            theta: wrap_pi(x1[ITH]),
            psi: wrap_pi(x1[IPSI]),
            x: x1[IX],
            y: x1[IY],
            z: x1[IZ].max(0.0),
            speed: x1[IU],
        };
        if !out.is_finite() {
            return Err(PlantError::Diverged(Box::new(out)));
        }
        Ok(out)
    }

    /// Earth-frame velocity (north, east, down) of the vehicle.
    pub fn earth_velocity(&self, s: &BodyState, env: &Environment) -> [f64; 3] {
        let (sp, cp) = s.psi.sin_cos();
        let ct = s.theta.cos();
        let up = if s.z <= 0.0 && s.theta > 0.0 { 0.0 } else { 1.0 };
        [
            s.u * ct * cp - s.v * sp + env.current_n,
            s.u * ct * sp + s.v * cp + env.current_e,
            up * (-s.u * s.theta.sin() - self.params.pitch.buoyancy_rise),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydromath::AppendageKind;

    pub(crate) fn params() -> PlantParams {
        PlantParams {
            hydro: HydroConfig {
                mass: 14.0,
                i_zz: 1.7,
                x_g: 0.0,
                y_vdot: -13.0,
                y_rdot: 0.0,
                n_vdot: 0.0,
                n_rdot: -1.0,
                y_v: -20.0,
                y_r: 3.4,
                n_v: -7.9,
                n_r: -2.4,
                rho: 1000.0,
                u_ref: 1.5,
            },
            rudder: Appendage {
                kind: AppendageKind::Rudder,
                lift_per_angle: -17.6,
                station: -0.462,
                geometry: None,
            },
            fin: Appendage {
                kind: AppendageKind::Fin,
                lift_per_angle: -16.0,
                station: 0.344,
                geometry: None,
            },
            surge: SurgeParams {
                mass: 14.7,
                k_thrust: 0.0275,
                k_drag: 1.1,
                turn_coupling: 25.0,
            },
            pitch: PitchParams {
                gain: 1.0,
                tau: 1.0,
                buoyancy_rise: 0.0,
            },
            roll: RollParams {
                tau: 0.5,
                fixed_fin_roll: 0.0,
                diff_gain: 2.0,
                yaw_moment: 0.0,
                thrust_ref_pct: 60.0,
            },
            limits: ActuatorLimits::default(),
        }
    }

    fn hold(plant: &Plant, s0: BodyState, act: &ActuatorSet, env: &Environment, secs: f64) -> BodyState {
        let mut s = s0;
        for _ in 0..(secs / 0.05).round() as usize {
            s = plant.step(&s, act, env, 0.05).unwrap();
        }
        s
    }

    #[test]
    fn zero_forcing_keeps_straight_track() {
        let plant = Plant::new(params()).unwrap();
        let act = ActuatorSet {
            thrust_pct: 60.0,
            ..Default::default()
        };
        let s = hold(&plant, BodyState::cruising(1.5, 2.0, 0.3), &act, &Environment::default(), 20.0);
        assert_eq!(s.psi, 0.3);
        assert_eq!(s.v, 0.0);
        assert!((s.y / s.x - 0.3f64.tan()).abs() < 1e-9);
    }

    #[test]
    fn bad_step_and_singular_mass_are_rejected() {
        let plant = Plant::new(params()).unwrap();
        let s = BodyState::default();
        let a = ActuatorSet::default();
        let e = Environment::default();
        assert!(matches!(plant.step(&s, &a, &e, 0.0), Err(PlantError::BadStep(_))));
        assert!(matches!(plant.step(&s, &a, &e, 0.2), Err(PlantError::BadStep(_))));
        let mut p = params();
        p.hydro.y_vdot = p.hydro.mass;
        assert!(matches!(Plant::new(p), Err(PlantError::SingularMass(_))));
    }

    #[test]
    fn effective_deflections_invert_the_roll_mixer() {
        for k in 0..24 {
            let phi = (k as f64 * 15.0 - 180.0).to_radians();
            let (pc, tc, rc) = (0.1, -0.05, 0.02);
            let (s, c) = phi.sin_cos();
            let act = ActuatorSet {
                uppr_rudd: pc * c - tc * s + rc,
                lowr_rudd: pc * c - tc * s - rc,
                port_elev: pc * s + tc * c - rc,
                stbd_elev: pc * s + tc * c + rc,
                ..Default::default()
            };
            let (y, p, r) = effective_deflections(&act, phi);
            assert!((y - pc).abs() < 1e-15 && (p - tc).abs() < 1e-15 && (r - rc).abs() < 1e-15);
        }
    }

    #[test]
    fn depth_never_goes_negative() {
        let plant = Plant::new(params()).unwrap();
        let env = Environment::default();
        let act = ActuatorSet {
            thrust_pct: 60.0,
            port_elev: 0.2,
            stbd_elev: 0.2,
            ..Default::default()
        };
        let s = hold(&plant, BodyState::cruising(1.5, 0.5, 0.0), &act, &env, 10.0);
        assert_eq!(s.z, 0.0);
        assert!(s.theta > 0.0);
    }

    #[test]
    fn roll_bias_settles_to_configured_angle() {
        let plant = Plant::new(params()).unwrap();
        let env = Environment {
            prop_torque_roll: 0.1,
            ..Default::default()
        };
        let act = ActuatorSet {
            thrust_pct: 60.0,
            ..Default::default()
        };
        let s = hold(&plant, BodyState::cruising(1.5, 2.0, 0.0), &act, &env, 10.0);
        assert!((s.phi - 0.1).abs() < 1e-6);
    }
}
