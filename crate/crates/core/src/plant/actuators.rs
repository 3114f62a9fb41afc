use serde::{Deserialize, Serialize};

/// Stern surfaces, forward fin and propulsor. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActuatorSet {
    pub uppr_rudd: f64,
    pub lowr_rudd: f64,
    pub port_elev: f64,
    pub stbd_elev: f64,
    /// 0 = retracted, 1 = fully deployed.
    pub fin_deploy: f64,
    pub fin_angle: f64,
    pub thrust_pct: f64,
    pub rpm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorLimits {
    pub stern_max: f64,
    pub fin_max: f64,
    /// Surface slew rate (rad/s).
    pub slew_rate: f64,
    /// Full deploy or retract time (s).
    pub deploy_time: f64,
    pub rpm_per_pct: f64,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        ActuatorLimits {
            stern_max: 15f64.to_radians(),
            fin_max: 20f64.to_radians(),
            slew_rate: 60f64.to_radians(),
            deploy_time: 1.0,
            rpm_per_pct: 30.0,
        }
    }
}

fn slew(actual: f64, target: f64, max_step: f64) -> f64 {
    actual + (target - actual).clamp(-max_step, max_step)
}

/// Moves the actual actuator set one tick toward the command.
///
/// Fin articulation is only possible at full deployment; otherwise the fin
/// angle is driven back to zero.
pub fn actuator_dynamics(cmd: &ActuatorSet, actual: &ActuatorSet, lim: &ActuatorLimits, dt: f64) -> ActuatorSet {
    let ds = lim.slew_rate * dt;
    let sm = lim.stern_max;
    let surf = |c: f64, a: f64| slew(a, c.clamp(-sm, sm), ds);
    let deploy = slew(
        actual.fin_deploy,
        cmd.fin_deploy.clamp(0.0, 1.0),
        dt / lim.deploy_time,
    );
    let fin_target = if deploy >= 1.0 {
        cmd.fin_angle.clamp(-lim.fin_max, lim.fin_max)
    } else {
        0.0
    };
    let thrust = cmd.thrust_pct.clamp(0.0, 100.0);
    ActuatorSet {
        uppr_rudd: surf(cmd.uppr_rudd, actual.uppr_rudd),
        lowr_rudd: surf(cmd.lowr_rudd, actual.lowr_rudd),
        port_elev: surf(cmd.port_elev, actual.port_elev),
        stbd_elev: surf(cmd.stbd_elev, actual.stbd_elev),
        fin_deploy: deploy,
        fin_angle: slew(actual.fin_angle, fin_target, ds),
        thrust_pct: thrust,
        rpm: thrust * lim.rpm_per_pct,
    }
}
