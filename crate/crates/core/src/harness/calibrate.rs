//! Coordinate pattern search of plant coefficients toward the zig-zag turn targets.

use super::compare::run_pair;
use super::config::SimConfig;
use super::scenario::{NavMode, Scenario};
use crate::hydromath;
use serde::{Deserialize, Serialize};

pub const TARGET_RADIUS_NOFIN: f64 = 2.5;
pub const TARGET_RADIUS_FIN: f64 = 1.5;
pub const TARGET_PEAK_RATE: (f64, f64) = (25.0, 35.0);
pub const TARGET_IMPROVEMENT: (f64, f64) = (35.0, 50.0);
/// Analytic steady yaw-rate ratio, fins deployed over rudder only, at equal rudder angle.
pub const TARGET_RATE_RATIO: (f64, f64) = (1.35, 1.50);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Achieved {
    pub radius_nofin: Option<f64>,
    pub radius_fin: Option<f64>,
    pub peak_rate_fin: Option<f64>,
    pub improvement_pct: Option<f64>,
    pub analytic_rate_ratio: Option<f64>,
    /// Turns in either run without a circle fit or flown the wrong way round.
    pub bad_turns: usize,
    pub loss: f64,
}

/// Searched coefficient, addressed by its config section and key.
#[derive(Debug, Clone, Copy)]
struct Knob {
    name: &'static str,
    get: fn(&SimConfig) -> f64,
    set: fn(&mut SimConfig, f64),
}

const KNOBS: [Knob; 10] = [
    Knob {
        name: "hydro.y_v",
        get: |c| c.plant.hydro.y_v,
        set: |c, v| c.plant.hydro.y_v = v,
    },
    Knob {
        name: "hydro.n_v",
        get: |c| c.plant.hydro.n_v,
        set: |c, v| c.plant.hydro.n_v = v,
    },
    Knob {
        name: "hydro.n_r",
        get: |c| c.plant.hydro.n_r,
        set: |c, v| c.plant.hydro.n_r = v,
    },
    Knob {
        name: "rudder.lift_per_angle",
        get: |c| c.plant.rudder.lift_per_angle,
        set: |c, v| c.plant.rudder.lift_per_angle = v,
    },
    Knob {
        name: "rudder.station",
        get: |c| c.plant.rudder.station,
        set: |c, v| c.plant.rudder.station = v,
    },
    Knob {
        name: "fin.lift_per_angle",
        get: |c| c.plant.fin.lift_per_angle,
        set: |c, v| c.plant.fin.lift_per_angle = v,
    },
    Knob {
        name: "fin.station",
        get: |c| c.plant.fin.station,
        set: |c, v| c.plant.fin.station = v,
    },
    Knob {
        name: "surge.turn_coupling",
        get: |c| c.plant.surge.turn_coupling,
        set: |c, v| c.plant.surge.turn_coupling = v,
    },
    Knob {
        name: "surge.mass",
        get: |c| c.plant.surge.mass,
        set: |c, v| c.plant.surge.mass = v,
    },
    // thrust and drag move together so the cruise speed at a given thrust is kept
    Knob {
        name: "surge.k_drag",
        get: |c| c.plant.surge.k_drag,
        set: |c, v| {
            c.plant.surge.k_thrust *= v / c.plant.surge.k_drag;
            c.plant.surge.k_drag = v;
        },
    },
];

/// Band violations are penalised as if this many units were a 100% radius error.
const BAND_SCALE: f64 = 10.0;

fn band_err(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        0.0
    }
}

/// Squared normalised distance to the targets; infinite when a metric is missing.
pub fn loss(a: &Achieved) -> f64 {
    let (Some(rn), Some(rf), Some(pk), Some(im), Some(q)) = (
        a.radius_nofin,
        a.radius_fin,
        a.peak_rate_fin,
        a.improvement_pct,
        a.analytic_rate_ratio,
    ) else {
        return f64::INFINITY;
    };
    ((rn - TARGET_RADIUS_NOFIN) / TARGET_RADIUS_NOFIN).powi(2)
        + ((rf - TARGET_RADIUS_FIN) / TARGET_RADIUS_FIN).powi(2)
        + (band_err(pk, TARGET_PEAK_RATE) / BAND_SCALE).powi(2)
        + (band_err(im, TARGET_IMPROVEMENT) / BAND_SCALE).powi(2)
        + (band_err(q * 100.0, (TARGET_RATE_RATIO.0 * 100.0, TARGET_RATE_RATIO.1 * 100.0)) / BAND_SCALE).powi(2)
        + a.bad_turns as f64
}

/// `r(fin)/r(rudder only)` from the linear theory at the reference speed.
pub fn analytic_rate_ratio(cfg: &SimConfig) -> Option<f64> {
    let p = &cfg.plant;
    let u = p.hydro.u_ref;
    let r0 = hydromath::steady_yaw_rate(&p.hydro, &p.rudder, None, 1.0, u).ok()?;
    let r1 = hydromath::steady_yaw_rate(&p.hydro, &p.rudder, Some(&p.fin), 1.0, u).ok()?;
    (r0 != 0.0).then(|| r1 / r0)
}

/// Flies the builtin zig-zag pair on `cfg` with truth feedback.
pub fn evaluate(cfg: &SimConfig) -> Achieved {
    if cfg.validate().is_err() || cfg.self_check().is_err() {
        return Achieved {
            loss: f64::INFINITY,
            ..Default::default()
        };
    }
    let mut s = Scenario::builtin("zigzag").expect("builtin scenario");
    let end = s.config.envelope.mission_end_time;
    s.config = cfg.clone();
    s.config.envelope.mission_end_time = end;
    s.nav = NavMode::Truth;
    let Ok(p) = run_pair(&s) else {
        return Achieved {
            loss: f64::INFINITY,
            ..Default::default()
        };
    };
    let c = p.comparison;
    let bad_turns = [&p.fin.0, &p.nofin.0]
        .iter()
        .flat_map(|r| &r.metrics.turns)
        .filter(|t| t.fit.is_none_or(|f| f.rate_deg_s * t.commanded_deg <= 0.0))
        .count();
    let mut a = Achieved {
        bad_turns,
        radius_nofin: c.radius_nofin,
        radius_fin: c.radius_fin,
        peak_rate_fin: c.peak_rate_fin,
        improvement_pct: c.improvement_pct,
        analytic_rate_ratio: analytic_rate_ratio(cfg),
        loss: 0.0,
    };
    a.loss = loss(&a);
    a
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub config: SimConfig,
    pub achieved: Achieved,
}

#[derive(Debug, thiserror::Error)]
pub enum CalibrateError {
    #[error("no feasible configuration near the start point; nearest: {0}")]
    Infeasible(String),
}

/// Pattern search from the builtin config. Each sweep tries every knob scaled
/// by `1 ± step` in parallel, keeps the best improvement, and halves the step
/// when nothing improves; a collapsed step restarts coarse.
pub fn calibrate(iterations: usize) -> Result<Calibration, CalibrateError> {
    let mut best = SimConfig::builtin();
    let mut best_a = evaluate(&best);
    if !best_a.loss.is_finite() {
        let why = best.self_check().err().map_or("metrics missing".to_string(), |e| e.to_string());
        return Err(CalibrateError::Infeasible(why));
    }
    let mut step = 0.2;
    for it in 0..iterations {
        let candidates: Vec<SimConfig> = KNOBS
            .iter()
            .flat_map(|k| [1.0 + step, 1.0 - step].map(|f| (k, f)))
            .map(|(k, f)| {
                let mut c = best.clone();
                (k.set)(&mut c, (k.get)(&best) * f);
                c
            })
            .collect();
        let scored = crate::par::map(&candidates, evaluate);
        let (i, a) = scored
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.loss.total_cmp(&y.1.loss))
            .expect("non-empty candidate set");
        if a.loss < best_a.loss {
            log::info!("sweep {it}: {} x{:.3} -> loss {:.5}", KNOBS[i / 2].name, if i % 2 == 0 { 1.0 + step } else { 1.0 - step }, a.loss);
            best = candidates[i].clone();
            best_a = *a;
        } else {
            step /= 2.0;
            log::info!("sweep {it}: no improvement, step {step:.4}");
            if step < 1e-3 {
                // restart from the current optimum with a coarse step
                step = 0.2;
            }
        }
    }
    Ok(Calibration {
        config: best,
        achieved: best_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_is_zero_inside_targets() {
        let a = Achieved {
            radius_nofin: Some(2.5),
            radius_fin: Some(1.5),
            peak_rate_fin: Some(30.0),
            improvement_pct: Some(40.0),
            analytic_rate_ratio: Some(1.4),
            bad_turns: 0,
            loss: 0.0,
        };
        assert_eq!(loss(&a), 0.0);
        assert!(loss(&Achieved::default()).is_infinite());
        let off = Achieved {
            peak_rate_fin: Some(45.0),
            ..a
        };
        assert!((loss(&off) - (10.0f64 / BAND_SCALE).powi(2)).abs() < 1e-12);
    }
}
