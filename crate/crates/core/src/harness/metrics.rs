//! Turn and navigation metrics computed from telemetry rows.

use super::telemetry::TelemetryRow;
use crate::angle::wrap_deg;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnFit {
    pub radius: f64,
    pub center: (f64, f64),
    /// Mean yaw rate over the segment (deg/s).
    pub rate_deg_s: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("segment needs at least three points")]
    TooShort,
    #[error("points are collinear")]
    Degenerate,
}

/// Algebraic circle fit followed by one Gauss-Newton step on the geometric residuals.
pub fn fit_circle(xs: &[f64], ys: &[f64]) -> Result<(f64, (f64, f64)), FitError> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(FitError::TooShort);
    }
    // centre the data for conditioning
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let scale = xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx).hypot(y - my))
        .fold(0.0, f64::max);
    if scale <= 0.0 {
        return Err(FitError::Degenerate);
    }
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for i in 0..n {
        let (x, y) = ((xs[i] - mx) / scale, (ys[i] - my) / scale);
        let row = Vector3::new(x, y, 1.0);
        ata += row * row.transpose();
        atb += row * -(x * x + y * y);
    }
    let svd = ata.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * smax {
        return Err(FitError::Degenerate);
    }
    let sol = svd.solve(&atb, 0.0).map_err(|_| FitError::Degenerate)?;
    let (mut cx, mut cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) {
        return Err(FitError::Degenerate);
    }
    let mut r = r2.sqrt();
    if r > 1e4 {
        return Err(FitError::Degenerate);
    }
    // Gauss-Newton on d_i = |p_i - c| - r
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for i in 0..n {
        let (x, y) = ((xs[i] - mx) / scale, (ys[i] - my) / scale);
        let d = (x - cx).hypot(y - cy);
        if d == 0.0 {
            continue;
        }
        let j = Vector3::new(-(x - cx) / d, -(y - cy) / d, -1.0);
        jtj += j * j.transpose();
        jtr += j * (d - r);
    }
    if let Some(step) = jtj.try_inverse().map(|m| m * jtr) {
        if step.iter().all(|s| s.is_finite()) {
            cx -= step[0];
            cy -= step[1];
            r -= step[2];
        }
    }
    Ok((r * scale, (cx * scale + mx, cy * scale + my)))
}

/// Fits a turn from positions and headings (deg) sampled at times `ts`.
pub fn fit_turn(ts: &[f64], xs: &[f64], ys: &[f64], psi_deg: &[f64]) -> Result<TurnFit, FitError> {
    let (radius, center) = fit_circle(xs, ys)?;
    let n = ts.len();
    let swept: f64 = psi_deg.windows(2).map(|w| wrap_deg(w[1] - w[0])).sum();
    let dt = ts[n - 1] - ts[0];
    let rate_deg_s = if dt > 0.0 { swept / dt } else { 0.0 };
    Ok(TurnFit {
        radius,
        center,
        rate_deg_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurnSide {
    Port,
    Starboard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnMetrics {
    pub start_t: f64,
    pub end_t: f64,
    pub side: TurnSide,
    pub commanded_deg: f64,
    /// Absent when the steady part of the turn sweeps less than 90 degrees.
    pub fit: Option<TurnFit>,
    pub peak_rate_deg_s: f64,
    pub fins_deployed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegMetrics {
    pub start_t: f64,
    pub desired_heading_deg: f64,
    /// Time to enter and stay within the settle band (s).
    pub settle_time: Option<f64>,
    pub overshoot_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NavErrorStats {
    pub samples: usize,
    pub mean: f64,
    pub rms: f64,
    pub max: f64,
    pub last: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SideSummary {
    pub turns: usize,
    pub mean_radius: Option<f64>,
    pub mean_peak_rate_deg_s: Option<f64>,
    pub max_peak_rate_deg_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub duration: f64,
    pub ticks: usize,
    pub final_mode: String,
    pub turns: Vec<TurnMetrics>,
    pub legs: Vec<LegMetrics>,
    pub port: SideSummary,
    pub starboard: SideSummary,
    pub all: SideSummary,
    pub nav_error: NavErrorStats,
}

/// Rows whose yaw rate is at least this fraction of the turn's peak form the fitted arc.
pub const ARC_FRACTION: f64 = 0.7;
pub const SETTLE_BAND_DEG: f64 = 5.0;
const MIN_ARC_DEG: f64 = 90.0;

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn summarize<'a>(turns: impl Iterator<Item = &'a TurnMetrics> + Clone) -> SideSummary {
    SideSummary {
        turns: turns.clone().count(),
        mean_radius: mean(turns.clone().filter_map(|t| t.fit.map(|f| f.radius))),
        mean_peak_rate_deg_s: mean(turns.clone().map(|t| t.peak_rate_deg_s)),
        max_peak_rate_deg_s: turns.map(|t| t.peak_rate_deg_s).reduce(f64::max),
    }
}

fn turn_metrics(rows: &[TelemetryRow], commanded: f64) -> TurnMetrics {
    let side = if commanded >= 0.0 { TurnSide::Starboard } else { TurnSide::Port };
    let (pk_i, peak) = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.r_deg.abs()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let thr = ARC_FRACTION * peak;
    let mut lo = pk_i;
    while lo > 0 && rows[lo - 1].r_deg.abs() >= thr {
        lo -= 1;
    }
    let mut hi = pk_i;
    while hi + 1 < rows.len() && rows[hi + 1].r_deg.abs() >= thr {
        hi += 1;
    }
    let arc = &rows[lo..=hi];
    let swept: f64 = arc.windows(2).map(|w| wrap_deg(w[1].psi_deg - w[0].psi_deg)).sum();
    let fit = if swept.abs() >= MIN_ARC_DEG {
        let col = |f: fn(&TelemetryRow) -> f64| arc.iter().map(f).collect::<Vec<_>>();
        fit_turn(&col(|r| r.t), &col(|r| r.x), &col(|r| r.y), &col(|r| r.psi_deg)).ok()
    } else {
        None
    };
    TurnMetrics {
        start_t: rows[0].t,
        end_t: rows[rows.len() - 1].t,
        side,
        commanded_deg: commanded,
        fit,
        peak_rate_deg_s: peak,
        fins_deployed: rows.iter().any(|r| r.fin_deploy >= 1.0),
    }
}

fn leg_metrics(rows: &[TelemetryRow]) -> LegMetrics {
    let des = rows[0].des_heading_deg;
    let start = wrap_deg(rows[0].psi_deg - des);
    let settle_time = rows
        .iter()
        .rposition(|r| wrap_deg(r.psi_deg - des).abs() > SETTLE_BAND_DEG)
        .map_or(Some(0.0), |i| rows.get(i + 1).map(|r| r.t - rows[0].t));
    // overshoot is error past the target on the side opposite the initial error
    let overshoot = rows
        .iter()
        .map(|r| -wrap_deg(r.psi_deg - des) * start.signum())
        .fold(0.0, f64::max);
    LegMetrics {
        start_t: rows[0].t,
        desired_heading_deg: des,
        settle_time,
        overshoot_deg: overshoot,
    }
}

/// Computes all metrics from the persisted rows only.
pub fn compute_metrics(rows: &[TelemetryRow]) -> RunMetrics {
    let mut turns = Vec::new();
    let mut legs = Vec::new();
    let active = |r: &TelemetryRow| r.mode == "MISSION_ACTIVE";
    let mut i = 0;
    while i < rows.len() {
        if !active(&rows[i]) {
            i += 1;
            continue;
        }
        let des = rows[i].des_heading_deg;
        let mut j = i + 1;
        while j < rows.len() && active(&rows[j]) && rows[j].des_heading_deg == des {
            j += 1;
        }
        let seg = &rows[i..j];
        if i > 0 && active(&rows[i - 1]) {
            let commanded = wrap_deg(des - rows[i - 1].des_heading_deg);
            if commanded != 0.0 {
                turns.push(turn_metrics(seg, commanded));
            }
        }
        legs.push(leg_metrics(seg));
        i = j;
    }
    let errs: Vec<f64> = rows.iter().map(|r| (r.nav_x - r.x).hypot(r.nav_y - r.y)).collect();
    let nav_error = if errs.is_empty() {
        NavErrorStats::default()
    } else {
        let n = errs.len() as f64;
        NavErrorStats {
            samples: errs.len(),
            mean: errs.iter().sum::<f64>() / n,
            rms: (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt(),
            max: errs.iter().copied().fold(0.0, f64::max),
            last: errs[errs.len() - 1],
        }
    };
    RunMetrics {
        duration: rows.last().map_or(0.0, |r| r.t),
        ticks: rows.len(),
        final_mode: rows.last().map_or(String::new(), |r| r.mode.clone()),
        port: summarize(turns.iter().filter(|t| t.side == TurnSide::Port)),
        starboard: summarize(turns.iter().filter(|t| t.side == TurnSide::Starboard)),
        all: summarize(turns.iter()),
        turns,
        legs,
        nav_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn arc(r: f64, n: usize, sweep_deg: f64) -> (Vec<f64>, Vec<f64>) {
        (0..n)
            .map(|i| {
                let a = (i as f64 / (n - 1) as f64 * sweep_deg).to_radians();
                (3.0 + r * a.cos(), -2.0 + r * a.sin())
            })
            .unzip()
    }

    #[test]
    fn perfect_circle() {
        let (x, y) = arc(2.5, 60, 180.0);
        let (r, c) = fit_circle(&x, &y).unwrap();
        assert!((r - 2.5).abs() < 1e-6);
        assert!((c.0 - 3.0).abs() < 1e-6 && (c.1 + 2.0).abs() < 1e-6);
    }

    #[test]
    fn straight_line_is_degenerate() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_eq!(fit_circle(&x, &y), Err(FitError::Degenerate));
        assert_eq!(fit_circle(&x[..2], &y[..2]), Err(FitError::TooShort));
    }

    #[test]
    fn noisy_circle_within_two_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let (mut x, mut y) = arc(2.5, 80, 160.0);
            for v in x.iter_mut().chain(y.iter_mut()) {
                *v += noise.sample(&mut rng);
            }
            let (r, _) = fit_circle(&x, &y).unwrap();
            worst = worst.max((r - 2.5).abs() / 2.5);
        }
        assert!(worst < 0.02, "worst relative error {worst}");
    }

    #[test]
    fn turn_rate_is_mean_heading_rate() {
        let (x, y) = arc(2.0, 21, 90.0);
        let ts: Vec<f64> = (0..21).map(|i| i as f64 * 0.25).collect();
        let psi: Vec<f64> = (0..21).map(|i| wrap_deg(170.0 + i as f64 * 4.5)).collect();
        let f = fit_turn(&ts, &x, &y, &psi).unwrap();
        assert!((f.rate_deg_s - 18.0).abs() < 1e-9);
    }

    #[test]
    fn empty_rows_give_empty_metrics() {
        let m = compute_metrics(&[]);
        assert_eq!(m.ticks, 0);
        assert!(m.turns.is_empty() && m.legs.is_empty());
        assert_eq!(m.all.mean_radius, None);
    }
}
