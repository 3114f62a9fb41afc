//! Fins-on versus fins-off comparison of two runs of the same mission.

use super::config::ConfigError;
use super::metrics::{compute_metrics, RunMetrics};
use super::run::{run, RunEnd, RunOptions, RunResult};
use super::scenario::{FinsChoice, NavMode, Scenario};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Everything persisted about one run besides the telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub fins_enabled: bool,
    pub nav: String,
    pub mission: String,
    pub end: String,
    pub metrics: RunMetrics,
}

impl RunReport {
    pub fn new(s: &Scenario, r: &RunResult) -> RunReport {
        RunReport {
            scenario: s.name.clone(),
            seed: s.seed,
            fins_enabled: s.config.control.fins_enabled,
            nav: match s.nav {
                NavMode::Truth => "truth".into(),
                NavMode::Hydroman => "hydroman".into(),
            },
            mission: s.mission_text.clone(),
            end: end_str(&r.end),
            metrics: compute_metrics(&r.rows),
        }
    }
}

pub fn end_str(e: &RunEnd) -> String {
    match e {
        RunEnd::Completed => "completed".into(),
        RunEnd::Safety(r) => format!("safety:{}", r.as_str()),
        RunEnd::Aborted(m) => format!("aborted:{m}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Mean starboard turn radius (m).
    pub radius_fin: Option<f64>,
    pub radius_nofin: Option<f64>,
    pub radius_fin_port: Option<f64>,
    pub radius_nofin_port: Option<f64>,
    /// Largest yaw rate over all turns (deg/s).
    pub peak_rate_fin: Option<f64>,
    pub peak_rate_nofin: Option<f64>,
    /// Relative peak yaw-rate gain of the fin run (%).
    pub improvement_pct: Option<f64>,
    pub radius_reduction_pct: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CompareError {
    #[error("runs flew different missions")]
    MissionMismatch,
    #[error("both runs have fins {0}")]
    SameFins(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// `fin` and `nofin` must come from the same mission.
pub fn compare(fin: &RunReport, nofin: &RunReport) -> Result<Comparison, CompareError> {
    if fin.mission != nofin.mission {
        return Err(CompareError::MissionMismatch);
    }
    if fin.fins_enabled == nofin.fins_enabled {
        return Err(CompareError::SameFins(if fin.fins_enabled { "on" } else { "off" }));
    }
    let (f, n) = (&fin.metrics, &nofin.metrics);
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some((a / b - 1.0) * 100.0),
        _ => None,
    };
    let peak_rate_fin = f.all.max_peak_rate_deg_s;
    let peak_rate_nofin = n.all.max_peak_rate_deg_s;
    Ok(Comparison {
        radius_fin: f.starboard.mean_radius,
        radius_nofin: n.starboard.mean_radius,
        radius_fin_port: f.port.mean_radius,
        radius_nofin_port: n.port.mean_radius,
        peak_rate_fin,
        peak_rate_nofin,
        improvement_pct: ratio(peak_rate_fin, peak_rate_nofin),
        radius_reduction_pct: ratio(f.starboard.mean_radius, n.starboard.mean_radius).map(|p| -p),
    })
}

pub struct PairResult {
    pub fin: (RunReport, RunResult),
    pub nofin: (RunReport, RunResult),
    pub comparison: Comparison,
}

/// Runs the scenario with fins on and off, in parallel when available.
pub fn run_pair(s: &Scenario) -> Result<PairResult, CompareError> {
    let variants = [s.clone().with_fins(FinsChoice::On), s.clone().with_fins(FinsChoice::Off)];
    let mut out = crate::par::map(&variants, |v| {
        run(v, RunOptions::default()).map(|r| (RunReport::new(v, &r), r))
    })
    .into_iter();
    let fin = out.next().expect("two variants")?;
    let nofin = out.next().expect("two variants")?;
    let comparison = compare(&fin.0, &nofin.0)?;
    Ok(PairResult { fin, nofin, comparison })
}

fn cell(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.3}"))
}

/// Plain-text table of the comparison.
pub fn render_table(c: &Comparison) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28}{:>12}{:>12}", "metric", "fins", "no fins");
    let rows = [
        ("turn radius stbd (m)", c.radius_fin, c.radius_nofin),
        ("turn radius port (m)", c.radius_fin_port, c.radius_nofin_port),
        ("peak yaw rate (deg/s)", c.peak_rate_fin, c.peak_rate_nofin),
    ];
    for (name, a, b) in rows {
        let _ = writeln!(s, "{name:<28}{:>12}{:>12}", cell(a), cell(b));
    }
    let _ = writeln!(s, "{:<28}{:>12}", "yaw rate improvement (%)", cell(c.improvement_pct));
    let _ = writeln!(s, "{:<28}{:>12}", "radius reduction (%)", cell(c.radius_reduction_pct));
    s
}
