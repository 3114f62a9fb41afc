//! One CSV row per tick; angles in degrees.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA_LINE: &str = "#schema=1";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TelemetryRow {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p_deg: f64,
    pub q_deg: f64,
    pub r_deg: f64,
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub psi_deg: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub speed: f64,
    pub nav_x: f64,
    pub nav_y: f64,
    pub nav_z: f64,
    pub nav_vn: f64,
    pub nav_ve: f64,
    pub nav_vd: f64,
    pub nav_phi_deg: f64,
    pub nav_theta_deg: f64,
    pub nav_psi_deg: f64,
    pub des_heading_deg: f64,
    pub des_speed: f64,
    pub des_depth: f64,
    pub psi_corr_deg: f64,
    pub theta_corr_deg: f64,
    pub phi_corr_deg: f64,
    pub speed_corr: f64,
    pub uppr_deg: f64,
    pub lowr_deg: f64,
    pub port_deg: f64,
    pub stbd_deg: f64,
    pub fin_deploy: f64,
    pub fin_angle_deg: f64,
    pub thrust_pct: f64,
    pub rpm: f64,
    pub mode: String,
    /// `;`-separated events raised on this tick.
    pub events: String,
}

pub const COLUMNS: usize = 40;

#[derive(Debug, thiserror::Error)]
pub enum TelemetryError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("telemetry schema mismatch: expected {SCHEMA_LINE}, found {0:?}")]
    Schema(String),
}

pub fn write_csv<W: Write>(mut w: W, rows: &[TelemetryRow]) -> Result<(), TelemetryError> {
    writeln!(w, "{SCHEMA_LINE}")?;
    let mut cw = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    cw.write_record(header())?;
    for r in rows {
        cw.serialize(r)?;
    }
    cw.flush()?;
    Ok(())
}

/// Column names in order.
pub fn header() -> Vec<&'static str> {
    vec![
        "t",
        "u",
        "v",
        "w",
        "p_deg",
        "q_deg",
        "r_deg",
        "phi_deg",
        "theta_deg",
        "psi_deg",
        "x",
        "y",
        "z",
        "speed",
        "nav_x",
        "nav_y",
        "nav_z",
        "nav_vn",
        "nav_ve",
        "nav_vd",
        "nav_phi_deg",
        "nav_theta_deg",
        "nav_psi_deg",
        "des_heading_deg",
        "des_speed",
        "des_depth",
        "psi_corr_deg",
        "theta_corr_deg",
        "phi_corr_deg",
        "speed_corr",
        "uppr_deg",
        "lowr_deg",
        "port_deg",
        "stbd_deg",
        "fin_deploy",
        "fin_angle_deg",
        "thrust_pct",
        "rpm",
        "mode",
        "events",
    ]
}

pub fn read_csv<R: BufRead>(mut r: R) -> Result<Vec<TelemetryRow>, TelemetryError> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(TelemetryError::Schema(first.trim_end().to_string()));
    }
    let mut cr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let h: Vec<String> = cr.headers()?.iter().map(str::to_string).collect();
    if h != header() {
        return Err(TelemetryError::Schema(h.join(",")));
    }
    Ok(cr.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_fields_and_round_trips() {
        assert_eq!(header().len(), COLUMNS);
        let rows = vec![
            TelemetryRow {
                t: 0.05,
                psi_deg: 1.0 / 3.0,
                mode: "MISSION_ACTIVE".into(),
                events: "LED3;FIN_DEPLOY".into(),
                ..Default::default()
            },
            TelemetryRow {
                t: 0.1,
                x: -1e-17,
                ..Default::default()
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#schema=1\nt,u,v,w,"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn schema_mismatch_is_reported() {
        assert!(matches!(read_csv(&b"t,u\n"[..]), Err(TelemetryError::Schema(_))));
    }
}
