use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Attitude offsets of the IMU mounting (rad), subtracted from raw readings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImuOffsets {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum OffsetError {
    #[error("offset file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ImuOffsets {
    /// Offsets that make the current raw attitude read as the reference pose
    /// (level, nose north).
    pub fn capture(raw: (f64, f64, f64)) -> Self {
        ImuOffsets {
            phi: raw.0,
            theta: raw.1,
            psi: raw.2,
        }
    }

    pub fn correct(&self, raw: (f64, f64, f64)) -> (f64, f64, f64) {
        (
            raw.0 - self.phi,
            raw.1 - self.theta,
            crate::angle::wrap_pi(raw.2 - self.psi),
        )
    }

    /// `key=value` text, angles in degrees.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in [("phi_deg", self.phi), ("theta_deg", self.theta), ("psi_deg", self.psi)] {
            let _ = writeln!(s, "{k}={}", v.to_degrees());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, OffsetError> {
        let mut o = ImuOffsets::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| OffsetError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| err("bad number"))?;
            match k.trim() {
                "phi_deg" => o.phi = v.to_radians(),
                "theta_deg" => o.theta = v.to_radians(),
                "psi_deg" => o.psi = v.to_radians(),
                other => return Err(err(&format!("unknown key {other}"))),
            }
        }
        Ok(o)
    }

    pub fn save(&self, path: &Path) -> Result<(), OffsetError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    /// Loads offsets; a missing file yields zero offsets and `false`.
    pub fn load(path: &Path) -> Result<(Self, bool), OffsetError> {
        match std::fs::read_to_string(path) {
            Ok(t) => Ok((Self::parse(&t)?, true)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                log::warn!("IMU offset file {} missing, using zero offsets", path.display());
                Ok((ImuOffsets::default(), false))
            }
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_offsets_are_identity() {
        let raw = (0.1, -0.05, 1.0);
        assert_eq!(ImuOffsets::default().correct(raw), raw);
    }

    #[test]
    fn captured_heading_offset_is_subtracted() {
        let o = ImuOffsets::capture((0.0, 0.0, 3f64.to_radians()));
        let (_, _, psi) = o.correct((0.0, 0.0, 10f64.to_radians()));
        assert!((psi - 7f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn file_round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imu_offsets.conf");
        let (o, found) = ImuOffsets::load(&path).unwrap();
        assert!(!found);
        assert_eq!(o, ImuOffsets::default());
        let o = ImuOffsets {
            phi: 0.01,
            theta: -0.02,
            psi: 0.05,
        };
        o.save(&path).unwrap();
        let (back, found) = ImuOffsets::load(&path).unwrap();
        assert!(found);
        assert!((back.phi - o.phi).abs() < 1e-15);
        assert!((back.theta - o.theta).abs() < 1e-15);
        assert!((back.psi - o.psi).abs() < 1e-15);
    }
}
