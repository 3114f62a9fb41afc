use crate::control::GainSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionLeg {
    /// Seconds since mission launch.
    pub start_time: f64,
    pub heading: f64,
    pub speed: f64,
    pub depth: f64,
    pub gain_overrides: BTreeMap<String, f64>,
}

impl MissionLeg {
    pub fn new(start_time: f64, heading: f64, speed: f64, depth: f64) -> Self {
        MissionLeg {
            start_time,
            heading,
            speed,
            depth,
            gain_overrides: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("mission line {line}: {msg}")]
pub struct MissionError {
    pub line: usize,
    pub msg: String,
}

const DIRECTIVE: &str = "ADD_LEG:";

fn is_gain_key(k: &str) -> bool {
    GainSet::default().set(k, 0.0)
}

/// Parses `ADD_LEG:` directives, one per line; `#` starts a comment.
pub fn parse_mission(text: &str) -> Result<Vec<MissionLeg>, MissionError> {
    let mut legs: Vec<MissionLeg> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| MissionError { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_prefix(DIRECTIVE)
            .ok_or_else(|| err(format!("expected {DIRECTIVE} directive")))?;
        let (mut start, mut heading, mut speed, mut depth) = (None, None, None, None);
        let mut gains = BTreeMap::new();
        for pair in body.split(',') {
            let pair = pair.trim();
            if pair.is_empty() {
                continue;
            }
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {pair:?}")))?;
            let k = k.trim();
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("bad number for {k}: {:?}", v.trim())))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite value for {k}")));
            }
            let slot = match k {
                "start_time" => &mut start,
                "heading" => &mut heading,
                "speed" => &mut speed,
                "depth" => &mut depth,
                g if is_gain_key(g) => {
                    gains.insert(g.to_string(), v);
                    continue;
                }
                other => return Err(err(format!("unknown key {other}"))),
            };
            if slot.replace(v).is_some() {
                return Err(err(format!("duplicate key {k}")));
            }
        }
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| err(format!("missing {name}")));
        let leg = MissionLeg {
            start_time: need(start, "start_time")?,
            heading: need(heading, "heading")?,
            speed: need(speed, "speed")?,
            depth: need(depth, "depth")?,
            gain_overrides: gains,
        };
        if let Some(prev) = legs.last() {
            if leg.start_time <= prev.start_time {
                return Err(err(format!(
                    "start_time {} not after previous {}",
                    leg.start_time, prev.start_time
                )));
            }
        }
        legs.push(leg);
    }
    Ok(legs)
}

/// Inverse of [`parse_mission`].
pub fn render(legs: &[MissionLeg]) -> String {
    let mut s = String::new();
    for l in legs {
        let _ = write!(
            s,
            "{DIRECTIVE} start_time={}, heading={}, speed={}, depth={}",
            l.start_time, l.heading, l.speed, l.depth
        );
        for (k, v) in &l.gain_overrides {
            let _ = write!(s, ", {k}={v}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const LISTING: &str = "\
ADD_LEG: start_time=120, heading=180, speed=1.5, depth=1.5
ADD_LEG: start_time=240, heading=250, speed=1.5, depth=2.0
ADD_LEG: start_time=410, heading=250, speed=1.5, depth=2.0, heading_kp=0.8
ADD_LEG: start_time=420, heading=180, speed=1.5, depth=2.0
ADD_LEG: start_time=600, heading=250, speed=1.5, depth=1.5
";

    #[test]
    fn listing_parses() {
        let legs = parse_mission(LISTING).unwrap();
        assert_eq!(legs.len(), 5);
        assert_eq!(legs[0], MissionLeg::new(120.0, 180.0, 1.5, 1.5));
        assert_eq!(legs[2].gain_overrides.get("heading_kp"), Some(&0.8));
        assert_eq!(legs.iter().filter(|l| !l.gain_overrides.is_empty()).count(), 1);
    }

    #[test]
    fn empty_and_comment_only_are_valid() {
        assert!(parse_mission("").unwrap().is_empty());
        assert!(parse_mission("# nothing\n\n").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_mission("# c\nADD_LEG: start_time=1, heading=0, speed=1, depth=1, bogus=2").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_mission("ADD_LEG: start_time=5, heading=0, speed=1, depth=1\nADD_LEG: start_time=5, heading=0, speed=1, depth=1")
            .unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(parse_mission("ADD_LEG: start_time=1, heading=0").unwrap_err().line, 1);
        assert_eq!(parse_mission("LEG: start_time=1").unwrap_err().line, 1);
    }

    #[test]
    fn render_round_trips() {
        let legs = parse_mission(LISTING).unwrap();
        assert_eq!(parse_mission(&render(&legs)).unwrap(), legs);
    }
}
