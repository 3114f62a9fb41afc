//! Scenario files: a `[scenario]` section plus config overlay sections.

use super::config::{ConfigError, Ini, SimConfig};
use crate::helm::{parse_mission, MissionLeg};
use std::path::{Path, PathBuf};

pub const ZIGZAG_MISSION: &str = include_str!("../../assets/zigzag.mission");
pub const ZIGZAG_SCENARIO: &str = include_str!("../../assets/zigzag.scenario");

/// Control-loop period (s).
pub const TICK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavMode {
    /// Controller is fed the true state.
    Truth,
    /// Controller is fed the fused navigation solution.
    Hydroman,
}

impl std::str::FromStr for NavMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "truth" => Ok(NavMode::Truth),
            "hydroman" => Ok(NavMode::Hydroman),
            _ => Err(format!("unknown nav mode {s:?}, expected truth or hydroman")),
        }
    }
}

/// Fin selection from the command line; `Auto` keeps the scenario value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinsChoice {
    On,
    Off,
    Auto,
}

impl std::str::FromStr for FinsChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "on" => Ok(FinsChoice::On),
            "off" => Ok(FinsChoice::Off),
            "auto" => Ok(FinsChoice::Auto),
            _ => Err(format!("unknown fins choice {s:?}, expected on, off or auto")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub config: SimConfig,
    pub mission: Vec<MissionLeg>,
    /// Mission text as loaded, used to check that compared runs flew the same plan.
    pub mission_text: String,
    pub seed: u64,
    pub duration: f64,
    pub nav: NavMode,
}

const KEYS: [&str; 7] = ["name", "config", "mission", "fins", "seed", "duration", "nav"];

fn resolve(base: Option<&Path>, p: &str) -> PathBuf {
    match base {
        Some(b) if Path::new(p).is_relative() => b.join(p),
        _ => PathBuf::from(p),
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))
}

impl Scenario {
    pub fn builtin(name: &str) -> Result<Scenario, ConfigError> {
        match name {
            "zigzag" => Scenario::parse(ZIGZAG_SCENARIO, None),
            _ => Err(ConfigError::Invalid(format!("no builtin scenario {name:?}"))),
        }
    }

    /// Loads `builtin:<name>` or a file path.
    pub fn load(spec: &str) -> Result<Scenario, ConfigError> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            return Scenario::builtin(name);
        }
        let path = Path::new(spec);
        Scenario::parse(&read(path)?, path.parent())
    }

    /// Relative config and mission paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Scenario, ConfigError> {
        let ini = Ini::parse(text)?;
        let sec = ini
            .sections
            .get("scenario")
            .ok_or_else(|| ConfigError::Invalid("missing [scenario] section".into()))?;
        if let Some(k) = sec.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::Value {
                section: "scenario".into(),
                key: k.clone(),
                msg: "unknown key".into(),
            });
        }
        let get = |k: &str| ini.get("scenario", k);
        let bad = |k: &str, msg: String| ConfigError::Value {
            section: "scenario".into(),
            key: k.into(),
            msg,
        };

        let mut config = match get("config").unwrap_or("builtin") {
            "builtin" => SimConfig::builtin(),
            p => SimConfig::parse(&read(&resolve(base, p))?)?,
        };
        config.apply_overlay(&ini, &["scenario"])?;

        let mission_text = match get("mission") {
            None => return Err(bad("mission", "missing".into())),
            Some("builtin:zigzag") => ZIGZAG_MISSION.to_string(),
            Some(p) if p.starts_with("builtin:") => return Err(bad("mission", format!("no builtin mission {p:?}"))),
            Some(p) => read(&resolve(base, p))?,
        };
        let mission = parse_mission(&mission_text).map_err(|e| bad("mission", e.to_string()))?;

        match get("fins") {
            None => {}
            Some("on") => config.control.fins_enabled = true,
            Some("off") => config.control.fins_enabled = false,
            Some(v) => return Err(bad("fins", format!("expected on or off, got {v:?}"))),
        }
        let seed = match get("seed") {
            None => 0,
            Some(v) => v.parse().map_err(|_| bad("seed", format!("bad integer {v:?}")))?,
        };
        let duration: f64 = match get("duration") {
            None => return Err(bad("duration", "missing".into())),
            Some(v) => v.parse().map_err(|_| bad("duration", format!("bad number {v:?}")))?,
        };
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(bad("duration", "must be finite and non-negative".into()));
        }
        let nav = get("nav").unwrap_or("hydroman").parse().map_err(|e| bad("nav", e))?;
        config.validate()?;
        Ok(Scenario {
            name: get("name").unwrap_or("unnamed").to_string(),
            config,
            mission,
            mission_text,
            seed,
            duration,
            nav,
        })
    }

    pub fn with_fins(mut self, choice: FinsChoice) -> Self {
        match choice {
            FinsChoice::On => self.config.control.fins_enabled = true,
            FinsChoice::Off => self.config.control.fins_enabled = false,
            FinsChoice::Auto => {}
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_zigzag_loads() {
        let s = Scenario::builtin("zigzag").unwrap();
        assert_eq!(s.mission.len(), 7);
        assert_eq!(s.nav, NavMode::Hydroman);
        assert!(s.config.control.fins_enabled);
        assert_eq!(s.config.envelope.mission_end_time, 165.0);
        assert!(!s.with_fins(FinsChoice::Off).config.control.fins_enabled);
    }

    #[test]
    fn bad_scenarios_are_rejected() {
        let base = "[scenario]\nmission = builtin:zigzag\nduration = 10\n";
        assert!(Scenario::parse(base, None).is_ok());
        for extra in ["fins = maybe\n", "bogus = 1\n", "nav = gps\n", "seed = -1\n"] {
            assert!(Scenario::parse(&format!("{base}{extra}"), None).is_err(), "{extra}");
        }
        assert!(Scenario::parse("[scenario]\nduration = 1\n", None).is_err());
        assert!(Scenario::parse(&format!("{base}[hydro]\nmass = -1\n"), None).is_err());
    }

    #[test]
    fn relative_paths_resolve_against_scenario_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("m.mission"), "ADD_LEG: start_time=1, heading=90, speed=1, depth=1\n").unwrap();
        let s = Scenario::parse("[scenario]\nmission = m.mission\nduration = 5\n", Some(dir.path())).unwrap();
        assert_eq!(s.mission[0].heading, 90.0);
    }
}
