//! Translation between sensor/navigation wire messages and the navigation engine.

use super::bus::Bus;
use super::wire::{WireMessage, WireValue};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;
use crate::measurement::{DvlFrame, Measurement};
use crate::navigation::{NavEngine, NavSolution};

pub const KEY_TICK: &str = "HM_TICK";
pub const SOURCE_SENSORS: &str = "sensors";
pub const SOURCE_NAV: &str = "hydroman";

/// Field keys per sensor group; a measurement is complete once every field of
/// its group has arrived with the same timestamp.
const GROUPS: [(&str, &[&str]); 6] = [
    ("DEPTH", &["SENSOR_DEPTH"]),
    (
        "IMU",
        &[
            "SENSOR_IMU_PHI",
            "SENSOR_IMU_THETA",
            "SENSOR_IMU_PSI",
            "SENSOR_IMU_P",
            "SENSOR_IMU_Q",
            "SENSOR_IMU_R",
        ],
    ),
    ("GPS", &["SENSOR_GPS_X", "SENSOR_GPS_Y"]),
    ("LBL", &["SENSOR_LBL_X", "SENSOR_LBL_Y", "SENSOR_LBL_TN"]),
    ("DVL", &["SENSOR_DVL_VX", "SENSOR_DVL_VY", "SENSOR_DVL_VZ", "SENSOR_DVL_FRAME"]),
    ("RPM", &["SENSOR_RPM"]),
];

fn frame_code(f: DvlFrame) -> f64 {
    match f {
        DvlFrame::Instrument => 0.0,
        DvlFrame::Body => 1.0,
    }
}

/// Messages carrying one measurement, in group field order.
pub fn measurement_to_messages(m: &Measurement) -> Vec<WireMessage> {
    let (group, t, vals): (usize, f64, Vec<f64>) = match *m {
        Measurement::Depth { z, t } => (0, t, vec![z]),
        Measurement::Imu {
            phi,
            theta,
            psi,
            p,
            q,
            r,
            t,
        } => (1, t, vec![phi, theta, psi, p, q, r]),
        Measurement::Gps { x, y, t } => (2, t, vec![x, y]),
        Measurement::Lbl { x, y, t_n, t_rx } => (3, t_rx, vec![x, y, t_n]),
        Measurement::Dvl { vx, vy, vz, t, frame } => (4, t, vec![vx, vy, vz, frame_code(frame)]),
        Measurement::Rpm { rpm, t } => (5, t, vec![rpm]),
    };
    GROUPS[group]
        .1
        .iter()
        .zip(vals)
        .map(|(k, v)| WireMessage::double(t, k, v, SOURCE_SENSORS))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ingest {
    Pending,
    Unknown,
}

/// Reassembles measurements from field messages.
#[derive(Debug, Clone, Default)]
pub struct Assembler {
    partial: [Option<(f64, Vec<Option<f64>>)>; 6],
}

impl Assembler {
    pub fn push(&mut self, msg: &WireMessage) -> Result<Option<Measurement>, Ingest> {
        let Some((g, f)) = GROUPS
            .iter()
            .enumerate()
            .find_map(|(g, (_, keys))| keys.iter().position(|k| *k == msg.key).map(|f| (g, f)))
        else {
            return Err(Ingest::Unknown);
        };
        let WireValue::Double(v) = msg.value else {
            return Err(Ingest::Unknown);
        };
        let n = GROUPS[g].1.len();
        let slot = &mut self.partial[g];
        if slot.as_ref().map(|(t, _)| *t) != Some(msg.timestamp) {
            *slot = Some((msg.timestamp, vec![None; n]));
        }
        let (t, fields) = slot.as_mut().expect("slot just filled");
        fields[f] = Some(v);
        if fields.iter().any(Option::is_none) {
            return Ok(None);
        }
        let t = *t;
        let x: Vec<f64> = fields.iter().map(|v| v.expect("complete")).collect();
        *slot = None;
        Ok(Some(match g {
            0 => Measurement::Depth { z: x[0], t },
            1 => Measurement::Imu {
                phi: x[0],
                theta: x[1],
                psi: x[2],
                p: x[3],
                q: x[4],
                r: x[5],
                t,
            },
            2 => Measurement::Gps { x: x[0], y: x[1], t },
            3 => Measurement::Lbl {
                x: x[0],
                y: x[1],
                t_n: x[2],
                t_rx: t,
            },
            4 => Measurement::Dvl {
                vx: x[0],
                vy: x[1],
                vz: x[2],
                t,
                frame: if x[3] == 1.0 { DvlFrame::Body } else { DvlFrame::Instrument },
            },
            _ => Measurement::Rpm { rpm: x[0], t },
        }))
    }
}

pub fn solution_to_messages(s: &NavSolution) -> Vec<WireMessage> {
    let mut v: Vec<WireMessage> = [
        ("NAV_X", s.x),
        ("NAV_Y", s.y),
        ("NAV_DEPTH", s.z),
        ("NAV_HEADING", crate::angle::heading_deg(s.psi.to_degrees())),
        ("NAV_SPEED", s.speed()),
    ]
    .into_iter()
    .map(|(k, x)| WireMessage::double(s.t, k, x, SOURCE_NAV))
    .collect();
    v.push(WireMessage::text(s.t, "NAV_STATUS", s.status.as_str(), SOURCE_NAV));
    v
}

/// Navigation engine behind a message boundary.
pub struct HydromanBoundary {
    pub engine: NavEngine,
    assembler: Assembler,
    pub unknown: u64,
    pub rejected: u64,
}

impl HydromanBoundary {
    pub fn new(engine: NavEngine) -> Self {
        HydromanBoundary {
            engine,
            assembler: Assembler::default(),
            unknown: 0,
            rejected: 0,
        }
    }

    /// Consumes one message; an `HM_TICK` runs a navigation tick and returns the NAV_* messages.
    pub fn handle(&mut self, msg: &WireMessage) -> Vec<WireMessage> {
        if msg.key == KEY_TICK {
            let s = self.engine.tick(msg.timestamp);
            return solution_to_messages(&s);
        }
        match self.assembler.push(msg) {
            Ok(Some(m)) => {
                if self.engine.push(m).is_err() {
                    self.rejected += 1;
                }
            }
            Ok(None) => {}
            Err(_) => self.unknown += 1,
        }
        Vec::new()
    }
}

/// A [`HydromanBoundary`] serving a bus from its own thread.
pub struct HydromanService {
    stop: Arc<AtomicBool>,
    handle: JoinHandle<HydromanBoundary>,
}

impl HydromanService {
    /// Consumes `SENSOR_*` and `HM_TICK` from `bus` and publishes the NAV_* replies.
    pub fn spawn(bus: Arc<Bus>, mut boundary: HydromanBoundary) -> Self {
        let stop = Arc::new(AtomicBool::new(false));
        let flag = stop.clone();
        let (id, rx) = bus.subscribe_local(&["SENSOR_*", KEY_TICK]);
        let handle = std::thread::spawn(move || {
            while !flag.load(Ordering::Relaxed) {
                let Ok(msg) = rx.recv_timeout(Duration::from_millis(20)) else {
                    continue;
                };
                for out in boundary.handle(&msg) {
                    bus.publish(&out, Some(id));
                }
            }
            bus.detach(id);
            boundary
        });
        HydromanService { stop, handle }
    }

    pub fn stop(self) -> HydromanBoundary {
        self.stop.store(true, Ordering::Relaxed);
        self.handle.join().expect("hydroman service thread")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurements_round_trip_through_fields() {
        let ms = [
            Measurement::Depth { z: 1.5, t: 0.1 },
            Measurement::Imu {
                phi: 0.1,
                theta: 0.2,
                psi: 0.3,
                p: 0.4,
                q: 0.5,
                r: 0.6,
                t: 0.1,
            },
            Measurement::Gps { x: 1.0, y: 2.0, t: 0.1 },
            Measurement::Lbl {
                x: 3.0,
                y: 4.0,
                t_n: -19.9,
                t_rx: 0.1,
            },
            Measurement::Dvl {
                vx: 1.5,
                vy: 0.0,
                vz: 0.0,
                t: 0.1,
                frame: DvlFrame::Body,
            },
            Measurement::Rpm { rpm: 1200.0, t: 0.1 },
        ];
        let mut a = Assembler::default();
        for m in ms {
            let msgs = measurement_to_messages(&m);
            let (last, init) = msgs.split_last().unwrap();
            for x in init {
                assert_eq!(a.push(x), Ok(None));
            }
            assert_eq!(a.push(last), Ok(Some(m)));
        }
    }

    #[test]
    fn unknown_key_counted() {
        let mut b = HydromanBoundary::new(NavEngine::new(Default::default(), crate::navigation::ModelParams::zero(0.999)));
        assert!(b.handle(&WireMessage::double(0.0, "SENSOR_SONAR", 1.0, "")).is_empty());
        assert_eq!(b.unknown, 1);
        let out = b.handle(&WireMessage::double(0.05, KEY_TICK, 0.0, ""));
        assert_eq!(out.len(), 6);
        assert_eq!(out[0].key, "NAV_X");
    }
}
