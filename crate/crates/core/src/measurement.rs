//! Sensor measurements exchanged between the plant, the gateway and navigation.

use serde::{Deserialize, Serialize};

/// Frame in which a DVL velocity is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DvlFrame {
    /// Instrument axes; rotated by the configured mount before use.
    Instrument,
    /// Already in vehicle body axes.
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Measurement {
    Depth {
        z: f64,
        t: f64,
    },
    Imu {
        phi: f64,
        theta: f64,
        psi: f64,
        p: f64,
        q: f64,
        r: f64,
        t: f64,
    },
    Gps {
        x: f64,
        y: f64,
        t: f64,
    },
    /// Position valid at `t_n`, received at `t_rx`.
    Lbl {
        x: f64,
        y: f64,
        t_n: f64,
        t_rx: f64,
    },
    Dvl {
        vx: f64,
        vy: f64,
        vz: f64,
        t: f64,
        frame: DvlFrame,
    },
    Rpm {
        rpm: f64,
        t: f64,
    },
}

impl Measurement {
    /// Arrival time used for queue ordering.
    pub fn time(&self) -> f64 {
        match *self {
            Measurement::Depth { t, .. }
            | Measurement::Imu { t, .. }
            | Measurement::Gps { t, .. }
            | Measurement::Dvl { t, .. }
            | Measurement::Rpm { t, .. } => t,
            Measurement::Lbl { t_rx, .. } => t_rx,
        }
    }

    pub fn stream(&self) -> Stream {
        match self {
            Measurement::Depth { .. } => Stream::Depth,
            Measurement::Imu { .. } => Stream::Imu,
            Measurement::Gps { .. } => Stream::Gps,
            Measurement::Lbl { .. } => Stream::Lbl,
            Measurement::Dvl { .. } => Stream::Dvl,
            Measurement::Rpm { .. } => Stream::Rpm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stream {
    Depth,
    Imu,
    Gps,
    Lbl,
    Dvl,
    Rpm,
}

impl Stream {
    pub const ALL: [Stream; 6] = [
        Stream::Depth,
        Stream::Imu,
        Stream::Gps,
        Stream::Lbl,
        Stream::Dvl,
        Stream::Rpm,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}
