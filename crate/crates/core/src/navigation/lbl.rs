//! Time-indexed history of dead-reckoned quantities, used to move latent
//! position fixes to the current time and to difference fixes against tracks.

use std::collections::VecDeque;

pub const TRACK_WIDTH: usize = 9;

/// Slots of a [`TrackSample`].
pub mod slot {
    /// Adaptive-model dead-reckoned position.
    pub const ADAPT_X: usize = 0;
    pub const ADAPT_Y: usize = 1;
    /// Model track without the current estimate.
    pub const MODEL_X: usize = 2;
    pub const MODEL_Y: usize = 3;
    /// Raw DVL track.
    pub const DVL_X: usize = 4;
    pub const DVL_Y: usize = 5;
    /// Integrals of cos(psi) and sin(psi) over time while the DVL was valid.
    pub const JC: usize = 6;
    pub const JS: usize = 7;
    /// Accumulated time with a valid DVL.
    pub const DVL_T: usize = 8;
}

pub type TrackSample = [f64; TRACK_WIDTH];

/// Ring buffer decimated to `period` seconds plus the latest live sample.
#[derive(Debug, Clone)]
pub struct TrackBuffer {
    period: f64,
    horizon: f64,
    ring: VecDeque<(f64, TrackSample)>,
    live: Option<(f64, TrackSample)>,
}

impl TrackBuffer {
    pub fn new(period: f64, horizon: f64) -> Self {
        TrackBuffer {
            period,
            horizon,
            ring: VecDeque::with_capacity((horizon / period) as usize + 2),
            live: None,
        }
    }

    pub fn push(&mut self, t: f64, s: TrackSample) {
        let due = self
            .ring
            .back()
            .is_none_or(|(tb, _)| t - tb >= self.period - 1e-9);
        if due {
            self.ring.push_back((t, s));
            while self.ring.front().is_some_and(|(tf, _)| t - tf > self.horizon) {
                self.ring.pop_front();
            }
        }
        self.live = Some((t, s));
    }

    pub fn latest(&self) -> Option<(f64, TrackSample)> {
        self.live
    }

    pub fn oldest_time(&self) -> Option<f64> {
        self.ring.front().map(|(t, _)| *t)
    }

    /// Linear interpolation at `tq`; `None` outside the stored span.
    pub fn at(&self, tq: f64) -> Option<TrackSample> {
        let (tl, sl) = self.live?;
        let (t0, _) = *self.ring.front()?;
        if tq < t0 - 1e-9 || tq > tl + 1e-9 {
            return None;
        }
        let idx = self.ring.partition_point(|(t, _)| *t <= tq);
        let (ta, sa) = self.ring[idx.saturating_sub(1)];
        let (tb, sb) = self.ring.get(idx).copied().unwrap_or((tl, sl));
        if tb - ta <= 1e-12 {
            return Some(sa);
        }
        let f = ((tq - ta) / (tb - ta)).clamp(0.0, 1.0);
        let mut out = [0.0; TRACK_WIDTH];
        for i in 0..TRACK_WIDTH {
            out[i] = sa[i] + f * (sb[i] - sa[i]);
        }
        Some(out)
    }
}

/// Moves a fix valid at `t_n` to now: `fix + (track(now) - track(t_n))`.
pub fn lbl_extrapolate(fix: (f64, f64), t_n: f64, track: &TrackBuffer) -> Option<(f64, f64)> {
    let (_, now) = track.latest()?;
    let then = track.at(t_n)?;
    Some((
        fix.0 + now[slot::ADAPT_X] - then[slot::ADAPT_X],
        fix.1 + now[slot::ADAPT_Y] - then[slot::ADAPT_Y],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(speed: f64, secs: f64) -> TrackBuffer {
        let mut b = TrackBuffer::new(1.0, 600.0);
        let mut k = 0;
        loop {
            let t = k as f64 * 0.05;
            if t > secs + 1e-9 {
                break;
            }
            let mut s = [0.0; TRACK_WIDTH];
            s[slot::ADAPT_X] = speed * t;
            b.push(t, s);
            k += 1;
        }
        b
    }

    #[test]
    fn stationary_track_returns_fix() {
        let b = straight(0.0, 30.0);
        assert_eq!(lbl_extrapolate((5.0, -3.0), 10.0, &b), Some((5.0, -3.0)));
    }

    #[test]
    fn moving_track_shifts_fix() {
        let b = straight(1.6, 40.0);
        let (x, y) = lbl_extrapolate((100.0, 0.0), 20.0, &b).unwrap();
        assert!((x - 132.0).abs() < 1e-9);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn too_old_fix_is_rejected() {
        let b = straight(1.0, 700.0);
        assert!(b.oldest_time().unwrap() >= 99.0);
        assert_eq!(lbl_extrapolate((0.0, 0.0), 50.0, &b), None);
        assert!(lbl_extrapolate((0.0, 0.0), 650.0, &b).is_some());
    }

    #[test]
    fn interpolates_between_decimated_samples() {
        let b = straight(2.0, 10.0);
        let s = b.at(3.37).unwrap();
        assert!((s[slot::ADAPT_X] - 6.74).abs() < 1e-9);
        let tail = b.at(9.98).unwrap();
        assert!((tail[slot::ADAPT_X] - 19.96).abs() < 1e-9);
    }
}
