use std::collections::VecDeque;

/// Rate-gated moving-average depth filter.
#[derive(Debug, Clone)]
pub struct DepthFilter {
    max_rate: f64,
    window: usize,
    buf: VecDeque<f64>,
    sum: f64,
    last: Option<(f64, f64)>,
    pub rejected: u64,
}

impl DepthFilter {
    pub fn new(max_rate: f64, window: usize) -> Self {
        DepthFilter {
            max_rate,
            window: window.max(1),
            buf: VecDeque::with_capacity(window.max(1)),
            sum: 0.0,
            last: None,
            rejected: 0,
        }
    }

    /// Feeds one raw sample and returns the filtered depth, if any sample was accepted yet.
    pub fn push(&mut self, z: f64, t: f64) -> Option<f64> {
        if let Some((tl, zl)) = self.last {
            let dt = t - tl;
            if !z.is_finite() || dt <= 0.0 || (z - zl).abs() > self.max_rate * dt {
                self.rejected += 1;
                return self.value();
            }
        } else if !z.is_finite() {
            self.rejected += 1;
            return None;
        }
        self.last = Some((t, z));
        if self.buf.len() == self.window {
            self.buf.pop_front();
        }
        self.buf.push_back(z);
        self.sum = self.buf.iter().sum();
        self.value()
    }

    pub fn value(&self) -> Option<f64> {
        (!self.buf.is_empty()).then(|| self.sum / self.buf.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input_passes_through() {
        let mut f = DepthFilter::new(5.0, 20);
        let mut out = None;
        for k in 0..20 {
            out = f.push(3.0, k as f64 * 0.1);
        }
        assert_eq!(out, Some(3.0));
    }

    #[test]
    fn fast_jump_is_rejected() {
        let mut f = DepthFilter::new(5.0, 20);
        for k in 0..20 {
            f.push(2.0, k as f64 * 0.1);
        }
        assert_eq!(f.push(3.0, 2.0), Some(2.0));
        assert_eq!(f.rejected, 1);
        // 4 m/s is plausible
        assert!(f.push(2.4, 2.1).unwrap() > 2.0);
    }

    #[test]
    fn ramp_lags_by_half_window() {
        let mut f = DepthFilter::new(5.0, 20);
        let mut last = 0.0;
        for k in 0..=200 {
            let t = k as f64 * 0.1;
            last = f.push(0.1 * t, t).unwrap();
        }
        // ramp 0.1 m/s, window 2 s at 10 Hz: lag (N-1)/2 samples = 0.95 s
        assert!((20.0 * 0.1 - last - 0.095).abs() < 1e-9);
    }
}
