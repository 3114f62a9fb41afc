use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the integral contribution `ki * integral`.
    pub i_limit: f64,
    pub out_limit: f64,
}

impl PidGains {
    pub const fn p(kp: f64, out_limit: f64) -> Self {
        PidGains {
            kp,
            ki: 0.0,
            kd: 0.0,
            i_limit: 0.0,
            out_limit,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.i_limit >= 0.0 && self.out_limit >= 0.0 && [self.kp, self.ki, self.kd].iter().all(|g| g.is_finite())
    }

    /// Sets one gain by suffix (`kp`, `ki`, `kd`, `i_limit`, `out_limit`).
    pub fn set(&mut self, field: &str, value: f64) -> bool {
        match field {
            "kp" => self.kp = value,
            "ki" => self.ki = value,
            "kd" => self.kd = value,
            "i_limit" => self.i_limit = value,
            "out_limit" => self.out_limit = value,
            _ => return false,
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: Option<f64>,
}

impl PidState {
    pub fn reset(&mut self) {
        *self = PidState::default();
    }
}

/// One PID step with clamped integral contribution and clamped output.
pub fn pid_step(g: &PidGains, error: f64, dt: f64, st: &mut PidState) -> f64 {
    if dt > 0.0 && g.ki != 0.0 {
        st.integral += error * dt;
        let cap = g.i_limit / g.ki.abs();
        st.integral = st.integral.clamp(-cap, cap);
    }
    let deriv = match st.prev_error {
        Some(pe) if dt > 0.0 => (error - pe) / dt,
        _ => 0.0,
    };
    st.prev_error = Some(error);
    (g.kp * error + g.ki * st.integral + g.kd * deriv).clamp(-g.out_limit, g.out_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::wrap_deg;

    #[test]
    fn zero_error_gives_zero() {
        let g = PidGains {
            kp: 1.0,
            ki: 0.5,
            kd: 0.1,
            i_limit: 5.0,
            out_limit: 15.0,
        };
        let mut s = PidState::default();
        assert_eq!(pid_step(&g, 0.0, 0.05, &mut s), 0.0);
    }

    #[test]
    fn proportional_heading_corrective() {
        let g = PidGains::p(0.8, 15.0);
        let mut s = PidState::default();
        assert!((pid_step(&g, 10.0, 0.05, &mut s) - 8.0).abs() < 1e-12);
        assert_eq!(wrap_deg(350.0 - 10.0), -20.0);
        assert_eq!(wrap_deg(10.0 - 350.0), 20.0);
    }

    #[test]
    fn integral_and_output_are_clamped() {
        let g = PidGains {
            kp: 0.0,
            ki: 1.0,
            kd: 0.0,
            i_limit: 2.0,
            out_limit: 1.5,
        };
        let mut s = PidState::default();
        for _ in 0..100 {
            pid_step(&g, 10.0, 0.05, &mut s);
        }
        assert_eq!(s.integral, 2.0);
        assert_eq!(pid_step(&g, 10.0, 0.05, &mut s), 1.5);
    }

    #[test]
    fn derivative_skips_first_sample() {
        let g = PidGains {
            kp: 0.0,
            ki: 0.0,
            kd: 1.0,
            i_limit: 0.0,
            out_limit: 100.0,
        };
        let mut s = PidState::default();
        assert_eq!(pid_step(&g, 5.0, 0.1, &mut s), 0.0);
        assert!((pid_step(&g, 6.0, 0.1, &mut s) - 10.0).abs() < 1e-9);
    }
}
