//! Layered fusion: a bias (error-state) layer estimating sensor velocity biases
//! top-down in order of sensor accuracy, and a six-state position/velocity filter.

use nalgebra::{Matrix2, Matrix6, RowVector6, Vector2, Vector3, Vector6};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasConfig {
    /// Gauss-Markov correlation time (s).
    pub tau: f64,
    /// Steady-state bias standard deviation (m/s).
    pub sigma: f64,
    /// Measurement noise of a model-vs-DVL velocity difference (m/s).
    pub model_meas_sigma: f64,
}

impl Default for BiasConfig {
    fn default() -> Self {
        BiasConfig {
            tau: 300.0,
            sigma: 0.2,
            model_meas_sigma: 0.05,
        }
    }
}

/// Body-frame velocity biases of the DVL and the flight model.
///
/// Means are held between updates; only the covariance follows the
/// Gauss-Markov process noise, so a layer without its reference stays frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasLayer {
    pub config: BiasConfig,
    pub dvl: Vector2<f64>,
    pub p_dvl: Matrix2<f64>,
    pub model: Vector2<f64>,
    pub p_model: Matrix2<f64>,
    pub dvl_updates: u64,
    pub model_updates: u64,
}

fn kalman2(x: &mut Vector2<f64>, p: &mut Matrix2<f64>, y: Vector2<f64>, h: Matrix2<f64>, r: Matrix2<f64>) -> bool {
    let s = h * *p * h.transpose() + r;
    let Some(si) = s.try_inverse() else {
        return false;
    };
    let k = *p * h.transpose() * si;
    *x += k * y;
    let ikh = Matrix2::identity() - k * h;
    *p = ikh * *p * ikh.transpose() + k * r * k.transpose();
    *p = (*p + p.transpose()) * 0.5;
    true
}

impl BiasLayer {
    pub fn new(config: BiasConfig) -> Self {
        let p0 = Matrix2::identity() * config.sigma * config.sigma;
        BiasLayer {
            config,
            dvl: Vector2::zeros(),
            p_dvl: p0,
            model: Vector2::zeros(),
            p_model: p0,
            dvl_updates: 0,
            model_updates: 0,
        }
    }

    pub fn propagate(&mut self, dt: f64) {
        let c = &self.config;
        let cap = c.sigma * c.sigma;
        let q = 2.0 * cap / c.tau * dt;
        for p in [&mut self.p_dvl, &mut self.p_model] {
            for i in 0..2 {
                p[(i, i)] = (p[(i, i)] + q).min(cap.max(p[(i, i)]));
            }
        }
    }

    /// Position-fix layer: `dp_fix - dp_dvl_raw = -J b_dvl`, with `J` the
    /// integral of the heading rotation over the span.
    pub fn update_dvl(&mut self, dp_fix: Vector2<f64>, dp_dvl_raw: Vector2<f64>, j: Matrix2<f64>, fix_sigma: f64) {
        let z = dp_fix - dp_dvl_raw;
        let h = -j;
        let y = z - h * self.dvl;
        let r = Matrix2::identity() * (2.0 * fix_sigma * fix_sigma);
        if kalman2(&mut self.dvl, &mut self.p_dvl, y, h, r) {
            self.dvl_updates += 1;
        }
    }

    /// DVL layer: model body velocity minus bias-corrected DVL body velocity.
    pub fn update_model(&mut self, model_body: Vector2<f64>, dvl_body_corrected: Vector2<f64>) {
        let y = model_body - dvl_body_corrected - self.model;
        let s = self.config.model_meas_sigma;
        let r = Matrix2::identity() * s * s;
        if kalman2(&mut self.model, &mut self.p_model, y, Matrix2::identity(), r) {
            self.model_updates += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixOutcome {
    Accepted,
    Gated { mahalanobis: f64 },
}

/// Six-state filter: position (north, east, down) and earth velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct MainFilter {
    pub x: Vector6<f64>,
    pub p: Matrix6<f64>,
    pub q_pos: f64,
    pub inflations: u64,
}

impl MainFilter {
    pub fn new(pos: Vector3<f64>, pos_sigma: f64, q_pos: f64) -> Self {
        let mut p = Matrix6::zeros();
        for i in 0..3 {
            p[(i, i)] = pos_sigma * pos_sigma;
            p[(i + 3, i + 3)] = 1.0;
        }
        MainFilter {
            x: Vector6::new(pos.x, pos.y, pos.z, 0.0, 0.0, 0.0),
            p,
            q_pos,
            inflations: 0,
        }
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.x[3], self.x[4], self.x[5])
    }

    /// Propagates position with the trapezoid of old and new velocity, then
    /// adopts `v_new` as the velocity state with variance `sigma_v^2`.
    pub fn predict(&mut self, v_new: Vector3<f64>, sigma_v: f64, dt: f64) {
        let v_old = self.velocity();
        for i in 0..3 {
            self.x[i] += 0.5 * (v_old[i] + v_new[i]) * dt;
            self.x[i + 3] = v_new[i];
        }
        let add = sigma_v * sigma_v * dt * dt + self.q_pos * dt;
        for i in 0..3 {
            self.p[(i, i)] += add;
            for j in 0..6 {
                if j != i + 3 {
                    self.p[(i + 3, j)] = 0.0;
                    self.p[(j, i + 3)] = 0.0;
                }
            }
            self.p[(i + 3, i + 3)] = sigma_v * sigma_v;
        }
    }

    fn scalar_update(&mut self, h: RowVector6<f64>, z: f64, r: f64) {
        let y = z - (h * self.x)[0];
        let s = (h * self.p * h.transpose())[0] + r;
        let k = self.p * h.transpose() / s;
        self.x += k * y;
        let ikh = Matrix6::identity() - k * h;
        self.p = ikh * self.p * ikh.transpose() + k * k.transpose() * r;
        self.condition();
    }

    pub fn update_depth(&mut self, z: f64, sigma: f64) {
        let h = RowVector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        self.scalar_update(h, z, sigma * sigma);
    }

    /// Horizontal fix update with a Mahalanobis gate of `gate_k`.
    pub fn update_position(&mut self, fix: (f64, f64), sigma: f64, gate_k: f64) -> FixOutcome {
        let y = Vector2::new(fix.0 - self.x[0], fix.1 - self.x[1]);
        let s = Matrix2::new(
            self.p[(0, 0)] + sigma * sigma,
            self.p[(0, 1)],
            self.p[(1, 0)],
            self.p[(1, 1)] + sigma * sigma,
        );
        let d = s
            .try_inverse()
            .map(|si| (y.transpose() * si * y)[0].sqrt())
            .unwrap_or(f64::INFINITY);
        if d > gate_k {
            // open up so a persistent disagreement is eventually accepted
            for i in 0..2 {
                self.p[(i, i)] *= 2.0;
            }
            return FixOutcome::Gated { mahalanobis: d };
        }
        let r = sigma * sigma;
        self.scalar_update(RowVector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), fix.0, r);
        self.scalar_update(RowVector6::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0), fix.1, r);
        FixOutcome::Accepted
    }

    pub fn reset_position(&mut self, fix: (f64, f64), sigma: f64) {
        self.x[0] = fix.0;
        self.x[1] = fix.1;
        for i in 0..2 {
            for j in 0..6 {
                self.p[(i, j)] = 0.0;
                self.p[(j, i)] = 0.0;
            }
            self.p[(i, i)] = sigma * sigma;
        }
    }

    /// Horizontal 1-sigma position uncertainty.
    pub fn position_sigma(&self) -> f64 {
        (0.5 * (self.p[(0, 0)] + self.p[(1, 1)])).max(0.0).sqrt()
    }

    /// Re-symmetrises and inflates the covariance if it lost definiteness.
    fn condition(&mut self) {
        self.p = (self.p + self.p.transpose()) * 0.5;
        let min_eig = self.p.symmetric_eigenvalues().min();
        if !(min_eig >= 0.0) {
            let bump = if min_eig.is_finite() { -min_eig + 1e-9 } else { 1.0 };
            self.p += Matrix6::identity() * bump;
            self.inflations += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_bias_layer_converges_to_offset() {
        let mut b = BiasLayer::new(BiasConfig::default());
        for _ in 0..400 {
            b.propagate(0.05);
            b.update_model(Vector2::new(1.6, 0.0), Vector2::new(1.5, 0.0));
        }
        assert!((b.model.x - 0.1).abs() < 1e-3);
        assert!(b.model.y.abs() < 1e-12);
    }

    #[test]
    fn propagation_holds_bias_means() {
        let mut b = BiasLayer::new(BiasConfig::default());
        b.dvl = Vector2::new(0.05, -0.02);
        b.model = Vector2::new(0.1, 0.0);
        for _ in 0..1000 {
            b.propagate(0.05);
        }
        assert_eq!(b.dvl, Vector2::new(0.05, -0.02));
        assert_eq!(b.model, Vector2::new(0.1, 0.0));
    }

    #[test]
    fn dvl_bias_from_fix_pairs() {
        let mut b = BiasLayer::new(BiasConfig::default());
        let truth = Vector2::new(0.04, -0.03);
        // heading north for 10 s then east for 10 s
        for k in 0..20 {
            let j = if k % 2 == 0 {
                Matrix2::identity() * 10.0
            } else {
                Matrix2::new(0.0, -10.0, 10.0, 0.0)
            };
            let dp_true = Vector2::new(15.0, 0.0);
            b.update_dvl(dp_true, dp_true + j * truth, j, 0.01);
        }
        assert!((b.dvl - truth).norm() < 1e-4);
    }

    #[test]
    fn depth_update_pulls_toward_measurement() {
        let mut f = MainFilter::new(Vector3::new(0.0, 0.0, 1.0), 1.0, 0.0);
        for _ in 0..50 {
            f.update_depth(2.0, 0.05);
        }
        assert!((f.x[2] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn gate_rejects_outlier_then_relaxes() {
        let mut f = MainFilter::new(Vector3::zeros(), 0.5, 0.0);
        let first = f.update_position((30.0, 0.0), 1.0, 5.0);
        assert!(matches!(first, FixOutcome::Gated { .. }));
        let mut accepted = false;
        for _ in 0..20 {
            accepted |= f.update_position((30.0, 0.0), 1.0, 5.0) == FixOutcome::Accepted;
        }
        assert!(accepted);
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        let mut f = MainFilter::new(Vector3::zeros(), 2.0, 0.01);
        for k in 0..200 {
            f.predict(Vector3::new(1.0, 0.5, 0.0), 0.2, 0.05);
            f.update_depth(0.0, 0.05);
            if k % 20 == 0 {
                f.update_position((k as f64 * 0.05, k as f64 * 0.025), 1.0, 5.0);
            }
            assert_eq!(f.p, f.p.transpose());
            assert!(f.p.symmetric_eigenvalues().min() >= -1e-12);
        }
    }
}
