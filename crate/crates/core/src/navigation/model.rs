//! Regression flight model predicting body velocities from propeller speed,
//! angular rates, depth and the previous velocity estimate, identified online
//! with exponentially weighted recursive least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const N_U: usize = 10;
pub const N_V: usize = 8;
pub const N_W: usize = 8;

/// Inputs to the flight model at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Regressors {
    pub rpm: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub z: f64,
    pub u_prev: f64,
    pub v_prev: f64,
    pub w_prev: f64,
}

impl Regressors {
    pub fn u_terms(&self) -> [f64; N_U] {
        let Regressors { rpm, p, q, r, z, v_prev: v, w_prev: w, .. } = *self;
        [
            rpm,
            rpm * rpm,
            q * p * p,
            r * v * v,
            q * w * w,
            p * p,
            q * q,
            r * r,
            p * r * r,
            z,
        ]
    }

    pub fn v_terms(&self) -> [f64; N_V] {
        let Regressors { p, q, r, z, u_prev: u, .. } = *self;
        [q * p * p, p * p, r * u * u, q * u * u, q * q, r * r, p * r * r, z]
    }

    pub fn w_terms(&self) -> [f64; N_W] {
        let Regressors { p, q, r, z, u_prev: u, .. } = *self;
        [r * u * u, q * u * u, q * p * p, p * p, q * q, r * r, p * r * r, z]
    }
}

/// Per-channel RLS state. Works on regressors divided by `scale` so the
/// covariance stays well conditioned when RPM-squared terms are present.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsChannel {
    pub p: DMatrix<f64>,
    scale: DVector<f64>,
    mask: Vec<bool>,
}

impl RlsChannel {
    fn new(scale: &[f64], mask: &[bool], p0: f64) -> Self {
        RlsChannel {
            p: DMatrix::identity(scale.len(), scale.len()) * p0,
            scale: DVector::from_column_slice(scale),
            mask: mask.to_vec(),
        }
    }

    fn reset(&mut self, p0: f64) {
        let n = self.scale.len();
        self.p = DMatrix::identity(n, n) * p0;
    }

    /// Returns true if the covariance had to be reinitialised.
    fn update(&mut self, theta: &mut [f64], phi: &[f64], y: f64, lambda: f64, p0: f64, max_trace: f64) -> bool {
        let n = theta.len();
        let ph = DVector::from_fn(n, |i, _| if self.mask[i] { phi[i] / self.scale[i] } else { 0.0 });
        let th = DVector::from_fn(n, |i, _| theta[i] * self.scale[i]);
        let pphi = &self.p * &ph;
        let denom = lambda + ph.dot(&pphi);
        let err = y - ph.dot(&th);
        if denom <= 0.0 || !denom.is_finite() {
            self.reset(p0);
            return true;
        }
        let k = &pphi / denom;
        let th = th + &k * err;
        let mut p = (&self.p - &k * pphi.transpose()) / lambda;
        p = (&p + p.transpose()) * 0.5;
        for i in 0..n {
            theta[i] = if self.mask[i] { th[i] / self.scale[i] } else { 0.0 };
        }
        if !p.iter().all(|v| v.is_finite()) || p.trace() > max_trace {
            self.reset(p0);
            return true;
        }
        self.p = p;
        false
    }
}

/// Flight-model weights plus identification state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub alpha: [f64; N_U],
    pub beta: [f64; N_V],
    pub gamma: [f64; N_W],
    pub lambda: f64,
    pub p0: f64,
    pub max_trace: f64,
    pub rls: [RlsChannel; 3],
    /// Covariance reinitialisations since construction.
    pub resets: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermMask {
    pub u: [bool; N_U],
    pub v: [bool; N_V],
    pub w: [bool; N_W],
}

impl Default for TermMask {
    fn default() -> Self {
        TermMask {
            u: [true; N_U],
            v: [true; N_V],
            w: [true; N_W],
        }
    }
}

/// Regressor normalisation used by the identification: RPM in thousands.
pub const U_SCALE: [f64; N_U] = [1e3, 1e6, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];

impl ModelParams {
    pub fn new(alpha: [f64; N_U], beta: [f64; N_V], gamma: [f64; N_W], lambda: f64, mask: TermMask) -> Self {
        let p0 = 1e6;
        ModelParams {
            alpha,
            beta,
            gamma,
            lambda,
            p0,
            max_trace: 1e12,
            rls: [
                RlsChannel::new(&U_SCALE, &mask.u, p0),
                RlsChannel::new(&[1.0; N_V], &mask.v, p0),
                RlsChannel::new(&[1.0; N_W], &mask.w, p0),
            ],
            resets: 0,
        }
    }

    pub fn zero(lambda: f64) -> Self {
        Self::new([0.0; N_U], [0.0; N_V], [0.0; N_W], lambda, TermMask::default())
    }

    /// Sets the initial covariance scale and resets all channels to it.
    pub fn with_p0(mut self, p0: f64) -> Self {
        self.p0 = p0;
        for c in &mut self.rls {
            c.reset(p0);
        }
        self
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates the three regression equations.
pub fn model_velocity(reg: &Regressors, params: &ModelParams) -> (f64, f64, f64) {
    (
        dot(&reg.u_terms(), &params.alpha),
        dot(&reg.v_terms(), &params.beta),
        dot(&reg.w_terms(), &params.gamma),
    )
}

/// One RLS step per channel toward the measured body velocities.
/// Returns true if any channel covariance was reinitialised.
pub fn rls_update(params: &mut ModelParams, reg: &Regressors, measured: (f64, f64, f64)) -> bool {
    let (lambda, p0, mt) = (params.lambda, params.p0, params.max_trace);
    let [cu, cv, cw] = &mut params.rls;
    let a = cu.update(&mut params.alpha, &reg.u_terms(), measured.0, lambda, p0, mt);
    let b = cv.update(&mut params.beta, &reg.v_terms(), measured.1, lambda, p0, mt);
    let c = cw.update(&mut params.gamma, &reg.w_terms(), measured.2, lambda, p0, mt);
    let reset = a || b || c;
    if reset {
        params.resets += 1;
    }
    reset
}
