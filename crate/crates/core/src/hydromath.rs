//! Linear sway/yaw stability and manoeuvrability of a torpedo hull with stern
//! rudders and forward morphing fins.
//!
//! ## Conventions
//! - Body frame: x forward, y starboard, z down; origin at the coefficient
//!   reference point. Stations are signed x positions in metres.
//! - Rudder station `x_R < 0` (aft), so `xi = -x_R > 0`.
//! - Fin station `x_f = eta`, normally forward of the origin.
//! - `lift_per_angle` (`Y_delta`, `Y_f_delta`) is negative; a surface at
//!   station `x` with lift slope `L` adds `L/U` to `Y_v`, `x L/U` to `Y_r` and
//!   `N_v`, and `x^2 L/U` to `N_r`.
//! - All functions are pure and evaluate the coefficients exactly as given;
//!   speed scaling to a different operating point is explicit via
//!   [`HydroConfig::at_speed`] and [`Appendage::at_speed`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HydroError {
    #[error("side-force derivative Y_v is zero; aerodynamic centre undefined")]
    ZeroSwayDamping,
    #[error("m*U - Y_r must be positive (got {0})")]
    NonPositiveSwayInertia(f64),
    #[error("forward speed must be positive (got {0})")]
    NonPositiveSpeed(f64),
    #[error("fin deployment fraction {0} outside [0, 1]")]
    DeployFraction(f64),
    #[error("expected a {expected:?} appendage, got {got:?}")]
    WrongAppendage {
        expected: AppendageKind,
        got: AppendageKind,
    },
    #[error("stability index is zero: turn rate is singular at the stability transition")]
    SingularStability,
    #[error("stability index does not depend on rudder lift at this station; no threshold exists")]
    NoThreshold,
    #[error("invalid hydrodynamic configuration: {0}")]
    InvalidConfig(String),
}

pub type HydroResult<T> = Result<T, HydroError>;

/// Mass properties plus linear sway/yaw coefficients (SI units).
///
/// `y_v`, `y_r`, `n_v`, `n_r` are bare-body values when the config is read
/// from file and composed values after [`with_rudder`]/[`with_fin`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroConfig {
    pub mass: f64,
    pub i_zz: f64,
    pub x_g: f64,
    pub y_vdot: f64,
    pub y_rdot: f64,
    pub n_vdot: f64,
    pub n_rdot: f64,
    pub y_v: f64,
    pub y_r: f64,
    pub n_v: f64,
    pub n_r: f64,
    pub rho: f64,
    /// Speed at which the damping coefficients were identified (m/s).
    pub u_ref: f64,
}

impl HydroConfig {
    pub fn validate(&self) -> HydroResult<()> {
        let bad = |m: &str| Err(HydroError::InvalidConfig(m.to_string()));
        let all = [
            self.mass, self.i_zz, self.x_g, self.y_vdot, self.y_rdot, self.n_vdot, self.n_rdot,
            self.y_v, self.y_r, self.n_v, self.n_r, self.rho, self.u_ref,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("non-finite coefficient");
        }
        if self.mass <= 0.0 {
            return bad("mass must be positive");
        }
        if self.i_zz <= 0.0 {
            return bad("I_zz must be positive");
        }
        if self.rho <= 0.0 {
            return bad("water density must be positive");
        }
        if self.y_v >= 0.0 {
            return bad("Y_v must be negative");
        }
        if self.u_ref <= 0.0 {
            return bad("reference speed must be positive");
        }
        Ok(())
    }

    /// Damping coefficients rescaled from `u_ref` to speed `u` (linear in U).
    pub fn at_speed(&self, u: f64) -> HydroConfig {
        let s = u / self.u_ref;
        HydroConfig {
            y_v: self.y_v * s,
            y_r: self.y_r * s,
            n_v: self.n_v * s,
            n_r: self.n_r * s,
            ..*self
        }
    }

    /// `m U - Y_r`.
    pub fn sway_inertia_term(&self, u: f64) -> f64 {
        self.mass * u - self.y_r
    }

    /// `m x_G U - N_r`.
    pub fn yaw_inertia_term(&self, u: f64) -> f64 {
        self.mass * self.x_g * u - self.n_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendageKind {
    Rudder,
    Fin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoilGeometry {
    /// Planform area of one blade (m^2).
    pub area: f64,
    /// Lift-coefficient slope (1/rad).
    pub cl_alpha: f64,
}

/// A lifting surface (stern rudder pair or forward fin pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Appendage {
    pub kind: AppendageKind,
    /// Side force per radian of deflection at the config's reference speed (N/rad, < 0).
    pub lift_per_angle: f64,
    /// Longitudinal station of the force (m).
    pub station: f64,
    pub geometry: Option<FoilGeometry>,
}

impl Appendage {
    pub fn rudder(lift_per_angle: f64, station: f64) -> HydroResult<Self> {
        if !(station < 0.0) {
            return Err(HydroError::InvalidConfig(format!(
                "rudder station must be aft of the origin (got {station})"
            )));
        }
        Self::checked(AppendageKind::Rudder, lift_per_angle, station)
    }

    pub fn fin(lift_per_angle: f64, station: f64) -> HydroResult<Self> {
        Self::checked(AppendageKind::Fin, lift_per_angle, station)
    }

    /// Builds the appendage from blade geometry via [`rudder_lift_per_angle`].
    pub fn from_geometry(
        kind: AppendageKind,
        geometry: FoilGeometry,
        rho: f64,
        u_ref: f64,
        station: f64,
    ) -> HydroResult<Self> {
        let lift = rudder_lift_per_angle(rho, geometry.cl_alpha, geometry.area, u_ref);
        let mut a = match kind {
            AppendageKind::Rudder => Self::rudder(lift, station)?,
            AppendageKind::Fin => Self::fin(lift, station)?,
        };
        a.geometry = Some(geometry);
        Ok(a)
    }

    fn checked(kind: AppendageKind, lift_per_angle: f64, station: f64) -> HydroResult<Self> {
        if !(lift_per_angle < 0.0) || !station.is_finite() {
            return Err(HydroError::InvalidConfig(format!(
                "{kind:?} lift per angle must be negative and station finite"
            )));
        }
        Ok(Appendage {
            kind,
            lift_per_angle,
            station,
            geometry: None,
        })
    }

    /// Lift slope rescaled from `u_ref` to `u` (quadratic in U).
    pub fn at_speed(&self, u: f64, u_ref: f64) -> Appendage {
        let s = u / u_ref;
        Appendage {
            lift_per_angle: self.lift_per_angle * s * s,
            ..*self
        }
    }

    /// `xi = -x_R` for a rudder.
    pub fn xi(&self) -> f64 {
        -self.station
    }

    /// `eta = x_f` for a fin.
    pub fn eta(&self) -> f64 {
        self.station
    }

    fn expect(&self, kind: AppendageKind) -> HydroResult<()> {
        if self.kind != kind {
            return Err(HydroError::WrongAppendage {
                expected: kind,
                got: self.kind,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub c: f64,
    pub c_bare: f64,
    pub x_r: f64,
    pub x_ac: f64,
    pub stable: bool,
    /// Steady yaw rate per radian of rudder, `None` at the stability transition.
    pub r_per_delta: Option<f64>,
}

/// `x_AC = N_v / Y_v`.
pub fn aerodynamic_center(cfg: &HydroConfig) -> HydroResult<f64> {
    if cfg.y_v == 0.0 {
        return Err(HydroError::ZeroSwayDamping);
    }
    Ok(cfg.n_v / cfg.y_v)
}

/// `x_r = (m x_G U - N_r) / (m U - Y_r)`.
pub fn center_of_rotation(cfg: &HydroConfig, u: f64) -> HydroResult<f64> {
    let den = cfg.sway_inertia_term(u);
    if !(den > 0.0) {
        return Err(HydroError::NonPositiveSwayInertia(den));
    }
    Ok(cfg.yaw_inertia_term(u) / den)
}

/// Dynamic stability index `C = -Y_v (m x_G U - N_r) + N_v (m U - Y_r)`.
pub fn stability_index(cfg: &HydroConfig, u: f64) -> f64 {
    -cfg.y_v * cfg.yaw_inertia_term(u) + cfg.n_v * cfg.sway_inertia_term(u)
}

pub fn is_stable(cfg: &HydroConfig, u: f64) -> bool {
    stability_index(cfg, u) > 0.0
}

fn add_surface(cfg: &HydroConfig, lift_over_u: f64, station: f64) -> HydroConfig {
    HydroConfig {
        y_v: cfg.y_v + lift_over_u,
        y_r: cfg.y_r + station * lift_over_u,
        n_v: cfg.n_v + station * lift_over_u,
        n_r: cfg.n_r + station * station * lift_over_u,
        ..*cfg
    }
}

/// Adds the stern rudder's contribution to the damping coefficients.
pub fn with_rudder(cfg: &HydroConfig, rudder: &Appendage, u: f64) -> HydroResult<HydroConfig> {
    rudder.expect(AppendageKind::Rudder)?;
    if !(u > 0.0) {
        return Err(HydroError::NonPositiveSpeed(u));
    }
    Ok(add_surface(cfg, rudder.lift_per_angle / u, rudder.station))
}

/// Adds the forward fin's contribution, scaled by the deployment fraction.
pub fn with_fin(
    cfg: &HydroConfig,
    fin: &Appendage,
    deploy_fraction: f64,
    u: f64,
) -> HydroResult<HydroConfig> {
    fin.expect(AppendageKind::Fin)?;
    if !(0.0..=1.0).contains(&deploy_fraction) {
        return Err(HydroError::DeployFraction(deploy_fraction));
    }
    if !(u > 0.0) {
        return Err(HydroError::NonPositiveSpeed(u));
    }
    Ok(add_surface(
        cfg,
        deploy_fraction * fin.lift_per_angle / u,
        fin.station,
    ))
}

fn stability_scale(cfg: &HydroConfig, u: f64) -> f64 {
    (cfg.y_v * cfg.yaw_inertia_term(u)).abs() + (cfg.n_v * cfg.sway_inertia_term(u)).abs()
}

/// Steady turn rate for rudder angle `delta` (rad) at speed `u`.
///
/// `bare` holds the bare-body coefficients; the rudder (and fully deployed fin,
/// if given, counter-deflected at `-delta`) are composed internally.
pub fn steady_yaw_rate(
    bare: &HydroConfig,
    rudder: &Appendage,
    fin: Option<&Appendage>,
    delta: f64,
    u: f64,
) -> HydroResult<f64> {
    Ok(yaw_rate_per_delta(bare, rudder, fin, u)? * delta)
}

fn yaw_rate_per_delta(
    bare: &HydroConfig,
    rudder: &Appendage,
    fin: Option<&Appendage>,
    u: f64,
) -> HydroResult<f64> {
    let mut composed = with_rudder(bare, rudder, u)?;
    if let Some(f) = fin {
        composed = with_fin(&composed, f, 1.0, u)?;
    }
    let c = stability_index(&composed, u);
    if c == 0.0 || c.abs() <= f64::EPSILON * stability_scale(&composed, u) {
        return Err(HydroError::SingularStability);
    }
    let x_ac = aerodynamic_center(bare)?;
    let a = rudder.lift_per_angle / u;
    let xi = rudder.xi();
    let mut bracket = a * bare.y_v * (x_ac + xi);
    if let Some(f) = fin {
        let b = f.lift_per_angle / u;
        let eta = f.eta();
        bracket += b * bare.y_v * (eta - x_ac) + 2.0 * a * b * (eta + xi);
    }
    Ok(u * bracket / c)
}

/// Stability threshold for a rudder at station `x_r_station`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizingThreshold {
    /// `A* = Y_delta* / U`.
    pub a: f64,
    /// Rudder lift per angle at speed `U` that puts `C` exactly at zero.
    pub lift_per_angle: f64,
}

/// Rudder lift that brings the composed stability index to zero.
pub fn min_stabilizing_rudder(
    bare: &HydroConfig,
    x_r_station: f64,
    u: f64,
) -> HydroResult<StabilizingThreshold> {
    if !(u > 0.0) {
        return Err(HydroError::NonPositiveSpeed(u));
    }
    let xi = -x_r_station;
    // C(A) = C_b - A * k, linear in A
    let k = bare.yaw_inertia_term(u) + xi * bare.sway_inertia_term(u)
        - bare.y_v * xi * xi
        - bare.n_v * xi;
    if k == 0.0 {
        return Err(HydroError::NoThreshold);
    }
    let a = stability_index(bare, u) / k;
    Ok(StabilizingThreshold {
        a,
        lift_per_angle: a * u,
    })
}

/// True iff `x_r,b < eta < x_AC,b` for the bare body.
pub fn fin_placement_valid(eta: f64, bare: &HydroConfig, u: f64) -> bool {
    match (center_of_rotation(bare, u), aerodynamic_center(bare)) {
        (Ok(x_r), Ok(x_ac)) => x_r < eta && eta < x_ac,
        _ => false,
    }
}

/// Lift slope of a rudder pair: `-(1/2) rho CL_alpha (2 S) U^2`.
pub fn rudder_lift_per_angle(rho: f64, cl_alpha: f64, area_one_blade: f64, u: f64) -> f64 {
    -(0.5 * rho * cl_alpha * (2.0 * area_one_blade) * u * u)
}

/// Full stability summary for the bare body plus appendages.
pub fn stability_report(
    bare: &HydroConfig,
    rudder: &Appendage,
    fin: Option<(&Appendage, f64)>,
    u: f64,
) -> HydroResult<StabilityReport> {
    let mut composed = with_rudder(bare, rudder, u)?;
    if let Some((f, frac)) = fin {
        composed = with_fin(&composed, f, frac, u)?;
    }
    let c = stability_index(&composed, u);
    let full_fin = fin.and_then(|(f, frac)| (frac == 1.0).then_some(f));
    let r_per_delta = match fin {
        Some((_, frac)) if frac != 1.0 && frac != 0.0 => None,
        _ => yaw_rate_per_delta(bare, rudder, full_fin, u).ok(),
    };
    Ok(StabilityReport {
        c,
        c_bare: stability_index(bare, u),
        x_r: center_of_rotation(&composed, u)?,
        x_ac: aerodynamic_center(&composed)?,
        stable: c > 0.0,
        r_per_delta,
    })
}

/// One point of a fin-station sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eta: f64,
    pub placement_valid: bool,
    pub c: f64,
    /// Turn-rate ratio fins-deployed / rudder-only at equal rudder angle.
    pub rate_ratio: Option<f64>,
}

/// Evaluates stability and turn-rate gain for a batch of fin stations.
pub fn sweep_fin_station(
    bare: &HydroConfig,
    rudder: &Appendage,
    fin: &Appendage,
    stations: &[f64],
    u: f64,
) -> Vec<SweepPoint> {
    crate::par::map(stations, |&eta| sweep_point(bare, rudder, fin, eta, u))
}

/// Sequential twin of [`sweep_fin_station`].
pub fn sweep_fin_station_seq(
    bare: &HydroConfig,
    rudder: &Appendage,
    fin: &Appendage,
    stations: &[f64],
    u: f64,
) -> Vec<SweepPoint> {
    crate::par::map_seq(stations, |&eta| sweep_point(bare, rudder, fin, eta, u))
}

fn sweep_point(bare: &HydroConfig, rudder: &Appendage, fin: &Appendage, eta: f64, u: f64) -> SweepPoint {
    let f = Appendage { station: eta, ..*fin };
    let c = with_rudder(bare, rudder, u)
        .and_then(|c| with_fin(&c, &f, 1.0, u))
        .map(|c| stability_index(&c, u))
        .unwrap_or(f64::NAN);
    let rate_ratio = match (
        yaw_rate_per_delta(bare, rudder, Some(&f), u),
        yaw_rate_per_delta(bare, rudder, None, u),
    ) {
        (Ok(a), Ok(b)) if b != 0.0 => Some(a / b),
        _ => None,
    };
    SweepPoint {
        eta,
        placement_valid: fin_placement_valid(eta, bare, u),
        c,
        rate_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> HydroConfig {
        HydroConfig {
            mass: 14.0,
            i_zz: 1.7,
            x_g: 0.0,
            y_vdot: -13.0,
            y_rdot: 0.0,
            n_vdot: 0.0,
            n_rdot: -1.0,
            y_v: -17.0,
            y_r: 3.0,
            n_v: -10.0,
            n_r: -4.0,
            rho: 1000.0,
            u_ref: 1.5,
        }
    }

    #[test]
    fn aerodynamic_center_is_ratio() {
        let mut c = cfg();
        c.y_v = -2.0;
        c.n_v = 1.0;
        assert_eq!(aerodynamic_center(&c).unwrap(), -0.5);
        c.n_v = 0.0;
        assert_eq!(aerodynamic_center(&c).unwrap(), 0.0);
        c.y_v = 0.0;
        assert_eq!(aerodynamic_center(&c), Err(HydroError::ZeroSwayDamping));
    }

    #[test]
    fn center_of_rotation_hand_values() {
        let mut c = cfg();
        c.mass = 1.0;
        c.x_g = 0.1;
        c.n_r = -0.2;
        c.y_r = 0.0;
        assert!((center_of_rotation(&c, 1.0).unwrap() - 0.3).abs() < 1e-15);
        c.x_g = 0.0;
        c.n_r = 0.0;
        assert_eq!(center_of_rotation(&c, 2.0).unwrap(), 0.0);
        c.y_r = 5.0;
        assert!(matches!(
            center_of_rotation(&c, 1.0),
            Err(HydroError::NonPositiveSwayInertia(_))
        ));
    }

    #[test]
    fn symmetric_body_has_zero_index() {
        let mut c = cfg();
        c.n_v = 0.0;
        c.x_g = 0.0;
        c.n_r = 0.0;
        assert_eq!(stability_index(&c, 1.5), 0.0);
    }

    #[test]
    fn zero_lift_rudder_is_identity_and_station_zero_touches_yv_only() {
        let c = cfg();
        let mut r = Appendage::rudder(-1.0, -0.5).unwrap();
        r.lift_per_angle = 0.0;
        assert_eq!(with_rudder(&c, &r, 1.5).unwrap(), c);
        let r0 = Appendage {
            kind: AppendageKind::Rudder,
            lift_per_angle: -3.0,
            station: 0.0,
            geometry: None,
        };
        let out = with_rudder(&c, &r0, 1.5).unwrap();
        assert_eq!(out.y_v, c.y_v - 2.0);
        assert_eq!((out.y_r, out.n_v, out.n_r), (c.y_r, c.n_v, c.n_r));
    }

    #[test]
    fn with_rudder_rejects_bad_inputs() {
        let c = cfg();
        let r = Appendage::rudder(-10.0, -0.5).unwrap();
        assert_eq!(with_rudder(&c, &r, 0.0), Err(HydroError::NonPositiveSpeed(0.0)));
        let f = Appendage::fin(-10.0, 0.3).unwrap();
        assert!(matches!(
            with_rudder(&c, &f, 1.0),
            Err(HydroError::WrongAppendage { .. })
        ));
        assert!(Appendage::rudder(-10.0, 0.2).is_err());
        assert!(Appendage::rudder(1.0, -0.2).is_err());
    }

    #[test]
    fn fin_fraction_zero_is_identity_and_range_checked() {
        let c = cfg();
        let f = Appendage::fin(-20.0, 0.3).unwrap();
        assert_eq!(with_fin(&c, &f, 0.0, 1.5).unwrap(), c);
        assert_eq!(with_fin(&c, &f, 1.2, 1.5), Err(HydroError::DeployFraction(1.2)));
        assert_eq!(with_fin(&c, &f, -0.1, 1.5), Err(HydroError::DeployFraction(-0.1)));
    }

    #[test]
    fn half_deployment_scales_lift_linearly() {
        let c = cfg();
        let f = Appendage::fin(-20.0, 0.3).unwrap();
        let half = with_fin(&c, &f, 0.5, 1.5).unwrap();
        let full_half_lift = with_fin(
            &c,
            &Appendage::fin(-10.0, 0.3).unwrap(),
            1.0,
            1.5,
        )
        .unwrap();
        assert_eq!(half, full_half_lift);
    }

    #[test]
    fn yaw_rate_is_zero_at_zero_rudder() {
        let c = cfg();
        let r = Appendage::rudder(-18.0, -0.46).unwrap();
        assert_eq!(steady_yaw_rate(&c, &r, None, 0.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn singular_index_is_an_error() {
        let c = cfg();
        let t = min_stabilizing_rudder(&c, -0.46, 1.5).unwrap();
        let r = Appendage {
            kind: AppendageKind::Rudder,
            lift_per_angle: t.lift_per_angle,
            station: -0.46,
            geometry: None,
        };
        let composed = with_rudder(&c, &r, 1.5).unwrap();
        // root lands within rounding of zero; force an exact zero through a symmetric body
        assert!(stability_index(&composed, 1.5).abs() < 1e-9 * stability_index(&c, 1.5).abs());
        let mut sym = c;
        sym.n_v = 0.0;
        sym.n_r = 0.0;
        let zero_r = Appendage {
            kind: AppendageKind::Rudder,
            lift_per_angle: -1e-300,
            station: -1e-300,
            geometry: None,
        };
        assert_eq!(
            steady_yaw_rate(&sym, &zero_r, None, 0.1, 1.5),
            Err(HydroError::SingularStability)
        );
    }

    #[test]
    fn threshold_is_zero_for_neutral_body() {
        let mut c = cfg();
        c.n_v = 0.0;
        c.n_r = 0.0;
        assert_eq!(stability_index(&c, 1.5), 0.0);
        assert_eq!(min_stabilizing_rudder(&c, -0.5, 1.5).unwrap().a, 0.0);
    }

    #[test]
    fn placement_window_is_exclusive() {
        let c = cfg();
        let x_r = center_of_rotation(&c, 1.5).unwrap();
        let x_ac = aerodynamic_center(&c).unwrap();
        assert!(x_r < x_ac);
        assert!(!fin_placement_valid(x_r, &c, 1.5));
        assert!(!fin_placement_valid(x_ac, &c, 1.5));
        assert!(fin_placement_valid(0.5 * (x_r + x_ac), &c, 1.5));
        let mut stable = c;
        stable.n_v = 2.0; // x_AC aft of x_r
        assert!(is_stable(&stable, 1.5));
        for k in -20..20 {
            assert!(!fin_placement_valid(k as f64 * 0.1, &stable, 1.5));
        }
    }

    #[test]
    fn rudder_lift_hand_value() {
        let l = rudder_lift_per_angle(1000.0, 3.0, 0.001, 1.5);
        assert!((l + 6.75).abs() < 1e-12);
        assert_eq!(rudder_lift_per_angle(1000.0, 3.0, 0.0, 1.5), 0.0);
        let l2 = rudder_lift_per_angle(1000.0, 3.0, 0.001, 3.0);
        assert!((l2 / l - 4.0).abs() < 1e-12);
    }

    #[test]
    fn speed_scaling_keeps_turn_radius_constant() {
        let c = cfg();
        let r = Appendage::rudder(-18.0, -0.46).unwrap();
        let rate = |u: f64| {
            steady_yaw_rate(&c.at_speed(u), &r.at_speed(u, c.u_ref), None, 0.1, u).unwrap()
        };
        // radius u/r independent of speed
        let r1 = 1.5 / rate(1.5);
        let r2 = 0.9 / rate(0.9);
        assert!((r1 - r2).abs() < 1e-9 * r1.abs());
    }

    #[test]
    fn sweep_parallel_matches_sequential() {
        let c = cfg();
        let r = Appendage::rudder(-18.0, -0.46).unwrap();
        let f = Appendage::fin(-30.0, 0.3).unwrap();
        let st: Vec<f64> = (0..64).map(|i| -0.5 + i as f64 * 0.02).collect();
        let a = sweep_fin_station(&c, &r, &f, &st, 1.5);
        let b = sweep_fin_station_seq(&c, &r, &f, &st, 1.5);
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.c.to_bits(), q.c.to_bits());
            assert_eq!(p.placement_valid, q.placement_valid);
        }
    }
}
