//! Angle helpers shared across the stack.

use std::f64::consts::PI;

/// Wraps an angle in radians to (-pi, pi].
pub fn wrap_pi(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Wraps an angle in degrees to (-180, 180].
pub fn wrap_deg(a: f64) -> f64 {
    let mut w = a % 360.0;
    if w <= -180.0 {
        w += 360.0;
    } else if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// Heading in degrees normalised to [0, 360).
pub fn heading_deg(psi: f64) -> f64 {
    let d = psi.to_degrees() % 360.0;
    if d < 0.0 {
        d + 360.0
    } else {
        d
    }
}
