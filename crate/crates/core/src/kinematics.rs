//! Closed-form ballistics for deriving launch velocities at compile time.
//!
//! Drag, spin and restitution are ignored; the flight is a drop from
//! `start_height` with a constant horizontal speed.

use serde::{Deserialize, Serialize};

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("height difference must be non-negative (got {0} m)")]
    NegativeHeight(f64),
    #[error("gravity must be positive and finite (got {0} m/s²)")]
    InvalidGravity(f64),
    #[error("horizontal distance must be non-negative and finite (got {0} m)")]
    InvalidDistance(f64),
    #[error("start height {start} m is below target height {target} m")]
    StartBelowTarget { start: f64, target: f64 },
    #[error("unreachable target: zero fall time but {distance} m of horizontal distance")]
    UnreachableTarget { distance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallisticQuery {
    pub start_height: f64,
    pub target_height: f64,
    pub horizontal_distance: f64,
    #[serde(default = "default_g")]
    pub g: f64,
}

fn default_g() -> f64 {
    STANDARD_GRAVITY
}

impl BallisticQuery {
    pub fn new(start_height: f64, target_height: f64, horizontal_distance: f64) -> Self {
        Self {
            start_height,
            target_height,
            horizontal_distance,
            g: STANDARD_GRAVITY,
        }
    }

    pub fn with_gravity(mut self, g: f64) -> Self {
        self.g = g;
        self
    }
}

/// Time for a body released at rest to fall `height_difference` meters.
pub fn fall_time(height_difference: f64, g: f64) -> Result<f64, KinematicsError> {
    if !(g.is_finite() && g > 0.0) {
        return Err(KinematicsError::InvalidGravity(g));
    }
    if !(height_difference >= 0.0) || !height_difference.is_finite() {
        return Err(KinematicsError::NegativeHeight(height_difference));
    }
    Ok((2.0 * height_difference / g).sqrt())
}

/// Launch velocity `(vx, vy, vz)` that carries a body horizontally across
/// `horizontal_distance` while it falls to `target_height`.
///
/// The query axis is +Y (the camera-to-object axis in a generated script);
/// the vertical component is always zero.
pub fn projectile_velocity(q: &BallisticQuery) -> Result<[f64; 3], KinematicsError> {
    if !(q.g.is_finite() && q.g > 0.0) {
        return Err(KinematicsError::InvalidGravity(q.g));
    }
    if !(q.horizontal_distance >= 0.0) || !q.horizontal_distance.is_finite() {
        return Err(KinematicsError::InvalidDistance(q.horizontal_distance));
    }
    if q.horizontal_distance == 0.0 {
        return Ok([0.0; 3]);
    }
    if q.start_height < q.target_height {
        return Err(KinematicsError::StartBelowTarget {
            start: q.start_height,
            target: q.target_height,
        });
    }
    let t = fall_time(q.start_height - q.target_height, q.g)?;
    if t == 0.0 {
        return Err(KinematicsError::UnreachableTarget {
            distance: q.horizontal_distance,
        });
    }
    Ok([0.0, q.horizontal_distance / t, 0.0])
}

/// Speed along the query axis; see [`projectile_velocity`].
pub fn horizontal_speed(q: &BallisticQuery) -> Result<f64, KinematicsError> {
    projectile_velocity(q).map(|v| v[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_height_falls_instantly() {
        assert_eq!(fall_time(0.0, 9.81).unwrap(), 0.0);
    }

    #[test]
    fn negative_height_is_a_domain_error() {
        assert_eq!(fall_time(-1.0, 9.81), Err(KinematicsError::NegativeHeight(-1.0)));
        assert!(fall_time(f64::NAN, 9.81).is_err());
    }

    #[test]
    fn bad_gravity() {
        assert!(fall_time(1.0, 0.0).is_err());
        assert!(fall_time(1.0, -9.81).is_err());
    }

    #[test]
    fn zero_distance_means_zero_velocity() {
        let q = BallisticQuery::new(4.0, 1.8521, 0.0);
        assert_eq!(projectile_velocity(&q).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn equal_heights_unreachable() {
        let q = BallisticQuery::new(2.0, 2.0, 5.0);
        assert!(matches!(projectile_velocity(&q), Err(KinematicsError::UnreachableTarget { .. })));
    }

    #[test]
    fn start_below_target() {
        let q = BallisticQuery::new(1.0, 2.0, 5.0);
        assert!(matches!(projectile_velocity(&q), Err(KinematicsError::StartBelowTarget { .. })));
    }

    #[test]
    fn vertical_component_is_zero() {
        let v = projectile_velocity(&BallisticQuery::new(7.0, 1.0, 12.0)).unwrap();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[2], 0.0);
        assert!(v[1] > 0.0);
    }
}
