//! Drone kinematic state shared by the planners, the switcher and the
//! simulator.

use crate::geometry::{Pose, Vec3};
use serde::{Deserialize, Serialize};

/// Kinematic drone state in the inertial frame. Attitude is yaw-dominant:
/// roll and pitch are not modeled, angular velocity is kept as the
/// `(phi_dot, theta_dot, psi_dot)` triple with only the yaw rate driven by
/// the tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub position: Vec3,
    pub yaw: f64,
    pub velocity: Vec3,
    pub angular_velocity: Vec3,
    pub acceleration: Vec3,
}

impl DroneState {
    /// State at rest at the given pose.
    pub fn at_rest(pose: Pose) -> Self {
        DroneState {
            position: pose.position,
            yaw: pose.yaw,
            velocity: Vec3::ZERO,
            angular_velocity: Vec3::ZERO,
            acceleration: Vec3::ZERO,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.position, self.yaw)
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.yaw.is_finite()
            && self.velocity.is_finite()
            && self.angular_velocity.is_finite()
            && self.acceleration.is_finite()
    }
}
