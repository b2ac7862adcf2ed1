//! Frame conventions and conversions between Cartesian inertial/body
//! coordinates and the spherical gate-pose parameterization.
//!
//! Conventions used throughout:
//! * inertial frame: x/y horizontal, z up;
//! * body frame: rotated about z by the drone yaw (yaw-dominant attitude,
//!   roll/pitch are not modeled);
//! * spherical gate pose `(r, psi, theta, phi)`: range, azimuth, inclination
//!   of the gate center seen from the body frame, plus the yaw difference
//!   `phi` between body and gate frame;
//! * all angles normalized to `(-pi, pi]`, inclination `theta` in `[0, pi]`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// Wraps an angle to `(-pi, pi]`; ties at the branch cut resolve to `+pi`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Shortest signed arc from `from` to `to`, in `(-pi, pi]`.
pub fn angle_diff(to: f64, from: f64) -> f64 {
    wrap_angle(to - from)
}

/// 3-vector in meters (or rad when used for orientation triples).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Unit vector in the same direction, or zero for (near-)zero input.
    pub fn normalized(&self) -> Vec3 {
        let n = self.norm();
        if n < 1e-12 {
            Vec3::ZERO
        } else {
            *self * (1.0 / n)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Relative gate pose in the drone body frame: range `r`, azimuth `psi`,
/// inclination `theta`, and yaw difference `phi` between body and gate frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatePoseSpherical {
    /// Distance between body-frame origin and gate-frame origin, m.
    pub r: f64,
    /// Azimuth in `(-pi, pi]`, rad.
    pub psi: f64,
    /// Inclination from the body z-axis in `[0, pi]`, rad.
    pub theta: f64,
    /// Yaw difference between body and gate frame in `(-pi, pi]`, rad.
    pub phi: f64,
}

impl GatePoseSpherical {
    pub fn new(r: f64, psi: f64, theta: f64, phi: f64) -> Self {
        GatePoseSpherical {
            r: r.max(0.0),
            psi: wrap_angle(psi),
            theta: theta.clamp(0.0, PI),
            phi: wrap_angle(phi),
        }
    }

    /// Components in the fixed `(r, phi, theta, psi)` order used by the
    /// covariance pipeline.
    pub fn components(&self) -> [f64; 4] {
        [self.r, self.phi, self.theta, self.psi]
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.psi.is_finite() && self.theta.is_finite() && self.phi.is_finite()
    }
}

/// Position plus yaw in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub yaw: f64,
}

impl Pose {
    pub fn new(position: Vec3, yaw: f64) -> Self {
        Pose { position, yaw: wrap_angle(yaw) }
    }
}

/// Spherical gate pose to a Cartesian body-frame vector.
///
/// Uses the norm-preserving convention `x = r sin(theta) cos(psi)`,
/// `y = r sin(theta) sin(psi)`, `z = r cos(theta)`, so the returned vector
/// always has Euclidean norm `r`.
pub fn spherical_to_cartesian(p: &GatePoseSpherical) -> Vec3 {
    let st = p.theta.sin();
    Vec3::new(p.r * st * p.psi.cos(), p.r * st * p.psi.sin(), p.r * p.theta.cos())
}

/// Cartesian body-frame vector to spherical gate pose; `phi` is not derivable
/// from a position vector and is supplied separately.
///
/// Near-zero vectors (norm below 1e-9) collapse to `r = 0` with both angles
/// zero by convention.
pub fn cartesian_to_spherical(v: &Vec3, phi: f64) -> GatePoseSpherical {
    let r = v.norm();
    if r < 1e-9 {
        return GatePoseSpherical::new(0.0, 0.0, 0.0, phi);
    }
    let horiz = (v.x * v.x + v.y * v.y).sqrt();
    GatePoseSpherical::new(r, v.y.atan2(v.x), horiz.atan2(v.z), phi)
}

/// Rotates an inertial-frame vector into the body frame of a drone at `yaw`.
pub fn inertial_to_body(v: &Vec3, yaw: f64) -> Vec3 {
    let (s, c) = yaw.sin_cos();
    Vec3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
}

/// Rotates a body-frame vector into the inertial frame.
pub fn body_to_inertial(v: &Vec3, yaw: f64) -> Vec3 {
    let (s, c) = yaw.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Relative gate pose seen from the drone: the gate position is expressed in
/// the drone body frame and converted to spherical coordinates; `phi` is the
/// yaw difference between the two frames.
pub fn relative_gate_pose(drone: &Pose, gate: &Pose) -> GatePoseSpherical {
    let body = inertial_to_body(&(gate.position - drone.position), drone.yaw);
    cartesian_to_spherical(&body, angle_diff(gate.yaw, drone.yaw))
}

/// Inverse composition: recovers the gate pose in the inertial frame from the
/// drone pose and a relative (body-frame) gate pose.
pub fn compose_gate_pose(drone: &Pose, rel: &GatePoseSpherical) -> Pose {
    let body = spherical_to_cartesian(rel);
    Pose::new(drone.position + body_to_inertial(&body, drone.yaw), drone.yaw + rel.phi)
}
