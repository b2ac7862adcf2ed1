//! Closed-form polynomial trajectory generation.
//!
//! Four planning strategies plus a hover fallback, each solved per axis as a
//! dense linear system in the endpoint constraints:
//!
//! * minimum velocity — linear, position endpoints only;
//! * minimum acceleration — cubic, position and velocity endpoints;
//! * minimum jerk — quintic, position/velocity/acceleration endpoints;
//! * minimum jerk full stop — quintic with terminal velocity and
//!   acceleration forced to zero;
//! * safe mode — constant-position hover at the current state.
//!
//! The x, y and z axes share the same time matrix with different right-hand
//! sides; yaw is interpolated with the same polynomial order along the
//! shortest arc.

use crate::config::PlannerConfig;
use crate::geometry::{wrap_angle, Vec3};
use crate::linalg::{lu_solve, SolveError};
use crate::state::DroneState;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

/// Valid segment durations, s.
pub const MIN_SEGMENT_DURATION: f64 = 1e-3;
pub const MAX_SEGMENT_DURATION: f64 = 60.0;

/// The five planning strategies, in the fixed order used for class labels
/// and usage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    MinVelocity,
    MinAcceleration,
    MinJerk,
    MinJerkFullStop,
    SafeMode,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 5] = [
        PlannerKind::MinVelocity,
        PlannerKind::MinAcceleration,
        PlannerKind::MinJerk,
        PlannerKind::MinJerkFullStop,
        PlannerKind::SafeMode,
    ];

    /// Stable index in `ALL`; also the class index of the switcher.
    pub fn index(self) -> usize {
        match self {
            PlannerKind::MinVelocity => 0,
            PlannerKind::MinAcceleration => 1,
            PlannerKind::MinJerk => 2,
            PlannerKind::MinJerkFullStop => 3,
            PlannerKind::SafeMode => 4,
        }
    }

    pub fn from_index(i: usize) -> Option<PlannerKind> {
        PlannerKind::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::MinVelocity => "min_velocity",
            PlannerKind::MinAcceleration => "min_acceleration",
            PlannerKind::MinJerk => "min_jerk",
            PlannerKind::MinJerkFullStop => "min_jerk_full_stop",
            PlannerKind::SafeMode => "safe_mode",
        }
    }

    pub fn parse(s: &str) -> Option<PlannerKind> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        PlannerKind::ALL.iter().copied().find(|k| k.name() == norm)
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Endpoint constraints for one trajectory segment. Lower-order planners
/// ignore the derivatives they do not constrain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub t_i: f64,
    pub t_f: f64,
    pub p_i: Vec3,
    pub p_f: Vec3,
    pub v_i: Vec3,
    pub v_f: Vec3,
    pub a_i: Vec3,
    pub a_f: Vec3,
    pub yaw_i: f64,
    pub yaw_f: f64,
    pub yaw_rate_i: f64,
    pub yaw_rate_f: f64,
}

impl BoundaryConditions {
    /// Rest-to-rest segment between two positions.
    pub fn rest_to_rest(t_i: f64, t_f: f64, p_i: Vec3, p_f: Vec3) -> Self {
        BoundaryConditions {
            t_i,
            t_f,
            p_i,
            p_f,
            v_i: Vec3::ZERO,
            v_f: Vec3::ZERO,
            a_i: Vec3::ZERO,
            a_f: Vec3::ZERO,
            yaw_i: 0.0,
            yaw_f: 0.0,
            yaw_rate_i: 0.0,
            yaw_rate_f: 0.0,
        }
    }

    pub fn duration(&self) -> f64 {
        self.t_f - self.t_i
    }

    fn validate(&self) -> Result<(), PlanError> {
        let d = self.duration();
        if !d.is_finite() || !(MIN_SEGMENT_DURATION..=MAX_SEGMENT_DURATION).contains(&d) {
            return Err(PlanError::BadDuration { duration: d });
        }
        let finite = self.t_i.is_finite()
            && self.p_i.is_finite()
            && self.p_f.is_finite()
            && self.v_i.is_finite()
            && self.v_f.is_finite()
            && self.a_i.is_finite()
            && self.a_f.is_finite()
            && self.yaw_i.is_finite()
            && self.yaw_f.is_finite()
            && self.yaw_rate_i.is_finite()
            && self.yaw_rate_f.is_finite();
        if !finite {
            return Err(PlanError::NonFinite);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("segment duration {duration} outside [{MIN_SEGMENT_DURATION}, {MAX_SEGMENT_DURATION}] s")]
    BadDuration { duration: f64 },
    #[error("non-finite boundary condition")]
    NonFinite,
    #[error("degenerate segment timing: {0}")]
    Degenerate(#[from] SolveError),
}

/// Kinematic sample of a trajectory at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub yaw: f64,
    pub yaw_rate: f64,
    /// True when the query time fell outside the segment window and was
    /// clamped to the nearest endpoint.
    pub clamped: bool,
}

/// Per-axis polynomial coefficients over a time window.
///
/// Coefficients are in powers of local segment time `tau = t - t_i`, lowest
/// order first, so conditioning never depends on absolute time and shifting
/// a window leaves the solution bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTrajectory {
    pub kind: PlannerKind,
    pub t_i: f64,
    pub t_f: f64,
    axes: [Vec<f64>; 3],
    yaw: Vec<f64>,
}

impl PolynomialTrajectory {
    pub fn duration(&self) -> f64 {
        self.t_f - self.t_i
    }

    /// Coefficients of one position axis (0 = x, 1 = y, 2 = z) in local
    /// segment time, lowest order first.
    pub fn axis_coefficients(&self, axis: usize) -> &[f64] {
        &self.axes[axis]
    }

    pub fn yaw_coefficients(&self) -> &[f64] {
        &self.yaw
    }

    /// Evaluates position, velocity and acceleration at `t`. Times outside
    /// the window are clamped to the nearest endpoint and flagged.
    pub fn evaluate(&self, t: f64) -> TrajectorySample {
        let clamped = t < self.t_i || t > self.t_f;
        let tc = t.clamp(self.t_i, self.t_f);
        let tau = tc - self.t_i;
        let (px, vx, ax) = eval_with_derivatives(&self.axes[0], tau);
        let (py, vy, ay) = eval_with_derivatives(&self.axes[1], tau);
        let (pz, vz, az) = eval_with_derivatives(&self.axes[2], tau);
        let (yaw, yaw_rate, _) = eval_with_derivatives(&self.yaw, tau);
        TrajectorySample {
            t: tc,
            position: Vec3::new(px, py, pz),
            velocity: Vec3::new(vx, vy, vz),
            acceleration: Vec3::new(ax, ay, az),
            yaw,
            yaw_rate,
            clamped,
        }
    }

    /// Samples the trajectory at `samples + 1` uniformly spaced times and
    /// writes CSV rows `t,x,y,z,vx,vy,vz,ax,ay,az,yaw`.
    pub fn write_csv<W: Write>(&self, samples: usize, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,x,y,z,vx,vy,vz,ax,ay,az,yaw")?;
        let n = samples.max(1);
        for i in 0..=n {
            let t = self.t_i + self.duration() * (i as f64) / (n as f64);
            let s = self.evaluate(t);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.position.x,
                s.position.y,
                s.position.z,
                s.velocity.x,
                s.velocity.y,
                s.velocity.z,
                s.acceleration.x,
                s.acceleration.y,
                s.acceleration.z,
                s.yaw
            )?;
        }
        Ok(())
    }
}

/// Horner evaluation of a polynomial and its first two derivatives.
fn eval_with_derivatives(coeffs: &[f64], t: f64) -> (f64, f64, f64) {
    let mut p = 0.0;
    let mut v = 0.0;
    let mut a = 0.0;
    for &c in coeffs.iter().rev() {
        a = a * t + 2.0 * v;
        v = v * t + p;
        p = p * t + c;
    }
    (p, v, a)
}

/// Row of the constraint matrix: the `order`-th derivative of
/// `[1, t, t^2, ...]` evaluated at `t`.
fn constraint_row<const N: usize>(t: f64, order: usize) -> [f64; N] {
    let mut row = [0.0; N];
    for (k, slot) in row.iter_mut().enumerate() {
        if k >= order {
            let mut c = 1.0;
            for j in 0..order {
                c *= (k - j) as f64;
            }
            *slot = c * t.powi((k - order) as i32);
        }
    }
    row
}

fn solve_axis<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Result<Vec<f64>, PlanError> {
    Ok(lu_solve(a, b)?.to_vec())
}

/// Linear interpolation constrained by endpoint positions only: the 2x2
/// system `[1 t_i; 1 t_f]` in local segment time.
pub fn plan_min_velocity(bc: &BoundaryConditions) -> Result<PolynomialTrajectory, PlanError> {
    bc.validate()?;
    let dur = bc.duration();
    let a = [constraint_row::<2>(0.0, 0), constraint_row::<2>(dur, 0)];
    let yaw_f = bc.yaw_i + wrap_angle(bc.yaw_f - bc.yaw_i);
    Ok(PolynomialTrajectory {
        kind: PlannerKind::MinVelocity,
        t_i: bc.t_i,
        t_f: bc.t_f,
        axes: [
            solve_axis(&a, &[bc.p_i.x, bc.p_f.x])?,
            solve_axis(&a, &[bc.p_i.y, bc.p_f.y])?,
            solve_axis(&a, &[bc.p_i.z, bc.p_f.z])?,
        ],
        yaw: solve_axis(&a, &[bc.yaw_i, yaw_f])?,
    })
}

/// Cubic interpolation constrained by endpoint positions and velocities: the
/// 4x4 system in `(p_i, v_i, p_f, v_f)`.
pub fn plan_min_acceleration(bc: &BoundaryConditions) -> Result<PolynomialTrajectory, PlanError> {
    bc.validate()?;
    let dur = bc.duration();
    let a = [
        constraint_row::<4>(0.0, 0),
        constraint_row::<4>(0.0, 1),
        constraint_row::<4>(dur, 0),
        constraint_row::<4>(dur, 1),
    ];
    let yaw_f = bc.yaw_i + wrap_angle(bc.yaw_f - bc.yaw_i);
    Ok(PolynomialTrajectory {
        kind: PlannerKind::MinAcceleration,
        t_i: bc.t_i,
        t_f: bc.t_f,
        axes: [
            solve_axis(&a, &[bc.p_i.x, bc.v_i.x, bc.p_f.x, bc.v_f.x])?,
            solve_axis(&a, &[bc.p_i.y, bc.v_i.y, bc.p_f.y, bc.v_f.y])?,
            solve_axis(&a, &[bc.p_i.z, bc.v_i.z, bc.p_f.z, bc.v_f.z])?,
        ],
        yaw: solve_axis(&a, &[bc.yaw_i, bc.yaw_rate_i, yaw_f, bc.yaw_rate_f])?,
    })
}

/// Quintic interpolation constrained by endpoint positions, velocities and
/// accelerations: the 6x6 system in `(p_i, v_i, a_i, p_f, v_f, a_f)`.
///
/// With `full_stop` the terminal velocity and acceleration are forced to
/// zero regardless of what the boundary conditions request.
pub fn plan_min_jerk(
    bc: &BoundaryConditions,
    full_stop: bool,
) -> Result<PolynomialTrajectory, PlanError> {
    bc.validate()?;
    let dur = bc.duration();
    let a = [
        constraint_row::<6>(0.0, 0),
        constraint_row::<6>(0.0, 1),
        constraint_row::<6>(0.0, 2),
        constraint_row::<6>(dur, 0),
        constraint_row::<6>(dur, 1),
        constraint_row::<6>(dur, 2),
    ];
    let (v_f, a_f, yaw_rate_f) = if full_stop {
        (Vec3::ZERO, Vec3::ZERO, 0.0)
    } else {
        (bc.v_f, bc.a_f, bc.yaw_rate_f)
    };
    let yaw_f = bc.yaw_i + wrap_angle(bc.yaw_f - bc.yaw_i);
    Ok(PolynomialTrajectory {
        kind: if full_stop { PlannerKind::MinJerkFullStop } else { PlannerKind::MinJerk },
        t_i: bc.t_i,
        t_f: bc.t_f,
        axes: [
            solve_axis(&a, &[bc.p_i.x, bc.v_i.x, bc.a_i.x, bc.p_f.x, v_f.x, a_f.x])?,
            solve_axis(&a, &[bc.p_i.y, bc.v_i.y, bc.a_i.y, bc.p_f.y, v_f.y, a_f.y])?,
            solve_axis(&a, &[bc.p_i.z, bc.v_i.z, bc.a_i.z, bc.p_f.z, v_f.z, a_f.z])?,
        ],
        yaw: solve_axis(&a, &[bc.yaw_i, bc.yaw_rate_i, 0.0, yaw_f, yaw_rate_f, 0.0])?,
    })
}

/// Constant-position hover at the current state for `hold_duration` seconds,
/// starting at `t_i`.
pub fn plan_safe_mode(
    current: &DroneState,
    t_i: f64,
    hold_duration: f64,
) -> Result<PolynomialTrajectory, PlanError> {
    if !(hold_duration.is_finite() && hold_duration > 0.0) {
        return Err(PlanError::BadDuration { duration: hold_duration });
    }
    if !current.is_finite() || !t_i.is_finite() {
        return Err(PlanError::NonFinite);
    }
    Ok(PolynomialTrajectory {
        kind: PlannerKind::SafeMode,
        t_i,
        t_f: t_i + hold_duration,
        axes: [
            vec![current.position.x],
            vec![current.position.y],
            vec![current.position.z],
        ],
        yaw: vec![current.yaw],
    })
}

/// Segment duration for a planner: distance-proportional at the planner's
/// cruise speed, floored at the configured minimum. Safe mode always holds
/// for its configured duration.
pub fn plan_duration(distance: f64, kind: PlannerKind, config: &PlannerConfig) -> f64 {
    match kind {
        PlannerKind::SafeMode => config.safe_hold_duration,
        _ => (distance.max(0.0) / config.cruise_speed(kind)).max(config.min_duration),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn single_axis_bc(t_i: f64, t_f: f64, p: (f64, f64), v: (f64, f64), a: (f64, f64)) -> BoundaryConditions {
        BoundaryConditions {
            t_i,
            t_f,
            p_i: Vec3::new(p.0, 0.0, 0.0),
            p_f: Vec3::new(p.1, 0.0, 0.0),
            v_i: Vec3::new(v.0, 0.0, 0.0),
            v_f: Vec3::new(v.1, 0.0, 0.0),
            a_i: Vec3::new(a.0, 0.0, 0.0),
            a_f: Vec3::new(a.1, 0.0, 0.0),
            yaw_i: 0.0,
            yaw_f: 0.0,
            yaw_rate_i: 0.0,
            yaw_rate_f: 0.0,
        }
    }

    #[test]
    fn min_velocity_slope_is_forced() {
        let bc = single_axis_bc(0.0, 2.0, (1.0, 5.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_velocity(&bc).unwrap();
        let c = traj.axis_coefficients(0);
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c[1], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn min_velocity_identity_when_endpoints_match() {
        let bc = single_axis_bc(0.5, 1.5, (3.0, 3.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_velocity(&bc).unwrap();
        let c = traj.axis_coefficients(0);
        assert_abs_diff_eq!(c[0], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn min_acceleration_classic_ease_curve() {
        // 0 -> 1 over [0, 1] at rest: 3t^2 - 2t^3.
        let bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_acceleration(&bc).unwrap();
        let c = traj.axis_coefficients(0);
        let expected = [0.0, 0.0, 3.0, -2.0];
        for (got, want) in c.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn min_acceleration_rest_at_same_point() {
        let bc = single_axis_bc(0.0, 1.0, (2.5, 2.5), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_acceleration(&bc).unwrap();
        let c = traj.axis_coefficients(0);
        assert_abs_diff_eq!(c[0], 2.5, epsilon = 1e-10);
        for &v in &c[1..] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn min_jerk_canonical_quintic() {
        let bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_jerk(&bc, false).unwrap();
        let c = traj.axis_coefficients(0);
        let expected = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];
        for (got, want) in c.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn min_jerk_rest_at_same_point() {
        let bc = single_axis_bc(0.0, 1.0, (1.5, 1.5), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_jerk(&bc, false).unwrap();
        let c = traj.axis_coefficients(0);
        assert_abs_diff_eq!(c[0], 1.5, epsilon = 1e-10);
        for &v in &c[1..] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn full_stop_overrides_requested_terminal_rates() {
        let bc = single_axis_bc(0.0, 2.0, (0.0, 3.0), (1.0, 2.0), (0.0, 1.0));
        let traj = plan_min_jerk(&bc, true).unwrap();
        let end = traj.evaluate(2.0);
        assert_abs_diff_eq!(end.velocity.x, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(end.acceleration.x, 0.0, epsilon = 1e-8);
        assert_eq!(traj.kind, PlannerKind::MinJerkFullStop);
    }

    #[test]
    fn safe_mode_holds_position() {
        let mut state = DroneState::at_rest(crate::geometry::Pose::new(Vec3::new(1.0, -2.0, 3.0), 0.4));
        state.velocity = Vec3::new(0.5, 0.0, 0.0);
        let traj = plan_safe_mode(&state, 0.0, 1.0).unwrap();
        for i in 0..=10 {
            let s = traj.evaluate(0.1 * i as f64);
            assert_abs_diff_eq!(s.position.x, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.position.y, -2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.position.z, 3.0, epsilon = 1e-12);
            assert_eq!(s.velocity, Vec3::ZERO);
        }
        // Chained hover segments stay continuous at the joint.
        let next = plan_safe_mode(&state, traj.t_f, 1.0).unwrap();
        let a = traj.evaluate(traj.t_f).position;
        let b = next.evaluate(traj.t_f).position;
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_linear_segment() {
        let bc = single_axis_bc(0.0, 2.0, (1.0, 5.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_velocity(&bc).unwrap();
        let s = traj.evaluate(0.5);
        assert_abs_diff_eq!(s.position.x, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.velocity.x, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.acceleration.x, 0.0, epsilon = 1e-10);
        assert!(!s.clamped);
    }

    #[test]
    fn evaluate_quintic_midpoint_symmetry() {
        let bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_jerk(&bc, false).unwrap();
        assert_abs_diff_eq!(traj.evaluate(0.5).position.x, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn evaluate_clamps_outside_window() {
        let bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        let traj = plan_min_jerk(&bc, false).unwrap();
        let before = traj.evaluate(-1.0);
        assert!(before.clamped);
        assert_abs_diff_eq!(before.position.x, 0.0, epsilon = 1e-9);
        let after = traj.evaluate(5.0);
        assert!(after.clamped);
        assert_abs_diff_eq!(after.position.x, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_duration_rejected() {
        let bc = single_axis_bc(1.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        assert!(matches!(plan_min_velocity(&bc), Err(PlanError::BadDuration { .. })));
        let bc = single_axis_bc(0.0, f64::NAN, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        assert!(matches!(plan_min_jerk(&bc, false), Err(PlanError::BadDuration { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let mut bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        bc.p_f.y = f64::INFINITY;
        assert!(matches!(plan_min_acceleration(&bc), Err(PlanError::NonFinite)));
    }

    #[test]
    fn plan_duration_examples() {
        let cfg = PlannerConfig::default();
        assert_eq!(plan_duration(0.0, PlannerKind::MinVelocity, &cfg), cfg.min_duration);
        assert_abs_diff_eq!(
            plan_duration(4.0, PlannerKind::MinVelocity, &cfg),
            4.0,
            epsilon = 1e-12
        );
        assert_eq!(plan_duration(100.0, PlannerKind::SafeMode, &cfg), cfg.safe_hold_duration);
    }

    #[test]
    fn yaw_interpolates_along_shortest_arc() {
        let mut bc = single_axis_bc(0.0, 1.0, (0.0, 1.0), (0.0, 0.0), (0.0, 0.0));
        bc.yaw_i = 3.0;
        bc.yaw_f = -3.0; // short way crosses the branch cut
        let traj = plan_min_velocity(&bc).unwrap();
        let mid = traj.evaluate(0.5).yaw;
        // Midpoint should sit past +pi rather than at 0.
        assert!(mid > 3.0, "yaw went the long way: {mid}");
    }

    fn arb_bc() -> impl Strategy<Value = BoundaryConditions> {
        (
            -2.0f64..5.0,
            0.25f64..8.0,
            proptest::array::uniform6(-5.0f64..5.0),
            proptest::array::uniform6(-2.0f64..2.0),
            proptest::array::uniform6(-1.0f64..1.0),
            (-3.0f64..3.0, -3.0f64..3.0),
        )
            .prop_map(|(t_i, dur, p, v, a, yaws)| BoundaryConditions {
                t_i,
                t_f: t_i + dur,
                p_i: Vec3::new(p[0], p[1], p[2]),
                p_f: Vec3::new(p[3], p[4], p[5]),
                v_i: Vec3::new(v[0], v[1], v[2]),
                v_f: Vec3::new(v[3], v[4], v[5]),
                a_i: Vec3::new(a[0], a[1], a[2]),
                a_f: Vec3::new(a[3], a[4], a[5]),
                yaw_i: yaws.0,
                yaw_f: yaws.1,
                yaw_rate_i: 0.0,
                yaw_rate_f: 0.0,
            })
    }

    proptest! {
        /// Boundary exactness: evaluation at the endpoints reproduces every
        /// constrained quantity.
        #[test]
        fn boundary_exactness(bc in arb_bc()) {
            let tol = 1e-7;

            let lin = plan_min_velocity(&bc).unwrap();
            prop_assert!((lin.evaluate(bc.t_i).position - bc.p_i).norm() < tol);
            prop_assert!((lin.evaluate(bc.t_f).position - bc.p_f).norm() < tol);

            let cubic = plan_min_acceleration(&bc).unwrap();
            prop_assert!((cubic.evaluate(bc.t_i).position - bc.p_i).norm() < tol);
            prop_assert!((cubic.evaluate(bc.t_f).position - bc.p_f).norm() < tol);
            prop_assert!((cubic.evaluate(bc.t_i).velocity - bc.v_i).norm() < tol);
            prop_assert!((cubic.evaluate(bc.t_f).velocity - bc.v_f).norm() < tol);

            let quintic = plan_min_jerk(&bc, false).unwrap();
            prop_assert!((quintic.evaluate(bc.t_i).position - bc.p_i).norm() < tol);
            prop_assert!((quintic.evaluate(bc.t_f).position - bc.p_f).norm() < tol);
            prop_assert!((quintic.evaluate(bc.t_i).velocity - bc.v_i).norm() < tol);
            prop_assert!((quintic.evaluate(bc.t_f).velocity - bc.v_f).norm() < tol);
            prop_assert!((quintic.evaluate(bc.t_i).acceleration - bc.a_i).norm() < tol);
            prop_assert!((quintic.evaluate(bc.t_f).acceleration - bc.a_f).norm() < tol);
        }

        /// Degree correctness: the linear planner has zero acceleration
        /// everywhere, the cubic has linear acceleration, and the full-stop
        /// quintic comes to rest for every input.
        #[test]
        fn degree_and_full_stop_contracts(bc in arb_bc(), frac in 0.0f64..1.0) {
            let t = bc.t_i + frac * bc.duration();

            let lin = plan_min_velocity(&bc).unwrap();
            prop_assert!(lin.evaluate(t).acceleration.norm() < 1e-9);

            // Cubic acceleration is linear in t: check the midpoint identity
            // a((t1+t2)/2) = (a(t1)+a(t2))/2.
            let cubic = plan_min_acceleration(&bc).unwrap();
            let a1 = cubic.evaluate(bc.t_i).acceleration;
            let a2 = cubic.evaluate(bc.t_f).acceleration;
            let mid = cubic.evaluate(bc.t_i + 0.5 * bc.duration()).acceleration;
            prop_assert!((mid - (a1 + a2) * 0.5).norm() < 1e-6);

            let fs = plan_min_jerk(&bc, true).unwrap();
            let end = fs.evaluate(bc.t_f);
            prop_assert!(end.velocity.norm() < 1e-7);
            prop_assert!(end.acceleration.norm() < 1e-7);
        }

        /// Time-shift equivariance: shifting the window by delta and
        /// evaluating at t + delta yields identical kinematics.
        #[test]
        fn time_shift_equivariance(bc in arb_bc(), delta in -3.0f64..3.0, frac in 0.0f64..1.0) {
            let mut shifted = bc;
            shifted.t_i += delta;
            shifted.t_f += delta;
            let a = plan_min_jerk(&bc, false).unwrap();
            let b = plan_min_jerk(&shifted, false).unwrap();
            let t = bc.t_i + frac * bc.duration();
            let sa = a.evaluate(t);
            let sb = b.evaluate(t + delta);
            prop_assert!((sa.position - sb.position).norm() < 1e-9);
            prop_assert!((sa.velocity - sb.velocity).norm() < 1e-8);
            prop_assert!((sa.acceleration - sb.acceleration).norm() < 1e-7);
        }

        /// Durations are monotone non-decreasing in distance.
        #[test]
        fn duration_monotone_in_distance(d1 in 0.0f64..50.0, d2 in 0.0f64..50.0) {
            let cfg = PlannerConfig::default();
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            for kind in PlannerKind::ALL {
                prop_assert!(plan_duration(lo, kind, &cfg) <= plan_duration(hi, kind, &cfg));
            }
        }
    }
}
