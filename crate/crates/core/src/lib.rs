//! Uncertainty-driven motion-planner switching for agile gate navigation.
//!
//! The crate combines:
//!
//! * [`geometry`] — frame conventions and spherical/Cartesian gate-pose
//!   conversions;
//! * [`planners`] — closed-form polynomial trajectory generation (minimum
//!   velocity / acceleration / jerk, full-stop variant, safe-mode hover);
//! * [`perception`] — a synthetic noisy gate-pose observer plus a 12-frame
//!   sliding-window covariance estimator;
//! * [`switcher`] — feature extraction, cost-based labeling, dataset
//!   generation, a from-scratch softmax classifier and runtime planner
//!   selection;
//! * [`simulator`] — a kinematic race simulator with gate-pass/crash
//!   detection and the experiment harness producing success-rate and
//!   lap-time metrics.
//!
//! All randomness flows through caller-provided seeds; identical seeds give
//! bit-identical observation streams, datasets, models and metrics.

pub mod config;
pub mod geometry;
pub mod linalg;
pub mod perception;
pub mod planners;
pub mod state;

pub use geometry::{GatePoseSpherical, Pose, Vec3};
pub use planners::{BoundaryConditions, PlannerKind, PolynomialTrajectory};
pub use state::DroneState;
