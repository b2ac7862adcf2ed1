//! Tunable parameters for the planners, the synthetic perception stack, the
//! simulator and classifier training. Every struct deserializes with
//! per-field defaults so partial config files only name what they change.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::planners::PlannerKind;

/// Per-planner cruise speeds and segment-duration floors.
///
/// Segment durations are distance-proportional (`distance / cruise_speed`)
/// with a floor, so the cruise speed of a planner is also its effective
/// average pace over a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub cruise_min_velocity: f64,
    pub cruise_min_acceleration: f64,
    pub cruise_min_jerk: f64,
    pub cruise_min_jerk_full_stop: f64,
    /// Lower bound on any segment duration, s.
    pub min_duration: f64,
    /// Hold time of a safe-mode hover segment, s.
    pub safe_hold_duration: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            cruise_min_velocity: 1.0,
            cruise_min_acceleration: 2.5,
            cruise_min_jerk: 2.0,
            cruise_min_jerk_full_stop: 2.1,
            min_duration: 0.25,
            safe_hold_duration: 1.5,
        }
    }
}

impl PlannerConfig {
    pub fn cruise_speed(&self, kind: PlannerKind) -> f64 {
        match kind {
            PlannerKind::MinVelocity => self.cruise_min_velocity,
            PlannerKind::MinAcceleration => self.cruise_min_acceleration,
            PlannerKind::MinJerk => self.cruise_min_jerk,
            PlannerKind::MinJerkFullStop => self.cruise_min_jerk_full_stop,
            // Safe mode holds position; pace is meaningless, return the
            // slowest cruise so duration formulas stay total.
            PlannerKind::SafeMode => self.cruise_min_velocity,
        }
    }
}

/// Additive Gaussian noise model for the synthetic gate-pose observer.
///
/// Per-component standard deviation is affine in the scalar disturbance
/// magnitude `g`: `sigma_c = base_c + gain_c * g`. The range component is
/// additionally scaled by `1 + range_coeff * r` (far gates are harder to
/// localize). Component order is `(r, phi, theta, psi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    pub base: [f64; 4],
    pub gain: [f64; 4],
    pub range_coeff: f64,
    /// Weight of the saturation knob inside the scalar magnitude
    /// `g = brightness + contrast + saturation_weight * saturation`.
    pub saturation_weight: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            base: [0.06, 0.02, 0.02, 0.02],
            gain: [0.10, 0.05, 0.05, 0.05],
            range_coeff: 0.1,
            saturation_weight: 10.0,
        }
    }
}

/// Covariance-estimator knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    /// Non-negativity floor applied per component, (m^2 or rad^2).
    pub variance_floor: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { variance_floor: 1e-8 }
    }
}

/// First-order trajectory tracker gains and saturation limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Proportional position gain, 1/s.
    pub position_gain: f64,
    /// Proportional yaw gain, 1/s.
    pub yaw_gain: f64,
    /// Speed saturation, m/s.
    pub max_speed: f64,
    /// Acceleration saturation, m/s^2.
    pub max_accel: f64,
    /// Yaw-rate saturation, rad/s.
    pub max_yaw_rate: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            position_gain: 2.0,
            yaw_gain: 3.0,
            max_speed: 4.0,
            max_accel: 8.0,
            max_yaw_rate: 3.0,
        }
    }
}

/// Cost-function constants for planner labeling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostConfig {
    /// Offset subtracted from the absolute yaw error inside the cost; the
    /// printed form uses pi/2, exposed so the experiment can also run with 0.
    pub yaw_offset: f64,
    /// Hover penalty duration charged to safe mode, s.
    pub safe_penalty_duration: f64,
    /// Nominal speed used to convert remaining distance into the remaining
    /// nominal time charged to safe mode, m/s.
    pub nominal_speed: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            yaw_offset: PI / 2.0,
            safe_penalty_duration: 1.5,
            nominal_speed: 1.0,
        }
    }
}

/// Simulator parameters shared by races and dataset generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Fixed integration step, s.
    pub dt: f64,
    /// A gate-pose observation is produced every this many steps.
    pub observe_every_steps: u32,
    /// Replanning cadence, s; a planner-selection change replans immediately.
    pub replan_period: f64,
    /// Aim distance beyond the observed gate center along its normal, m, so
    /// trajectories actually cross the gate plane.
    pub aim_overshoot: f64,
    /// Episode fails if a single gate takes longer than this, s.
    pub gate_timeout: f64,
    /// Episode fails if the whole track takes longer than this, s.
    pub episode_timeout: f64,
    /// Per-episode uniform jitter applied to gate x/y positions, m.
    pub gate_jitter_xy: f64,
    /// Per-episode uniform jitter applied to gate yaws, rad.
    pub gate_jitter_yaw: f64,
    /// Record every observation tick into the episode result (memory-heavy;
    /// decision rows are always recorded).
    pub collect_observation_log: bool,
    pub tracker: TrackerConfig,
    pub noise: NoiseModel,
    pub estimator: EstimatorConfig,
    pub planner: PlannerConfig,
    pub cost: CostConfig,
}

impl SimConfig {
    /// Checks internal consistency before a run starts.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(format!("dt {} outside (0, 0.1] s", self.dt));
        }
        if self.observe_every_steps == 0 {
            return Err("observe_every_steps must be at least 1".into());
        }
        if !(self.replan_period > 0.0) {
            return Err("replan_period must be positive".into());
        }
        if !(self.gate_timeout > 0.0 && self.episode_timeout > 0.0) {
            return Err("timeouts must be positive".into());
        }
        let p = &self.planner;
        for (name, v) in [
            ("cruise_min_velocity", p.cruise_min_velocity),
            ("cruise_min_acceleration", p.cruise_min_acceleration),
            ("cruise_min_jerk", p.cruise_min_jerk),
            ("cruise_min_jerk_full_stop", p.cruise_min_jerk_full_stop),
            ("min_duration", p.min_duration),
            ("safe_hold_duration", p.safe_hold_duration),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("planner.{name} must be positive, got {v}"));
            }
        }
        let t = &self.tracker;
        if !(t.position_gain > 0.0 && t.max_speed > 0.0 && t.max_accel > 0.0 && t.max_yaw_rate > 0.0)
        {
            return Err("tracker gains and limits must be positive".into());
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.02,
            observe_every_steps: 2,
            replan_period: 0.4,
            aim_overshoot: 0.4,
            gate_timeout: 30.0,
            episode_timeout: 180.0,
            gate_jitter_xy: 0.8,
            gate_jitter_yaw: 0.2,
            collect_observation_log: false,
            tracker: TrackerConfig::default(),
            noise: NoiseModel::default(),
            estimator: EstimatorConfig::default(),
            planner: PlannerConfig::default(),
            cost: CostConfig::default(),
        }
    }
}

/// Dataset-generation parameters: single-gate episodes with randomized
/// geometry and a mixture distribution over disturbance magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    /// Range of initial gate distances, m.
    pub gate_distance: (f64, f64),
    /// Gate azimuth drawn uniformly in `[-gate_azimuth, gate_azimuth]`, rad.
    pub gate_azimuth: f64,
    /// Gate height band, m.
    pub gate_height: (f64, f64),
    /// Attempt timeout per planner execution, s.
    pub attempt_timeout: f64,
    /// Mixture weights over the disturbance bands below (renormalized).
    pub disturbance_weights: [f64; 4],
    /// Disturbance-magnitude bands (g ranges): clean, low, heavy, extreme.
    pub disturbance_bands: [(f64, f64); 4],
    /// Initial speed band for the randomized initial state, m/s.
    pub initial_speed: (f64, f64),
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            gate_distance: (3.0, 7.0),
            gate_azimuth: 0.9,
            gate_height: (1.2, 2.5),
            attempt_timeout: 25.0,
            disturbance_weights: [0.35, 0.20, 0.25, 0.20],
            disturbance_bands: [(0.0, 0.0), (0.5, 3.0), (4.0, 8.0), (9.0, 14.0)],
            initial_speed: (0.0, 0.5),
        }
    }
}

/// Classifier architecture and optimization hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Inverse-frequency class weighting in the loss; without it the rare
    /// classes are never predicted.
    pub class_weighting: bool,
    pub train_fraction: f64,
    pub val_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_sizes: vec![64, 32],
            learning_rate: 1e-3,
            momentum: 0.9,
            batch_size: 32,
            epochs: 60,
            class_weighting: true,
            train_fraction: 0.65,
            val_fraction: 0.22,
        }
    }
}
