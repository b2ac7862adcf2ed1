//! Kinematic race simulator: trajectory-tracking drone model, gate-pass and
//! crash detection, disturbance scheduling, episode orchestration and the
//! success-rate / lap-time experiment harness.
//!
//! One episode is one isolated state machine driven by a seeded random
//! stream; identical `(config, seed)` pairs reproduce episode logs
//! bit-exactly. Experiments pair policies by episode index: every policy
//! sees the same jittered track and the same perception noise stream for a
//! given episode, so success and lap-time comparisons are paired.

mod metrics;
mod track;

pub use metrics::{summarize, write_metrics_csv, ExperimentResult, PolicyMetrics};
pub use track::{Track, TrackError};

use crate::config::{SimConfig, TrackerConfig};
use crate::geometry::{wrap_angle, GatePoseSpherical, Pose, Vec3};
use crate::perception::{
    estimate_covariance, observe, CovarianceEstimate, DisturbanceLevel, DisturbanceSchedule,
    ObservationLogRow, ObservationWindow,
};
use crate::planners::{
    plan_duration, plan_min_acceleration, plan_min_jerk, plan_min_velocity, plan_safe_mode,
    BoundaryConditions, PlanError, PlannerKind, PolynomialTrajectory,
};
use crate::seeding::mix_seed2;
use crate::state::DroneState;
use crate::switcher::{extract_features, select_planner, TrainedModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

/// Stream tags for per-episode seed derivation.
const STREAM_LAYOUT: u64 = 0x6c61_796f;
const STREAM_NOISE: u64 = 0x6e6f_6973;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error("planning failed mid-episode: {0}")]
    Plan(#[from] PlanError),
    #[error("simulation fault: {0}")]
    Fault(String),
}

/// Why an episode ended without success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashCause {
    GateStrike,
    OutOfBounds,
    Timeout,
    None,
}

/// Outcome of a plane-crossing test against one gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateInteraction {
    Passed,
    Struck,
    Neither,
}

/// Physical constants of a gate, taken from the track.
#[derive(Debug, Clone, Copy)]
pub struct GateGeometry {
    pub side: f64,
    pub frame_width: f64,
    pub clearance: f64,
}

impl Track {
    pub fn gate_geometry(&self) -> GateGeometry {
        GateGeometry {
            side: self.gate_side,
            frame_width: self.frame_width,
            clearance: self.clearance,
        }
    }
}

/// High-level policy driving planner selection during an episode.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    /// Always use the given planner.
    Fixed(PlannerKind),
    /// Select per decision from the trained switcher; safe mode during
    /// estimator warm-up.
    Uds(&'a TrainedModel),
}

impl Policy<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Fixed(kind) => kind.name(),
            Policy::Uds(_) => "uds",
        }
    }
}

/// One planning decision, logged for the episode time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionLogRow {
    pub t: f64,
    pub planner: PlannerKind,
    pub position: Vec3,
    pub yaw: f64,
    pub target_gate: usize,
    pub observed: GatePoseSpherical,
    pub estimate: Option<CovarianceEstimate>,
    pub disturbance_magnitude: f64,
}

/// Result of one episode (or one single-gate attempt).
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub success: bool,
    /// Present only on success.
    pub lap_time: Option<f64>,
    pub crash_cause: CrashCause,
    /// Planning decisions per planner, indexed by [`PlannerKind::index`].
    pub planner_usage: [u32; 5],
    pub decisions: u32,
    pub gates_passed: usize,
    /// Selections that fell back to safe mode on non-finite features.
    pub fallback_selections: u32,
    pub final_state: DroneState,
    pub elapsed: f64,
    pub log: Vec<DecisionLogRow>,
    pub observations: Vec<ObservationLogRow>,
}

/// First-order tracking step: velocity command = trajectory velocity plus a
/// proportional position correction, saturated at the speed and acceleration
/// limits, integrated by semi-implicit Euler. Yaw is tracked identically
/// with its own gain and rate limit.
pub fn step(
    state: &DroneState,
    traj: &PolynomialTrajectory,
    traj_time: f64,
    dt: f64,
    cfg: &TrackerConfig,
) -> Result<DroneState, SimError> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(SimError::Config(format!("step dt {dt} outside (0, 0.1]")));
    }
    if !state.is_finite() {
        return Err(SimError::Fault("non-finite drone state".into()));
    }
    let r = traj.evaluate(traj_time);

    let mut v_cmd = r.velocity + (r.position - state.position) * cfg.position_gain;
    let speed = v_cmd.norm();
    if speed > cfg.max_speed {
        v_cmd = v_cmd * (cfg.max_speed / speed);
    }
    let mut dv = v_cmd - state.velocity;
    let dv_norm = dv.norm();
    let dv_max = cfg.max_accel * dt;
    if dv_norm > dv_max {
        dv = dv * (dv_max / dv_norm);
    }
    let velocity = state.velocity + dv;
    let position = state.position + velocity * dt;

    let yaw_rate = (r.yaw_rate + cfg.yaw_gain * wrap_angle(r.yaw - state.yaw))
        .clamp(-cfg.max_yaw_rate, cfg.max_yaw_rate);
    let yaw = wrap_angle(state.yaw + yaw_rate * dt);

    let next = DroneState {
        position,
        yaw,
        velocity,
        angular_velocity: Vec3::new(0.0, 0.0, yaw_rate),
        acceleration: dv * (1.0 / dt),
    };
    if !next.is_finite() {
        return Err(SimError::Fault("tracking step produced non-finite state".into()));
    }
    Ok(next)
}

/// Tests the movement segment `prev -> next` against one gate.
///
/// A forward crossing (along the gate normal) through the opening with at
/// least `clearance` margin from the frame is a pass. Any crossing within
/// the frame band, or closer than `clearance` to it, is a strike. Everything
/// else (no crossing, a wide miss, or a backward crossing through the
/// opening) is neither.
pub fn check_gate_pass(
    prev: &DroneState,
    next: &DroneState,
    gate: &Pose,
    geo: &GateGeometry,
) -> GateInteraction {
    let (sin_yaw, cos_yaw) = gate.yaw.sin_cos();
    let normal = Vec3::new(cos_yaw, sin_yaw, 0.0);
    let s_prev = normal.dot(&(prev.position - gate.position));
    let s_next = normal.dot(&(next.position - gate.position));

    let forward = s_prev < 0.0 && s_next >= 0.0;
    let backward = s_prev > 0.0 && s_next <= 0.0;
    if !forward && !backward {
        return GateInteraction::Neither;
    }

    let alpha = s_prev / (s_prev - s_next);
    let cross = prev.position + (next.position - prev.position) * alpha;
    let in_plane = Vec3::new(-sin_yaw, cos_yaw, 0.0);
    let u = in_plane.dot(&(cross - gate.position));
    let w = cross.z - gate.position.z;
    let offset = u.abs().max(w.abs());

    let half = geo.side / 2.0;
    if offset < half - geo.clearance {
        if forward {
            GateInteraction::Passed
        } else {
            GateInteraction::Neither
        }
    } else if offset <= half + geo.frame_width + geo.clearance {
        GateInteraction::Struck
    } else {
        GateInteraction::Neither
    }
}

/// Everything an episode run needs beyond the public arguments.
struct EpisodeSetup<'a> {
    gates: Vec<Pose>,
    geometry: GateGeometry,
    bounds_min: Vec3,
    bounds_max: Vec3,
    initial: DroneState,
    policy: Policy<'a>,
    schedule: &'a DisturbanceSchedule,
    schedule_offset: f64,
    /// Carry-through direction after the last gate (for the plain min-jerk
    /// planner); defaults to the last gate's normal.
    final_direction: Option<Vec3>,
    gate_timeout: f64,
    episode_timeout: f64,
}

fn gate_normal(gate: &Pose) -> Vec3 {
    let (s, c) = gate.yaw.sin_cos();
    Vec3::new(c, s, 0.0)
}

/// Core episode loop shared by races and dataset-generation attempts.
fn run_setup(
    setup: EpisodeSetup<'_>,
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
) -> Result<EpisodeResult, SimError> {
    cfg.validate().map_err(SimError::Config)?;
    if setup.gates.is_empty() {
        return Err(SimError::Config("episode needs at least one gate".into()));
    }

    let mut state = setup.initial;
    let mut t = 0.0f64;
    let mut step_index = 0u64;
    let mut frame_index = 0u64;

    let mut window = ObservationWindow::new();
    let mut cov: Option<CovarianceEstimate> = None;
    // Latest observation composed into an inertial-frame aim pose.
    let mut est_gate: Option<(Pose, GatePoseSpherical)> = None;

    let mut traj: Option<PolynomialTrajectory> = None;
    let mut traj_start = 0.0f64;
    let mut active: Option<PlannerKind> = None;
    let mut last_plan_t = f64::NEG_INFINITY;
    let mut force_replan = true;

    let mut gate_idx = 0usize;
    let mut gate_entered_t = 0.0f64;

    let mut usage = [0u32; 5];
    let mut decisions = 0u32;
    let mut fallbacks = 0u32;
    let mut log = Vec::new();
    let mut observations = Vec::new();

    let mut desired = match setup.policy {
        Policy::Fixed(kind) => kind,
        Policy::Uds(_) => PlannerKind::SafeMode,
    };

    let outcome = loop {
        // Perception tick: observe the current target gate.
        if step_index % setup.observe_every(cfg) == 0 {
            let gate = &setup.gates[gate_idx];
            let disturbance = setup.schedule.at(t + setup.schedule_offset);
            let true_rel = crate::geometry::relative_gate_pose(&state.pose(), gate);
            let obs = observe(&true_rel, &disturbance, &cfg.noise, frame_index, rng);
            frame_index += 1;
            window.push(obs);
            cov = estimate_covariance(&window, &cfg.estimator).ok();
            est_gate =
                Some((crate::geometry::compose_gate_pose(&state.pose(), &obs.observed), obs.observed));
            if cfg.collect_observation_log {
                observations.push(ObservationLogRow {
                    t,
                    true_pose: true_rel,
                    observed: obs.observed,
                    estimate: cov,
                });
            }

            // Planner selection reacts to fresh information.
            desired = match setup.policy {
                Policy::Fixed(kind) => kind,
                Policy::Uds(model) => match (&cov, &est_gate) {
                    (Some(c), Some((gate_pose, _))) => {
                        let features = extract_features(&state, gate_pose, c);
                        let sel = select_planner(model, &features);
                        if sel.fallback {
                            fallbacks += 1;
                        }
                        sel.kind
                    }
                    _ => PlannerKind::SafeMode,
                },
            };
        }

        // Replanning: on cadence, on selection change, or when forced.
        let cadence_due = t - last_plan_t >= cfg.replan_period;
        if force_replan || cadence_due || active != Some(desired) {
            if let Some((aim, _)) = &est_gate {
                let new_traj = plan_toward(&state, aim, gate_idx, &setup, desired, cfg)?;
                traj_start = t;
                traj = Some(new_traj);
                active = Some(desired);
                last_plan_t = t;
                force_replan = false;
                usage[desired.index()] += 1;
                decisions += 1;
                let disturbance = setup.schedule.at(t + setup.schedule_offset);
                log.push(DecisionLogRow {
                    t,
                    planner: desired,
                    position: state.position,
                    yaw: state.yaw,
                    target_gate: gate_idx,
                    observed: est_gate.as_ref().unwrap().1,
                    estimate: cov,
                    disturbance_magnitude: disturbance.magnitude(&cfg.noise),
                });
            }
        }

        // Track whatever plan is active (a fresh run always plans at t = 0
        // because the first observation lands on the first step).
        let current = traj.as_ref().expect("first observation precedes first step");
        let next = step(&state, current, t - traj_start, cfg.dt, &cfg.tracker)?;

        // Gate events on the step segment.
        match check_gate_pass(&state, &next, &setup.gates[gate_idx], &setup.geometry) {
            GateInteraction::Struck => {
                state = next;
                break Err(CrashCause::GateStrike);
            }
            GateInteraction::Passed => {
                state = next;
                gate_idx += 1;
                if gate_idx >= setup.gates.len() {
                    break Ok(t + cfg.dt);
                }
                // New target: restart the estimator window so stale frames
                // of the previous gate do not leak into the estimate.
                window.clear();
                cov = None;
                est_gate = None;
                force_replan = true;
                gate_entered_t = t;
                if let Policy::Uds(_) = setup.policy {
                    desired = PlannerKind::SafeMode;
                }
                t += cfg.dt;
                step_index += 1;
                continue;
            }
            GateInteraction::Neither => {}
        }
        state = next;

        let inside = state.position.x >= setup.bounds_min.x
            && state.position.x <= setup.bounds_max.x
            && state.position.y >= setup.bounds_min.y
            && state.position.y <= setup.bounds_max.y
            && state.position.z >= setup.bounds_min.z
            && state.position.z <= setup.bounds_max.z;
        if !inside {
            break Err(CrashCause::OutOfBounds);
        }

        t += cfg.dt;
        step_index += 1;

        if t - gate_entered_t > setup.gate_timeout || t > setup.episode_timeout {
            break Err(CrashCause::Timeout);
        }
    };

    let (success, lap_time, crash_cause, elapsed) = match outcome {
        Ok(lap) => (true, Some(lap), CrashCause::None, lap),
        Err(cause) => (false, None, cause, t),
    };
    debug_assert_eq!(usage.iter().sum::<u32>(), decisions);
    Ok(EpisodeResult {
        success,
        lap_time,
        crash_cause,
        planner_usage: usage,
        decisions,
        gates_passed: gate_idx,
        fallback_selections: fallbacks,
        final_state: state,
        elapsed,
        log,
        observations,
    })
}

impl EpisodeSetup<'_> {
    fn observe_every(&self, cfg: &SimConfig) -> u64 {
        cfg.observe_every_steps.max(1) as u64
    }
}

/// Plans a segment of the given kind from the current state toward the
/// estimated gate pose, in segment-local time.
fn plan_toward(
    state: &DroneState,
    aim: &Pose,
    gate_idx: usize,
    setup: &EpisodeSetup<'_>,
    kind: PlannerKind,
    cfg: &SimConfig,
) -> Result<PolynomialTrajectory, PlanError> {
    if kind == PlannerKind::SafeMode {
        return plan_safe_mode(state, 0.0, cfg.planner.safe_hold_duration);
    }
    // Aim past the observed gate center along its normal so the trajectory
    // actually crosses the plane.
    let goal = aim.position + gate_normal(aim) * cfg.aim_overshoot;
    let distance = (goal - state.position).norm();
    let duration = plan_duration(distance, kind, &cfg.planner);

    // Carry-through velocity for the plain min-jerk planner: toward the next
    // gate at cruise speed.
    let v_f = if kind == PlannerKind::MinJerk {
        let dir = match setup.gates.get(gate_idx + 1) {
            Some(next) => (next.position - aim.position).normalized(),
            None => setup
                .final_direction
                .map(|d| d.normalized())
                .unwrap_or_else(|| gate_normal(aim)),
        };
        dir * cfg.planner.cruise_speed(kind)
    } else {
        Vec3::ZERO
    };

    let bc = BoundaryConditions {
        t_i: 0.0,
        t_f: duration,
        p_i: state.position,
        p_f: goal,
        v_i: state.velocity,
        v_f,
        a_i: state.acceleration,
        a_f: Vec3::ZERO,
        yaw_i: state.yaw,
        yaw_f: aim.yaw,
        yaw_rate_i: state.angular_velocity.z,
        yaw_rate_f: 0.0,
    };
    match kind {
        PlannerKind::MinVelocity => plan_min_velocity(&bc),
        PlannerKind::MinAcceleration => plan_min_acceleration(&bc),
        PlannerKind::MinJerk => plan_min_jerk(&bc, false),
        PlannerKind::MinJerkFullStop => plan_min_jerk(&bc, true),
        PlannerKind::SafeMode => unreachable!("handled above"),
    }
}

/// Runs one full-track episode under the given policy.
///
/// `schedule_offset` shifts the disturbance schedule in time (experiments
/// draw it per episode so noise bursts land at different track positions).
pub fn run_episode(
    track: &Track,
    policy: &Policy<'_>,
    schedule: &DisturbanceSchedule,
    schedule_offset: f64,
    seed: u64,
    cfg: &SimConfig,
) -> Result<EpisodeResult, SimError> {
    track.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_setup(
        EpisodeSetup {
            gates: track.gates.clone(),
            geometry: track.gate_geometry(),
            bounds_min: track.bounds_min,
            bounds_max: track.bounds_max,
            initial: DroneState::at_rest(track.start),
            policy: *policy,
            schedule,
            schedule_offset,
            final_direction: None,
            gate_timeout: cfg.gate_timeout,
            episode_timeout: cfg.episode_timeout,
        },
        &mut rng,
        cfg,
    )
}

/// Outcome of one single-gate attempt during dataset generation.
#[derive(Debug, Clone)]
pub struct AttemptOutcome {
    pub passed: bool,
    pub elapsed: f64,
    pub final_state: DroneState,
    pub crash_cause: CrashCause,
}

/// Runs a single-gate attempt with a fixed planner under constant
/// disturbance, starting from an arbitrary initial state. `next_direction`
/// feeds the carry-through velocity of the plain min-jerk planner.
#[allow(clippy::too_many_arguments)]
pub fn run_gate_attempt(
    initial: &DroneState,
    gate: &Pose,
    next_direction: Vec3,
    kind: PlannerKind,
    level: &DisturbanceLevel,
    timeout: f64,
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
) -> Result<AttemptOutcome, SimError> {
    // Generous bounds around the attempt geometry; the ground stays solid.
    let lo = Vec3::new(
        initial.position.x.min(gate.position.x) - 30.0,
        initial.position.y.min(gate.position.y) - 30.0,
        0.0,
    );
    let hi = Vec3::new(
        initial.position.x.max(gate.position.x) + 30.0,
        initial.position.y.max(gate.position.y) + 30.0,
        initial.position.z.max(gate.position.z) + 20.0,
    );
    let schedule = DisturbanceSchedule::constant(*level);
    let result = run_setup(
        EpisodeSetup {
            gates: vec![*gate],
            geometry: GateGeometry { side: 1.6, frame_width: 0.1, clearance: 0.25 },
            bounds_min: lo,
            bounds_max: hi,
            initial: *initial,
            policy: Policy::Fixed(kind),
            schedule: &schedule,
            schedule_offset: 0.0,
            final_direction: Some(next_direction),
            gate_timeout: timeout,
            episode_timeout: timeout,
        },
        rng,
        cfg,
    )?;
    Ok(AttemptOutcome {
        passed: result.success,
        elapsed: result.elapsed,
        final_state: result.final_state,
        crash_cause: result.crash_cause,
    })
}

/// Applies the per-episode gate jitter drawn from the layout stream.
fn jitter_track(track: &Track, rng: &mut ChaCha8Rng, cfg: &SimConfig) -> Track {
    let mut jittered = track.clone();
    for gate in &mut jittered.gates {
        let dx = rng.random_range(-cfg.gate_jitter_xy..=cfg.gate_jitter_xy);
        let dy = rng.random_range(-cfg.gate_jitter_xy..=cfg.gate_jitter_xy);
        let dyaw = rng.random_range(-cfg.gate_jitter_yaw..=cfg.gate_jitter_yaw);
        *gate = Pose::new(gate.position + Vec3::new(dx, dy, 0.0), gate.yaw + dyaw);
    }
    jittered
}

/// Runs `n_episodes` per policy over seeded track variations and returns the
/// per-policy metrics table. Episodes are paired across policies: episode
/// `e` uses the same jittered layout, schedule offset and noise stream for
/// every policy.
pub fn run_experiment(
    track: &Track,
    policies: &[Policy<'_>],
    n_episodes: usize,
    schedule: &DisturbanceSchedule,
    seed: u64,
    cfg: &SimConfig,
) -> Result<ExperimentResult, SimError> {
    if n_episodes == 0 {
        return Err(SimError::Config("n_episodes must be at least 1".into()));
    }
    track.validate()?;
    cfg.validate().map_err(SimError::Config)?;

    let mut rows = Vec::new();
    let mut episodes = Vec::new();
    for policy in policies {
        let mut results = Vec::with_capacity(n_episodes);
        for e in 0..n_episodes {
            let mut layout_rng =
                ChaCha8Rng::seed_from_u64(mix_seed2(seed, STREAM_LAYOUT, e as u64));
            let variant = jitter_track(track, &mut layout_rng, cfg);
            let schedule_offset = match schedule.period {
                Some(p) => layout_rng.random_range(0.0..p),
                None => 0.0,
            };
            let episode_seed = mix_seed2(seed, STREAM_NOISE, e as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(episode_seed);
            let result = run_setup(
                EpisodeSetup {
                    gates: variant.gates.clone(),
                    geometry: variant.gate_geometry(),
                    bounds_min: variant.bounds_min,
                    bounds_max: variant.bounds_max,
                    initial: DroneState::at_rest(variant.start),
                    policy: *policy,
                    schedule,
                    schedule_offset,
                    final_direction: None,
                    gate_timeout: cfg.gate_timeout,
                    episode_timeout: cfg.episode_timeout,
                },
                &mut rng,
                cfg,
            )?;
            results.push(result);
        }
        rows.push(summarize(policy.name(), &results));
        episodes.push(results);
    }
    Ok(ExperimentResult { rows, episodes })
}

/// Writes the decision time series of one episode as CSV.
pub fn write_episode_log<W: Write>(result: &EpisodeResult, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "t,planner,target_gate,x,y,z,yaw,obs_r,obs_psi,obs_theta,obs_phi,var_r,var_phi,var_theta,var_psi,disturbance"
    )?;
    for row in &result.log {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.t,
            row.planner,
            row.target_gate,
            row.position.x,
            row.position.y,
            row.position.z,
            row.yaw,
            row.observed.r,
            row.observed.psi,
            row.observed.theta,
            row.observed.phi,
        )?;
        match row.estimate {
            Some(e) => write!(out, ",{},{},{},{}", e.sigma2_r, e.sigma2_phi, e.sigma2_theta, e.sigma2_psi)?,
            None => write!(out, ",,,,")?,
        }
        writeln!(out, ",{}", row.disturbance_magnitude)?;
    }
    Ok(())
}
