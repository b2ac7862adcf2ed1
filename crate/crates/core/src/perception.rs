//! Synthetic stand-in for the learned perception stack: a noisy gate-pose
//! observer driven by a disturbance schedule, plus a 12-frame sliding-window
//! covariance estimator.
//!
//! The observer adds zero-mean Gaussian noise per spherical component with a
//! standard deviation affine in the scalar disturbance magnitude (see
//! [`NoiseModel`](crate::config::NoiseModel)). The estimator replaces the
//! learned recurrent network with detrended window variance: a linear trend
//! in time is fitted and removed per component so true relative motion is
//! not mistaken for noise. The estimator sits behind plain functions over
//! an observation window, so a learned estimator can be slotted in later.

use crate::config::{EstimatorConfig, NoiseModel};
use crate::geometry::{angle_diff, GatePoseSpherical};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::io::{self, Write};
use thiserror::Error;

/// Number of observations the covariance estimator needs before it fires.
pub const WINDOW_SIZE: usize = 12;

/// Abstract corruption magnitudes of the camera stream.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceLevel {
    pub brightness: f64,
    pub contrast: f64,
    pub saturation: f64,
}

impl DisturbanceLevel {
    pub const ZERO: DisturbanceLevel =
        DisturbanceLevel { brightness: 0.0, contrast: 0.0, saturation: 0.0 };

    pub fn new(brightness: f64, contrast: f64, saturation: f64) -> Self {
        DisturbanceLevel { brightness, contrast, saturation }
    }

    /// Scalar disturbance magnitude; saturation is weighted up because its
    /// raw values run roughly two orders of magnitude smaller than the
    /// brightness/contrast knobs.
    pub fn magnitude(&self, model: &NoiseModel) -> f64 {
        self.brightness + self.contrast + model.saturation_weight * self.saturation
    }

    pub fn is_zero(&self) -> bool {
        self.brightness == 0.0 && self.contrast == 0.0 && self.saturation == 0.0
    }
}

/// One noisy gate-pose prediction. The true pose is retained for labeling
/// only and is never exposed to the switcher.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyObservation {
    pub observed: GatePoseSpherical,
    pub frame_index: u64,
    pub true_pose: GatePoseSpherical,
}

/// Per-component variances of the gate-pose prediction error, in the fixed
/// `(r, phi, theta, psi)` order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub sigma2_r: f64,
    pub sigma2_phi: f64,
    pub sigma2_theta: f64,
    pub sigma2_psi: f64,
}

impl CovarianceEstimate {
    pub fn from_components(c: [f64; 4]) -> Self {
        CovarianceEstimate { sigma2_r: c[0], sigma2_phi: c[1], sigma2_theta: c[2], sigma2_psi: c[3] }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.sigma2_r, self.sigma2_phi, self.sigma2_theta, self.sigma2_psi]
    }

    /// Total uncertainty: the sum of the four per-component variances.
    pub fn sum(&self) -> f64 {
        self.sigma2_r + self.sigma2_phi + self.sigma2_theta + self.sigma2_psi
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("observation window not ready: {have}/{WINDOW_SIZE} frames")]
    NotReady { have: usize },
}

/// Per-component noise scale at a given disturbance level and true range.
pub fn noise_sigma(model: &NoiseModel, disturbance: &DisturbanceLevel, true_r: f64) -> [f64; 4] {
    let g = disturbance.magnitude(model);
    let mut sigma = [0.0; 4];
    for (i, s) in sigma.iter_mut().enumerate() {
        *s = model.base[i] + model.gain[i] * g;
    }
    sigma[0] *= 1.0 + model.range_coeff * true_r.max(0.0);
    sigma
}

/// Draws one noisy observation of `true_pose` under `disturbance`.
///
/// Noise draws happen in the fixed `(r, phi, theta, psi)` order so a seeded
/// generator reproduces the stream bit-exactly. The perturbed range is
/// clamped at zero and angles are renormalized to their ranges.
pub fn observe<R: Rng>(
    true_pose: &GatePoseSpherical,
    disturbance: &DisturbanceLevel,
    model: &NoiseModel,
    frame_index: u64,
    rng: &mut R,
) -> NoisyObservation {
    let sigma = noise_sigma(model, disturbance, true_pose.r);
    let draw: [f64; 4] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    let observed = GatePoseSpherical::new(
        true_pose.r + sigma[0] * draw[0],
        true_pose.psi + sigma[3] * draw[3],
        true_pose.theta + sigma[2] * draw[2],
        true_pose.phi + sigma[1] * draw[1],
    );
    NoisyObservation { observed, frame_index, true_pose: *true_pose }
}

/// Squared prediction error per component (`e = y - y_hat`, squared), with
/// angle errors taken on the shortest arc.
pub fn covariance_label(
    true_pose: &GatePoseSpherical,
    observed: &GatePoseSpherical,
) -> CovarianceEstimate {
    let e_r = observed.r - true_pose.r;
    let e_phi = angle_diff(observed.phi, true_pose.phi);
    let e_theta = observed.theta - true_pose.theta;
    let e_psi = angle_diff(observed.psi, true_pose.psi);
    CovarianceEstimate {
        sigma2_r: e_r * e_r,
        sigma2_phi: e_phi * e_phi,
        sigma2_theta: e_theta * e_theta,
        sigma2_psi: e_psi * e_psi,
    }
}

/// Ring buffer of the last [`WINDOW_SIZE`] observations.
#[derive(Debug, Clone, Default)]
pub struct ObservationWindow {
    frames: VecDeque<NoisyObservation>,
}

impl ObservationWindow {
    pub fn new() -> Self {
        ObservationWindow { frames: VecDeque::with_capacity(WINDOW_SIZE) }
    }

    pub fn push(&mut self, obs: NoisyObservation) {
        if self.frames.len() == WINDOW_SIZE {
            self.frames.pop_front();
        }
        self.frames.push_back(obs);
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.frames.len() == WINDOW_SIZE
    }

    pub fn clear(&mut self) {
        self.frames.clear();
    }

    pub fn latest(&self) -> Option<&NoisyObservation> {
        self.frames.back()
    }

    fn component_series(&self, index: usize) -> Vec<f64> {
        self.frames.iter().map(|o| o.observed.components()[index]).collect()
    }
}

/// Detrended sample variance of a series: an ordinary-least-squares line is
/// removed and the residual variance uses the `n - 2` denominator (two
/// degrees of freedom go to the fitted trend).
fn detrended_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y: f64 = values.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    let slope = sxy / sxx;
    let mut rss = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let fit = mean_y + slope * (i as f64 - mean_x);
        rss += (y - fit) * (y - fit);
    }
    rss / (n - 2.0)
}

/// Unwraps a periodic angle series so consecutive samples differ by the
/// shortest arc; keeps linear trends linear across the branch cut.
fn unwrap_angles(values: &mut [f64]) {
    for i in 1..values.len() {
        values[i] = values[i - 1] + angle_diff(values[i], values[i - 1]);
    }
}

/// Covariance estimate over a full observation window: per-component
/// detrended variance, floored at the configured minimum.
pub fn estimate_covariance(
    window: &ObservationWindow,
    config: &EstimatorConfig,
) -> Result<CovarianceEstimate, EstimateError> {
    if !window.is_full() {
        return Err(EstimateError::NotReady { have: window.len() });
    }
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut series = window.component_series(i);
        // phi and psi are periodic; r and theta are not.
        if i == 1 || i == 3 {
            unwrap_angles(&mut series);
        }
        *slot = detrended_variance(&series).max(config.variance_floor);
    }
    Ok(CovarianceEstimate::from_components(out))
}

/// One time-indexed disturbance interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceInterval {
    pub start: f64,
    pub end: f64,
    pub level: DisturbanceLevel,
}

/// Time-indexed corruption schedule. Outside every interval the disturbance
/// is zero; where intervals overlap the last one listed wins. A cyclic
/// schedule repeats with the given period.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceSchedule {
    pub intervals: Vec<DisturbanceInterval>,
    pub period: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown disturbance preset '{0}' (expected none, low, moderate, heavy or mixed)")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl DisturbanceSchedule {
    /// Constant disturbance for all time.
    pub fn constant(level: DisturbanceLevel) -> Self {
        DisturbanceSchedule {
            intervals: vec![DisturbanceInterval { start: 0.0, end: f64::INFINITY, level }],
            period: None,
        }
    }

    pub fn none() -> Self {
        DisturbanceSchedule::default()
    }

    /// Named presets used by the command line and the experiment harness.
    pub fn preset(name: &str) -> Result<Self, ScheduleError> {
        match name {
            "none" | "zero" => Ok(DisturbanceSchedule::none()),
            "low" => Ok(DisturbanceSchedule::constant(DisturbanceLevel::new(1.5, 0.0, 0.0))),
            "moderate" => {
                Ok(DisturbanceSchedule::constant(DisturbanceLevel::new(2.114, 3.811, 0.039)))
            }
            "heavy" => {
                Ok(DisturbanceSchedule::constant(DisturbanceLevel::new(4.2, 5.2, 0.013)))
            }
            "mixed" => Ok(DisturbanceSchedule {
                intervals: vec![DisturbanceInterval {
                    start: 3.5,
                    end: 6.0,
                    level: DisturbanceLevel::new(4.2, 5.2, 0.013),
                }],
                period: Some(6.0),
            }),
            other => Err(ScheduleError::UnknownPreset(other.to_string())),
        }
    }

    /// Disturbance level active at time `t`.
    pub fn at(&self, t: f64) -> DisturbanceLevel {
        let t = match self.period {
            Some(p) if p > 0.0 => t.rem_euclid(p),
            _ => t,
        };
        self.intervals
            .iter()
            .rev()
            .find(|iv| t >= iv.start && t < iv.end)
            .map(|iv| iv.level)
            .unwrap_or(DisturbanceLevel::ZERO)
    }

    /// Parses the schedule text format: one `start end brightness contrast
    /// saturation` interval per line, an optional `period <s>` line, `#`
    /// comments.
    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut schedule = DisturbanceSchedule::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_f = |s: &str, what: &str| -> Result<f64, ScheduleError> {
                s.parse::<f64>().map_err(|_| ScheduleError::Parse {
                    line: lineno + 1,
                    msg: format!("bad {what} value '{s}'"),
                })
            };
            if fields[0] == "period" {
                if fields.len() != 2 {
                    return Err(ScheduleError::Parse {
                        line: lineno + 1,
                        msg: "expected: period <seconds>".into(),
                    });
                }
                schedule.period = Some(parse_f(fields[1], "period")?);
                continue;
            }
            if fields.len() != 5 {
                return Err(ScheduleError::Parse {
                    line: lineno + 1,
                    msg: format!(
                        "expected 5 fields (start end brightness contrast saturation), got {}",
                        fields.len()
                    ),
                });
            }
            let start = parse_f(fields[0], "start")?;
            let end = parse_f(fields[1], "end")?;
            if end <= start {
                return Err(ScheduleError::Parse {
                    line: lineno + 1,
                    msg: format!("interval end {end} not after start {start}"),
                });
            }
            schedule.intervals.push(DisturbanceInterval {
                start,
                end,
                level: DisturbanceLevel::new(
                    parse_f(fields[2], "brightness")?,
                    parse_f(fields[3], "contrast")?,
                    parse_f(fields[4], "saturation")?,
                ),
            });
        }
        Ok(schedule)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ScheduleError> {
        DisturbanceSchedule::parse(&std::fs::read_to_string(path)?)
    }
}

/// One row of the observation log: what the observer saw and what the
/// estimator made of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationLogRow {
    pub t: f64,
    pub true_pose: GatePoseSpherical,
    pub observed: GatePoseSpherical,
    pub estimate: Option<CovarianceEstimate>,
}

/// Writes observation log rows as CSV. Rows from the estimator warm-up
/// carry empty variance fields.
pub fn write_observation_log<W: Write>(rows: &[ObservationLogRow], out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "t,true_r,true_psi,true_theta,true_phi,obs_r,obs_psi,obs_theta,obs_phi,var_r,var_phi,var_theta,var_psi"
    )?;
    for row in rows {
        let tp = row.true_pose;
        let op = row.observed;
        write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.t, tp.r, tp.psi, tp.theta, tp.phi, op.r, op.psi, op.theta, op.phi
        )?;
        match row.estimate {
            Some(e) => writeln!(out, ",{},{},{},{}", e.sigma2_r, e.sigma2_phi, e.sigma2_theta, e.sigma2_psi)?,
            None => writeln!(out, ",,,,")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn test_pose() -> GatePoseSpherical {
        GatePoseSpherical::new(5.0, 0.3, PI / 2.0, -0.4)
    }

    #[test]
    fn zero_noise_model_is_identity() {
        let model = NoiseModel { base: [0.0; 4], gain: [0.0; 4], ..NoiseModel::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = observe(&test_pose(), &DisturbanceLevel::ZERO, &model, 0, &mut rng);
        assert_eq!(obs.observed, test_pose());
    }

    #[test]
    fn observation_stream_is_deterministic() {
        let model = NoiseModel::default();
        let d = DisturbanceLevel::new(2.0, 1.0, 0.01);
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|i| observe(&test_pose(), &d, &model, i, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn empirical_variance_matches_model() {
        let model = NoiseModel::default();
        let d = DisturbanceLevel::new(1.5, 0.8, 0.02);
        let pose = test_pose();
        let sigma = noise_sigma(&model, &d, pose.r);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000;
        let mut sums = [0.0f64; 4];
        let mut sq = [0.0f64; 4];
        for i in 0..n {
            let obs = observe(&pose, &d, &model, i, &mut rng);
            let err = [
                obs.observed.r - pose.r,
                angle_diff(obs.observed.phi, pose.phi),
                obs.observed.theta - pose.theta,
                angle_diff(obs.observed.psi, pose.psi),
            ];
            for k in 0..4 {
                sums[k] += err[k];
                sq[k] += err[k] * err[k];
            }
        }
        for k in 0..4 {
            let mean = sums[k] / n as f64;
            let var = sq[k] / n as f64 - mean * mean;
            let expected = sigma[k] * sigma[k];
            assert!(
                (var - expected).abs() <= 0.10 * expected,
                "component {k}: empirical {var:.6} vs model {expected:.6}"
            );
        }
    }

    #[test]
    fn label_squares_componentwise() {
        let t = GatePoseSpherical::new(2.0, 0.5, 1.0, -0.2);
        let o = GatePoseSpherical::new(2.1, 0.8, 1.0, -0.4);
        let label = covariance_label(&t, &o);
        assert_abs_diff_eq!(label.sigma2_r, 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(label.sigma2_psi, 0.09, epsilon = 1e-12);
        assert_abs_diff_eq!(label.sigma2_theta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(label.sigma2_phi, 0.04, epsilon = 1e-12);
        assert_eq!(covariance_label(&t, &t).sum(), 0.0);
    }

    #[test]
    fn label_wraps_on_shortest_arc() {
        let t = GatePoseSpherical::new(1.0, PI - 0.1, 1.0, 0.0);
        let o = GatePoseSpherical::new(1.0, -PI + 0.1, 1.0, 0.0);
        let label = covariance_label(&t, &o);
        assert_abs_diff_eq!(label.sigma2_psi, 0.04, epsilon = 1e-10);
    }

    fn window_from(series: impl Iterator<Item = GatePoseSpherical>) -> ObservationWindow {
        let mut w = ObservationWindow::new();
        for (i, p) in series.enumerate() {
            w.push(NoisyObservation { observed: p, frame_index: i as u64, true_pose: p });
        }
        w
    }

    #[test]
    fn estimator_refuses_until_full() {
        let cfg = EstimatorConfig::default();
        let mut w = ObservationWindow::new();
        for i in 0..WINDOW_SIZE - 1 {
            w.push(NoisyObservation { observed: test_pose(), frame_index: i as u64, true_pose: test_pose() });
            assert!(matches!(
                estimate_covariance(&w, &cfg),
                Err(EstimateError::NotReady { .. })
            ));
        }
        w.push(NoisyObservation { observed: test_pose(), frame_index: 11, true_pose: test_pose() });
        assert!(estimate_covariance(&w, &cfg).is_ok());
    }

    #[test]
    fn identical_observations_hit_the_floor() {
        let cfg = EstimatorConfig::default();
        let w = window_from((0..WINDOW_SIZE).map(|_| test_pose()));
        let est = estimate_covariance(&w, &cfg).unwrap();
        for c in est.components() {
            assert_eq!(c, cfg.variance_floor);
        }
    }

    #[test]
    fn linear_ramp_is_removed() {
        let cfg = EstimatorConfig::default();
        // Approaching gate: r falls linearly, angles steady.
        let w = window_from(
            (0..WINDOW_SIZE).map(|i| GatePoseSpherical::new(6.0 - 0.3 * i as f64, 0.2, 1.4, 0.1)),
        );
        let est = estimate_covariance(&w, &cfg).unwrap();
        assert_abs_diff_eq!(est.sigma2_r, cfg.variance_floor, epsilon = 1e-12);
    }

    #[test]
    fn ramp_crossing_branch_cut_is_removed() {
        let cfg = EstimatorConfig::default();
        let w = window_from(
            (0..WINDOW_SIZE)
                .map(|i| GatePoseSpherical::new(3.0, PI - 0.05 * i as f64 * 2.0 + 0.3, 1.4, 0.0)),
        );
        let est = estimate_covariance(&w, &cfg).unwrap();
        assert!(est.sigma2_psi < 1e-6, "wrap leak: {}", est.sigma2_psi);
    }

    #[test]
    fn estimate_tracks_injected_variance() {
        let cfg = EstimatorConfig::default();
        let model = NoiseModel::default();
        let d = DisturbanceLevel::new(2.0, 1.5, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n_windows = 2000;
        let mut mean_est = [0.0f64; 4];
        let mut frame = 0u64;
        for w_idx in 0..n_windows {
            let mut w = ObservationWindow::new();
            for i in 0..WINDOW_SIZE {
                // Linear drift under the noise, different per window.
                let base = GatePoseSpherical::new(
                    5.0 + 0.1 * (w_idx % 7) as f64 - 0.15 * i as f64,
                    0.2 + 0.01 * i as f64,
                    1.5 - 0.005 * i as f64,
                    -0.1,
                );
                w.push(observe(&base, &d, &model, frame, &mut rng));
                frame += 1;
            }
            let est = estimate_covariance(&w, &cfg).unwrap();
            for (k, c) in est.components().iter().enumerate() {
                mean_est[k] += c / n_windows as f64;
            }
        }
        // sigma_r varies with true r inside the window; compare against the
        // mid-window scale.
        let sigma_mid = noise_sigma(&model, &d, 4.3);
        for k in 0..4 {
            let expected = sigma_mid[k] * sigma_mid[k];
            assert!(
                (mean_est[k] - expected).abs() <= 0.15 * expected,
                "component {k}: mean estimate {:.6} vs injected {:.6}",
                mean_est[k],
                expected
            );
        }
    }

    #[test]
    fn mean_estimate_increases_with_disturbance() {
        let cfg = EstimatorConfig::default();
        let model = NoiseModel::default();
        let levels = [0.0, 2.0, 6.3];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut means = Vec::new();
        for g in levels {
            let d = DisturbanceLevel::new(g, 0.0, 0.0);
            let mut acc = 0.0;
            let windows = 200;
            for _ in 0..windows {
                let mut w = ObservationWindow::new();
                for i in 0..WINDOW_SIZE {
                    let base = GatePoseSpherical::new(4.0 - 0.05 * i as f64, 0.1, 1.5, 0.0);
                    w.push(observe(&base, &d, &model, i as u64, &mut rng));
                }
                acc += estimate_covariance(&w, &cfg).unwrap().sum();
            }
            means.push(acc / windows as f64);
        }
        assert!(means[0] < means[1] && means[1] < means[2], "means: {means:?}");
        assert!(means[0] < 0.25 * means[2], "clean share too large: {means:?}");
    }

    #[test]
    fn schedule_parse_and_lookup() {
        let text = "\
# build-up then a noisy burst
period 10
0 4   0 0 0
4 7   2.114 3.811 0.039
";
        let s = DisturbanceSchedule::parse(text).unwrap();
        assert_eq!(s.period, Some(10.0));
        assert!(s.at(1.0).is_zero());
        assert_abs_diff_eq!(s.at(5.0).brightness, 2.114, epsilon = 1e-12);
        // Cyclic wrap: t = 15 maps to t = 5.
        assert_abs_diff_eq!(s.at(15.0).contrast, 3.811, epsilon = 1e-12);
        // Outside all intervals inside the period.
        assert!(s.at(8.0).is_zero());
    }

    #[test]
    fn schedule_rejects_malformed_lines() {
        assert!(DisturbanceSchedule::parse("1 2 3").is_err());
        assert!(DisturbanceSchedule::parse("5 2 0 0 0").is_err());
        assert!(DisturbanceSchedule::parse("0 1 x 0 0").is_err());
        assert!(DisturbanceSchedule::preset("wild").is_err());
    }

    #[test]
    fn observation_log_format() {
        let rows = vec![
            ObservationLogRow {
                t: 0.0,
                true_pose: test_pose(),
                observed: test_pose(),
                estimate: None,
            },
            ObservationLogRow {
                t: 0.04,
                true_pose: test_pose(),
                observed: test_pose(),
                estimate: Some(CovarianceEstimate::from_components([0.01, 0.02, 0.03, 0.04])),
            },
        ];
        let mut buf = Vec::new();
        write_observation_log(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("t,true_r"));
        assert!(lines[1].ends_with(",,,,"));
        assert!(lines[2].ends_with("0.01,0.02,0.03,0.04"));
    }

    proptest! {
        /// The covariance sum dominates every component.
        #[test]
        fn sum_dominates_components(c in proptest::array::uniform4(0.0f64..10.0)) {
            let est = CovarianceEstimate::from_components(c);
            let max = c.iter().cloned().fold(0.0, f64::max);
            prop_assert!(est.sum() >= max);
        }

        /// Estimates are always finite and non-negative on arbitrary windows.
        #[test]
        fn estimate_non_negative(values in proptest::collection::vec(-10.0f64..10.0, WINDOW_SIZE)) {
            let cfg = EstimatorConfig::default();
            let w = window_from(values.iter().map(|&v| {
                GatePoseSpherical::new(5.0 + v, v * 0.1, 1.5, v * 0.05)
            }));
            let est = estimate_covariance(&w, &cfg).unwrap();
            for c in est.components() {
                prop_assert!(c.is_finite() && c >= cfg.variance_floor);
            }
        }
    }
}
