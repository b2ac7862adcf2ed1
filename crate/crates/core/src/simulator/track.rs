//! Race track definition: ordered gates, gate geometry, flight bounds and
//! the start pose, with a plain-text file format.

use crate::geometry::{Pose, Vec3};
use serde::{Deserialize, Serialize};
use std::io;
use std::path::Path;
use thiserror::Error;

/// Ordered gate layout plus the physical constants of the gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub gates: Vec<Pose>,
    /// Side length of the square gate opening, m.
    pub gate_side: f64,
    /// Material width of the gate frame around the opening, m.
    pub frame_width: f64,
    /// Required margin from the frame for a safe pass, m.
    pub clearance: f64,
    pub bounds_min: Vec3,
    pub bounds_max: Vec3,
    pub start: Pose,
}

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid track: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Track {
    /// The default five-gate course: a left-curving ~26 m line with heading
    /// changes of 0.5-0.7 rad between consecutive gates.
    pub fn default_five_gate() -> Track {
        Track {
            gates: vec![
                Pose::new(Vec3::new(5.0, 0.0, 1.5), 0.0),
                Pose::new(Vec3::new(10.0, 2.5, 1.8), 0.55),
                Pose::new(Vec3::new(13.5, 6.5, 2.2), 1.1),
                Pose::new(Vec3::new(15.0, 11.5, 1.8), 1.75),
                Pose::new(Vec3::new(13.0, 16.0, 1.5), 2.25),
            ],
            gate_side: 1.6,
            frame_width: 0.1,
            clearance: 0.25,
            bounds_min: Vec3::new(-12.0, -12.0, 0.0),
            bounds_max: Vec3::new(28.0, 28.0, 9.0),
            start: Pose::new(Vec3::new(0.0, 0.0, 1.5), 0.0),
        }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        p.x >= self.bounds_min.x
            && p.x <= self.bounds_max.x
            && p.y >= self.bounds_min.y
            && p.y <= self.bounds_max.y
            && p.z >= self.bounds_min.z
            && p.z <= self.bounds_max.z
    }

    pub fn validate(&self) -> Result<(), TrackError> {
        if self.gates.is_empty() {
            return Err(TrackError::Invalid("track needs at least one gate".into()));
        }
        if !(self.gate_side > 0.0 && self.frame_width >= 0.0 && self.clearance >= 0.0) {
            return Err(TrackError::Invalid("gate geometry must be non-negative".into()));
        }
        if self.clearance >= self.gate_side / 2.0 {
            return Err(TrackError::Invalid(format!(
                "clearance {} leaves no opening in a {} m gate",
                self.clearance, self.gate_side
            )));
        }
        for pair in self.gates.windows(2) {
            let sep = (pair[1].position - pair[0].position).norm();
            if sep <= self.gate_side {
                return Err(TrackError::Invalid(format!(
                    "consecutive gates only {sep:.2} m apart (side {})",
                    self.gate_side
                )));
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            if !self.contains(&g.position) {
                return Err(TrackError::Invalid(format!("gate {i} outside bounds")));
            }
        }
        if !self.contains(&self.start.position) {
            return Err(TrackError::Invalid("start pose outside bounds".into()));
        }
        Ok(())
    }

    /// Parses the track text format:
    ///
    /// ```text
    /// side 1.6
    /// frame 0.1
    /// clearance 0.25
    /// bounds -12 -12 0 28 28 9
    /// start 0 0 1.5 0
    /// gate 5 0 1.5 0
    /// gate 10 2.5 1.8 0.55
    /// ```
    pub fn parse(text: &str) -> Result<Track, TrackError> {
        let mut track = Track {
            gates: Vec::new(),
            ..Track::default_five_gate()
        };
        let mut saw_start = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_f = |s: &str| -> Result<f64, TrackError> {
                s.parse::<f64>().map_err(|_| TrackError::Parse {
                    line: lineno + 1,
                    msg: format!("bad number '{s}'"),
                })
            };
            let expect = |n: usize| -> Result<(), TrackError> {
                if fields.len() != n + 1 {
                    Err(TrackError::Parse {
                        line: lineno + 1,
                        msg: format!("'{}' expects {n} values, got {}", fields[0], fields.len() - 1),
                    })
                } else {
                    Ok(())
                }
            };
            match fields[0] {
                "side" => {
                    expect(1)?;
                    track.gate_side = parse_f(fields[1])?;
                }
                "frame" => {
                    expect(1)?;
                    track.frame_width = parse_f(fields[1])?;
                }
                "clearance" => {
                    expect(1)?;
                    track.clearance = parse_f(fields[1])?;
                }
                "bounds" => {
                    expect(6)?;
                    track.bounds_min =
                        Vec3::new(parse_f(fields[1])?, parse_f(fields[2])?, parse_f(fields[3])?);
                    track.bounds_max =
                        Vec3::new(parse_f(fields[4])?, parse_f(fields[5])?, parse_f(fields[6])?);
                }
                "start" => {
                    expect(4)?;
                    track.start = Pose::new(
                        Vec3::new(parse_f(fields[1])?, parse_f(fields[2])?, parse_f(fields[3])?),
                        parse_f(fields[4])?,
                    );
                    saw_start = true;
                }
                "gate" => {
                    expect(4)?;
                    track.gates.push(Pose::new(
                        Vec3::new(parse_f(fields[1])?, parse_f(fields[2])?, parse_f(fields[3])?),
                        parse_f(fields[4])?,
                    ));
                }
                other => {
                    return Err(TrackError::Parse {
                        line: lineno + 1,
                        msg: format!("unknown directive '{other}'"),
                    });
                }
            }
        }
        if !saw_start {
            if let Some(first) = track.gates.first() {
                // Default start: 5 m before the first gate along its normal.
                let (s, c) = first.yaw.sin_cos();
                track.start = Pose::new(
                    first.position - Vec3::new(c, s, 0.0) * 5.0,
                    first.yaw,
                );
            }
        }
        track.validate()?;
        Ok(track)
    }

    pub fn from_file(path: &Path) -> Result<Track, TrackError> {
        Track::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_track_is_valid() {
        Track::default_five_gate().validate().unwrap();
    }

    #[test]
    fn parse_round_trip() {
        let text = "\
side 1.6
frame 0.1
clearance 0.25
bounds -12 -12 0 28 28 9
start 0 0 1.5 0
gate 5 0 1.5 0
gate 10 2.5 1.8 0.55
";
        let track = Track::parse(text).unwrap();
        assert_eq!(track.gates.len(), 2);
        assert_eq!(track.gates[1].yaw, 0.55);
        assert_eq!(track.start.position, Vec3::new(0.0, 0.0, 1.5));
    }

    #[test]
    fn default_start_sits_before_first_gate() {
        let track = Track::parse("gate 5 0 1.5 0\nbounds -10 -10 0 20 20 9\n").unwrap();
        assert!((track.start.position - Vec3::new(0.0, 0.0, 1.5)).norm() < 1e-9);
    }

    #[test]
    fn rejects_gateless_and_crowded_tracks() {
        assert!(Track::parse("side 1.6\n").is_err());
        let crowded = "gate 0 0 1.5 0\ngate 1 0 1.5 0\nbounds -5 -5 0 5 5 5\n";
        assert!(Track::parse(crowded).is_err());
    }

    #[test]
    fn rejects_unknown_directives_and_bad_numbers() {
        assert!(Track::parse("portal 1 2 3 4\n").is_err());
        assert!(Track::parse("gate a 0 1.5 0\n").is_err());
    }
}
