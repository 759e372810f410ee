//! Occupancy-grid worlds: map file I/O, ray casting, collision queries,
//! obstacle inflation, free-pose sampling, and procedural map generation.

mod distance;
mod geometry;
mod grid;
mod mapgen;
mod ray;

pub use distance::DistanceField;
pub use geometry::{collision, inflate, sample_free_pose};
pub use grid::{load_map, save_map, OccupancyGrid};
pub use mapgen::{generate_map, MapSpec, MapStyle};
pub use ray::raycast;

use crate::util::normalize_angle;

/// Default robot disc radius in meters; configurable everywhere it is used.
pub const DEFAULT_ROBOT_RADIUS: f64 = 0.18;

/// A point in world coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Planar robot pose; `theta` is kept normalized to `(-PI, PI]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Errors from world construction, map I/O, and sampling.
#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed map file {path}: {reason}")]
    Format { path: String, reason: String },
    #[error("grid dimensions invalid: {0}")]
    BadDimensions(String),
    #[error("map metadata {path} is inconsistent with the image: {reason}")]
    MetadataMismatch { path: String, reason: String },
    #[error("invalid map spec: {0}")]
    BadSpec(String),
    #[error("free-pose sampling budget of {0} attempts exhausted")]
    SamplingExhausted(usize),
    #[error("map generation could not satisfy the connectivity requirement after {0} attempts")]
    ConnectivityUnsatisfied(usize),
}
