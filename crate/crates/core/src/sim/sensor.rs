//! Laser scanner simulation and the robot-centric goal transform.

use crate::util::normalize_angle;
use crate::util::rng::SeededRng;
use crate::world::{raycast, OccupancyGrid, Point, Pose};

/// Laser scanner geometry. The default matches a front-facing scanner with a
/// 270° field of view at 0.25° angular resolution and 30 m maximum range,
/// which yields 1080 beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    /// field of view in radians, symmetric about the heading
    pub fov: f64,
    /// angular resolution in radians
    pub angular_resolution: f64,
    /// maximum range in meters
    pub max_range: f64,
    /// standard deviation of additive Gaussian range noise; 0 disables it
    pub noise_std: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            fov: 270f64.to_radians(),
            angular_resolution: 0.25f64.to_radians(),
            max_range: 30.0,
            noise_std: 0.0,
        }
    }
}

impl SensorConfig {
    pub fn n_beams(&self) -> usize {
        (self.fov / self.angular_resolution).round() as usize
    }

    /// Direction of beam `i` relative to the heading.
    pub fn beam_angle(&self, i: usize) -> f64 {
        -self.fov / 2.0 + i as f64 * self.angular_resolution
    }
}

/// One full scan; `ranges[i]` is measured along `beam_angle(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserScan {
    pub ranges: Vec<f64>,
    pub fov: f64,
    pub angular_resolution: f64,
    pub max_range: f64,
}

impl LaserScan {
    pub fn n_beams(&self) -> usize {
        self.ranges.len()
    }
}

/// Cast one ray per beam. Deterministic unless range noise is enabled, in
/// which case `rng` perturbs each return (clamped back to `(0, max_range]`).
pub fn sense(
    grid: &OccupancyGrid,
    pose: &Pose,
    config: &SensorConfig,
    mut rng: Option<&mut SeededRng>,
) -> LaserScan {
    let n = config.n_beams();
    let mut ranges = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = raycast(grid, pose, config.beam_angle(i), config.max_range);
        if config.noise_std > 0.0 {
            if let Some(rng) = rng.as_deref_mut() {
                r = (r + config.noise_std * rng.normal()).clamp(1e-6, config.max_range);
            }
        }
        ranges.push(r);
    }
    LaserScan {
        ranges,
        fov: config.fov,
        angular_resolution: config.angular_resolution,
        max_range: config.max_range,
    }
}

/// The goal in robot-centric polar coordinates: distance `rho` and bearing
/// `phi` in `(-PI, PI]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGoal {
    pub rho: f64,
    pub phi: f64,
}

/// Transform a world-frame goal point into the robot frame. A goal exactly at
/// the robot position has bearing 0 by convention.
pub fn relative_goal(pose: &Pose, goal: Point) -> RelativeGoal {
    let dx = goal.x - pose.x;
    let dy = goal.y - pose.y;
    let rho = dx.hypot(dy);
    let phi = if dx == 0.0 && dy == 0.0 {
        0.0
    } else {
        normalize_angle(dy.atan2(dx) - pose.theta)
    };
    RelativeGoal { rho, phi }
}
