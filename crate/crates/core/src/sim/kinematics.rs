//! Differential-drive state, command limits, and the exact arc integrator.

use crate::util::normalize_angle;
use crate::world::Pose;

/// A velocity command `(v, omega)`: translational and rotational velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCommand {
    pub v: f64,
    pub omega: f64,
}

impl VelocityCommand {
    pub const STOP: VelocityCommand = VelocityCommand { v: 0.0, omega: 0.0 };

    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }
}

/// Velocity, acceleration, and timing limits of the platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicLimits {
    pub v_max: f64,
    pub v_min: f64,
    pub omega_max: f64,
    pub a_max: f64,
    pub alpha_max: f64,
    /// control period in seconds
    pub dt: f64,
}

impl Default for KinematicLimits {
    fn default() -> Self {
        Self {
            v_max: 0.5,
            v_min: 0.0,
            omega_max: 1.57,
            a_max: 1.0,
            alpha_max: 3.0,
            dt: 0.1,
        }
    }
}

impl KinematicLimits {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.v_min <= 0.0 && 0.0 <= self.v_max) {
            return Err(format!(
                "need v_min <= 0 <= v_max, got [{}, {}]",
                self.v_min, self.v_max
            ));
        }
        if !(self.omega_max > 0.0 && self.a_max > 0.0 && self.alpha_max > 0.0 && self.dt > 0.0) {
            return Err("omega_max, a_max, alpha_max and dt must be > 0".into());
        }
        Ok(())
    }
}

/// Instantaneous robot state: pose plus realized velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub pose: Pose,
    pub v: f64,
    pub omega: f64,
}

impl RobotState {
    pub fn at_rest(pose: Pose) -> Self {
        Self {
            pose,
            v: 0.0,
            omega: 0.0,
        }
    }
}

/// Advance one control period: the command is first rate-limited by the
/// acceleration bounds from the current velocities, then clamped to the
/// absolute limits, and the pose follows the exact constant-velocity arc.
pub fn step(state: &RobotState, cmd: &VelocityCommand, limits: &KinematicLimits) -> RobotState {
    let dt = limits.dt;
    let v = cmd
        .v
        .clamp(state.v - limits.a_max * dt, state.v + limits.a_max * dt)
        .clamp(limits.v_min, limits.v_max);
    let omega = cmd
        .omega
        .clamp(
            state.omega - limits.alpha_max * dt,
            state.omega + limits.alpha_max * dt,
        )
        .clamp(-limits.omega_max, limits.omega_max);

    let theta = state.pose.theta;
    let (x, y) = if omega.abs() < 1e-9 {
        (
            state.pose.x + v * dt * theta.cos(),
            state.pose.y + v * dt * theta.sin(),
        )
    } else {
        let r = v / omega;
        (
            state.pose.x + r * ((theta + omega * dt).sin() - theta.sin()),
            state.pose.y + r * (theta.cos() - (theta + omega * dt).cos()),
        )
    };
    RobotState {
        pose: Pose::new(x, y, normalize_angle(theta + omega * dt)),
        v,
        omega,
    }
}
