//! Dynamic window approach: sample velocity pairs reachable within one
//! control period, forward-simulate each as a constant-velocity arc, discard
//! colliding arcs, and pick the best-scoring survivor.

use std::f64::consts::PI;

use crate::sim::{relative_goal, KinematicLimits, RobotState, VelocityCommand};
use crate::util::normalize_angle;
use crate::world::{collision, DistanceField, OccupancyGrid, Point, Pose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwaParams {
    /// velocity samples per axis
    pub n_v: usize,
    pub n_omega: usize,
    /// arc rollout horizon and granularity in seconds
    pub horizon: f64,
    pub sim_step: f64,
    pub w_heading: f64,
    pub w_clearance: f64,
    pub w_velocity: f64,
    /// clearance above this contributes no extra score, in meters
    pub clearance_saturation: f64,
}

impl Default for DwaParams {
    fn default() -> Self {
        Self {
            n_v: 11,
            n_omega: 21,
            horizon: 1.5,
            sim_step: 0.1,
            w_heading: 0.8,
            w_clearance: 0.1,
            w_velocity: 0.1,
            clearance_saturation: 1.0,
        }
    }
}

/// Constant-velocity arc update used for candidate rollouts.
fn advance(pose: Pose, v: f64, omega: f64, dt: f64) -> Pose {
    let theta = pose.theta;
    if omega.abs() < 1e-9 {
        Pose::new(
            pose.x + v * dt * theta.cos(),
            pose.y + v * dt * theta.sin(),
            theta,
        )
    } else {
        let r = v / omega;
        Pose::new(
            pose.x + r * ((theta + omega * dt).sin() - theta.sin()),
            pose.y + r * (theta.cos() - (theta + omega * dt).cos()),
            normalize_angle(theta + omega * dt),
        )
    }
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// One evaluated candidate.
struct Rollout {
    collided: bool,
    min_clearance: f64,
    end_pose: Pose,
}

fn rollout(
    grid: &OccupancyGrid,
    clearance: &DistanceField,
    start: Pose,
    v: f64,
    omega: f64,
    params: &DwaParams,
    robot_radius: f64,
) -> Rollout {
    let n_steps = (params.horizon / params.sim_step).round() as usize;
    let mut pose = start;
    let mut min_clearance = f64::INFINITY;
    for _ in 0..n_steps {
        pose = advance(pose, v, omega, params.sim_step);
        if collision(grid, &pose, robot_radius) {
            return Rollout {
                collided: true,
                min_clearance: 0.0,
                end_pose: pose,
            };
        }
        min_clearance = min_clearance.min(clearance.clearance(pose.x, pose.y, robot_radius));
    }
    Rollout {
        collided: false,
        min_clearance,
        end_pose: pose,
    }
}

fn score(rollout: &Rollout, v: f64, goal: Point, limits: &KinematicLimits, params: &DwaParams) -> f64 {
    let bearing = relative_goal(&rollout.end_pose, goal).phi;
    let heading = 1.0 - bearing.abs() / PI;
    let clear = rollout.min_clearance.min(params.clearance_saturation) / params.clearance_saturation;
    let velocity = v / limits.v_max;
    params.w_heading * heading + params.w_clearance * clear + params.w_velocity * velocity
}

/// Pick a velocity command from the dynamic window.
///
/// The window is the uniform `n_v x n_omega` grid over the velocities
/// reachable within `limits.dt` under the acceleration bounds, intersected
/// with the absolute limits. Score ties break toward smaller `|omega|`, then
/// smaller `|v|`, then lower candidate index. Returns the stop command when
/// every candidate arc collides.
pub fn dwa(
    state: &RobotState,
    grid: &OccupancyGrid,
    clearance: &DistanceField,
    local_goal: Point,
    limits: &KinematicLimits,
    params: &DwaParams,
    robot_radius: f64,
) -> VelocityCommand {
    let dt = limits.dt;
    let v_lo = (state.v - limits.a_max * dt).max(limits.v_min);
    let v_hi = (state.v + limits.a_max * dt).min(limits.v_max);
    let w_lo = (state.omega - limits.alpha_max * dt).max(-limits.omega_max);
    let w_hi = (state.omega + limits.alpha_max * dt).min(limits.omega_max);
    debug_assert!(v_lo <= v_hi && w_lo <= w_hi, "state outside limits");

    let mut best: Option<(f64, VelocityCommand)> = None;
    for iv in 0..params.n_v {
        let v = linspace(v_lo, v_hi, params.n_v, iv);
        for iw in 0..params.n_omega {
            let omega = linspace(w_lo, w_hi, params.n_omega, iw);
            let r = rollout(grid, clearance, state.pose, v, omega, params, robot_radius);
            if r.collided {
                continue;
            }
            let s = score(&r, v, local_goal, limits, params);
            let replace = match &best {
                None => true,
                Some((bs, bc)) => {
                    s > *bs
                        || (s == *bs
                            && (omega.abs() < bc.omega.abs()
                                || (omega.abs() == bc.omega.abs() && v.abs() < bc.v.abs())))
                }
            };
            if replace {
                best = Some((s, VelocityCommand::new(v, omega)));
            }
        }
    }
    match best {
        Some((_, cmd)) => {
            debug_assert!(
                !rollout(grid, clearance, state.pose, cmd.v, cmd.omega, params, robot_radius)
                    .collided,
                "selected arc collides"
            );
            cmd
        }
        None => VelocityCommand::STOP,
    }
}
