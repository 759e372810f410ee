//! The two-level expert policy: replanned Dijkstra path, carrot point, DWA.

use super::{dwa, plan_on_inflated, DwaParams, GlobalPath, PlanError};
use crate::sim::{KinematicLimits, Observation, Policy, RobotState, VelocityCommand};
use crate::world::{inflate, DistanceField, OccupancyGrid, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertConfig {
    pub dwa: DwaParams,
    /// carrot distance along the global path, meters
    pub lookahead: f64,
    /// replan the global path every this many control steps
    pub replan_interval: usize,
    pub robot_radius: f64,
    /// extra inflation on top of the robot radius for global planning, so
    /// paths (and carrot points) keep a margin from walls instead of hugging
    /// the exact inflation boundary
    pub plan_margin: f64,
    /// emit a stop command once the goal is closer than this
    pub goal_epsilon: f64,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        Self {
            dwa: DwaParams::default(),
            lookahead: 1.0,
            replan_interval: 10,
            robot_radius: crate::world::DEFAULT_ROBOT_RADIUS,
            plan_margin: 0.06,
            goal_epsilon: 0.2,
        }
    }
}

impl ExpertConfig {
    /// Inflation radius used for global planning and target feasibility.
    pub fn plan_radius(&self) -> f64 {
        self.robot_radius + self.plan_margin
    }
}

/// Expert with global map knowledge. One instance drives one episode at a
/// time; `begin_episode` resets the path cache and rebuilds the inflated
/// grid and clearance field, `grid_changed` does the same mid-episode.
pub struct ExpertPlanner {
    pub config: ExpertConfig,
    pub limits: KinematicLimits,
    grid: Option<OccupancyGrid>,
    inflated: Option<OccupancyGrid>,
    clearance: Option<DistanceField>,
    goal: Point,
    path: Option<GlobalPath>,
    steps_since_replan: usize,
    /// set when planning failed during an episode; the policy then stops
    pub failed: bool,
}

impl ExpertPlanner {
    pub fn new(config: ExpertConfig, limits: KinematicLimits) -> Self {
        Self {
            config,
            limits,
            grid: None,
            inflated: None,
            clearance: None,
            goal: Point::new(0.0, 0.0),
            path: None,
            steps_since_replan: 0,
            failed: false,
        }
    }

    fn rebuild_fields(&mut self, grid: &OccupancyGrid) {
        self.inflated = Some(inflate(grid, self.config.plan_radius()));
        self.clearance = Some(DistanceField::new(grid));
        self.grid = Some(grid.clone());
        self.path = None;
        self.steps_since_replan = 0;
    }

    /// Plan from the cell under the pose, falling back to the nearest free
    /// inflated cell when the pose itself maps to an inflated obstacle (the
    /// disc model and center inflation disagree near boundaries).
    fn replan(&mut self, from: Point) -> Result<(), PlanError> {
        let inflated = self.inflated.as_ref().expect("begin_episode not called");
        let start = match plan_on_inflated(inflated, from, self.goal) {
            Err(PlanError::StartOccupied) => nearest_free(inflated, from).ok_or(PlanError::StartOccupied)?,
            other => {
                self.path = Some(other?);
                self.steps_since_replan = 0;
                return Ok(());
            }
        };
        self.path = Some(plan_on_inflated(inflated, start, self.goal)?);
        self.steps_since_replan = 0;
        Ok(())
    }

    /// One expert control step: maintain the global path, chase its carrot
    /// point with DWA. Stops inside the goal region.
    pub fn expert_step(&mut self, state: &RobotState) -> Result<VelocityCommand, PlanError> {
        let pos = state.pose.position();
        if pos.dist(self.goal) < self.config.goal_epsilon {
            return Ok(VelocityCommand::STOP);
        }
        if self.path.is_none() || self.steps_since_replan >= self.config.replan_interval {
            self.replan(pos)?;
        }
        self.steps_since_replan += 1;
        let path = self.path.as_ref().unwrap();
        let carrot = path.carrot(&state.pose, self.config.lookahead);
        Ok(dwa(
            state,
            self.grid.as_ref().unwrap(),
            self.clearance.as_ref().unwrap(),
            carrot,
            &self.limits,
            &self.config.dwa,
            self.config.robot_radius,
        ))
    }
}

/// Center of the free inflated cell nearest to the point, searched over an
/// expanding square ring.
fn nearest_free(inflated: &OccupancyGrid, from: Point) -> Option<Point> {
    let (cx, cy) = inflated.world_to_cell(from.x, from.y)?;
    let max_ring = 32isize;
    for ring in 1..=max_ring {
        let mut best: Option<(f64, Point)> = None;
        for dy in -ring..=ring {
            for dx in -ring..=ring {
                if dx.abs() != ring && dy.abs() != ring {
                    continue;
                }
                let nx = cx as isize + dx;
                let ny = cy as isize + dy;
                if nx < 0
                    || ny < 0
                    || nx as usize >= inflated.width()
                    || ny as usize >= inflated.height()
                {
                    continue;
                }
                if !inflated.occupied(nx as usize, ny as usize) {
                    let c = inflated.cell_center(nx as usize, ny as usize);
                    let d = c.dist(from);
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, c));
                    }
                }
            }
        }
        if let Some((_, c)) = best {
            return Some(c);
        }
    }
    None
}

impl Policy for ExpertPlanner {
    fn begin_episode(&mut self, grid: &OccupancyGrid, goal: Point) {
        self.rebuild_fields(grid);
        self.goal = goal;
        self.failed = false;
    }

    fn grid_changed(&mut self, grid: &OccupancyGrid) {
        self.rebuild_fields(grid);
    }

    fn command(&mut self, obs: &Observation) -> VelocityCommand {
        match self.expert_step(&obs.state) {
            Ok(cmd) => cmd,
            Err(_) => {
                self.failed = true;
                VelocityCommand::STOP
            }
        }
    }
}
