//! Grid Dijkstra on the 8-connected inflated grid, plus the carrot-point
//! lookup that couples the global path to the local planner.
//!
//! Moves cost `resolution` straight and `sqrt(2) * resolution` diagonally.
//! Diagonal moves are only allowed when both adjacent orthogonal cells are
//! free (no corner cutting). The priority queue breaks cost ties by lower
//! cell row, then lower cell column.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::world::{inflate, OccupancyGrid, Point, Pose};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("start position is occupied after inflation")]
    StartOccupied,
    #[error("goal position is occupied after inflation")]
    GoalOccupied,
    #[error("no path between start and goal")]
    NoPath,
}

/// An 8-connected cell-center path from start to goal.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPath {
    pub points: Vec<Point>,
    /// total cost in meters
    pub cost: f64,
}

impl GlobalPath {
    /// The (possibly interpolated) point at `lookahead` meters of arc length
    /// beyond the path point nearest to the pose; the final point when the
    /// remainder is shorter.
    pub fn carrot(&self, pose: &Pose, lookahead: f64) -> Point {
        let nearest = self
            .points
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = a.dist(pose.position());
                let db = b.dist(pose.position());
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut remaining = lookahead;
        for w in self.points[nearest..].windows(2) {
            let seg = w[0].dist(w[1]);
            if remaining <= seg {
                let f = if seg > 0.0 { remaining / seg } else { 0.0 };
                return Point::new(w[0].x + f * (w[1].x - w[0].x), w[0].y + f * (w[1].y - w[0].y));
            }
            remaining -= seg;
        }
        *self.points.last().expect("path is never empty")
    }
}

#[derive(Debug, Clone, Copy)]
struct QueueEntry {
    cost: f64,
    cy: usize,
    cx: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    // reversed so the max-heap pops lowest (cost, row, column) first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.cy.cmp(&self.cy))
            .then(other.cx.cmp(&self.cx))
    }
}

/// Inflate the grid by the robot radius and plan on it.
pub fn plan_global(
    grid: &OccupancyGrid,
    start: Point,
    goal: Point,
    robot_radius: f64,
) -> Result<GlobalPath, PlanError> {
    plan_on_inflated(&inflate(grid, robot_radius), start, goal)
}

/// Minimum-cost 8-connected path between the cells containing `start` and
/// `goal` on an already inflated grid.
pub fn plan_on_inflated(
    inflated: &OccupancyGrid,
    start: Point,
    goal: Point,
) -> Result<GlobalPath, PlanError> {
    let (w, h) = (inflated.width(), inflated.height());
    let start_cell = inflated
        .world_to_cell(start.x, start.y)
        .filter(|&(cx, cy)| !inflated.occupied(cx, cy))
        .ok_or(PlanError::StartOccupied)?;
    let goal_cell = inflated
        .world_to_cell(goal.x, goal.y)
        .filter(|&(cx, cy)| !inflated.occupied(cx, cy))
        .ok_or(PlanError::GoalOccupied)?;

    if start_cell == goal_cell {
        return Ok(GlobalPath {
            points: vec![inflated.cell_center(start_cell.0, start_cell.1)],
            cost: 0.0,
        });
    }

    let idx = |cx: usize, cy: usize| cy * w + cx;
    let mut dist = vec![f64::INFINITY; w * h];
    let mut parent = vec![usize::MAX; w * h];
    let mut settled = vec![false; w * h];
    let mut heap = BinaryHeap::new();
    dist[idx(start_cell.0, start_cell.1)] = 0.0;
    heap.push(QueueEntry {
        cost: 0.0,
        cy: start_cell.1,
        cx: start_cell.0,
    });

    let res = inflated.resolution();
    let diag = std::f64::consts::SQRT_2 * res;

    while let Some(QueueEntry { cost, cy, cx }) = heap.pop() {
        if settled[idx(cx, cy)] {
            continue;
        }
        settled[idx(cx, cy)] = true;
        if (cx, cy) == goal_cell {
            break;
        }
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = cx as i64 + dx;
                let ny = cy as i64 + dy;
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if inflated.occupied(nx, ny) {
                    continue;
                }
                let step = if dx != 0 && dy != 0 {
                    // no corner cutting: both orthogonal neighbors must be free
                    if inflated.occupied(nx, cy) || inflated.occupied(cx, ny) {
                        continue;
                    }
                    diag
                } else {
                    res
                };
                let next = cost + step;
                if next < dist[idx(nx, ny)] {
                    dist[idx(nx, ny)] = next;
                    parent[idx(nx, ny)] = idx(cx, cy);
                    heap.push(QueueEntry {
                        cost: next,
                        cy: ny,
                        cx: nx,
                    });
                }
            }
        }
    }

    let goal_idx = idx(goal_cell.0, goal_cell.1);
    if !settled[goal_idx] {
        return Err(PlanError::NoPath);
    }
    let mut cells = vec![goal_idx];
    while *cells.last().unwrap() != idx(start_cell.0, start_cell.1) {
        cells.push(parent[*cells.last().unwrap()]);
    }
    cells.reverse();
    Ok(GlobalPath {
        points: cells
            .into_iter()
            .map(|i| inflated.cell_center(i % w, i / w))
            .collect(),
        cost: dist[goal_idx],
    })
}
