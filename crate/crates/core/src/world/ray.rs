//! Exact ray casting over the occupancy grid.

use super::{OccupancyGrid, Pose};

/// Cast a ray from `origin` at `angle` relative to the robot heading and
/// return the distance to the first entered occupied cell.
///
/// The traversal walks every cell the ray passes through (no step skipping),
/// so a hit is reported exactly at the crossing into the occupied cell.
/// Returns `max_range` when the ray exits the grid or travels `max_range`
/// without a hit, and 0 when the origin itself lies in an occupied cell.
pub fn raycast(grid: &OccupancyGrid, origin: &Pose, angle: f64, max_range: f64) -> f64 {
    debug_assert!(max_range > 0.0);
    let world_angle = origin.theta + angle;
    let (dx, dy) = (world_angle.cos(), world_angle.sin());
    let res = grid.resolution();
    let o = grid.origin();

    let Some((mut cx, mut cy)) = grid.world_to_cell(origin.x, origin.y) else {
        return 0.0; // outside the grid: degenerate, same convention as in-obstacle
    };
    if grid.occupied(cx, cy) {
        return 0.0;
    }

    // Distance along the ray to the next vertical/horizontal cell boundary,
    // and the per-cell increments.
    let (step_x, mut t_max_x, t_delta_x) = if dx > 0.0 {
        let boundary = o.x + (cx as f64 + 1.0) * res;
        (1isize, (boundary - origin.x) / dx, res / dx)
    } else if dx < 0.0 {
        let boundary = o.x + cx as f64 * res;
        (-1isize, (boundary - origin.x) / dx, -res / dx)
    } else {
        (0isize, f64::INFINITY, f64::INFINITY)
    };
    let (step_y, mut t_max_y, t_delta_y) = if dy > 0.0 {
        let boundary = o.y + (cy as f64 + 1.0) * res;
        (1isize, (boundary - origin.y) / dy, res / dy)
    } else if dy < 0.0 {
        let boundary = o.y + cy as f64 * res;
        (-1isize, (boundary - origin.y) / dy, -res / dy)
    } else {
        (0isize, f64::INFINITY, f64::INFINITY)
    };

    loop {
        // advance into the next cell; x first on exact corner crossings
        let t_entry = if t_max_x <= t_max_y {
            let t = t_max_x;
            t_max_x += t_delta_x;
            cx = match cx.checked_add_signed(step_x) {
                Some(v) => v,
                None => return max_range,
            };
            t
        } else {
            let t = t_max_y;
            t_max_y += t_delta_y;
            cy = match cy.checked_add_signed(step_y) {
                Some(v) => v,
                None => return max_range,
            };
            t
        };
        if t_entry > max_range {
            return max_range;
        }
        if cx >= grid.width() || cy >= grid.height() {
            return max_range;
        }
        if grid.occupied(cx, cy) {
            return t_entry.min(max_range);
        }
    }
}
