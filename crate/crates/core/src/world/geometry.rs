//! Obstacle inflation, disc-robot collision queries, and free-pose sampling.

use super::{OccupancyGrid, Pose, WorldError};
use crate::util::rng::SeededRng;

/// Grow occupancy: a cell is occupied in the output iff any input-occupied
/// cell center lies within `radius` (Euclidean, cell centers, closed).
pub fn inflate(grid: &OccupancyGrid, radius: f64) -> OccupancyGrid {
    debug_assert!(radius >= 0.0);
    if radius == 0.0 {
        return grid.clone();
    }
    let res = grid.resolution();
    let r_cells = (radius / res).floor() as isize;
    let rr = (radius / res) * (radius / res);

    // disk stamp offsets, row-major order
    let mut offsets = Vec::new();
    for dy in -r_cells..=r_cells {
        for dx in -r_cells..=r_cells {
            if (dx * dx + dy * dy) as f64 <= rr {
                offsets.push((dx, dy));
            }
        }
    }

    let (w, h) = (grid.width(), grid.height());
    let mut out = vec![false; w * h];
    for cy in 0..h {
        for cx in 0..w {
            if !grid.occupied(cx, cy) {
                continue;
            }
            for &(dx, dy) in &offsets {
                let nx = cx as isize + dx;
                let ny = cy as isize + dy;
                if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                    out[ny as usize * w + nx as usize] = true;
                }
            }
        }
    }
    OccupancyGrid::new(w, h, res, grid.origin(), out).unwrap()
}

/// True iff a disc of `robot_radius` at the pose overlaps any occupied cell
/// rectangle (closed, so tangency counts) or extends past the grid bounds.
pub fn collision(grid: &OccupancyGrid, pose: &Pose, robot_radius: f64) -> bool {
    let (min, max) = grid.bounds();
    if pose.x - robot_radius < min.x
        || pose.x + robot_radius > max.x
        || pose.y - robot_radius < min.y
        || pose.y + robot_radius > max.y
    {
        return true;
    }
    let res = grid.resolution();
    // cell-index bounding box of the disc, clamped to the grid
    let lo_x = (((pose.x - robot_radius) - min.x) / res).floor().max(0.0) as usize;
    let lo_y = (((pose.y - robot_radius) - min.y) / res).floor().max(0.0) as usize;
    let hi_x = ((((pose.x + robot_radius) - min.x) / res).floor() as usize).min(grid.width() - 1);
    let hi_y = ((((pose.y + robot_radius) - min.y) / res).floor() as usize).min(grid.height() - 1);
    let rr = robot_radius * robot_radius;
    for cy in lo_y..=hi_y {
        for cx in lo_x..=hi_x {
            if !grid.occupied(cx, cy) {
                continue;
            }
            let x0 = min.x + cx as f64 * res;
            let y0 = min.y + cy as f64 * res;
            let nearest_x = pose.x.clamp(x0, x0 + res);
            let nearest_y = pose.y.clamp(y0, y0 + res);
            let dx = pose.x - nearest_x;
            let dy = pose.y - nearest_y;
            if dx * dx + dy * dy <= rr {
                return true;
            }
        }
    }
    false
}

/// Rejection-sample a collision-free pose with heading uniform in `(-PI, PI]`.
pub const SAMPLE_BUDGET: usize = 10_000;

pub fn sample_free_pose(
    grid: &OccupancyGrid,
    robot_radius: f64,
    rng: &mut SeededRng,
) -> Result<Pose, WorldError> {
    let (min, max) = grid.bounds();
    for _ in 0..SAMPLE_BUDGET {
        let x = rng.range(min.x, max.x);
        let y = rng.range(min.y, max.y);
        let theta = rng.angle();
        let pose = Pose::new(x, y, theta);
        if !collision(grid, &pose, robot_radius) {
            return Ok(pose);
        }
    }
    Err(WorldError::SamplingExhausted(SAMPLE_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Point;

    fn brute_force_inflate(grid: &OccupancyGrid, radius: f64) -> Vec<bool> {
        let (w, h) = (grid.width(), grid.height());
        let mut out = vec![false; w * h];
        for cy in 0..h {
            for cx in 0..w {
                'src: for sy in 0..h {
                    for sx in 0..w {
                        if grid.occupied(sx, sy) {
                            let a = grid.cell_center(cx, cy);
                            let b = grid.cell_center(sx, sy);
                            if a.dist(b) <= radius {
                                out[cy * w + cx] = true;
                                break 'src;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn inflate_radius_zero_is_identity() {
        let mut g = OccupancyGrid::empty(8, 8, 0.5, Point::new(0.0, 0.0));
        g.set(3, 4, true);
        assert_eq!(inflate(&g, 0.0), g);
    }

    #[test]
    fn inflate_single_cell_one_meter_is_plus_shape() {
        let mut g = OccupancyGrid::empty(5, 5, 1.0, Point::new(0.0, 0.0));
        g.set(2, 2, true);
        let out = inflate(&g, 1.0);
        assert_eq!(out.occupied_count(), 5);
        for (cx, cy) in [(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)] {
            assert!(out.occupied(cx, cy));
        }
    }

    #[test]
    fn inflate_saturates_at_grid_diagonal() {
        let mut g = OccupancyGrid::empty(6, 4, 0.5, Point::new(0.0, 0.0));
        g.set(0, 0, true);
        let diag = (6.0f64 * 6.0 + 4.0 * 4.0).sqrt() * 0.5;
        let out = inflate(&g, diag);
        assert_eq!(out.occupied_count(), 24);
    }

    #[test]
    fn inflate_matches_brute_force_on_random_grids() {
        let mut rng = SeededRng::new(31);
        for _ in 0..20 {
            let mut g = OccupancyGrid::empty(12, 10, 0.25, Point::new(-1.0, 0.5));
            for _ in 0..8 {
                g.set(rng.below(12) as usize, rng.below(10) as usize, true);
            }
            let radius = rng.range(0.0, 1.5);
            let out = inflate(&g, radius);
            assert_eq!(out.cells(), &brute_force_inflate(&g, radius)[..]);
        }
    }

    #[test]
    fn inflate_is_monotone() {
        let mut rng = SeededRng::new(13);
        for _ in 0..10 {
            let mut a = OccupancyGrid::empty(10, 10, 0.2, Point::new(0.0, 0.0));
            for _ in 0..6 {
                a.set(rng.below(10) as usize, rng.below(10) as usize, true);
            }
            let mut b = a.clone();
            for _ in 0..6 {
                b.set(rng.below(10) as usize, rng.below(10) as usize, true);
            }
            let ia = inflate(&a, 0.45);
            let ib = inflate(&b, 0.45);
            for i in 0..ia.cells().len() {
                assert!(!ia.cells()[i] || ib.cells()[i]);
            }
        }
    }

    #[test]
    fn collision_basics() {
        let g = OccupancyGrid::empty(20, 20, 0.5, Point::new(0.0, 0.0));
        assert!(!collision(&g, &Pose::new(5.0, 5.0, 0.0), 0.3));
        // disc poking past the outer boundary
        assert!(collision(&g, &Pose::new(0.2, 5.0, 0.0), 0.3));

        let mut g = g;
        g.set(10, 10, true); // world rect [5.0,5.5]x[5.0,5.5]
        assert!(collision(&g, &Pose::new(5.25, 5.25, 0.0), 0.1));
    }

    #[test]
    fn collision_tangency_counts() {
        let mut g = OccupancyGrid::empty(20, 20, 0.5, Point::new(0.0, 0.0));
        g.set(10, 10, true); // near face at x = 5.0
        // disc edge exactly on the face
        assert!(collision(&g, &Pose::new(4.75, 5.25, 0.0), 0.25));
        // a hair away
        assert!(!collision(&g, &Pose::new(4.7499999, 5.25, 0.0), 0.25));
    }

    fn brute_force_collision(grid: &OccupancyGrid, pose: &Pose, r: f64) -> bool {
        let (min, max) = grid.bounds();
        if pose.x - r < min.x || pose.x + r > max.x || pose.y - r < min.y || pose.y + r > max.y {
            return true;
        }
        let res = grid.resolution();
        for cy in 0..grid.height() {
            for cx in 0..grid.width() {
                if !grid.occupied(cx, cy) {
                    continue;
                }
                let x0 = min.x + cx as f64 * res;
                let y0 = min.y + cy as f64 * res;
                let nx = pose.x.clamp(x0, x0 + res);
                let ny = pose.y.clamp(y0, y0 + res);
                if (pose.x - nx).hypot(pose.y - ny) <= r {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn collision_agrees_with_all_cell_oracle() {
        let mut rng = SeededRng::new(99);
        let mut checked = 0;
        while checked < 1000 {
            let mut g = OccupancyGrid::empty(20, 20, 0.3, Point::new(0.0, 0.0));
            for _ in 0..25 {
                g.set(rng.below(20) as usize, rng.below(20) as usize, true);
            }
            for _ in 0..25 {
                let p = Pose::new(rng.range(-0.5, 6.5), rng.range(-0.5, 6.5), 0.0);
                let r = rng.range(0.05, 0.8);
                assert_eq!(collision(&g, &p, r), brute_force_collision(&g, &p, r));
                checked += 1;
            }
        }
    }

    #[test]
    fn sample_free_pose_forced_cell() {
        // every cell occupied except one; radius small enough to fit
        let mut g = OccupancyGrid::empty(3, 3, 1.0, Point::new(0.0, 0.0));
        for cy in 0..3 {
            for cx in 0..3 {
                if (cx, cy) != (1, 1) {
                    g.set(cx, cy, true);
                }
            }
        }
        let mut rng = SeededRng::new(4);
        for _ in 0..20 {
            let p = sample_free_pose(&g, 0.1, &mut rng).unwrap();
            assert_eq!(g.world_to_cell(p.x, p.y), Some((1, 1)));
        }
    }

    #[test]
    fn sample_free_pose_exhausts_on_full_map() {
        let g = OccupancyGrid::new(2, 2, 1.0, Point::new(0.0, 0.0), vec![true; 4]).unwrap();
        let mut rng = SeededRng::new(4);
        assert!(matches!(
            sample_free_pose(&g, 0.1, &mut rng),
            Err(WorldError::SamplingExhausted(_))
        ));
    }

    #[test]
    fn sample_free_pose_uniform_on_half_free_map() {
        // left half free, right half occupied
        let mut g = OccupancyGrid::empty(40, 40, 0.25, Point::new(0.0, 0.0));
        for cy in 0..40 {
            for cx in 20..40 {
                g.set(cx, cy, true);
            }
        }
        let mut rng = SeededRng::new(2024);
        let n = 10_000;
        let mut left_of_free_mid = 0usize;
        for _ in 0..n {
            let p = sample_free_pose(&g, 0.0, &mut rng).unwrap();
            assert!(p.x < 5.0, "sample on occupied side at x={}", p.x);
            if p.x < 2.5 {
                left_of_free_mid += 1;
            }
        }
        // binomial 3-sigma bound around n/2
        let sigma = (n as f64 * 0.25).sqrt();
        let dev = (left_of_free_mid as f64 - n as f64 / 2.0).abs();
        assert!(dev <= 3.0 * sigma, "dev {dev} > 3 sigma {}", 3.0 * sigma);
    }
}
