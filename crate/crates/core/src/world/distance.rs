//! Euclidean distance field over the grid, used for clearance scoring.

use super::OccupancyGrid;

/// Per-cell Euclidean distance (meters, center-to-center) to the nearest
/// occupied cell, computed with the exact two-pass separable squared
/// distance transform. Grids with no occupied cells give infinite distance.
#[derive(Debug, Clone)]
pub struct DistanceField {
    width: usize,
    height: usize,
    resolution: f64,
    origin: super::Point,
    /// squared distance in cell units
    dist_sq: Vec<f64>,
}

impl DistanceField {
    pub fn new(grid: &OccupancyGrid) -> Self {
        let (w, h) = (grid.width(), grid.height());
        let mut dist_sq = vec![0.0f64; w * h];

        // pass 1: per column, 1D transform over rows of the indicator
        let mut f = vec![0.0f64; h.max(w)];
        let mut d = vec![0.0f64; h.max(w)];
        let mut v = vec![0usize; h.max(w)];
        let mut z = vec![0.0f64; h.max(w) + 1];
        for cx in 0..w {
            for cy in 0..h {
                f[cy] = if grid.occupied(cx, cy) { 0.0 } else { f64::INFINITY };
            }
            dt_1d(&f[..h], &mut d[..h], &mut v, &mut z);
            for cy in 0..h {
                dist_sq[cy * w + cx] = d[cy];
            }
        }
        // pass 2: per row, over the column results
        for cy in 0..h {
            f[..w].copy_from_slice(&dist_sq[cy * w..cy * w + w]);
            dt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
            dist_sq[cy * w..cy * w + w].copy_from_slice(&d[..w]);
        }

        Self {
            width: w,
            height: h,
            resolution: grid.resolution(),
            origin: grid.origin(),
            dist_sq,
        }
    }

    /// Distance in meters from the cell center to the nearest occupied cell
    /// center.
    pub fn distance_cell(&self, cx: usize, cy: usize) -> f64 {
        self.resolution * self.dist_sq[cy * self.width + cx].sqrt()
    }

    /// Distance sampled at the cell containing a world point; 0 outside the
    /// grid.
    pub fn distance_world(&self, x: f64, y: f64) -> f64 {
        let fx = (x - self.origin.x) / self.resolution;
        let fy = (y - self.origin.y) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return 0.0;
        }
        let (cx, cy) = (fx.floor() as usize, fy.floor() as usize);
        if cx >= self.width || cy >= self.height {
            return 0.0;
        }
        self.distance_cell(cx, cy)
    }

    /// Obstacle clearance of a robot disc centered at the point, clamped at 0.
    pub fn clearance(&self, x: f64, y: f64, robot_radius: f64) -> f64 {
        (self.distance_world(x, y) - robot_radius).max(0.0)
    }
}

/// Felzenszwalb-Huttenlocher 1D squared distance transform under the
/// lower envelope of parabolas. Infinite entries carry no parabola; an
/// all-infinite input stays all-infinite.
fn dt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let Some(first) = (0..n).find(|&i| f[i].is_finite()) else {
        d[..n].fill(f64::INFINITY);
        return;
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            // intersection of the parabolas rooted at p and q
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] {
                k -= 1; // z[0] = -inf guarantees k >= 1 here
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        d[q] = dq * dq + f[p];
    }
}
