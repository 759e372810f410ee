//! Procedural training/evaluation worlds in three styles.
//!
//! `Blocks` scatters convex rectangular obstacles, `Maze` carves corridors
//! through solid walls, and `Clutter` stamps many small irregular blobs.
//! Every generated map is bordered by occupied cells, is deterministic for a
//! fixed seed, and keeps exactly one free region: after generation the
//! largest 4-connected free component must cover at least 30% of the map
//! area and all other free pockets are filled in.

use super::{OccupancyGrid, Point, WorldError};
use crate::util::rng::SeededRng;

/// Fraction of total map area the main free region must reach.
const MIN_FREE_FRACTION: f64 = 0.30;
const MAX_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStyle {
    /// Convex rectangular obstacles on open ground (training-style).
    Blocks,
    /// Corridor maze carved from solid walls.
    Maze,
    /// Many small irregular obstacles.
    Clutter,
}

impl std::str::FromStr for MapStyle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blocks" => Ok(Self::Blocks),
            "maze" => Ok(Self::Maze),
            "clutter" => Ok(Self::Clutter),
            other => Err(format!(
                "unknown map style {other:?} (expected blocks, maze or clutter)"
            )),
        }
    }
}

impl std::fmt::Display for MapStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Blocks => "blocks",
            Self::Maze => "maze",
            Self::Clutter => "clutter",
        })
    }
}

/// Parameters for [`generate_map`].
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub width_m: f64,
    pub height_m: f64,
    pub resolution: f64,
    /// Obstacle density in `[0, 1]`; exact meaning depends on the style
    /// (obstacle count for blocks/clutter, wall retention for maze).
    pub density: f64,
    pub style: MapStyle,
    pub seed: u64,
}

impl MapSpec {
    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.resolution > 0.0) {
            return Err(WorldError::BadSpec(format!(
                "resolution must be > 0, got {}",
                self.resolution
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(WorldError::BadSpec(format!(
                "density must be in [0, 1], got {}",
                self.density
            )));
        }
        let w = (self.width_m / self.resolution).round() as usize;
        let h = (self.height_m / self.resolution).round() as usize;
        if w < 4 || h < 4 {
            return Err(WorldError::BadSpec(format!(
                "map too small: {w}x{h} cells"
            )));
        }
        Ok(())
    }

    fn cells(&self) -> (usize, usize) {
        (
            (self.width_m / self.resolution).round() as usize,
            (self.height_m / self.resolution).round() as usize,
        )
    }
}

/// Generate a bordered occupancy grid per the spec, retrying with derived
/// seeds until the free-space connectivity requirement is met.
pub fn generate_map(spec: &MapSpec) -> Result<OccupancyGrid, WorldError> {
    spec.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = SeededRng::derive(spec.seed, attempt as u64);
        let mut grid = match spec.style {
            MapStyle::Blocks => gen_blocks(spec, &mut rng),
            MapStyle::Maze => gen_maze(spec, &mut rng),
            MapStyle::Clutter => gen_clutter(spec, &mut rng),
        };
        if keep_largest_free_component(&mut grid) >= MIN_FREE_FRACTION {
            return Ok(grid);
        }
    }
    Err(WorldError::ConnectivityUnsatisfied(MAX_ATTEMPTS))
}

fn bordered(spec: &MapSpec) -> OccupancyGrid {
    let (w, h) = spec.cells();
    let mut g = OccupancyGrid::empty(w, h, spec.resolution, Point::new(0.0, 0.0));
    for cx in 0..w {
        g.set(cx, 0, true);
        g.set(cx, h - 1, true);
    }
    for cy in 0..h {
        g.set(0, cy, true);
        g.set(w - 1, cy, true);
    }
    g
}

fn stamp_rect(grid: &mut OccupancyGrid, min: Point, max: Point) {
    grid.fill_region(min, max, true);
}

fn stamp_disc(grid: &mut OccupancyGrid, center: Point, radius: f64) {
    let res = grid.resolution();
    let r_cells = (radius / res).ceil() as isize + 1;
    if let Some((cx, cy)) = grid.world_to_cell(center.x, center.y) {
        for dy in -r_cells..=r_cells {
            for dx in -r_cells..=r_cells {
                let nx = cx as isize + dx;
                let ny = cy as isize + dy;
                if nx < 0 || ny < 0 || nx as usize >= grid.width() || ny as usize >= grid.height()
                {
                    continue;
                }
                let c = grid.cell_center(nx as usize, ny as usize);
                if c.dist(center) <= radius {
                    grid.set(nx as usize, ny as usize, true);
                }
            }
        }
    }
}

fn gen_blocks(spec: &MapSpec, rng: &mut SeededRng) -> OccupancyGrid {
    let mut g = bordered(spec);
    let n_rects = (spec.density * spec.width_m * spec.height_m * 0.35).round() as usize;
    for _ in 0..n_rects {
        let w_r = rng.range(0.4, 1.6).min(spec.width_m - 2.0 * spec.resolution);
        let h_r = rng.range(0.4, 1.6).min(spec.height_m - 2.0 * spec.resolution);
        let x0 = rng.range(spec.resolution, spec.width_m - spec.resolution - w_r);
        let y0 = rng.range(spec.resolution, spec.height_m - spec.resolution - h_r);
        stamp_rect(&mut g, Point::new(x0, y0), Point::new(x0 + w_r, y0 + h_r));
    }
    g
}

fn gen_clutter(spec: &MapSpec, rng: &mut SeededRng) -> OccupancyGrid {
    let mut g = bordered(spec);
    let n_blobs = (spec.density * spec.width_m * spec.height_m * 0.8).round() as usize;
    for _ in 0..n_blobs {
        let mut cx = 1 + rng.below(g.width() as u64 - 2) as isize;
        let mut cy = 1 + rng.below(g.height() as u64 - 2) as isize;
        let radius = rng.range(0.05, 0.18);
        let steps = 3 + rng.below(6);
        for _ in 0..steps {
            let center = g.cell_center(cx as usize, cy as usize);
            stamp_disc(&mut g, center, radius);
            cx = (cx + rng.below(3) as isize - 1).clamp(1, g.width() as isize - 2);
            cy = (cy + rng.below(3) as isize - 1).clamp(1, g.height() as isize - 2);
        }
    }
    g
}

fn gen_maze(spec: &MapSpec, rng: &mut SeededRng) -> OccupancyGrid {
    let (w, h) = spec.cells();
    let res = spec.resolution;
    let wall_c = ((0.1 / res).round() as usize).max(1);
    let corr_c = ((0.9 / res).round() as usize).max(3);
    let pitch = wall_c + corr_c;
    let nx = (w - wall_c) / pitch;
    let ny = (h - wall_c) / pitch;
    if nx < 2 || ny < 2 {
        // too small for corridors: fall back to an open bordered room
        return bordered(spec);
    }

    // start solid, then carve rooms and passages
    let mut g = OccupancyGrid::new(w, h, res, Point::new(0.0, 0.0), vec![true; w * h]).unwrap();
    let room = |i: usize, j: usize| -> (usize, usize) { (wall_c + i * pitch, wall_c + j * pitch) };
    let carve = |g: &mut OccupancyGrid, x0: usize, y0: usize, cw: usize, ch: usize| {
        for cy in y0..(y0 + ch).min(g.height()) {
            for cx in x0..(x0 + cw).min(g.width()) {
                g.set(cx, cy, false);
            }
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let (x0, y0) = room(i, j);
            carve(&mut g, x0, y0, corr_c, corr_c);
        }
    }

    // depth-first carving over the room lattice
    let mut visited = vec![false; nx * ny];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    let open_passage = |g: &mut OccupancyGrid, a: (usize, usize), b: (usize, usize)| {
        let (ax, ay) = room(a.0, a.1);
        if b.0 > a.0 {
            carve(g, ax + corr_c, ay, wall_c, corr_c);
        } else if b.0 < a.0 {
            let (bx, by) = room(b.0, b.1);
            carve(g, bx + corr_c, by, wall_c, corr_c);
        } else if b.1 > a.1 {
            carve(g, ax, ay + corr_c, corr_c, wall_c);
        } else {
            let (bx, by) = room(b.0, b.1);
            carve(g, bx, by + corr_c, corr_c, wall_c);
        }
    };
    while let Some(&(i, j)) = stack.last() {
        let mut neighbors: Vec<(usize, usize)> = Vec::with_capacity(4);
        if i + 1 < nx && !visited[j * nx + i + 1] {
            neighbors.push((i + 1, j));
        }
        if i > 0 && !visited[j * nx + i - 1] {
            neighbors.push((i - 1, j));
        }
        if j + 1 < ny && !visited[(j + 1) * nx + i] {
            neighbors.push((i, j + 1));
        }
        if j > 0 && !visited[(j - 1) * nx + i] {
            neighbors.push((i, j - 1));
        }
        if neighbors.is_empty() {
            stack.pop();
            continue;
        }
        let next = neighbors[rng.below(neighbors.len() as u64) as usize];
        open_passage(&mut g, (i, j), next);
        visited[next.1 * nx + next.0] = true;
        stack.push(next);
    }

    // lower density opens extra walls, adding loops
    let open_extra = (1.0 - spec.density) * 0.4;
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx && rng.f64() < open_extra {
                open_passage(&mut g, (i, j), (i + 1, j));
            }
            if j + 1 < ny && rng.f64() < open_extra {
                open_passage(&mut g, (i, j), (i, j + 1));
            }
        }
    }
    g
}

/// Flood-fill free space (4-connected), keep the largest component, fill all
/// other free cells. Returns the kept component's fraction of the map area.
fn keep_largest_free_component(grid: &mut OccupancyGrid) -> f64 {
    let (w, h) = (grid.width(), grid.height());
    let mut label = vec![u32::MAX; w * h];
    let mut sizes: Vec<usize> = Vec::new();
    let mut queue = Vec::new();
    for start in 0..w * h {
        if grid.cells()[start] || label[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        let mut count = 0usize;
        queue.push(start);
        label[start] = id;
        while let Some(idx) = queue.pop() {
            count += 1;
            let (cx, cy) = (idx % w, idx / w);
            let mut visit = |nx: usize, ny: usize| {
                let nidx = ny * w + nx;
                if !grid.cells()[nidx] && label[nidx] == u32::MAX {
                    label[nidx] = id;
                    queue.push(nidx);
                }
            };
            if cx > 0 {
                visit(cx - 1, cy);
            }
            if cx + 1 < w {
                visit(cx + 1, cy);
            }
            if cy > 0 {
                visit(cx, cy - 1);
            }
            if cy + 1 < h {
                visit(cx, cy + 1);
            }
        }
        sizes.push(count);
    }
    let Some((largest, &size)) = sizes.iter().enumerate().max_by_key(|(i, &s)| (s, usize::MAX - i))
    else {
        return 0.0;
    };
    for idx in 0..w * h {
        if !grid.cells()[idx] && label[idx] != largest as u32 {
            let (cx, cy) = (idx % w, idx / w);
            grid.set(cx, cy, true);
        }
    }
    size as f64 / (w * h) as f64
}
