//! The occupancy grid and its portable-graymap file format.
//!
//! On disk a map is a graymap image (binary `P5` or ASCII `P2`, maxval 255)
//! plus a sidecar plain-text metadata file with `resolution=`, `origin_x=`
//! and `origin_y=` lines. Pixel 0 is occupied, 255 free; the import threshold
//! is fixed at `value < 128 => occupied`. The first raster row of the image
//! holds the highest-y row of cells.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Point, WorldError};

/// Import threshold: graymap pixel values below this are occupied.
pub const OCCUPANCY_THRESHOLD: u8 = 128;

/// Immutable 2D occupancy grid. Row-major cells, `true` = occupied;
/// cell `(0, 0)` has its corner at `origin` and spans `resolution` meters.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    resolution: f64,
    width: usize,
    height: usize,
    origin: Point,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        cells: Vec<bool>,
    ) -> Result<Self, WorldError> {
        if width == 0 || height == 0 {
            return Err(WorldError::BadDimensions(format!(
                "width and height must be >= 1, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0) {
            return Err(WorldError::BadDimensions(format!(
                "resolution must be > 0, got {resolution}"
            )));
        }
        if cells.len() != width * height {
            return Err(WorldError::BadDimensions(format!(
                "cell count {} does not match {width}x{height}",
                cells.len()
            )));
        }
        Ok(Self {
            resolution,
            width,
            height,
            origin,
            cells,
        })
    }

    /// All-free grid.
    pub fn empty(width: usize, height: usize, resolution: f64, origin: Point) -> Self {
        Self::new(width, height, resolution, origin, vec![false; width * height]).unwrap()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// World extent: `(min, max)` corners.
    pub fn bounds(&self) -> (Point, Point) {
        (
            self.origin,
            Point::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        )
    }

    #[inline]
    pub fn idx(&self, cx: usize, cy: usize) -> usize {
        cy * self.width + cx
    }

    #[inline]
    pub fn occupied(&self, cx: usize, cy: usize) -> bool {
        self.cells[self.idx(cx, cy)]
    }

    pub fn set(&mut self, cx: usize, cy: usize, occupied: bool) {
        let i = self.idx(cx, cy);
        self.cells[i] = occupied;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Cell containing a world point, if inside the grid. Cells are half-open
    /// per axis, so every interior point maps to exactly one cell.
    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin.x) / self.resolution;
        let fy = (y - self.origin.y) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let cx = fx.floor() as usize;
        let cy = fy.floor() as usize;
        if cx >= self.width || cy >= self.height {
            return None;
        }
        Some((cx, cy))
    }

    /// World coordinates of a cell's center.
    pub fn cell_center(&self, cx: usize, cy: usize) -> Point {
        Point::new(
            self.origin.x + (cx as f64 + 0.5) * self.resolution,
            self.origin.y + (cy as f64 + 0.5) * self.resolution,
        )
    }

    /// True if the world point lies on an occupied cell (out of bounds counts
    /// as occupied for query purposes).
    pub fn occupied_at_world(&self, x: f64, y: f64) -> bool {
        match self.world_to_cell(x, y) {
            Some((cx, cy)) => self.occupied(cx, cy),
            None => true,
        }
    }

    /// Force all cells whose center lies inside the closed rectangle to the
    /// given occupancy. Used by scenario events.
    pub fn fill_region(&mut self, min: Point, max: Point, occupied: bool) {
        for cy in 0..self.height {
            for cx in 0..self.width {
                let c = self.cell_center(cx, cy);
                if c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y {
                    self.set(cx, cy, occupied);
                }
            }
        }
    }
}

fn meta_path(pgm_path: &Path) -> PathBuf {
    pgm_path.with_extension("meta")
}

/// Load a graymap + metadata map pair. `path` names the `.pgm` image; the
/// sidecar is the same path with a `.meta` extension.
pub fn load_map(path: &Path) -> Result<OccupancyGrid, WorldError> {
    let bytes = fs::read(path).map_err(|source| WorldError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let (width, height, pixels) = parse_pgm(&bytes).map_err(|reason| WorldError::Format {
        path: path.display().to_string(),
        reason,
    })?;

    let mpath = meta_path(path);
    let meta = fs::read_to_string(&mpath).map_err(|source| WorldError::Io {
        path: mpath.display().to_string(),
        source,
    })?;
    let (resolution, origin_x, origin_y) =
        parse_metadata(&meta).map_err(|reason| WorldError::Format {
            path: mpath.display().to_string(),
            reason,
        })?;
    if !(resolution > 0.0) {
        return Err(WorldError::MetadataMismatch {
            path: mpath.display().to_string(),
            reason: format!("resolution must be > 0, got {resolution}"),
        });
    }
    if pixels.len() != width * height {
        return Err(WorldError::MetadataMismatch {
            path: path.display().to_string(),
            reason: format!(
                "pixel count {} does not match {width}x{height} header",
                pixels.len()
            ),
        });
    }

    // Raster row 0 is the top of the image = highest-y cell row.
    let mut cells = vec![false; width * height];
    for row in 0..height {
        let cy = height - 1 - row;
        for cx in 0..width {
            cells[cy * width + cx] = pixels[row * width + cx] < OCCUPANCY_THRESHOLD;
        }
    }
    OccupancyGrid::new(width, height, resolution, Point::new(origin_x, origin_y), cells)
}

/// Write a map as binary P5 graymap plus the `.meta` sidecar.
pub fn save_map(grid: &OccupancyGrid, path: &Path) -> Result<(), WorldError> {
    let mut out = Vec::with_capacity(grid.width() * grid.height() + 32);
    out.extend_from_slice(format!("P5\n{} {}\n255\n", grid.width(), grid.height()).as_bytes());
    for row in 0..grid.height() {
        let cy = grid.height() - 1 - row;
        for cx in 0..grid.width() {
            out.push(if grid.occupied(cx, cy) { 0 } else { 255 });
        }
    }
    let write = |p: &Path, data: &[u8]| -> Result<(), WorldError> {
        let mut f = fs::File::create(p).map_err(|source| WorldError::Io {
            path: p.display().to_string(),
            source,
        })?;
        f.write_all(data).map_err(|source| WorldError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    write(path, &out)?;

    let meta = format!(
        "resolution={}\norigin_x={}\norigin_y={}\n",
        grid.resolution(),
        grid.origin().x,
        grid.origin().y
    );
    write(&meta_path(path), meta.as_bytes())
}

fn parse_metadata(text: &str) -> Result<(f64, f64, f64), String> {
    let mut resolution = None;
    let mut origin_x = None;
    let mut origin_y = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", lineno + 1))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("line {}: bad number {value:?}", lineno + 1))?;
        match key.trim() {
            "resolution" => resolution = Some(value),
            "origin_x" => origin_x = Some(value),
            "origin_y" => origin_y = Some(value),
            other => return Err(format!("line {}: unknown key {other:?}", lineno + 1)),
        }
    }
    Ok((
        resolution.ok_or("missing resolution")?,
        origin_x.ok_or("missing origin_x")?,
        origin_y.ok_or("missing origin_y")?,
    ))
}

/// Minimal PGM reader for P5 (binary) and P2 (ASCII), maxval <= 255,
/// `#` comments allowed in the header.
fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), String> {
    let mut pos = 0usize;

    let mut next_token = |bytes: &[u8]| -> Result<String, String> {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("unexpected end of file in header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = next_token(bytes)?;
    if magic != "P5" && magic != "P2" {
        return Err(format!("unsupported magic {magic:?}, expected P5 or P2"));
    }
    let width: usize = next_token(bytes)?
        .parse()
        .map_err(|_| "bad width".to_string())?;
    let height: usize = next_token(bytes)?
        .parse()
        .map_err(|_| "bad height".to_string())?;
    let maxval: usize = next_token(bytes)?
        .parse()
        .map_err(|_| "bad maxval".to_string())?;
    if maxval == 0 || maxval > 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    if width == 0 || height == 0 {
        return Err(format!("degenerate image {width}x{height}"));
    }
    let n = width * height;

    let pixels = if magic == "P5" {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        if bytes.len() < pos + n {
            return Err(format!(
                "raster truncated: need {n} bytes, have {}",
                bytes.len().saturating_sub(pos)
            ));
        }
        bytes[pos..pos + n].to_vec()
    } else {
        let mut px = Vec::with_capacity(n);
        for _ in 0..n {
            let v: usize = next_token(bytes)?
                .parse()
                .map_err(|_| "bad ascii pixel".to_string())?;
            if v > maxval {
                return Err(format!("pixel {v} exceeds maxval {maxval}"));
            }
            px.push(v as u8);
        }
        px
    };
    // rescale so the threshold is independent of maxval
    let pixels = if maxval == 255 {
        pixels
    } else {
        pixels
            .into_iter()
            .map(|p| ((p as usize * 255) / maxval) as u8)
            .collect()
    };
    Ok((width, height, pixels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_bad_dimensions() {
        assert!(OccupancyGrid::new(0, 2, 0.1, Point::new(0.0, 0.0), vec![]).is_err());
        assert!(OccupancyGrid::new(2, 2, 0.0, Point::new(0.0, 0.0), vec![false; 4]).is_err());
        assert!(OccupancyGrid::new(2, 2, 0.1, Point::new(0.0, 0.0), vec![false; 3]).is_err());
    }

    #[test]
    fn world_cell_round_trip() {
        let g = OccupancyGrid::empty(7, 5, 0.25, Point::new(-1.0, 2.0));
        for cy in 0..5 {
            for cx in 0..7 {
                let c = g.cell_center(cx, cy);
                assert_eq!(g.world_to_cell(c.x, c.y), Some((cx, cy)));
            }
        }
        // points on the far boundary are outside
        assert_eq!(g.world_to_cell(-1.0 + 7.0 * 0.25, 2.1), None);
        assert_eq!(g.world_to_cell(-1.0, 2.0), Some((0, 0)));
    }

    #[test]
    fn load_all_white_graymap() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        std::fs::write(&p, b"P5\n2 2\n255\n\xff\xff\xff\xff").unwrap();
        std::fs::write(
            dir.path().join("m.meta"),
            "resolution=0.05\norigin_x=0\norigin_y=0\n",
        )
        .unwrap();
        let g = load_map(&p).unwrap();
        assert_eq!((g.width(), g.height()), (2, 2));
        assert_eq!(g.occupied_count(), 0);
        assert_eq!(g.resolution(), 0.05);
    }

    #[test]
    fn load_all_black_graymap() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        std::fs::write(&p, b"P5\n2 2\n255\n\x00\x00\x00\x00").unwrap();
        std::fs::write(
            dir.path().join("m.meta"),
            "resolution=0.05\norigin_x=0\norigin_y=0\n",
        )
        .unwrap();
        let g = load_map(&p).unwrap();
        assert_eq!(g.occupied_count(), 4);
    }

    #[test]
    fn load_ascii_p2_with_comment() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        std::fs::write(&p, b"P2\n# a comment\n2 2\n255\n0 255\n255 0\n").unwrap();
        std::fs::write(
            dir.path().join("m.meta"),
            "resolution=1.0\norigin_x=0\norigin_y=0\n",
        )
        .unwrap();
        let g = load_map(&p).unwrap();
        // raster row 0 is the TOP row = cell row 1
        assert!(g.occupied(0, 1));
        assert!(!g.occupied(1, 1));
        assert!(!g.occupied(0, 0));
        assert!(g.occupied(1, 0));
    }

    #[test]
    fn save_load_round_trip_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = OccupancyGrid::empty(13, 9, 0.05, Point::new(-0.5, 0.25));
        // deterministic speckle pattern
        for cy in 0..9 {
            for cx in 0..13 {
                if (cx * 7 + cy * 13) % 5 == 0 {
                    g.set(cx, cy, true);
                }
            }
        }
        let p = dir.path().join("rt.pgm");
        save_map(&g, &p).unwrap();
        let g2 = load_map(&p).unwrap();
        assert_eq!(g, g2);
        // and the files themselves are reproducible byte-for-byte
        let bytes1 = std::fs::read(&p).unwrap();
        save_map(&g2, &p).unwrap();
        assert_eq!(bytes1, std::fs::read(&p).unwrap());
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("missing.pgm");
        assert!(matches!(load_map(&p), Err(WorldError::Io { .. })));

        let p = dir.path().join("bad.pgm");
        std::fs::write(&p, b"P6\n2 2\n255\n").unwrap();
        std::fs::write(
            dir.path().join("bad.meta"),
            "resolution=1\norigin_x=0\norigin_y=0\n",
        )
        .unwrap();
        assert!(matches!(load_map(&p), Err(WorldError::Format { .. })));

        // truncated raster
        let p = dir.path().join("trunc.pgm");
        std::fs::write(&p, b"P5\n4 4\n255\n\x00\x00").unwrap();
        std::fs::write(
            dir.path().join("trunc.meta"),
            "resolution=1\norigin_x=0\norigin_y=0\n",
        )
        .unwrap();
        assert!(matches!(load_map(&p), Err(WorldError::Format { .. })));
    }

    #[test]
    fn fill_region_sets_cell_centers_inside() {
        let mut g = OccupancyGrid::empty(10, 10, 0.1, Point::new(0.0, 0.0));
        g.fill_region(Point::new(0.2, 0.2), Point::new(0.5, 0.4), true);
        assert!(g.occupied(2, 2)); // center (0.25, 0.25)
        assert!(g.occupied(4, 3)); // center (0.45, 0.35)
        assert!(!g.occupied(5, 2)); // center (0.55, 0.25) outside x
        g.fill_region(Point::new(0.0, 0.0), Point::new(1.0, 1.0), false);
        assert_eq!(g.occupied_count(), 0);
    }
}
