//! Occupancy-grid environments: generation, connectivity and width analysis.
//!
//! Cells are unit squares; cell `(ix, iy)` covers `[ix, ix+1) × [iy, iy+1)`.
//! Everything outside the grid is treated as impassable.

mod analysis;
pub mod crafted;
mod format;
mod perlin;

pub use analysis::{clearance_at, min_path_width, path_exists, TerrainSummary};
pub use format::{load_terrain, save_terrain};
pub use perlin::{perlin_value, PerlinConfig, PerlinNoise};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Side length, in cells, of the always-passable square around start and goal.
pub const SAFE_ZONE_CELLS: usize = 10;

pub const DEFAULT_SIZE: usize = 60;
pub const DEFAULT_START: Vec2 = Vec2::new(15.5, 15.5);
pub const DEFAULT_GOAL: Vec2 = Vec2::new(44.5, 44.5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTerrain {
    width: usize,
    height: usize,
    /// Row-major, `true` = impassable.
    blocked: Vec<bool>,
    start: Vec2,
    goal: Vec2,
}

impl GridTerrain {
    /// An all-passable grid.
    pub fn open(width: usize, height: usize, start: Vec2, goal: Vec2) -> Result<Self> {
        Self::from_cells(width, height, vec![false; width * height], start, goal)
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        blocked: Vec<bool>,
        start: Vec2,
        goal: Vec2,
    ) -> Result<Self> {
        let t = Self {
            width,
            height,
            blocked,
            start,
            goal,
        };
        t.validate()?;
        Ok(t)
    }

    /// Builds a terrain from an ASCII picture. The first line is the top row
    /// (largest y); `#` is impassable, anything else passable.
    pub fn from_ascii(picture: &str, start: Vec2, goal: Vec2) -> Result<Self> {
        let rows: Vec<&str> = picture
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut blocked = vec![false; width * height];
        for (k, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::InvalidTerrain("ragged ascii rows".into()));
            }
            let iy = height - 1 - k;
            for (ix, ch) in row.chars().enumerate() {
                blocked[iy * width + ix] = ch == '#';
            }
        }
        Self::from_cells(width, height, blocked, start, goal)
    }

    /// Checks the structural invariants: positive dimensions, start and goal
    /// distinct, strictly inside the grid and on passable cells.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidTerrain("grid has zero size".into()));
        }
        if self.blocked.len() != self.width * self.height {
            return Err(Error::InvalidTerrain(format!(
                "expected {} cells, found {}",
                self.width * self.height,
                self.blocked.len()
            )));
        }
        if self.start == self.goal {
            return Err(Error::InvalidTerrain("start and goal coincide".into()));
        }
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if !self.strictly_inside(p) {
                return Err(Error::InvalidTerrain(format!(
                    "{name} ({}, {}) is not strictly inside the grid",
                    p.x, p.y
                )));
            }
            if self.is_blocked_at(p) {
                return Err(Error::InvalidTerrain(format!(
                    "{name} lies on an impassable cell"
                )));
            }
        }
        Ok(())
    }

    fn strictly_inside(&self, p: Vec2) -> bool {
        p.x > 0.0 && p.y > 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Vec2 {
        self.start
    }

    pub fn goal(&self) -> Vec2 {
        self.goal
    }

    pub fn cells(&self) -> &[bool] {
        &self.blocked
    }

    /// Whether cell `(ix, iy)` is impassable; out-of-range indices are.
    pub fn is_blocked(&self, ix: i64, iy: i64) -> bool {
        if ix < 0 || iy < 0 || ix >= self.width as i64 || iy >= self.height as i64 {
            return true;
        }
        self.blocked[iy as usize * self.width + ix as usize]
    }

    pub fn set_blocked(&mut self, ix: usize, iy: usize, blocked: bool) {
        assert!(ix < self.width && iy < self.height, "cell out of range");
        self.blocked[iy * self.width + ix] = blocked;
    }

    /// Cell index containing `p` (floor of each coordinate).
    pub fn cell_of(p: Vec2) -> (i64, i64) {
        (p.x.floor() as i64, p.y.floor() as i64)
    }

    /// Whether the cell containing `p` is impassable or `p` lies outside.
    pub fn is_blocked_at(&self, p: Vec2) -> bool {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return true;
        }
        let (ix, iy) = Self::cell_of(p);
        self.is_blocked(ix, iy)
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|b| **b).count()
    }

    /// The cell block of side [`SAFE_ZONE_CELLS`] around `p`, as
    /// `(x0, y0)` of its lower-left cell, or `None` if it leaves the grid.
    pub fn safe_zone_origin(&self, p: Vec2) -> Option<(usize, usize)> {
        let half = (SAFE_ZONE_CELLS / 2) as i64;
        let (cx, cy) = Self::cell_of(p);
        let (x0, y0) = (cx - half, cy - half);
        let n = SAFE_ZONE_CELLS as i64;
        if x0 < 0 || y0 < 0 || x0 + n > self.width as i64 || y0 + n > self.height as i64 {
            return None;
        }
        Some((x0 as usize, y0 as usize))
    }

    /// True when both safe zones fit in the grid and are entirely passable.
    pub fn safe_zones_clear(&self) -> bool {
        [self.start, self.goal]
            .iter()
            .all(|&p| match self.safe_zone_origin(p) {
                Some((x0, y0)) => (y0..y0 + SAFE_ZONE_CELLS).all(|iy| {
                    (x0..x0 + SAFE_ZONE_CELLS).all(|ix| !self.blocked[iy * self.width + ix])
                }),
                None => false,
            })
    }

    pub fn summary(&self) -> TerrainSummary {
        TerrainSummary::of(self)
    }
}

/// Classifies each cell by comparing the noise at its centre with the
/// threshold, then clears the safe zones around start and goal.
///
/// `rng` is consulted only when `cfg.threshold_a` is unset.
pub fn generate_terrain<R: Rng + ?Sized>(
    cfg: &PerlinConfig,
    width: usize,
    height: usize,
    start: Vec2,
    goal: Vec2,
    rng: &mut R,
) -> Result<GridTerrain> {
    cfg.validate()?;
    if width < 2 * SAFE_ZONE_CELLS || height < 2 * SAFE_ZONE_CELLS {
        return Err(Error::InvalidConfig(format!(
            "grid {width}x{height} is too small; at least {0}x{0} is required",
            2 * SAFE_ZONE_CELLS
        )));
    }
    let threshold = cfg.threshold_a.unwrap_or_else(|| rng.gen_range(-1.0..=1.0));
    let noise = PerlinNoise::new(cfg.seed);

    let mut blocked = vec![false; width * height];
    for iy in 0..height {
        for ix in 0..width {
            let f = noise.value(ix as f64 + 0.5, iy as f64 + 0.5, cfg.lattice_cell_size);
            blocked[iy * width + ix] = f > threshold;
        }
    }

    let mut t = GridTerrain {
        width,
        height,
        blocked,
        start,
        goal,
    };
    for p in [start, goal] {
        let (x0, y0) = t.safe_zone_origin(p).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "safe zone around ({}, {}) does not fit in a {width}x{height} grid",
                p.x, p.y
            ))
        })?;
        for iy in y0..y0 + SAFE_ZONE_CELLS {
            for ix in x0..x0 + SAFE_ZONE_CELLS {
                t.blocked[iy * width + ix] = false;
            }
        }
    }
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gen(a: f64, seed: u64) -> GridTerrain {
        let cfg = PerlinConfig {
            seed,
            lattice_cell_size: 10.0,
            threshold_a: Some(a),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        generate_terrain(&cfg, 60, 60, DEFAULT_START, DEFAULT_GOAL, &mut rng).unwrap()
    }

    #[test]
    fn threshold_one_is_all_passable() {
        assert_eq!(gen(1.0, 5).blocked_count(), 0);
    }

    #[test]
    fn threshold_minus_one_blocks_all_but_safe_zones() {
        let t = gen(-1.0, 5);
        assert_eq!(t.blocked_count(), 3600 - 200);
        assert!(t.safe_zones_clear());
    }

    #[test]
    fn safe_zone_is_ten_by_ten_around_start() {
        let t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        assert_eq!(t.safe_zone_origin(DEFAULT_START), Some((10, 10)));
        assert_eq!(t.safe_zone_origin(DEFAULT_GOAL), Some((39, 39)));
    }

    #[test]
    fn too_small_grid_rejected() {
        let cfg = PerlinConfig {
            threshold_a: Some(0.0),
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = generate_terrain(
            &cfg,
            19,
            60,
            Vec2::new(5.5, 5.5),
            Vec2::new(14.5, 50.5),
            &mut rng,
        );
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn unset_threshold_draws_from_rng() {
        let cfg = PerlinConfig {
            seed: 11,
            ..Default::default()
        };
        let a = generate_terrain(
            &cfg,
            60,
            60,
            DEFAULT_START,
            DEFAULT_GOAL,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        let b = generate_terrain(
            &cfg,
            60,
            60,
            DEFAULT_START,
            DEFAULT_GOAL,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_start_goal() {
        assert!(GridTerrain::open(10, 10, Vec2::new(1.5, 1.5), Vec2::new(1.5, 1.5)).is_err());
        assert!(GridTerrain::open(10, 10, Vec2::new(0.0, 1.5), Vec2::new(5.5, 5.5)).is_err());
        assert!(GridTerrain::open(10, 10, Vec2::new(1.5, 1.5), Vec2::new(10.5, 5.5)).is_err());
        let mut cells = vec![false; 100];
        cells[11] = true;
        assert!(
            GridTerrain::from_cells(10, 10, cells, Vec2::new(1.5, 1.5), Vec2::new(5.5, 5.5))
                .is_err()
        );
    }

    #[test]
    fn outside_counts_as_blocked() {
        let t = GridTerrain::open(10, 10, Vec2::new(1.5, 1.5), Vec2::new(5.5, 5.5)).unwrap();
        assert!(t.is_blocked_at(Vec2::new(-0.01, 3.0)));
        assert!(t.is_blocked_at(Vec2::new(10.0, 3.0)));
        assert!(!t.is_blocked_at(Vec2::new(9.999, 3.0)));
        assert!(!t.is_blocked_at(Vec2::new(0.0, 0.0)));
    }

    #[test]
    fn ascii_top_row_is_highest_y() {
        let t = GridTerrain::from_ascii("#..\n...\n...", Vec2::new(0.5, 0.5), Vec2::new(2.5, 0.5))
            .unwrap();
        assert!(t.is_blocked(0, 2));
        assert!(!t.is_blocked(0, 0));
    }
}
