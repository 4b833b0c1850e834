//! Hand-built terrains with known bottleneck widths.
//!
//! Everything starts impassable and free space is carved out as rectangles.
//! Corridors of whole-cell width are straight bands. A unit grid cannot
//! produce a straight band of half-integer width, so those corridors use a
//! jog: the band steps sideways through a short connector, and the pinch is
//! the diagonal between two opposing wall corners.

use crate::error::{Error, Result};
use crate::geom::Vec2;

use super::GridTerrain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorridorShape {
    Horizontal,
    Vertical,
    L,
}

impl CorridorShape {
    pub const ALL: [CorridorShape; 3] = [
        CorridorShape::Horizontal,
        CorridorShape::Vertical,
        CorridorShape::L,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorridorShape::Horizontal => "horizontal",
            CorridorShape::Vertical => "vertical",
            CorridorShape::L => "L",
        }
    }
}

struct Carver {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl Carver {
    fn solid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            blocked: vec![true; width * height],
        }
    }

    fn open(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            blocked: vec![false; width * height],
        }
    }

    /// Sets every cell of `[x0, x1) × [y0, y1)`.
    fn fill(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, blocked: bool) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.blocked[y * self.width + x] = blocked;
            }
        }
    }

    fn carve(&mut self, x0: usize, y0: usize, x1: usize, y1: usize) {
        self.fill(x0, y0, x1, y1, false);
    }

    fn transposed(self) -> Self {
        let mut out = Carver::solid(self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.blocked[x * out.width + y] = self.blocked[y * self.width + x];
            }
        }
        out
    }

    fn finish(self, start: Vec2, goal: Vec2) -> Result<GridTerrain> {
        GridTerrain::from_cells(self.width, self.height, self.blocked, start, goal)
    }
}

/// How a corridor of nominal width `w` is realized: band rows, and for
/// half-integer widths the jog `(connector length, rise)`.
fn corridor_plan(w: f64) -> Result<(usize, Option<(usize, usize)>)> {
    let doubled = w * 2.0;
    if !(2.0..=10.0).contains(&doubled) || doubled.fract() != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "corridor width must be a multiple of 0.5 in [1, 5], got {w}"
        )));
    }
    Ok(match doubled as usize {
        n if n % 2 == 0 => (n / 2, None),
        3 => (2, Some((1, 1))),
        5 => (3, Some((2, 1))),
        7 => (4, Some((3, 2))),
        _ => (5, Some((4, 2))),
    })
}

/// Carves a horizontal band from `x0` to `x1` whose lower edge starts at
/// `y0`, jogging upward at `x_jog` if requested. Returns the lower edge of
/// the band after the jog.
fn horizontal_band(
    c: &mut Carver,
    x0: usize,
    x1: usize,
    y0: usize,
    band: usize,
    jog: Option<(usize, usize)>,
    x_jog: usize,
) -> usize {
    match jog {
        None => {
            c.carve(x0, y0, x1, y0 + band);
            y0
        }
        Some((len, rise)) => {
            let shift = band - rise;
            c.carve(x0, y0, x_jog, y0 + band);
            c.carve(x_jog, y0, x_jog + len, y0 + shift + band);
            c.carve(x_jog + len, y0 + shift, x1, y0 + shift + band);
            y0 + shift
        }
    }
}

/// Two rooms joined by a corridor of nominal width `w` (multiples of 0.5 in
/// [1, 5]). The start sits in the first room, the goal in the second.
pub fn corridor(shape: CorridorShape, w: f64) -> Result<GridTerrain> {
    let (band, jog) = corridor_plan(w)?;
    match shape {
        CorridorShape::Horizontal | CorridorShape::Vertical => {
            let mut c = Carver::solid(48, 26);
            c.carve(1, 3, 12, 23);
            c.carve(36, 3, 47, 23);
            let y_end = horizontal_band(&mut c, 12, 36, 10, band, jog, 22);
            debug_assert!(y_end + band <= 23);
            let (start, goal) = (Vec2::new(6.5, 12.5), Vec2::new(41.5, 13.5));
            if shape == CorridorShape::Vertical {
                let t = c.transposed();
                t.finish(Vec2::new(start.y, start.x), Vec2::new(goal.y, goal.x))
            } else {
                c.finish(start, goal)
            }
        }
        CorridorShape::L => {
            let mut c = Carver::solid(44, 44);
            c.carve(1, 1, 13, 13);
            c.carve(29, 31, 43, 43);
            let xv = 34;
            let y_end = horizontal_band(&mut c, 13, xv + band, 5, band, jog, 20);
            c.carve(xv, y_end, xv + band, 31);
            c.finish(Vec2::new(6.5, 6.5), Vec2::new(36.5, 37.5))
        }
    }
}

/// An open 60×60 field split by a two-cell-thick wall with one gap of
/// `gap` cells.
pub fn wall_with_gap(gap: usize, gap_start: usize) -> Result<GridTerrain> {
    if gap == 0 || gap_start + gap > 60 {
        return Err(Error::InvalidConfig("gap must fit inside the wall".into()));
    }
    let mut c = Carver::open(60, 60);
    c.fill(29, 0, 31, 60, true);
    c.carve(29, gap_start, 31, gap_start + gap);
    c.finish(Vec2::new(15.5, 15.5), Vec2::new(44.5, 44.5))
}

/// A corridor of `w` cells that runs right, doubles back left, then right
/// again, between a start room at the bottom and a goal room at the top.
pub fn zigzag(w: usize) -> Result<GridTerrain> {
    if !(1..=6).contains(&w) {
        return Err(Error::InvalidConfig("zigzag width must be 1..=6".into()));
    }
    let mut c = Carver::solid(50, 50);
    c.carve(1, 1, 12, 12);
    c.carve(38, 35, 49, 49);
    // Right along the bottom, up the right side, left across the middle,
    // up the left side, right along the top.
    c.carve(12, 4, 44, 4 + w);
    c.carve(44 - w, 4, 44, 24 + w);
    c.carve(6, 24, 44, 24 + w);
    c.carve(6, 24, 6 + w, 42);
    c.carve(6, 42 - w, 38, 42);
    c.finish(Vec2::new(6.5, 6.5), Vec2::new(43.5, 43.5))
}

/// The fixed corpus used to check that a small enough circumferential radius
/// always gets through: five layouts for each bottleneck width 2 to 5.
pub fn guarantee_corpus() -> Result<Vec<(String, f64, GridTerrain)>> {
    let mut out = Vec::new();
    for l in 2..=5usize {
        let lf = l as f64;
        for shape in CorridorShape::ALL {
            out.push((format!("{}-{l}", shape.as_str()), lf, corridor(shape, lf)?));
        }
        out.push((format!("wall-gap-{l}"), lf, wall_with_gap(l, 40)?));
        out.push((format!("zigzag-{l}"), lf, zigzag(l)?));
    }
    Ok(out)
}
