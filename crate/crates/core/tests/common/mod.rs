//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use bycoms::terrain::GridTerrain;
use bycoms::Vec2;

/// Clearance values beyond this are treated as equal; no terrain under test
/// has a bottleneck this wide.
const CLEARANCE_CAP: f64 = 4.0;

/// Euclidean distance from `(px, py)` to the nearest blocked unit square or
/// to the outside of the grid, capped at `CLEARANCE_CAP`.
fn clearance(t: &GridTerrain, px: f64, py: f64) -> f64 {
    let (w, h) = (t.width() as f64, t.height() as f64);
    let mut best = px.min(py).min(w - px).min(h - py).min(CLEARANCE_CAP);
    let r = CLEARANCE_CAP.ceil() as i64 + 1;
    let (cx, cy) = (px.floor() as i64, py.floor() as i64);
    for y in cy - r..=cy + r {
        for x in cx - r..=cx + r {
            if x < 0
                || y < 0
                || x >= t.width() as i64
                || y >= t.height() as i64
                || !t.is_blocked(x, y)
            {
                continue;
            }
            let dx = (x as f64 - px).max(px - x as f64 - 1.0).max(0.0);
            let dy = (y as f64 - py).max(py - y as f64 - 1.0).max(0.0);
            best = best.min(dx.hypot(dy));
        }
    }
    best
}

/// Twice the bottleneck clearance over 8-connected paths of a node grid
/// with spacing `1/k`, found by trying every distinct clearance as a
/// threshold (binary search) and checking connectivity by flood fill.
/// Start and goal snap to the node at the centre of their cells.
pub fn supersampled_width(t: &GridTerrain, k: usize) -> f64 {
    let nx = t.width() * k + 1;
    let ny = t.height() * k + 1;
    let step = 1.0 / k as f64;
    let c: Vec<f64> = (0..nx * ny)
        .map(|i| clearance(t, (i % nx) as f64 * step, (i / nx) as f64 * step))
        .collect();
    let node = |p: Vec2| {
        let (x, y) = (p.x.floor() + 0.5, p.y.floor() + 0.5);
        (y * k as f64).round() as usize * nx + (x * k as f64).round() as usize
    };
    let (s, g) = (node(t.start()), node(t.goal()));

    let connected = |th: f64| {
        if c[s] < th || c[g] < th {
            return false;
        }
        let mut seen = vec![false; nx * ny];
        let mut q = VecDeque::from([s]);
        seen[s] = true;
        while let Some(n) = q.pop_front() {
            if n == g {
                return true;
            }
            let (i, j) = ((n % nx) as i64, (n / nx) as i64);
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                        continue;
                    }
                    let m = b as usize * nx + a as usize;
                    if !seen[m] && c[m] >= th {
                        seen[m] = true;
                        q.push_back(m);
                    }
                }
            }
        }
        false
    };

    let mut levels: Vec<f64> = c.iter().copied().filter(|v| *v > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.is_empty() || !connected(levels[0]) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0, levels.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if connected(levels[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    2.0 * levels[lo]
}

/// Breadth-first flood fill over 4-connected passable cells.
pub fn flood_connected(t: &GridTerrain) -> bool {
    let (w, h) = (t.width() as i64, t.height() as i64);
    let cell = |p: Vec2| (p.x.floor() as i64, p.y.floor() as i64);
    let (s, g) = (cell(t.start()), cell(t.goal()));
    if t.is_blocked(s.0, s.1) || t.is_blocked(g.0, g.1) {
        return false;
    }
    let mut seen = vec![false; (w * h) as usize];
    let mut q = VecDeque::from([s]);
    seen[(s.1 * w + s.0) as usize] = true;
    while let Some((x, y)) = q.pop_front() {
        if (x, y) == g {
            return true;
        }
        for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if nx < 0 || ny < 0 || nx >= w || ny >= h || t.is_blocked(nx, ny) {
                continue;
            }
            let i = (ny * w + nx) as usize;
            if !seen[i] {
                seen[i] = true;
                q.push_back((nx, ny));
            }
        }
    }
    false
}

/// Every crafted corridor: shapes horizontal, vertical and L at widths 1 to
/// 5 in half steps.
pub fn crafted_corridors() -> Vec<(String, f64, GridTerrain)> {
    use bycoms::terrain::crafted::{corridor, CorridorShape};
    let mut out = Vec::new();
    for shape in CorridorShape::ALL {
        for k in 2..=10 {
            let w = k as f64 * 0.5;
            out.push((
                format!("{}-{w}", shape.as_str()),
                w,
                corridor(shape, w).unwrap(),
            ));
        }
    }
    out
}
