use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::GridTerrain;
use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerrainSummary {
    pub path_exists: bool,
    /// Bottleneck width of the widest start-goal corridor; 0 without a path.
    pub min_path_width: f64,
}

impl TerrainSummary {
    pub fn of(t: &GridTerrain) -> Self {
        Self {
            path_exists: path_exists(t),
            min_path_width: min_path_width(t),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Scored {
    key: f64,
    node: usize,
}

impl Eq for Scored {}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STEPS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// A* over 4-connected passable cells from the start cell to the goal cell.
pub fn path_exists(t: &GridTerrain) -> bool {
    let (sx, sy) = GridTerrain::cell_of(t.start());
    let (gx, gy) = GridTerrain::cell_of(t.goal());
    if t.is_blocked(sx, sy) || t.is_blocked(gx, gy) {
        return false;
    }
    let w = t.width();
    let idx = |x: i64, y: i64| y as usize * w + x as usize;
    let heuristic = |x: i64, y: i64| ((x - gx).abs() + (y - gy).abs()) as f64;

    let mut best = vec![u32::MAX; w * t.height()];
    let mut open = BinaryHeap::new();
    best[idx(sx, sy)] = 0;
    // Min-heap on f = g + h via negated keys.
    open.push(Scored {
        key: -heuristic(sx, sy),
        node: idx(sx, sy),
    });
    while let Some(Scored { node, .. }) = open.pop() {
        let (x, y) = ((node % w) as i64, (node / w) as i64);
        if (x, y) == (gx, gy) {
            return true;
        }
        let g = best[node];
        for (dx, dy) in STEPS {
            let (nx, ny) = (x + dx, y + dy);
            if t.is_blocked(nx, ny) {
                continue;
            }
            let n = idx(nx, ny);
            if g + 1 < best[n] {
                best[n] = g + 1;
                open.push(Scored {
                    key: -((g + 1) as f64 + heuristic(nx, ny)),
                    node: n,
                });
            }
        }
    }
    false
}

/// Euclidean distance from `p` to the impassable region: the union of the
/// closed unit squares of blocked cells and everything outside the grid.
pub fn clearance_at(t: &GridTerrain, p: Vec2) -> f64 {
    let (w, h) = (t.width() as f64, t.height() as f64);
    let mut best = p.x.min(p.y).min(w - p.x).min(h - p.y).max(0.0);
    let (cx, cy) = (p.x.floor() as i64, p.y.floor() as i64);
    let square_distance = |ix: i64, iy: i64| {
        let dx = (ix as f64 - p.x).max(p.x - (ix + 1) as f64).max(0.0);
        let dy = (iy as f64 - p.y).max(p.y - (iy + 1) as f64).max(0.0);
        dx.hypot(dy)
    };
    let max_ring = t.width().max(t.height()) as i64 + 1;
    for r in 0..=max_ring {
        // Every cell on ring r is at least r - 1 away.
        if (r - 1) as f64 >= best {
            break;
        }
        let mut visit = |ix: i64, iy: i64| {
            if ix >= 0
                && iy >= 0
                && ix < t.width() as i64
                && iy < t.height() as i64
                && t.is_blocked(ix, iy)
            {
                best = best.min(square_distance(ix, iy));
            }
        };
        if r == 0 {
            visit(cx, cy);
            continue;
        }
        for k in -r..=r {
            visit(cx + k, cy - r);
            visit(cx + k, cy + r);
        }
        for k in -r + 1..r {
            visit(cx - r, cy + k);
            visit(cx + r, cy + k);
        }
    }
    best
}

/// Union-find that also tracks, for every node, the parity of the path to
/// its root. Merging two nodes already in one set closes a cycle, whose
/// parity is reported.
struct ParityForest {
    parent: Vec<u32>,
    parity: Vec<bool>,
    rank: Vec<u8>,
}

impl ParityForest {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            parity: vec![false; n],
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let mut root = x;
        let mut acc = false;
        while self.parent[root] as usize != root {
            acc ^= self.parity[root];
            root = self.parent[root] as usize;
        }
        // Compress, keeping each node's parity relative to the root.
        let mut node = x;
        let mut to_root = acc;
        while self.parent[node] as usize != root {
            let next = self.parent[node] as usize;
            let own = self.parity[node];
            self.parent[node] = root as u32;
            self.parity[node] = to_root;
            to_root ^= own;
            node = next;
        }
        (root, acc)
    }

    /// Joins `a` and `b` by an edge of parity `bit`. Returns true when this
    /// closes a cycle of odd parity.
    fn join(&mut self, a: usize, b: usize, bit: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb ^ bit;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi as u32;
        self.parity[lo] = pa ^ pb ^ bit;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        false
    }
}

/// Scale applied to doubled grid coordinates so that the start and goal can
/// be nudged off every lattice line.
const SCALE: i128 = 1 << 30;

type Pt = (i128, i128);

fn orient(a: Pt, b: Pt, c: Pt) -> i128 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn crosses(p: Pt, q: Pt, s: Pt, g: Pt) -> bool {
    let (d1, d2) = (orient(s, g, p), orient(s, g, q));
    let (d3, d4) = (orient(p, q, s), orient(p, q, g));
    d1.signum() * d2.signum() < 0 && d3.signum() * d4.signum() < 0
}

/// Closest coordinates of two unit intervals starting at `i` and `k`, in
/// doubled units.
fn facing(i: i64, k: i64) -> (i64, i64) {
    match k.cmp(&i) {
        Ordering::Greater => (2 * i + 2, 2 * k),
        Ordering::Less => (2 * i, 2 * k + 2),
        Ordering::Equal => (2 * i + 1, 2 * i + 1),
    }
}

/// Blocked cells with a passable cell among their eight neighbours.
fn boundary_cells(t: &GridTerrain) -> Vec<(i64, i64)> {
    let (w, h) = (t.width() as i64, t.height() as i64);
    let free = |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && !t.is_blocked(x, y);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if t.is_blocked(x, y) && NEIGHBOURS_8.iter().any(|&(dx, dy)| free(x + dx, y + dy)) {
                out.push((x, y));
            }
        }
    }
    out
}

const NEIGHBOURS_8: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

fn cell_centre(p: Vec2) -> Vec2 {
    let (x, y) = GridTerrain::cell_of(p);
    Vec2::new(x as f64 + 0.5, y as f64 + 0.5)
}

/// Width of the widest start-goal corridor: twice the largest clearance a
/// continuous path can keep all the way. Start and goal are snapped to the
/// centres of their cells. Returns 0 when no 4-connected path exists.
///
/// Obstacles (boundary blocked cells and the grid exterior) are merged in
/// order of their gap. A merge that closes a loop of obstacles around the
/// start or the goal, but not both, cuts every corridor; its gap is the
/// width. A loop encloses exactly one endpoint when it crosses the
/// start-goal segment an odd number of times.
pub fn min_path_width(t: &GridTerrain) -> f64 {
    if !path_exists(t) {
        return 0.0;
    }
    let s = cell_centre(t.start());
    let g = cell_centre(t.goal());
    let cap = 2.0 * clearance_at(t, s).min(clearance_at(t, g));
    let cap2 = (cap * cap + 1e-9).floor() as usize;

    let cells = boundary_cells(t);
    let frame = cells.len();
    let (w, h) = (t.width() as i64, t.height() as i64);

    let scaled = |x: i64, y: i64| (x as i128 * SCALE, y as i128 * SCALE);
    let nudge = |p: Vec2, dx: i128, dy: i128| {
        let (x, y) = scaled((2.0 * p.x) as i64, (2.0 * p.y) as i64);
        (x + dx, y + dy)
    };
    let s_pt = nudge(s, 1, 3);
    let g_pt = nudge(g, 2, 7);
    let polyline_parity = |pts: &[Pt]| {
        pts.windows(2)
            .filter(|w| crosses(w[0], w[1], s_pt, g_pt))
            .count()
            % 2
            == 1
    };

    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cap2 + 1];
    for (a, &(xa, ya)) in cells.iter().enumerate() {
        let to_frame = xa.min(ya).min(w - 1 - xa).min(h - 1 - ya) as usize;
        if to_frame * to_frame <= cap2 {
            buckets[to_frame * to_frame].push((a as u32, frame as u32));
        }
        for (b, &(xb, yb)) in cells.iter().enumerate().skip(a + 1) {
            let gx = ((xa - xb).abs() - 1).max(0) as usize;
            let gy = ((ya - yb).abs() - 1).max(0) as usize;
            let d2 = gx * gx + gy * gy;
            if d2 <= cap2 {
                buckets[d2].push((a as u32, b as u32));
            }
        }
    }

    let mut forest = ParityForest::new(cells.len() + 1);
    for (d2, edges) in buckets.iter().enumerate() {
        for &(a, b) in edges {
            let (xa, ya) = cells[a as usize];
            let anchor_a = scaled(2 * xa + 1, 2 * ya + 1);
            let bit = if b as usize == frame {
                let to_frame = xa.min(ya).min(w - 1 - xa).min(h - 1 - ya);
                // Leave the square through the nearest side, straight to the edge.
                let (from, to) = if to_frame == xa {
                    ((2 * xa, 2 * ya + 1), (0, 2 * ya + 1))
                } else if to_frame == ya {
                    ((2 * xa + 1, 2 * ya), (2 * xa + 1, 0))
                } else if to_frame == w - 1 - xa {
                    ((2 * xa + 2, 2 * ya + 1), (2 * w, 2 * ya + 1))
                } else {
                    ((2 * xa + 1, 2 * ya + 2), (2 * xa + 1, 2 * h))
                };
                polyline_parity(&[anchor_a, scaled(from.0, from.1), scaled(to.0, to.1)])
            } else {
                let (xb, yb) = cells[b as usize];
                let (ax, bx) = facing(xa, xb);
                let (ay, by) = facing(ya, yb);
                polyline_parity(&[
                    anchor_a,
                    scaled(ax, ay),
                    scaled(bx, by),
                    scaled(2 * xb + 1, 2 * yb + 1),
                ])
            };
            if forest.join(a as usize, b as usize, bit) {
                return (d2 as f64).sqrt().min(cap);
            }
        }
    }
    cap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corridor(width: usize) -> GridTerrain {
        // Two 8x12 rooms joined by a horizontal band of `width` rows.
        let (w, h) = (36, 12);
        let mut t = GridTerrain::open(w, h, Vec2::new(3.5, 6.5), Vec2::new(32.5, 6.5)).unwrap();
        let y0 = 6 - width / 2;
        for ix in 8..28 {
            for iy in 0..h {
                if iy < y0 || iy >= y0 + width {
                    t.set_blocked(ix, iy, true);
                }
            }
        }
        t
    }

    #[test]
    fn open_grid_has_path() {
        let t = GridTerrain::open(20, 20, Vec2::new(1.5, 1.5), Vec2::new(18.5, 18.5)).unwrap();
        assert!(path_exists(&t));
    }

    #[test]
    fn full_wall_blocks() {
        let mut t = GridTerrain::open(20, 20, Vec2::new(1.5, 1.5), Vec2::new(18.5, 18.5)).unwrap();
        for iy in 0..20 {
            t.set_blocked(10, iy, true);
        }
        assert!(!path_exists(&t));
        assert_eq!(min_path_width(&t), 0.0);
    }

    #[test]
    fn diagonal_gap_is_not_a_path() {
        let t = GridTerrain::from_ascii(
            "..#\n\
             .#.\n\
             #..",
            Vec2::new(0.5, 2.5),
            Vec2::new(2.5, 0.5),
        )
        .unwrap();
        assert!(!path_exists(&t));
        assert_eq!(min_path_width(&t), 0.0);
    }

    #[test]
    fn clearance_of_points() {
        let t = GridTerrain::from_ascii("...\n.#.\n...", Vec2::new(0.5, 0.5), Vec2::new(2.5, 2.5))
            .unwrap();
        // Corner of the blocked square (1,1)-(2,2) seen diagonally.
        let c = clearance_at(&t, Vec2::new(0.5, 0.5));
        assert!((c - 0.5).abs() < 1e-15, "exterior is 0.5 away: {c}");
        let c = clearance_at(&t, Vec2::new(1.5, 2.5));
        assert!((c - 0.5).abs() < 1e-15);
        assert_eq!(clearance_at(&t, Vec2::new(1.5, 1.5)), 0.0);
    }

    #[test]
    fn corridor_widths() {
        for w in 1..=5 {
            let t = corridor(w);
            assert_eq!(min_path_width(&t), w as f64, "width {w}");
        }
    }
}
