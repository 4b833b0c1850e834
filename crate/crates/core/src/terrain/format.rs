//! Plain-text terrain documents.
//!
//! ```text
//! bycoms-terrain 1
//! width_cells 60
//! height_cells 60
//! start 15.5 15.5
//! goal 44.5 44.5
//! cells
//! 000000...   <- row y = 0
//! 000110...   <- row y = 1
//! ```
//!
//! One line of `0` (passable) / `1` (impassable) per row, row 0 first.

use std::fmt::Write as _;
use std::path::Path;

use super::GridTerrain;
use crate::error::{Error, Result};
use crate::geom::Vec2;

const MAGIC: &str = "bycoms-terrain";
const VERSION: u32 = 1;

impl GridTerrain {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height + 128);
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "width_cells {}", self.width);
        let _ = writeln!(out, "height_cells {}", self.height);
        let _ = writeln!(out, "start {} {}", self.start.x, self.start.y);
        let _ = writeln!(out, "goal {} {}", self.goal.x, self.goal.y);
        out.push_str("cells\n");
        for row in self.blocked.chunks(self.width) {
            out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| {
                Error::parse(0, format!("unexpected end of document, expected {what}"))
            })
        };

        let (n, header) = next("header")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(Error::parse(n, format!("expected '{MAGIC}' header")));
        }
        match parts.next().map(str::parse::<u32>) {
            Some(Ok(VERSION)) => {}
            _ => return Err(Error::parse(n, "unsupported terrain format version")),
        }

        let width = parse_count(next("width_cells")?, "width_cells")?;
        let height = parse_count(next("height_cells")?, "height_cells")?;
        let start = parse_point(next("start")?, "start")?;
        let goal = parse_point(next("goal")?, "goal")?;
        let (n, marker) = next("cells")?;
        if marker.trim() != "cells" {
            return Err(Error::parse(n, "expected 'cells'"));
        }

        let mut blocked = Vec::with_capacity(width * height);
        for _ in 0..height {
            let (n, row) = next("cell row")?;
            if row.len() != width {
                return Err(Error::parse(
                    n,
                    format!("expected {width} cells, found {}", row.len()),
                ));
            }
            for ch in row.bytes() {
                match ch {
                    b'0' => blocked.push(false),
                    b'1' => blocked.push(true),
                    _ => return Err(Error::parse(n, format!("invalid cell '{}'", ch as char))),
                }
            }
        }
        if let Some((n, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(n, format!("trailing content '{extra}'")));
        }
        GridTerrain::from_cells(width, height, blocked, start, goal)
    }
}

fn keyed<'a>((n, line): (usize, &'a str), key: &str) -> Result<(usize, Vec<&'a str>)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::parse(n, format!("expected '{key}'")));
    }
    Ok((n, parts.collect()))
}

fn parse_count(line: (usize, &str), key: &str) -> Result<usize> {
    let (n, vals) = keyed(line, key)?;
    match vals.as_slice() {
        [v] => v
            .parse()
            .map_err(|_| Error::parse(n, format!("invalid {key} '{v}'"))),
        _ => Err(Error::parse(n, format!("{key} takes one value"))),
    }
}

fn parse_point(line: (usize, &str), key: &str) -> Result<Vec2> {
    let (n, vals) = keyed(line, key)?;
    let coord = |v: &str| {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::parse(n, format!("invalid {key} coordinate '{v}'")))
    };
    match vals.as_slice() {
        [x, y] => Ok(Vec2::new(coord(x)?, coord(y)?)),
        _ => Err(Error::parse(n, format!("{key} takes two values"))),
    }
}

pub fn save_terrain(t: &GridTerrain, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, t.to_text())?;
    Ok(())
}

pub fn load_terrain(path: impl AsRef<Path>) -> Result<GridTerrain> {
    GridTerrain::from_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut t = GridTerrain::open(4, 3, Vec2::new(0.5, 0.25), Vec2::new(3.125, 2.5)).unwrap();
        t.set_blocked(2, 1, true);
        let text = t.to_text();
        assert_eq!(
            text,
            "bycoms-terrain 1\nwidth_cells 4\nheight_cells 3\nstart 0.5 0.25\ngoal 3.125 2.5\ncells\n0000\n0010\n0000\n"
        );
        let back = GridTerrain::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn malformed_rows_report_line() {
        let text = "bycoms-terrain 1\nwidth_cells 2\nheight_cells 2\nstart 0.5 0.5\ngoal 1.5 1.5\ncells\n00\n0x\n";
        match GridTerrain::from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_header_and_truncation() {
        assert!(GridTerrain::from_text("terrain 1\n").is_err());
        assert!(GridTerrain::from_text("bycoms-terrain 2\n").is_err());
        let text = "bycoms-terrain 1\nwidth_cells 2\nheight_cells 2\nstart 0.5 0.5\ngoal 1.5 1.5\ncells\n00\n";
        assert!(GridTerrain::from_text(text).is_err());
    }

    #[test]
    fn rejects_invalid_terrain() {
        // Start on a blocked cell.
        let text = "bycoms-terrain 1\nwidth_cells 2\nheight_cells 1\nstart 0.5 0.5\ngoal 1.5 0.5\ncells\n10\n";
        assert!(matches!(
            GridTerrain::from_text(text),
            Err(Error::InvalidTerrain(_))
        ));
    }
}
