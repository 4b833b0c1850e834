//! Offline SVG snapshots of a run.
//!
//! Draws the terrain, each robot's path, where robots froze, and the
//! circumferential circle around every frozen robot. World y grows upward;
//! the image is flipped accordingly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::geom::Vec2;
use crate::sim::{EventKind, Record, SimTrace};
use crate::terrain::GridTerrain;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Pixels per world unit.
    pub scale: f64,
    /// Only records at or before this time are drawn.
    pub until: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            scale: 10.0,
            until: None,
        }
    }
}

/// Circumferential radius recorded in a trace header, for grid or acoustic runs.
pub fn trace_epsilon(trace: &SimTrace) -> Option<f64> {
    let c = &trace.config;
    c.get("epsilon")
        .or_else(|| c.get("scenario").and_then(|s| s.get("epsilon")))
        .and_then(|v| v.as_f64())
}

struct Frame {
    min: Vec2,
    max: Vec2,
    scale: f64,
}

impl Frame {
    fn px(&self, p: Vec2) -> (f64, f64) {
        (
            (p.x - self.min.x) * self.scale,
            (self.max.y - p.y) * self.scale,
        )
    }

    fn width(&self) -> f64 {
        (self.max.x - self.min.x) * self.scale
    }

    fn height(&self) -> f64 {
        (self.max.y - self.min.y) * self.scale
    }
}

fn bounds(terrain: Option<&GridTerrain>, trace: &SimTrace) -> (Vec2, Vec2) {
    if let Some(t) = terrain {
        return (Vec2::ZERO, Vec2::new(t.width() as f64, t.height() as f64));
    }
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let points = trace.records.iter().map(|r| match r {
        Record::Tick(t) => t.position,
        Record::Event(e) => e.position,
    });
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !lo.x.is_finite() {
        return (Vec2::ZERO, Vec2::new(1.0, 1.0));
    }
    let pad = trace_epsilon(trace).unwrap_or(0.0) + 0.05 * (hi - lo).norm().max(1.0);
    (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad))
}

/// One SVG image of `trace` over `terrain`.
pub fn render_svg(terrain: Option<&GridTerrain>, trace: &SimTrace, opts: &RenderOptions) -> String {
    let (min, max) = bounds(terrain, trace);
    let f = Frame {
        min,
        max,
        scale: opts.scale,
    };
    let visible = |t: f64| opts.until.is_none_or(|u| t <= u);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        f.width().ceil(),
        f.height().ceil(),
        f.width(),
        f.height()
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );

    if let Some(t) = terrain {
        let _ = writeln!(out, r##"<g fill="#9fd3e8">"##);
        for y in 0..t.height() {
            let mut x = 0;
            while x < t.width() {
                if !t.is_blocked(x as i64, y as i64) {
                    x += 1;
                    continue;
                }
                let run = (x..t.width())
                    .take_while(|&i| t.is_blocked(i as i64, y as i64))
                    .count();
                let (px, py) = f.px(Vec2::new(x as f64, (y + 1) as f64));
                let _ = writeln!(
                    out,
                    r#"<rect x="{px:.3}" y="{py:.3}" width="{:.3}" height="{:.3}"/>"#,
                    run as f64 * f.scale,
                    f.scale
                );
                x += run;
            }
        }
        let _ = writeln!(out, "</g>");
        for (p, color) in [(t.start(), "#2e9e44"), (t.goal(), "#d43c3c")] {
            let (cx, cy) = f.px(p);
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="{color}"/>"#,
                0.5 * f.scale
            );
        }
    }

    let mut paths: BTreeMap<usize, Vec<Vec2>> = BTreeMap::new();
    let mut stuck = Vec::new();
    for r in &trace.records {
        match r {
            Record::Tick(t) if visible(t.t) => paths.entry(t.robot).or_default().push(t.position),
            Record::Event(e) if visible(e.t) => match e.kind {
                EventKind::Deployed => paths.entry(e.robot).or_default().insert(0, e.position),
                EventKind::Stuck => stuck.push(e.position),
                _ => {}
            },
            _ => {}
        }
    }

    for pts in paths.values().filter(|p| p.len() > 1) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = f.px(*p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#404040" stroke-width="{:.3}"/>"##,
            coords.join(" "),
            0.15 * f.scale
        );
    }

    let eps = trace_epsilon(trace);
    for p in &stuck {
        let (cx, cy) = f.px(*p);
        if let Some(e) = eps {
            let _ = writeln!(
                out,
                r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#e08a00" stroke-dasharray="{:.3}"/>"##,
                e * f.scale,
                0.3 * f.scale
            );
        }
        let _ = writeln!(
            out,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="#000000"/>"##,
            0.3 * f.scale
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Snapshots every `every` ticks of simulated time, plus one at the end.
pub fn render_frames(
    terrain: Option<&GridTerrain>,
    trace: &SimTrace,
    every: usize,
    opts: &RenderOptions,
) -> Vec<(f64, String)> {
    let times: Vec<f64> = trace.ticks().map(|t| t.t).collect();
    let mut cuts: Vec<f64> = times
        .iter()
        .skip(every.max(1) - 1)
        .step_by(every.max(1))
        .copied()
        .collect();
    if let Some(last) = times.last() {
        if cuts.last() != Some(last) {
            cuts.push(*last);
        }
    }
    cuts.into_iter()
        .map(|t| {
            (
                t,
                render_svg(
                    terrain,
                    trace,
                    &RenderOptions {
                        until: Some(t),
                        ..*opts
                    },
                ),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_trial, SimConfig};
    use crate::terrain::{DEFAULT_GOAL, DEFAULT_START};

    #[test]
    fn empty_trace_draws_terrain_only() {
        let mut t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        t.set_blocked(30, 30, true);
        let trace = SimTrace::new(serde_json::json!({}));
        let svg = render_svg(Some(&t), &trace, &RenderOptions::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"<rect x="300.000" y="290.000" width="10.000" height="10.000"/>"#));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn frames_grow_monotonically() {
        let mut t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL).unwrap();
        for y in 25..35 {
            t.set_blocked(30, y, true);
        }
        let (_, trace) = run_trial(&t, &SimConfig::default()).unwrap();
        let frames = render_frames(Some(&t), &trace, 100, &RenderOptions::default());
        assert!(frames.len() >= 2);
        assert!(frames
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1.len() <= w[1].1.len()));
        let full = render_svg(Some(&t), &trace, &RenderOptions::default());
        assert_eq!(frames.last().unwrap().1, full);
    }
}
