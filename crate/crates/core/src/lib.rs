//! Sequential-deployment swarm navigation on unknown terrain.
//!
//! Robots leave a start point one at a time and head for a goal. A robot
//! that enters impassable terrain is stuck for good and turns into an
//! inverse-square potential source. Later robots circle any source whose
//! field exceeds a threshold, so the stuck robots progressively outline the
//! impassable regions and eventually let somebody through.
//!
//! Modules:
//!
//! - [`terrain`]: Perlin-noise occupancy grids, connectivity and minimum
//!   path width.
//! - [`field`]: superposed inverse-square sources and their gradient.
//! - [`agent`]: the two-mode controller (goal seeking / circumnavigation).
//! - [`sim`]: the trial engine, traces and their line-delimited format.
//! - [`acoustic`]: a continuous-space microphone-array robot with
//!   differential drive, driven by the same two-mode logic.
//! - [`experiments`]: terrain corpora binned by path width, radius sweeps,
//!   noise comparisons and heatmap export.
//! - [`render`]: SVG snapshots of terrains and traces.
//! - [`cli`]: the `bycoms` command-line front end.

pub mod acoustic;
pub mod agent;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geom;
pub mod render;
pub mod seed;
pub mod sim;
pub mod terrain;

pub use error::{Error, Result};
pub use geom::Vec2;
