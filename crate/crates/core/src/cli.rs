//! The `bycoms` command line.
//!
//! Every subcommand prints one `config {...}` line holding its effective
//! settings (seed included) before doing any work. Exit codes: 0 success,
//! 1 navigation failure, 2 usage error, 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::acoustic::{self, AcousticScenario, Sensing};
use crate::agent::NoiseConfig;
use crate::error::Error;
use crate::experiments::{self, half_steps, rate_differences, SweepSpec};
use crate::geom::Vec2;
use crate::render::{self, RenderOptions};
use crate::seed::{derive_seed, rng_from_seed};
use crate::sim::{self, Outcome, SimConfig, SimTrace};
use crate::terrain::{
    self, generate_terrain, load_terrain, min_path_width, path_exists, save_terrain, GridTerrain,
    PerlinConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NAV_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bycoms",
    version,
    about = "Swarm navigation by bypassing stuck companions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Perlin terrain and write it to a file.
    TerrainGen(TerrainGenArgs),
    /// Report connectivity and minimum path width of a terrain file.
    TerrainWidth(TerrainWidthArgs),
    /// Run one trial and write its trace.
    SimRun(SimRunArgs),
    /// Success-rate matrix over radius and path width.
    Sweep(SweepArgs),
    /// The same sweep with sensing noise off and on.
    NoiseCompare(SweepArgs),
    /// One microphone-array robot past emitting robots.
    AcousticRun(AcousticArgs),
    /// Draw a trace as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    Off,
    Standard,
    Degenerate,
}

impl NoiseArg {
    fn config(self) -> NoiseConfig {
        match self {
            NoiseArg::Off => NoiseConfig::off(),
            NoiseArg::Standard => NoiseConfig::standard(),
            NoiseArg::Degenerate => NoiseConfig::degenerate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SensingArg {
    Mic,
    Exact,
}

#[derive(Debug, Args)]
pub struct TerrainGenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = terrain::DEFAULT_SIZE)]
    pub size: usize,
    /// Noise lattice spacing in cells.
    #[arg(long, default_value_t = 10.0)]
    pub lattice: f64,
    /// Passability threshold in [-1, 1].
    #[arg(long, conflicts_with = "random_threshold")]
    pub threshold: Option<f64>,
    /// Draw the threshold from the seed (the default).
    #[arg(long)]
    pub random_threshold: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TerrainWidthArgs {
    #[arg(long)]
    pub terrain: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimRunArgs {
    /// Terrain file; a Perlin terrain from --terrain-seed when absent.
    #[arg(long)]
    pub terrain: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub terrain_seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Off)]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 100)]
    pub max_robots: usize,
    #[arg(long, default_value_t = 10_000.0)]
    pub time_budget: f64,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Directory for SVG snapshots.
    #[arg(long)]
    pub frames_out: Option<PathBuf>,
    /// Ticks between snapshots.
    #[arg(long, default_value_t = 500)]
    pub frame_every: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Comma-separated width bins.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    /// Noise for `sweep`, or the noisy arm of `noise-compare`.
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    #[arg(long, default_value_t = 100)]
    pub max_robots: usize,
    #[arg(long, default_value_t = 10_000.0)]
    pub time_budget: f64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output stem; `.csv`, `.svg` and `.manifest.json` are appended.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AcousticArgs {
    #[arg(long, value_enum, default_value_t = SensingArg::Mic)]
    pub sensing: SensingArg,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    pub start: Vec2,
    #[arg(long, value_parser = parse_point, default_value = "3,0")]
    pub goal: Vec2,
    /// Emitter position `x,y`; repeatable.
    #[arg(long = "emitter", value_parser = parse_point)]
    pub emitters: Vec<Vec2>,
    #[arg(long, default_value_t = 300.0)]
    pub time_budget: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Off)]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// SVG file, or a directory when --frame-every is given.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub terrain: Option<PathBuf>,
    #[arg(long)]
    pub frame_every: Option<usize>,
    /// Pixels per world unit.
    #[arg(long, default_value_t = 10.0)]
    pub scale: f64,
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got '{s}'"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    Ok(Vec2::new(p(x)?, p(y)?))
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse { .. } | Error::InvalidTerrain(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_at(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if shown {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::TerrainGen(a) => terrain_gen(a, out),
        Command::TerrainWidth(a) => terrain_width(a, out),
        Command::SimRun(a) => sim_run(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::NoiseCompare(a) => noise_compare(a, out),
        Command::AcousticRun(a) => acoustic_run(a, out),
        Command::Render(a) => render_cmd(a, out),
    }
}

fn print_config(
    out: &mut dyn Write,
    command: &str,
    config: serde_json::Value,
) -> std::io::Result<()> {
    writeln!(
        out,
        "config {}",
        json!({ "command": command, "config": config })
    )
}

/// The terrain `terrain-gen --seed s` (random threshold) produces.
pub fn perlin_terrain(
    seed: u64,
    size: usize,
    lattice: f64,
    threshold: Option<f64>,
) -> crate::Result<GridTerrain> {
    let cfg = PerlinConfig {
        seed,
        lattice_cell_size: lattice,
        threshold_a: threshold,
    };
    let (start, goal) = if size == terrain::DEFAULT_SIZE {
        (terrain::DEFAULT_START, terrain::DEFAULT_GOAL)
    } else {
        let s = size as f64;
        (
            Vec2::new(s * 0.25 + 0.5, s * 0.25 + 0.5),
            Vec2::new(s * 0.75 - 0.5, s * 0.75 - 0.5),
        )
    };
    let mut rng = rng_from_seed(derive_seed(seed, &[1]));
    generate_terrain(&cfg, size, size, start, goal, &mut rng)
}

fn terrain_gen(a: TerrainGenArgs, out: &mut dyn Write) -> CmdResult {
    print_config(
        out,
        "terrain-gen",
        json!({
            "seed": a.seed,
            "size": a.size,
            "lattice": a.lattice,
            "threshold": a.threshold,
            "out": a.out,
        }),
    )?;
    let t = perlin_terrain(a.seed, a.size, a.lattice, a.threshold)?;
    save_terrain(&t, &a.out).map_err(io_at(&a.out))?;
    report_terrain(&t, out)?;
    Ok(EXIT_OK)
}

fn report_terrain(t: &GridTerrain, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "terrain {}x{} blocked_cells {} path_exists {} min_path_width {}",
        t.width(),
        t.height(),
        t.blocked_count(),
        path_exists(t),
        min_path_width(t)
    )
}

fn terrain_width(a: TerrainWidthArgs, out: &mut dyn Write) -> CmdResult {
    print_config(out, "terrain-width", json!({ "terrain": a.terrain }))?;
    let t = load_terrain(&a.terrain).map_err(io_at(&a.terrain))?;
    report_terrain(&t, out)?;
    Ok(EXIT_OK)
}

fn sim_run(a: SimRunArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = SimConfig {
        epsilon: a.epsilon,
        seed: a.seed,
        noise: a.noise.config(),
        max_robots: a.max_robots,
        time_budget: a.time_budget,
        ..SimConfig::default()
    };
    if a.frame_every == 0 {
        return Err(usage("--frame-every must be at least 1"));
    }
    print_config(
        out,
        "sim-run",
        json!({
            "terrain": a.terrain,
            "terrain_seed": if a.terrain.is_none() { Some(a.terrain_seed) } else { None },
            "sim": cfg,
            "seed": a.seed,
        }),
    )?;
    cfg.validate()?;
    let t = match &a.terrain {
        Some(p) => load_terrain(p).map_err(io_at(p))?,
        None => perlin_terrain(a.terrain_seed, terrain::DEFAULT_SIZE, 10.0, None)?,
    };
    let (res, trace) = sim::run_trial(&t, &cfg)?;
    if let Some(p) = &a.trace_out {
        std::fs::write(p, trace.to_bytes()).map_err(|e| io_at(p)(e.into()))?;
    }
    if let Some(dir) = &a.frames_out {
        write_frames(
            Some(&t),
            &trace,
            a.frame_every,
            &RenderOptions::default(),
            dir,
        )?;
    }
    writeln!(
        out,
        "result {} success {} robots_deployed {} robots_stuck {} elapsed {} ticks {}",
        res.reason.as_str(),
        res.success,
        res.robots_deployed,
        res.robots_stuck,
        res.elapsed,
        res.ticks
    )?;
    Ok(if res.reason == Outcome::Reached {
        EXIT_OK
    } else {
        EXIT_NAV_FAILURE
    })
}

fn write_frames(
    t: Option<&GridTerrain>,
    trace: &SimTrace,
    every: usize,
    opts: &RenderOptions,
    dir: &Path,
) -> Result<usize, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir)(e.into()))?;
    let frames = render::render_frames(t, trace, every, opts);
    for (i, (_, svg)) in frames.iter().enumerate() {
        let p = dir.join(format!("frame_{i:04}.svg"));
        std::fs::write(&p, svg).map_err(|e| io_at(&p)(e.into()))?;
    }
    Ok(frames.len())
}

fn sweep_spec(a: &SweepArgs, noise: NoiseConfig) -> SweepSpec {
    SweepSpec {
        epsilons: a.epsilons.clone().unwrap_or_else(half_steps),
        width_bins: a.widths.clone().unwrap_or_else(half_steps),
        trials_per_cell: a.trials,
        master_seed: a.master_seed,
        noise,
        sim: SimConfig {
            max_robots: a.max_robots,
            time_budget: a.time_budget,
            ..SimConfig::default()
        },
        threads: a.threads,
        ..SweepSpec::default()
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_at(path)(e.into()))
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let spec = sweep_spec(&a, a.noise.unwrap_or(NoiseArg::Off).config());
    print_config(
        out,
        "sweep",
        json!({ "spec": spec, "master_seed": spec.master_seed, "out": a.out }),
    )?;
    let result = experiments::run_sweep(&spec)?;
    write_file(&with_suffix(&a.out, ".csv"), result.to_csv())?;
    write_file(&with_suffix(&a.out, ".svg"), result.to_svg())?;
    let manifest = with_suffix(&a.out, ".manifest.json");
    experiments::write_manifest(&spec, &manifest).map_err(io_at(&manifest))?;
    let reached = result
        .trials
        .iter()
        .filter(|t| t.outcome == Outcome::Reached)
        .count();
    writeln!(out, "trials {} reached {}", result.trials.len(), reached)?;
    Ok(EXIT_OK)
}

fn noise_compare(a: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let spec = sweep_spec(&a, a.noise.unwrap_or(NoiseArg::Standard).config());
    print_config(
        out,
        "noise-compare",
        json!({ "spec": spec, "master_seed": spec.master_seed, "out": a.out }),
    )?;
    let (clean, noisy) = experiments::run_noise_comparison(&spec)?;
    write_file(&with_suffix(&a.out, "-clean.csv"), clean.to_csv())?;
    write_file(&with_suffix(&a.out, "-clean.svg"), clean.to_svg())?;
    write_file(&with_suffix(&a.out, "-noisy.csv"), noisy.to_csv())?;
    write_file(&with_suffix(&a.out, "-noisy.svg"), noisy.to_svg())?;
    let manifest = with_suffix(&a.out, ".manifest.json");
    experiments::write_manifest(&spec, &manifest).map_err(io_at(&manifest))?;
    let diffs = rate_differences(&clean, &noisy);
    let close = diffs.iter().filter(|d| **d <= 0.2 + 1e-9).count();
    let max = diffs.iter().copied().fold(0.0, f64::max);
    writeln!(
        out,
        "cells {} within_0.2 {} max_abs_diff {}",
        diffs.len(),
        close,
        max
    )?;
    Ok(EXIT_OK)
}

fn acoustic_run(a: AcousticArgs, out: &mut dyn Write) -> CmdResult {
    let defaults = AcousticScenario::default();
    let scn = AcousticScenario {
        start: a.start,
        goal: a.goal,
        emitters: if a.emitters.is_empty() {
            defaults.emitters.clone()
        } else {
            a.emitters.clone()
        },
        epsilon: a.epsilon,
        time_budget: a.time_budget,
        noise: a.noise.config(),
        seed: a.seed,
        ..defaults
    };
    let sensing = match a.sensing {
        SensingArg::Mic => Sensing::MicArray,
        SensingArg::Exact => Sensing::Exact,
    };
    print_config(
        out,
        "acoustic-run",
        json!({ "scenario": scn, "sensing": sensing, "seed": a.seed }),
    )?;
    let run = acoustic::run_acoustic(&scn, sensing)?;
    if let Some(p) = &a.trace_out {
        write_file(p, run.trace.to_bytes())?;
    }
    writeln!(
        out,
        "result {} elapsed {} path_points {}",
        if run.reached { "Reached" } else { "Timeout" },
        run.elapsed,
        run.path.len()
    )?;
    Ok(if run.reached {
        EXIT_OK
    } else {
        EXIT_NAV_FAILURE
    })
}

fn render_cmd(a: RenderArgs, out: &mut dyn Write) -> CmdResult {
    if !(a.scale > 0.0 && a.scale.is_finite()) {
        return Err(usage("--scale must be positive"));
    }
    if a.frame_every == Some(0) {
        return Err(usage("--frame-every must be at least 1"));
    }
    print_config(
        out,
        "render",
        json!({
            "trace": a.trace,
            "terrain": a.terrain,
            "out": a.out,
            "frame_every": a.frame_every,
            "scale": a.scale,
        }),
    )?;
    let bytes = std::fs::read(&a.trace).map_err(|e| io_at(&a.trace)(e.into()))?;
    let trace = SimTrace::from_bytes(&bytes).map_err(io_at(&a.trace))?;
    let t = match &a.terrain {
        Some(p) => Some(load_terrain(p).map_err(io_at(p))?),
        None => None,
    };
    let opts = RenderOptions {
        scale: a.scale,
        until: None,
    };
    match a.frame_every {
        Some(every) => {
            let n = write_frames(t.as_ref(), &trace, every, &opts, &a.out)?;
            writeln!(out, "frames {n}")?;
        }
        None => {
            write_file(&a.out, render::render_svg(t.as_ref(), &trace, &opts))?;
            writeln!(out, "frames 1")?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("bycoms").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_args(&["terrain-width", "--bogus", "x"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn conflicting_threshold_flags() {
        let (code, _, _) = run_args(&[
            "terrain-gen",
            "--threshold",
            "0",
            "--random-threshold",
            "--out",
            "x",
        ]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, out, _) = run_args(&["terrain-width", "--terrain", "/nonexistent/t.txt"]);
        assert_eq!(code, EXIT_IO);
        assert!(out.starts_with("config "));
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1.5, -2").unwrap(), Vec2::new(1.5, -2.0));
        assert!(parse_point("1").is_err());
    }
}
