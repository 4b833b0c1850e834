//! Runs one noisy trial past a wall, saves its trace, and renders the final
//! picture plus periodic frames.

use bycoms::agent::NoiseConfig;
use bycoms::render::{render_frames, render_svg, RenderOptions};
use bycoms::sim::{run_trial, SimConfig};
use bycoms::terrain::{GridTerrain, DEFAULT_GOAL, DEFAULT_START};

fn main() -> bycoms::Result<()> {
    let mut t = GridTerrain::open(60, 60, DEFAULT_START, DEFAULT_GOAL)?;
    for y in 20..40 {
        t.set_blocked(30, y, true);
    }
    let cfg = SimConfig {
        epsilon: 1.5,
        seed: 11,
        noise: NoiseConfig::standard(),
        ..SimConfig::default()
    };
    let (res, trace) = run_trial(&t, &cfg)?;
    println!(
        "{} after {:.1} s with {} robots, {} stuck",
        res.reason.as_str(),
        res.elapsed,
        res.robots_deployed,
        res.robots_stuck
    );
    let out = std::path::Path::new("target/examples-out/trial");
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("trace.jsonl"), trace.to_bytes())?;
    let opts = RenderOptions::default();
    std::fs::write(out.join("final.svg"), render_svg(Some(&t), &trace, &opts))?;
    for (i, (time, svg)) in render_frames(Some(&t), &trace, 500, &opts)
        .into_iter()
        .enumerate()
    {
        std::fs::write(out.join(format!("frame_{i:04}.svg")), svg)?;
        println!("frame {i} at t = {time:.1}");
    }
    Ok(())
}
