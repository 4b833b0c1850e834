//! A small radius by width sweep, exported as CSV and an SVG heatmap.

use bycoms::experiments::{export_heatmap, run_sweep, write_manifest, SweepSpec};
use bycoms::sim::SimConfig;

fn main() -> bycoms::Result<()> {
    let spec = SweepSpec {
        epsilons: vec![1.0, 2.0, 3.0, 4.0],
        width_bins: vec![1.0, 2.0, 3.0, 4.0],
        trials_per_cell: 5,
        master_seed: 2024,
        sim: SimConfig {
            time_budget: 5000.0,
            ..SimConfig::default()
        },
        ..SweepSpec::default()
    };
    let r = run_sweep(&spec)?;
    for c in &r.cells {
        println!(
            "eps {:<4} width {:<4} rate {:.2}",
            c.epsilon, c.width, c.rate
        );
    }
    std::fs::create_dir_all("target/examples-out")?;
    export_heatmap(&r, "target/examples-out/sweep")?;
    write_manifest(&spec, "target/examples-out/sweep.manifest.json")?;
    Ok(())
}
