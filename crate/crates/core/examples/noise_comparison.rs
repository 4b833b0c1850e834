//! Runs the same trials with and without sensing noise and reports how far
//! the success rates move.

use bycoms::agent::NoiseConfig;
use bycoms::experiments::{export_heatmap, rate_differences, run_noise_comparison, SweepSpec};
use bycoms::sim::SimConfig;

fn main() -> bycoms::Result<()> {
    let spec = SweepSpec {
        epsilons: vec![1.0, 2.5, 4.0],
        width_bins: vec![1.5, 3.0, 4.5],
        trials_per_cell: 5,
        master_seed: 7,
        noise: NoiseConfig::standard(),
        sim: SimConfig {
            time_budget: 5000.0,
            ..SimConfig::default()
        },
        ..SweepSpec::default()
    };
    let (clean, noisy) = run_noise_comparison(&spec)?;
    let diffs = rate_differences(&clean, &noisy);
    let worst = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let close = diffs.iter().filter(|d| d.abs() <= 0.2).count();
    println!(
        "{close} of {} cells within 0.2, largest change {worst:.2}",
        diffs.len()
    );
    std::fs::create_dir_all("target/examples-out")?;
    export_heatmap(&clean, "target/examples-out/noise-clean")?;
    export_heatmap(&noisy, "target/examples-out/noise-noisy")?;
    Ok(())
}
