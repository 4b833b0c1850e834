//! Runs every crafted terrain at every radius up to half a cell below its
//! bottleneck width and reports the outcomes.

use bycoms::seed::derive_seed;
use bycoms::sim::{run_trial_with, SimConfig, TraceLevel};
use bycoms::terrain::crafted::guarantee_corpus;

fn main() -> bycoms::Result<()> {
    let mut failures = 0;
    let mut total = 0;
    for (i, (name, l, t)) in guarantee_corpus()?.into_iter().enumerate() {
        let mut eps = 1.0;
        while eps <= l - 0.5 + 1e-9 {
            let cfg = SimConfig {
                epsilon: eps,
                max_robots: 1000,
                time_budget: 1e6,
                seed: derive_seed(7, &[i as u64, (eps * 2.0) as u64]),
                ..SimConfig::default()
            };
            let (res, _) = run_trial_with(&t, &cfg, TraceLevel::Events)?;
            total += 1;
            if !res.success {
                failures += 1;
            }
            println!(
                "{name:<14} eps {eps:<4} {:<16} robots {:>4} elapsed {:>9.1}",
                res.reason.as_str(),
                res.robots_deployed,
                res.elapsed
            );
            eps += 0.5;
        }
    }
    println!("{} of {total} trials reached the goal", total - failures);
    Ok(())
}
