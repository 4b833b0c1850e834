//! Generates a handful of Perlin terrains and reports how much room each
//! leaves between start and goal.

use bycoms::seed::{derive_seed, rng_from_seed};
use bycoms::terrain::{generate_terrain, save_terrain, PerlinConfig, DEFAULT_GOAL, DEFAULT_START};

fn main() -> bycoms::Result<()> {
    let out = std::path::Path::new("target/examples-out/terrains");
    std::fs::create_dir_all(out)?;
    for i in 0..8 {
        let seed = derive_seed(42, &[i]);
        let cfg = PerlinConfig {
            seed,
            lattice_cell_size: 10.0,
            threshold_a: None,
        };
        let t = generate_terrain(
            &cfg,
            60,
            60,
            DEFAULT_START,
            DEFAULT_GOAL,
            &mut rng_from_seed(seed),
        )?;
        let s = t.summary();
        println!(
            "seed {seed:>20} blocked {:>4} path {:<5} width {:.3}",
            t.blocked_count(),
            s.path_exists,
            s.min_path_width
        );
        save_terrain(&t, out.join(format!("terrain_{i}.txt")))?;
    }
    Ok(())
}
