//! A differential-drive robot hears a stuck emitter through six microphones
//! and steers around it, compared with a robot that senses the field exactly.

use bycoms::acoustic::{cross_track_deviation, run_acoustic, AcousticScenario, Sensing};
use bycoms::render::{render_svg, RenderOptions};

fn main() -> bycoms::Result<()> {
    let scn = AcousticScenario::default();
    let mic = run_acoustic(&scn, Sensing::MicArray)?;
    let exact = run_acoustic(&scn, Sensing::Exact)?;
    println!("mic   reached {} in {:.1} s", mic.reached, mic.elapsed);
    println!("exact reached {} in {:.1} s", exact.reached, exact.elapsed);
    println!(
        "cross-track deviation {:.4} m",
        cross_track_deviation(&mic.path, &exact.path)
    );
    std::fs::create_dir_all("target/examples-out")?;
    let opts = RenderOptions {
        scale: 200.0,
        until: None,
    };
    std::fs::write(
        "target/examples-out/acoustic.svg",
        render_svg(None, &mic.trace, &opts),
    )?;
    Ok(())
}
