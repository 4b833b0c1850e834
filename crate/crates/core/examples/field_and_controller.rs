//! Samples the superposed field of two stuck robots and walks one agent
//! through it tick by tick, printing every mode change.

use bycoms::agent::{decide, sense, step, AgentParams, AgentState, NoiseConfig};
use bycoms::field::{FieldSet, FieldSource};
use bycoms::seed::rng_from_seed;
use bycoms::Vec2;

fn main() -> bycoms::Result<()> {
    let fs: FieldSet = [
        FieldSource::new(Vec2::new(10.0, 10.2), 1.0),
        FieldSource::new(Vec2::new(10.0, 11.2), 1.0),
    ]
    .into_iter()
    .collect();
    for x in [8.0, 9.0, 10.0, 11.0, 12.0] {
        let p = Vec2::new(x, 9.0);
        println!("g({x}, 9) = {:.4}", fs.strength_at(p));
    }

    let params = AgentParams::for_epsilon(1.5, 1.0)?;
    let goal = Vec2::new(20.0, 10.5);
    let mut st = AgentState::deploy(Vec2::new(2.0, 10.5), goal);
    let mut rng = rng_from_seed(0);
    let mut mode = st.mode;
    for tick in 0..400 {
        let s = sense(
            st.position,
            st.heading,
            &fs,
            goal,
            &NoiseConfig::off(),
            &mut rng,
        );
        let target = decide(&mut st, &s, &params);
        st = step(&st, target, &params, 0.1);
        if st.mode != mode {
            mode = st.mode;
            println!(
                "tick {tick:>3} at ({:.2}, {:.2}) -> {}",
                st.position.x,
                st.position.y,
                mode.as_str()
            );
        }
        if st.position.distance(goal) < 1.0 {
            println!("goal reached after {} ticks", tick + 1);
            break;
        }
    }
    Ok(())
}
