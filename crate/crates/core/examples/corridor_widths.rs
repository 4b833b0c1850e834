//! Measures bottleneck widths of hand-built corridors, walls and zigzags.

use bycoms::terrain::crafted::{corridor, wall_with_gap, zigzag, CorridorShape};
use bycoms::terrain::min_path_width;

fn main() -> bycoms::Result<()> {
    for shape in [
        CorridorShape::Horizontal,
        CorridorShape::Vertical,
        CorridorShape::L,
    ] {
        for w in [1.0, 2.0, 3.5] {
            let t = corridor(shape, w)?;
            println!(
                "{:<10} nominal {w:<4} measured {:.3}",
                shape.as_str(),
                min_path_width(&t)
            );
        }
    }
    for gap in [1, 3, 5] {
        println!(
            "wall gap   nominal {gap:<4} measured {:.3}",
            min_path_width(&wall_with_gap(gap, 28)?)
        );
    }
    for w in [2, 4] {
        println!(
            "zigzag     nominal {w:<4} measured {:.3}",
            min_path_width(&zigzag(w)?)
        );
    }
    Ok(())
}
