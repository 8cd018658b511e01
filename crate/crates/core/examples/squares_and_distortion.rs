//! The squares `Q ⊃ Q′ ⊃ Q″` and both distortion bounds.

use tractdim::tractgeom::{build_squares, distortion_constant, DistortionMode};

fn main() -> tractdim::Result<()> {
    let a = std::f64::consts::E;
    for r in [12.0, 100.0, 1000.0, 4000.0] {
        let spec = build_squares(r, 1.0)?;
        let single = distortion_constant(r, a, DistortionMode::SingleDisk, 64)?;
        let chained = distortion_constant(r, a, DistortionMode::Chained, 64)?;
        println!(
            "R = {r:>6}: Q = [{}, {}] x [{}, {}], single-disk C = {:>8.3}, chained C = {:>7.3}",
            spec.q.x0, spec.q.x1, spec.q.y0, spec.q.y1, single.c, chained.c
        );
    }
    Ok(())
}
