//! The admissible set `G` in both construction modes.

use num_complex::Complex64;
use tractdim::tractgeom::{build_G, build_squares, distortion_constant, BuildOptions, DistortionMode, GMode, GeometryBudget};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let spec = build_squares(12.0, 1.0)?;
    let dist = distortion_constant(12.0, family.univalence_abscissa(), DistortionMode::Chained, 64)?;
    let budget = GeometryBudget::new(0.1, 1.0, 1e-9, 256)?;

    for mode in [GMode::Enumerate, GMode::Tail] {
        let options = BuildOptions {
            mode,
            ..BuildOptions::default()
        };
        let g = build_G(&family, &spec, &dist, &budget, &options)?;
        println!(
            "{mode:?}: {} explicit letters, {} segments, truncated = {}, borderline = {}",
            g.pairs.len(),
            g.segments.len(),
            g.truncated,
            g.borderline
        );
        for seg in &g.segments {
            println!("  u = {:>2}, sign = {:>2}, sigma in [{:.3}, {:.3}]", seg.u, seg.sign, seg.sigma_lo, seg.sigma_hi);
        }
    }
    Ok(())
}
