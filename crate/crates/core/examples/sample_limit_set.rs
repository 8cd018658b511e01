//! Samples the limit set of a small subsystem and writes the CSV cloud.
//!
//! ```text
//! cargo run --release --example sample_limit_set -- cloud.csv
//! ```

use std::fs::File;
use std::io::BufWriter;

use num_complex::Complex64;
use tractdim::ifs::{check_invariance, project_to_plane, sample_limit_set};
use tractdim::tractgeom::{build_G, build_squares, distortion_constant, BuildOptions, DistortionMode, GeometryBudget};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "cloud.csv".into());
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let spec = build_squares(12.0, 1.0)?;
    let dist = distortion_constant(12.0, family.univalence_abscissa(), DistortionMode::Chained, 64)?;
    let budget = GeometryBudget::new(0.1, 1.0, 1e-9, 256)?;
    let g = build_G(&family, &spec, &dist, &budget, &BuildOptions::default())?;
    let letters = &g.pairs[..16];

    let sample = sample_limit_set(&family, &spec, letters, 6, 10_000, 42)?;
    let invariance = check_invariance(&family, &spec, &sample)?;
    println!("{} points, worst invariance ratio {:.2e}", invariance.checked, invariance.worst_ratio);
    let sample = project_to_plane(&family, sample)?;
    sample.write_csv(BufWriter::new(File::create(&out)?))?;
    println!("wrote {out}");
    Ok(())
}
