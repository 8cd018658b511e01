//! Traces the preimages of the anchor line through `Q′`.

use num_complex::Complex64;
use tractdim::tractgeom::{build_squares, trace_level_lines, LevelLineOptions};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let spec = build_squares(40.0, 1.0)?;
    let report = trace_level_lines(&family, &spec, &LevelLineOptions::default())?;
    println!(
        "{} curves (floor {}), shortest {:.3} against {:.3}",
        report.curve_count, report.count_floor, report.min_arclength, report.length_floor
    );
    for t in &report.traces {
        println!("  u = {:>2}: {} points, arclength {:.3}", t.u, t.points.len(), t.arclength);
    }
    Ok(())
}
