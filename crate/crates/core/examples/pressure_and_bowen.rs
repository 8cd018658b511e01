//! Pressure bounds and Bowen roots for similarity systems and for `G`.

use num_complex::Complex64;
use tractdim::pressure::{bowen_root, default_t_grid, pressure_report, WeightedSystem};
use tractdim::tractgeom::{build_G, build_squares, distortion_constant, BuildOptions, DistortionMode, GeometryBudget};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    for ratios in [vec![0.25, 0.25], vec![1.0 / 3.0, 1.0 / 3.0], vec![0.5, 0.3, 0.1]] {
        let b = bowen_root(&WeightedSystem::similarities(&ratios), 1e-6)?;
        println!("{ratios:?}: root in [{:.6}, {:.6}]", b.t_lo, b.t_hi);
    }

    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let spec = build_squares(12.0, 1.0)?;
    let dist = distortion_constant(12.0, family.univalence_abscissa(), DistortionMode::Chained, 64)?;
    let budget = GeometryBudget::new(0.1, 1.0, 1e-9, 256)?;
    let g = build_G(&family, &spec, &dist, &budget, &BuildOptions::default())?;
    let system = WeightedSystem::from_gset(&family, &spec, &dist, &g)?;
    let report = pressure_report(&system, &default_t_grid())?;
    for (t, (lo, hi)) in report.t_grid.iter().zip(report.p_lo.iter().zip(&report.p_hi)).step_by(5) {
        println!("t = {t:.2}: P in [{lo:.4}, {hi:.4}]");
    }
    let b = bowen_root(&system, 1e-5)?;
    println!("G at R = 12: root in [{:.5}, {:.5}], decreasing = {}", b.t_lo, b.t_hi, report.strictly_decreasing);
    Ok(())
}
