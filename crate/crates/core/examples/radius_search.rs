//! Scans for the smallest radius meeting the derivative and depth conditions.

use num_complex::Complex64;
use tractdim::tractgeom::{find_radius, GeometryBudget, ScanSpec};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let scan = ScanSpec {
        lo: 10.0,
        hi: 2000.0,
        step: 1.0,
    };
    for d in [1.0, 2.0, 3.0] {
        let budget = GeometryBudget::new(0.1, d, 0.0, 256)?;
        match find_radius(&family, &budget, &scan) {
            Ok(m) => println!("D = {d}: R = {} (derivative {:.4}, depth {:.4})", m.r, m.derivative, m.depth),
            Err(e) => println!("D = {d}: {e}"),
        }
    }
    Ok(())
}
