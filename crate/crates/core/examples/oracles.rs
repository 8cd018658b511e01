//! Independent checks: box counting, word enumeration and finite differences.

use num_complex::Complex64;
use tractdim::oracle::{
    box_counting_dim, brute_force_pressure_similarities, decade_scales, fd_derivative_check, middle_thirds,
    ExpCylinder, NewtonInverse,
};
use tractdim::tractgeom::Letter;
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let cantor = middle_thirds(12, 100_000, 7);
    let est = box_counting_dim(&cantor, &decade_scales(1.0 / 3.0, 3f64.powi(-10), 12))?;
    println!("middle thirds: slope {:.4} (ln2/ln3 = {:.4})", est.slope, 2f64.ln() / 3f64.ln());

    for n in 1..=3 {
        let p = brute_force_pressure_similarities(&[1.0 / 3.0, 1.0 / 3.0], n, 0.7)?;
        println!("two thirds-maps, level {n}: P(0.7) = {:.12}", p.value);
    }

    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let zs: Vec<Complex64> = (0..100).map(|k| Complex64::new(9.5 + 0.05 * k as f64, -2.5 + 0.05 * k as f64)).collect();
    let branch = fd_derivative_check(&NewtonInverse { family: &family, s: 3 }, &zs, 1e-5)?;
    let word = [Letter::new(0, 70), Letter::new(1, -80), Letter::new(-1, 90)];
    let cylinder = fd_derivative_check(&ExpCylinder::new(&family, &word)?, &zs, 1e-5)?;
    println!("finite differences: branch {branch:.2e}, depth-3 cylinder {cylinder:.2e}");
    Ok(())
}
