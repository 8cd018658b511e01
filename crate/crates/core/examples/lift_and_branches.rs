//! The logarithmic lift of `λ·e^z` and its inverse branches.

use num_complex::Complex64;
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let family = normalize_family(&MapFamily::exponential(Complex64::new(2.5, 0.0), 3.0))?;
    println!("R0 after normalization: {:.4} (ln R0 = {:.4})", family.r0(), family.ln_r0());

    let zeta = Complex64::new(20.0, 3.0);
    for s in -2..=2 {
        let (w, dw) = family.inv_branch(s, zeta)?;
        let (back, _) = family.eval_lift(w)?;
        let image = back.exp();
        let residual = (family.plane_map(w.exp()) - image).norm() / (1.0 + image.norm());
        println!(
            "s = {s:>2}: F^-1(zeta) = {w:.6}, |derivative| = {:.3e}, |F(w) - zeta| = {:.1e}, relative conjugacy residual {residual:.1e}",
            dw.norm(),
            (back - zeta).norm()
        );
    }
    Ok(())
}
