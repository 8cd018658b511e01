//! A caller-supplied family: `2e^z` given through callbacks.

use num_complex::Complex64;
use tractdim::tractgeom::{build_squares, distortion_constant, radius_margins, DistortionMode, GeometryBudget};
use tractdim::{normalize_family, MapFamily, TailAsymptotics};

fn main() -> tractdim::Result<()> {
    let ln2 = 2f64.ln();
    let family = MapFamily::user()
        .label("two-exp")
        .r0(2.0 * std::f64::consts::E)
        .plane_map(|z| 2.0 * z.exp())
        .lift(move |w| (w.exp() + ln2, w.exp()))
        .inverse0(move |zeta| {
            let shifted = zeta - ln2;
            (shifted.ln(), shifted.inv())
        })
        .tail(TailAsymptotics {
            log_shift: Complex64::new(ln2, 0.0),
            value_error: 0.0,
            derivative_error: 0.0,
            validity_sigma: 1.0,
        })
        .univalence_abscissa(2.0 * std::f64::consts::E + ln2)
        .build()?;
    let family = normalize_family(&family)?;

    let r = 60.0;
    let budget = GeometryBudget::new(0.1, 1.0, 1e-9, 256)?;
    let margins = radius_margins(&family, &budget, r)?;
    let spec = build_squares(r, budget.d)?;
    let dist = distortion_constant(r, family.univalence_abscissa(), DistortionMode::Chained, 64)?;
    println!("{} at R = {r}: margins {margins:?}", family.name());
    println!("Q = {:?}", spec.q);
    println!("distortion C = {:.3} (single disk rho = {:.3})", dist.c, dist.rho);
    Ok(())
}
