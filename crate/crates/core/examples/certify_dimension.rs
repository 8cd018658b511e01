//! Certifies `dim > 1` for `e^z` in tail mode.
//!
//! ```text
//! cargo run --release --example certify_dimension -- 4000
//! ```

use num_complex::Complex64;
use tractdim::pressure::{certify_dim_gt_one, CertifyConfig};
use tractdim::tractgeom::{default_depth, distortion_constant, BuildOptions, DistortionMode, GMode};
use tractdim::{normalize_family, MapFamily};

fn main() -> tractdim::Result<()> {
    let r: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4000.0);
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), std::f64::consts::E))?;
    let c = distortion_constant(r, family.univalence_abscissa(), DistortionMode::Chained, 64)?.c;
    let config = CertifyConfig {
        r,
        epsilon: 0.1,
        d: default_depth(c),
        margin: 1e-9,
        boundary_samples: 256,
        distortion: DistortionMode::Chained,
        subdivisions: 64,
        build: BuildOptions {
            mode: GMode::Tail,
            ..BuildOptions::default()
        },
        bisection_tol: 1e-5,
    };
    let cert = certify_dim_gt_one(&family, &config)?;
    println!("R = {r}, D = {}, C = {:.4}", cert.d, cert.c);
    println!("{} tail segments, {} collar letters", cert.tail_segments, cert.explicit_letters);
    println!(
        "sum at t = 1 in [{:.4}, {:.4}], sum_lo / C = {:.3}",
        cert.sigma_sum_t1_lo,
        cert.sigma_sum_t1_hi,
        cert.sigma_sum_t1_lo / cert.c
    );
    println!("Bowen root in [{:.6}, {:.6}]: {:?}", cert.t_lo, cert.t_hi, cert.verdict);
    if let Some(reason) = cert.reason {
        println!("{reason}");
    }
    Ok(())
}
