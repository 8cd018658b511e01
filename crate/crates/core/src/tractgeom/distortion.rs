//! Koebe distortion constants for the composite branches on `Q`.
//!
//! Every composite `g = F⁻¹_u ∘ F⁻¹_s` is univalent on a half-plane
//! `{Re z > a}`. Two bounds on `|g'(z)| / |g'(R)|` over `Q` are offered:
//! the single-disk bound from the disk of radius `R - a` about `R`, and a
//! chained bound that applies the hyperbolic form of the Koebe theorem on
//! the half-plane to a grid of sub-squares. The chained bound is never
//! worse than the single-disk one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionMode {
    SingleDisk,
    Chained,
}

/// Two-sided bound `lower ≤ |g'(z)| / |g'(R)| ≤ upper` for `z ∈ Q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistortionBound {
    pub mode: DistortionMode,
    /// Left edge of the univalence half-plane.
    pub abscissa: f64,
    /// `(R/√2) / (R - a)`; the single-disk bound needs `ρ < 1`.
    pub rho: f64,
    pub upper: f64,
    pub lower: f64,
    /// `max(upper, 1/lower)`.
    pub c: f64,
    pub subdivisions: usize,
}

/// Default number of sub-squares per side for the chained bound.
pub const DEFAULT_SUBDIVISIONS: usize = 64;

pub fn distortion_constant(
    r: f64,
    abscissa: f64,
    mode: DistortionMode,
    subdivisions: usize,
) -> Result<DistortionBound> {
    if !(r.is_finite() && r > 0.0 && abscissa.is_finite()) {
        return Err(Error::Geometry(format!("invalid radius {r} or abscissa {abscissa}")));
    }
    let rho = (r / std::f64::consts::SQRT_2) / (r - abscissa);
    let single = (rho > 0.0 && rho < 1.0).then(|| {
        (
            (1.0 + rho) / (1.0 - rho).powi(3),
            (1.0 - rho) / (1.0 + rho).powi(3),
        )
    });
    let (upper, lower) = match mode {
        DistortionMode::SingleDisk => single.ok_or_else(|| {
            Error::Geometry(format!(
                "Q is not inside the univalence disk: rho = {rho} >= 1 (R = {r}, a = {abscissa})"
            ))
        })?,
        DistortionMode::Chained => {
            if !(r / 2.0 > abscissa) {
                return Err(Error::Geometry(format!(
                    "Q leaves the univalence half-plane: R/2 = {} <= a = {abscissa}",
                    r / 2.0
                )));
            }
            if subdivisions == 0 {
                return Err(Error::Config("chained distortion needs at least one subdivision".into()));
            }
            let (up, lo) = chained(r, abscissa, subdivisions);
            match single {
                Some((su, sl)) => (up.min(su), lo.max(sl)),
                None => (up, lo),
            }
        }
    };
    Ok(DistortionBound {
        mode,
        abscissa,
        rho,
        upper,
        lower,
        c: upper.max(1.0 / lower),
        subdivisions: if mode == DistortionMode::Chained { subdivisions } else { 1 },
    })
}

/// `e^{2d}` for the hyperbolic distance `d` on `{Re > a}` between points at
/// depths `x1 = Re z1 - a`, `x2 = Re z2 - a` and Euclidean separation `dist`.
fn koebe_factor(x1: f64, x2: f64, dist: f64) -> f64 {
    let c = 1.0 + dist * dist / (2.0 * x1 * x2);
    let e = c + (c * c - 1.0).max(0.0).sqrt();
    e * e
}

fn chained(r: f64, a: f64, k: usize) -> (f64, f64) {
    let side = r / k as f64;
    let depth_r = r - a;
    let mut upper = 1.0f64;
    let mut lower = 1.0f64;
    for i in 0..k {
        let x_min = r / 2.0 + side * i as f64;
        let x_max = x_min + side;
        for j in 0..k {
            let y_min = -r / 2.0 + side * j as f64;
            let y_max = y_min + side;
            // farthest corner from R
            let dx = (x_min - r).abs().max((x_max - r).abs());
            let dy = y_min.abs().max(y_max.abs());
            let e2d = koebe_factor(x_min - a, depth_r, dx.hypot(dy));
            upper = upper.max(e2d * depth_r / (x_min - a));
            lower = lower.min(depth_r / (x_max - a) / e2d);
        }
    }
    (upper, lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_disk_at_hundred() {
        let b = distortion_constant(100.0, 1.0, DistortionMode::SingleDisk, 1).unwrap();
        assert!((b.rho - 0.714249).abs() < 1e-6);
        assert!((b.c - 73.47).abs() < 0.01, "C = {}", b.c);
        assert!((b.lower - (1.0 - b.rho) / (1.0 + b.rho).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn single_disk_limit() {
        let b = distortion_constant(1e12, 1.0, DistortionMode::SingleDisk, 1).unwrap();
        assert!((b.c - 67.94).abs() < 0.01, "C = {}", b.c);
    }

    #[test]
    fn small_radius_is_geometry_error() {
        assert!(matches!(
            distortion_constant(1.2, 1.0, DistortionMode::SingleDisk, 1),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            distortion_constant(1.2, 1.0, DistortionMode::Chained, 8),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn chained_never_worse() {
        for &r in &[12.0, 40.0, 100.0, 2000.0] {
            let s = distortion_constant(r, std::f64::consts::E, DistortionMode::SingleDisk, 1);
            let c = distortion_constant(r, std::f64::consts::E, DistortionMode::Chained, 64).unwrap();
            if let Ok(s) = s {
                assert!(c.c <= s.c);
                assert!(c.upper <= s.upper && c.lower >= s.lower);
            }
            assert!(c.upper > 1.0 && c.lower < 1.0);
        }
    }

    #[test]
    fn chained_matches_exponential_extremes() {
        // g(z) = Log(z) has |g'(z)|/|g'(R)| = R/|z|, which reaches 2 at
        // R/2 and 1/|1.5 + 0.5i| at the far corners of Q.
        let r = 2000.0;
        let b = distortion_constant(r, std::f64::consts::E, DistortionMode::Chained, 64).unwrap();
        assert!(b.upper >= 2.0);
        let far = 1.0 / (1.5f64.hypot(0.5));
        assert!(b.lower <= far);
    }
}
