use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    /// Distance from `z` to the complement; negative outside.
    pub fn inner_distance(&self, z: Complex64) -> f64 {
        (z.re - self.x0)
            .min(self.x1 - z.re)
            .min(z.im - self.y0)
            .min(self.y1 - z.im)
    }

    pub fn shrink(&self, by: f64) -> Rect {
        Rect::new(self.x0 + by, self.x1 - by, self.y0 + by, self.y1 - by)
    }

    pub fn is_within(&self, other: &Rect) -> bool {
        self.x0 >= other.x0 && self.x1 <= other.x1 && self.y0 >= other.y0 && self.y1 <= other.y1
    }

    /// `n` points equally spaced along the boundary, counter-clockwise from
    /// the lower-left corner. Consecutive points are `perimeter / n` apart.
    pub fn boundary_points(&self, n: usize) -> Vec<Complex64> {
        let p = self.perimeter();
        let (w, h) = (self.width(), self.height());
        (0..n)
            .map(|k| {
                let arc = p * k as f64 / n as f64;
                if arc < w {
                    Complex64::new(self.x0 + arc, self.y0)
                } else if arc < w + h {
                    Complex64::new(self.x1, self.y0 + (arc - w))
                } else if arc < 2.0 * w + h {
                    Complex64::new(self.x1 - (arc - w - h), self.y1)
                } else {
                    Complex64::new(self.x0, self.y1 - (arc - 2.0 * w - h))
                }
            })
            .collect()
    }
}

/// The squares `Q ⊃ Q′ ⊃ Q″` centred at `R`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SquareSpec {
    pub r: f64,
    pub d: f64,
    pub q: Rect,
    pub q_prime: Rect,
    pub q_second: Rect,
    /// `Q′ ⊆ Q″`, which happens exactly when `R/4 = D`.
    pub degenerate: bool,
}

impl SquareSpec {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.r, 0.0)
    }
}

/// `Q = [R/2, 3R/2] × [-R/2, R/2]`, `Q′` is `Q` shrunk by `D`,
/// `Q″ = [3R/4, 5R/4] × [-R/4, R/4]`.
pub fn build_squares(r: f64, d: f64) -> Result<SquareSpec> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Geometry(format!("R must be positive, got {r}")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Geometry(format!("D must be positive, got {d}")));
    }
    if d > r / 4.0 {
        return Err(Error::Geometry(format!(
            "D = {d} exceeds R/4 = {}; Q'' would not fit inside Q'",
            r / 4.0
        )));
    }
    let q = Rect::new(r / 2.0, 1.5 * r, -r / 2.0, r / 2.0);
    let q_prime = q.shrink(d);
    let q_second = Rect::new(0.75 * r, 1.25 * r, -r / 4.0, r / 4.0);
    Ok(SquareSpec {
        r,
        d,
        q,
        q_prime,
        q_second,
        degenerate: q_prime.is_within(&q_second),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_at_hundred() {
        let spec = build_squares(100.0, 20.0).unwrap();
        assert_eq!(spec.q, Rect::new(50.0, 150.0, -50.0, 50.0));
        assert_eq!(spec.q_second, Rect::new(75.0, 125.0, -25.0, 25.0));
        assert_eq!(spec.q_prime, Rect::new(70.0, 130.0, -30.0, 30.0));
        assert!((spec.q.diameter() - 200f64.sqrt() * 10.0).abs() < 1e-12);
        assert!(!spec.degenerate);
    }

    #[test]
    fn boundary_case_is_flagged() {
        let spec = build_squares(100.0, 25.0).unwrap();
        assert_eq!(spec.q_prime, Rect::new(75.0, 125.0, -25.0, 25.0));
        assert!(spec.degenerate);
    }

    #[test]
    fn oversized_d_is_rejected() {
        assert!(matches!(build_squares(100.0, 26.0), Err(Error::Geometry(_))));
        assert!(matches!(build_squares(100.0, 0.0), Err(Error::Geometry(_))));
    }

    #[test]
    fn boundary_sampling_is_uniform() {
        let q = Rect::new(6.0, 18.0, -6.0, 6.0);
        let pts = q.boundary_points(64);
        assert_eq!(pts.len(), 64);
        let spacing = q.perimeter() / 64.0;
        for (a, b) in pts.iter().zip(pts.iter().cycle().skip(1)) {
            assert!((a - b).norm() <= spacing + 1e-12);
            assert!(q.inner_distance(*a).abs() < 1e-12);
        }
    }
}
