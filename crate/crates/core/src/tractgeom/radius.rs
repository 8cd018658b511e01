use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::budget::GeometryBudget;
use super::squares::build_squares;
use crate::error::{Error, Result};
use crate::loglift::MapFamily;

/// Uniform grid `lo, lo + step, ...` up to `hi`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ScanSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.step > 0.0) {
            return Err(Error::Config(format!("invalid radius scan {self:?}")));
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.lo + self.step * k as f64).collect())
    }
}

/// Margins of every condition at one radius; each is positive when it holds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadiusMargins {
    pub r: f64,
    /// `ln|(F⁻¹₀)'(R)| + (1 + ε) ln R`.
    pub derivative: f64,
    /// `Re F⁻¹₀(R) - (ln R₀ + 2D)`.
    pub depth: f64,
    /// `R/4 - D`.
    pub geometry: f64,
}

impl RadiusMargins {
    pub fn all_hold(&self) -> bool {
        self.derivative > 0.0 && self.depth > 0.0 && self.geometry >= 0.0
    }

    fn worst(&self) -> f64 {
        self.derivative.min(self.depth).min(self.geometry)
    }
}

pub fn radius_margins(family: &MapFamily, budget: &GeometryBudget, r: f64) -> Result<RadiusMargins> {
    let (v, dv) = family.inv_branch(0, Complex64::new(r, 0.0))?;
    Ok(RadiusMargins {
        r,
        derivative: dv.norm().ln() + (1.0 + budget.epsilon) * r.ln(),
        depth: v.re - (family.ln_r0() + 2.0 * budget.d),
        geometry: r / 4.0 - budget.d,
    })
}

/// Smallest grid radius meeting the derivative, depth and square conditions.
pub fn find_radius(family: &MapFamily, budget: &GeometryBudget, scan: &ScanSpec) -> Result<RadiusMargins> {
    let mut closest: Option<RadiusMargins> = None;
    for r in scan.points()? {
        if r <= family.ln_r0() {
            continue;
        }
        let m = radius_margins(family, budget, r)?;
        if m.all_hold() && build_squares(r, budget.d).is_ok() {
            return Ok(m);
        }
        if closest.is_none_or(|c| m.worst() > c.worst()) {
            closest = Some(m);
        }
    }
    Err(Error::SearchFailure(match closest {
        Some(m) => format!(
            "no radius in [{}, {}] qualifies; closest R = {} has derivative margin {:.6}, \
             depth margin {:.6}, geometry margin {:.6}",
            scan.lo, scan.hi, m.r, m.derivative, m.depth, m.geometry
        ),
        None => format!("scan [{}, {}] has no radius inside H", scan.lo, scan.hi),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loglift::normalize_family;
    use std::f64::consts::E;

    fn family() -> MapFamily {
        normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), E)).unwrap()
    }

    #[test]
    fn large_depth_is_out_of_reach() {
        let b = GeometryBudget::new(0.1, 25.0, 0.0, 64).unwrap();
        let scan = ScanSpec { lo: 1e3, hi: 1e4, step: 100.0 };
        let err = find_radius(&family(), &b, &scan).unwrap_err();
        assert!(matches!(err, Error::SearchFailure(_)));
        assert!(err.to_string().contains("depth margin"));
    }

    #[test]
    fn moderate_depth_found_on_grid() {
        let b = GeometryBudget::new(0.1, 3.0, 0.0, 64).unwrap();
        let scan = ScanSpec { lo: 1e3, hi: 1e4, step: 100.0 };
        let m = find_radius(&family(), &b, &scan).unwrap();
        // ln R > 7 first holds at R = 1100
        assert_eq!(m.r, 1100.0);
        assert!(m.depth > 0.0);
    }

    #[test]
    fn unit_depth_picks_first_grid_point() {
        let b = GeometryBudget::new(0.1, 1.0, 0.0, 64).unwrap();
        let scan = ScanSpec { lo: 40.0, hi: 400.0, step: 1.0 };
        assert_eq!(find_radius(&family(), &b, &scan).unwrap().r, 40.0);
    }

    #[test]
    fn scan_includes_end_point() {
        let s = ScanSpec { lo: 1.0, hi: 2.0, step: 0.1 };
        let p = s.points().unwrap();
        assert_eq!(p.len(), 11);
        assert!((p[10] - 2.0).abs() < 1e-12);
    }
}
