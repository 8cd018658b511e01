use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loglift::MapFamily;

/// The points `v_s = F⁻¹_s(R)`, which share one real part `r`.
#[derive(Debug, Clone, Serialize)]
pub struct AnchorLine {
    pub r: f64,
    pub points: Vec<(i64, Complex64)>,
    pub max_re_spread: f64,
    /// `r - (ln R₀ + 2D)`.
    pub depth_margin: f64,
    /// `Re F⁻¹₀(1 + ln R₀)`.
    pub c0: f64,
    /// `4π ln(R - ln R₀) + c₀`.
    pub growth_bound: f64,
    /// `growth_bound - r`.
    pub growth_margin: f64,
}

pub fn anchor_line(
    family: &MapFamily,
    r: f64,
    d: f64,
    indices: std::ops::RangeInclusive<i64>,
) -> Result<AnchorLine> {
    let zeta = Complex64::new(r, 0.0);
    let points = indices
        .map(|s| family.inv_branch(s, zeta).map(|(v, _)| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let Some(&(_, first)) = points.first() else {
        return Err(Error::Config("anchor line needs at least one index".into()));
    };
    let spread = points
        .iter()
        .map(|(_, v)| (v.re - first.re).abs())
        .fold(0.0, f64::max);
    if spread > 1e-9 * (1.0 + first.re.abs()) {
        return Err(Error::Contract(format!(
            "branch images of R do not share a real part (spread {spread:e})"
        )));
    }
    let ln_r0 = family.ln_r0();
    let c0 = family.inv_branch(0, Complex64::new(1.0 + ln_r0, 0.0))?.0.re;
    let growth_bound = 4.0 * std::f64::consts::PI * (r - ln_r0).ln() + c0;
    Ok(AnchorLine {
        r: first.re,
        points,
        max_re_spread: spread,
        depth_margin: first.re - (ln_r0 + 2.0 * d),
        c0,
        growth_bound,
        growth_margin: growth_bound - first.re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loglift::normalize_family;
    use std::f64::consts::E;

    #[test]
    fn anchors_share_real_part() {
        let f = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), E)).unwrap();
        let a = anchor_line(&f, 2000.0, 2.0, -5..=5).unwrap();
        assert!((a.r - 2000f64.ln()).abs() < 1e-12);
        assert!(a.max_re_spread < 1e-12);
        assert!(a.depth_margin > 0.0);
        assert!(a.growth_margin > 0.0);
        assert_eq!(a.points.len(), 11);
        assert!((a.points[6].1.im - std::f64::consts::TAU).abs() < 1e-12);
    }
}
