//! Cells with astronomically large `|s|`, described through `σ = ln(2π|s|)`.
//!
//! With `p = F⁻¹₀(R)` and `K` the tail log shift, the first-stage image is
//! `v_s = p + 2πis` and `w = v_s - K = α + i(β₀ + 2πs)`. The tail
//! asymptotics give `g_{u,s}(R) ≈ Log w + 2πiu` and `|(F⁻¹₀)'(v_s)| ≈ 1/|w|`,
//! with `e^σ - κ₁ ≤ |w| ≤ e^σ + κ₂` for `κ₁ = |β₀|`, `κ₂ = |α| + |β₀|`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::cell::{CellImage, CellIndex};
use super::distortion::DistortionBound;
use super::squares::SquareSpec;
use crate::error::{Error, Result};
use crate::loglift::MapFamily;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailGeometry {
    pub r: f64,
    pub alpha: f64,
    pub beta0: f64,
    /// `ln|(F⁻¹₀)'(R)|`.
    pub ln_d0: f64,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub value_error: f64,
    pub derivative_error: f64,
    /// Smallest σ at which the bounds below are valid.
    pub sigma_min: f64,
}

impl TailGeometry {
    pub fn new(family: &MapFamily, r: f64) -> Result<Self> {
        let tail = family
            .tail()
            .ok_or_else(|| Error::Config("tail mode needs a family with tail asymptotics".into()))?;
        let (p, d0) = family.inv_branch(0, Complex64::new(r, 0.0))?;
        let shifted = p - tail.log_shift;
        let kappa_lo = shifted.im.abs();
        let kappa_hi = shifted.re.abs() + kappa_lo;
        let floor = (2.0 * (kappa_lo + tail.derivative_error + tail.value_error) + 1.0).ln();
        Ok(Self {
            r,
            alpha: shifted.re,
            beta0: shifted.im,
            ln_d0: d0.norm().ln(),
            kappa_lo,
            kappa_hi,
            value_error: tail.value_error,
            derivative_error: tail.derivative_error,
            sigma_min: tail.validity_sigma.max(TAU.ln()).max(floor),
        })
    }

    /// Lower bound on `|w|` at σ.
    fn w_floor(&self, sigma: f64) -> f64 {
        sigma.exp() - self.kappa_lo
    }

    /// `g_{u,s}(R)` for `s = sign·e^σ/2π`, with an absolute error bound.
    pub fn center(&self, u: i64, sign: i8, sigma: f64) -> (Complex64, f64) {
        let decay = (-sigma).exp();
        let x = self.alpha * decay;
        let y = f64::from(sign) + self.beta0 * decay;
        let re = sigma + 0.5 * (x * x + y * y).ln();
        let im = y.atan2(x) + TAU * u as f64;
        let c = Complex64::new(re, im);
        let err = self.value_error / self.w_floor(sigma) + 1e-14 * (1.0 + c.norm());
        (c, err)
    }

    /// Bounds on `ln|g'_{u,s}(R)|` for the single index with `ln(2π|s|) = σ`.
    pub fn ln_derivative_bounds(&self, sigma: f64) -> (f64, f64) {
        let floor = self.w_floor(sigma);
        let rel = self.derivative_error / floor;
        let lo = self.ln_d0 - (sigma + (self.kappa_hi * (-sigma).exp()).ln_1p()) + (-rel).ln_1p();
        let hi = self.ln_d0 - floor.ln() + rel.ln_1p();
        (lo, hi)
    }

    /// Largest deviation of `arg w` from `±π/2` for σ' ≥ σ.
    pub fn angle_deviation(&self, sigma: f64) -> f64 {
        (self.alpha.abs() / self.w_floor(sigma)).atan()
    }

    pub fn cell(&self, u: i64, sign: i8, sigma: f64, spec: &SquareSpec, dist: &DistortionBound) -> CellImage {
        let (center, center_error) = self.center(u, sign, sigma);
        let (_, hi) = self.ln_derivative_bounds(sigma);
        let sup = dist.upper * hi.exp();
        CellImage {
            index: CellIndex::LogDomain { u, sign, sigma },
            center,
            center_error,
            ln_derivative: hi,
            radius_bound: sup * spec.q.diameter() / 2.0,
            diameter_bound: sup * spec.q.diameter(),
            verdict: None,
        }
    }
}

/// `σ`-interval of one branch `(u, sign)`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaWindow {
    pub u: i64,
    pub sign: i8,
    pub lo: f64,
    pub hi: f64,
}

impl SigmaWindow {
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }
}

/// Narrows `[lo, hi]` with `pred(lo)` false and `pred(hi)` true to the last
/// false and first true point.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Window of σ on which the center of `g_{u,s}(R)` stays `margin` inside `Q`.
///
/// `Re` of the center must be nondecreasing in σ; a decrease on the probe
/// grid is reported so the caller can enumerate instead.
pub fn solve_s_window(
    family: &MapFamily,
    u: i64,
    sign: i8,
    spec: &SquareSpec,
    margin: f64,
) -> Result<SigmaWindow> {
    let tail = TailGeometry::new(family, spec.r)?;
    solve_with(&tail, u, sign, spec, margin)
}

pub(crate) fn solve_with(
    tail: &TailGeometry,
    u: i64,
    sign: i8,
    spec: &SquareSpec,
    margin: f64,
) -> Result<SigmaWindow> {
    let empty = SigmaWindow { u, sign, lo: 1.0, hi: 0.0 };
    let q = &spec.q;
    let re = |sigma: f64| {
        let (c, err) = tail.center(u, sign, sigma);
        (c.re, err)
    };
    let s_min = tail.sigma_min;
    let s_max = q.x1 + 64.0;
    let probes = 64;
    let mut previous = f64::NEG_INFINITY;
    for k in 0..=probes {
        let sigma = s_min + (s_max - s_min) * k as f64 / probes as f64;
        let (v, _) = re(sigma);
        if v < previous {
            return Err(Error::Construction(format!(
                "Re g(R) decreases in sigma near {sigma} for u = {u}; use enumerate mode"
            )));
        }
        previous = v;
    }

    let left = q.x0 + margin;
    let right = q.x1 - margin;
    let enters = |sigma: f64| {
        let (v, err) = re(sigma);
        v - err >= left
    };
    let stays = |sigma: f64| {
        let (v, err) = re(sigma);
        v + err <= right
    };
    if !enters(s_max) || !stays(s_min) {
        return Ok(empty);
    }
    let mut lo = if enters(s_min) { s_min } else { bisect(s_min, s_max, enters).1 };
    let hi = if stays(s_max) {
        s_max
    } else {
        bisect(s_min, s_max, |s| !stays(s)).0
    };

    // imaginary part: centers approach 2πu + sign·π/2 from within the
    // deviation allowed by the angle bound
    let limit = TAU * u as f64 + f64::from(sign) * FRAC_PI_2;
    let room = (q.y1 - margin - limit).min(limit - (q.y0 + margin));
    if room <= 0.0 {
        return Ok(empty);
    }
    let (_, err_lo) = tail.center(u, sign, lo);
    let allowed = room - err_lo;
    if allowed <= 0.0 {
        return Ok(empty);
    }
    if tail.angle_deviation(lo) > allowed {
        let needed = (tail.alpha.abs() / allowed.tan() + tail.kappa_lo).ln();
        lo = lo.max(needed);
        while tail.angle_deviation(lo) > allowed {
            lo = f64::from_bits(lo.to_bits() + 1);
        }
    }
    if lo > hi {
        return Ok(empty);
    }
    Ok(SigmaWindow { u, sign, lo, hi })
}
