//! The admissible set `G = {(u, s) : Q_{u,s} ⊂ Q}`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::budget::GeometryBudget;
use super::cell::{cell_image, containment_test, Letter, Verdict};
use super::distortion::DistortionBound;
use super::squares::SquareSpec;
use super::window::{solve_with, SigmaWindow, TailGeometry};
use crate::error::{Error, Result};
use crate::loglift::MapFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GMode {
    Enumerate,
    Tail,
}

/// Run of consecutive indices `s = sign·n` with `ln(2πn) ∈ [sigma_lo, sigma_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSegment {
    pub u: i64,
    pub sign: i8,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BuildOptions {
    pub mode: GMode,
    /// Cap on explicitly tested cells in enumerate mode.
    pub max_explicit: usize,
    /// Explicit cells tested on each side of a tail window edge.
    pub collar: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            mode: GMode::Enumerate,
            max_explicit: 16384,
            collar: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GSet {
    pub mode: GMode,
    /// Sorted by `(u, s)`.
    pub pairs: Vec<Letter>,
    /// Sorted by `(u, sign)`.
    pub segments: Vec<TailSegment>,
    /// Enumeration stopped at the explicit budget.
    pub truncated: bool,
    /// Cells excluded because they came within the margin of `∂Q`.
    pub borderline: usize,
}

impl GSet {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.segments.is_empty()
    }
}

impl Serialize for GSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            mode: GMode,
            pairs: Vec<[i64; 2]>,
            segments: &'a [TailSegment],
            truncated: bool,
            borderline: usize,
        }
        Wire {
            mode: self.mode,
            pairs: self.pairs.iter().map(|l| [l.u, l.s]).collect(),
            segments: &self.segments,
            truncated: self.truncated,
            borderline: self.borderline,
        }
        .serialize(serializer)
    }
}

#[allow(non_snake_case)]
pub fn build_G(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
    options: &BuildOptions,
) -> Result<GSet> {
    match options.mode {
        GMode::Enumerate => enumerate(family, spec, dist, budget, options),
        GMode::Tail => tail(family, spec, dist, budget, options),
    }
}

/// Tests candidates in parallel; results keep candidate order.
fn test_letters(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
    candidates: &[Letter],
) -> Result<(Vec<Letter>, usize)> {
    let verdicts = candidates
        .par_iter()
        .map(|&l| {
            let cell = cell_image(family, l, spec, dist)?;
            containment_test(family, &cell, spec, dist, budget).map(|c| c.verdict)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inside = Vec::new();
    let mut borderline = 0;
    for (l, v) in candidates.iter().zip(verdicts) {
        match v {
            Verdict::Inside => inside.push(*l),
            Verdict::Borderline => borderline += 1,
            Verdict::Outside => {}
        }
    }
    Ok((inside, borderline))
}

const INDEX_LIMIT: i64 = 1 << 61;

/// First `k ≥ from` with `pred(k)`, for `pred` monotone from false to true.
fn first_true(from: i64, pred: impl Fn(i64) -> Result<bool>) -> Result<Option<i64>> {
    if pred(from)? {
        return Ok(Some(from));
    }
    let mut lo = from;
    let mut step = 1i64;
    let hi = loop {
        let k = from.saturating_add(step);
        if k >= INDEX_LIMIT {
            return Ok(None);
        }
        if pred(k)? {
            break k;
        }
        lo = k;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn enumerate(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
    options: &BuildOptions,
) -> Result<GSet> {
    let q = spec.q;
    let center = |s: i64| -> Result<num_complex::Complex64> {
        cell_image(family, Letter::new(0, s), spec, dist).map(|c| c.center)
    };
    let overflow = || {
        Error::Budget(format!(
            "the index window at R = {} exceeds 64-bit integers; use tail mode",
            spec.r
        ))
    };
    let per_sign = (options.max_explicit / 2).max(1);
    let mut candidates = Vec::new();
    let mut truncated = false;
    for sign in [1i64, -1] {
        let Some(first) = first_true(1, |k| Ok(center(sign * k)?.re >= q.x0))? else {
            return Err(overflow());
        };
        let Some(past) = first_true(first, |k| Ok(center(sign * k)?.re > q.x1))? else {
            return Err(overflow());
        };
        let last = past - 1;
        if last < first {
            continue;
        }
        let (a, b) = (center(sign * first)?.im, center(sign * last)?.im);
        let (im_lo, im_hi) = (a.min(b), a.max(b));
        let u_min = ((q.y0 - im_hi) / TAU).ceil() as i64;
        let u_max = ((q.y1 - im_lo) / TAU).floor() as i64;
        if u_max < u_min {
            continue;
        }
        let n_u = (u_max - u_min + 1) as usize;
        let mut len = (last - first + 1) as usize;
        if n_u * len > per_sign {
            len = (per_sign / n_u).max(1);
            truncated = true;
        }
        for u in u_min..=u_max {
            for k in 0..len as i64 {
                candidates.push(Letter::new(u, sign * (first + k)));
            }
        }
    }
    let (mut pairs, borderline) = test_letters(family, spec, dist, budget, &candidates)?;
    pairs.sort();
    Ok(GSet {
        mode: GMode::Enumerate,
        pairs,
        segments: Vec::new(),
        truncated,
        borderline,
    })
}

/// Largest `n` for which `n` and `n ± collar` are exact in `f64` and `i64`.
const EXACT_INDEX: f64 = 4_503_599_627_370_496.0; // 2^52

fn tail(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
    options: &BuildOptions,
) -> Result<GSet> {
    let geometry = TailGeometry::new(family, spec.r)?;
    let u_max = ((spec.q.y1 + std::f64::consts::PI) / TAU).ceil() as i64;
    let branches: Vec<(i64, i8)> = (-u_max..=u_max)
        .flat_map(|u| [(u, 1i8), (u, -1i8)])
        .collect();
    let results = branches
        .par_iter()
        .map(|&(u, sign)| tail_branch(family, &geometry, u, sign, spec, dist, budget, options))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    let mut segments = Vec::new();
    let mut borderline = 0;
    for (p, seg, b) in results {
        pairs.extend(p);
        segments.extend(seg);
        borderline += b;
    }
    pairs.sort();
    Ok(GSet {
        mode: GMode::Tail,
        pairs,
        segments,
        truncated: false,
        borderline,
    })
}

/// The analytic window of one branch, shrunk so that every cell disk in it
/// clears `∂Q` by the budget margin.
pub fn certified_window(
    geometry: &TailGeometry,
    u: i64,
    sign: i8,
    spec: &SquareSpec,
    dist: &DistortionBound,
    margin: f64,
) -> Result<SigmaWindow> {
    let first = solve_with(geometry, u, sign, spec, margin)?;
    if first.is_empty() {
        return Ok(first);
    }
    // cell radii decrease in σ, so the radius at the left end covers the window
    let cell = geometry.cell(u, sign, first.lo, spec, dist);
    let window = solve_with(geometry, u, sign, spec, margin + cell.radius_bound + cell.center_error)?;
    if window.is_empty() {
        return Ok(window);
    }
    for sigma in [window.lo, window.hi] {
        let c = geometry.cell(u, sign, sigma, spec, dist);
        let clearance = spec.q.inner_distance(c.center) - c.center_error - c.radius_bound;
        if clearance < margin {
            return Err(Error::Construction(format!(
                "tail window edge at sigma = {sigma} (u = {u}) clears Q by only {clearance}"
            )));
        }
    }
    Ok(window)
}

#[allow(clippy::too_many_arguments)]
fn tail_branch(
    family: &MapFamily,
    geometry: &TailGeometry,
    u: i64,
    sign: i8,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
    options: &BuildOptions,
) -> Result<(Vec<Letter>, Vec<TailSegment>, usize)> {
    let window = certified_window(geometry, u, sign, spec, dist, budget.margin)?;
    if window.is_empty() {
        return Ok((Vec::new(), Vec::new(), 0));
    }
    let collar = options.collar as i64;
    let x_lo = window.lo.exp() / TAU;
    let x_hi = window.hi.exp() / TAU;
    let sign64 = i64::from(sign);
    let segment = |lo: f64, hi: f64| TailSegment {
        u,
        sign,
        sigma_lo: lo,
        sigma_hi: hi,
    };
    if collar == 0 || x_lo >= EXACT_INDEX {
        return Ok((Vec::new(), vec![segment(window.lo, window.hi)], 0));
    }
    let s_first = x_lo.ceil() as i64;
    let seg_start = s_first + collar;
    let mut explicit: Vec<i64> = ((s_first - collar).max(1)..seg_start).collect();
    let mut segments = Vec::new();
    if x_hi < EXACT_INDEX {
        let s_last = x_hi.floor() as i64;
        let seg_end = s_last - collar;
        if seg_end < seg_start {
            explicit.extend(seg_start..=s_last + collar);
        } else {
            explicit.extend(seg_end + 1..=s_last + collar);
            segments.push(segment(
                (TAU * (seg_start as f64 - 0.5)).ln(),
                (TAU * (seg_end as f64 + 0.5)).ln(),
            ));
        }
    } else {
        segments.push(segment((TAU * (seg_start as f64 - 0.5)).ln(), window.hi));
    }
    let candidates: Vec<Letter> = explicit.into_iter().map(|n| Letter::new(u, sign64 * n)).collect();
    let (pairs, borderline) = test_letters(family, spec, dist, budget, &candidates)?;
    Ok((pairs, segments, borderline))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loglift::normalize_family;
    use crate::tractgeom::distortion::{distortion_constant, DistortionMode};
    use crate::tractgeom::squares::build_squares;
    use num_complex::Complex64;
    use std::f64::consts::E;

    fn family() -> MapFamily {
        normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), E)).unwrap()
    }

    fn setup(r: f64) -> (MapFamily, SquareSpec, DistortionBound, GeometryBudget) {
        let f = family();
        let spec = build_squares(r, 1.0).unwrap();
        let dist = distortion_constant(r, f.univalence_abscissa(), DistortionMode::Chained, 32).unwrap();
        let budget = GeometryBudget::new(0.1, 1.0, 0.0, 64).unwrap();
        (f, spec, dist, budget)
    }

    #[test]
    fn small_enumeration_is_sorted_and_truncated() {
        let (f, spec, dist, budget) = setup(12.0);
        let opts = BuildOptions {
            mode: GMode::Enumerate,
            max_explicit: 400,
            collar: 0,
        };
        let g = build_G(&f, &spec, &dist, &budget, &opts).unwrap();
        assert!(!g.pairs.is_empty());
        assert!(g.truncated);
        assert!(g.pairs.windows(2).all(|w| w[0] < w[1]));
        assert!(g.pairs.iter().all(|l| l.s.abs() >= 64));
    }

    #[test]
    fn tail_mode_at_large_radius_has_segments_only() {
        let (f, spec, dist, budget) = setup(2000.0);
        let opts = BuildOptions {
            mode: GMode::Tail,
            ..BuildOptions::default()
        };
        let g = build_G(&f, &spec, &dist, &budget, &opts).unwrap();
        assert!(g.pairs.is_empty());
        assert!(!g.segments.is_empty());
        for seg in &g.segments {
            let len = seg.sigma_hi - seg.sigma_lo;
            assert!(len > 0.9 * 2000.0 && len < 2000.0, "{len}");
        }
    }

    #[test]
    fn tail_mode_at_twelve_mixes_collars_and_segments() {
        let (f, spec, dist, budget) = setup(12.0);
        let opts = BuildOptions {
            mode: GMode::Tail,
            ..BuildOptions::default()
        };
        let g = build_G(&f, &spec, &dist, &budget, &opts).unwrap();
        assert!(!g.pairs.is_empty());
        assert!(!g.segments.is_empty());
        for seg in &g.segments {
            for l in g.pairs.iter().filter(|l| l.u == seg.u && l.s.signum() == i64::from(seg.sign)) {
                let sigma = (TAU * l.s.unsigned_abs() as f64).ln();
                assert!(sigma < seg.sigma_lo || sigma > seg.sigma_hi);
            }
        }
    }
}
