//! Level lines `ℓ_u = F⁻¹_u(ℓ)` of the anchor line `ℓ = {Re = r}` and their
//! pieces inside `Q′`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::squares::{Rect, SquareSpec};
use crate::error::{Error, Result};
use crate::loglift::MapFamily;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelLineOptions {
    /// Target image step as a fraction of `R`.
    pub step_fraction: f64,
    /// Upper limit on the number of traced indices `u`.
    pub max_curves: usize,
    pub max_steps: usize,
}

impl Default for LevelLineOptions {
    fn default() -> Self {
        Self {
            step_fraction: 1.0 / 200.0,
            max_curves: 4096,
            max_steps: 200_000,
        }
    }
}

/// One component of `ℓ_u ∩ Q′` that meets `Q″`.
#[derive(Debug, Clone, Serialize)]
pub struct CurveTrace {
    pub u: i64,
    pub points: Vec<Complex64>,
    pub arclength: f64,
    /// Both ends lie on `∂Q′`.
    pub spans_q_prime: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfRe {
    pub u: i64,
    pub inf_re: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelLineReport {
    /// Real part `r` of the anchor line.
    pub r_line: f64,
    pub traces: Vec<CurveTrace>,
    /// Number of distinct `u` with at least one recorded component.
    pub curve_count: usize,
    /// `floor(R/4π)`.
    pub count_floor: u64,
    pub min_arclength: f64,
    /// `R/4 - D`.
    pub length_floor: f64,
    /// `min_arclength / (R/4 - D)`.
    pub length_ratio: f64,
    pub inf_re: Vec<InfRe>,
    /// `4π ln(r - ln R₀) + c₀`.
    pub inf_re_bound: f64,
    /// Largest `|ℓ_u - ℓ_0 - 2πiu|` over matching samples.
    pub periodicity_defect: f64,
    pub aborted: Vec<String>,
}

impl LevelLineReport {
    pub fn lengths_hold(&self) -> bool {
        self.traces.iter().all(|t| t.arclength >= self.length_floor)
    }

    pub fn count_holds(&self) -> bool {
        self.curve_count as u64 >= self.count_floor
    }
}

/// Samples `ℓ_0` from `y = 0` in direction `dir` until it passes the right
/// edge of `Q`, keeping image steps near `h`. Returns the `y` values.
fn trace_half(
    family: &MapFamily,
    r: f64,
    dir: f64,
    h: f64,
    x_stop: f64,
    max_steps: usize,
) -> Result<Vec<f64>> {
    let mut ys = vec![0.0];
    let (mut p, mut dp) = family.inv_branch(0, Complex64::new(r, 0.0))?;
    for _ in 0..max_steps {
        if p.re > x_stop {
            return Ok(ys);
        }
        let y = *ys.last().expect("nonempty");
        let mut dy = h / dp.norm().max(f64::MIN_POSITIVE);
        let mut accepted = None;
        for _ in 0..60 {
            let next = y + dir * dy;
            if !next.is_finite() {
                break;
            }
            let (q, dq) = family.inv_branch(0, Complex64::new(r, next))?;
            if (q - p).norm() <= 2.0 * h {
                accepted = Some((next, q, dq));
                break;
            }
            dy *= 0.5;
        }
        let Some((next, q, dq)) = accepted else {
            return Err(Error::Numeric(format!(
                "continuation stalled at y = {y:e} (Re = {})",
                p.re
            )));
        };
        ys.push(next);
        p = q;
        dp = dq;
    }
    Err(Error::Numeric(format!(
        "continuation did not leave Q within {max_steps} steps (last Re = {})",
        p.re
    )))
}

/// Liang-Barsky clip of segment `a -> b` to `rect`; returns parameters.
fn clip(a: Complex64, b: Complex64, rect: &Rect) -> Option<(f64, f64)> {
    let d = b - a;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-d.re, a.re - rect.x0),
        (d.re, rect.x1 - a.re),
        (-d.im, a.im - rect.y0),
        (d.im, rect.y1 - a.im),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Components of a polyline inside `rect`, each with the flag "starts and ends
/// on the boundary".
fn components(points: &[Complex64], rect: &Rect) -> Vec<(Vec<Complex64>, bool)> {
    let mut out = Vec::new();
    let mut current: Vec<Complex64> = Vec::new();
    let mut starts_on_edge = false;
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        match clip(a, b, rect) {
            Some((t0, t1)) => {
                let pa = a + (b - a) * t0;
                let pb = a + (b - a) * t1;
                if current.is_empty() {
                    starts_on_edge = t0 > 0.0;
                    current.push(pa);
                }
                current.push(pb);
                if t1 < 1.0 {
                    out.push((std::mem::take(&mut current), starts_on_edge));
                }
            }
            None => {
                if !current.is_empty() {
                    out.push((std::mem::take(&mut current), false));
                }
            }
        }
    }
    if !current.is_empty() {
        out.push((current, false));
    }
    out
}

fn meets(points: &[Complex64], rect: &Rect) -> bool {
    points.iter().any(|&p| rect.contains(p))
        || points.windows(2).any(|w| clip(w[0], w[1], rect).is_some())
}

fn arclength(points: &[Complex64]) -> f64 {
    crate::numeric::compensated_sum(points.windows(2).map(|w| (w[1] - w[0]).norm()))
}

pub fn trace_level_lines(
    family: &MapFamily,
    spec: &SquareSpec,
    options: &LevelLineOptions,
) -> Result<LevelLineReport> {
    let r_line = family.inv_branch(0, Complex64::new(spec.r, 0.0))?.0.re;
    let h = spec.r * options.step_fraction;
    let x_stop = spec.q.x1 + 2.0 * h;
    let mut aborted = Vec::new();

    // one set of y samples, reused for every u
    let mut ys: Vec<f64> = Vec::new();
    for dir in [-1.0, 1.0] {
        match trace_half(family, r_line, dir, h, x_stop, options.max_steps) {
            Ok(mut half) => {
                if dir < 0.0 {
                    half.reverse();
                    ys.extend(half);
                } else {
                    ys.extend(half.into_iter().skip(1));
                }
            }
            Err(e) => aborted.push(format!("direction {dir}: {e}")),
        }
    }
    let base = ys
        .iter()
        .map(|&y| family.inv_branch(0, Complex64::new(r_line, y)).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    let (im_min, im_max) = base
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.im), hi.max(p.im)));

    let q2 = spec.q_second;
    let mut u_values: Vec<i64> = if base.is_empty() {
        Vec::new()
    } else {
        let u_lo = ((q2.y0 - im_max) / TAU).ceil() as i64;
        let u_hi = ((q2.y1 - im_min) / TAU).floor() as i64;
        (u_lo..=u_hi).collect()
    };
    // nearest indices first when capped
    u_values.sort_by_key(|u| (u.abs(), *u));
    u_values.truncate(options.max_curves);
    u_values.sort();

    let mut traces = Vec::new();
    let mut inf_re = Vec::new();
    let mut defect = 0.0f64;
    for &u in &u_values {
        let shift = Complex64::new(0.0, TAU * u as f64);
        let mut pts = Vec::with_capacity(ys.len());
        for (&y, &b) in ys.iter().zip(&base) {
            let (p, _) = family.inv_branch(u, Complex64::new(r_line, y))?;
            defect = defect.max((p - b - shift).norm());
            pts.push(p);
        }
        inf_re.push(InfRe {
            u,
            inf_re: pts.iter().map(|p| p.re).fold(f64::INFINITY, f64::min),
        });
        for (component, spans) in components(&pts, &spec.q_prime) {
            if meets(&component, &q2) {
                traces.push(CurveTrace {
                    u,
                    arclength: arclength(&component),
                    points: component,
                    spans_q_prime: spans,
                });
            }
        }
    }
    let mut counted: Vec<i64> = traces.iter().map(|t| t.u).collect();
    counted.dedup();
    let length_floor = spec.r / 4.0 - spec.d;
    let min_arclength = traces.iter().map(|t| t.arclength).fold(f64::INFINITY, f64::min);
    let ln_r0 = family.ln_r0();
    let c0 = family.inv_branch(0, Complex64::new(1.0 + ln_r0, 0.0))?.0.re;
    Ok(LevelLineReport {
        r_line,
        curve_count: counted.len(),
        count_floor: (spec.r / (4.0 * PI)).floor() as u64,
        min_arclength,
        length_floor,
        length_ratio: min_arclength / length_floor,
        inf_re,
        inf_re_bound: 4.0 * PI * (r_line - ln_r0).ln() + c0,
        periodicity_defect: defect,
        aborted,
        traces,
    })
}
