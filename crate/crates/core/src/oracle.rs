//! Brute-force cross-checks kept apart from the main pipeline.
//!
//! The exponential-family maps here are evaluated with their own logarithm
//! (`hypot`/`atan2`) and their own boundary sampling, so a bug in the
//! pipeline's evaluation path cannot hide itself.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::io::Read;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loglift::{FamilyKind, MapFamily};
use crate::numeric::{least_squares_slope, log_sum_exp};
use crate::tractgeom::{DistortionBound, Letter, SquareSpec, Verdict};

fn clog(z: Complex64) -> Complex64 {
    Complex64::new(z.re.hypot(z.im).ln(), z.im.atan2(z.re))
}

/// `log(1 + w)` accurate for tiny `w`.
fn clog1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.re * w.re + w.im * w.im).ln_1p();
    Complex64::new(re, w.im.atan2(1.0 + w.re))
}

fn recip(z: Complex64) -> Complex64 {
    let n = z.re * z.re + z.im * z.im;
    Complex64::new(z.re / n, -z.im / n)
}

/// Composite branches `g_{u,s}`, evaluated independently for `λ·e^z` and
/// through the family callbacks otherwise.
#[derive(Debug, Clone)]
pub struct OracleMaps {
    family: MapFamily,
    log_lambda: Option<Complex64>,
}

impl OracleMaps {
    pub fn new(family: &MapFamily) -> Self {
        let log_lambda = match family.kind() {
            FamilyKind::Exponential { lambda } => Some(clog(*lambda)),
            FamilyKind::User(_) => None,
        };
        Self {
            family: family.clone(),
            log_lambda,
        }
    }

    fn branch(&self, s: i64, z: Complex64) -> Result<(Complex64, Complex64)> {
        match self.log_lambda {
            Some(l) => {
                let w = z - l;
                Ok((clog(w) + Complex64::new(0.0, TAU * s as f64), recip(w)))
            }
            None => self.family.inv_branch(s, z),
        }
    }

    pub fn letter(&self, letter: Letter, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (v, dv) = self.branch(letter.s, z)?;
        let (w, dw) = self.branch(letter.u, v)?;
        Ok((w, dw * dv))
    }

    pub fn word(&self, word: &[Letter], z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut value = z;
        let mut derivative = Complex64::new(1.0, 0.0);
        for &l in word.iter().rev() {
            let (v, d) = self.letter(l, value)?;
            value = v;
            derivative *= d;
        }
        Ok((value, derivative))
    }
}

/// A map with a closed-form derivative for [`fd_derivative_check`].
pub trait DifferenceOp: Sync {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)>;

    /// `f(z + h) - f(z - h)`.
    fn difference(&self, z: Complex64, h: Complex64) -> Result<Complex64> {
        Ok(self.eval(z + h)?.0 - self.eval(z - h)?.0)
    }
}

/// Worst relative error of the derivative against central differences with
/// step `rel_step·|z|` along the real axis.
pub fn fd_derivative_check(op: &dyn DifferenceOp, samples: &[Complex64], rel_step: f64) -> Result<f64> {
    let errors = samples
        .par_iter()
        .map(|&z| {
            let h = Complex64::new(rel_step * z.norm().max(1.0), 0.0);
            let (_, d) = op.eval(z)?;
            let fd = op.difference(z, h)? / (2.0 * h);
            let err = (fd - d).norm();
            Ok(if d.norm() > 0.0 { err / d.norm() } else { err })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// `F⁻¹_s` obtained by Newton's method on `F(w) = ζ`.
pub struct NewtonInverse<'a> {
    pub family: &'a MapFamily,
    pub s: i64,
}

impl NewtonInverse<'_> {
    pub fn solve(&self, zeta: Complex64) -> Result<Complex64> {
        let mut w = Complex64::new((1.0 + zeta.norm()).ln(), TAU * self.s as f64);
        for _ in 0..200 {
            let (f, df) = self.family.lift_unchecked(w);
            let step = (f - zeta) / df;
            w -= step;
            if step.norm() <= 1e-15 * (1.0 + w.norm()) {
                // pick the preimage in the strip of branch s
                let k = ((w.im - TAU * self.s as f64) / TAU).round();
                return Ok(w - Complex64::new(0.0, TAU * k));
            }
        }
        Err(Error::Numeric(format!("Newton inversion of F did not converge at {zeta}")))
    }
}

impl DifferenceOp for NewtonInverse<'_> {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let w = self.solve(z)?;
        let (_, df) = self.family.lift_unchecked(w);
        Ok((w, df.inv()))
    }
}

/// Cylinder map of the exponential family whose differences are propagated
/// through `D' = log1p(D / (b - log λ))`, keeping depth-3 differences far
/// above the rounding level of the values.
pub struct ExpCylinder {
    maps: OracleMaps,
    word: Vec<Letter>,
}

impl ExpCylinder {
    pub fn new(family: &MapFamily, word: &[Letter]) -> Result<Self> {
        let maps = OracleMaps::new(family);
        if maps.log_lambda.is_none() {
            return Err(Error::Config("difference propagation needs the exponential family".into()));
        }
        Ok(Self {
            maps,
            word: word.to_vec(),
        })
    }
}

impl DifferenceOp for ExpCylinder {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.maps.word(&self.word, z)
    }

    fn difference(&self, z: Complex64, h: Complex64) -> Result<Complex64> {
        let l = self.maps.log_lambda.expect("checked in new");
        let mut base = z - h;
        let mut diff = 2.0 * h;
        for letter in self.word.iter().rev() {
            for index in [letter.s, letter.u] {
                diff = clog1p(diff * recip(base - l));
                base = clog(base - l) + Complex64::new(0.0, TAU * index as f64);
            }
        }
        Ok(diff)
    }
}

/// Any closure with a derivative.
pub struct FnOp<F>(pub F);

impl<F> DifferenceOp for FnOp<F>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)> + Sync,
{
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        (self.0)(z)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxCountEstimate {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub residual: f64,
}

/// Diagonal of the bounding box.
pub fn cloud_diameter(points: &[Complex64]) -> f64 {
    let (x0, x1, y0, y1) = bounding_box(points);
    (x1 - x0).hypot(y1 - y0)
}

fn bounding_box(points: &[Complex64]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(x0, x1, y0, y1), p| (x0.min(p.re), x1.max(p.re), y0.min(p.im), y1.max(p.im)),
    )
}

/// Box-counting dimension with a grid anchored at the lower-left corner of
/// the bounding box.
pub fn box_counting_dim(points: &[Complex64], scales: &[f64]) -> Result<BoxCountEstimate> {
    if points.len() < 10_000 {
        return Err(Error::Config(format!("box counting needs 1e4 points, got {}", points.len())));
    }
    if scales.len() < 5 {
        return Err(Error::Config("box counting needs at least five scales".into()));
    }
    let (x0, x1, y0, y1) = bounding_box(points);
    let diameter = (x1 - x0).hypot(y1 - y0);
    if !(diameter > 0.0) {
        return Err(Error::Config("point cloud is degenerate (diameter 0)".into()));
    }
    let (smin, smax) = scales
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    if !(smin > 0.0) || smax / smin < 100.0 {
        return Err(Error::Config("scales must be positive and span two decades".into()));
    }
    let counts: Vec<usize> = scales
        .par_iter()
        .map(|&eps| {
            points
                .iter()
                .map(|p| (((p.re - x0) / eps).floor() as i64, ((p.im - y0) / eps).floor() as i64))
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();
    let x: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, residual) = least_squares_slope(&x, &y);
    Ok(BoxCountEstimate {
        scales: scales.to_vec(),
        counts,
        slope,
        residual,
    })
}

/// `n` scales log-spaced from `hi` down to `lo`.
pub fn log_scales(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (hi.ln() + (lo.ln() - hi.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Log-spaced scales from `hi` down to `lo` with `per_decade` scales per decade.
pub fn decade_scales(hi: f64, lo: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize + 1;
    log_scales(hi, lo, n.max(2))
}

/// Midpoints of random depth-`depth` intervals of the middle-thirds set.
pub fn middle_thirds(depth: usize, count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x = 0.0;
            let mut scale = 1.0;
            for _ in 0..depth {
                scale /= 3.0;
                if rng.random_bool(0.5) {
                    x += 2.0 * scale;
                }
            }
            Complex64::new(x + 0.5 * scale, 0.0)
        })
        .collect()
}

/// Points of one `space` from a CSV written by [`crate::ifs::LimitSample::write_csv`].
pub fn read_points_csv<R: Read>(reader: R, space: &str) -> Result<Vec<Complex64>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("point CSV lacks a '{name}' column")))
    };
    let (re, im, sp) = (col("re")?, col("im")?, col("space")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if &record[sp] != space {
            continue;
        }
        let parse = |i: usize| {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number '{}': {e}", &record[i])))
        };
        out.push(Complex64::new(parse(re)?, parse(im)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BrutePressure {
    pub n: usize,
    pub t: f64,
    /// `(1/n) ln Σ_w |(g_w)'(center Q)|^t`.
    pub value: f64,
    /// `t·ln C`, the per-level distortion slack between the center and `sup_Q`.
    pub slack: f64,
}

const WORD_BUDGET: usize = 1_000_000;

fn words(alphabet: usize, n: usize) -> Result<usize> {
    alphabet
        .checked_pow(n as u32)
        .filter(|&w| w <= WORD_BUDGET)
        .ok_or_else(|| Error::Budget(format!("{alphabet}^{n} words exceed the brute-force budget")))
}

fn digits(mut r: usize, base: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for slot in d.iter_mut().rev() {
        *slot = r % base;
        r /= base;
    }
    d
}

/// Level-`n` pressure by enumerating every word.
pub fn brute_force_pressure(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    letters: &[Letter],
    n: usize,
    t: f64,
) -> Result<BrutePressure> {
    if letters.is_empty() || n == 0 {
        return Err(Error::Config("brute-force pressure needs letters and n >= 1".into()));
    }
    let total = words(letters.len(), n)?;
    let maps = OracleMaps::new(family);
    let logs = (0..total)
        .into_par_iter()
        .map(|r| {
            let word: Vec<Letter> = digits(r, letters.len(), n).into_iter().map(|k| letters[k]).collect();
            maps.word(&word, spec.center()).map(|(_, d)| t * d.norm().ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(BrutePressure {
        n,
        t,
        value: log_sum_exp(&logs) / n as f64,
        slack: t * dist.c.ln(),
    })
}

/// Level-`n` pressure of a similarity system.
pub fn brute_force_pressure_similarities(ratios: &[f64], n: usize, t: f64) -> Result<BrutePressure> {
    if ratios.is_empty() || n == 0 {
        return Err(Error::Config("brute-force pressure needs letters and n >= 1".into()));
    }
    let total = words(ratios.len(), n)?;
    let logs: Vec<f64> = (0..total)
        .map(|r| {
            digits(r, ratios.len(), n)
                .into_iter()
                .map(|k| t * ratios[k].ln())
                .sum()
        })
        .collect();
    Ok(BrutePressure {
        n,
        t,
        value: log_sum_exp(&logs) / n as f64,
        slack: 0.0,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Recheck {
    pub letter: Letter,
    pub verdict: Verdict,
    pub samples: usize,
    pub padding: f64,
}

/// Dense boundary recheck of `Q_{u,s} ⊂ Q` without any fast path.
///
/// Each side of `Q` carries `ceil(k·base/4)` points including its first
/// corner, and the padding is `max(δ, upper·|g'(R)|·spacing)`.
pub fn containment_recheck(
    family: &MapFamily,
    spec: &SquareSpec,
    dist: &DistortionBound,
    letter: Letter,
    margin: f64,
    base_samples: usize,
    density: usize,
) -> Result<Recheck> {
    let maps = OracleMaps::new(family);
    let q = spec.q;
    let per_side = (base_samples * density).div_ceil(4).max(1);
    let side = q.x1 - q.x0;
    let spacing = side / per_side as f64;
    let (_, d_center) = maps.letter(letter, Complex64::new(spec.r, 0.0))?;
    let padding = margin.max(dist.upper * d_center.norm() * spacing);
    let corners = [
        (Complex64::new(q.x0, q.y0), Complex64::new(1.0, 0.0)),
        (Complex64::new(q.x1, q.y0), Complex64::new(0.0, 1.0)),
        (Complex64::new(q.x1, q.y1), Complex64::new(-1.0, 0.0)),
        (Complex64::new(q.x0, q.y1), Complex64::new(0.0, -1.0)),
    ];
    let mut verdict = Verdict::Inside;
    'sides: for (start, dir) in corners {
        for k in 0..per_side {
            let z = start + dir * (spacing * k as f64);
            let (w, _) = maps.letter(letter, z)?;
            let inside_q = w.re >= q.x0 && w.re <= q.x1 && w.im >= q.y0 && w.im <= q.y1;
            if !inside_q {
                verdict = Verdict::Outside;
                break 'sides;
            }
            let clear = (w.re - q.x0)
                .min(q.x1 - w.re)
                .min(w.im - q.y0)
                .min(q.y1 - w.im);
            if clear < padding {
                verdict = Verdict::Borderline;
            }
        }
    }
    Ok(Recheck {
        letter,
        verdict,
        samples: 4 * per_side,
        padding,
    })
}
