//! The iterated function system `{g_{u,s}}` on `Q` and samples of its limit set.

use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loglift::MapFamily;
use crate::tractgeom::{eval_letter, Letter, SquareSpec};

/// `g_{w₁} ∘ … ∘ g_{wₙ}(z)` and its derivative; the last letter acts first.
///
/// Every intermediate image must stay in `Q`, which holds for letters of `G`.
pub fn cylinder_eval(
    family: &MapFamily,
    spec: &SquareSpec,
    word: &[Letter],
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    if word.is_empty() {
        return Err(Error::Config("cylinder words must be nonempty".into()));
    }
    let mut value = z;
    let mut derivative = Complex64::new(1.0, 0.0);
    for (depth, &letter) in word.iter().rev().enumerate() {
        let (v, d) = eval_letter(family, letter, value)?;
        if !spec.q.contains(v) {
            return Err(Error::Invariance(format!(
                "letter {letter:?} at depth {} sends {value} to {v}, outside Q",
                depth + 1
            )));
        }
        value = v;
        derivative *= d;
    }
    Ok((value, derivative))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPoint {
    pub point: Complex64,
    /// Derivative of the expanding inverse `F^{2n}` at the point.
    pub multiplier: Complex64,
    pub iterations: usize,
}

/// Fixed point of a cylinder map by iteration from the center of `Q`.
pub fn cylinder_fixed_point(family: &MapFamily, spec: &SquareSpec, word: &[Letter]) -> Result<FixedPoint> {
    let mut z = spec.center();
    for k in 1..=1000 {
        let (next, _) = cylinder_eval(family, spec, word, z)?;
        let step = (next - z).norm();
        z = next;
        if step < 1e-12 * (1.0 + z.norm()) {
            let (_, derivative) = cylinder_eval(family, spec, word, z)?;
            let multiplier = derivative.inv();
            if !(multiplier.norm() > 1.0) {
                return Err(Error::Numeric(format!(
                    "fixed point of {word:?} is not repelling (|multiplier| = {})",
                    multiplier.norm()
                )));
            }
            return Ok(FixedPoint {
                point: z,
                multiplier,
                iterations: k,
            });
        }
    }
    Err(Error::Numeric(format!("fixed-point iteration for {word:?} did not converge")))
}

/// A point either in Cartesian form or, beyond the `exp` range, as
/// `(ln|z|, arg z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanePoint {
    Cartesian(Complex64),
    LogPolar { ln_modulus: f64, arg: f64 },
}

/// Largest real part whose exponential is safely finite.
const EXP_LIMIT: f64 = 700.0;

impl PlanePoint {
    /// `exp(z) + offset`; the offset is negligible against `e^700` and is
    /// dropped in log-polar form.
    pub fn from_lifted(z: Complex64, offset: Complex64) -> Self {
        if z.re > EXP_LIMIT {
            PlanePoint::LogPolar {
                ln_modulus: z.re,
                arg: z.im.sin().atan2(z.im.cos()),
            }
        } else {
            PlanePoint::Cartesian(z.exp() + offset)
        }
    }

    fn csv_fields(&self) -> (f64, f64, &'static str) {
        match *self {
            PlanePoint::Cartesian(p) => (p.re, p.im, "plane"),
            PlanePoint::LogPolar { ln_modulus, arg } => (ln_modulus, arg, "plane_logpolar"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSample {
    pub alphabet: Vec<Letter>,
    /// Letter indices into `alphabet`, one word per point.
    pub words: Vec<Vec<u32>>,
    pub points: Vec<Complex64>,
    pub depth: usize,
    pub seed: u64,
    /// `exp(z)` and `exp(F(z))` per point, filled by [`project_to_plane`].
    pub plane: Vec<(PlanePoint, PlanePoint)>,
}

impl LimitSample {
    pub fn word(&self, i: usize) -> Vec<Letter> {
        self.words[i].iter().map(|&k| self.alphabet[k as usize]).collect()
    }

    /// Rank of word `i` in lexicographic order over the alphabet.
    pub fn word_rank(&self, i: usize) -> BigUint {
        word_rank(&self.words[i], self.alphabet.len())
    }

    /// Writes `re,im,space,depth,word_rank` rows: the lifted point, then
    /// its plane projection when available.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["re", "im", "space", "depth", "word_rank"])?;
        let depth = self.depth.to_string();
        for (i, z) in self.points.iter().enumerate() {
            let rank = self.word_rank(i).to_string();
            out.write_record([&fmt(z.re), &fmt(z.im), "lifted", &depth, &rank])?;
            if let Some((p, _)) = self.plane.get(i) {
                let (a, b, space) = p.csv_fields();
                out.write_record([&fmt(a), &fmt(b), space, &depth, &rank])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn word_rank(word: &[u32], alphabet: usize) -> BigUint {
    let base = BigUint::from(alphabet);
    word.iter()
        .fold(BigUint::from(0u32), |acc, &k| acc * &base + BigUint::from(k))
}

/// `count` points `g_w(center Q)` for uniformly random words of length
/// `depth`, ordered by word rank.
pub fn sample_limit_set(
    family: &MapFamily,
    spec: &SquareSpec,
    letters: &[Letter],
    depth: usize,
    count: usize,
    seed: u64,
) -> Result<LimitSample> {
    if letters.is_empty() {
        return Err(Error::Construction("cannot sample the limit set of an empty G".into()));
    }
    if depth == 0 {
        return Err(Error::Config("sampling depth must be at least 1".into()));
    }
    let n = letters.len() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<Vec<u32>> = (0..count)
        .map(|_| (0..depth).map(|_| rng.random_range(0..n)).collect())
        .collect();
    words.sort();
    let points = words
        .par_iter()
        .map(|w| {
            let word: Vec<Letter> = w.iter().map(|&k| letters[k as usize]).collect();
            cylinder_eval(family, spec, &word, spec.center()).map(|(p, _)| p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitSample {
        alphabet: letters.to_vec(),
        words,
        points,
        depth,
        seed,
        plane: Vec::new(),
    })
}

/// Every word of length `depth` over `letters`, in rank order.
pub fn exhaustive_sample(
    family: &MapFamily,
    spec: &SquareSpec,
    letters: &[Letter],
    depth: usize,
) -> Result<LimitSample> {
    let n = letters.len();
    let total = n
        .checked_pow(depth as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| Error::Budget(format!("{n}^{depth} words is too many to enumerate")))?;
    let words: Vec<Vec<u32>> = (0..total)
        .map(|mut r| {
            let mut w = vec![0u32; depth];
            for slot in w.iter_mut().rev() {
                *slot = (r % n) as u32;
                r /= n;
            }
            w
        })
        .collect();
    let points = words
        .par_iter()
        .map(|w| {
            let word: Vec<Letter> = w.iter().map(|&k| letters[k as usize]).collect();
            cylinder_eval(family, spec, &word, spec.center()).map(|(p, _)| p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitSample {
        alphabet: letters.to_vec(),
        words,
        points,
        depth,
        seed: 0,
        plane: Vec::new(),
    })
}

/// Fills in `exp(z)` and `exp(F(z))` and checks `f(exp z) = exp(F z)` where
/// both sides are representable.
pub fn project_to_plane(family: &MapFamily, mut sample: LimitSample) -> Result<LimitSample> {
    let offset = family.offset();
    sample.plane = sample
        .points
        .par_iter()
        .map(|&z| {
            let (fz, _) = family.eval_lift(z)?;
            if z.re <= EXP_LIMIT && fz.re <= EXP_LIMIT {
                let lhs = family.plane_map(z.exp());
                let rhs = fz.exp();
                if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
                    return Err(Error::Contract(format!(
                        "f(exp z) and exp(F z) disagree at z = {z}: {lhs} vs {rhs}"
                    )));
                }
            }
            Ok((PlanePoint::from_lifted(z, offset), PlanePoint::from_lifted(fz, offset)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sample)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub checked: usize,
    /// Worst `|F²(z) - g_{w₂…w_d}(center)|` relative to its tolerance.
    pub worst_ratio: f64,
    pub worst_residual: f64,
    /// `diam Q · q^(d-1)` with `q` the largest sampled contraction.
    pub contraction_tail: f64,
}

/// Checks `F²(z)` against the point of the shifted word and recovers both
/// branch indices of the first letter.
pub fn check_invariance(family: &MapFamily, spec: &SquareSpec, sample: &LimitSample) -> Result<InvarianceReport> {
    let q_max = sample
        .alphabet
        .iter()
        .map(|&l| eval_letter(family, l, spec.center()).map(|(_, d)| d.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let tail = spec.q.diameter() * q_max.powi(sample.depth as i32 - 1);
    let results = (0..sample.points.len())
        .into_par_iter()
        .map(|i| {
            let z = sample.points[i];
            let word = sample.word(i);
            let first = word[0];
            let target = if word.len() > 1 {
                cylinder_eval(family, spec, &word[1..], spec.center())?.0
            } else {
                spec.center()
            };
            let offending = |why: String| {
                Error::Invariance(format!("word rank {} ({word:?}): {why}", sample.word_rank(i)))
            };
            let (fz, _) = family.eval_lift(z).map_err(|e| offending(e.to_string()))?;
            let (ffz, _) = family.eval_lift(fz).map_err(|e| offending(e.to_string()))?;
            let (_, g_prime) = eval_letter(family, first, target)?;
            let rounding = 1e-9 * (1.0 + target.norm()) / g_prime.norm();
            let tolerance = tail.max(rounding);
            let residual = (ffz - target).norm();
            if !(residual <= tolerance) {
                return Err(offending(format!("F^2 residual {residual:e} exceeds {tolerance:e}")));
            }
            let u = ((z - family.inv_branch(0, fz)?.0).im / std::f64::consts::TAU).round() as i64;
            let s = ((fz - family.inv_branch(0, ffz)?.0).im / std::f64::consts::TAU).round() as i64;
            if u != first.u || s != first.s {
                return Err(offending(format!("recovered branch ({u}, {s}) differs from the first letter")));
            }
            Ok((residual, residual / tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_residual, worst_ratio) = results
        .iter()
        .fold((0.0f64, 0.0f64), |(a, b), &(r, q)| (a.max(r), b.max(q)));
    Ok(InvarianceReport {
        checked: results.len(),
        worst_ratio,
        worst_residual,
        contraction_tail: tail,
    })
}
