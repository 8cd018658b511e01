//! Two-sided level-1 pressure bounds, Bowen roots and the dimension certificate.
//!
//! For a letter with `|g'(R)| = w` the distortion bound gives
//! `lower·w ≤ |g'| ≤ upper·w` on `Q`. Summing `(lower·w)^t` and
//! `(upper·w)^t` brackets the level-1 sum; its logarithm brackets the
//! pressure of the system.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loglift::MapFamily;
use crate::numeric::{ln_rel_expm1, log_add_exp, log_sum_exp, SUMMATION_SCHEDULE};
use crate::tractgeom::{
    anchor_line, build_G, build_squares, cell_image, distortion_constant, radius_margins, BuildOptions,
    DistortionBound, DistortionMode, GSet, GeometryBudget, Letter, SquareSpec, TailGeometry, TailSegment,
};

/// `[ln inf_Q |g'|, ln sup_Q |g'|]` of one letter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LetterWeight {
    pub ln_inf: f64,
    pub ln_sup: f64,
}

/// Integral sandwich for the indices `n` of one tail segment.
///
/// Each weight satisfies `k_lo/(2πn + κ₂) ≤ |g'| ≤ k_hi/(2πn - κ₁)` on `Q`;
/// both bounds decrease in `n`, so after `τ = ln(2πn ± κ)`:
///
/// * `Σ ≥ k_lo^t/2π · ∫_{τ₁}^{τ₂} e^{(1-t)τ} dτ`
/// * `Σ ≤ k_hi^t · (e^{-tτ₃} + 1/2π · ∫_{τ₃}^{τ₄} e^{(1-t)τ} dτ)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTerm {
    pub ln_k_lo: f64,
    pub ln_k_hi: f64,
    /// `None` when the shifted lower range is empty.
    pub lower: Option<(f64, f64)>,
    pub upper: (f64, f64),
}

impl TailTerm {
    pub fn new(geometry: &TailGeometry, dist: &DistortionBound, segment: &TailSegment) -> Self {
        let (a, b) = (segment.sigma_lo, segment.sigma_hi);
        let floor = a.exp() - geometry.kappa_lo;
        let rel = geometry.derivative_error / floor;
        let ln_k_lo = dist.lower.ln() + geometry.ln_d0 + (-rel).ln_1p();
        let ln_k_hi = dist.upper.ln() + geometry.ln_d0 + rel.ln_1p();
        let shift = |sigma: f64, k: f64| sigma + (k * (-sigma).exp()).ln_1p();
        let t1 = shift(a, TAU + geometry.kappa_hi);
        let t2 = shift(b, geometry.kappa_hi);
        let t3 = shift(a, -geometry.kappa_lo);
        let t4 = shift(b, -geometry.kappa_lo);
        TailTerm {
            ln_k_lo,
            ln_k_hi,
            lower: (t1 < t2).then_some((t1, t2)),
            upper: (t3, t4),
        }
    }

    fn ln_lo(&self, t: f64) -> f64 {
        match self.lower {
            Some((t1, t2)) => t * self.ln_k_lo - TAU.ln() + ln_integral(t, t1, t2),
            None => f64::NEG_INFINITY,
        }
    }

    fn ln_hi(&self, t: f64) -> f64 {
        let (t3, t4) = self.upper;
        t * self.ln_k_hi + log_add_exp(-t * t3, -TAU.ln() + ln_integral(t, t3, t4))
    }
}

/// `ln ∫_{a}^{b} e^{(1-t)τ} dτ` for `a ≤ b`.
fn ln_integral(t: f64, a: f64, b: f64) -> f64 {
    let width = b - a;
    if width <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let k = 1.0 - t;
    k * a + width.ln() + ln_rel_expm1(k * width)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedSystem {
    pub letters: Vec<LetterWeight>,
    pub tails: Vec<TailTerm>,
    /// Distortion constant behind the letter bounds.
    pub c: f64,
}

impl WeightedSystem {
    /// Exact similarities `z ↦ r·z + b`; no distortion.
    pub fn similarities(ratios: &[f64]) -> Self {
        Self {
            letters: ratios
                .iter()
                .map(|r| LetterWeight {
                    ln_inf: r.ln(),
                    ln_sup: r.ln(),
                })
                .collect(),
            tails: Vec::new(),
            c: 1.0,
        }
    }

    pub fn from_letters(
        family: &MapFamily,
        spec: &SquareSpec,
        dist: &DistortionBound,
        letters: &[Letter],
    ) -> Result<Self> {
        let (ln_lower, ln_upper) = (dist.lower.ln(), dist.upper.ln());
        let letters = letters
            .iter()
            .map(|&l| {
                let cell = cell_image(family, l, spec, dist)?;
                let w = LetterWeight {
                    ln_inf: ln_lower + cell.ln_derivative,
                    ln_sup: ln_upper + cell.ln_derivative,
                };
                if !(w.ln_sup < 0.0) {
                    return Err(Error::Numeric(format!("letter {l:?} is not a contraction on Q")));
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            letters,
            tails: Vec::new(),
            c: dist.c,
        })
    }

    pub fn from_gset(family: &MapFamily, spec: &SquareSpec, dist: &DistortionBound, g: &GSet) -> Result<Self> {
        let mut system = Self::from_letters(family, spec, dist, &g.pairs)?;
        if !g.segments.is_empty() {
            let geometry = TailGeometry::new(family, spec.r)?;
            system.tails = g.segments.iter().map(|s| TailTerm::new(&geometry, dist, s)).collect();
        }
        Ok(system)
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty() && self.tails.is_empty()
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shift = factor.ln();
        let mut out = self.clone();
        for l in &mut out.letters {
            l.ln_inf += shift;
            l.ln_sup += shift;
        }
        for t in &mut out.tails {
            t.ln_k_lo += shift;
            t.ln_k_hi += shift;
        }
        out
    }
}

/// `[ln Σ_lo, ln Σ_hi]`; `-∞` encodes an empty sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSum {
    pub ln_lo: f64,
    pub ln_hi: f64,
}

impl LevelSum {
    pub fn lo(&self) -> f64 {
        self.ln_lo.exp()
    }

    pub fn hi(&self) -> f64 {
        self.ln_hi.exp()
    }
}

pub fn level1_sum(system: &WeightedSystem, t: f64) -> Result<LevelSum> {
    if !(0.0..=4.0).contains(&t) {
        return Err(Error::Config(format!("t = {t} is outside [0, 4]")));
    }
    let lo: Vec<f64> = system
        .letters
        .iter()
        .map(|w| t * w.ln_inf)
        .chain(system.tails.iter().map(|term| term.ln_lo(t)))
        .collect();
    let hi: Vec<f64> = system
        .letters
        .iter()
        .map(|w| t * w.ln_sup)
        .chain(system.tails.iter().map(|term| term.ln_hi(t)))
        .collect();
    Ok(LevelSum {
        ln_lo: log_sum_exp(&lo),
        ln_hi: log_sum_exp(&hi),
    })
}

/// `[P_lo(t), P_hi(t)] = [ln Σ_lo, ln Σ_hi]`.
pub fn pressure_bounds(system: &WeightedSystem, t: f64) -> Result<(f64, f64)> {
    let s = level1_sum(system, t)?;
    Ok((s.ln_lo, s.ln_hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BowenInterval {
    /// Largest bracket point with `P_lo > 0`; the root of `P_lo` is at least this.
    pub t_lo: f64,
    /// Smallest bracket point with `P_hi ≤ 0`; the root of `P_hi` is at most this.
    pub t_hi: f64,
    pub lo_capped: bool,
    pub hi_capped: bool,
    pub tol: f64,
}

const T_MAX: f64 = 4.0;

fn root(p: impl Fn(f64) -> Result<f64>, tol: f64) -> Result<(f64, f64, bool)> {
    if p(0.0)? <= 0.0 {
        return Ok((0.0, 0.0, false));
    }
    if p(T_MAX)? > 0.0 {
        return Ok((T_MAX, T_MAX, true));
    }
    let (mut a, mut b) = (0.0, T_MAX);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if p(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b, false))
}

pub fn bowen_root(system: &WeightedSystem, tol: f64) -> Result<BowenInterval> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("bisection tolerance must be positive, got {tol}")));
    }
    let (lo_a, _, lo_capped) = root(|t| Ok(level1_sum(system, t)?.ln_lo), tol)?;
    let (_, hi_b, hi_capped) = root(|t| Ok(level1_sum(system, t)?.ln_hi), tol)?;
    Ok(BowenInterval {
        t_lo: lo_a,
        t_hi: hi_b,
        lo_capped,
        hi_capped,
        tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PressureReport {
    pub t_grid: Vec<f64>,
    pub p_lo: Vec<f64>,
    pub p_hi: Vec<f64>,
    pub letters: usize,
    pub tail_terms: usize,
    pub strictly_decreasing: bool,
    pub summation_schedule: &'static str,
}

pub fn pressure_report(system: &WeightedSystem, t_grid: &[f64]) -> Result<PressureReport> {
    let mut p_lo = Vec::with_capacity(t_grid.len());
    let mut p_hi = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (lo, hi) = pressure_bounds(system, t)?;
        p_lo.push(lo);
        p_hi.push(hi);
    }
    let strictly = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Ok(PressureReport {
        t_grid: t_grid.to_vec(),
        strictly_decreasing: strictly(&p_lo) && strictly(&p_hi),
        p_lo,
        p_hi,
        letters: system.letters.len(),
        tail_terms: system.tails.len(),
        summation_schedule: SUMMATION_SCHEDULE,
    })
}

/// `t = 0.5, 0.55, …, 1.5`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=20).map(|k| 0.5 + 0.05 * k as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyConfig {
    pub r: f64,
    pub epsilon: f64,
    pub d: f64,
    pub margin: f64,
    pub boundary_samples: usize,
    pub distortion: DistortionMode,
    pub subdivisions: usize,
    pub build: BuildOptions,
    pub bisection_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    NotCertified,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateConstants {
    pub c0: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "C1_empirical")]
    pub c1_empirical: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionCertificate {
    pub family: String,
    pub lambda: Option<[f64; 2]>,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub epsilon: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub mode: crate::tractgeom::GMode,
    pub distortion: DistortionMode,
    pub distortion_lower: f64,
    pub distortion_upper: f64,
    pub explicit_letters: usize,
    pub tail_segments: usize,
    pub truncated: bool,
    pub sigma_sum_t1_lo: f64,
    pub sigma_sum_t1_hi: f64,
    #[serde(rename = "P1_lo")]
    pub p1_lo: f64,
    #[serde(rename = "P1_hi")]
    pub p1_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub bisection_tol: f64,
    pub verdict: Verdict,
    /// Why the verdict is negative.
    pub reason: Option<String>,
    pub derivative_margin: f64,
    pub depth_margin: f64,
    pub runtime_ms: Option<u64>,
    pub summation_schedule: &'static str,
    pub constants: CertificateConstants,
}

/// Builds `G` at the configured radius and certifies `dim > 1` when the
/// lower pressure bound at `t = 1` is positive and the lower Bowen bound
/// exceeds one.
pub fn certify_dim_gt_one(family: &MapFamily, config: &CertifyConfig) -> Result<DimensionCertificate> {
    let spec = build_squares(config.r, config.d)?;
    let dist = distortion_constant(
        config.r,
        family.univalence_abscissa(),
        config.distortion,
        config.subdivisions,
    )?;
    let budget = GeometryBudget::new(config.epsilon, config.d, config.margin, config.boundary_samples)?;
    let margins = radius_margins(family, &budget, config.r)?;
    let anchor = anchor_line(family, config.r, config.d, 0..=0)?;

    let mut reason = None;
    let g = match build_G(family, &spec, &dist, &budget, &config.build) {
        Ok(g) => Some(g),
        Err(e @ (Error::Margin(_) | Error::Construction(_))) => {
            reason = Some(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let (sum1, bowen, letters, segments, truncated) = match &g {
        Some(g) if !g.is_empty() => {
            let system = WeightedSystem::from_gset(family, &spec, &dist, g)?;
            (
                level1_sum(&system, 1.0)?,
                bowen_root(&system, config.bisection_tol)?,
                g.pairs.len(),
                g.segments.len(),
                g.truncated,
            )
        }
        other => {
            if other.is_some() {
                reason = Some("G is empty at this radius".into());
            }
            (
                LevelSum {
                    ln_lo: f64::NEG_INFINITY,
                    ln_hi: f64::NEG_INFINITY,
                },
                BowenInterval {
                    t_lo: 0.0,
                    t_hi: 0.0,
                    lo_capped: false,
                    hi_capped: false,
                    tol: config.bisection_tol,
                },
                0,
                0,
                false,
            )
        }
    };
    let certified = reason.is_none() && sum1.ln_lo > 0.0 && bowen.t_lo > 1.0;
    if reason.is_none() && !certified {
        reason = Some(if sum1.ln_lo <= 0.0 {
            format!(
                "P_lo(1) = {:.6} <= 0: lower sum {:.6} with C = {:.4} does not exceed 1",
                sum1.ln_lo,
                sum1.lo(),
                dist.c
            )
        } else {
            format!("t_lo = {} does not exceed 1 at tolerance {}", bowen.t_lo, bowen.tol)
        });
    }
    Ok(DimensionCertificate {
        family: family.name().to_string(),
        lambda: family.lambda().map(|l| [l.re, l.im]),
        r0: family.r0(),
        r: config.r,
        epsilon: config.epsilon,
        d: config.d,
        c: dist.c,
        mode: config.build.mode,
        distortion: config.distortion,
        distortion_lower: dist.lower,
        distortion_upper: dist.upper,
        explicit_letters: letters,
        tail_segments: segments,
        truncated,
        sigma_sum_t1_lo: sum1.lo(),
        sigma_sum_t1_hi: sum1.hi(),
        p1_lo: sum1.ln_lo,
        p1_hi: sum1.ln_hi,
        t_lo: bowen.t_lo,
        t_hi: bowen.t_hi,
        bisection_tol: bowen.tol,
        verdict: if certified {
            Verdict::Certified
        } else {
            Verdict::NotCertified
        },
        reason,
        derivative_margin: margins.derivative,
        depth_margin: margins.depth,
        runtime_ms: None,
        summation_schedule: SUMMATION_SCHEDULE,
        constants: CertificateConstants {
            c0: anchor.c0,
            a: 4.0 * PI,
            b: anchor.c0,
            c1_empirical: sum1.lo() / config.r.powf(1.0 - config.epsilon),
        },
    })
}
