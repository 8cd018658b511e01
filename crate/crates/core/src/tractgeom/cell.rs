//! Cell images `Q_{u,s} = F⁻¹_u ∘ F⁻¹_s (Q)` and their containment in `Q`.

use num_complex::Complex64;
use serde::Serialize;

use super::budget::GeometryBudget;
use super::distortion::DistortionBound;
use super::squares::SquareSpec;
use crate::error::{Error, Result};
use crate::loglift::MapFamily;

/// Index pair `(u, s)` of the generator `g_{u,s} = F⁻¹_u ∘ F⁻¹_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub u: i64,
    pub s: i64,
}

impl Letter {
    pub fn new(u: i64, s: i64) -> Self {
        Self { u, s }
    }
}

/// `g_{u,s}(z)` and `g'_{u,s}(z)`.
///
/// A first-stage image below `ln R₀` means the square is too close to the
/// tract edge for the chosen radius and is reported as a construction error.
pub fn eval_letter(family: &MapFamily, letter: Letter, z: Complex64) -> Result<(Complex64, Complex64)> {
    let (v, dv) = family.inv_branch(letter.s, z)?;
    let (w, dw) = family.inv_branch(letter.u, v).map_err(|e| match e {
        Error::Domain {
            measured_re,
            threshold,
            ..
        } => Error::Construction(format!(
            "intermediate point F^-1_{}(z) has Re = {measured_re} outside H (ln R0 = {threshold})",
            letter.s
        )),
        other => other,
    })?;
    Ok((w, dw * dv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Inside,
    Outside,
    Borderline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellIndex {
    Explicit(Letter),
    /// `|s| = e^σ / 2π` beyond exact integers; `sign` is the sign of `s`.
    LogDomain { u: i64, sign: i8, sigma: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CellImage {
    pub index: CellIndex,
    pub center: Complex64,
    /// Absolute error bound on `center`; zero for closed-form centers.
    pub center_error: f64,
    /// `ln|g'(R)|`, or its upper bound in log-domain mode.
    pub ln_derivative: f64,
    /// `sup |g(z) - g(R)|` over `Q`, from the distortion bound.
    pub radius_bound: f64,
    /// `sup|g'|·diam Q`.
    pub diameter_bound: f64,
    pub verdict: Option<Verdict>,
}

impl CellImage {
    pub fn log_domain(&self) -> bool {
        matches!(self.index, CellIndex::LogDomain { .. })
    }

    pub fn letter(&self) -> Option<Letter> {
        match self.index {
            CellIndex::Explicit(l) => Some(l),
            CellIndex::LogDomain { .. } => None,
        }
    }

    /// Upper bound on `sup_Q |g'|`.
    pub fn sup_derivative(&self, dist: &DistortionBound) -> f64 {
        dist.upper * self.ln_derivative.exp()
    }
}

/// `diam(Q)·4πC / (R - ln R₀)`, the uniform bound on every cell diameter.
pub fn analytic_diameter_bound(spec: &SquareSpec, ln_r0: f64, c: f64) -> f64 {
    spec.q.diameter() * 4.0 * std::f64::consts::PI * c / (spec.r - ln_r0)
}

pub fn cell_image(
    family: &MapFamily,
    letter: Letter,
    spec: &SquareSpec,
    dist: &DistortionBound,
) -> Result<CellImage> {
    let (center, derivative) = eval_letter(family, letter, spec.center())?;
    let sup = dist.upper * derivative.norm();
    Ok(CellImage {
        index: CellIndex::Explicit(letter),
        center,
        center_error: 0.0,
        ln_derivative: derivative.norm().ln(),
        radius_bound: sup * spec.q.diameter() / 2.0,
        diameter_bound: sup * spec.q.diameter(),
        verdict: None,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Containment {
    pub verdict: Verdict,
    pub fast_path: bool,
    /// Margin actually enforced, `max(δ, sup|g'|·spacing)`.
    pub effective_margin: f64,
    pub samples: usize,
}

/// Decides `Q_{u,s} ⊂ Q` with margin `δ`.
///
/// Centers outside `Q` and cells whose distortion disk clears the boundary
/// are settled without sampling; the rest use Lipschitz-padded samples of
/// `∂Q`. Log-domain cells have no sampled path and are only ever settled
/// by the disk test.
pub fn containment_test(
    family: &MapFamily,
    cell: &CellImage,
    spec: &SquareSpec,
    dist: &DistortionBound,
    budget: &GeometryBudget,
) -> Result<Containment> {
    let q = &spec.q;
    let slack = cell.radius_bound + cell.center_error + budget.margin;
    let depth = q.inner_distance(cell.center);
    if depth < -cell.center_error {
        return Ok(Containment {
            verdict: Verdict::Outside,
            fast_path: true,
            effective_margin: budget.margin,
            samples: 0,
        });
    }
    if depth > slack {
        return Ok(Containment {
            verdict: Verdict::Inside,
            fast_path: true,
            effective_margin: budget.margin,
            samples: 0,
        });
    }
    match cell.letter() {
        Some(letter) => sampled_containment(family, letter, cell, spec, dist, budget.margin, budget.boundary_samples),
        None => Ok(Containment {
            verdict: Verdict::Borderline,
            fast_path: true,
            effective_margin: budget.margin,
            samples: 0,
        }),
    }
}

/// Sampled boundary test without the fast paths.
pub fn sampled_containment(
    family: &MapFamily,
    letter: Letter,
    cell: &CellImage,
    spec: &SquareSpec,
    dist: &DistortionBound,
    margin: f64,
    samples: usize,
) -> Result<Containment> {
    let q = &spec.q;
    let spacing = q.perimeter() / samples as f64;
    let effective = margin.max(cell.sup_derivative(dist) * spacing);
    let half_side = 0.5 * q.width().min(q.height());
    if effective > half_side {
        return Err(Error::Margin(format!(
            "padding {effective} exceeds half the side of Q ({half_side}) for cell {letter:?}"
        )));
    }
    let inner = q.shrink(effective);
    let mut verdict = Verdict::Inside;
    for z in q.boundary_points(samples) {
        let (w, _) = eval_letter(family, letter, z)?;
        if !q.contains(w) {
            verdict = Verdict::Outside;
            break;
        }
        if !inner.contains(w) {
            verdict = Verdict::Borderline;
        }
    }
    Ok(Containment {
        verdict,
        fast_path: false,
        effective_margin: effective,
        samples,
    })
}

/// Shape of a cell measured from boundary samples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CellMeasure {
    /// Largest distance between sampled boundary images.
    pub diameter: f64,
    /// Radius about the center that provably encloses the whole cell.
    pub enclosing_radius: f64,
}

pub fn measure_cell(
    family: &MapFamily,
    cell: &CellImage,
    spec: &SquareSpec,
    dist: &DistortionBound,
    samples: usize,
) -> Result<CellMeasure> {
    let letter = cell
        .letter()
        .ok_or_else(|| Error::Config("log-domain cells cannot be measured pointwise".into()))?;
    let images = spec
        .q
        .boundary_points(samples)
        .into_iter()
        .map(|z| eval_letter(family, letter, z).map(|(w, _)| w))
        .collect::<Result<Vec<_>>>()?;
    let mut diameter = 0.0f64;
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            diameter = diameter.max((a - b).norm());
        }
    }
    let reach = images.iter().map(|w| (w - cell.center).norm()).fold(0.0, f64::max);
    let pad = 0.5 * cell.sup_derivative(dist) * spec.q.perimeter() / samples as f64;
    Ok(CellMeasure {
        diameter,
        enclosing_radius: reach + pad,
    })
}
