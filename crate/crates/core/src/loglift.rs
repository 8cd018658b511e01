//! Map families with a logarithmic tract and their logarithmic lifts.
//!
//! A family bundles the plane map `f`, the lift `F` with `exp(F(w)) = f(exp(w))`
//! on the lifted tracts `L_s`, and the inverse branches `F⁻¹_s : H̄ → L̄_s`
//! where `H = {Re ζ > ln R₀}`. Branches differ by `2πis`.

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A holomorphic map of one complex variable.
pub type MapFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
/// A holomorphic map returning `(value, derivative)`.
pub type MapWithDerivative = Arc<dyn Fn(Complex64) -> (Complex64, Complex64) + Send + Sync>;

/// Closed-form large-`|Im ζ|` behaviour of `F⁻¹₀`.
///
/// The family certifies that whenever `|ζ - log_shift| >= exp(validity_sigma)`:
///
/// * `|F⁻¹₀(ζ) - Log(ζ - log_shift)| <= value_error / |ζ - log_shift|`
/// * `|(F⁻¹₀)'(ζ)·(ζ - log_shift) - 1| <= derivative_error / |ζ - log_shift|`
///
/// For `λ·e^z` both errors vanish and `log_shift = log λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailAsymptotics {
    pub log_shift: Complex64,
    pub value_error: f64,
    pub derivative_error: f64,
    pub validity_sigma: f64,
}

#[derive(Clone)]
pub struct UserMaps {
    label: String,
    plane_map: MapFn,
    lift: MapWithDerivative,
    inverse0: MapWithDerivative,
}

impl fmt::Debug for UserMaps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserMaps").field("label", &self.label).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// `f(z) = λ·e^z`.
    Exponential { lambda: Complex64 },
    /// Caller-supplied callbacks honouring the same contracts.
    User(UserMaps),
}

/// A map with a logarithmic tract in working coordinates.
///
/// Working coordinates differ from plane coordinates by `offset`:
/// a working point `x` sits at `x + offset` in the plane.
#[derive(Debug, Clone)]
pub struct MapFamily {
    kind: FamilyKind,
    r0: f64,
    offset: Complex64,
    tail: Option<TailAsymptotics>,
    univalence_abscissa: Option<f64>,
}

impl MapFamily {
    /// `λ·e^z` with tract `{Re z > ln(R₀/|λ|)}`. Not normalized; see [`normalize_family`].
    pub fn exponential(lambda: Complex64, r0: f64) -> Self {
        Self {
            kind: FamilyKind::Exponential { lambda },
            r0,
            offset: Complex64::new(0.0, 0.0),
            tail: Some(TailAsymptotics {
                log_shift: lambda.ln(),
                value_error: 0.0,
                derivative_error: 0.0,
                validity_sigma: TAU.ln(),
            }),
            univalence_abscissa: None,
        }
    }

    pub fn user() -> UserFamilyBuilder {
        UserFamilyBuilder::default()
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Short name used in reports.
    pub fn name(&self) -> &str {
        match &self.kind {
            FamilyKind::Exponential { .. } => "exponential",
            FamilyKind::User(m) => &m.label,
        }
    }

    pub fn lambda(&self) -> Option<Complex64> {
        match self.kind {
            FamilyKind::Exponential { lambda } => Some(lambda),
            FamilyKind::User(_) => None,
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn ln_r0(&self) -> f64 {
        self.r0.ln()
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    pub fn tail(&self) -> Option<&TailAsymptotics> {
        self.tail.as_ref()
    }

    /// Tract threshold of the exponential family: `T = {Re z > ln(R₀/|λ|)}`.
    pub fn tract_threshold(&self) -> Option<f64> {
        self.lambda().map(|l| (self.r0 / l.norm()).ln())
    }

    /// Left edge `a` of a half-plane `{Re z > a}` on which every composite
    /// `F⁻¹_u ∘ F⁻¹_s` is defined and univalent.
    ///
    /// For `λ·e^z` the composite needs `|z - log λ| > R₀`, which holds on
    /// `Re z > R₀ + ln|λ|`. User families certify their own value and
    /// default to `ln R₀`.
    pub fn univalence_abscissa(&self) -> f64 {
        if let Some(a) = self.univalence_abscissa {
            return a;
        }
        match self.kind {
            FamilyKind::Exponential { lambda } => self.ln_r0().max(self.r0 + lambda.norm().ln()),
            FamilyKind::User(_) => self.ln_r0(),
        }
    }

    /// The plane map `f` in working coordinates.
    pub fn plane_map(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            FamilyKind::Exponential { lambda } => lambda * z.exp(),
            FamilyKind::User(m) => (m.plane_map)(z),
        }
    }

    /// `F(w)` and `F'(w)`, checked to land in `H̄`.
    pub fn eval_lift(&self, w: Complex64) -> Result<(Complex64, Complex64)> {
        let (value, derivative) = self.lift_unchecked(w);
        let ln_r0 = self.ln_r0();
        if !(value.re >= ln_r0) {
            return Err(Error::Domain {
                what: "point outside every lifted tract",
                measured_re: value.re,
                threshold: ln_r0,
            });
        }
        Ok((value, derivative))
    }

    pub(crate) fn lift_unchecked(&self, w: Complex64) -> (Complex64, Complex64) {
        match &self.kind {
            FamilyKind::Exponential { lambda } => {
                let e = w.exp();
                (e + lambda.ln(), e)
            }
            FamilyKind::User(m) => (m.lift)(w),
        }
    }

    /// `F⁻¹_s(ζ)` and its derivative for `ζ ∈ H̄`.
    pub fn inv_branch(&self, s: i64, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        let ln_r0 = self.ln_r0();
        if !(zeta.re >= ln_r0) {
            return Err(Error::Domain {
                what: "inverse branch argument outside the closed half-plane",
                measured_re: zeta.re,
                threshold: ln_r0,
            });
        }
        let (p, d) = match &self.kind {
            FamilyKind::Exponential { lambda } => {
                let shifted = zeta - lambda.ln();
                // principal branch cut would be crossed
                if !(shifted.re > 0.0) {
                    return Err(Error::Domain {
                        what: "inverse branch argument on the logarithm branch cut",
                        measured_re: shifted.re,
                        threshold: 0.0,
                    });
                }
                (shifted.ln(), shifted.inv())
            }
            FamilyKind::User(m) => (m.inverse0)(zeta),
        };
        Ok((p + Complex64::new(0.0, TAU * s as f64), d))
    }

    /// Plane position of a working-coordinate lifted point: `exp(z) + offset`.
    pub fn to_plane(&self, z: Complex64) -> Complex64 {
        z.exp() + self.offset
    }

    /// `4π|F'(w)| - (Re F(w) - ln R₀)`; positive on every lifted tract.
    pub fn lemma2_margin(&self, w: Complex64) -> Result<f64> {
        let (value, derivative) = self.eval_lift(w)?;
        Ok(4.0 * PI * derivative.norm() - (value.re - self.ln_r0()))
    }
}

/// Builder for caller-supplied families; every callback is required.
#[derive(Default)]
pub struct UserFamilyBuilder {
    label: Option<String>,
    r0: Option<f64>,
    offset: Complex64,
    plane_map: Option<MapFn>,
    lift: Option<MapWithDerivative>,
    inverse0: Option<MapWithDerivative>,
    tail: Option<TailAsymptotics>,
    univalence_abscissa: Option<f64>,
}

impl UserFamilyBuilder {
    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn r0(mut self, r0: f64) -> Self {
        self.r0 = Some(r0);
        self
    }

    /// Translation already applied by the caller; added back on projection.
    pub fn offset(mut self, offset: Complex64) -> Self {
        self.offset = offset;
        self
    }

    pub fn plane_map(mut self, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.plane_map = Some(Arc::new(f));
        self
    }

    pub fn lift(
        mut self,
        f: impl Fn(Complex64) -> (Complex64, Complex64) + Send + Sync + 'static,
    ) -> Self {
        self.lift = Some(Arc::new(f));
        self
    }

    pub fn inverse0(
        mut self,
        f: impl Fn(Complex64) -> (Complex64, Complex64) + Send + Sync + 'static,
    ) -> Self {
        self.inverse0 = Some(Arc::new(f));
        self
    }

    pub fn tail(mut self, tail: TailAsymptotics) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn univalence_abscissa(mut self, a: f64) -> Self {
        self.univalence_abscissa = Some(a);
        self
    }

    pub fn build(self) -> Result<MapFamily> {
        let missing = |name: &str| Error::Config(format!("user family is missing the {name} callback"));
        let maps = UserMaps {
            label: self.label.unwrap_or_else(|| "user".to_string()),
            plane_map: self.plane_map.ok_or_else(|| missing("plane map"))?,
            lift: self.lift.ok_or_else(|| missing("lift"))?,
            inverse0: self.inverse0.ok_or_else(|| missing("inverse branch"))?,
        };
        let r0 = self
            .r0
            .ok_or_else(|| Error::Config("user family is missing R0".into()))?;
        Ok(MapFamily {
            kind: FamilyKind::User(maps),
            r0,
            offset: self.offset,
            tail: self.tail,
            univalence_abscissa: self.univalence_abscissa,
        })
    }
}

/// Brings a family into the normal form used by the construction: `R₀ > 1`
/// and `0` outside the closed tract.
///
/// For `λ·e^z` with `|λ| >= R₀` the tract covers the origin; `R₀` is then
/// enlarged to `e·|λ|`, which moves the tract edge to `Re z = 1` without
/// touching `f`. User families must already satisfy `|f(0)| < R₀` in their
/// own working coordinates; their recorded offset is kept as is.
pub fn normalize_family(family: &MapFamily) -> Result<MapFamily> {
    let r0 = family.r0;
    if !(r0.is_finite() && r0 > 1.0) {
        return Err(Error::Config(format!("R0 must be a finite number > 1, got {r0}")));
    }
    if !(family.offset.re.is_finite() && family.offset.im.is_finite()) {
        return Err(Error::Config("translation offset must be finite".into()));
    }
    let mut out = family.clone();
    match family.kind {
        FamilyKind::Exponential { lambda } => {
            let modulus = lambda.norm();
            if !(modulus.is_finite() && modulus > 0.0) {
                return Err(Error::Config(format!("lambda must be finite and nonzero, got {lambda}")));
            }
            if modulus >= r0 {
                out.r0 = E * modulus;
            }
            if let Some(t) = out.tail.as_mut() {
                t.log_shift = lambda.ln();
            }
        }
        FamilyKind::User(_) => {
            let at_origin = family.plane_map(Complex64::new(0.0, 0.0)).norm();
            if !(at_origin < r0) {
                return Err(Error::Config(format!(
                    "user family is not normalized: |f(0)| = {at_origin} >= R0 = {r0}; \
                     translate the callbacks and record the offset"
                )));
            }
        }
    }
    Ok(out)
}

/// The half-plane `H` and the index window used when sampling tracts.
#[derive(Debug, Clone)]
pub struct TractFrame {
    pub ln_r0: f64,
    pub indices: RangeInclusive<i64>,
}

impl TractFrame {
    pub fn new(family: &MapFamily, indices: RangeInclusive<i64>) -> Self {
        Self {
            ln_r0: family.ln_r0(),
            indices,
        }
    }

    /// Worst `|(F⁻¹_s(ζ) - F⁻¹₀(ζ)) - 2πis| / (1 + 2π|s|)` over the frame.
    pub fn periodicity_defect(&self, family: &MapFamily, zetas: &[Complex64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &zeta in zetas {
            let (base, _) = family.inv_branch(0, zeta)?;
            for s in self.indices.clone() {
                let (p, _) = family.inv_branch(s, zeta)?;
                let shift = Complex64::new(0.0, TAU * s as f64);
                let defect = (p - base - shift).norm() / (1.0 + TAU * (s as f64).abs());
                worst = worst.max(defect);
            }
        }
        Ok(worst)
    }

    /// Every branch image maps back into `H̄` under `F`.
    pub fn branch_images_in_half_plane(&self, family: &MapFamily, zetas: &[Complex64]) -> Result<bool> {
        for &zeta in zetas {
            for s in self.indices.clone() {
                let (p, _) = family.inv_branch(s, zeta)?;
                let (back, _) = family.lift_unchecked(p);
                if back.re < self.ln_r0 - 1e-9 * (1.0 + back.norm()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// First grid index whose value exceeds a threshold.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ThresholdCrossing {
    pub threshold: f64,
    pub first_index: Option<usize>,
}

/// Outcome of [`check_growth`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthReport {
    pub grid: Vec<f64>,
    pub real_parts: Vec<f64>,
    pub strictly_increasing: bool,
    /// Indices `i` with `real_parts[i] <= real_parts[i - 1]`.
    pub non_strict_at: Vec<usize>,
    pub crossings: Vec<ThresholdCrossing>,
}

/// Tabulates `Re F⁻¹₀(x)` along the real axis and checks it increases
/// towards every threshold.
pub fn check_growth(family: &MapFamily, grid: &[f64], thresholds: &[f64]) -> Result<GrowthReport> {
    let mut real_parts = Vec::with_capacity(grid.len());
    for &x in grid {
        let (p, _) = family.inv_branch(0, Complex64::new(x, 0.0))?;
        real_parts.push(p.re);
    }
    let non_strict_at: Vec<usize> = (1..real_parts.len())
        .filter(|&i| real_parts[i] <= real_parts[i - 1])
        .collect();
    let crossings = thresholds
        .iter()
        .map(|&threshold| ThresholdCrossing {
            threshold,
            first_index: real_parts.iter().position(|&v| v > threshold),
        })
        .collect();
    Ok(GrowthReport {
        grid: grid.to_vec(),
        strictly_increasing: non_strict_at.is_empty(),
        non_strict_at,
        real_parts,
        crossings,
    })
}
