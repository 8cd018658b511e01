//! JSON run configuration and its resolution into concrete values.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loglift::{normalize_family, MapFamily};
use crate::tractgeom::{
    build_squares, default_depth, distortion_constant, find_radius, BuildOptions, DistortionBound, DistortionMode,
    GMode, GeometryBudget, ScanSpec, SquareSpec, DEFAULT_SUBDIVISIONS,
};

/// A number or the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Auto {
    Value(f64),
    Keyword(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

impl Auto {
    fn value(self) -> Option<f64> {
        match self {
            Auto::Value(v) => Some(v),
            Auto::Keyword(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    pub kind: FamilyKindName,
    /// `[re, im]`.
    pub lambda: [f64; 2],
    #[serde(rename = "R0")]
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKindName {
    Exponential,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    #[serde(rename = "R")]
    pub r: Auto,
    #[serde(rename = "D")]
    pub d: Auto,
    pub epsilon: f64,
    #[serde(default = "default_scan")]
    pub scan: ScanSpec,
    #[serde(default)]
    pub margin: f64,
    #[serde(default = "default_boundary_samples")]
    pub boundary_samples: usize,
    #[serde(default = "default_distortion")]
    pub distortion: DistortionMode,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.lo + self.step * k as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureBlock {
    pub mode: GMode,
    #[serde(default = "default_max_explicit")]
    pub max_explicit: usize,
    #[serde(default = "default_collar")]
    pub collar: usize,
    #[serde(default = "default_t_grid")]
    pub t_grid: TGrid,
    #[serde(default = "default_tol")]
    pub bisection_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingBlock {
    pub depth: usize,
    pub count: usize,
    pub seed: u64,
    /// Restrict sampling to the `k` letters of `G` with the smallest `|s|`.
    #[serde(default)]
    pub letters: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum PointSource {
    MiddleThirds { depth: usize },
    /// The sampled subsystem described by the sampling block.
    Subsystem,
    Csv { path: PathBuf },
}

/// Box sizes as fractions of the point-cloud diameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleBlock {
    pub hi: f64,
    pub lo: f64,
    pub per_decade: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub source: PointSource,
    pub scales: ScaleBlock,
    /// Accepted slope interval; the subsystem Bowen interval widened by
    /// `tolerance` when absent.
    #[serde(default)]
    pub expected: Option<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_brute_letters")]
    pub brute_letters: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_density")]
    pub density: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyBlock,
    pub geometry: GeometryBlock,
    pub pressure: PressureBlock,
    #[serde(default)]
    pub sampling: Option<SamplingBlock>,
    #[serde(default)]
    pub oracle: Option<OracleBlock>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_scan() -> ScanSpec {
    ScanSpec {
        lo: 40.0,
        hi: 400.0,
        step: 1.0,
    }
}
fn default_boundary_samples() -> usize {
    256
}
fn default_distortion() -> DistortionMode {
    DistortionMode::Chained
}
fn default_subdivisions() -> usize {
    DEFAULT_SUBDIVISIONS
}
fn default_max_explicit() -> usize {
    BuildOptions::default().max_explicit
}
fn default_collar() -> usize {
    BuildOptions::default().collar
}
fn default_t_grid() -> TGrid {
    TGrid {
        lo: 0.5,
        hi: 1.5,
        step: 0.05,
    }
}
fn default_tol() -> f64 {
    1e-3
}
fn default_tolerance() -> f64 {
    0.07
}
fn default_brute_letters() -> usize {
    8
}
fn default_levels() -> Vec<usize> {
    vec![1, 2, 3]
}
fn default_t() -> f64 {
    1.0
}
fn default_density() -> usize {
    10
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

/// Configuration with every `"auto"` replaced by the value it resolved to.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub family: FamilyBlock,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "R_auto")]
    pub r_auto: bool,
    #[serde(rename = "D_auto")]
    pub d_auto: bool,
    pub epsilon: f64,
    pub scan: ScanSpec,
    pub margin: f64,
    pub boundary_samples: usize,
    pub distortion: DistortionMode,
    pub subdivisions: usize,
    pub build: BuildOptions,
    pub t_grid: TGrid,
    pub bisection_tol: f64,
    pub sampling: Option<SamplingBlock>,
    pub oracle: Option<OracleBlock>,
}

/// Objects built while resolving, reused by the commands.
pub struct Context {
    pub family: MapFamily,
    pub spec: SquareSpec,
    pub dist: DistortionBound,
    pub budget: GeometryBudget,
    pub resolved: Resolved,
}

impl Context {
    pub fn resolve(config: &RunConfig) -> Result<Self> {
        let fb = &config.family;
        let lambda = Complex64::new(finite("lambda", fb.lambda[0])?, finite("lambda", fb.lambda[1])?);
        let family = normalize_family(&MapFamily::exponential(lambda, finite("R0", fb.r0)?))?;
        let g = &config.geometry;
        let epsilon = finite("epsilon", g.epsilon)?;
        let margin = finite("margin", g.margin)?;
        for (name, v) in [("scan.lo", g.scan.lo), ("scan.hi", g.scan.hi), ("scan.step", g.scan.step)] {
            finite(name, v)?;
        }
        let p = &config.pressure;
        for (name, v) in [
            ("t_grid.lo", p.t_grid.lo),
            ("t_grid.hi", p.t_grid.hi),
            ("t_grid.step", p.t_grid.step),
            ("bisection_tol", p.bisection_tol),
        ] {
            finite(name, v)?;
        }
        if !(p.t_grid.step > 0.0 && p.t_grid.lo >= 0.0 && p.t_grid.hi <= 4.0 && p.t_grid.lo <= p.t_grid.hi) {
            return Err(Error::Config("t_grid must be a nonempty ascending grid inside [0, 4]".into()));
        }
        if !(p.bisection_tol > 0.0) {
            return Err(Error::Config("bisection_tol must be positive".into()));
        }
        let dist_at = |r: f64| distortion_constant(r, family.univalence_abscissa(), g.distortion, g.subdivisions);

        let (r, d) = match (g.r.value(), g.d.value()) {
            (Some(r), Some(d)) => (finite("R", r)?, finite("D", d)?),
            (Some(r), None) => {
                let r = finite("R", r)?;
                (r, default_depth(dist_at(r)?.c))
            }
            (None, Some(d)) => {
                let d = finite("D", d)?;
                GeometryBudget::new(epsilon, d, margin, g.boundary_samples)?;
                if d > g.scan.hi / 4.0 {
                    return Err(Error::Geometry(format!(
                        "D = {d} exceeds R/4 for every radius up to {}",
                        g.scan.hi
                    )));
                }
                let budget = GeometryBudget::new(epsilon, d, margin, g.boundary_samples)?;
                (find_radius(&family, &budget, &g.scan)?.r, d)
            }
            (None, None) => return Err(Error::Config("R and D cannot both be \"auto\"".into())),
        };
        let budget = GeometryBudget::new(epsilon, d, margin, g.boundary_samples)?;
        let spec = build_squares(r, d)?;
        let dist = dist_at(r)?;
        if let Some(s) = &config.sampling {
            if s.depth == 0 || s.count == 0 {
                return Err(Error::Config("sampling depth and count must be positive".into()));
            }
        }
        if let Some(o) = &config.oracle {
            let sc = o.scales;
            if !(sc.hi.is_finite() && sc.lo.is_finite() && sc.lo > 0.0 && sc.hi > sc.lo && sc.per_decade > 0) {
                return Err(Error::Config("oracle scales need 0 < lo < hi and per_decade > 0".into()));
            }
            finite("oracle.t", o.t)?;
            finite("oracle.tolerance", o.tolerance)?;
        }
        let resolved = Resolved {
            family: fb.clone(),
            r,
            d,
            r_auto: g.r.value().is_none(),
            d_auto: g.d.value().is_none(),
            epsilon,
            scan: g.scan,
            margin,
            boundary_samples: g.boundary_samples,
            distortion: g.distortion,
            subdivisions: g.subdivisions,
            build: BuildOptions {
                mode: p.mode,
                max_explicit: p.max_explicit,
                collar: p.collar,
            },
            t_grid: p.t_grid,
            bisection_tol: p.bisection_tol,
            sampling: config.sampling.clone(),
            oracle: config.oracle.clone(),
        };
        Ok(Self {
            family,
            spec,
            dist,
            budget,
            resolved,
        })
    }
}
