use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest boundary sample count accepted for sampled containment.
pub const MIN_BOUNDARY_SAMPLES: usize = 64;

/// Tolerances and sizes shared by the geometric construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeometryBudget {
    /// Exponent slack in `|(F⁻¹_s)'(R)| > R^-(1+ε)`.
    pub epsilon: f64,
    /// Depth `D` of the inner squares and of the tract condition.
    pub d: f64,
    /// Extra containment margin `δ`.
    pub margin: f64,
    pub boundary_samples: usize,
}

impl GeometryBudget {
    pub fn new(epsilon: f64, d: f64, margin: f64, boundary_samples: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Config(format!("D must be positive, got {d}")));
        }
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(Error::Config(format!("containment margin must be >= 0, got {margin}")));
        }
        if boundary_samples < MIN_BOUNDARY_SAMPLES {
            return Err(Error::Config(format!(
                "at least {MIN_BOUNDARY_SAMPLES} boundary samples are required, got {boundary_samples}"
            )));
        }
        Ok(Self {
            epsilon,
            d,
            margin,
            boundary_samples,
        })
    }
}

/// `ceil(5√2·π·C)`, the depth that keeps first-level images of `Q` inside `H`.
pub fn default_depth(c: f64) -> f64 {
    (5.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI * c).ceil()
}
