//! The geometric construction on the square `Q` centred at `R`.

pub mod anchor;
pub mod budget;
pub mod cell;
pub mod distortion;
pub mod gset;
pub mod levellines;
pub mod radius;
pub mod squares;
pub mod window;

pub use anchor::{anchor_line, AnchorLine};
pub use budget::{default_depth, GeometryBudget, MIN_BOUNDARY_SAMPLES};
pub use cell::{
    analytic_diameter_bound, cell_image, containment_test, eval_letter, measure_cell, sampled_containment,
    CellImage, CellIndex, CellMeasure, Containment, Letter, Verdict,
};
pub use distortion::{distortion_constant, DistortionBound, DistortionMode, DEFAULT_SUBDIVISIONS};
pub use gset::{build_G, certified_window, BuildOptions, GMode, GSet, TailSegment};
pub use levellines::{trace_level_lines, CurveTrace, LevelLineOptions, LevelLineReport};
pub use radius::{find_radius, radius_margins, RadiusMargins, ScanSpec};
pub use squares::{build_squares, Rect, SquareSpec};
pub use window::{solve_s_window, SigmaWindow, TailGeometry};
