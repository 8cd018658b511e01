//! Certified lower bounds for the Hausdorff dimension of Cantor repellers
//! built from a logarithmic tract.
//!
//! The pipeline runs bottom-up: [`loglift`] holds the map family and its
//! logarithmic lift, [`tractgeom`] builds the squares, distortion bounds and
//! the admissible index set, [`ifs`] evaluates and samples the resulting
//! iterated function system, [`pressure`] turns derivative bounds into a
//! Bowen interval, and [`oracle`] holds independent cross-checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ifs;
pub mod loglift;
pub mod numeric;
pub mod oracle;
pub mod pressure;
pub mod tractgeom;

pub mod cli;

pub use error::{Error, Result};
pub use loglift::{normalize_family, MapFamily, TailAsymptotics};
