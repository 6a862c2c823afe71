//! Retractions onto sets cut out by Lipschitz bounds in `ℓ∞ⁿ`, extension of
//! 1-Lipschitz maps into such sets, and tools around injective hulls of
//! finite metric spaces.

pub mod boxset;
pub mod error;
pub mod extension;
pub mod hull;
pub mod instances;
pub mod lipfun;
pub mod metric;
pub mod random;
pub mod reconstruct;

pub use boxset::{BoxLipschitzSet, IterationTrace, ShrunkSet, Verdict};
pub use error::{Error, Result};
pub use lipfun::{AxisBox, LipExpr, McShaneMode};
pub use metric::{pt, ExtendedReal, FiniteMetricSpace, Point, Sign};
