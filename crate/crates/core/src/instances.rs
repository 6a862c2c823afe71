//! Small planar sets with known behaviour under cyclic coordinate
//! retraction. Linear bounds are represented exactly on `[−radius, radius]`.

use crate::boxset::BoxLipschitzSet;
use crate::lipfun::{LipExpr, McShaneMode};

fn pinned(slope: f64, intercept: f64, radius: f64) -> (LipExpr, LipExpr) {
    (
        LipExpr::affine_1d(slope, intercept, radius, McShaneMode::Sup),
        LipExpr::affine_1d(slope, intercept, radius, McShaneMode::Inf),
    )
}

fn planar(first: (f64, f64), second: (f64, f64), radius: f64) -> BoxLipschitzSet {
    let (l1, u1) = pinned(first.0, first.1, radius);
    let (l2, u2) = pinned(second.0, second.1, radius);
    BoxLipschitzSet::new(vec![l1, l2], vec![u1, u2]).expect("planar instance is valid")
}

/// `x₁ = x₂` and `x₂ = 1 + x₁`: an empty set. From the origin every cyclic
/// step after the first moves by exactly 1.
pub fn empty_counterexample(radius: f64) -> BoxLipschitzSet {
    planar((1.0, 0.0), (1.0, 1.0), radius)
}

/// `x₁ = x₂` and `x₂ = −x₁`: the single point `(0, 0)`. From `(0, 1)` the
/// cyclic iteration visits `(1, 1), (1, −1), (−1, −1), (−1, 1)` forever.
pub fn origin_counterexample(radius: f64) -> BoxLipschitzSet {
    planar((1.0, 0.0), (-1.0, 0.0), radius)
}

/// `x₁ = x₂/2` and `x₂ = x₁/2`: the origin again, with `λ = 1/2`.
pub fn half_contracting_example(radius: f64) -> BoxLipschitzSet {
    planar((0.5, 0.0), (0.5, 0.0), radius)
}
