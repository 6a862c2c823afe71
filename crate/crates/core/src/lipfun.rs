//! Closed expression trees for λ-Lipschitz functions `ℓ∞^{d} → ℝ ∪ {±∞}`.
//!
//! Every finite expression carries a syntactic Lipschitz certificate
//! ([`LipExpr::lip_bound`]); [`verify_lipschitz_on_grid`] is the independent
//! brute-force check for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{check_dims, sup_dist_slices, ExtendedReal, Point, Sign};

/// Outward slack added to interval enclosures.
pub const ENCLOSURE_SLACK: f64 = 1e-12;

/// Relative slack used by the grid Lipschitz verifier to absorb rounding.
pub const LIPSCHITZ_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McShaneMode {
    /// `min_j (v_j + λ‖y_j − y‖)`, the largest λ-Lipschitz extension.
    Inf,
    /// `max_j (v_j − λ‖y_j − y‖)`, the smallest one.
    Sup,
}

/// A λ-Lipschitz function on `ℓ∞^d`, or one of the two infinite constants.
///
/// Only the top level of a bound may be [`LipExpr::Infinite`]; the
/// combinators never see infinite values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LipExpr {
    Const {
        value: f64,
    },
    /// `y ↦ orientation·scale·‖center − y‖ + offset`.
    DistCone {
        center: Point,
        offset: f64,
        scale: f64,
        orientation: Sign,
    },
    Min {
        children: Vec<LipExpr>,
    },
    Max {
        children: Vec<LipExpr>,
    },
    /// `factor·(inner − anchor) + anchor`.
    Blend {
        inner: Box<LipExpr>,
        factor: f64,
        anchor: f64,
    },
    McShane {
        samples: Vec<(Point, f64)>,
        scale: f64,
        mode: McShaneMode,
    },
    #[serde(rename = "inf")]
    Infinite {
        sign: Sign,
    },
}

/// An axis-aligned box; coordinates may extend to ±∞.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dims(lo.len(), hi.len())?;
        for (a, b) in lo.iter().zip(&hi) {
            if a.is_nan() || b.is_nan() || *a == f64::INFINITY || *b == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!("bad box side [{a}, {b}]")));
            }
            if a > b {
                return Err(Error::EmptyInterval {
                    lower: *a,
                    upper: *b,
                });
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        AxisBox::new(vec![lo; dim], vec![hi; dim])
    }

    /// The cube of radius `r` around `center`.
    pub fn ball(center: &Point, r: f64) -> Result<Self> {
        AxisBox::new(
            center.coords().iter().map(|c| c - r).collect(),
            center.coords().iter().map(|c| c + r).collect(),
        )
    }

    pub fn unbounded(dim: usize) -> Self {
        AxisBox {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn hat(&self, i: usize) -> Result<AxisBox> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim(),
            });
        }
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.remove(i);
        hi.remove(i);
        Ok(AxisBox { lo, hi })
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// The lattice `lo + j·step` in every coordinate, in lexicographic
    /// order. The upper end is included when it lies on the lattice up to
    /// a relative `1e-9`.
    pub fn grid(&self, step: f64) -> Result<Vec<Point>> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter(format!("grid step {step}")));
        }
        let axes = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidParameter("grid over an unbounded box".into()));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|j| a + j as f64 * step).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = axes.iter().map(|a| a.len() as f64).product();
        if total > 1e8 {
            return Err(Error::GridTooLarge {
                candidates: total,
                cap: 1e8,
            });
        }
        let mut out = vec![Vec::with_capacity(self.dim())];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(Point).collect())
    }

    /// `[min, max]` of `‖center − y‖` over the box.
    fn distance_range(&self, center: &[f64]) -> (f64, f64) {
        center.iter().zip(self.lo.iter().zip(&self.hi)).fold(
            (0.0f64, 0.0f64),
            |(dmin, dmax), (&c, (&a, &b))| {
                let near = if c < a {
                    a - c
                } else if c > b {
                    c - b
                } else {
                    0.0
                };
                let far = (c - a).abs().max((b - c).abs());
                (dmin.max(near), dmax.max(far))
            },
        )
    }
}

/// `s·d` with the convention `0·∞ = 0`.
fn scaled(s: f64, d: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * d
    }
}

impl LipExpr {
    pub fn constant(value: f64) -> Self {
        LipExpr::Const { value }
    }

    pub fn distcone(center: Point, offset: f64, scale: f64, orientation: Sign) -> Self {
        LipExpr::DistCone {
            center,
            offset,
            scale,
            orientation,
        }
    }

    pub fn infinite(sign: Sign) -> Self {
        LipExpr::Infinite { sign }
    }

    pub fn mcshane(samples: Vec<(Point, f64)>, scale: f64, mode: McShaneMode) -> Self {
        LipExpr::McShane {
            samples,
            scale,
            mode,
        }
    }

    /// The one-variable function `y ↦ slope·y + intercept`, exact on
    /// `[−radius, radius]`, as a two-sample McShane extension with scale
    /// `|slope|`. Either mode gives the same values on that interval.
    pub fn affine_1d(slope: f64, intercept: f64, radius: f64, mode: McShaneMode) -> Self {
        LipExpr::McShane {
            samples: vec![
                (Point(vec![-radius]), intercept - slope * radius),
                (Point(vec![radius]), intercept + slope * radius),
            ],
            scale: slope.abs(),
            mode,
        }
    }

    /// `p([lo, hi], self)` expressed as `min(max(self, lo), hi)`.
    pub fn clamped(self, lo: f64, hi: f64) -> Self {
        LipExpr::Min {
            children: vec![
                LipExpr::Max {
                    children: vec![self, LipExpr::constant(lo)],
                },
                LipExpr::constant(hi),
            ],
        }
    }

    /// `self + delta`, pushed into the leaves.
    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            LipExpr::Const { value } => LipExpr::constant(value + delta),
            LipExpr::DistCone {
                center,
                offset,
                scale,
                orientation,
            } => LipExpr::distcone(center.clone(), offset + delta, *scale, *orientation),
            LipExpr::Min { children } => LipExpr::Min {
                children: children.iter().map(|c| c.shifted(delta)).collect(),
            },
            LipExpr::Max { children } => LipExpr::Max {
                children: children.iter().map(|c| c.shifted(delta)).collect(),
            },
            LipExpr::Blend {
                inner,
                factor,
                anchor,
            } => LipExpr::Blend {
                inner: Box::new(inner.shifted(delta)),
                factor: *factor,
                anchor: anchor + delta,
            },
            LipExpr::McShane {
                samples,
                scale,
                mode,
            } => LipExpr::McShane {
                samples: samples
                    .iter()
                    .map(|(p, v)| (p.clone(), v + delta))
                    .collect(),
                scale: *scale,
                mode: *mode,
            },
            LipExpr::Infinite { sign } => LipExpr::infinite(*sign),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LipExpr::Infinite { .. })
    }

    /// Checks the structural invariants. Infinite nodes are accepted only at
    /// the top level.
    pub fn validate(&self) -> Result<()> {
        if self.is_infinite() {
            return Ok(());
        }
        self.validate_finite()?;
        Ok(())
    }

    /// Returns the domain dimension fixed by the subtree, if any.
    fn validate_finite(&self) -> Result<Option<usize>> {
        let bad = |msg: String| Err(Error::InvalidExpression(msg));
        match self {
            LipExpr::Const { value } => {
                if !value.is_finite() {
                    return bad("non-finite constant".into());
                }
                Ok(None)
            }
            LipExpr::DistCone {
                center,
                offset,
                scale,
                ..
            } => {
                if !offset.is_finite() || !(0.0..=1.0).contains(scale) {
                    return bad(format!("distcone offset {offset} / scale {scale}"));
                }
                Ok(Some(center.dim()))
            }
            LipExpr::Min { children } | LipExpr::Max { children } => {
                if children.is_empty() {
                    return bad("min/max without children".into());
                }
                let mut dim = None;
                for c in children {
                    if c.is_infinite() {
                        return bad("infinite value inside min/max".into());
                    }
                    if let Some(d) = c.validate_finite()? {
                        if dim.is_some_and(|e| e != d) {
                            return bad(format!("children of dimensions {} and {d}", dim.unwrap()));
                        }
                        dim = Some(d);
                    }
                }
                Ok(dim)
            }
            LipExpr::Blend {
                inner,
                factor,
                anchor,
            } => {
                if !(0.0..=1.0).contains(factor) || !anchor.is_finite() {
                    return bad(format!("blend factor {factor} / anchor {anchor}"));
                }
                if inner.is_infinite() {
                    return bad("infinite value inside blend".into());
                }
                inner.validate_finite()
            }
            LipExpr::McShane { samples, scale, .. } => {
                let Some((first, _)) = samples.first() else {
                    return bad("McShane extension without samples".into());
                };
                if !scale.is_finite() || *scale < 0.0 {
                    return bad(format!("McShane scale {scale}"));
                }
                for (p, v) in samples {
                    if p.dim() != first.dim() {
                        return bad("McShane samples of different dimensions".into());
                    }
                    if !v.is_finite() {
                        return bad("non-finite McShane value".into());
                    }
                }
                Ok(Some(first.dim()))
            }
            LipExpr::Infinite { .. } => bad("infinite value below the top level".into()),
        }
    }

    /// The domain dimension, when some leaf fixes it (constants do not).
    pub fn domain_dim(&self) -> Option<usize> {
        match self {
            LipExpr::Const { .. } | LipExpr::Infinite { .. } => None,
            LipExpr::DistCone { center, .. } => Some(center.dim()),
            LipExpr::McShane { samples, .. } => samples.first().map(|(p, _)| p.dim()),
            LipExpr::Min { children } | LipExpr::Max { children } => {
                children.iter().find_map(LipExpr::domain_dim)
            }
            LipExpr::Blend { inner, .. } => inner.domain_dim(),
        }
    }

    pub fn eval(&self, y: &Point) -> Result<ExtendedReal> {
        match self {
            LipExpr::Infinite { sign: Sign::Plus } => Ok(ExtendedReal::PosInf),
            LipExpr::Infinite { sign: Sign::Minus } => Ok(ExtendedReal::NegInf),
            _ => Ok(ExtendedReal::Finite(self.eval_finite(y)?)),
        }
    }

    /// Evaluates a finite expression; errors on infinite ones.
    pub fn eval_finite(&self, y: &Point) -> Result<f64> {
        if self.is_infinite() {
            return Err(Error::InvalidExpression(
                "infinite expression has no finite value".into(),
            ));
        }
        if let LipExpr::McShane { samples, .. } = self {
            if samples.is_empty() {
                return Err(Error::EmptyInput("McShane sample list"));
            }
        }
        if let Some(d) = self.domain_dim() {
            check_dims(d, y.dim())?;
        }
        Ok(self.value_at(y.coords()))
    }

    /// Unchecked evaluation for validated, finite expressions.
    pub(crate) fn value_at(&self, y: &[f64]) -> f64 {
        match self {
            LipExpr::Const { value } => *value,
            LipExpr::DistCone {
                center,
                offset,
                scale,
                orientation,
            } => orientation.factor() * scale * sup_dist_slices(center.coords(), y) + offset,
            LipExpr::Min { children } => children
                .iter()
                .map(|c| c.value_at(y))
                .fold(f64::INFINITY, f64::min),
            LipExpr::Max { children } => children
                .iter()
                .map(|c| c.value_at(y))
                .fold(f64::NEG_INFINITY, f64::max),
            LipExpr::Blend {
                inner,
                factor,
                anchor,
            } => factor * (inner.value_at(y) - anchor) + anchor,
            LipExpr::McShane {
                samples,
                scale,
                mode,
            } => match mode {
                McShaneMode::Inf => samples
                    .iter()
                    .map(|(p, v)| v + scale * sup_dist_slices(p.coords(), y))
                    .fold(f64::INFINITY, f64::min),
                McShaneMode::Sup => samples
                    .iter()
                    .map(|(p, v)| v - scale * sup_dist_slices(p.coords(), y))
                    .fold(f64::NEG_INFINITY, f64::max),
            },
            LipExpr::Infinite { .. } => unreachable!("infinite bounds are handled structurally"),
        }
    }

    /// Syntactic upper bound on the Lipschitz constant.
    pub fn lip_bound(&self) -> Result<f64> {
        Ok(match self {
            LipExpr::Const { .. } => 0.0,
            LipExpr::DistCone { scale, .. } | LipExpr::McShane { scale, .. } => *scale,
            LipExpr::Min { children } | LipExpr::Max { children } => children
                .iter()
                .map(LipExpr::lip_bound)
                .try_fold(0.0f64, |m, c| c.map(|c| m.max(c)))?,
            LipExpr::Blend { inner, factor, .. } => factor * inner.lip_bound()?,
            LipExpr::Infinite { .. } => {
                return Err(Error::InvalidExpression(
                    "infinite expression has no Lipschitz constant".into(),
                ))
            }
        })
    }

    /// `factor·(self − anchor) + anchor`. With `anchor` above `self`, the
    /// result lies above `self` and decreases to it as `factor → 1`.
    pub fn shrink(&self, factor: f64, anchor: f64) -> Result<LipExpr> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidParameter(format!(
                "shrink factor {factor} outside [0, 1]"
            )));
        }
        if !anchor.is_finite() {
            return Err(Error::NonFinite("shrink anchor"));
        }
        if self.is_infinite() {
            return Err(Error::InvalidExpression(
                "cannot shrink an infinite bound".into(),
            ));
        }
        Ok(LipExpr::Blend {
            inner: Box::new(self.clone()),
            factor,
            anchor,
        })
    }

    /// Interval enclosure of the values over `bx`, widened outward by
    /// [`ENCLOSURE_SLACK`]. Ends are infinite when the box is unbounded in a
    /// direction where the expression grows.
    pub fn bounds_of(&self, bx: &AxisBox) -> Result<(f64, f64)> {
        if self.is_infinite() {
            return Err(Error::InvalidExpression(
                "infinite expression has no enclosure".into(),
            ));
        }
        if let Some(d) = self.domain_dim() {
            check_dims(d, bx.dim())?;
        }
        let (lo, hi) = self.enclose(bx);
        Ok((lo - ENCLOSURE_SLACK, hi + ENCLOSURE_SLACK))
    }

    fn enclose(&self, bx: &AxisBox) -> (f64, f64) {
        match self {
            LipExpr::Const { value } => (*value, *value),
            LipExpr::DistCone {
                center,
                offset,
                scale,
                orientation,
            } => {
                let (dmin, dmax) = bx.distance_range(center.coords());
                match orientation {
                    Sign::Plus => (offset + scaled(*scale, dmin), offset + scaled(*scale, dmax)),
                    Sign::Minus => (offset - scaled(*scale, dmax), offset - scaled(*scale, dmin)),
                }
            }
            LipExpr::Min { children } => children
                .iter()
                .map(|c| c.enclose(bx))
                .fold((f64::INFINITY, f64::INFINITY), |(a, b), (lo, hi)| {
                    (a.min(lo), b.min(hi))
                }),
            LipExpr::Max { children } => children.iter().map(|c| c.enclose(bx)).fold(
                (f64::NEG_INFINITY, f64::NEG_INFINITY),
                |(a, b), (lo, hi)| (a.max(lo), b.max(hi)),
            ),
            LipExpr::Blend {
                inner,
                factor,
                anchor,
            } => {
                if *factor == 0.0 {
                    return (*anchor, *anchor);
                }
                let (lo, hi) = inner.enclose(bx);
                (
                    factor * (lo - anchor) + anchor,
                    factor * (hi - anchor) + anchor,
                )
            }
            LipExpr::McShane {
                samples,
                scale,
                mode,
            } => {
                let ranges = samples
                    .iter()
                    .map(|(p, v)| (v, bx.distance_range(p.coords())));
                match mode {
                    McShaneMode::Inf => ranges.fold(
                        (f64::INFINITY, f64::INFINITY),
                        |(a, b), (v, (dmin, dmax))| {
                            (
                                a.min(v + scaled(*scale, dmin)),
                                b.min(v + scaled(*scale, dmax)),
                            )
                        },
                    ),
                    McShaneMode::Sup => ranges.fold(
                        (f64::NEG_INFINITY, f64::NEG_INFINITY),
                        |(a, b), (v, (dmin, dmax))| {
                            (
                                a.max(v - scaled(*scale, dmax)),
                                b.max(v - scaled(*scale, dmin)),
                            )
                        },
                    ),
                }
            }
            LipExpr::Infinite { .. } => unreachable!("checked by bounds_of"),
        }
    }

    /// Largest absolute constant, offset, or coordinate in the tree; a scale
    /// for rounding-error estimates.
    pub fn magnitude(&self) -> f64 {
        match self {
            LipExpr::Const { value } => value.abs(),
            LipExpr::DistCone { center, offset, .. } => center.norm().max(offset.abs()),
            LipExpr::Min { children } | LipExpr::Max { children } => {
                children.iter().map(LipExpr::magnitude).fold(0.0, f64::max)
            }
            LipExpr::Blend { inner, anchor, .. } => inner.magnitude().max(anchor.abs()),
            LipExpr::McShane { samples, .. } => samples
                .iter()
                .map(|(p, v)| p.norm().max(v.abs()))
                .fold(0.0, f64::max),
            LipExpr::Infinite { .. } => 0.0,
        }
    }

    /// Parses and validates a JSON expression.
    pub fn from_json(s: &str) -> std::result::Result<LipExpr, String> {
        let e: LipExpr = serde_json::from_str(s).map_err(|e| e.to_string())?;
        e.validate().map_err(|e| e.to_string())?;
        Ok(e)
    }
}

/// Outcome of the brute-force Lipschitz check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum LipschitzCheck {
    Ok,
    Violation {
        first: usize,
        second: usize,
        excess: f64,
    },
}

impl LipschitzCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, LipschitzCheck::Ok)
    }
}

/// Checks `|f(y) − f(y′)| ≤ λ·‖y − y′‖` for every pair of grid points and
/// returns the worst violating pair, if any.
pub fn verify_lipschitz_on_grid(
    f: &LipExpr,
    grid: &[Point],
    lambda: f64,
) -> Result<LipschitzCheck> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("Lipschitz grid"));
    }
    let values = grid
        .iter()
        .map(|y| f.eval_finite(y))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let d = sup_dist_slices(grid[i].coords(), grid[j].coords());
            let slack = LIPSCHITZ_SLACK * 1f64.max(values[i].abs()).max(values[j].abs());
            let excess = (values[i] - values[j]).abs() - lambda * d;
            if excess > slack && worst.is_none_or(|(_, _, e)| excess > e) {
                worst = Some((i, j, excess));
            }
        }
    }
    Ok(match worst {
        None => LipschitzCheck::Ok,
        Some((first, second, excess)) => LipschitzCheck::Violation {
            first,
            second,
            excess,
        },
    })
}
