//! Sup-norm geometry: points of ℓ∞ⁿ, coordinate deletion, interval
//! projection, axis cones, Hausdorff distance and finite metric spaces.
//!
//! Coordinate indices are 0-based throughout the crate.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for equality in cone and metric predicates.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A point of ℓ∞ⁿ. The empty point (n = 0) is allowed and stands for the
/// single element of ℓ∞⁰.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(pub(crate) Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn empty() -> Self {
        Point(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn sup_dist(&self, other: &Point) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(sup_dist_slices(&self.0, &other.0))
    }

    /// The point with coordinate `i` omitted.
    pub fn hat(&self, i: usize) -> Result<Point> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim(),
            });
        }
        let mut c = self.0.clone();
        c.remove(i);
        Ok(Point(c))
    }

    /// Inverse of [`Point::hat`]: reinsert `value` as coordinate `i`.
    pub fn insert(&self, i: usize, value: f64) -> Result<Point> {
        if i > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim() + 1,
            });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite("inserted coordinate"));
        }
        let mut c = self.0.clone();
        c.insert(i, value);
        Ok(Point(c))
    }

    /// `self + t·e_i`.
    pub fn shifted_along(&self, i: usize, t: f64) -> Result<Point> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim(),
            });
        }
        let mut c = self.0.clone();
        c[i] += t;
        Point::new(c)
    }

    pub fn with_coord(&self, i: usize, value: f64) -> Result<Point> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.dim(),
            });
        }
        let mut c = self.0.clone();
        c[i] = value;
        Point::new(c)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Convenience constructor for literals in tests and examples.
///
/// # Panics
/// Panics if a coordinate is not finite.
pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).expect("finite coordinates")
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[inline]
pub(crate) fn sup_dist_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `max_i |x_i − y_i|`; zero for the empty point.
pub fn sup_dist(x: &Point, y: &Point) -> Result<f64> {
    x.sup_dist(y)
}

/// Writes `x̂_i` into `out` without allocating.
#[inline]
pub(crate) fn hat_into(x: &[f64], i: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend_from_slice(&x[..i]);
    out.extend_from_slice(&x[i + 1..]);
}

/// A real number or one of the two infinities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    fn le(self, other: ExtendedReal) -> bool {
        use ExtendedReal::*;
        match (self, other) {
            (NegInf, _) | (_, PosInf) => true,
            (PosInf, _) | (_, NegInf) => false,
            (Finite(a), Finite(b)) => a <= b,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::NegInf => s.serialize_str("-inf"),
            ExtendedReal::PosInf => s.serialize_str("+inf"),
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtendedReal::Finite(v)),
            Raw::Num(_) => Err(de::Error::custom("non-finite number")),
            Raw::Str(s) => match s.as_str() {
                "-inf" => Ok(ExtendedReal::NegInf),
                "+inf" => Ok(ExtendedReal::PosInf),
                other => Err(de::Error::custom(format!(
                    "expected a number, \"-inf\" or \"+inf\", got {other:?}"
                ))),
            },
        }
    }
}

/// `p([a,b], x) = min{max{a,x}, b}`.
pub fn clamp(a: ExtendedReal, b: ExtendedReal, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("clamp argument"));
    }
    if a == ExtendedReal::PosInf || b == ExtendedReal::NegInf {
        return Err(Error::InvalidParameter(format!(
            "interval [{a}, {b}] has an infinite endpoint on the wrong side"
        )));
    }
    if !a.le(b) {
        return Err(Error::EmptyInterval {
            lower: a.finite().unwrap_or(f64::NEG_INFINITY),
            upper: b.finite().unwrap_or(f64::INFINITY),
        });
    }
    Ok(project(a.finite(), b.finite(), x))
}

/// Clamp with optional (absent = infinite) endpoints. Callers guarantee
/// `lo <= hi` when both are present.
#[inline]
pub(crate) fn project(lo: Option<f64>, hi: Option<f64>, x: f64) -> f64 {
    let mut y = x;
    if let Some(lo) = lo {
        if y < lo {
            y = lo;
        }
    }
    if let Some(hi) = hi {
        if y > hi {
            y = hi;
        }
    }
    y
}

/// Orientation of an axis cone, a distance cone, or an infinite bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The axis cone `C(apex, ±i)`: for `+`, the points `apex + b·e_i + y`
/// with `b ≥ 0`, `y ⊥ e_i` and `‖y‖ ≤ b`; `−` mirrors along `e_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeDescriptor {
    pub apex: Point,
    pub axis: usize,
    pub sign: Sign,
}

impl ConeDescriptor {
    pub fn new(apex: Point, axis: usize, sign: Sign) -> Result<Self> {
        if axis >= apex.dim() {
            return Err(Error::IndexOutOfRange {
                index: axis,
                len: apex.dim(),
            });
        }
        Ok(ConeDescriptor { apex, axis, sign })
    }

    /// Membership; boundary points count unless `strict` is set.
    pub fn contains(&self, q: &Point, strict: bool) -> Result<bool> {
        check_dims(self.apex.dim(), q.dim())?;
        let a = self.apex.coords();
        let q = q.coords();
        let t = self.sign.factor() * (q[self.axis] - a[self.axis]);
        let off = a
            .iter()
            .zip(q)
            .enumerate()
            .filter(|(j, _)| *j != self.axis)
            .fold(0.0f64, |m, (_, (x, y))| m.max((x - y).abs()));
        Ok(if strict {
            t > 0.0 && off < t
        } else {
            t >= 0.0 && off <= t
        })
    }
}

/// Metric cone membership `d(p,q) = d(p,x) + d(x,q)` up to `tol`.
pub fn cone_contains_general(p: &Point, x: &Point, q: &Point, tol: f64) -> Result<bool> {
    let pq = p.sup_dist(q)?;
    let px = p.sup_dist(x)?;
    let xq = x.sup_dist(q)?;
    Ok((pq - px - xq).abs() <= tol)
}

/// `max_{a∈A} min_{b∈B} ‖a − b‖`.
pub fn directed_hausdorff(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("Hausdorff distance of an empty set"));
    }
    let n = a[0].dim();
    for p in a.iter().chain(b) {
        check_dims(n, p.dim())?;
    }
    Ok(a.iter()
        .map(|p| {
            b.iter()
                .map(|q| sup_dist_slices(p.coords(), q.coords()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// One violated metric axiom, with 0-based witness indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    NotSquare {
        row: usize,
        len: usize,
    },
    NonFinite {
        i: usize,
        j: usize,
    },
    Diagonal {
        i: usize,
        value: f64,
    },
    Symmetry {
        i: usize,
        j: usize,
    },
    Positivity {
        i: usize,
        j: usize,
    },
    /// `d(x,y) > d(x,via) + d(via,y)`.
    Triangle {
        x: usize,
        via: usize,
        y: usize,
        excess: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub violations: Vec<AxiomViolation>,
}

impl MetricReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated metric axiom. Shape and finiteness problems stop the
/// scan early since the remaining checks would be meaningless.
pub fn check_metric_axioms(d: &[Vec<f64>], tol: f64) -> MetricReport {
    let m = d.len();
    let mut violations = Vec::new();
    for (row, r) in d.iter().enumerate() {
        if r.len() != m {
            violations.push(AxiomViolation::NotSquare { row, len: r.len() });
        }
    }
    if !violations.is_empty() {
        return MetricReport { violations };
    }
    for i in 0..m {
        for j in 0..m {
            if !d[i][j].is_finite() {
                violations.push(AxiomViolation::NonFinite { i, j });
            }
        }
    }
    if !violations.is_empty() {
        return MetricReport { violations };
    }
    for i in 0..m {
        if d[i][i].abs() > tol {
            violations.push(AxiomViolation::Diagonal { i, value: d[i][i] });
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if (d[i][j] - d[j][i]).abs() > tol {
                violations.push(AxiomViolation::Symmetry { i, j });
            }
            if d[i][j] <= 0.0 || d[j][i] <= 0.0 {
                violations.push(AxiomViolation::Positivity { i, j });
            }
        }
    }
    for x in 0..m {
        for y in (x + 1)..m {
            for via in 0..m {
                if via == x || via == y {
                    continue;
                }
                let excess = d[x][y] - d[x][via] - d[via][y];
                if excess > tol {
                    violations.push(AxiomViolation::Triangle { x, via, y, excess });
                }
            }
        }
    }
    MetricReport { violations }
}

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct FiniteMetricSpace {
    size: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let report = check_metric_axioms(&matrix, DEFAULT_TOL);
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidMetric(format!(
                "{} violation(s), first: {v:?}",
                report.violations.len()
            )));
        }
        let size = matrix.len();
        Ok(FiniteMetricSpace {
            size,
            dist: matrix.into_iter().flatten().collect(),
        })
    }

    /// The sup-norm distances among `points`.
    pub fn from_points(points: &[Point]) -> Result<Self> {
        let Some(first) = points.first() else {
            return FiniteMetricSpace::new(Vec::new());
        };
        let matrix = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| {
                        check_dims(first.dim(), q.dim())?;
                        Ok(sup_dist_slices(p.coords(), q.coords()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteMetricSpace::new(matrix)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }

    /// The distance function `d_x` as a row.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.size..(i + 1) * self.size]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.size {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.size,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(m: Vec<Vec<f64>>) -> Result<Self> {
        FiniteMetricSpace::new(m)
    }
}

impl From<FiniteMetricSpace> for Vec<Vec<f64>> {
    fn from(s: FiniteMetricSpace) -> Self {
        s.to_matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ExtendedReal::{Finite, NegInf};

    #[test]
    fn sup_dist_examples() {
        assert_eq!(sup_dist(&pt(&[0.0, 0.0]), &pt(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(sup_dist(&pt(&[1.0, -2.0]), &pt(&[4.0, 0.0])).unwrap(), 3.0);
        assert_eq!(sup_dist(&pt(&[2.5]), &pt(&[-1.0])).unwrap(), 3.5);
        assert_eq!(sup_dist(&Point::empty(), &Point::empty()).unwrap(), 0.0);
        assert!(matches!(
            sup_dist(&pt(&[1.0]), &pt(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hat_examples() {
        assert_eq!(pt(&[5.0, 7.0, 9.0]).hat(1).unwrap(), pt(&[5.0, 9.0]));
        assert_eq!(pt(&[3.0]).hat(0).unwrap(), Point::empty());
        assert_eq!(pt(&[1.0, 2.0]).hat(0).unwrap(), pt(&[2.0]));
        assert!(pt(&[1.0, 2.0]).hat(2).is_err());
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp(Finite(0.0), Finite(1.0), 2.0).unwrap(), 1.0);
        assert_eq!(clamp(NegInf, Finite(3.0), 5.0).unwrap(), 3.0);
        assert_eq!(clamp(Finite(-1.0), Finite(4.0), 0.5).unwrap(), 0.5);
        assert_eq!(clamp(NegInf, ExtendedReal::PosInf, -7.0).unwrap(), -7.0);
        assert!(matches!(
            clamp(Finite(2.0), Finite(1.0), 0.0),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn cone_examples() {
        let c = ConeDescriptor::new(pt(&[0.0, 0.0]), 0, Sign::Plus).unwrap();
        assert!(c.contains(&pt(&[2.0, 1.0]), false).unwrap());
        assert!(!c.contains(&pt(&[1.0, 2.0]), false).unwrap());
        assert!(!c.contains(&pt(&[1.0, 1.0]), true).unwrap());
        assert!(c.contains(&pt(&[1.0, 1.0]), false).unwrap());
        let m = ConeDescriptor::new(pt(&[0.0, 0.0]), 1, Sign::Minus).unwrap();
        assert!(m.contains(&pt(&[0.5, -3.0]), true).unwrap());
        assert!(!m.contains(&pt(&[0.0, 3.0]), false).unwrap());
    }

    #[test]
    fn general_cone_examples() {
        let (p, x) = (pt(&[0.0, 0.0]), pt(&[1.0, 0.0]));
        assert!(cone_contains_general(&p, &x, &pt(&[2.0, 0.0]), 1e-12).unwrap());
        // d(p,q) = 1 but d(p,x) + d(x,q) = 2.
        assert!(!cone_contains_general(&p, &x, &pt(&[0.0, 1.0]), 1e-12).unwrap());
        assert!(cone_contains_general(&p, &p, &p, 1e-12).unwrap());
    }

    #[test]
    fn hausdorff_examples() {
        let a = vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0])];
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let b = vec![pt(&[1.0, 0.0]), pt(&[0.0, 2.0])];
        assert_eq!(hausdorff_distance(&[pt(&[0.0, 0.0])], &b).unwrap(), 2.0);
        let a = vec![pt(&[0.0, 0.0]), pt(&[3.0, 0.0])];
        assert_eq!(hausdorff_distance(&a, &[pt(&[1.0, 0.0])]).unwrap(), 2.0);
        assert!(matches!(
            hausdorff_distance(&[], &a),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn metric_axiom_examples() {
        assert!(check_metric_axioms(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-12).is_valid());
        let m = vec![
            vec![0.0, 5.0, 1.0],
            vec![5.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let r = check_metric_axioms(&m, 1e-12);
        assert_eq!(
            r.violations,
            vec![AxiomViolation::Triangle {
                x: 0,
                via: 2,
                y: 1,
                excess: 3.0
            }]
        );
        let r = check_metric_axioms(&[vec![0.0, 1.0], vec![2.0, 0.0]], 1e-12);
        assert_eq!(r.violations, vec![AxiomViolation::Symmetry { i: 0, j: 1 }]);
        let r = check_metric_axioms(&[vec![0.0, 0.0], vec![0.0, 0.0]], 1e-12);
        assert_eq!(
            r.violations,
            vec![AxiomViolation::Positivity { i: 0, j: 1 }]
        );
        let r = check_metric_axioms(&[vec![0.0, 1.0]], 1e-12);
        assert!(matches!(r.violations[0], AxiomViolation::NotSquare { .. }));
    }

    #[test]
    fn metric_space_json_is_a_matrix() {
        let s: FiniteMetricSpace = serde_json::from_str("[[0,1],[1,0]]").unwrap();
        assert_eq!(s.dist(0, 1), 1.0);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[0.0,1.0],[1.0,0.0]]");
        assert!(serde_json::from_str::<FiniteMetricSpace>("[[0,1],[2,0]]").is_err());
    }

    #[test]
    fn extended_real_json() {
        let v: Vec<ExtendedReal> = serde_json::from_str(r#"["-inf", 1.5, "+inf"]"#).unwrap();
        assert_eq!(v, vec![NegInf, Finite(1.5), ExtendedReal::PosInf]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["-inf",1.5,"+inf"]"#);
        assert!(serde_json::from_str::<ExtendedReal>(r#""inf""#).is_err());
    }

    fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, n)
    }

    proptest! {
        #[test]
        fn clamp_is_jointly_one_lipschitz(
            a in -5.0..5.0f64, w in 0.0..5.0f64, x in -10.0..10.0f64,
            a2 in -5.0..5.0f64, w2 in 0.0..5.0f64, x2 in -10.0..10.0f64,
        ) {
            let (b, b2) = (a + w, a2 + w2);
            let lhs = (clamp(Finite(a), Finite(b), x).unwrap()
                - clamp(Finite(a2), Finite(b2), x2).unwrap()).abs();
            let rhs = (a - a2).abs().max((b - b2).abs()).max((x - x2).abs());
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn axis_cone_matches_metric_cone(
            n in 1usize..=4,
            seed in prop::collection::vec(-3.0..3.0f64, 8),
            axis_pick in 0usize..4,
            plus in any::<bool>(),
        ) {
            let x = Point::new(seed[..n].to_vec()).unwrap();
            let q = Point::new(seed[4..4 + n].to_vec()).unwrap();
            let axis = axis_pick % n;
            let sign = if plus { Sign::Plus } else { Sign::Minus };
            let cone = ConeDescriptor::new(x.clone(), axis, sign).unwrap();
            // C(x,+i) = C(x − e_i, x) and C(x,−i) = C(x + e_i, x).
            let p = x.shifted_along(axis, -sign.factor()).unwrap();
            let general = cone_contains_general(&p, &x, &q, 1e-12).unwrap();
            prop_assert_eq!(cone.contains(&q, false).unwrap(), general);
        }

        #[test]
        fn hat_then_insert_is_identity(c in coords(4), i in 0usize..4) {
            let p = Point::new(c).unwrap();
            let h = p.hat(i).unwrap();
            prop_assert_eq!(h.insert(i, p[i]).unwrap(), p);
        }

        #[test]
        fn hausdorff_is_symmetric_and_triangular(
            a in prop::collection::vec(coords(2), 1..6),
            b in prop::collection::vec(coords(2), 1..6),
            c in prop::collection::vec(coords(2), 1..6),
        ) {
            let to = |v: Vec<Vec<f64>>| v.into_iter().map(|c| Point::new(c).unwrap()).collect::<Vec<_>>();
            let (a, b, c) = (to(a), to(b), to(c));
            let ab = hausdorff_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
            let ac = hausdorff_distance(&a, &c).unwrap();
            let cb = hausdorff_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }
    }
}
