//! Sets cut out by coordinate-wise Lipschitz bounds,
//! `Q = {x | lower_i(x̂_i) ≤ x_i ≤ upper_i(x̂_i) for all i}`,
//! and their 1-Lipschitz retractions.
//!
//! * [`BoxLipschitzSet::coord_retract`] clamps one coordinate into its
//!   admissible interval; it is a 1-Lipschitz retraction onto the set cut
//!   out by that coordinate's pair of bounds.
//! * [`BoxLipschitzSet::cyclic_retract`] composes the coordinate clamps
//!   cyclically. When every bound is λ-Lipschitz with λ < 1 the per-step
//!   displacements decay geometrically and the limit is a 1-Lipschitz
//!   retraction onto `Q`.
//! * For λ = 1 the iteration may cycle or drift. [`ShrunkSet`] replaces the
//!   bounds by `λ_k(bound − anchor) + anchor` with `λ_k = 1 − 1/k`, which
//!   enlarges `Q` slightly into a contracting instance; the retraction onto
//!   the enlarged set fixes `Q` and misses it by at most `(u − l)/k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lipfun::{AxisBox, LipExpr};
use crate::metric::{check_dims, hat_into, project, Point, Sign};

/// Stopping tolerance of the inner contracting iteration used by the λ = 1
/// strategies.
pub const DEFAULT_INNER_TOL: f64 = 1e-13;

/// Largest admissible shrink index `k`.
pub const MAX_SHRINK_INDEX: u64 = 1_000_000_000;

/// Rounding floor for the stopping rule, in units of machine epsilon times
/// the magnitude of the data.
const FLOOR_ULPS: f64 = 8.0;

/// Sweeps beyond the certified count before giving up.
const EXTRA_SWEEPS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct BoxLipschitzSet {
    n: usize,
    lower: Vec<LipExpr>,
    upper: Vec<LipExpr>,
    lambda: f64,
    magnitude: f64,
}

impl BoxLipschitzSet {
    pub fn new(lower: Vec<LipExpr>, upper: Vec<LipExpr>) -> Result<Self> {
        let n = lower.len();
        if n == 0 {
            return Err(Error::EmptyInput("set without coordinates"));
        }
        check_dims(n, upper.len())?;
        let mut lambda = 0.0f64;
        let mut magnitude = 0.0f64;
        for (bounds, sign) in [(&lower, Sign::Minus), (&upper, Sign::Plus)] {
            for (i, b) in bounds.iter().enumerate() {
                b.validate()?;
                match b {
                    LipExpr::Infinite { sign: s } if *s != sign => {
                        return Err(Error::InvalidExpression(format!(
                            "coordinate {i}: {s}inf cannot bound from the {} side",
                            if sign == Sign::Minus {
                                "lower"
                            } else {
                                "upper"
                            }
                        )));
                    }
                    LipExpr::Infinite { .. } => {}
                    _ => {
                        if let Some(d) = b.domain_dim() {
                            check_dims(n - 1, d)?;
                        }
                        lambda = lambda.max(b.lip_bound()?);
                        magnitude = magnitude.max(b.magnitude());
                    }
                }
            }
        }
        Ok(BoxLipschitzSet {
            n,
            lower,
            upper,
            lambda,
            magnitude,
        })
    }

    /// All of ℓ∞ⁿ.
    pub fn whole_space(n: usize) -> Result<Self> {
        BoxLipschitzSet::new(
            vec![LipExpr::infinite(Sign::Minus); n],
            vec![LipExpr::infinite(Sign::Plus); n],
        )
    }

    /// A product of closed intervals; `None` marks an infinite end.
    pub fn product(intervals: &[(Option<f64>, Option<f64>)]) -> Result<Self> {
        let lower = intervals
            .iter()
            .map(|(a, _)| a.map_or(LipExpr::infinite(Sign::Minus), LipExpr::constant))
            .collect();
        let upper = intervals
            .iter()
            .map(|(_, b)| b.map_or(LipExpr::infinite(Sign::Plus), LipExpr::constant))
            .collect();
        for (a, b) in intervals {
            if let (Some(a), Some(b)) = (a, b) {
                if a > b {
                    return Err(Error::EmptyInterval {
                        lower: *a,
                        upper: *b,
                    });
                }
            }
        }
        BoxLipschitzSet::new(lower, upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> &[LipExpr] {
        &self.lower
    }

    pub fn upper(&self) -> &[LipExpr] {
        &self.upper
    }

    /// `λ(Q)`: the largest syntactic Lipschitz bound among finite bounds.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn all_finite(&self) -> bool {
        self.lower
            .iter()
            .chain(&self.upper)
            .all(|b| !b.is_infinite())
    }

    pub fn all_infinite(&self) -> bool {
        self.lower
            .iter()
            .chain(&self.upper)
            .all(LipExpr::is_infinite)
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        check_dims(self.n, x.dim())
    }

    /// The admissible interval of coordinate `i` given `x̂_i`; `None` is an
    /// infinite end.
    fn interval_at(&self, i: usize, hat: &[f64]) -> Result<(Option<f64>, Option<f64>)> {
        let lo = (!self.lower[i].is_infinite()).then(|| self.lower[i].value_at(hat));
        let hi = (!self.upper[i].is_infinite()).then(|| self.upper[i].value_at(hat));
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo > hi {
                return Err(Error::InconsistentBounds {
                    coordinate: i,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok((lo, hi))
    }

    /// `max_i max(lower_i(x̂_i) − x_i, x_i − upper_i(x̂_i), 0)`.
    pub fn violation(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        let mut buf = Vec::with_capacity(self.n);
        let mut v = 0.0f64;
        for i in 0..self.n {
            hat_into(x.coords(), i, &mut buf);
            let (lo, hi) = self.interval_at(i, &buf)?;
            let xi = x.coords()[i];
            if let Some(lo) = lo {
                v = v.max(lo - xi);
            }
            if let Some(hi) = hi {
                v = v.max(xi - hi);
            }
        }
        Ok(v)
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.violation(x)? == 0.0)
    }

    /// Clamps coordinate `i` into `[lower_i(x̂_i), upper_i(x̂_i)]`.
    pub fn coord_retract(&self, i: usize, x: &Point) -> Result<Point> {
        self.check_point(x)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        let mut c = x.coords().to_vec();
        let mut buf = Vec::with_capacity(self.n);
        hat_into(&c, i, &mut buf);
        let (lo, hi) = self.interval_at(i, &buf)?;
        c[i] = project(lo, hi, c[i]);
        Ok(Point(c))
    }

    /// Applies one coordinate clamp in place and returns the signed
    /// displacement.
    #[inline]
    fn step(&self, i: usize, x: &mut [f64], buf: &mut Vec<f64>) -> Result<f64> {
        hat_into(x, i, buf);
        let (lo, hi) = self.interval_at(i, buf)?;
        let new = project(lo, hi, x[i]);
        let d = new - x[i];
        x[i] = new;
        Ok(d)
    }

    /// Runs `steps` coordinate clamps `φ_[1], φ_[2], …` with no convergence
    /// requirement. Used to expose non-contracting behaviour.
    pub fn cyclic_iterate(&self, x: &Point, steps: usize) -> Result<IterationTrace> {
        self.check_point(x)?;
        let mut c = x.coords().to_vec();
        let mut buf = Vec::with_capacity(self.n);
        let mut displacements = Vec::with_capacity(steps);
        for m in 0..steps {
            displacements.push(self.step(m % self.n, &mut c, &mut buf)?);
        }
        Ok(IterationTrace {
            n: self.n,
            lambda: self.lambda,
            start: x.clone(),
            displacements,
            end: Point(c),
        })
    }

    /// Cyclic retraction for `λ(Q) < 1`.
    ///
    /// Stops once the last `n` displacements are at most `tol·(1 − λ)`; the
    /// geometric tail then keeps the returned point within `tol` of the limit
    /// and its violation below `λ·tol·(1 − λ)`. Without `max_sweeps` the cap
    /// is derived from the decay certificate `|d_m| ≤ D·λ^{(m−1) div n}`.
    pub fn cyclic_retract(
        &self,
        x: &Point,
        tol: f64,
        max_sweeps: Option<usize>,
    ) -> Result<(Point, IterationTrace)> {
        self.check_point(x)?;
        let lambda = self.lambda;
        if lambda >= 1.0 {
            return Err(Error::NotContracting { lambda });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let n = self.n;
        let noise = FLOOR_ULPS * f64::EPSILON * (1.0 + x.norm() + self.magnitude);
        let threshold = (tol * (1.0 - lambda)).max(noise);
        let mut limit = max_sweeps.map(|s| s.max(1) * n);
        let mut c = x.coords().to_vec();
        let mut buf = Vec::with_capacity(n);
        let mut displacements = Vec::new();
        let mut m = 0usize;
        loop {
            displacements.push(self.step(m % n, &mut c, &mut buf)?);
            m += 1;
            if m < n {
                continue;
            }
            let recent = displacements[m - n..]
                .iter()
                .fold(0.0f64, |a, d| a.max(d.abs()));
            if recent <= threshold {
                break;
            }
            if m == n && limit.is_none() {
                let sweeps = if lambda == 0.0 {
                    1
                } else {
                    ((threshold / recent).ln() / lambda.ln()).ceil().max(1.0) as usize
                };
                limit = Some((sweeps + 1 + EXTRA_SWEEPS) * n);
            }
            if limit.is_some_and(|l| m >= l) {
                // Rounding can keep the displacements hovering a few ulps
                // above the floor; accept that as converged.
                if recent <= noise / (1.0 - lambda) {
                    break;
                }
                return Err(Error::MaxSweepsExceeded {
                    sweeps: m / n,
                    last: recent,
                });
            }
        }
        let end = Point(c);
        Ok((
            end.clone(),
            IterationTrace {
                n,
                lambda,
                start: x.clone(),
                displacements,
                end,
            },
        ))
    }

    /// Per coordinate, the common enclosure `[l_i, u_i]` of both bounds over
    /// the box with coordinate `i` removed.
    pub fn enclosures(&self, bx: &AxisBox) -> Result<Vec<(f64, f64)>> {
        check_dims(self.n, bx.dim())?;
        (0..self.n)
            .map(|i| {
                if self.lower[i].is_infinite() || self.upper[i].is_infinite() {
                    return Err(Error::InfiniteBound { coordinate: i });
                }
                let face = bx.hat(i)?;
                let (a, b) = self.lower[i].bounds_of(&face)?;
                let (c, d) = self.upper[i].bounds_of(&face)?;
                let (lo, hi) = (a.min(c), b.max(d));
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Unbounded { coordinate: i });
                }
                Ok((lo, hi))
            })
            .collect()
    }

    /// The shrunk set `Q_k` over the working box.
    ///
    /// Coordinates whose bounds are already `λ_k`-Lipschitz are kept as they
    /// are. For the others both bounds are first clamped to the common
    /// enclosure `[l_i, u_i]` (a no-op over the box), then every bound steeper
    /// than `λ_k` becomes `λ_k(bound − u_i) + u_i` (upper) or
    /// `λ_k(bound − l_i) + l_i` (lower).
    pub fn shrunk(&self, k: u64, bx: &AxisBox) -> Result<ShrunkSet> {
        if k == 0 || k > MAX_SHRINK_INDEX {
            return Err(Error::InvalidParameter(format!(
                "shrink index {k} outside 1..={MAX_SHRINK_INDEX}"
            )));
        }
        if self.lambda > 1.0 {
            return Err(Error::NotNonexpansive {
                lambda: self.lambda,
            });
        }
        let enc = self.enclosures(bx)?;
        let l = enc.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let u = enc.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let lambda_k = 1.0 - 1.0 / k as f64;
        let mut lower = Vec::with_capacity(self.n);
        let mut upper = Vec::with_capacity(self.n);
        for (i, &(li, ui)) in enc.iter().enumerate() {
            let (lo, hi) = (&self.lower[i], &self.upper[i]);
            let (lo_lip, hi_lip) = (lo.lip_bound()?, hi.lip_bound()?);
            if lo_lip <= lambda_k && hi_lip <= lambda_k {
                lower.push(lo.clone());
                upper.push(hi.clone());
                continue;
            }
            let lo_t = lo.clone().clamped(li, ui);
            let hi_t = hi.clone().clamped(li, ui);
            lower.push(if lo_lip > lambda_k {
                lo_t.shrink(lambda_k, li)?
            } else {
                lo_t
            });
            upper.push(if hi_lip > lambda_k {
                hi_t.shrink(lambda_k, ui)?
            } else {
                hi_t
            });
        }
        Ok(ShrunkSet {
            set: BoxLipschitzSet::new(lower, upper)?,
            k,
            lambda_k,
            l,
            u,
        })
    }

    /// `Q_k` with `k = ceil((u − l)/tol) + 1`, so that `(u − l)/k < tol`.
    pub fn shrunk_for_tol(&self, tol: f64, bx: &AxisBox) -> Result<ShrunkSet> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let enc = self.enclosures(bx)?;
        let l = enc.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let u = enc.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let k = ((u - l) / tol).ceil() + 1.0;
        if !(k <= MAX_SHRINK_INDEX as f64) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {tol} too small for a bound range of {}",
                u - l
            )));
        }
        self.shrunk(k as u64, bx)
    }

    /// Retraction for `λ(Q) ≤ 1` with finite bounds, computed on the shrunk
    /// set built over the working box `bx`.
    pub fn retract_lambda_one_bounded(
        &self,
        x: &Point,
        tol: f64,
        bx: &AxisBox,
    ) -> Result<ShrunkRetraction> {
        self.check_point(x)?;
        let shrunk = self.shrunk_for_tol(tol, bx)?;
        shrunk.retract(x, DEFAULT_INNER_TOL)
    }

    /// `Q ∩ B(witness, r)`, written with clamped bounds
    /// `p([w_i − r, w_i + r], bound_i)`; infinite bounds become the faces of
    /// the ball. Requires `witness ∈ Q`.
    pub fn truncated(&self, witness: &Point, r: f64) -> Result<BoxLipschitzSet> {
        self.check_point(witness)?;
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("truncation radius {r}")));
        }
        let violation = self.violation(witness)?;
        if violation != 0.0 {
            return Err(Error::NotInSet { violation });
        }
        let clamp_bound = |b: &LipExpr, i: usize| {
            let (lo, hi) = (witness[i] - r, witness[i] + r);
            match b {
                LipExpr::Infinite { sign: Sign::Minus } => LipExpr::constant(lo),
                LipExpr::Infinite { sign: Sign::Plus } => LipExpr::constant(hi),
                f => f.clone().clamped(lo, hi),
            }
        };
        BoxLipschitzSet::new(
            self.lower
                .iter()
                .enumerate()
                .map(|(i, b)| clamp_bound(b, i))
                .collect(),
            self.upper
                .iter()
                .enumerate()
                .map(|(i, b)| clamp_bound(b, i))
                .collect(),
        )
    }

    /// Retraction for `λ(Q) ≤ 1` given a point of `Q`: truncates to the ball
    /// of radius `2‖x − witness‖ + 1` around the witness and retracts onto
    /// the shrunk truncated set.
    pub fn retract_lambda_one_general(
        &self,
        witness: &Point,
        x: &Point,
        tol: f64,
    ) -> Result<ShrunkRetraction> {
        self.check_point(x)?;
        let r = 2.0 * witness.sup_dist(x)? + 1.0;
        self.retract_truncated(witness, r, x, tol)
    }

    /// As [`BoxLipschitzSet::retract_lambda_one_general`] with an explicit
    /// radius. A fixed radius gives one retraction for many points.
    pub fn retract_truncated(
        &self,
        witness: &Point,
        r: f64,
        x: &Point,
        tol: f64,
    ) -> Result<ShrunkRetraction> {
        if self.lambda > 1.0 {
            return Err(Error::NotNonexpansive {
                lambda: self.lambda,
            });
        }
        let trunc = self.truncated(witness, r)?;
        let mut out = trunc.retract_lambda_one_bounded(x, tol, &AxisBox::ball(witness, r)?)?;
        out.radius = Some(r);
        Ok(out)
    }

    /// A box containing `Q` when every bound is bounded on all of ℓ∞^{n−1}.
    pub fn global_box(&self) -> Result<Option<AxisBox>> {
        if !self.all_finite() {
            return Ok(None);
        }
        let everywhere = AxisBox::unbounded(self.n);
        match self.enclosures(&everywhere) {
            Ok(enc) => Ok(Some(AxisBox::new(
                enc.iter().map(|e| e.0).collect(),
                enc.iter().map(|e| e.1).collect(),
            )?)),
            Err(Error::Unbounded { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// A point of `Q`, found by retracting the origin.
    ///
    /// For λ = 1 sets with unbounded bounds no witness-free method applies;
    /// a short diagnostic run reports [`Error::Stalled`] when the iteration
    /// visibly fails to contract and [`Error::Unsupported`] otherwise.
    pub fn find_point(&self, tol: f64) -> Result<Point> {
        let origin = Point::zeros(self.n);
        if self.lambda < 1.0 {
            return Ok(self.cyclic_retract(&origin, tol, None)?.0);
        }
        if self.lambda > 1.0 {
            return Err(Error::NotNonexpansive {
                lambda: self.lambda,
            });
        }
        if let Some(bx) = self.global_box()? {
            return Ok(self.retract_lambda_one_bounded(&origin, tol, &bx)?.point);
        }
        match self.diagnose(&origin)? {
            (Verdict::Stalled, _) => Err(Error::Stalled {
                window: default_window(self.n),
            }),
            (Verdict::Decaying, _) => Err(Error::Unsupported(
                "λ = 1 with unbounded bounds needs a witness point".into(),
            )),
        }
    }

    /// Runs a fixed number of plain cyclic steps and classifies the decay.
    pub fn diagnose(&self, x: &Point) -> Result<(Verdict, IterationTrace)> {
        let window = default_window(self.n);
        let trace = self.cyclic_iterate(x, DIAGNOSTIC_WINDOWS * window)?;
        Ok((detect_noncontraction(&trace, window)?, trace))
    }
}

/// Length of the diagnostic run in windows.
pub const DIAGNOSTIC_WINDOWS: usize = 16;

/// `4n`: two periods of the slowest known non-contracting orbit.
pub fn default_window(n: usize) -> usize {
    4 * n
}

/// `Q_k` together with the data that certify it.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrunkSet {
    pub set: BoxLipschitzSet,
    pub k: u64,
    pub lambda_k: f64,
    /// Smallest bound value over the working box.
    pub l: f64,
    /// Largest bound value over the working box.
    pub u: f64,
}

impl ShrunkSet {
    /// Points of `Q_k` violate the truncated `Q` by at most this much.
    pub fn violation_bound(&self) -> f64 {
        (self.u - self.l) / self.k as f64
    }

    pub fn retract(&self, x: &Point, inner_tol: f64) -> Result<ShrunkRetraction> {
        let (point, trace) = self.set.cyclic_retract(x, inner_tol, None)?;
        Ok(ShrunkRetraction {
            point,
            trace,
            k: self.k,
            lambda_k: self.lambda_k,
            l: self.l,
            u: self.u,
            radius: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrunkRetraction {
    pub point: Point,
    pub trace: IterationTrace,
    pub k: u64,
    pub lambda_k: f64,
    pub l: f64,
    pub u: f64,
    /// Truncation radius, when the set was cut to a ball first.
    pub radius: Option<f64>,
}

impl ShrunkRetraction {
    pub fn violation_bound(&self) -> f64 {
        (self.u - self.l) / self.k as f64
    }
}

/// The signed per-step displacements of a cyclic run: step `m` (1-based)
/// moves coordinate `(m − 1) mod n` by `d_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub n: usize,
    /// Lipschitz bound of the set the trace was produced on.
    pub lambda: f64,
    pub start: Point,
    pub displacements: Vec<f64>,
    pub end: Point,
}

/// A step at which a decay bound fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateViolation {
    /// 1-based step index.
    pub step: usize,
    pub bound: DecayBound,
    pub displacement: f64,
    pub limit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayBound {
    /// `|d_m| ≤ λ·max{|d_{m−n+1}|, …, |d_{m−1}|}`.
    Window,
    /// `|d_m| ≤ D·λ^{(m−1) div n}`.
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub steps: usize,
    pub sweeps: usize,
    pub initial_block_max: f64,
    pub last_block_max: f64,
}

impl IterationTrace {
    pub fn steps(&self) -> usize {
        self.displacements.len()
    }

    /// 0-based coordinate moved at 1-based step `m`.
    pub fn coordinate(&self, m: usize) -> usize {
        (m - 1) % self.n
    }

    /// `D = max{|d_1|, …, |d_n|}`.
    pub fn initial_block_max(&self) -> f64 {
        self.displacements
            .iter()
            .take(self.n)
            .fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn last_block_max(&self) -> f64 {
        let m = self.steps();
        self.displacements[m.saturating_sub(self.n)..]
            .iter()
            .fold(0.0, |a, d| a.max(d.abs()))
    }

    /// Checks both decay bounds with additive `slack`, using `self.lambda`.
    pub fn check_certificate(&self, slack: f64) -> Option<CertificateViolation> {
        let n = self.n;
        let lambda = self.lambda;
        let big_d = self.initial_block_max();
        let d = &self.displacements;
        for m in 1..=d.len() {
            let dm = d[m - 1].abs();
            let geometric = big_d * lambda.powi(((m - 1) / n) as i32);
            if dm > geometric + slack {
                return Some(CertificateViolation {
                    step: m,
                    bound: DecayBound::Geometric,
                    displacement: dm,
                    limit: geometric,
                });
            }
            if m > n {
                // Steps m − n + 1 ..= m − 1, i.e. indices m − n ..= m − 2.
                let window = d[m - n..m - 1].iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if dm > lambda * window + slack {
                    return Some(CertificateViolation {
                        step: m,
                        bound: DecayBound::Window,
                        displacement: dm,
                        limit: lambda * window,
                    });
                }
            }
        }
        None
    }

    /// The iterates `Φ_0(x), Φ_1(x), …` rebuilt from the displacements.
    pub fn iterates(&self) -> Vec<Point> {
        let mut x = self.start.coords().to_vec();
        let mut out = Vec::with_capacity(self.steps() + 1);
        out.push(Point(x.clone()));
        for (k, d) in self.displacements.iter().enumerate() {
            x[k % self.n] += d;
            out.push(Point(x.clone()));
        }
        out
    }

    /// CSV with columns `m, i, d` where `i = ((m − 1) mod n) + 1` is 1-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,i,d\n");
        for (k, d) in self.displacements.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", k + 1, k % self.n + 1, d));
        }
        s
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            steps: self.steps(),
            sweeps: self.steps().div_ceil(self.n),
            initial_block_max: self.initial_block_max(),
            last_block_max: self.last_block_max(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Decaying,
    Stalled,
}

/// `Stalled` iff the largest displacement in the last `window` steps is at
/// least `(1 − 1e-9)` times the largest in the window before. A trace that
/// was already at rest in the earlier window counts as decaying.
pub fn detect_noncontraction(trace: &IterationTrace, window: usize) -> Result<Verdict> {
    let m = trace.steps();
    if window == 0 || m < 2 * window {
        return Err(Error::InvalidParameter(format!(
            "trace of {m} steps is shorter than two windows of {window}"
        )));
    }
    let max_abs = |s: &[f64]| s.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let last = max_abs(&trace.displacements[m - window..]);
    let prev = max_abs(&trace.displacements[m - 2 * window..m - window]);
    if prev == 0.0 {
        return Ok(Verdict::Decaying);
    }
    Ok(if last >= (1.0 - 1e-9) * prev {
        Verdict::Stalled
    } else {
        Verdict::Decaying
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBound {
    Infinite(String),
    Expr(LipExpr),
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    n: usize,
    lower: Vec<RawBound>,
    upper: Vec<RawBound>,
}

impl Serialize for BoxLipschitzSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |b: &LipExpr| match b {
            LipExpr::Infinite { sign } => RawBound::Infinite(format!("{sign}inf")),
            e => RawBound::Expr(e.clone()),
        };
        RawSet {
            n: self.n,
            lower: self.lower.iter().map(conv).collect(),
            upper: self.upper.iter().map(conv).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoxLipschitzSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSet::deserialize(d)?;
        let conv = |b: RawBound, want: &str, sign: Sign| match b {
            RawBound::Infinite(s) if s == want => Ok(LipExpr::infinite(sign)),
            RawBound::Infinite(s) => {
                Err(D::Error::custom(format!("expected \"{want}\", got {s:?}")))
            }
            RawBound::Expr(e) => Ok(e),
        };
        let lower = raw
            .lower
            .into_iter()
            .map(|b| conv(b, "-inf", Sign::Minus))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let upper = raw
            .upper
            .into_iter()
            .map(|b| conv(b, "+inf", Sign::Plus))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if lower.len() != raw.n {
            return Err(D::Error::custom(format!(
                "\"n\" is {} but {} lower bounds were given",
                raw.n,
                lower.len()
            )));
        }
        BoxLipschitzSet::new(lower, upper).map_err(D::Error::custom)
    }
}
