//! Recovering bound functions from a sampled set.
//!
//! Every exterior point `x` gets a margin
//! `ε(x) = max_p min_q (‖x − p‖ + ‖x − q‖ − ‖p − q‖)` over the inside sample
//! and an attaining `p_x`. The cone along the dominant coordinate of
//! `x − p_x`, with apex moved back by `a·ε(x)`, misses the sample and yields
//! one valid inequality `x_i ≤ ‖x̂_i − y‖ + apex_i` (or its mirror image).
//! The minimum (maximum) of these inequalities per coordinate are the
//! reconstructed upper (lower) bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxset::BoxLipschitzSet;
use crate::error::{Error, Result};
use crate::lipfun::LipExpr;
use crate::metric::{check_dims, sup_dist_slices, ConeDescriptor, Point, Sign};

/// Default cone-shrink constant.
pub const DEFAULT_A: f64 = 0.1;

/// Relative slack on the check `ε(x) ≤ 2·d(x, sample)`.
const EPSILON_BOUND_SLACK: f64 = 1e-12;

/// Inputs of a reconstruction. `membership` is the ground-truth oracle.
pub struct ReconstructionConfig<M> {
    pub a: f64,
    pub inside: Vec<Point>,
    pub exterior: Vec<Point>,
    pub membership: M,
}

impl<M: Fn(&Point) -> bool + Sync> ReconstructionConfig<M> {
    pub fn new(a: f64, inside: Vec<Point>, exterior: Vec<Point>, membership: M) -> Result<Self> {
        let cfg = ReconstructionConfig {
            a,
            inside,
            exterior,
            membership,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 0.125) {
            return Err(Error::InvalidParameter(format!(
                "cone constant a = {} outside (0, 1/8)",
                self.a
            )));
        }
        let Some(first) = self.inside.first() else {
            return Err(Error::EmptyInput("inside sample"));
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::EmptyInput("zero-dimensional sample"));
        }
        for p in self.inside.iter().chain(&self.exterior) {
            check_dims(n, p.dim())?;
        }
        if let Some(k) = self.exterior.iter().position(|x| (self.membership)(x)) {
            return Err(Error::ExteriorInside(k));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.inside[0].dim()
    }
}

/// `(ε(x), p_x)` over a finite sample; the first maximiser is returned.
pub fn epsilon_of(sample: &[Point], x: &Point) -> Result<(f64, Point)> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("inside sample"));
    }
    for q in sample {
        check_dims(x.dim(), q.dim())?;
    }
    let xs = x.coords();
    let to_x: Vec<f64> = sample
        .iter()
        .map(|q| sup_dist_slices(xs, q.coords()))
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_p = 0;
    for (k, p) in sample.iter().enumerate() {
        let worst = sample
            .iter()
            .zip(&to_x)
            .map(|(q, dq)| to_x[k] + dq - sup_dist_slices(p.coords(), q.coords()))
            .fold(f64::INFINITY, f64::min);
        if worst > best {
            best = worst;
            best_p = k;
        }
    }
    if best <= 0.0 {
        return Err(Error::InsideSet);
    }
    let dist = to_x.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(
        best <= 2.0 * dist + EPSILON_BOUND_SLACK * (1.0 + dist),
        "margin {best} exceeds twice the distance {dist} to the sample"
    );
    Ok((best, sample[best_p].clone()))
}

/// The cone `C(x − s·a·ε·e_i, s·i)` where `i` is the first coordinate of
/// largest `|x_i − p_i|` and `s` its sign.
pub fn choose_cone(x: &Point, p: &Point, epsilon: f64, a: f64) -> Result<ConeDescriptor> {
    check_dims(x.dim(), p.dim())?;
    let mut axis = 0;
    let mut gap = -1.0;
    for (i, (xi, pi)) in x.coords().iter().zip(p.coords()).enumerate() {
        if (xi - pi).abs() > gap {
            gap = (xi - pi).abs();
            axis = i;
        }
    }
    if gap <= 0.0 {
        return Err(Error::InvalidParameter(
            "x coincides with its witness p_x".into(),
        ));
    }
    let sign = if x[axis] > p[axis] {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let apex = x.shifted_along(axis, -sign.factor() * a * epsilon)?;
    let cone = ConeDescriptor::new(apex, axis, sign)?;
    assert!(
        cone.contains(x, true)?,
        "exterior point is not interior to its own cone"
    );
    Ok(cone)
}

/// One exterior sample with its margin, witness and cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenCone {
    pub exterior: usize,
    pub epsilon: f64,
    pub witness: Point,
    pub cone: ConeDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub set: BoxLipschitzSet,
    pub cones: Vec<ChosenCone>,
}

/// The inequality contributed by a cone, as a bound on coordinate `axis`.
fn cone_bound(cone: &ConeDescriptor) -> Result<LipExpr> {
    let center = cone.apex.hat(cone.axis)?;
    Ok(LipExpr::distcone(
        center,
        cone.apex[cone.axis],
        1.0,
        cone.sign,
    ))
}

/// Builds the reconstructed set and checks every cone against the inside
/// sample.
pub fn synthesize_bounds<M: Fn(&Point) -> bool + Sync>(
    cfg: &ReconstructionConfig<M>,
) -> Result<Reconstruction> {
    cfg.validate()?;
    let n = cfg.dim();
    let cones = cfg
        .exterior
        .par_iter()
        .enumerate()
        .map(|(k, x)| {
            let (epsilon, witness) = epsilon_of(&cfg.inside, x)?;
            let cone = choose_cone(x, &witness, epsilon, cfg.a)?;
            for (j, q) in cfg.inside.iter().enumerate() {
                if cone.contains(q, false)? {
                    return Err(Error::ConeMeetsSet {
                        exterior: k,
                        inside: j,
                    });
                }
            }
            Ok(ChosenCone {
                exterior: k,
                epsilon,
                witness,
                cone,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut uppers: Vec<Vec<LipExpr>> = vec![Vec::new(); n];
    let mut lowers: Vec<Vec<LipExpr>> = vec![Vec::new(); n];
    for c in &cones {
        let bound = cone_bound(&c.cone)?;
        match c.cone.sign {
            Sign::Plus => uppers[c.cone.axis].push(bound),
            Sign::Minus => lowers[c.cone.axis].push(bound),
        }
    }
    let upper = uppers
        .into_iter()
        .map(|family| {
            if family.is_empty() {
                LipExpr::infinite(Sign::Plus)
            } else {
                LipExpr::Min { children: family }
            }
        })
        .collect();
    let lower = lowers
        .into_iter()
        .map(|family| {
            if family.is_empty() {
                LipExpr::infinite(Sign::Minus)
            } else {
                LipExpr::Max { children: family }
            }
        })
        .collect();
    Ok(Reconstruction {
        set: BoxLipschitzSet::new(lower, upper)?,
        cones,
    })
}

/// Grid points where the reconstructed set and the oracle disagree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checked: usize,
    /// Outside per the oracle, yet satisfying every reconstructed inequality.
    pub false_inside: Vec<Point>,
    /// Inside per the oracle, yet violating a reconstructed inequality.
    pub false_outside: Vec<Point>,
    /// Points where a reconstructed lower bound exceeds the upper bound.
    pub inconsistent: Vec<Point>,
}

impl VerificationReport {
    pub fn is_exact(&self) -> bool {
        self.false_inside.is_empty()
            && self.false_outside.is_empty()
            && self.inconsistent.is_empty()
    }
}

/// Compares `violation(set, x) = 0` with the oracle on every grid point.
pub fn verify_reconstruction<M: Fn(&Point) -> bool + Sync>(
    membership: M,
    set: &BoxLipschitzSet,
    grid: &[Point],
) -> Result<VerificationReport> {
    enum Outcome {
        Agree,
        FalseInside,
        FalseOutside,
        Inconsistent,
    }
    let outcomes = grid
        .par_iter()
        .map(|x| {
            let truth = membership(x);
            match set.violation(x) {
                Ok(v) if truth && v > 0.0 => Ok(Outcome::FalseOutside),
                Ok(v) if !truth && v == 0.0 => Ok(Outcome::FalseInside),
                Ok(_) => Ok(Outcome::Agree),
                Err(Error::InconsistentBounds { .. }) => Ok(Outcome::Inconsistent),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport {
        checked: grid.len(),
        ..Default::default()
    };
    for (x, o) in grid.iter().zip(outcomes) {
        match o {
            Outcome::Agree => {}
            Outcome::FalseInside => report.false_inside.push(x.clone()),
            Outcome::FalseOutside => report.false_outside.push(x.clone()),
            Outcome::Inconsistent => report.inconsistent.push(x.clone()),
        }
    }
    Ok(report)
}
