//! Extension of 1-Lipschitz maps from a subset `A` of a finite metric space
//! `B` into a set `Q ⊆ ℓ∞ⁿ`: extend every coordinate by the McShane formula
//! `Φ̄(b) = min_a (Φ(a) + d(a, b))`, then retract the image onto `Q`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxset::{BoxLipschitzSet, ShrunkSet, DEFAULT_INNER_TOL};
use crate::error::{Error, Result};
use crate::lipfun::{AxisBox, LIPSCHITZ_SLACK};
use crate::metric::{check_dims, sup_dist_slices, FiniteMetricSpace, Point};

/// Largest violation of `Q` accepted for the prescribed values `Φ(a)`.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

fn check_subset(space: &FiniteMetricSpace, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptyInput("extension subset"));
    }
    for (k, &a) in subset.iter().enumerate() {
        space.check_index(a)?;
        if subset[..k].contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "index {a} repeated in the subset"
            )));
        }
    }
    Ok(())
}

fn lipschitz_slack(u: f64, v: f64) -> f64 {
    LIPSCHITZ_SLACK * 1f64.max(u.abs()).max(v.abs())
}

/// Checks `|values(a) − values(a′)| ≤ d(a, a′)` on the subset; the error
/// names the worst pair by their indices in `B`.
pub fn check_lipschitz_values(
    space: &FiniteMetricSpace,
    subset: &[usize],
    values: &[f64],
) -> Result<()> {
    check_subset(space, subset)?;
    check_dims(subset.len(), values.len())?;
    let mut worst: Option<(usize, usize, f64)> = None;
    for j in 0..subset.len() {
        for k in j + 1..subset.len() {
            let excess = (values[j] - values[k]).abs() - space.dist(subset[j], subset[k]);
            if excess > lipschitz_slack(values[j], values[k])
                && worst.is_none_or(|(_, _, e)| excess > e)
            {
                worst = Some((subset[j], subset[k], excess));
            }
        }
    }
    match worst {
        None => Ok(()),
        Some((first, second, excess)) => Err(Error::NotLipschitz {
            first,
            second,
            excess,
        }),
    }
}

/// `min_{a∈A} (values(a) + d(a, b))`: the largest 1-Lipschitz extension.
pub fn mcshane_extend_component(
    space: &FiniteMetricSpace,
    subset: &[usize],
    values: &[f64],
    b: usize,
) -> Result<f64> {
    check_lipschitz_values(space, subset, values)?;
    space.check_index(b)?;
    Ok(inf_extension(space, subset, values, b))
}

/// `max_{a∈A} (values(a) − d(a, b))`: the smallest 1-Lipschitz extension.
pub fn minimal_extend_component(
    space: &FiniteMetricSpace,
    subset: &[usize],
    values: &[f64],
    b: usize,
) -> Result<f64> {
    check_lipschitz_values(space, subset, values)?;
    space.check_index(b)?;
    Ok(subset
        .iter()
        .zip(values)
        .map(|(&a, v)| v - space.dist(a, b))
        .fold(f64::NEG_INFINITY, f64::max))
}

fn inf_extension(space: &FiniteMetricSpace, subset: &[usize], values: &[f64], b: usize) -> f64 {
    if let Some(k) = subset.iter().position(|&a| a == b) {
        return values[k];
    }
    subset
        .iter()
        .zip(values)
        .map(|(&a, v)| v + space.dist(a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Which retraction onto `Q` the extension used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetractionMethod {
    /// All bounds infinite; the McShane extension is the answer.
    Identity,
    /// Cyclic coordinate retraction, `λ(Q) < 1`.
    Cyclic,
    /// Shrunk set over a box containing `Q`.
    ShrunkBounded,
    /// Shrunk set over `Q` truncated to a ball around a point of `Q`.
    ShrunkTruncated,
}

enum Retraction {
    Identity,
    Cyclic(BoxLipschitzSet),
    Shrunk(ShrunkSet),
}

impl Retraction {
    fn apply(&self, x: &Point, tol: f64) -> Result<Point> {
        match self {
            Retraction::Identity => Ok(x.clone()),
            Retraction::Cyclic(set) => Ok(set.cyclic_retract(x, tol, None)?.0),
            Retraction::Shrunk(s) => Ok(s.retract(x, DEFAULT_INNER_TOL)?.point),
        }
    }
}

/// Worst pair of the exhaustive 1-Lipschitz check of a map on `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSummary {
    pub pairs_checked: usize,
    /// `max (‖F(b) − F(b′)‖ − d(b, b′))` over all pairs; `≤ 0` when the
    /// map is 1-Lipschitz.
    pub max_excess: f64,
    pub worst_pair: Option<(usize, usize)>,
}

impl LipschitzSummary {
    pub fn passes(&self, slack: f64) -> bool {
        self.max_excess <= slack
    }
}

/// Compares `‖F(b) − F(b′)‖` with `d(b, b′)` over all pairs.
pub fn lipschitz_summary(space: &FiniteMetricSpace, map: &[Point]) -> Result<LipschitzSummary> {
    check_dims(space.size(), map.len())?;
    let mut summary = LipschitzSummary {
        pairs_checked: 0,
        max_excess: f64::NEG_INFINITY,
        worst_pair: None,
    };
    for i in 0..map.len() {
        for j in i + 1..map.len() {
            check_dims(map[i].dim(), map[j].dim())?;
            let excess = sup_dist_slices(map[i].coords(), map[j].coords()) - space.dist(i, j);
            summary.pairs_checked += 1;
            if excess > summary.max_excess {
                summary.max_excess = excess;
                summary.worst_pair = Some((i, j));
            }
        }
    }
    if summary.pairs_checked == 0 {
        summary.max_excess = 0.0;
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extension {
    /// Images of the points of `B`, in index order.
    pub points: Vec<Point>,
    /// `violation(Q, ·)` of every image.
    pub violations: Vec<f64>,
    pub method: RetractionMethod,
    pub lipschitz: LipschitzSummary,
}

/// Extends `Φ: A → Q` to a map `B → Q`, `Q` up to `tol`.
///
/// One retraction is prepared for all points of `B`, so the result is
/// 1-Lipschitz up to rounding. Points of `A` keep their prescribed images.
/// For `λ(Q) = 1` with unbounded bounds, `Q` is cut to a ball around a point
/// of `Q`: the first `Φ(a)` lying exactly in `Q`, or else `witness`.
pub fn extend_into_set(
    space: &FiniteMetricSpace,
    subset: &[usize],
    phi: &[Point],
    set: &BoxLipschitzSet,
    tol: f64,
    witness: Option<&Point>,
) -> Result<Extension> {
    check_subset(space, subset)?;
    check_dims(subset.len(), phi.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let n = set.n();
    for p in phi {
        check_dims(n, p.dim())?;
        let violation = set.violation(p)?;
        if violation > MEMBERSHIP_SLACK {
            return Err(Error::NotInSet { violation });
        }
    }
    check_map_lipschitz(space, subset, phi)?;

    let columns: Vec<Vec<f64>> = (0..n).map(|i| phi.iter().map(|p| p[i]).collect()).collect();
    let extended: Vec<Point> = (0..space.size())
        .into_par_iter()
        .map(|b| {
            Point(
                (0..n)
                    .map(|i| inf_extension(space, subset, &columns[i], b))
                    .collect(),
            )
        })
        .collect();

    let (retraction, method) = prepare_retraction(set, tol, phi, witness, &extended)?;
    let points = (0..space.size())
        .into_par_iter()
        .map(|b| match subset.iter().position(|&a| a == b) {
            Some(k) => Ok(phi[k].clone()),
            None => retraction.apply(&extended[b], tol),
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = points
        .iter()
        .map(|p| set.violation(p))
        .collect::<Result<Vec<_>>>()?;
    let lipschitz = lipschitz_summary(space, &points)?;
    Ok(Extension {
        points,
        violations,
        method,
        lipschitz,
    })
}

fn check_map_lipschitz(space: &FiniteMetricSpace, subset: &[usize], phi: &[Point]) -> Result<()> {
    for j in 0..subset.len() {
        for k in j + 1..subset.len() {
            let gap = sup_dist_slices(phi[j].coords(), phi[k].coords());
            let excess = gap - space.dist(subset[j], subset[k]);
            if excess > LIPSCHITZ_SLACK * 1f64.max(phi[j].norm()).max(phi[k].norm()) {
                return Err(Error::NotLipschitz {
                    first: subset[j],
                    second: subset[k],
                    excess,
                });
            }
        }
    }
    Ok(())
}

fn prepare_retraction(
    set: &BoxLipschitzSet,
    tol: f64,
    phi: &[Point],
    witness: Option<&Point>,
    extended: &[Point],
) -> Result<(Retraction, RetractionMethod)> {
    if set.all_infinite() {
        return Ok((Retraction::Identity, RetractionMethod::Identity));
    }
    let lambda = set.lambda();
    if lambda < 1.0 {
        return Ok((Retraction::Cyclic(set.clone()), RetractionMethod::Cyclic));
    }
    if lambda > 1.0 {
        return Err(Error::NotNonexpansive { lambda });
    }
    if let Some(bx) = set.global_box()? {
        return Ok((
            Retraction::Shrunk(set.shrunk_for_tol(tol, &bx)?),
            RetractionMethod::ShrunkBounded,
        ));
    }
    let mut center = None;
    for p in phi {
        if set.violation(p)? == 0.0 {
            center = Some(p.clone());
            break;
        }
    }
    let center = match (center, witness) {
        (Some(c), _) => c,
        (None, Some(w)) => w.clone(),
        (None, None) => {
            return Err(Error::Unsupported(
                "no prescribed value lies exactly in the set; supply a witness".into(),
            ))
        }
    };
    let far = extended
        .iter()
        .map(|p| center.sup_dist(p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let r = 2.0 * far + 1.0;
    let truncated = set.truncated(&center, r)?;
    Ok((
        Retraction::Shrunk(truncated.shrunk_for_tol(tol, &AxisBox::ball(&center, r)?)?),
        RetractionMethod::ShrunkTruncated,
    ))
}

/// `x ↦ d_x − d_z`: an isometric embedding of `X` into `ℓ∞^{|X|}`.
pub fn kuratowski_embed(space: &FiniteMetricSpace, basepoint: usize) -> Result<Vec<Point>> {
    space.check_index(basepoint)?;
    let base = space.row(basepoint);
    Ok((0..space.size())
        .map(|x| Point(space.row(x).iter().zip(base).map(|(a, b)| a - b).collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::metric::pt;
    use crate::random::{random_contracting_set, random_metric_space};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::new(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn component_examples() {
        let b = line3();
        assert_eq!(
            mcshane_extend_component(&b, &[0, 2], &[0.0, 2.0], 1).unwrap(),
            1.0
        );
        assert_eq!(
            mcshane_extend_component(&b, &[0, 2], &[0.0, 2.0], 2).unwrap(),
            2.0
        );
        assert_eq!(mcshane_extend_component(&b, &[1], &[5.0], 2).unwrap(), 6.0);
        assert!(matches!(
            mcshane_extend_component(&b, &[0, 2], &[0.0, 3.0], 1),
            Err(Error::NotLipschitz {
                first: 0,
                second: 2,
                ..
            })
        ));
        assert!(mcshane_extend_component(&b, &[], &[], 1).is_err());
    }

    #[test]
    fn extension_examples() {
        let pair = FiniteMetricSpace::new(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let square =
            BoxLipschitzSet::product(&[(Some(0.0), Some(1.0)), (Some(0.0), Some(1.0))]).unwrap();
        let ext = extend_into_set(&pair, &[0], &[pt(&[0.0, 0.0])], &square, 1e-9, None).unwrap();
        assert_eq!(ext.points, vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0])]);
        assert_eq!(ext.method, RetractionMethod::Cyclic);

        let free = BoxLipschitzSet::whole_space(2).unwrap();
        let ext = extend_into_set(&pair, &[0], &[pt(&[0.5, -1.0])], &free, 1e-9, None).unwrap();
        assert_eq!(ext.points[1], pt(&[2.5, 1.0]));
        assert_eq!(ext.method, RetractionMethod::Identity);

        let b = line3();
        let phi = vec![pt(&[0.0]), pt(&[0.5]), pt(&[1.0])];
        let unit = BoxLipschitzSet::product(&[(Some(0.0), Some(1.0))]).unwrap();
        let ext = extend_into_set(&b, &[0, 1, 2], &phi, &unit, 1e-9, None).unwrap();
        assert_eq!(ext.points, phi);

        assert!(matches!(
            extend_into_set(&pair, &[0], &[pt(&[2.0, 0.0])], &square, 1e-9, None),
            Err(Error::NotInSet { .. })
        ));
        assert!(matches!(
            extend_into_set(
                &b,
                &[0, 1],
                &[pt(&[0.0]), pt(&[1.0 + 1e-6])],
                &free_line(),
                1e-9,
                None
            ),
            Err(Error::NotLipschitz { .. })
        ));
    }

    fn free_line() -> BoxLipschitzSet {
        BoxLipschitzSet::whole_space(1).unwrap()
    }

    #[test]
    fn unbounded_lambda_one_uses_a_prescribed_value_as_centre() {
        // x₂ ≤ x₁: a half-plane with a slope-1 bound.
        let q = BoxLipschitzSet::new(
            vec![crate::LipExpr::infinite(crate::Sign::Minus); 2],
            vec![
                crate::LipExpr::infinite(crate::Sign::Plus),
                crate::LipExpr::affine_1d(1.0, 0.0, 1e4, crate::McShaneMode::Inf),
            ],
        )
        .unwrap();
        let b = line3();
        let ext = extend_into_set(&b, &[0], &[pt(&[0.0, 0.0])], &q, 1e-6, None).unwrap();
        assert_eq!(ext.method, RetractionMethod::ShrunkTruncated);
        assert!(ext.violations.iter().all(|v| *v <= 1e-6));
        assert!(ext.lipschitz.passes(1e-12), "{:?}", ext.lipschitz);
    }

    #[test]
    fn kuratowski_examples() {
        let pair = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let emb = kuratowski_embed(&pair, 0).unwrap();
        assert_eq!(emb, vec![pt(&[0.0, 0.0]), pt(&[1.0, -1.0])]);
        let emb = kuratowski_embed(&pair, 1).unwrap();
        assert_eq!(emb, vec![pt(&[-1.0, 1.0]), pt(&[0.0, 0.0])]);
        assert!(kuratowski_embed(&pair, 2).is_err());
    }

    #[test]
    fn lambda_one_bounded_extension_is_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let space = random_metric_space(&mut rng, 12);
        let q = instances::origin_counterexample(1e3);
        let set = q.truncated(&pt(&[0.0, 0.0]), 3.0).unwrap();
        let ext = extend_into_set(&space, &[0], &[pt(&[0.0, 0.0])], &set, 1e-3, None).unwrap();
        assert_eq!(ext.method, RetractionMethod::ShrunkBounded);
        assert!(ext.violations.iter().all(|v| *v <= 1e-3));
        assert!(ext.lipschitz.passes(1e-12), "{:?}", ext.lipschitz);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn inf_extension_dominates_sup_extension(seed in any::<u64>(), size in 2usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = random_metric_space(&mut rng, size);
            let count = rng.gen_range(1..=size.min(4));
            let subset: Vec<usize> = rand::seq::index::sample(&mut rng, size, count).into_vec();
            // d(c, ·) + offset is 1-Lipschitz.
            let c = rng.gen_range(0..size);
            let offset = rng.gen_range(-2.0..2.0);
            let values: Vec<f64> = subset.iter().map(|&a| space.dist(c, a) + offset).collect();
            for b in 0..size {
                let hi = mcshane_extend_component(&space, &subset, &values, b).unwrap();
                let lo = minimal_extend_component(&space, &subset, &values, b).unwrap();
                prop_assert!(lo <= hi + 1e-12);
                if let Some(k) = subset.iter().position(|&a| a == b) {
                    prop_assert_eq!(hi, values[k]);
                    prop_assert!((lo - values[k]).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn kuratowski_is_an_isometry(seed in any::<u64>(), size in 1usize..=12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = random_metric_space(&mut rng, size);
            let z = rng.gen_range(0..size);
            let emb = kuratowski_embed(&space, z).unwrap();
            prop_assert!(emb[z].norm() == 0.0);
            for i in 0..size {
                for j in 0..size {
                    let d = emb[i].sup_dist(&emb[j]).unwrap();
                    prop_assert!((d - space.dist(i, j)).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn contracting_extension_is_lipschitz(seed in any::<u64>(), size in 2usize..=14) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = random_metric_space(&mut rng, size);
            let n = rng.gen_range(1..=3);
            let set = random_contracting_set(&mut rng, n, 0.5);
            let subset = vec![rng.gen_range(0..size)];
            let phi = vec![set.cyclic_retract(&Point::zeros(n), 1e-14, None).unwrap().0];
            let ext = extend_into_set(&space, &subset, &phi, &set, 1e-13, None).unwrap();
            prop_assert_eq!(&ext.points[subset[0]], &phi[0]);
            prop_assert!(ext.lipschitz.passes(1e-12), "{:?}", ext.lipschitz);
            prop_assert!(ext.violations.iter().all(|v| *v <= 1e-13));
        }
    }
}
