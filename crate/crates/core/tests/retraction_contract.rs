//! Every retraction is 1-Lipschitz, fixes members of `Q`, and lands within
//! its violation budget.

use hyperlip_core::lipfun::{AxisBox, LipExpr, McShaneMode};
use hyperlip_core::metric::{pt, Point, Sign};
use hyperlip_core::random::{
    random_bounded_nonexpansive_set, random_contracting_set, random_points,
};
use hyperlip_core::{instances, BoxLipschitzSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PAIRS: usize = 1000;
const LIPSCHITZ_SLACK: f64 = 1e-12;

/// Largest `‖R(x) − R(y)‖ − ‖x − y‖` over the pairs.
fn max_excess<F>(pairs: &[(Point, Point)], retract: F) -> f64
where
    F: Fn(&Point) -> Point + Sync,
{
    pairs
        .par_iter()
        .map(|(x, y)| {
            let (rx, ry) = (retract(x), retract(y));
            rx.sup_dist(&ry).unwrap() - x.sup_dist(y).unwrap()
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Half the pairs are close together, where rounding matters most.
fn random_pairs(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<(Point, Point)> {
    (0..PAIRS)
        .map(|k| {
            let x = random_points(rng, 1, n, half_width).remove(0);
            let y = if k % 2 == 0 {
                random_points(rng, 1, n, half_width).remove(0)
            } else {
                let shift = random_points(rng, 1, n, 1e-3).remove(0);
                Point::new(
                    x.coords()
                        .iter()
                        .zip(shift.coords())
                        .map(|(a, b)| a + b)
                        .collect(),
                )
                .unwrap()
            };
            (x, y)
        })
        .collect()
}

fn members(q: &BoxLipschitzSet, candidates: &[Point]) -> Vec<Point> {
    candidates
        .iter()
        .filter(|p| q.contains(p).unwrap())
        .cloned()
        .collect()
}

#[test]
fn coordinate_clamp() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..8 {
        let n = rng.gen_range(1..=4);
        let q = random_contracting_set(&mut rng, n, 1.0);
        let i = rng.gen_range(0..n);
        let pairs = random_pairs(&mut rng, n, 4.0);
        let excess = max_excess(&pairs, |x| q.coord_retract(i, x).unwrap());
        assert!(excess <= LIPSCHITZ_SLACK, "excess {excess}");
    }
}

#[test]
fn cyclic_retraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for lambda in [0.3, 0.5, 0.9] {
        for _ in 0..4 {
            let n = rng.gen_range(1..=4);
            let q = random_contracting_set(&mut rng, n, lambda);
            let pairs = random_pairs(&mut rng, n, 4.0);
            let excess = max_excess(&pairs, |x| q.cyclic_retract(x, 1e-14, None).unwrap().0);
            assert!(excess <= LIPSCHITZ_SLACK, "λ = {lambda}: excess {excess}");
            for (x, _) in pairs.iter().take(100) {
                let (p, trace) = q.cyclic_retract(x, 1e-6, None).unwrap();
                assert!(q.violation(&p).unwrap() <= 1e-6);
                assert!(trace.check_certificate(1e-9).is_none());
            }
            let cloud = random_points(&mut rng, 400, n, 4.0);
            let projected: Vec<Point> = cloud
                .iter()
                .map(|x| q.cyclic_retract(x, 1e-6, None).unwrap().0)
                .collect();
            for m in members(&q, &cloud).iter().chain(&members(&q, &projected)) {
                assert_eq!(&q.cyclic_retract(m, 1e-6, None).unwrap().0, m);
            }
        }
    }
}

#[test]
fn bounded_lambda_one_retraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut cases = vec![(
        instances::origin_counterexample(1e3),
        AxisBox::cube(2, -2.0, 2.0).unwrap(),
    )];
    for n in [2, 3] {
        let q = random_bounded_nonexpansive_set(&mut rng, n);
        let bx = q.global_box().unwrap().unwrap();
        cases.push((q, bx));
    }
    for (q, bx) in cases {
        let n = q.n();
        let shrunk = q.shrunk_for_tol(1e-2, &bx).unwrap();
        let pairs = random_pairs(&mut rng, n, 3.0);
        let excess = max_excess(&pairs, |x| shrunk.retract(x, 1e-13).unwrap().point);
        assert!(excess <= LIPSCHITZ_SLACK, "excess {excess}");
        let grid = bx.grid(0.25).unwrap();
        let inside = members(&q, &grid);
        for (x, _) in pairs.iter().take(100) {
            let r = q.retract_lambda_one_bounded(x, 1e-2, &bx).unwrap();
            assert!(q.violation(&r.point).unwrap() <= r.violation_bound());
            assert!(r.violation_bound() <= 1e-2);
        }
        for m in &inside {
            assert_eq!(
                &q.retract_lambda_one_bounded(m, 1e-2, &bx).unwrap().point,
                m
            );
        }
    }
}

#[test]
fn general_lambda_one_retraction() {
    // x₂ ≤ x₁ and x₁ ≥ −1: an unbounded wedge with a slope-1 bound.
    let wedge = BoxLipschitzSet::new(
        vec![LipExpr::constant(-1.0), LipExpr::infinite(Sign::Minus)],
        vec![
            LipExpr::infinite(Sign::Plus),
            LipExpr::affine_1d(1.0, 0.0, 1e4, McShaneMode::Inf),
        ],
    )
    .unwrap();
    let origin = instances::origin_counterexample(1e3);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for q in [wedge, origin] {
        let w = pt(&[0.0, 0.0]);
        let pairs = random_pairs(&mut rng, 2, 3.0);
        // The radius grows with ‖x − w‖, so calls at different distances use
        // different shrunk sets; with one fixed radius the map is 1-Lipschitz.
        let fixed = max_excess(&pairs, |x| {
            q.retract_truncated(&w, 20.0, x, 1e-2).unwrap().point
        });
        assert!(fixed <= LIPSCHITZ_SLACK, "fixed radius: excess {fixed}");
        for (x, _) in pairs.iter().take(100) {
            let r = q.retract_lambda_one_general(&w, x, 1e-2).unwrap();
            let ball = q.truncated(&w, r.radius.unwrap()).unwrap();
            assert!(ball.violation(&r.point).unwrap() <= 1e-2);
        }
        for m in members(
            &q,
            &AxisBox::cube(2, -3.0, 3.0).unwrap().grid(0.25).unwrap(),
        ) {
            assert_eq!(q.retract_lambda_one_general(&w, &m, 1e-2).unwrap().point, m);
        }
    }
}
