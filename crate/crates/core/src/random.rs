//! Seeded generators for test instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boxset::BoxLipschitzSet;
use crate::lipfun::{LipExpr, McShaneMode};
use crate::metric::{FiniteMetricSpace, Point, Sign};

/// `count` points drawn uniformly from `[−half_width, half_width]^dim`.
pub fn random_points<R: Rng>(rng: &mut R, count: usize, dim: usize, half_width: f64) -> Vec<Point> {
    (0..count)
        .map(|_| {
            Point(
                (0..dim)
                    .map(|_| rng.gen_range(-half_width..=half_width))
                    .collect(),
            )
        })
        .collect()
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A random expression tree on `ℓ∞^dim` whose syntactic Lipschitz bound is
/// at most `max_lip`. With `dim == 0` every leaf is a constant.
pub fn random_lipexpr<R: Rng>(rng: &mut R, dim: usize, depth: usize, max_lip: f64) -> LipExpr {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        if dim == 0 {
            return LipExpr::constant(rng.gen_range(-2.0..=2.0));
        }
        return match rng.gen_range(0..4) {
            0 => LipExpr::constant(rng.gen_range(-2.0..=2.0)),
            1 | 2 => LipExpr::distcone(
                random_points(rng, 1, dim, 2.0).remove(0),
                rng.gen_range(-2.0..=2.0),
                rng.gen_range(0.0..=max_lip.min(1.0)),
                random_sign(rng),
            ),
            _ => {
                let count = rng.gen_range(1..=4);
                let scale = rng.gen_range(0.0..=max_lip);
                let mode = *[McShaneMode::Inf, McShaneMode::Sup].choose(rng).unwrap();
                let samples = random_points(rng, count, dim, 2.0)
                    .into_iter()
                    .map(|p| (p, rng.gen_range(-2.0..=2.0)))
                    .collect();
                LipExpr::mcshane(samples, scale, mode)
            }
        };
    }
    match rng.gen_range(0..5) {
        0 | 1 => LipExpr::Min {
            children: (0..rng.gen_range(1..=3))
                .map(|_| random_lipexpr(rng, dim, depth - 1, max_lip))
                .collect(),
        },
        2 | 3 => LipExpr::Max {
            children: (0..rng.gen_range(1..=3))
                .map(|_| random_lipexpr(rng, dim, depth - 1, max_lip))
                .collect(),
        },
        _ => LipExpr::Blend {
            inner: Box::new(random_lipexpr(rng, dim, depth - 1, max_lip)),
            factor: rng.gen_range(0.0..=1.0),
            anchor: rng.gen_range(-2.0..=2.0),
        },
    }
}

/// A non-empty set in `ℓ∞ⁿ` with `λ(Q) ≤ lambda`. Some bounds are infinite.
///
/// Per coordinate, `lower = min(g − a, h)` and `upper = max(g + b, h)` for
/// random `g`, `h` and `a, b ≥ 0`, so the bounds never cross.
pub fn random_contracting_set<R: Rng>(rng: &mut R, n: usize, lambda: f64) -> BoxLipschitzSet {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let g = random_lipexpr(rng, n - 1, 3, lambda);
        let h = random_lipexpr(rng, n - 1, 2, lambda);
        let (a, b) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        lower.push(if rng.gen_bool(0.15) {
            LipExpr::infinite(Sign::Minus)
        } else if rng.gen_bool(0.5) {
            LipExpr::Min {
                children: vec![g.shifted(-a), h.clone()],
            }
        } else {
            g.shifted(-a)
        });
        upper.push(if rng.gen_bool(0.15) {
            LipExpr::infinite(Sign::Plus)
        } else {
            LipExpr::Max {
                children: vec![g.shifted(b), h],
            }
        });
    }
    BoxLipschitzSet::new(lower, upper).expect("generated set is valid")
}

/// A set with finite bounds of Lipschitz constant at most 1, each bounded
/// on all of `ℓ∞^{n−1}` (values in `[−3, 3]`). One coordinate always has a
/// bound of slope exactly 1, so `λ(Q) = 1` unless `n = 1`.
pub fn random_bounded_nonexpansive_set<R: Rng>(rng: &mut R, n: usize) -> BoxLipschitzSet {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let tree = random_lipexpr(rng, n - 1, 3, 1.0);
        let g = if i == 0 && n > 1 {
            LipExpr::Min {
                children: vec![
                    tree,
                    LipExpr::distcone(
                        random_points(rng, 1, n - 1, 1.0).remove(0),
                        rng.gen_range(0.0..=1.0),
                        1.0,
                        Sign::Plus,
                    ),
                ],
            }
        } else {
            tree
        };
        let (a, b) = (rng.gen_range(0.0..=0.5), rng.gen_range(0.0..=0.5));
        lower.push(g.shifted(-a).clamped(-3.0, 3.0));
        upper.push(g.shifted(b).clamped(-3.0, 3.0));
    }
    BoxLipschitzSet::new(lower, upper).expect("generated set is valid")
}

/// Shortest-path metric of a complete graph with edge weights in `[1, 2]`.
pub fn random_metric_space<R: Rng>(rng: &mut R, size: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in i + 1..size {
            let w = rng.gen_range(1.0..=2.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..size {
        for i in 0..size {
            for j in 0..size {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(d).expect("shortest-path distances form a metric")
}
