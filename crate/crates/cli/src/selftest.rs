//! Seeded end-to-end checks with a deterministic JSON report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hyperlip_core::boxset::{detect_noncontraction, Verdict};
use hyperlip_core::extension::{extend_into_set, kuratowski_embed};
use hyperlip_core::hull::enumerate_extremal_grid;
use hyperlip_core::random::{random_contracting_set, random_metric_space, random_points};
use hyperlip_core::reconstruct::{synthesize_bounds, verify_reconstruction, ReconstructionConfig};
use hyperlip_core::{instances, pt, AxisBox, FiniteMetricSpace, Point};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub all_passed: bool,
    pub checks: Vec<Check>,
}

pub fn run(seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        decay_certificate(&mut rng),
        cyclic_retraction(&mut rng),
        empty_counterexample(),
        origin_counterexample(),
        extension(&mut rng),
        hull_segment(),
        kuratowski(&mut rng),
        reconstruction(),
    ];
    Report {
        seed,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn decay_certificate(rng: &mut ChaCha8Rng) -> Check {
    let mut traces = 0;
    let mut failures = 0;
    for &lambda in &[0.3, 0.5, 0.9] {
        for n in 2..=4 {
            let q = random_contracting_set(rng, n, lambda);
            for x in random_points(rng, 5, n, 5.0) {
                traces += 1;
                match q.cyclic_retract(&x, 1e-12, None) {
                    Ok((_, trace)) if trace.check_certificate(1e-9).is_none() => {}
                    _ => failures += 1,
                }
            }
        }
    }
    Check {
        name: "decay_certificate",
        passed: failures == 0,
        detail: json!({ "traces": traces, "failures": failures }),
    }
}

fn cyclic_retraction(rng: &mut ChaCha8Rng) -> Check {
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_violation = 0.0f64;
    for &lambda in &[0.3, 0.5, 0.9] {
        let n = rng.gen_range(2..=4);
        let q = random_contracting_set(rng, n, lambda);
        let xs = random_points(rng, 200, n, 4.0);
        let ys = random_points(rng, 200, n, 4.0);
        let excess = xs
            .par_iter()
            .zip(&ys)
            .map(|(x, y)| {
                let rx = q.cyclic_retract(x, 1e-14, None).map(|r| r.0);
                let ry = q.cyclic_retract(y, 1e-14, None).map(|r| r.0);
                match (rx, ry) {
                    (Ok(rx), Ok(ry)) => rx.sup_dist(&ry).unwrap() - x.sup_dist(y).unwrap(),
                    _ => f64::INFINITY,
                }
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        max_excess = max_excess.max(excess);
        for x in &xs {
            let v = q
                .cyclic_retract(x, 1e-6, None)
                .and_then(|(p, _)| q.violation(&p))
                .unwrap_or(f64::INFINITY);
            max_violation = max_violation.max(v);
        }
    }
    Check {
        name: "cyclic_retraction",
        passed: max_excess <= 1e-12 && max_violation <= 1e-6,
        detail: json!({ "max_lipschitz_excess": max_excess, "max_violation": max_violation }),
    }
}

fn empty_counterexample() -> Check {
    let q = instances::empty_counterexample(1e4);
    let trace = q.cyclic_iterate(&pt(&[0.0, 0.0]), 200).unwrap();
    let unit_steps = trace.displacements[1..].iter().all(|d| d.abs() == 1.0);
    let verdict = detect_noncontraction(&trace, 8).unwrap();
    Check {
        name: "empty_counterexample",
        passed: unit_steps && verdict == Verdict::Stalled,
        detail: json!({ "unit_steps": unit_steps, "verdict": verdict, "final_norm": trace.end.norm() }),
    }
}

fn origin_counterexample() -> Check {
    let q = instances::origin_counterexample(1e3);
    let orbit = q.cyclic_iterate(&pt(&[0.0, 1.0]), 16).unwrap().iterates();
    let cycle = [
        pt(&[1.0, 1.0]),
        pt(&[1.0, -1.0]),
        pt(&[-1.0, -1.0]),
        pt(&[-1.0, 1.0]),
    ];
    let periodic = orbit[1..]
        .iter()
        .enumerate()
        .all(|(k, p)| *p == cycle[k % 4]);
    let bx = AxisBox::cube(2, -2.0, 2.0).unwrap();
    let r = q
        .retract_lambda_one_bounded(&pt(&[0.0, 1.0]), 1e-3, &bx)
        .unwrap();
    let violation = q.violation(&r.point).unwrap();
    Check {
        name: "origin_counterexample",
        passed: periodic && violation <= 1e-3 && r.point.norm() <= 2e-3,
        detail: json!({
            "four_cycle": periodic,
            "retracted": r.point,
            "violation": violation,
            "shrink_index": r.k,
        }),
    }
}

fn extension(rng: &mut ChaCha8Rng) -> Check {
    let mut max_excess = f64::NEG_INFINITY;
    let mut agrees = true;
    for _ in 0..5 {
        let size = rng.gen_range(3..=12);
        let space = random_metric_space(rng, size);
        let n = rng.gen_range(2..=3);
        let q = random_contracting_set(rng, n, 0.5);
        let (subset, phi) = lipschitz_map_into(rng, &space, &q);
        match extend_into_set(&space, &subset, &phi, &q, 1e-13, None) {
            Ok(ext) => {
                max_excess = max_excess.max(ext.lipschitz.max_excess);
                agrees &= subset.iter().zip(&phi).all(|(&a, p)| ext.points[a] == *p);
            }
            Err(_) => {
                max_excess = f64::INFINITY;
                agrees = false;
            }
        }
    }
    Check {
        name: "extension",
        passed: agrees && max_excess <= 1e-12,
        detail: json!({ "agrees_on_subset": agrees, "max_lipschitz_excess": max_excess }),
    }
}

/// A random subset with a 1-Lipschitz map into `q`: the retraction of
/// `a ↦ (d(a, c_j) + o_j)_j`, whose coordinates are 1-Lipschitz.
pub fn lipschitz_map_into(
    rng: &mut ChaCha8Rng,
    space: &FiniteMetricSpace,
    q: &hyperlip_core::BoxLipschitzSet,
) -> (Vec<usize>, Vec<Point>) {
    let size = space.size();
    let count = rng.gen_range(1..=size.min(5));
    let subset = rand::seq::index::sample(rng, size, count).into_vec();
    let centres: Vec<(usize, f64)> = (0..q.n())
        .map(|_| (rng.gen_range(0..size), rng.gen_range(-2.0..2.0)))
        .collect();
    let phi = subset
        .iter()
        .map(|&a| {
            let raw = Point::new(centres.iter().map(|&(c, o)| space.dist(a, c) + o).collect())
                .expect("finite");
            q.cyclic_retract(&raw, 1e-14, None)
                .expect("contracting set")
                .0
        })
        .collect();
    (subset, phi)
}

fn hull_segment() -> Check {
    let pair = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let found = enumerate_extremal_grid(&pair, 0.1).unwrap();
    let on_segment = found.iter().all(|f| (f[0] + f[1] - 1.0).abs() <= 1e-12);
    Check {
        name: "hull_segment",
        passed: found.len() == 11 && on_segment,
        detail: json!({ "points": found.len(), "on_segment": on_segment }),
    }
}

fn kuratowski(rng: &mut ChaCha8Rng) -> Check {
    let mut max_error = 0.0f64;
    for _ in 0..5 {
        let size = rng.gen_range(1..=12);
        let space = random_metric_space(rng, size);
        let emb = kuratowski_embed(&space, rng.gen_range(0..size)).unwrap();
        for i in 0..size {
            for j in 0..size {
                max_error =
                    max_error.max((emb[i].sup_dist(&emb[j]).unwrap() - space.dist(i, j)).abs());
            }
        }
    }
    Check {
        name: "kuratowski",
        passed: max_error <= 1e-12,
        detail: json!({ "max_error": max_error }),
    }
}

fn reconstruction() -> Check {
    let square = |x: &Point| x.coords().iter().all(|c| (0.0..=1.0).contains(c));
    let grid = AxisBox::cube(2, -1.0, 2.0).unwrap().grid(0.25).unwrap();
    let (inside, outside): (Vec<Point>, Vec<Point>) = grid.iter().cloned().partition(|p| square(p));
    let result = ReconstructionConfig::new(0.1, inside, outside, square)
        .and_then(|cfg| synthesize_bounds(&cfg))
        .and_then(|rec| verify_reconstruction(square, &rec.set, &grid));
    let (passed, detail) = match result {
        Ok(r) => (
            r.is_exact(),
            json!({
                "checked": r.checked,
                "false_inside": r.false_inside.len(),
                "false_outside": r.false_outside.len(),
                "inconsistent": r.inconsistent.len(),
            }),
        ),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Check {
        name: "reconstruction",
        passed,
        detail,
    }
}
