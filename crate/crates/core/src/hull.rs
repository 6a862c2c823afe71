//! Functions on a finite metric space `X` in the sense of the injective hull:
//! `Δ(X) = {f | f(x) + f(y) ≥ d(x, y)}` and its pointwise-minimal elements,
//! the extremal functions, characterised by `f(x) = max_y (d(x, y) − f(y))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{check_dims, FiniteMetricSpace};

/// Largest number of grid candidates scanned by [`enumerate_extremal_grid`].
pub const GRID_CAP: f64 = 1e8;

/// Largest space accepted by [`enumerate_extremal_grid`].
pub const MAX_GRID_POINTS: usize = 5;

/// First pair `(x, y)` with `f(x) + f(y) < d(x, y) − tol`.
fn delta_failure(space: &FiniteMetricSpace, f: &[f64], tol: f64) -> Option<(usize, usize)> {
    let m = space.size();
    for x in 0..m {
        for y in x..m {
            if f[x] + f[y] < space.dist(x, y) - tol {
                return Some((x, y));
            }
        }
    }
    None
}

/// First `x` with `f(x) > max_y (d(x, y) − f(y)) + tol`.
fn extremal_failure(space: &FiniteMetricSpace, f: &[f64], tol: f64) -> Option<usize> {
    (0..space.size()).find(|&x| {
        let best = (0..space.size())
            .map(|y| space.dist(x, y) - f[y])
            .fold(f64::NEG_INFINITY, f64::max);
        f[x] > best + tol
    })
}

/// `f ∈ Δ(X)` within `tol`; the pairs `x = y` force `f ≥ −tol/2`.
pub fn in_delta(space: &FiniteMetricSpace, f: &[f64], tol: f64) -> Result<bool> {
    check_dims(space.size(), f.len())?;
    Ok(delta_failure(space, f, tol).is_none())
}

/// Whether `f ∈ Δ(X)` is extremal within `tol`.
pub fn is_extremal(space: &FiniteMetricSpace, f: &[f64], tol: f64) -> Result<bool> {
    check_dims(space.size(), f.len())?;
    if let Some((first, second)) = delta_failure(space, f, tol) {
        return Err(Error::NotAdmissible { first, second });
    }
    Ok(extremal_failure(space, f, tol).is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "point", rename_all = "snake_case")]
pub enum ZeroClass {
    /// `f` vanishes at `x` and equals the row `d_x`.
    IsDx(usize),
    NoZero,
}

/// Extremal functions with a zero are exactly the rows `d_x`.
pub fn extremal_zero_classification(
    space: &FiniteMetricSpace,
    f: &[f64],
    tol: f64,
) -> Result<ZeroClass> {
    check_dims(space.size(), f.len())?;
    if let Some((first, second)) = delta_failure(space, f, tol) {
        return Err(Error::NotAdmissible { first, second });
    }
    if let Some(x) = extremal_failure(space, f, tol) {
        return Err(Error::NotExtremal(x));
    }
    let Some(x) = (0..f.len())
        .filter(|&x| f[x] <= tol)
        .min_by(|&a, &b| f[a].total_cmp(&f[b]))
    else {
        return Ok(ZeroClass::NoZero);
    };
    let matches_row = space
        .row(x)
        .iter()
        .zip(f)
        .all(|(d, v)| (d - v).abs() <= tol);
    if matches_row {
        Ok(ZeroClass::IsDx(x))
    } else {
        Err(Error::ZeroNotDistanceRow(x))
    }
}

/// A member of `Δ(X)`: non-negative with `f(x) + f(y) ≥ d(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleFunction {
    values: Vec<f64>,
}

impl AdmissibleFunction {
    pub fn new(space: &FiniteMetricSpace, values: Vec<f64>) -> Result<Self> {
        check_dims(space.size(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("function values"));
        }
        if let Some((first, second)) = delta_failure(space, &values, 0.0) {
            return Err(Error::NotAdmissible { first, second });
        }
        Ok(AdmissibleFunction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `X ∪ {x_f}` with `d(x, x_f) = f(x)`.
///
/// Requires `f ∈ Δ(X)`, `f` 1-Lipschitz and `f > 0`; these are exactly the
/// metric axioms for the new rows.
pub fn attach_point(space: &FiniteMetricSpace, f: &[f64]) -> Result<FiniteMetricSpace> {
    let f = AdmissibleFunction::new(space, f.to_vec())?;
    let values = f.values();
    if let Some(x) = values.iter().position(|v| *v <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f({x}) = {} is not positive",
            values[x]
        )));
    }
    let m = space.size();
    for x in 0..m {
        for y in x + 1..m {
            let excess = (values[x] - values[y]).abs() - space.dist(x, y);
            if excess > 0.0 {
                return Err(Error::NotLipschitz {
                    first: x,
                    second: y,
                    excess,
                });
            }
        }
    }
    let mut matrix = space.to_matrix();
    for (row, v) in matrix.iter_mut().zip(values) {
        row.push(*v);
    }
    let mut last = values.to_vec();
    last.push(0.0);
    matrix.push(last);
    FiniteMetricSpace::new(matrix)
}

/// Extremal functions among the grid points of `[0, diam X]^{|X|}` with
/// spacing `resolution`, in lexicographic order.
///
/// Membership in `Δ(X)` is tested with a rounding slack of
/// `1e-9·max(1, diam)`, extremality with tolerance `resolution / 2`. The rows
/// `d_x` are always included, snapped to the grid where they lie on it up to
/// the rounding slack.
pub fn enumerate_extremal_grid(
    space: &FiniteMetricSpace,
    resolution: f64,
) -> Result<Vec<Vec<f64>>> {
    let m = space.size();
    if m == 0 {
        return Err(Error::EmptyInput("metric space"));
    }
    if m > MAX_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "grid enumeration supports at most {MAX_GRID_POINTS} points, got {m}"
        )));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidParameter(format!("resolution {resolution}")));
    }
    let diam = space.diameter();
    let slack = 1e-9 * diam.max(1.0);
    let steps = (diam / resolution + 1e-9).floor() as usize + 1;
    let candidates = (steps as f64).powi(m as i32);
    if candidates > GRID_CAP {
        return Err(Error::GridTooLarge {
            candidates,
            cap: GRID_CAP,
        });
    }
    let axis: Vec<f64> = (0..steps).map(|j| j as f64 * resolution).collect();
    let tol = resolution / 2.0;
    let mut found: Vec<Vec<f64>> = (0..candidates as usize)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut f = Vec::with_capacity(m);
            for _ in 0..m {
                f.push(axis[idx % steps]);
                idx /= steps;
            }
            f.reverse();
            (delta_failure(space, &f, slack).is_none()
                && extremal_failure(space, &f, tol).is_none())
            .then_some(f)
        })
        .collect();
    for x in 0..m {
        let row = space
            .row(x)
            .iter()
            .map(|&d| {
                let snapped = (d / resolution).round() * resolution;
                if (snapped - d).abs() <= slack {
                    snapped
                } else {
                    d
                }
            })
            .collect();
        found.push(row);
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found.dedup();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::check_metric_axioms;
    use crate::random::random_metric_space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair() -> FiniteMetricSpace {
        FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn equilateral(side: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::new(vec![
            vec![0.0, side, side],
            vec![side, 0.0, side],
            vec![side, side, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        let x = pair();
        assert!(in_delta(&x, &[0.0, 1.0], 0.0).unwrap());
        assert!(!in_delta(&x, &[0.2, 0.2], 0.0).unwrap());
        assert!(in_delta(&x, &[1.0, 1.0], 0.0).unwrap());
        assert!(!in_delta(&x, &[-0.1, 1.5], 0.0).unwrap());
        assert!(in_delta(&x, &[0.0], 0.0).is_err());
    }

    #[test]
    fn extremal_examples() {
        let x = pair();
        assert!(is_extremal(&x, &[0.0, 1.0], 1e-12).unwrap());
        assert!(is_extremal(&x, &[0.3, 0.7], 1e-12).unwrap());
        assert!(!is_extremal(&x, &[0.5, 0.9], 1e-12).unwrap());
        assert!(matches!(
            is_extremal(&x, &[0.2, 0.2], 1e-12),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn zero_classification_examples() {
        let x = equilateral(2.0);
        assert_eq!(
            extremal_zero_classification(&x, &[2.0, 0.0, 2.0], 1e-9).unwrap(),
            ZeroClass::IsDx(1)
        );
        assert_eq!(
            extremal_zero_classification(&pair(), &[0.3, 0.7], 1e-9).unwrap(),
            ZeroClass::NoZero
        );
        assert_eq!(
            extremal_zero_classification(&x, &[2.0, 0.0, 2.0 + 0.5e-3], 1e-3).unwrap(),
            ZeroClass::IsDx(1)
        );
        assert!(matches!(
            extremal_zero_classification(&pair(), &[0.5, 0.9], 1e-9),
            Err(Error::NotExtremal(0))
        ));
    }

    #[test]
    fn attach_examples() {
        let x = pair();
        let t = attach_point(&x, &[0.3, 0.7]).unwrap();
        assert_eq!(t.size(), 3);
        assert_eq!(t.dist(0, 2), 0.3);
        assert_eq!(t.dist(2, 1), 0.7);
        assert!(check_metric_axioms(&t.to_matrix(), 1e-12).is_valid());
        let e = equilateral(2.0);
        assert!(attach_point(&e, &[2.0, 2.0, 2.0]).is_ok());
        assert!(attach_point(&x, &[0.0, 1.0]).is_err());
        assert!(matches!(
            attach_point(&x, &[0.2, 0.2]),
            Err(Error::NotAdmissible { .. })
        ));
        assert!(matches!(
            attach_point(&x, &[0.1, 2.0]),
            Err(Error::NotLipschitz { .. })
        ));
    }

    #[test]
    fn enumeration_examples() {
        let segment = enumerate_extremal_grid(&pair(), 0.1).unwrap();
        assert_eq!(segment.len(), 11);
        for (j, f) in segment.iter().enumerate() {
            assert!((f[0] - j as f64 * 0.1).abs() <= 1e-12);
            assert!((f[0] + f[1] - 1.0).abs() <= 1e-12);
        }
        let single = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        assert_eq!(
            enumerate_extremal_grid(&single, 0.1).unwrap(),
            vec![vec![0.0]]
        );
        let tripod = enumerate_extremal_grid(&equilateral(2.0), 0.5).unwrap();
        let expected: Vec<Vec<f64>> = vec![
            vec![0.0, 2.0, 2.0],
            vec![0.5, 1.5, 1.5],
            vec![1.0, 1.0, 1.0],
            vec![1.5, 0.5, 1.5],
            vec![1.5, 1.5, 0.5],
            vec![2.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ];
        assert_eq!(tripod, expected);
        assert!(matches!(
            enumerate_extremal_grid(&pair(), 1e-9),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn enumerated_functions_are_lipschitz_minimal_and_classified() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let size = rng.gen_range(2..=4);
            let space = random_metric_space(&mut rng, size);
            let res = 0.1;
            let found = enumerate_extremal_grid(&space, res).unwrap();
            for x in 0..size {
                assert!(found.iter().any(|f| f == space.row(x)));
            }
            for f in &found {
                for x in 0..size {
                    for y in 0..size {
                        assert!((f[x] - f[y]).abs() <= space.dist(x, y) + res / 2.0 + 1e-9);
                    }
                    // Lowering one value by a grid step leaves Δ(X).
                    let mut g = f.clone();
                    g[x] -= res;
                    assert!(!in_delta(&space, &g, 1e-9).unwrap());
                }
                match extremal_zero_classification(&space, f, res / 2.0 + 1e-9).unwrap() {
                    ZeroClass::IsDx(x) => assert!(f[x] <= res / 2.0),
                    ZeroClass::NoZero => assert!(f.iter().all(|v| *v > res / 2.0)),
                }
            }
        }
    }

    #[test]
    fn rows_are_extremal_on_random_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let size = rng.gen_range(1..=10);
            let space = random_metric_space(&mut rng, size);
            for x in 0..size {
                assert!(is_extremal(&space, space.row(x), 1e-12).unwrap());
                assert_eq!(
                    extremal_zero_classification(&space, space.row(x), 1e-12).unwrap(),
                    ZeroClass::IsDx(x)
                );
            }
        }
    }
}
