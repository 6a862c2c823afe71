//! Deterministic SVG rendering of planar sets.

use std::fmt::Write as _;

use hyperlip_core::metric::{ConeDescriptor, Sign};
use hyperlip_core::{BoxLipschitzSet, Point};

use crate::Failure;

const SIZE: f64 = 600.0;

struct Frame {
    bbox: [f64; 4],
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        (v - self.bbox[0]) / (self.bbox[1] - self.bbox[0]) * SIZE
    }

    fn y(&self, v: f64) -> f64 {
        (self.bbox[3] - v) / (self.bbox[3] - self.bbox[2]) * SIZE
    }

    fn point(&self, p: &Point) -> String {
        format!("{:.3},{:.3}", self.x(p[0]), self.y(p[1]))
    }
}

/// Index of the first repeated iterate and the earlier index it repeats.
fn find_cycle(orbit: &[Point]) -> Option<(usize, usize)> {
    (1..orbit.len()).find_map(|j| (0..j).find(|&i| orbit[i] == orbit[j]).map(|i| (i, j)))
}

pub(crate) fn render(
    set: &BoxLipschitzSet,
    bbox: [f64; 4],
    cells: usize,
    orbit: &[Point],
    cones: &[ConeDescriptor],
) -> Result<String, Failure> {
    let frame = Frame { bbox };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<defs><clipPath id="frame"><rect x="0" y="0" width="{SIZE}" height="{SIZE}"/></clipPath></defs>"#
    )
    .unwrap();
    writeln!(
        s,
        r##"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##
    )
    .unwrap();

    // Region: one rectangle per horizontal run of member cells.
    let (w, h) = (bbox[1] - bbox[0], bbox[3] - bbox[2]);
    let cell_px = SIZE / cells as f64;
    writeln!(s, r##"<g id="region" fill="#9ecae1" stroke="none">"##).unwrap();
    for row in 0..cells {
        let cy = bbox[3] - (row as f64 + 0.5) * h / cells as f64;
        let mut run_start: Option<usize> = None;
        for col in 0..=cells {
            let inside = col < cells
                && {
                    let cx = bbox[0] + (col as f64 + 0.5) * w / cells as f64;
                    matches!(set.violation(&Point::new(vec![cx, cy]).expect("finite")), Ok(v) if v == 0.0)
                };
            match (inside, run_start) {
                (true, None) => run_start = Some(col),
                (false, Some(c0)) => {
                    writeln!(
                        s,
                        r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                        c0 as f64 * cell_px,
                        row as f64 * cell_px,
                        (col - c0) as f64 * cell_px,
                        cell_px
                    )
                    .unwrap();
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    writeln!(s, "</g>").unwrap();

    if !cones.is_empty() {
        let reach = 2.0 * w.max(h);
        writeln!(
            s,
            r##"<g id="cones" clip-path="url(#frame)" fill="#fdae6b" fill-opacity="0.25" stroke="#e6550d" stroke-width="1">"##
        )
        .unwrap();
        for c in cones {
            if c.apex.dim() != 2 {
                return Err(Failure::input("cones must be planar"));
            }
            let a = c.apex.coords();
            let s_ax = match c.sign {
                Sign::Plus => 1.0,
                Sign::Minus => -1.0,
            };
            let corner = |off: f64| {
                let mut q = [a[0], a[1]];
                q[c.axis] += s_ax * reach;
                q[1 - c.axis] += off * reach;
                Point::new(q.to_vec()).expect("finite")
            };
            writeln!(
                s,
                r#"<polygon points="{} {} {}"/>"#,
                frame.point(&c.apex),
                frame.point(&corner(1.0)),
                frame.point(&corner(-1.0))
            )
            .unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }

    if orbit.len() > 1 {
        writeln!(
            s,
            r##"<g id="orbit" clip-path="url(#frame)" fill="none" stroke="#08306b" stroke-width="2">"##
        )
        .unwrap();
        let path = |pts: &[Point]| {
            pts.iter()
                .map(|p| frame.point(p))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match find_cycle(orbit) {
            Some((i, j)) => {
                if i > 0 {
                    writeln!(s, r#"<polyline points="{}"/>"#, path(&orbit[..=i])).unwrap();
                }
                writeln!(s, r#"<polygon points="{}"/>"#, path(&orbit[i..j])).unwrap();
            }
            None => writeln!(s, r#"<polyline points="{}"/>"#, path(orbit)).unwrap(),
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperlip_core::instances;
    use hyperlip_core::pt;

    #[test]
    fn four_cycle_is_closed() {
        let q = instances::origin_counterexample(1e3);
        let orbit = q.cyclic_iterate(&pt(&[0.0, 1.0]), 12).unwrap().iterates();
        assert_eq!(find_cycle(&orbit), Some((1, 5)));
        let svg = render(&q, [-2.0, 2.0, -2.0, 2.0], 20, &orbit, &[]).unwrap();
        assert!(svg.contains(r#"<polyline points="300.000,150.000 450.000,150.000"/>"#));
        assert!(svg.contains(
            r#"<polygon points="450.000,150.000 450.000,450.000 150.000,450.000 150.000,150.000"/>"#
        ));
    }

    #[test]
    fn square_region_is_shaded() {
        let q =
            BoxLipschitzSet::product(&[(Some(0.0), Some(1.0)), (Some(0.0), Some(1.0))]).unwrap();
        let svg = render(&q, [-1.0, 2.0, -1.0, 2.0], 3, &[], &[]).unwrap();
        assert!(svg.contains(r#"<rect x="200.000" y="200.000" width="200.000" height="200.000"/>"#));
        assert!(!svg.contains("orbit"));
    }
}
