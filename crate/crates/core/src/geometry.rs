//! Planar convex hulls, used to check that synthetics stay inside the
//! minority region of two-dimensional data.

/// Convex hull of a planar point set in counter-clockwise order, collinear
/// boundary points dropped (Andrew's monotone chain).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &pt in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0 {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    hull
}

/// z-component of (b - a) x (c - a).
fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Whether `pt` lies inside or on a counter-clockwise hull, allowing `tol`
/// of slack scaled by each edge length.
pub fn hull_contains(hull: &[[f64; 2]], pt: [f64; 2], tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => dist(hull[0], pt) <= tol,
        2 => on_segment(hull[0], hull[1], pt, tol),
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            cross(a, b, pt) >= -tol * dist(a, b).max(1.0)
        }),
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2], tol: f64) -> bool {
    let len = dist(a, b);
    if len == 0.0 {
        return dist(a, p) <= tol;
    }
    let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (len * len);
    let t = t.clamp(0.0, 1.0);
    dist([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], p) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_with_interior_and_collinear_points() {
        let pts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [0.5, 0.0],
        ];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!(hull_contains(&h, [0.5, 0.5], 1e-12));
        assert!(hull_contains(&h, [1.0, 0.5], 1e-12));
        assert!(!hull_contains(&h, [1.1, 0.5], 1e-12));
    }

    #[test]
    fn degenerate_hulls() {
        assert_eq!(convex_hull(&[[1.0, 1.0], [1.0, 1.0]]).len(), 1);
        let seg = convex_hull(&[[0.0, 0.0], [2.0, 2.0], [1.0, 1.0]]);
        assert_eq!(seg.len(), 2);
        assert!(hull_contains(&seg, [1.5, 1.5], 1e-12));
        assert!(!hull_contains(&seg, [1.5, 1.0], 1e-12));
    }

    proptest! {
        #[test]
        fn convex_combinations_are_inside(
            pts in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30),
            w in proptest::collection::vec(0.0f64..1.0, 30),
        ) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let h = convex_hull(&pts);
            let s: f64 = w[..pts.len()].iter().sum::<f64>() + 1e-12;
            let mut c = [0.0, 0.0];
            for (p, wi) in pts.iter().zip(&w) {
                c[0] += p[0] * wi / s;
                c[1] += p[1] * wi / s;
            }
            prop_assert!(hull_contains(&h, c, 1e-9));
            for p in &pts {
                prop_assert!(hull_contains(&h, *p, 1e-9));
            }
        }
    }
}
