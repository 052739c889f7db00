use crate::families::PolyMap;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub image_a: [f64; 2],
    pub image_b: [f64; 2],
    /// Max-norm distance between the images.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub grid_points: usize,
    pub tolerance: f64,
    pub collision_count: usize,
    /// The first [`InjectivityReport::KEPT`] collisions in grid order.
    pub collisions: Vec<Collision>,
}

impl InjectivityReport {
    pub const KEPT: usize = 100;

    pub fn is_injective_on_grid(&self) -> bool {
        self.collision_count == 0
    }
}

/// Evaluates `f` on an `n x n` grid over `[-w, w]^2` and reports pairs of
/// distinct grid points whose images lie within `tol` in the max norm.
///
/// Images are bucketed into cells of side `tol`, so each point is compared
/// only with the nine neighbouring cells.
///
/// # Panics
///
/// If `n < 2` or `tol` is not positive.
pub fn injectivity_sample(f: &PolyMap, half_width: f64, n: usize, tol: f64) -> InjectivityReport {
    assert!(n >= 2, "grid needs at least two points per axis");
    assert!(tol > 0.0, "collision tolerance must be positive");
    let eval = f.float_eval();
    let coord = |i: usize| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
    let cell = |v: f64| (v / tol).floor() as i64;

    let mut points = Vec::with_capacity(n * n);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut report = InjectivityReport {
        grid_points: n * n,
        tolerance: tol,
        collision_count: 0,
        collisions: Vec::new(),
    };
    for i in 0..n {
        for j in 0..n {
            let p = [coord(i), coord(j)];
            let img = eval.eval(p[0], p[1]);
            let key = (cell(img[0]), cell(img[1]));
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(others) = buckets.get(&(key.0 + dx, key.1 + dy)) else {
                        continue;
                    };
                    for &k in others {
                        let (q, q_img): ([f64; 2], [f64; 2]) = points[k];
                        let distance = (img[0] - q_img[0]).abs().max((img[1] - q_img[1]).abs());
                        if distance <= tol {
                            report.collision_count += 1;
                            if report.collisions.len() < InjectivityReport::KEPT {
                                report.collisions.push(Collision {
                                    a: q,
                                    b: p,
                                    image_a: q_img,
                                    image_b: img,
                                    distance,
                                });
                            }
                        }
                    }
                }
            }
            buckets.entry(key).or_default().push(points.len());
            points.push((p, img));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(a: &str, b: &str) -> PolyMap {
        PolyMap::new(a.parse().unwrap(), b.parse().unwrap())
    }

    #[test]
    fn identity_has_no_collisions() {
        let r = injectivity_sample(&map("x", "y"), 3.0, 41, 1e-9);
        assert!(r.is_injective_on_grid());
        assert_eq!(r.grid_points, 41 * 41);
    }

    #[test]
    fn even_map_folds() {
        let r = injectivity_sample(&map("x^2", "y"), 1.0, 5, 1e-9);
        // x in {-1, -1/2, 0, 1/2, 1}: two folded pairs per column of y values.
        assert_eq!(r.collision_count, 2 * 5);
        for c in &r.collisions {
            assert_eq!(c.a[0], -c.b[0]);
            assert_eq!(c.a[1], c.b[1]);
        }
    }
}
