//! Pole of inaccessibility by quadtree cell refinement: the interior point
//! farthest from the boundary of a polygon with holes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geom::{point_segment_distance2, Vec2};

/// Even-odd containment over all rings.
pub fn inside_rings(p: &Vec2, rings: &[&[Vec2]]) -> bool {
    rings
        .iter()
        .filter(|r| crate::geom::point_in_loop(p, r))
        .count()
        % 2
        == 1
}

/// Distance to the nearest ring edge, positive inside the polygon.
pub fn signed_distance(p: &Vec2, rings: &[&[Vec2]]) -> f64 {
    let mut d = f64::INFINITY;
    for r in rings {
        let n = r.len();
        for i in 0..n {
            d = d.min(point_segment_distance2(p, &r[i], &r[(i + 1) % n]));
        }
    }
    if inside_rings(p, rings) {
        d
    } else {
        -d
    }
}

struct Cell {
    center: Vec2,
    half: f64,
    dist: f64,
    max: f64,
}

impl Cell {
    fn new(center: Vec2, half: f64, rings: &[&[Vec2]]) -> Cell {
        let dist = signed_distance(&center, rings);
        Cell {
            center,
            half,
            dist,
            max: dist + half * std::f64::consts::SQRT_2,
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.max == other.max
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.max.total_cmp(&other.max)
    }
}

/// `(pole, distance to boundary)` within `precision` of the optimum, or
/// `None` for an empty or zero-area polygon.
pub fn pole_of_inaccessibility(rings: &[&[Vec2]], precision: f64) -> Option<(Vec2, f64)> {
    let outer = rings.first()?;
    if outer.len() < 3 {
        return None;
    }
    let area: f64 = rings.iter().map(|r| crate::geom::signed_area(r).abs()).sum();
    if area <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (outer[0], outer[0]);
    for p in outer.iter() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let size = hi - lo;
    let cell = size.x.min(size.y);
    if cell <= 0.0 {
        return None;
    }
    let precision = precision.max(cell * 1e-9);
    let half = cell / 2.0;
    let mut heap = BinaryHeap::new();
    let mut x = lo.x;
    while x < hi.x {
        let mut y = lo.y;
        while y < hi.y {
            heap.push(Cell::new(Vec2::new(x + half, y + half), half, rings));
            y += cell;
        }
        x += cell;
    }
    // centroid of the outer ring as the first guess
    let mut best = Cell::new(ring_centroid(outer), 0.0, rings);
    let bbox_center = Cell::new((lo + hi) / 2.0, 0.0, rings);
    if bbox_center.dist > best.dist {
        best = bbox_center;
    }
    while let Some(c) = heap.pop() {
        if c.dist > best.dist {
            best = Cell::new(c.center, 0.0, rings);
        }
        if c.max - best.dist <= precision {
            continue;
        }
        let h = c.half / 2.0;
        for (dx, dy) in [(-h, -h), (h, -h), (-h, h), (h, h)] {
            heap.push(Cell::new(c.center + Vec2::new(dx, dy), h, rings));
        }
    }
    (best.dist > 0.0).then_some((best.center, best.dist))
}

fn ring_centroid(r: &[Vec2]) -> Vec2 {
    let n = r.len();
    let mut a = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..n {
        let (p, q) = (r[i], r[(i + 1) % n]);
        let f = p.x * q.y - q.x * p.y;
        c += (p + q) * f;
        a += f * 3.0;
    }
    if a == 0.0 {
        r[0]
    } else {
        c / a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn square_and_rectangle() {
        let sq = [v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        let (p, r) = pole_of_inaccessibility(&[&sq], 0.01).unwrap();
        assert!((p - v(0.5, 0.5)).norm() < 0.02);
        assert!((r - 0.5).abs() < 0.01);
        let rect = [v(0.0, 0.0), v(2.0, 0.0), v(2.0, 1.0), v(0.0, 1.0)];
        let (p, r) = pole_of_inaccessibility(&[&rect], 0.02).unwrap();
        assert!((p.y - 0.5).abs() < 0.03 && p.x > 0.45 && p.x < 1.55);
        assert!((r - 0.5).abs() < 0.02);
    }

    #[test]
    fn l_shape_against_dense_grid() {
        let l = [
            v(0.0, 0.0),
            v(2.0, 0.0),
            v(2.0, 1.0),
            v(1.0, 1.0),
            v(1.0, 2.0),
            v(0.0, 2.0),
        ];
        let diam = 8f64.sqrt();
        let (p, r) = pole_of_inaccessibility(&[&l], 0.01 * diam).unwrap();
        assert!(r > 0.5);
        let mut best = 0.0f64;
        for i in 0..=400 {
            for j in 0..=400 {
                let q = v(i as f64 / 200.0, j as f64 / 200.0);
                best = best.max(signed_distance(&q, &[&l]));
            }
        }
        assert!(best - r <= 0.01 * diam, "grid {best} vs {r}");
        // the thick lobe is the corner square
        assert!(p.x < 1.0 && p.y < 1.0);
    }

    #[test]
    fn hole_pushes_the_pole_aside() {
        let outer = [v(0.0, 0.0), v(4.0, 0.0), v(4.0, 4.0), v(0.0, 4.0)];
        let hole = [v(1.0, 1.0), v(3.0, 1.0), v(3.0, 3.0), v(1.0, 3.0)];
        let (p, r) = pole_of_inaccessibility(&[&outer, &hole], 0.01).unwrap();
        assert!(inside_rings(&p, &[&outer, &hole]));
        // best is in a corner of the frame, equidistant from the outer
        // edges and the hole's corner: x = sqrt2 / (1 + sqrt2)
        let x = 2f64.sqrt() / (1.0 + 2f64.sqrt());
        assert!((r - x).abs() < 0.02, "{r}");
    }

    #[test]
    fn degenerate() {
        let flat = [v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)];
        assert!(pole_of_inaccessibility(&[&flat], 0.01).is_none());
    }
}
