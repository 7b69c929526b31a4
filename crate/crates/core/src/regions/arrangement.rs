//! Planar subdivision of the screen rectangle by projected knot segments,
//! via a half-edge structure and face walking.

use std::collections::HashMap;

use thiserror::Error;

use crate::camera::ScreenSegment;
use crate::geom::{cross2, point_in_loop, signed_area, Vec2};

/// Minimum distance of a crossing from a segment endpoint, in segment
/// parameter units.
pub const SCREEN_ENDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrangementError {
    #[error("non-generic screen projection at knot segments {0} and {1}; perturb the camera")]
    NonGeneric(usize, usize),
}

/// A face: outer boundary loop plus hole loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub outer: Vec<Vec2>,
    pub holes: Vec<Vec<Vec2>>,
}

impl Region {
    pub fn area(&self) -> f64 {
        signed_area(&self.outer).abs() - self.holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
    }

    pub fn rings(&self) -> Vec<&[Vec2]> {
        std::iter::once(self.outer.as_slice())
            .chain(self.holes.iter().map(Vec::as_slice))
            .collect()
    }

    /// Even-odd containment.
    pub fn contains(&self, p: &Vec2) -> bool {
        point_in_loop(p, &self.outer) && !self.holes.iter().any(|h| point_in_loop(p, h))
    }
}

/// Regions `a` and `b` are separated by a piece of knot segment `segment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacency {
    pub a: usize,
    pub b: usize,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    pub width: f64,
    pub height: f64,
    pub regions: Vec<Region>,
    pub adjacency: Vec<Adjacency>,
    /// Number of transverse crossings between projected knot segments.
    pub crossings: usize,
}

struct Graph {
    points: Vec<Vec2>,
    // undirected edges with the knot segment they came from (None = border)
    edges: Vec<(usize, usize, Option<usize>)>,
}

fn intersect(a: &ScreenSegment, b: &ScreenSegment) -> Result<Option<(f64, f64)>, ArrangementError> {
    let da = a.b - a.a;
    let db = b.b - b.a;
    let denom = cross2(&da, &db);
    let w = b.a - a.a;
    if denom.abs() <= 1e-14 * da.norm() * db.norm() {
        if cross2(&w, &da).abs() <= 1e-12 * da.norm() * (1.0 + w.norm()) {
            // collinear: overlapping only if the projections overlap
            let len2 = da.norm_squared();
            let t0 = w.dot(&da) / len2;
            let t1 = (b.b - a.a).dot(&da) / len2;
            if t0.max(t1) > 0.0 && t0.min(t1) < 1.0 {
                return Err(ArrangementError::NonGeneric(a.segment, b.segment));
            }
        }
        return Ok(None);
    }
    let s = cross2(&w, &db) / denom;
    let t = cross2(&w, &da) / denom;
    let tol = SCREEN_ENDPOINT_TOLERANCE;
    let within = |x: f64| (-tol..=1.0 + tol).contains(&x);
    if !(within(s) && within(t)) {
        return Ok(None);
    }
    if s < tol || s > 1.0 - tol || t < tol || t > 1.0 - tol {
        return Err(ArrangementError::NonGeneric(a.segment, b.segment));
    }
    Ok(Some((s, t)))
}

fn build_graph(
    segs: &[ScreenSegment],
    vertex_count: usize,
    w: f64,
    h: f64,
) -> Result<(Graph, usize), ArrangementError> {
    let mut points: Vec<Vec2> = Vec::new();
    let mut border: Vec<(f64, usize)> = Vec::new(); // (perimeter coordinate, id)
    let e = 1e-9 * (w + h);
    let perimeter = |p: &Vec2| -> Option<f64> {
        if p.y.abs() <= e {
            Some(p.x)
        } else if (p.x - w).abs() <= e {
            Some(w + p.y)
        } else if (p.y - h).abs() <= e {
            Some(w + h + (w - p.x))
        } else if p.x.abs() <= e {
            Some(2.0 * w + h + (h - p.y))
        } else {
            None
        }
    };
    // consecutive unclipped segments share the projected knot vertex
    let mut by_vertex: HashMap<usize, usize> = HashMap::new();
    let mut node = |p: Vec2, vertex: Option<usize>, points: &mut Vec<Vec2>, border: &mut Vec<(f64, usize)>| {
        if let Some(&id) = vertex.and_then(|v| by_vertex.get(&v)) {
            return id;
        }
        points.push(p);
        let id = points.len() - 1;
        if let Some(v) = vertex {
            by_vertex.insert(v, id);
        }
        if let Some(c) = perimeter(&p) {
            border.push((c, id));
        }
        id
    };
    let mut start_id = Vec::with_capacity(segs.len());
    let mut end_id = Vec::with_capacity(segs.len());
    for s in segs {
        let va = s.a_is_vertex.then_some(s.segment);
        let vb = s.b_is_vertex.then_some((s.segment + 1) % vertex_count.max(1));
        start_id.push(node(s.a, va, &mut points, &mut border));
        end_id.push(node(s.b, vb, &mut points, &mut border));
    }

    // pairwise crossings
    let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); segs.len()];
    let mut crossings = 0;
    for i in 0..segs.len() {
        let (a0, a1) = (segs[i].a, segs[i].b);
        for j in i + 1..segs.len() {
            let shares = start_id[i] == end_id[j]
                || end_id[i] == start_id[j]
                || start_id[i] == start_id[j]
                || end_id[i] == end_id[j];
            if shares {
                continue;
            }
            let (b0, b1) = (segs[j].a, segs[j].b);
            if a0.x.max(a1.x) < b0.x.min(b1.x)
                || b0.x.max(b1.x) < a0.x.min(a1.x)
                || a0.y.max(a1.y) < b0.y.min(b1.y)
                || b0.y.max(b1.y) < a0.y.min(a1.y)
            {
                continue;
            }
            if let Some((s, t)) = intersect(&segs[i], &segs[j])? {
                points.push(a0.lerp(&a1, s));
                let id = points.len() - 1;
                splits[i].push((s, id));
                splits[j].push((t, id));
                crossings += 1;
            }
        }
    }

    let mut edges = Vec::new();
    for (k, list) in splits.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prev = start_id[k];
        for &(_, id) in list.iter() {
            edges.push((prev, id, Some(segs[k].segment)));
            prev = id;
        }
        edges.push((prev, end_id[k], Some(segs[k].segment)));
    }
    // screen border with corners
    for (c, p) in [(0.0, Vec2::new(0.0, 0.0)), (w, Vec2::new(w, 0.0)), (w + h, Vec2::new(w, h)), (2.0 * w + h, Vec2::new(0.0, h))] {
        points.push(p);
        border.push((c, points.len() - 1));
    }
    border.sort_by(|a, b| a.0.total_cmp(&b.0));
    for k in 0..border.len() {
        let (a, b) = (border[k].1, border[(k + 1) % border.len()].1);
        if points[a] != points[b] {
            edges.push((a, b, None));
        }
    }
    Ok((Graph { points, edges }, crossings))
}

/// Builds the subdivision of `[0, width] x [0, height]` induced by the
/// segments and the screen border. `vertex_count` is the number of knot
/// vertices, so the last segment closes onto vertex 0.
pub fn build_arrangement(
    segs: &[ScreenSegment],
    vertex_count: usize,
    width: f64,
    height: f64,
) -> Result<Arrangement, ArrangementError> {
    let (g, crossings) = build_graph(segs, vertex_count, width, height)?;
    let np = g.points.len();
    let ne = g.edges.len();
    // half-edge 2k goes u->v, 2k+1 goes v->u
    let origin = |h: usize| {
        let (u, v, _) = g.edges[h / 2];
        if h % 2 == 0 {
            u
        } else {
            v
        }
    };
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); np];
    for h in 0..2 * ne {
        out[origin(h)].push(h);
    }
    let angle = |h: usize| {
        let d = g.points[origin(h ^ 1)] - g.points[origin(h)];
        d.y.atan2(d.x)
    };
    let mut pos_in = vec![0usize; 2 * ne];
    for list in out.iter_mut() {
        list.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        for (i, &h) in list.iter().enumerate() {
            pos_in[h] = i;
        }
    }
    // next(h): at the head of h, the outgoing edge just clockwise of twin(h)
    let next = |h: usize| {
        let t = h ^ 1;
        let v = origin(t);
        let list = &out[v];
        list[(pos_in[t] + list.len() - 1) % list.len()]
    };
    let mut cycle_of = vec![usize::MAX; 2 * ne];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for h in 0..2 * ne {
        if cycle_of[h] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut c = Vec::new();
        let mut x = h;
        while cycle_of[x] == usize::MAX {
            cycle_of[x] = id;
            c.push(x);
            x = next(x);
        }
        cycles.push(c);
    }
    let loops: Vec<Vec<Vec2>> = cycles
        .iter()
        .map(|c| c.iter().map(|&h| g.points[origin(h)]).collect())
        .collect();
    let areas: Vec<f64> = loops.iter().map(|l| signed_area(l)).collect();

    // positive cycles bound faces; non-positive ones are outer boundaries of
    // connected components (holes), except the one around the whole screen
    let mut face_of_cycle = vec![usize::MAX; cycles.len()];
    let mut regions: Vec<Region> = Vec::new();
    let mut face_cycles: Vec<usize> = Vec::new();
    for (c, &a) in areas.iter().enumerate() {
        if a > 0.0 {
            face_of_cycle[c] = regions.len();
            face_cycles.push(c);
            regions.push(Region {
                outer: loops[c].clone(),
                holes: Vec::new(),
            });
        }
    }
    let screen_area = width * height;
    for (c, &a) in areas.iter().enumerate() {
        if a > 0.0 {
            continue;
        }
        if (a.abs() - screen_area).abs() <= 1e-9 * screen_area && touches_border(&loops[c], width, height) {
            continue; // the unbounded face outside the screen
        }
        // smallest positive cycle containing this component
        let probe = hole_probe(&loops[c]);
        let owner = face_cycles
            .iter()
            .filter(|&&f| f != c && point_in_loop(&probe, &loops[f]) && !shares_vertex(&loops[f], &loops[c]))
            .min_by(|&&x, &&y| areas[x].total_cmp(&areas[y]));
        if let Some(&f) = owner {
            face_of_cycle[c] = face_of_cycle[f];
            regions[face_of_cycle[f]].holes.push(loops[c].clone());
        }
    }

    let mut adjacency = Vec::new();
    for (k, &(_, _, seg)) in g.edges.iter().enumerate() {
        if let Some(s) = seg {
            let (fa, fb) = (face_of_cycle[cycle_of[2 * k]], face_of_cycle[cycle_of[2 * k + 1]]);
            if fa != usize::MAX && fb != usize::MAX && fa != fb {
                let (a, b) = (fa.min(fb), fa.max(fb));
                let adj = Adjacency { a, b, segment: s };
                if !adjacency.contains(&adj) {
                    adjacency.push(adj);
                }
            }
        }
    }
    Ok(Arrangement {
        width,
        height,
        regions,
        adjacency,
        crossings,
    })
}

fn touches_border(l: &[Vec2], w: f64, h: f64) -> bool {
    let e = 1e-9 * (w + h);
    l.iter()
        .any(|p| p.x.abs() <= e || p.y.abs() <= e || (p.x - w).abs() <= e || (p.y - h).abs() <= e)
}

fn shares_vertex(a: &[Vec2], b: &[Vec2]) -> bool {
    b.iter().any(|p| a.contains(p))
}

/// A point of the hole loop to test containment with.
fn hole_probe(l: &[Vec2]) -> Vec2 {
    l[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polygon(points: &[Vec2]) -> Vec<ScreenSegment> {
        let n = points.len();
        (0..n)
            .map(|i| ScreenSegment {
                a: points[i],
                b: points[(i + 1) % n],
                depth_a: 1.0,
                depth_b: 1.0,
                segment: i,
                a_is_vertex: true,
                b_is_vertex: true,
            })
            .collect()
    }

    fn total_area(a: &Arrangement) -> f64 {
        a.regions.iter().map(Region::area).sum()
    }

    #[test]
    fn empty_screen() {
        let a = build_arrangement(&[], 0, 100.0, 50.0).unwrap();
        assert_eq!(a.regions.len(), 1);
        assert!((a.regions[0].area() - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn square_inside() {
        let sq = [Vec2::new(10.0, 10.0), Vec2::new(30.0, 10.0), Vec2::new(30.0, 30.0), Vec2::new(10.0, 30.0)];
        let a = build_arrangement(&polygon(&sq), 4, 100.0, 50.0).unwrap();
        assert_eq!(a.regions.len(), 2);
        assert!((total_area(&a) - 5000.0).abs() < 1e-9);
        let outer = a.regions.iter().find(|r| !r.holes.is_empty()).unwrap();
        assert!(!outer.contains(&Vec2::new(20.0, 20.0)));
        assert!(outer.contains(&Vec2::new(50.0, 20.0)));
        assert_eq!(a.adjacency.len(), 4);
    }

    #[test]
    fn bowtie_has_three_regions() {
        // figure-eight curve: one crossing, n + 2 = 3 regions
        let pts = [Vec2::new(10.0, 10.0), Vec2::new(40.0, 40.0), Vec2::new(40.0, 10.0), Vec2::new(10.0, 40.0)];
        let a = build_arrangement(&polygon(&pts), 4, 100.0, 60.0).unwrap();
        assert_eq!(a.crossings, 1);
        assert_eq!(a.regions.len(), 3);
        assert!((total_area(&a) - 6000.0).abs() < 1e-9);
    }

    #[test]
    fn chord_across_the_screen() {
        let s = ScreenSegment {
            a: Vec2::new(0.0, 20.0),
            b: Vec2::new(100.0, 30.0),
            depth_a: 1.0,
            depth_b: 1.0,
            segment: 7,
            a_is_vertex: false,
            b_is_vertex: false,
        };
        let a = build_arrangement(&[s], 10, 100.0, 50.0).unwrap();
        assert_eq!(a.regions.len(), 2);
        assert!((total_area(&a) - 5000.0).abs() < 1e-9);
        assert_eq!(a.adjacency, vec![Adjacency { a: 0, b: 1, segment: 7 }]);
    }

    #[test]
    fn collinear_overlap_is_non_generic() {
        let s = |a: Vec2, b: Vec2, k| ScreenSegment {
            a,
            b,
            depth_a: 1.0,
            depth_b: 1.0,
            segment: k,
            a_is_vertex: false,
            b_is_vertex: false,
        };
        let segs = [
            s(Vec2::new(10.0, 10.0), Vec2::new(30.0, 10.0), 0),
            s(Vec2::new(20.0, 10.0), Vec2::new(40.0, 10.0), 5),
        ];
        assert_eq!(build_arrangement(&segs, 10, 100.0, 50.0).unwrap_err(), ArrangementError::NonGeneric(0, 5));
    }
}
