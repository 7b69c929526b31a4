//! Monodromy: which world a path ends in after crossing portal pieces.
//!
//! Crossing a piece from its front side to its back side multiplies the
//! current world on the right by the piece's generator; crossing the other
//! way multiplies by the inverse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::ConeSegment;
use crate::geom::{fibonacci_direction, point_segment_distance, Aabb, Vec3};
use crate::group::{GroupElement, GroupTable};

/// Hits closer than this (relative to the scene diameter) to a triangle
/// edge, or path endpoints this close to a portal, count as grazing.
pub const GRAZE_TOLERANCE: f64 = 1e-9;
/// Endpoint jitter for grazing retries, relative to the scene diameter.
pub const JITTER: f64 = 1e-6;
pub const JITTER_ATTEMPTS: usize = 8;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("ray grazes portal {segment} near t = {t}; perturb and retry")]
    Grazing { segment: usize, t: f64 },
    #[error("ray still grazes a portal after {0} jittered attempts")]
    GrazingPersists(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub element: GroupElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub t: f64,
    pub segment: usize,
    /// +1 front to back, -1 back to front.
    pub sign: i8,
    pub applied: GroupElement,
}

#[derive(Debug, Clone)]
struct PortalTriangle {
    v: [Vec3; 3],
    normal: Vec3,
    segment: usize,
}

#[derive(Debug, Clone)]
struct Node {
    bbox: Aabb,
    // leaf: triangles[start..start + count]; inner: children at left, left + 1..
    start: usize,
    count: usize,
    left: usize,
    right: usize,
}

/// Labeled portal triangles with a bounding volume hierarchy for segment
/// queries.
#[derive(Debug, Clone)]
pub struct Portals {
    triangles: Vec<PortalTriangle>,
    nodes: Vec<Node>,
    labels: Vec<(GroupElement, GroupElement)>,
    diameter: f64,
}

impl Portals {
    pub fn new(segments: &[ConeSegment], diameter: f64) -> Portals {
        let mut triangles: Vec<PortalTriangle> = segments
            .iter()
            .flat_map(|s| {
                s.triangles.iter().map(move |t| PortalTriangle {
                    v: t.vertices,
                    normal: t.front_normal(),
                    segment: s.id,
                })
            })
            .collect();
        let mut labels = vec![(GroupElement(0), GroupElement(0)); segments.len()];
        for s in segments {
            labels[s.id] = (s.generator, s.inverse);
        }
        let mut nodes = Vec::new();
        if !triangles.is_empty() {
            let len = triangles.len();
            build(&mut triangles, 0, len, &mut nodes);
        }
        Portals {
            triangles,
            nodes,
            labels,
            diameter,
        }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.labels.len()
    }

    /// All transverse crossings of the segment `from -> to`, ordered by `t`.
    pub fn ray_crossings(&self, from: &Vec3, to: &Vec3) -> Result<Vec<CrossingEvent>, TransportError> {
        let mut events = Vec::new();
        if self.nodes.is_empty() {
            return Ok(events);
        }
        let eps = GRAZE_TOLERANCE * self.diameter;
        let dir = to - from;
        let inv = dir.map(|x| 1.0 / x);
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            let node = &self.nodes[k];
            if !node.bbox.hits_segment(from, &inv, eps) {
                continue;
            }
            if node.count > 0 {
                for tri in &self.triangles[node.start..node.start + node.count] {
                    if let Some(ev) = self.hit(tri, from, to, eps)? {
                        events.push(ev);
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        events.sort_by(|a, b| a.t.total_cmp(&b.t));
        let len = dir.norm();
        for w in events.windows(2) {
            if (w[1].t - w[0].t) * len <= eps {
                return Err(TransportError::Grazing {
                    segment: w[1].segment,
                    t: w[1].t,
                });
            }
        }
        Ok(events)
    }

    fn hit(
        &self,
        tri: &PortalTriangle,
        from: &Vec3,
        to: &Vec3,
        eps: f64,
    ) -> Result<Option<CrossingEvent>, TransportError> {
        let n = &tri.normal;
        let d0 = n.dot(&(from - tri.v[0]));
        let d1 = n.dot(&(to - tri.v[0]));
        let near_triangle = |p: &Vec3| self.distance_in_plane(tri, p) <= eps;
        let grazing = |t| TransportError::Grazing {
            segment: tri.segment,
            t,
        };
        if d0.abs() <= eps && near_triangle(&(from - n * d0)) {
            return Err(grazing(0.0));
        }
        if d1.abs() <= eps && near_triangle(&(to - n * d1)) {
            return Err(grazing(1.0));
        }
        if (d0 > 0.0) == (d1 > 0.0) || d0 == 0.0 || d1 == 0.0 {
            return Ok(None);
        }
        let t = d0 / (d0 - d1);
        let x = from.lerp(to, t);
        let dist = self.distance_in_plane(tri, &x);
        if dist > eps {
            return Ok(None);
        }
        if dist > -eps {
            return Err(grazing(t));
        }
        let sign: i8 = if d0 > 0.0 { 1 } else { -1 };
        let (g, g_inv) = self.labels[tri.segment];
        Ok(Some(CrossingEvent {
            t,
            segment: tri.segment,
            sign,
            applied: if sign > 0 { g } else { g_inv },
        }))
    }

    /// Signed distance from an in-plane point to the triangle boundary:
    /// negative inside, positive outside.
    fn distance_in_plane(&self, tri: &PortalTriangle, p: &Vec3) -> f64 {
        let [a, b, c] = tri.v;
        let n = &tri.normal;
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(u, v)| (v - u).cross(&(p - u)).dot(n) >= 0.0);
        let d = point_segment_distance(p, &a, &b)
            .min(point_segment_distance(p, &b, &c))
            .min(point_segment_distance(p, &c, &a));
        if inside {
            -d
        } else {
            d
        }
    }

    /// `ray_crossings`, retried with deterministic endpoint jitter when the
    /// segment grazes a portal.
    pub fn ray_crossings_jittered(
        &self,
        from: &Vec3,
        to: &Vec3,
    ) -> Result<Vec<CrossingEvent>, TransportError> {
        match self.ray_crossings(from, to) {
            Err(TransportError::Grazing { .. }) => {}
            other => return other,
        }
        let r = JITTER * self.diameter;
        for k in 0..JITTER_ATTEMPTS {
            let a = from + fibonacci_direction(2 * k, 2 * JITTER_ATTEMPTS) * r;
            let b = to + fibonacci_direction(2 * k + 1, 2 * JITTER_ATTEMPTS) * r;
            match self.ray_crossings(&a, &b) {
                Err(TransportError::Grazing { .. }) => continue,
                other => return other,
            }
        }
        Err(TransportError::GrazingPersists(JITTER_ATTEMPTS))
    }

    /// Transport along a polyline. When any leg grazes, the whole path is
    /// jittered consistently (shared vertices move together) and retried.
    pub fn transport_path(
        &self,
        table: &GroupTable,
        state: WorldState,
        path: &[Vec3],
    ) -> Result<(WorldState, Vec<CrossingEvent>), TransportError> {
        let r = JITTER * self.diameter;
        for attempt in 0..=JITTER_ATTEMPTS {
            let moved: Vec<Vec3> = if attempt == 0 {
                path.to_vec()
            } else {
                path.iter()
                    .enumerate()
                    .map(|(i, p)| p + fibonacci_direction((attempt * 131 + i * 17) % 97, 97) * r)
                    .collect()
            };
            match self.path_events(&moved) {
                Ok(events) => return Ok((transport(table, state, &events), events)),
                Err(TransportError::Grazing { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(TransportError::GrazingPersists(JITTER_ATTEMPTS))
    }

    /// Events of every leg, with `t` offset by the leg index so the log stays
    /// ordered along the whole path.
    fn path_events(&self, path: &[Vec3]) -> Result<Vec<CrossingEvent>, TransportError> {
        let mut all = Vec::new();
        for (i, w) in path.windows(2).enumerate() {
            for mut ev in self.ray_crossings(&w[0], &w[1])? {
                ev.t += i as f64;
                all.push(ev);
            }
        }
        Ok(all)
    }
}

fn build(tris: &mut [PortalTriangle], start: usize, count: usize, nodes: &mut Vec<Node>) -> usize {
    let slice = &mut tris[start..start + count];
    let bbox = slice
        .iter()
        .fold(Aabb::empty(), |b, t| b.merge(&Aabb::from_points(&t.v)));
    let id = nodes.len();
    nodes.push(Node {
        bbox,
        start,
        count,
        left: 0,
        right: 0,
    });
    if count <= LEAF_SIZE {
        return id;
    }
    let centroid = |t: &PortalTriangle| (t.v[0] + t.v[1] + t.v[2]) / 3.0;
    let cb = Aabb::from_points(&slice.iter().map(centroid).collect::<Vec<_>>());
    let ext = cb.max - cb.min;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = count / 2;
    slice.select_nth_unstable_by(mid, |a, b| centroid(a)[axis].total_cmp(&centroid(b)[axis]));
    let left = build(tris, start, mid, nodes);
    let right = build(tris, start + mid, count - mid, nodes);
    nodes[id].count = 0;
    nodes[id].left = left;
    nodes[id].right = right;
    id
}

/// Right-multiplies the world by every applied element in order.
pub fn transport(table: &GroupTable, state: WorldState, events: &[CrossingEvent]) -> WorldState {
    WorldState {
        element: events
            .iter()
            .fold(state.element, |w, e| table.product(w, e.applied)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{assign_generators, build_cone, choose_apex, split_cone};
    use crate::diagram::{central_diagram, generator_names};
    use crate::group::{order_two_quotient, EnumeratedGroup, Presentation};
    use crate::knot::{sample_parametric, ParametricKnot, DEFAULT_SAMPLES};

    fn unknot_portals() -> (Portals, EnumeratedGroup) {
        let c = sample_parametric(&ParametricKnot::unknot(), DEFAULT_SAMPLES).unwrap();
        let s = split_cone(&build_cone(&c, &Vec3::new(0.0, 0.0, 30.0)).unwrap()).unwrap();
        let g = order_two_quotient(&Presentation::parse(&["a"], &[]).unwrap()).unwrap();
        let segs = assign_generators(&s, &["a".into()], &g).unwrap();
        (Portals::new(&segs, c.diameter()), g)
    }

    fn trefoil_portals() -> (Portals, EnumeratedGroup, crate::knot::KnotCurve, Vec3) {
        let c = sample_parametric(&ParametricKnot::trefoil(), DEFAULT_SAMPLES).unwrap();
        let apex = choose_apex(&c, None).unwrap();
        let p = central_diagram(&c, &apex).unwrap().mirrored().wirtinger();
        let g = order_two_quotient(&p).unwrap();
        let s = split_cone(&build_cone(&c, &apex).unwrap()).unwrap();
        let segs = assign_generators(&s, &generator_names(3), &g).unwrap();
        (Portals::new(&segs, c.diameter()), g, c, apex)
    }

    #[test]
    fn far_path_crosses_nothing() {
        let (p, _) = unknot_portals();
        let ev = p.ray_crossings(&Vec3::new(10.0, 10.0, 0.0), &Vec3::new(11.0, 12.0, 3.0)).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn through_the_disk_and_back() {
        let (p, g) = unknot_portals();
        // the cone from (0,0,30) to the ellipse in z = 0
        let a = Vec3::new(0.0, 0.0, 1.0);
        let b = Vec3::new(-1.0, 0.2, 1.0);
        let ev = p.ray_crossings(&a, &b).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(g.table.name(ev[0].applied), "a");
        let e = WorldState { element: g.table.identity() };
        let (w, log) = p.transport_path(&g.table, e, &[a, b, a]).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log[0].sign, -log[1].sign);
        assert_eq!(w, e);
        let once = transport(&g.table, e, &log[..1]);
        assert_eq!(g.table.name(once.element), "a");
        assert_eq!(transport(&g.table, e, &[]), e);
    }

    #[test]
    fn grazing_is_reported_and_jitter_recovers() {
        let (p, _) = unknot_portals();
        // endpoint on the cone surface: apex-to-knot midpoint of segment 0
        let c = sample_parametric(&ParametricKnot::unknot(), DEFAULT_SAMPLES).unwrap();
        let (k0, k1) = c.segment(0);
        let on = Vec3::new(0.0, 0.0, 30.0).lerp(&k0.lerp(&k1, 0.5), 0.5);
        assert!(matches!(
            p.ray_crossings(&on, &Vec3::new(5.0, 5.0, 5.0)),
            Err(TransportError::Grazing { .. })
        ));
        assert!(p.ray_crossings_jittered(&on, &Vec3::new(5.0, 5.0, 5.0)).is_ok());
    }

    #[test]
    fn trefoil_products_do_not_commute() {
        let (_, g, _, _) = trefoil_portals();
        let a = g.generator("a").unwrap();
        let b = g.generator("b").unwrap();
        let mk = |x| CrossingEvent { t: 0.5, segment: 0, sign: 1, applied: x };
        let e = WorldState { element: g.table.identity() };
        assert_ne!(transport(&g.table, e, &[mk(a), mk(b)]), transport(&g.table, e, &[mk(b), mk(a)]));
    }

    /// Loops around each double line must close up: the pieces are glued
    /// consistently with the group.
    #[test]
    fn loops_around_double_lines_are_trivial() {
        let (p, g, c, apex) = trefoil_portals();
        let s = split_cone(&build_cone(&c, &apex).unwrap()).unwrap();
        let e = WorldState { element: g.table.identity() };
        for d in &s.double_lines {
            let mid = apex.lerp(&d.end, 0.5);
            let axis = (d.end - apex).normalize();
            let (u, v) = crate::geom::orthonormal_basis(&axis);
            let r = 1e-3 * c.diameter();
            let lp: Vec<Vec3> = (0..=64)
                .map(|k| {
                    let th = std::f64::consts::TAU * k as f64 / 64.0;
                    mid + (u * th.cos() + v * th.sin()) * r
                })
                .collect();
            let (w, log) = p.transport_path(&g.table, e, &lp).unwrap();
            assert_eq!(log.len(), 4, "two sheets, each crossed twice");
            assert_eq!(w, e);
        }
    }

    #[test]
    fn small_loop_around_strand_is_a_generator() {
        let (p, g, c, _) = trefoil_portals();
        let e = WorldState { element: g.table.identity() };
        let s = 37.5;
        let center = c.point_at(s);
        let tangent = (c.point_at(s + 0.01) - c.point_at(s - 0.01)).normalize();
        let (u, v) = crate::geom::orthonormal_basis(&tangent);
        let r = 1e-3 * c.diameter();
        let lp: Vec<Vec3> = (0..=32)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 32.0;
                center + (u * th.cos() + v * th.sin()) * r
            })
            .collect();
        let (w, _) = p.transport_path(&g.table, e, &lp).unwrap();
        assert_ne!(w, e);
        let twice: Vec<Vec3> = lp.iter().chain(lp.iter().skip(1)).copied().collect();
        let (w2, _) = p.transport_path(&g.table, e, &twice).unwrap();
        assert_eq!(w2, e);
    }
}
