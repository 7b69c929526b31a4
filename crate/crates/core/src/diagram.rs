//! Knot diagrams: crossings of a projected knot, arcs between
//! undercrossings, and the Wirtinger presentation.
//!
//! Two views are supported. An orthographic view looks at the knot from
//! infinitely far along `+direction` (depth grows toward the viewer). A
//! central view looks outward from a point, the cone apex; there "over" means
//! nearer the apex, and the knot is projected onto the sphere of directions,
//! so the apex may even sit inside the knot's convex hull.

use thiserror::Error;

use crate::geom::{cross2, orthonormal_basis, Vec2, Vec3};
use crate::group::{Letter, Presentation, Word};
use crate::knot::KnotCurve;

/// Minimum distance of a crossing from a segment endpoint, in segment
/// parameter units.
pub const ENDPOINT_TOLERANCE: f64 = 1e-6;
/// Minimum depth separation at a crossing, relative to the curve diameter.
pub const DEPTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("projection direction must be a nonzero finite vector")]
    BadDirection,
    #[error("non-generic projection at segments {first} and {second}: {reason}")]
    NonGeneric {
        first: usize,
        second: usize,
        reason: &'static str,
    },
    #[error("segment {0} is (nearly) parallel to the viewing direction")]
    AlongView(usize),
    #[error("viewpoint lies on the knot")]
    ViewpointOnCurve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum View {
    Orthographic(Vec3),
    Central(Vec3),
}

/// A point on the knot: segment index plus position along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrandPoint {
    pub segment: usize,
    pub t: f64,
}

impl StrandPoint {
    /// Continuous knot parameter in `[0, n)`.
    pub fn param(&self) -> f64 {
        self.segment as f64 + self.t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Location in view coordinates (see [`Diagram::projected`]).
    pub position: Vec2,
    pub over: StrandPoint,
    pub under: StrandPoint,
    pub over_arc: usize,
    pub under_in_arc: usize,
    pub under_out_arc: usize,
    /// +1 for a right-handed crossing, -1 for left-handed.
    pub sign: i8,
}

/// Stretch of the knot between consecutive undercrossings. Arc 0 contains
/// parameter 0, so it wraps around unless the knot has no crossings.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub index: usize,
    /// Start and end knot parameters; `end < start` when the arc wraps.
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone)]
pub struct Diagram {
    pub view: View,
    /// Knot points in view coordinates: screen `(u, v)` for orthographic
    /// views, gnomonic-free angular coordinates for central ones.
    pub projected: Vec<Vec2>,
    pub crossings: Vec<Crossing>,
    pub arcs: Vec<Arc>,
    pub segment_count: usize,
}

/// Generator names for `n` arcs: `a, b, c, d, f, ...` (`e` is reserved for
/// the identity), then `g1, g2, ...`.
pub fn generator_names(n: usize) -> Vec<String> {
    let letters = ('a'..='z').filter(|&c| c != 'e').map(|c| c.to_string());
    letters
        .chain((1..).map(|i| format!("g{i}")))
        .take(n)
        .collect()
}

struct RawCrossing {
    position: Vec2,
    over: StrandPoint,
    under: StrandPoint,
    sign: i8,
}

fn non_adjacent(i: usize, j: usize, n: usize) -> bool {
    i != j && (i + 1) % n != j && (j + 1) % n != i
}

fn check_params(i: usize, j: usize, s: f64, t: f64) -> Result<bool, DiagramError> {
    let inside = |x: f64| (0.0..=1.0).contains(&x);
    let near = |x: f64| (-ENDPOINT_TOLERANCE..=1.0 + ENDPOINT_TOLERANCE).contains(&x);
    if inside(s) && inside(t) {
        if s < ENDPOINT_TOLERANCE
            || s > 1.0 - ENDPOINT_TOLERANCE
            || t < ENDPOINT_TOLERANCE
            || t > 1.0 - ENDPOINT_TOLERANCE
        {
            return Err(DiagramError::NonGeneric {
                first: i,
                second: j,
                reason: "crossing at a segment endpoint",
            });
        }
        return Ok(true);
    }
    if near(s) && near(t) {
        return Err(DiagramError::NonGeneric {
            first: i,
            second: j,
            reason: "crossing at a segment endpoint",
        });
    }
    Ok(false)
}

fn sign_of(over_dir: &Vec3, under_dir: &Vec3, toward_viewer: &Vec3) -> i8 {
    if over_dir.cross(under_dir).dot(toward_viewer) > 0.0 {
        1
    } else {
        -1
    }
}

fn orthographic_crossings(
    curve: &KnotCurve,
    direction: &Vec3,
) -> Result<(Vec<Vec2>, Vec<RawCrossing>), DiagramError> {
    let d = direction.normalize();
    let (u, v) = orthonormal_basis(&d);
    let pts = curve.points();
    let n = pts.len();
    let diam = curve.diameter();
    let proj: Vec<Vec2> = pts.iter().map(|p| Vec2::new(p.dot(&u), p.dot(&v))).collect();
    for i in 0..n {
        if (proj[(i + 1) % n] - proj[i]).norm() <= 1e-12 * diam {
            return Err(DiagramError::AlongView(i));
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        let (a0, a1) = (proj[i], proj[(i + 1) % n]);
        for j in i + 1..n {
            if !non_adjacent(i, j, n) {
                continue;
            }
            let (b0, b1) = (proj[j], proj[(j + 1) % n]);
            // bounding-box reject
            if a0.x.max(a1.x) < b0.x.min(b1.x)
                || b0.x.max(b1.x) < a0.x.min(a1.x)
                || a0.y.max(a1.y) < b0.y.min(b1.y)
                || b0.y.max(b1.y) < a0.y.min(a1.y)
            {
                continue;
            }
            let da = a1 - a0;
            let db = b1 - b0;
            let denom = cross2(&da, &db);
            let w = b0 - a0;
            if denom.abs() <= 1e-14 * da.norm() * db.norm() {
                if cross2(&w, &da).abs() <= 1e-12 * diam * da.norm() {
                    return Err(DiagramError::NonGeneric {
                        first: i,
                        second: j,
                        reason: "collinear projected segments",
                    });
                }
                continue;
            }
            let s = cross2(&w, &db) / denom;
            let t = cross2(&w, &da) / denom;
            if !check_params(i, j, s, t)? {
                continue;
            }
            let (p0, p1) = curve.segment(i);
            let (q0, q1) = curve.segment(j);
            let pa = p0.lerp(&p1, s);
            let pb = q0.lerp(&q1, t);
            let (da3, db3) = ((pa).dot(&d), (pb).dot(&d));
            if (da3 - db3).abs() < DEPTH_TOLERANCE * diam {
                return Err(DiagramError::NonGeneric {
                    first: i,
                    second: j,
                    reason: "strands meet in space",
                });
            }
            let sp_a = StrandPoint { segment: i, t: s };
            let sp_b = StrandPoint { segment: j, t };
            let (over, under, od, ud) = if da3 > db3 {
                (sp_a, sp_b, p1 - p0, q1 - q0)
            } else {
                (sp_b, sp_a, q1 - q0, p1 - p0)
            };
            out.push(RawCrossing {
                position: a0 + da * s,
                over,
                under,
                sign: sign_of(&od, &ud, &d),
            });
        }
    }
    Ok((proj, out))
}

fn central_crossings(
    curve: &KnotCurve,
    apex: &Vec3,
) -> Result<(Vec<Vec2>, Vec<RawCrossing>), DiagramError> {
    let diam = curve.diameter();
    if curve.distance_to(apex) <= 1e-9 * diam {
        return Err(DiagramError::ViewpointOnCurve);
    }
    let rel: Vec<Vec3> = curve.points().iter().map(|p| p - apex).collect();
    let n = rel.len();
    let look = (curve.centroid() - apex).try_normalize(1e-300).unwrap_or(Vec3::z());
    let (bu, bv) = orthonormal_basis(&look);
    let proj: Vec<Vec2> = rel
        .iter()
        .map(|r| {
            let r = r.normalize();
            // azimuthal equidistant coordinates around the look direction
            let ang = r.dot(&look).clamp(-1.0, 1.0).acos();
            let (x, y) = (r.dot(&bu), r.dot(&bv));
            let h = x.hypot(y);
            if h < 1e-300 {
                Vec2::zeros()
            } else {
                Vec2::new(x / h * ang, y / h * ang)
            }
        })
        .collect();
    let normals: Vec<Vec3> = (0..n).map(|i| rel[i].cross(&rel[(i + 1) % n])).collect();
    for (i, nrm) in normals.iter().enumerate() {
        if nrm.norm() <= 1e-12 * rel[i].norm() * rel[(i + 1) % n].norm() {
            return Err(DiagramError::AlongView(i));
        }
    }
    // angular bounding cones for cheap rejection
    let cones: Vec<(Vec3, f64)> = (0..n)
        .map(|i| {
            let a = rel[i].normalize();
            let b = rel[(i + 1) % n].normalize();
            let mid = (a + b).normalize();
            (mid, mid.dot(&a).clamp(-1.0, 1.0).acos())
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (rel[i], rel[(i + 1) % n]);
        for j in i + 1..n {
            if !non_adjacent(i, j, n) {
                continue;
            }
            let gap = cones[i].0.dot(&cones[j].0).clamp(-1.0, 1.0).acos();
            if gap > cones[i].1 + cones[j].1 + 1e-9 {
                continue;
            }
            let (c, d) = (rel[j], rel[(j + 1) % n]);
            let (n1, n2) = (&normals[i], &normals[j]);
            let r = n1.cross(n2);
            if r.norm() <= 1e-14 * n1.norm() * n2.norm() {
                return Err(DiagramError::NonGeneric {
                    first: i,
                    second: j,
                    reason: "coplanar with the viewpoint",
                });
            }
            // f(p) = (p x r) . n vanishes where p is parallel to r
            let f1 = |p: &Vec3| p.cross(&r).dot(n1);
            let f2 = |p: &Vec3| p.cross(&r).dot(n2);
            let s = f1(&a) / (f1(&a) - f1(&b));
            let t = f2(&c) / (f2(&c) - f2(&d));
            if !s.is_finite() || !t.is_finite() {
                continue;
            }
            let pa = a.lerp(&b, s);
            let pb = c.lerp(&d, t);
            if pa.dot(&pb) <= 0.0 {
                continue;
            }
            if !check_params(i, j, s, t)? {
                continue;
            }
            let (la, lb) = (pa.norm(), pb.norm());
            if (la - lb).abs() < DEPTH_TOLERANCE * diam {
                return Err(DiagramError::NonGeneric {
                    first: i,
                    second: j,
                    reason: "strands meet in space",
                });
            }
            let sp_a = StrandPoint { segment: i, t: s };
            let sp_b = StrandPoint { segment: j, t };
            let (over, under, od, ud, near) = if la < lb {
                (sp_a, sp_b, b - a, d - c, pa)
            } else {
                (sp_b, sp_a, d - c, b - a, pb)
            };
            let k = proj[i].lerp(&proj[(i + 1) % n], s);
            out.push(RawCrossing {
                position: k,
                over,
                under,
                sign: sign_of(&od, &ud, &(-near)),
            });
        }
    }
    Ok((proj, out))
}

fn assemble(view: View, projected: Vec<Vec2>, raw: Vec<RawCrossing>) -> Diagram {
    let n = projected.len();
    let mut unders: Vec<f64> = raw.iter().map(|c| c.under.param()).collect();
    unders.sort_by(f64::total_cmp);
    let m = unders.len();
    let arc_of = |s: f64| -> usize {
        if m == 0 {
            return 0;
        }
        unders.partition_point(|&u| u <= s) % m
    };
    let arcs = if m == 0 {
        vec![Arc {
            index: 0,
            start: 0.0,
            end: n as f64,
        }]
    } else {
        (0..m)
            .map(|k| Arc {
                index: k,
                start: unders[(k + m - 1) % m],
                end: unders[k],
            })
            .collect()
    };
    let mut crossings: Vec<Crossing> = raw
        .into_iter()
        .map(|c| {
            let k = unders.partition_point(|&u| u < c.under.param());
            Crossing {
                position: c.position,
                over: c.over,
                under: c.under,
                over_arc: arc_of(c.over.param()),
                under_in_arc: k % m,
                under_out_arc: (k + 1) % m,
                sign: c.sign,
            }
        })
        .collect();
    crossings.sort_by(|a, b| a.under.param().total_cmp(&b.under.param()));
    Diagram {
        view,
        projected,
        crossings,
        arcs,
        segment_count: n,
    }
}

/// Orthographic diagram seen from `+direction`.
pub fn project_and_cross(curve: &KnotCurve, direction: &Vec3) -> Result<Diagram, DiagramError> {
    if !direction.iter().all(|x| x.is_finite()) || direction.norm() < 1e-300 {
        return Err(DiagramError::BadDirection);
    }
    let (proj, raw) = orthographic_crossings(curve, direction)?;
    Ok(assemble(View::Orthographic(direction.normalize()), proj, raw))
}

/// Number of tilted directions tried by [`generic_diagram`].
pub const PERTURBATION_ATTEMPTS: usize = 32;

/// Orthographic diagram along `direction`, or along a slightly tilted
/// direction (about 1e-3 rad, deterministic) when that one is non-generic.
pub fn generic_diagram(curve: &KnotCurve, direction: &Vec3) -> Result<Diagram, DiagramError> {
    let first = project_and_cross(curve, direction);
    let Err(mut err) = first else { return first };
    if err == DiagramError::BadDirection {
        return Err(err);
    }
    let d = direction.normalize();
    let (u, v) = orthonormal_basis(&d);
    for i in 0..PERTURBATION_ATTEMPTS {
        let f = crate::geom::fibonacci_direction(i, PERTURBATION_ATTEMPTS);
        let tilted = d + (u * f.x + v * f.z) * 1e-3;
        match project_and_cross(curve, &tilted) {
            Ok(diagram) => return Ok(diagram),
            Err(e) => err = e,
        }
    }
    Err(err)
}

/// Diagram seen from the point `apex`, over = nearer the apex.
pub fn central_diagram(curve: &KnotCurve, apex: &Vec3) -> Result<Diagram, DiagramError> {
    let (proj, raw) = central_crossings(curve, apex)?;
    Ok(assemble(View::Central(*apex), proj, raw))
}

impl Diagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Index of the arc containing knot parameter `s`.
    pub fn arc_at(&self, s: f64) -> usize {
        let s = s.rem_euclid(self.segment_count as f64);
        let m = self.crossings.len();
        if m == 0 {
            return 0;
        }
        self.crossings.iter().filter(|c| c.under.param() <= s).count() % m
    }

    /// The same crossings seen from the opposite side: over and under swap,
    /// handedness is unchanged.
    pub fn mirrored(&self) -> Diagram {
        let raw = self
            .crossings
            .iter()
            .map(|c| RawCrossing {
                position: Vec2::new(-c.position.x, c.position.y),
                over: c.under,
                under: c.over,
                sign: c.sign,
            })
            .collect();
        let projected = self.projected.iter().map(|p| Vec2::new(-p.x, p.y)).collect();
        assemble(self.view, projected, raw)
    }

    /// One generator per arc, one relator `x_over^s x_in x_over^-s x_out^-1`
    /// per crossing of sign `s`.
    pub fn wirtinger(&self) -> Presentation {
        let names = generator_names(self.arc_count());
        let relators = self
            .crossings
            .iter()
            .map(|c| {
                let over = if c.sign > 0 {
                    Letter::new(c.over_arc)
                } else {
                    Letter::new(c.over_arc).inv()
                };
                Word(vec![
                    over,
                    Letter::new(c.under_in_arc),
                    over.inv(),
                    Letter::new(c.under_out_arc).inv(),
                ])
            })
            .collect();
        Presentation::new(names, relators).expect("arc indices are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::segment_intersection2;
    use crate::group::{abelian_invariants, order_two_quotient};
    use crate::knot::{sample_parametric, ParametricKnot, DEFAULT_SAMPLES};

    fn curve(k: ParametricKnot) -> KnotCurve {
        sample_parametric(&k, DEFAULT_SAMPLES).unwrap()
    }

    /// Independent count: every non-adjacent projected segment pair.
    fn brute_count(c: &KnotCurve) -> usize {
        let p: Vec<Vec2> = c.points().iter().map(|q| Vec2::new(q.x, q.y)).collect();
        let n = p.len();
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                if i < j && non_adjacent(i, j, n) {
                    let hit = segment_intersection2(&p[i], &p[(i + 1) % n], &p[j], &p[(j + 1) % n]);
                    count += hit.is_some() as usize;
                }
            }
        }
        count
    }

    #[test]
    fn z_projection_crossing_counts() {
        let z = Vec3::z();
        for (k, want) in [
            (ParametricKnot::unknot(), 0),
            (ParametricKnot::trefoil(), 3),
            (ParametricKnot::figure_eight(), 4),
        ] {
            let c = curve(k);
            let d = project_and_cross(&c, &z).unwrap();
            assert_eq!(d.crossing_count(), want);
            assert_eq!(brute_count(&c), want);
            assert_eq!(d.arc_count(), want.max(1));
        }
    }

    #[test]
    fn unknot_presentation() {
        let d = project_and_cross(&curve(ParametricKnot::unknot()), &Vec3::z()).unwrap();
        assert_eq!(d.wirtinger().to_string(), "< a |  >");
    }

    #[test]
    fn abelianizations_are_infinite_cyclic() {
        for k in [
            ParametricKnot::trefoil(),
            ParametricKnot::figure_eight(),
            ParametricKnot::solomon_seal(),
            ParametricKnot::twisted_unknot(),
        ] {
            let p = generic_diagram(&curve(k), &Vec3::z()).unwrap().wirtinger();
            assert!(abelian_invariants(&p).is_infinite_cyclic(), "{p}");
        }
    }

    #[test]
    fn quotient_orders() {
        for (k, order) in [
            (ParametricKnot::unknot(), 2),
            (ParametricKnot::twisted_unknot(), 2),
            (ParametricKnot::trefoil(), 6),
            (ParametricKnot::figure_eight(), 10),
            (ParametricKnot::solomon_seal(), 10),
        ] {
            let p = generic_diagram(&curve(k), &Vec3::z()).unwrap().wirtinger();
            assert_eq!(order_two_quotient(&p).unwrap().table.order(), order, "{p}");
        }
    }

    #[test]
    fn arcs_partition_the_curve() {
        let c = curve(ParametricKnot::figure_eight());
        let d = project_and_cross(&c, &Vec3::new(0.1, 0.2, 1.0)).unwrap();
        let n = d.segment_count as f64;
        let total: f64 = d.arcs.iter().map(|a| (a.end - a.start).rem_euclid(n)).sum();
        assert!((total - n).abs() < 1e-9);
        assert_eq!(d.arc_at(0.0), 0);
        for cr in &d.crossings {
            assert_ne!(cr.under_in_arc, cr.under_out_arc);
        }
    }

    #[test]
    fn central_view_from_far_matches_orthographic() {
        for k in [ParametricKnot::trefoil(), ParametricKnot::figure_eight(), ParametricKnot::solomon_seal()] {
            let c = curve(k);
            let dir = Vec3::new(0.01, -0.02, 1.0).normalize();
            let ortho = project_and_cross(&c, &dir).unwrap();
            let central = central_diagram(&c, &(dir * 1e4 * c.diameter())).unwrap();
            assert_eq!(ortho.crossing_count(), central.crossing_count());
            let signs = |d: &Diagram| d.crossings.iter().map(|c| c.sign).collect::<Vec<_>>();
            assert_eq!(signs(&ortho), signs(&central));
            for (a, b) in ortho.crossings.iter().zip(&central.crossings) {
                assert_eq!(a.over.segment, b.over.segment);
                assert_eq!(a.under.segment, b.under.segment);
            }
        }
    }

    #[test]
    fn mirror_swaps_strands_and_keeps_group() {
        let c = curve(ParametricKnot::trefoil());
        let d = project_and_cross(&c, &Vec3::z()).unwrap();
        let m = d.mirrored();
        assert_eq!(m.crossing_count(), 3);
        let p = m.wirtinger();
        assert!(abelian_invariants(&p).is_infinite_cyclic());
        assert_eq!(order_two_quotient(&p).unwrap().table.order(), 6);
    }

    #[test]
    fn trefoil_crossings_share_handedness() {
        let d = project_and_cross(&curve(ParametricKnot::trefoil()), &Vec3::z()).unwrap();
        let s: i32 = d.crossings.iter().map(|c| c.sign as i32).sum();
        assert_eq!(s.abs(), 3);
        let f = project_and_cross(&curve(ParametricKnot::figure_eight()), &Vec3::z()).unwrap();
        let s: i32 = f.crossings.iter().map(|c| c.sign as i32).sum();
        assert_eq!(s, 0, "figure-eight writhe in a minimal diagram");
    }

    #[test]
    fn order_three_quotient_of_trefoil() {
        let p = project_and_cross(&curve(ParametricKnot::trefoil()), &Vec3::z()).unwrap().wirtinger();
        let g = crate::group::enumerate(&crate::group::add_branching_relators(&p, 3), 10_000).unwrap();
        assert_eq!(g.table.order(), 24);
    }

    #[test]
    fn bad_inputs() {
        let c = curve(ParametricKnot::unknot());
        assert_eq!(project_and_cross(&c, &Vec3::zeros()).unwrap_err(), DiagramError::BadDirection);
        assert!(matches!(project_and_cross(&c, &Vec3::x()), Err(DiagramError::NonGeneric { .. })));
        assert_eq!(central_diagram(&c, &c.points()[3]).unwrap_err(), DiagramError::ViewpointOnCurve);
    }

    #[test]
    fn solomon_needs_a_tilt() {
        let c = curve(ParametricKnot::solomon_seal());
        assert!(project_and_cross(&c, &Vec3::z()).is_err());
        assert_eq!(generic_diagram(&c, &Vec3::z()).unwrap().crossing_count(), 5);
    }

    #[test]
    fn names_skip_e() {
        assert_eq!(generator_names(6), ["a", "b", "c", "d", "f", "g"]);
        assert_eq!(generator_names(26).last().unwrap(), "g1");
    }
}
