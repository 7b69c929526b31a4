//! The cut cone: the fan of triangles from an apex to every knot segment,
//! cut along its self-intersections into portal pieces.
//!
//! Two fan triangles meet (if at all) along a segment from the apex to the
//! point `X` where the ray from the apex crosses the nearer strand. On the
//! nearer strand's triangle that segment runs from apex to knot and cuts the
//! sheet; on the farther one it is a slit that stops short of the knot. The
//! pieces are therefore the stretches of the knot between consecutive
//! "near" points, ordered by knot parameter with piece 0 containing
//! parameter 0.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{fibonacci_direction, triangle_area, Vec3};
use crate::group::{EnumeratedGroup, GroupElement};
use crate::knot::KnotCurve;

/// Apex distance from the curve centroid when searching, in curve diameters.
pub const APEX_DISTANCE: f64 = 10.0;
/// Directions tried after `+z` when searching for a generic apex.
pub const APEX_ATTEMPTS: usize = 64;
/// Plane tolerance for triangle intersection, relative to the diameter.
pub const PLANE_TOLERANCE: f64 = 1e-9;
/// Minimum distance of a cut from a segment endpoint (segment parameter).
pub const CUT_ENDPOINT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("apex lies on the knot")]
    ApexOnCurve,
    #[error("cone triangle {0} is degenerate (apex collinear with a knot segment)")]
    DegenerateTriangle(usize),
    #[error("non-generic cone at triangles {first} and {second}: {reason}; perturb the apex")]
    NonGeneric {
        first: usize,
        second: usize,
        reason: &'static str,
    },
    #[error("no generic apex found after {0} attempts")]
    NoGenericApex(usize),
    #[error("generator-to-cone map has {map} entries but the cone has {pieces} pieces")]
    PieceCountMismatch { pieces: usize, map: usize },
    #[error("generator-to-cone map names {0:?}, which is not a group generator")]
    UnknownGenerator(String),
}

#[derive(Debug, Clone)]
pub struct Cone {
    pub apex: Vec3,
    /// `(apex, k_i, k_{i+1})` for every knot segment `i`.
    pub triangles: Vec<[Vec3; 3]>,
    diameter: f64,
}

impl Cone {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| triangle_area(&t[0], &t[1], &t[2])).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

pub fn build_cone(curve: &KnotCurve, apex: &Vec3) -> Result<Cone, ConeError> {
    let diam = curve.diameter();
    if curve.distance_to(apex) <= 1e-9 * diam {
        return Err(ConeError::ApexOnCurve);
    }
    let triangles: Vec<[Vec3; 3]> = (0..curve.len())
        .map(|i| {
            let (a, b) = curve.segment(i);
            [*apex, a, b]
        })
        .collect();
    for (i, t) in triangles.iter().enumerate() {
        let seg = (t[2] - t[1]).norm();
        // height of the apex over the segment line, relative to its length
        let h = 2.0 * triangle_area(&t[0], &t[1], &t[2]) / seg;
        if h <= 1e-9 * diam {
            return Err(ConeError::DegenerateTriangle(i));
        }
    }
    Ok(Cone {
        apex: *apex,
        triangles,
        diameter: diam,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum TriTri {
    Disjoint,
    Coplanar,
    Segment(Vec3, Vec3),
}

fn plane_section(t: &[Vec3; 3], d: &[f64; 3]) -> Vec<Vec3> {
    let mut pts = Vec::new();
    for k in 0..3 {
        if d[k] == 0.0 {
            pts.push(t[k]);
        }
        let (a, b) = (k, (k + 1) % 3);
        if d[a] * d[b] < 0.0 {
            let s = d[a] / (d[a] - d[b]);
            pts.push(t[a].lerp(&t[b], s));
        }
    }
    pts
}

/// Intersection of two triangles. Signed plane distances below `eps` are
/// treated as zero.
pub fn tri_tri_segment(t1: &[Vec3; 3], t2: &[Vec3; 3], eps: f64) -> TriTri {
    let n1 = (t1[1] - t1[0]).cross(&(t1[2] - t1[0])).normalize();
    let n2 = (t2[1] - t2[0]).cross(&(t2[2] - t2[0])).normalize();
    let snap = |x: f64| if x.abs() < eps { 0.0 } else { x };
    let d2 = [0, 1, 2].map(|k| snap(n1.dot(&(t2[k] - t1[0]))));
    let d1 = [0, 1, 2].map(|k| snap(n2.dot(&(t1[k] - t2[0]))));
    if d2.iter().all(|&x| x == 0.0) || d1.iter().all(|&x| x == 0.0) {
        return TriTri::Coplanar;
    }
    let side = |d: &[f64; 3]| d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0);
    if side(&d1) || side(&d2) {
        return TriTri::Disjoint;
    }
    let line = n1.cross(&n2);
    if line.norm() < 1e-12 {
        return TriTri::Coplanar;
    }
    let s1 = plane_section(t1, &d1);
    let s2 = plane_section(t2, &d2);
    if s1.is_empty() || s2.is_empty() {
        return TriTri::Disjoint;
    }
    let extent = |pts: &[Vec3]| {
        let mut lo = (f64::INFINITY, pts[0]);
        let mut hi = (f64::NEG_INFINITY, pts[0]);
        for p in pts {
            let x = p.dot(&line);
            if x < lo.0 {
                lo = (x, *p);
            }
            if x > hi.0 {
                hi = (x, *p);
            }
        }
        (lo, hi)
    };
    let (lo1, hi1) = extent(&s1);
    let (lo2, hi2) = extent(&s2);
    let lo = if lo1.0 > lo2.0 { lo1 } else { lo2 };
    let hi = if hi1.0 < hi2.0 { hi1 } else { hi2 };
    if hi.0 < lo.0 - eps {
        return TriTri::Disjoint;
    }
    TriTri::Segment(lo.1, hi.1)
}

/// A radial split of fan triangle `segment` at base parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub segment: usize,
    pub t: f64,
    /// Cuts separate pieces; the far-side slits only refine the mesh.
    pub cut: bool,
}

/// Self-intersection line of the cone: from the apex to `end`, which lies
/// on the near strand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleLine {
    pub near: Split,
    pub far: Split,
    pub end: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubTriangle {
    /// `[apex, p, q]` with `p` before `q` along the knot, so the winding
    /// matches the parent fan triangle.
    pub vertices: [Vec3; 3],
    pub parent: usize,
    /// Knot parameters of `p` and `q`.
    pub start: f64,
    pub end: f64,
}

impl SubTriangle {
    /// Unit normal of the front side, from the winding `(apex, p, q)`.
    pub fn front_normal(&self) -> Vec3 {
        let [a, p, q] = self.vertices;
        (p - a).cross(&(q - a)).normalize()
    }

    pub fn area(&self) -> f64 {
        let [a, p, q] = self.vertices;
        triangle_area(&a, &p, &q)
    }
}

#[derive(Debug, Clone)]
pub struct ConePiece {
    pub id: usize,
    pub triangles: Vec<SubTriangle>,
    /// Knot parameter where the piece's boundary on the knot starts; the
    /// stretch runs to the next piece's start (wrapping).
    pub start: f64,
}

impl ConePiece {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(SubTriangle::area).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SplitCone {
    pub apex: Vec3,
    pub pieces: Vec<ConePiece>,
    pub double_lines: Vec<DoubleLine>,
}

impl SplitCone {
    pub fn area(&self) -> f64 {
        self.pieces.iter().map(ConePiece::area).sum()
    }

    /// Piece owning knot parameter `s`.
    pub fn piece_at(&self, s: f64) -> usize {
        let mut cuts: Vec<f64> = self
            .double_lines
            .iter()
            .map(|d| d.near.segment as f64 + d.near.t)
            .collect();
        cuts.sort_by(f64::total_cmp);
        if cuts.is_empty() {
            return 0;
        }
        cuts.iter().filter(|&&c| c <= s).count() % cuts.len()
    }
}

/// Least-squares `(alpha, beta)` with `x - a ≈ alpha (p - a) + beta (q - a)`.
fn fan_coordinates(t: &[Vec3; 3], x: &Vec3) -> (f64, f64) {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let w = x - t[0];
    let (a11, a12, a22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
    let (b1, b2) = (e1.dot(&w), e2.dot(&w));
    let det = a11 * a22 - a12 * a12;
    ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Finds all self-intersections, subdivides the fan along them and returns
/// the connected pieces in knot-parameter order.
pub fn split_cone(cone: &Cone) -> Result<SplitCone, ConeError> {
    let n = cone.len();
    let apex = cone.apex;
    let eps = PLANE_TOLERANCE * cone.diameter;
    // angular bounding cones around each fan triangle for pair rejection
    let bounds: Vec<(Vec3, f64)> = cone
        .triangles
        .iter()
        .map(|t| {
            let a = (t[1] - apex).normalize();
            let b = (t[2] - apex).normalize();
            let mid = (a + b).normalize();
            (mid, mid.dot(&a).clamp(-1.0, 1.0).acos())
        })
        .collect();

    let mut double_lines = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let gap = bounds[i].0.dot(&bounds[j].0).clamp(-1.0, 1.0).acos();
            if gap > bounds[i].1 + bounds[j].1 + 1e-9 {
                continue;
            }
            let (p, q) = match tri_tri_segment(&cone.triangles[i], &cone.triangles[j], eps) {
                TriTri::Disjoint => continue,
                TriTri::Coplanar => {
                    return Err(ConeError::NonGeneric {
                        first: i,
                        second: j,
                        reason: "coplanar triangles",
                    })
                }
                TriTri::Segment(p, q) => (p, q),
            };
            let (dp, dq) = ((p - apex).norm(), (q - apex).norm());
            if dp.max(dq) <= eps * 1e3 {
                continue; // touching only at the apex
            }
            if dp.min(dq) > eps * 1e3 {
                return Err(ConeError::NonGeneric {
                    first: i,
                    second: j,
                    reason: "intersection away from the apex",
                });
            }
            let x = if dp > dq { p } else { q };
            let (ai, bi) = fan_coordinates(&cone.triangles[i], &x);
            let (aj, bj) = fan_coordinates(&cone.triangles[j], &x);
            let (si, sj) = (ai + bi, aj + bj);
            let (near, far, near_sum, far_sum, near_t, far_t) = if si > sj {
                (i, j, si, sj, bi / si, bj / sj)
            } else {
                (j, i, sj, si, bj / sj, bi / si)
            };
            if (near_sum - 1.0).abs() > 1e-6 || far_sum >= 1.0 - PLANE_TOLERANCE {
                return Err(ConeError::NonGeneric {
                    first: i,
                    second: j,
                    reason: "strands nearly meet along a ray from the apex",
                });
            }
            for t in [near_t, far_t] {
                if !(CUT_ENDPOINT_TOLERANCE..=1.0 - CUT_ENDPOINT_TOLERANCE).contains(&t) {
                    return Err(ConeError::NonGeneric {
                        first: i,
                        second: j,
                        reason: "intersection through a knot vertex",
                    });
                }
            }
            let [_, k0, k1] = cone.triangles[near];
            double_lines.push(DoubleLine {
                near: Split {
                    segment: near,
                    t: near_t,
                    cut: true,
                },
                far: Split {
                    segment: far,
                    t: far_t,
                    cut: false,
                },
                end: k0.lerp(&k1, near_t),
            });
        }
    }
    double_lines.sort_by(|a, b| {
        (a.near.segment as f64 + a.near.t).total_cmp(&(b.near.segment as f64 + b.near.t))
    });

    // Subdivide every fan triangle radially at its split parameters.
    let mut splits: Vec<Vec<Split>> = vec![Vec::new(); n];
    for d in &double_lines {
        splits[d.near.segment].push(d.near);
        splits[d.far.segment].push(d.far);
    }
    let mut subs: Vec<SubTriangle> = Vec::new();
    // whether the radial edge at the start of each sub-triangle is a cut
    let mut cut_before: Vec<bool> = Vec::new();
    for (i, tri) in cone.triangles.iter().enumerate() {
        let list = &mut splits[i];
        list.sort_by(|a, b| a.t.total_cmp(&b.t));
        let [_, k0, k1] = *tri;
        let mut prev = (0.0, false);
        for s in list.iter().map(|s| (s.t, s.cut)).chain(std::iter::once((1.0, false))) {
            if s.0 - prev.0 <= 0.0 {
                return Err(ConeError::NonGeneric {
                    first: i,
                    second: i,
                    reason: "two intersections at the same point",
                });
            }
            subs.push(SubTriangle {
                vertices: [apex, k0.lerp(&k1, prev.0), k0.lerp(&k1, s.0)],
                parent: i,
                start: i as f64 + prev.0,
                end: i as f64 + s.0,
            });
            cut_before.push(prev.1);
            prev = s;
        }
    }

    // Neighbouring sub-triangles share a radial edge; join unless it is a cut.
    let m = subs.len();
    let mut uf = UnionFind((0..m).collect());
    for k in 0..m {
        let next = (k + 1) % m;
        if !cut_before[next] {
            uf.union(k, next);
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut piece_of = vec![0; m];
    for k in 0..m {
        let r = uf.find(k);
        piece_of[k] = match roots.iter().position(|&x| x == r) {
            Some(p) => p,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
    }
    // Components were discovered in parameter order starting from 0, so the
    // component containing parameter 0 is piece 0.
    let mut pieces: Vec<ConePiece> = (0..roots.len())
        .map(|id| ConePiece {
            id,
            triangles: Vec::new(),
            start: f64::INFINITY,
        })
        .collect();
    for (k, sub) in subs.into_iter().enumerate() {
        let p = &mut pieces[piece_of[k]];
        if cut_before[k] {
            p.start = sub.start;
        }
        p.triangles.push(sub);
    }
    for p in &mut pieces {
        if !p.start.is_finite() {
            p.start = 0.0;
        }
    }
    Ok(SplitCone {
        apex,
        pieces,
        double_lines,
    })
}

fn is_generic(curve: &KnotCurve, apex: &Vec3) -> bool {
    build_cone(curve, apex)
        .and_then(|c| split_cone(&c))
        .is_ok()
        && crate::diagram::central_diagram(curve, apex).is_ok()
}

/// The hint if it gives a generic cone, otherwise the first generic point
/// at `APEX_DISTANCE` diameters from the centroid along `+z` or a
/// Fibonacci-sphere direction.
pub fn choose_apex(curve: &KnotCurve, hint: Option<Vec3>) -> Result<Vec3, ConeError> {
    if let Some(h) = hint {
        if is_generic(curve, &h) {
            return Ok(h);
        }
    }
    let c = curve.centroid();
    let r = APEX_DISTANCE * curve.diameter();
    std::iter::once(Vec3::z())
        .chain((0..APEX_ATTEMPTS).map(|i| fibonacci_direction(i, APEX_ATTEMPTS)))
        .map(|d| c + d * r)
        .find(|p| is_generic(curve, p))
        .ok_or(ConeError::NoGenericApex(APEX_ATTEMPTS + 1))
}

/// A labeled portal piece.
#[derive(Debug, Clone)]
pub struct ConeSegment {
    pub id: usize,
    pub triangles: Vec<SubTriangle>,
    pub name: String,
    pub generator: GroupElement,
    pub inverse: GroupElement,
}

/// Labels piece `i` with `gen_to_cone[i]`, looked up first among the
/// presentation generators and then among the element names.
pub fn assign_generators(
    split: &SplitCone,
    gen_to_cone: &[String],
    group: &EnumeratedGroup,
) -> Result<Vec<ConeSegment>, ConeError> {
    if split.pieces.len() != gen_to_cone.len() {
        return Err(ConeError::PieceCountMismatch {
            pieces: split.pieces.len(),
            map: gen_to_cone.len(),
        });
    }
    split
        .pieces
        .iter()
        .zip(gen_to_cone)
        .map(|(p, name)| {
            let g = group
                .generator(name)
                .ok_or_else(|| ConeError::UnknownGenerator(name.clone()))?;
            Ok(ConeSegment {
                id: p.id,
                triangles: p.triangles.clone(),
                name: name.clone(),
                generator: g,
                inverse: group.table.inverse(g),
            })
        })
        .collect()
}

/// Pieces as named mesh groups in a Wavefront-like text format.
pub fn dump_obj(segments: &[ConeSegment], group: &EnumeratedGroup) -> String {
    let mut out = String::from("# cut cone pieces; front side carries the generator\n");
    let mut base = 1;
    for s in segments {
        let _ = writeln!(out, "o piece_{}", s.id);
        let _ = writeln!(
            out,
            "# generator {} back {}",
            group.table.name(s.generator),
            group.table.name(s.inverse)
        );
        for t in &s.triangles {
            for v in &t.vertices {
                let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
            }
        }
        for k in 0..s.triangles.len() {
            let i = base + 3 * k;
            let _ = writeln!(out, "f {} {} {}", i, i + 1, i + 2);
        }
        base += 3 * s.triangles.len();
    }
    out
}
