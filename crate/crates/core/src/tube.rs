//! Display tube around the branch curve.
//!
//! Ring `i` sits at the midpoint of polyline segment `i`, in the plane normal
//! to that segment, so every ring vertex is exactly `radius` away from its
//! own segment. Frames are parallel-transported along the curve and the
//! closing twist is spread evenly so the last ring stitches onto the first.

use std::collections::HashMap;
use std::f64::consts::TAU;

use thiserror::Error;

use crate::geom::{orthonormal_basis, Vec3};
use crate::knot::KnotCurve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TubeError {
    #[error("tube radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("tube radius {radius} too large: the tube would self-intersect (clearance {clearance})")]
    RadiusTooLarge { radius: f64, clearance: f64 },
    #[error("a tube needs at least 3 ring segments")]
    TooFewRingSegments,
}

#[derive(Debug, Clone)]
pub struct TubeMesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub radius: f64,
}

impl TubeMesh {
    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let edges = self.edge_use_counts();
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Every undirected edge is used by exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        self.edge_use_counts().values().all(|&c| c == 2)
    }

    pub fn min_triangle_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize]);
                crate::geom::triangle_area(&a, &b, &c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn edge_use_counts(&self) -> HashMap<(u32, u32), usize> {
        let mut counts = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }
}

fn rotate_onto(v: &Vec3, from: &Vec3, to: &Vec3) -> Vec3 {
    // Minimal rotation taking unit `from` to unit `to`, applied to `v`.
    let axis = from.cross(to);
    let s = axis.norm();
    let c = from.dot(to);
    if s < 1e-15 {
        return *v;
    }
    let k = axis / s;
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

pub fn tube_mesh(curve: &KnotCurve, radius: f64, ring_segments: usize) -> Result<TubeMesh, TubeError> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(TubeError::NonPositiveRadius(radius));
    }
    if ring_segments < 3 {
        return Err(TubeError::TooFewRingSegments);
    }
    let n = curve.len();
    let dirs: Vec<Vec3> = (0..n)
        .map(|i| {
            let (a, b) = curve.segment(i);
            (b - a).normalize()
        })
        .collect();
    let mids: Vec<Vec3> = (0..n)
        .map(|i| {
            let (a, b) = curve.segment(i);
            (a + b) * 0.5
        })
        .collect();

    let mut normals = Vec::with_capacity(n);
    let (n0, _) = orthonormal_basis(&dirs[0]);
    normals.push(n0);
    for i in 1..n {
        let prev = normals[i - 1];
        let t = rotate_onto(&prev, &dirs[i - 1], &dirs[i]);
        // re-orthogonalize against drift
        let t = (t - dirs[i] * t.dot(&dirs[i])).normalize();
        normals.push(t);
    }
    // Holonomy: transport once more back onto the first segment.
    let closing = rotate_onto(&normals[n - 1], &dirs[n - 1], &dirs[0]);
    let closing = (closing - dirs[0] * closing.dot(&dirs[0])).normalize();
    let binormal0 = dirs[0].cross(&n0);
    let twist = closing.dot(&binormal0).atan2(closing.dot(&n0));

    let m = ring_segments;
    let mut vertices = Vec::with_capacity(n * m);
    let mut vnormals = Vec::with_capacity(n * m);
    for i in 0..n {
        let nrm = normals[i];
        let bin = dirs[i].cross(&nrm);
        let offset = -twist * i as f64 / n as f64;
        for j in 0..m {
            let theta = TAU * j as f64 / m as f64 + offset;
            let dir = nrm * theta.cos() + bin * theta.sin();
            vertices.push(mids[i] + dir * radius);
            vnormals.push(dir);
        }
    }

    // Every ring vertex must be nearest to its own segment; otherwise the
    // tube folds over itself somewhere.
    let tol = radius * 1e-9;
    for v in &vertices {
        let d = curve.distance_to(v);
        if d < radius - tol {
            return Err(TubeError::RadiusTooLarge {
                radius,
                clearance: d,
            });
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        let i2 = (i + 1) % n;
        for j in 0..m {
            let j2 = (j + 1) % m;
            let a = (i * m + j) as u32;
            let b = (i2 * m + j) as u32;
            let c = (i2 * m + j2) as u32;
            let d = (i * m + j2) as u32;
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    Ok(TubeMesh {
        vertices,
        normals: vnormals,
        triangles,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::{sample_parametric, ParametricKnot, DEFAULT_SAMPLES};

    #[test]
    fn unknot_tube_is_a_torus() {
        let c = sample_parametric(&ParametricKnot::unknot(), DEFAULT_SAMPLES).unwrap();
        let t = tube_mesh(&c, 0.05, 8).unwrap();
        assert_eq!(t.vertices.len(), DEFAULT_SAMPLES * 8);
        assert!(t.is_watertight());
        assert_eq!(t.euler_characteristic(), 0);
        assert!(t.min_triangle_area() > 0.0);
    }

    #[test]
    fn zero_radius_rejected() {
        let c = sample_parametric(&ParametricKnot::unknot(), 64).unwrap();
        assert_eq!(tube_mesh(&c, 0.0, 8).unwrap_err(), TubeError::NonPositiveRadius(0.0));
    }

    #[test]
    fn oversized_radius_rejected() {
        let c = sample_parametric(&ParametricKnot::trefoil(), 128).unwrap();
        assert!(matches!(
            tube_mesh(&c, 2.0, 8),
            Err(TubeError::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn trefoil_vertices_sit_at_radius() {
        let c = sample_parametric(&ParametricKnot::trefoil(), DEFAULT_SAMPLES).unwrap();
        let r = 0.05 * c.diameter();
        let t = tube_mesh(&c, r, 12).unwrap();
        for v in &t.vertices {
            let d = c.distance_to(v);
            assert!((d - r).abs() <= 1e-6, "vertex at distance {d}, radius {r}");
        }
        assert!(t.is_watertight());
        assert_eq!(t.euler_characteristic(), 0);
    }
}
