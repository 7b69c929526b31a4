//! Small vector helpers shared by the geometric modules.

use nalgebra::{Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

pub fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn arr3(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// 2D cross product (z component of the 3D cross product).
#[inline]
pub fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Two unit vectors completing `dir` to a right-handed orthonormal frame
/// `(u, v, dir)`.
pub fn orthonormal_basis(dir: &Vec3) -> (Vec3, Vec3) {
    let d = dir.normalize();
    let helper = if d.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let u = helper.cross(&d).normalize();
    let v = d.cross(&u);
    (u, v)
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in pts {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    /// Slab test for the segment `origin + t * dir`, `t` in `[0, 1]`.
    pub fn hits_segment(&self, origin: &Vec3, inv_dir: &Vec3, pad: f64) -> bool {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for k in 0..3 {
            let lo = self.min[k] - pad;
            let hi = self.max[k] + pad;
            if inv_dir[k].is_infinite() {
                if origin[k] < lo || origin[k] > hi {
                    return false;
                }
                continue;
            }
            let mut a = (lo - origin[k]) * inv_dir[k];
            let mut b = (hi - origin[k]) * inv_dir[k];
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

/// Closest distance between point `p` and segment `[a, b]` in 3D.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - p).norm()
}

/// Closest distance between point `p` and segment `[a, b]` in 2D.
pub fn point_segment_distance2(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - p).norm()
}

/// Minimum distance between segments `[p0, p1]` and `[q0, q1]` in 3D.
pub fn segment_segment_distance(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Proper intersection of 2D segments `[a0, a1]` and `[b0, b1]`.
///
/// Returns the parameters `(s, t)` along each segment, or `None` when the
/// segments are parallel or do not meet within `[0, 1]`.
pub fn segment_intersection2(a0: &Vec2, a1: &Vec2, b0: &Vec2, b1: &Vec2) -> Option<(f64, f64)> {
    let da = a1 - a0;
    let db = b1 - b0;
    let denom = cross2(&da, &db);
    if denom.abs() <= 1e-300 {
        return None;
    }
    let w = b0 - a0;
    let s = cross2(&w, &db) / denom;
    let t = cross2(&w, &da) / denom;
    if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
        Some((s, t))
    } else {
        None
    }
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Signed area of a closed 2D loop (positive for counter-clockwise in a
/// y-up frame).
pub fn signed_area(loop_: &[Vec2]) -> f64 {
    let n = loop_.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = &loop_[i];
        let b = &loop_[(i + 1) % n];
        s += cross2(a, b);
    }
    0.5 * s
}

/// Even-odd containment of `p` in a closed loop.
pub fn point_in_loop(p: &Vec2, loop_: &[Vec2]) -> bool {
    let n = loop_.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = &loop_[i];
        let b = &loop_[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Deterministic, well spread unit vectors (Fibonacci sphere).
pub fn fibonacci_direction(i: usize, n: usize) -> Vec3 {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let n = n.max(1) as f64;
    let y = 1.0 - 2.0 * (i as f64 + 0.5) / n;
    let r = (1.0 - y * y).max(0.0).sqrt();
    let theta = golden * i as f64;
    Vec3::new(r * theta.cos(), y, r * theta.sin())
}
