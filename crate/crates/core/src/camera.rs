//! Pinhole camera and knot projection to screen space.
//!
//! Screen coordinates have `x` to the right and `y` down, in pixels; pixel
//! `(x, y)` covers `[x, x+1) x [y, y+1)` and is sampled at its center.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Vec2, Vec3};
use crate::knot::KnotCurve;

/// Near clipping distance, relative to the scene diameter.
pub const NEAR_PLANE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CameraError {
    #[error("camera forward and up vectors must be nonzero and not parallel")]
    DegenerateBasis,
    #[error("field of view must be in (0, pi), got {0}")]
    BadFov(f64),
    #[error("resolution must be positive, got {0}x{1}")]
    BadResolution(u32, u32),
    #[error("camera position must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub position: Vec3,
    pub forward: Vec3,
    pub up: Vec3,
    /// Vertical field of view in radians.
    pub fov_y: f64,
    pub width: u32,
    pub height: u32,
}

pub const DEFAULT_FOV: f64 = std::f64::consts::FRAC_PI_3;

impl Camera {
    /// Orthonormalizes `forward`/`up` and validates the intrinsics.
    pub fn new(
        position: Vec3,
        forward: Vec3,
        up: Vec3,
        fov_y: f64,
        width: u32,
        height: u32,
    ) -> Result<Camera, CameraError> {
        if !position.iter().all(|x| x.is_finite()) {
            return Err(CameraError::NonFinite);
        }
        if !(fov_y > 0.0 && fov_y < std::f64::consts::PI) {
            return Err(CameraError::BadFov(fov_y));
        }
        if width == 0 || height == 0 {
            return Err(CameraError::BadResolution(width, height));
        }
        let f = forward.try_normalize(1e-300).ok_or(CameraError::DegenerateBasis)?;
        let right = f.cross(&up);
        if right.norm() <= 1e-9 * up.norm() {
            return Err(CameraError::DegenerateBasis);
        }
        let up = right.cross(&f).normalize();
        Ok(Camera {
            position,
            forward: f,
            up,
            fov_y,
            width,
            height,
        })
    }

    /// Camera at `position` looking at `target`, with `+z` up unless the
    /// view is vertical, then `+y`.
    pub fn look_at(position: Vec3, target: Vec3, width: u32, height: u32) -> Result<Camera, CameraError> {
        let f = target - position;
        let up = if f.cross(&Vec3::z()).norm() > 1e-6 * f.norm() {
            Vec3::z()
        } else {
            Vec3::y()
        };
        Camera::new(position, f, up, DEFAULT_FOV, width, height)
    }

    pub fn right(&self) -> Vec3 {
        self.forward.cross(&self.up)
    }

    /// Focal length in pixels.
    pub fn focal(&self) -> f64 {
        0.5 * self.height as f64 / (0.5 * self.fov_y).tan()
    }

    /// Camera-space coordinates `(right, up, forward)`.
    pub fn to_camera(&self, p: &Vec3) -> Vec3 {
        let c = p - self.position;
        Vec3::new(c.dot(&self.right()), c.dot(&self.up), c.dot(&self.forward))
    }

    fn screen_of(&self, c: &Vec3) -> Vec2 {
        let f = self.focal();
        Vec2::new(
            0.5 * self.width as f64 + f * c.x / c.z,
            0.5 * self.height as f64 - f * c.y / c.z,
        )
    }

    /// Screen position and depth, or `None` behind the near plane `near`.
    pub fn project(&self, p: &Vec3, near: f64) -> Option<(Vec2, f64)> {
        let c = self.to_camera(p);
        (c.z > near).then(|| (self.screen_of(&c), c.z))
    }

    /// World-space direction (not normalized) of the ray through screen
    /// point `s`.
    pub fn ray_direction(&self, s: &Vec2) -> Vec3 {
        let f = self.focal();
        let x = (s.x - 0.5 * self.width as f64) / f;
        let y = -(s.y - 0.5 * self.height as f64) / f;
        self.right() * x + self.up * y + self.forward
    }

    pub fn pixel_center(x: u32, y: u32) -> Vec2 {
        Vec2::new(x as f64 + 0.5, y as f64 + 0.5)
    }

    /// Bit-exact identity of the pose and intrinsics, for caching.
    pub fn key(&self) -> [u64; 12] {
        let v = [
            self.position.x,
            self.position.y,
            self.position.z,
            self.forward.x,
            self.forward.y,
            self.forward.z,
            self.up.x,
            self.up.y,
            self.up.z,
            self.fov_y,
        ];
        let mut k = [0u64; 12];
        for (slot, x) in k.iter_mut().zip(v) {
            *slot = x.to_bits();
        }
        k[10] = self.width as u64;
        k[11] = self.height as u64;
        k
    }
}

/// A projected, clipped piece of knot segment `segment`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenSegment {
    pub a: Vec2,
    pub b: Vec2,
    pub depth_a: f64,
    pub depth_b: f64,
    pub segment: usize,
    /// Whether `a` / `b` are the projected knot vertices themselves (not
    /// produced by clipping).
    pub a_is_vertex: bool,
    pub b_is_vertex: bool,
}

/// Liang–Barsky clip of `a + t (b - a)` to the rectangle; returns the `t`
/// range.
fn clip_to_rect(a: &Vec2, b: &Vec2, w: f64, h: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [(-d.x, a.x), (d.x, w - a.x), (-d.y, a.y), (d.y, h - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 < t1).then_some((t0, t1))
}

/// Perspective projection of the knot, clipped to the near plane and the
/// screen rectangle.
pub fn project_knot(camera: &Camera, curve: &KnotCurve) -> Vec<ScreenSegment> {
    let near = NEAR_PLANE * curve.diameter();
    let (w, h) = (camera.width as f64, camera.height as f64);
    let mut out = Vec::new();
    for i in 0..curve.len() {
        let (p, q) = curve.segment(i);
        let (cp, cq) = (camera.to_camera(&p), camera.to_camera(&q));
        if cp.z <= near && cq.z <= near {
            continue;
        }
        // clip in camera space against z = near
        let (mut ca, mut cb) = (cp, cq);
        let (mut a_vertex, mut b_vertex) = (true, true);
        if ca.z <= near {
            let t = (near - cp.z) / (cq.z - cp.z);
            ca = cp.lerp(&cq, t);
            a_vertex = false;
        } else if cb.z <= near {
            let t = (near - cp.z) / (cq.z - cp.z);
            cb = cp.lerp(&cq, t);
            b_vertex = false;
        }
        let (sa, sb) = (camera.screen_of(&ca), camera.screen_of(&cb));
        let Some((t0, t1)) = clip_to_rect(&sa, &sb, w, h) else {
            continue;
        };
        // depth is interpolated linearly in 1/z, as perspective requires
        let inv = |t: f64| 1.0 / ((1.0 - t) / ca.z + t / cb.z);
        out.push(ScreenSegment {
            a: if t0 > 0.0 { sa.lerp(&sb, t0) } else { sa },
            b: if t1 < 1.0 { sa.lerp(&sb, t1) } else { sb },
            depth_a: inv(t0),
            depth_b: inv(t1),
            segment: i,
            a_is_vertex: a_vertex && t0 == 0.0,
            b_is_vertex: b_vertex && t1 == 1.0,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::{sample_parametric, ParametricKnot};

    fn cam() -> Camera {
        Camera::look_at(Vec3::new(0.0, 0.0, 10.0), Vec3::zeros(), 320, 240).unwrap()
    }

    #[test]
    fn center_projects_to_screen_center() {
        let c = cam();
        let (s, depth) = c.project(&Vec3::zeros(), 1e-3).unwrap();
        assert!((s - Vec2::new(160.0, 120.0)).norm() < 1e-9);
        assert!((depth - 10.0).abs() < 1e-12);
        assert!(c.project(&Vec3::new(0.0, 0.0, 20.0), 1e-3).is_none());
    }

    #[test]
    fn ray_direction_inverts_projection() {
        let c = Camera::new(Vec3::new(1.0, -2.0, 3.0), Vec3::new(-0.3, 1.0, -0.4), Vec3::z(), 1.0, 640, 480).unwrap();
        for p in [Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.5, 1.5, -0.2)] {
            let (s, _) = c.project(&p, 1e-6).unwrap();
            let d = c.ray_direction(&s).normalize();
            let want = (p - c.position).normalize();
            assert!((d - want).norm() < 1e-12);
        }
    }

    #[test]
    fn focal_length_matches_fov() {
        let c = cam();
        // top edge of the view frustum maps to y = 0
        let angle = c.fov_y / 2.0;
        let p = c.position + c.forward + c.up * angle.tan();
        let (s, _) = c.project(&p, 1e-6).unwrap();
        assert!(s.y.abs() < 1e-9);
    }

    #[test]
    fn behind_camera_is_empty() {
        let curve = sample_parametric(&ParametricKnot::unknot(), 64).unwrap();
        let c = Camera::look_at(Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, 20.0), 320, 240).unwrap();
        assert!(project_knot(&c, &curve).is_empty());
    }

    #[test]
    fn face_on_unknot_is_closed_and_inside() {
        let curve = sample_parametric(&ParametricKnot::unknot(), 64).unwrap();
        let segs = project_knot(&cam(), &curve);
        assert_eq!(segs.len(), 64);
        for w in segs.windows(2) {
            assert_eq!(w[0].b, w[1].a);
        }
        assert!(segs.iter().all(|s| s.a_is_vertex && s.b_is_vertex));
    }

    #[test]
    fn clipped_segments_touch_the_border() {
        let curve = sample_parametric(&ParametricKnot::trefoil(), 128).unwrap();
        let c = Camera::look_at(Vec3::new(0.5, 0.0, 2.5), Vec3::new(0.5, 0.0, 0.0), 320, 240).unwrap();
        let segs = project_knot(&c, &curve);
        let clipped: Vec<_> = segs.iter().filter(|s| !s.a_is_vertex || !s.b_is_vertex).collect();
        assert!(!clipped.is_empty());
        for s in clipped {
            let p = if s.a_is_vertex { s.b } else { s.a };
            let on = p.x.abs() < 1e-9 || (p.x - 320.0).abs() < 1e-9 || p.y.abs() < 1e-9 || (p.y - 240.0).abs() < 1e-9;
            assert!(on, "{p:?}");
        }
    }

    #[test]
    fn invalid_cameras() {
        assert_eq!(
            Camera::new(Vec3::zeros(), Vec3::z(), Vec3::z(), 1.0, 10, 10).unwrap_err(),
            CameraError::DegenerateBasis
        );
        assert!(matches!(Camera::new(Vec3::zeros(), Vec3::x(), Vec3::z(), 4.0, 10, 10), Err(CameraError::BadFov(_))));
        assert!(matches!(Camera::new(Vec3::zeros(), Vec3::x(), Vec3::z(), 1.0, 0, 10), Err(CameraError::BadResolution(0, 10))));
    }
}
