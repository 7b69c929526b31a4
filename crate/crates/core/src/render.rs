//! Offline compositor: every pixel takes the color of the world seen through
//! its screen region, then the knot is stroked on top.
//!
//! Worlds are solid colors, so compositing is a color lookup by region
//! label. Textured worlds would need one camera per world; that is where
//! this module would grow.

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::camera::{Camera, ScreenSegment};
use crate::geom::point_segment_distance2;
use crate::group::GroupElement;
use crate::regions::{ray_world, RegionError, RegionMap};
use crate::scene::Scene;
use crate::transport::{TransportError, WorldState};

pub const STROKE_COLOR: [u8; 3] = [16, 16, 16];

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Regions(#[from] RegionError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("writing image: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    /// Row-major, top row first.
    pub pixels: Vec<[u8; 3]>,
    pub world: GroupElement,
    pub camera: Camera,
    pub scene_hash: String,
}

impl Frame {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[(y * self.width + x) as usize]
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().flatten());
        out
    }

    pub fn write_ppm(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(&self.to_ppm())
    }

    pub fn distinct_colors(&self) -> usize {
        let mut c = self.pixels.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// Fraction of pixels equal in both frames.
    pub fn agreement(&self, other: &Frame) -> f64 {
        let same = self.pixels.iter().zip(&other.pixels).filter(|(a, b)| a == b).count();
        same as f64 / self.pixels.len().max(1) as f64
    }
}

fn frame(scene: &Scene, camera: &Camera, world: WorldState, pixels: Vec<[u8; 3]>) -> Frame {
    Frame {
        width: camera.width,
        height: camera.height,
        pixels,
        world: world.element,
        camera: *camera,
        scene_hash: scene.hash.clone(),
    }
}

/// Region colors only, no stroke.
pub fn fill_regions(scene: &Scene, map: &RegionMap, world: WorldState) -> Vec<[u8; 3]> {
    let colors: Vec<[u8; 3]> = map
        .labels(&scene.group.table, world)
        .into_iter()
        .map(|l| scene.world_color(l))
        .collect();
    let (w, h) = (map.camera.width, map.camera.height);
    let mut pixels = vec![[0u8; 3]; (w * h) as usize];
    pixels.par_chunks_mut(w as usize).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            *px = colors[map.point_region(&Camera::pixel_center(x as u32, y as u32))];
        }
    });
    pixels
}

/// Per-pixel ray casting, no stroke.
pub fn fill_brute(scene: &Scene, camera: &Camera, world: WorldState) -> Result<Vec<[u8; 3]>, TransportError> {
    let (w, h) = (camera.width, camera.height);
    let rows: Vec<Vec<[u8; 3]>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let e = ray_world(camera, &Camera::pixel_center(x, y), &scene.portals, &scene.group.table, world)?;
                    Ok(scene.world_color(e))
                })
                .collect::<Result<Vec<_>, TransportError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// One-pixel Bresenham lines over the projected knot.
pub fn stroke(pixels: &mut [[u8; 3]], width: u32, height: u32, segments: &[ScreenSegment]) {
    let clamp = |v: f64, n: u32| (v.floor() as i64).clamp(0, n as i64 - 1);
    for s in segments {
        let (mut x0, mut y0) = (clamp(s.a.x, width), clamp(s.a.y, height));
        let (x1, y1) = (clamp(s.b.x, width), clamp(s.b.y, height));
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let mut err = dx + dy;
        loop {
            pixels[(y0 * width as i64 + x0) as usize] = STROKE_COLOR;
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }
}

/// Renders through the region map of `camera`.
pub fn render(scene: &Scene, camera: &Camera, world: WorldState) -> Result<Frame, RenderError> {
    let map = RegionMap::build(camera, &scene.curve, &scene.portals, &scene.group.table)?;
    Ok(render_with(scene, &map, camera, world))
}

/// Renders with a prebuilt (possibly cached) region map.
pub fn render_with(scene: &Scene, map: &RegionMap, camera: &Camera, world: WorldState) -> Frame {
    let mut pixels = fill_regions(scene, map, world);
    stroke(&mut pixels, camera.width, camera.height, &map.segments);
    frame(scene, camera, world, pixels)
}

/// Ground truth: one full ray cast per pixel, no arrangement.
pub fn render_brute(scene: &Scene, camera: &Camera, world: WorldState) -> Result<Frame, RenderError> {
    let mut pixels = fill_brute(scene, camera, world)?;
    let segs = crate::camera::project_knot(camera, &scene.curve);
    stroke(&mut pixels, camera.width, camera.height, &segs);
    Ok(frame(scene, camera, world, pixels))
}

/// Pixels whose centers lie within `radius` of the projected knot.
pub fn near_boundary(x: u32, y: u32, segments: &[ScreenSegment], radius: f64) -> bool {
    let p = Camera::pixel_center(x, y);
    segments.iter().any(|s| point_segment_distance2(&p, &s.a, &s.b) <= radius)
}
