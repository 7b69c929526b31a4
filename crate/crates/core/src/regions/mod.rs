//! Screen regions: the faces cut out by the projected knot, each labeled
//! with the world seen through it.
//!
//! Away from the knot the monodromy of a view ray only changes when the ray
//! sweeps across the knot itself, so one ray per region suffices. The ray is
//! cast through the region's pole of inaccessibility, which keeps it as far
//! from the knot as the region allows.

mod arrangement;
mod polylabel;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

pub use arrangement::{build_arrangement, Adjacency, Arrangement, ArrangementError, Region};
pub use polylabel::{inside_rings, pole_of_inaccessibility, signed_distance};

use crate::camera::{project_knot, Camera, ScreenSegment};
use crate::geom::{Vec2, Vec3};
use crate::group::{GroupElement, GroupTable};
use crate::knot::KnotCurve;
use crate::transport::{Portals, TransportError, WorldState};

/// View rays end this far from the camera, relative to the scene diameter;
/// comfortably past the cone apex.
pub const FAR_LIMIT: f64 = 100.0;
/// Pole search precision, relative to the region's bounding-box diagonal.
pub const POLE_PRECISION: f64 = 0.01;
/// Camera nudges tried when the projection is non-generic.
pub const PERTURB_ATTEMPTS: usize = 8;
const PERTURB: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Regions of one camera pose, with labels relative to the camera's world:
/// the world seen through region `i` from world `w` is `w * relative[i]`.
#[derive(Debug, Clone)]
pub struct RegionMap {
    /// The camera actually used (possibly nudged off a degenerate pose).
    pub camera: Camera,
    pub segments: Vec<ScreenSegment>,
    pub arrangement: Arrangement,
    pub poles: Vec<Vec2>,
    pub radii: Vec<f64>,
    pub bboxes: Vec<(Vec2, Vec2)>,
    pub relative: Vec<GroupElement>,
}

impl RegionMap {
    pub fn build(
        camera: &Camera,
        curve: &KnotCurve,
        portals: &Portals,
        table: &GroupTable,
    ) -> Result<RegionMap, RegionError> {
        let diameter = curve.diameter();
        let mut cam = *camera;
        let (segments, arrangement) = {
            let mut attempt = 0;
            loop {
                let segs = project_knot(&cam, curve);
                match build_arrangement(&segs, curve.len(), cam.width as f64, cam.height as f64) {
                    Ok(a) => break (segs, a),
                    Err(e) if attempt >= PERTURB_ATTEMPTS => return Err(e.into()),
                    Err(_) => {
                        attempt += 1;
                        let d = crate::geom::fibonacci_direction(attempt, PERTURB_ATTEMPTS + 1);
                        cam.position = camera.position + d * (PERTURB * diameter);
                    }
                }
            }
        };
        let mut poles = Vec::new();
        let mut radii = Vec::new();
        let mut bboxes = Vec::new();
        for r in &arrangement.regions {
            let (lo, hi) = bbox(&r.outer);
            let rings = r.rings();
            let precision = POLE_PRECISION * (hi - lo).norm();
            let (pole, radius) = pole_of_inaccessibility(&rings, precision)
                .unwrap_or_else(|| (r.outer.iter().sum::<Vec2>() / r.outer.len() as f64, 0.0));
            poles.push(pole);
            radii.push(radius);
            bboxes.push((lo, hi));
        }
        let far = FAR_LIMIT * diameter;
        let identity = table.identity();
        let relative = poles
            .iter()
            .map(|p| {
                let d = cam.ray_direction(p).normalize();
                let events = portals.ray_crossings_jittered(&cam.position, &(cam.position + d * far))?;
                let s = crate::transport::transport(table, WorldState { element: identity }, &events);
                Ok(s.element)
            })
            .collect::<Result<Vec<_>, TransportError>>()?;
        Ok(RegionMap {
            camera: cam,
            segments,
            arrangement,
            poles,
            radii,
            bboxes,
            relative,
        })
    }

    pub fn len(&self) -> usize {
        self.arrangement.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrangement.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.arrangement.regions
    }

    /// World seen through each region from world `world`.
    pub fn labels(&self, table: &GroupTable, world: WorldState) -> Vec<GroupElement> {
        self.relative
            .iter()
            .map(|&r| table.product(world.element, r))
            .collect()
    }

    /// The region containing screen point `p`; points on the knot or off
    /// screen go to the nearest region.
    pub fn point_region(&self, p: &Vec2) -> usize {
        for (i, (c, r)) in self.poles.iter().zip(&self.radii).enumerate() {
            if (p - c).norm() < *r {
                return i;
            }
        }
        for (i, reg) in self.arrangement.regions.iter().enumerate() {
            let (lo, hi) = self.bboxes[i];
            if p.x < lo.x || p.y < lo.y || p.x > hi.x || p.y > hi.y {
                continue;
            }
            if reg.contains(p) {
                return i;
            }
        }
        self.arrangement
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| (i, -signed_distance(p, &r.rings())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(0, |(i, _)| i)
    }
}

fn bbox(l: &[Vec2]) -> (Vec2, Vec2) {
    l.iter().fold((l[0], l[0]), |(lo, hi), p| (lo.inf(p), hi.sup(p)))
}

/// Region maps keyed by exact camera pose.
#[derive(Debug, Default)]
pub struct RegionCache {
    maps: HashMap<[u64; 12], Arc<RegionMap>>,
}

impl RegionCache {
    pub fn new() -> RegionCache {
        RegionCache::default()
    }

    pub fn get(
        &mut self,
        camera: &Camera,
        curve: &KnotCurve,
        portals: &Portals,
        table: &GroupTable,
    ) -> Result<Arc<RegionMap>, RegionError> {
        if let Some(m) = self.maps.get(&camera.key()) {
            return Ok(m.clone());
        }
        let m = Arc::new(RegionMap::build(camera, curve, portals, table)?);
        self.maps.insert(camera.key(), m.clone());
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// World at the far end of the view ray through screen point `s`, by direct
/// ray casting.
pub fn ray_world(
    camera: &Camera,
    s: &Vec2,
    portals: &Portals,
    table: &GroupTable,
    world: WorldState,
) -> Result<GroupElement, TransportError> {
    let d: Vec3 = camera.ray_direction(s).normalize();
    let far = camera.position + d * (FAR_LIMIT * portals.diameter());
    let events = portals.ray_crossings_jittered(&camera.position, &far)?;
    Ok(crate::transport::transport(table, world, &events).element)
}
