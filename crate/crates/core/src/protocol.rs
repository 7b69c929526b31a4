//! The engine side of the walkthrough protocol: sessions that move a
//! first-person camera, transport the world along each step, and describe
//! the resulting view as a `FrameState` snapshot.
//!
//! Clients draw the regions as filled polygons in the listed colors; every
//! bit of topology is decided here.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{Camera, CameraError, DEFAULT_FOV};
use crate::geom::{arr3, Vec3};
use crate::regions::{RegionCache, RegionError, RegionMap};
use crate::render::{render_with, Frame};
use crate::scene::Scene;
use crate::transport::{TransportError, WorldState};

pub const PROTOCOL_VERSION: u32 = 1;
/// Distance covered per 60 Hz frame with a movement key held, relative to
/// the scene diameter.
pub const STEP_SPEED: f64 = 0.05;
pub const FRAME_RATE: f64 = 60.0;
/// Pitch stays this far from straight up or down.
const PITCH_LIMIT: f64 = 1.5;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("bad step request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Regions(#[from] RegionError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Movement request. `move` is `[right, forward, up]` in the camera's
/// horizontal frame, each component in `[-1, 1]` (held-key amounts); `look`
/// is `[yaw, pitch]` in radians, added to the current pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRequest {
    /// Seconds since the previous step.
    pub dt: f64,
    #[serde(rename = "move", default)]
    pub movement: [f64; 3],
    #[serde(default)]
    pub look: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    /// Radians about `+z`, zero facing `+x`.
    pub yaw: f64,
    pub pitch: f64,
}

impl Pose {
    pub fn forward(&self) -> Vec3 {
        let (cp, sp) = (self.pitch.cos(), self.pitch.sin());
        Vec3::new(cp * self.yaw.cos(), cp * self.yaw.sin(), sp)
    }

    pub fn camera(&self, width: u32, height: u32) -> Result<Camera, CameraError> {
        Camera::new(Vec3::from(self.position), self.forward(), Vec3::z(), DEFAULT_FOV, width, height)
    }

    /// One diameter back from the centroid along `-x`, slightly raised,
    /// facing `+x`.
    pub fn default_for(scene: &Scene) -> Pose {
        let d = scene.diameter();
        let p = scene.curve.centroid() + Vec3::new(-d, 0.0, 0.1 * d);
        Pose {
            position: arr3(&p),
            yaw: 0.0,
            pitch: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldInfo {
    pub name: String,
    pub color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotSegment {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub depth: [f64; 2],
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionState {
    pub id: usize,
    /// Outer loop first, then holes; screen pixels, `y` down.
    pub loops: Vec<Vec<[f64; 2]>>,
    pub world: String,
    pub color: [u8; 3],
    pub pole: [f64; 2],
    pub radius: f64,
    pub bbox: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventState {
    pub segment: usize,
    pub sign: i8,
    pub from: String,
    pub to: String,
}

/// One view of a session, self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    pub version: u32,
    pub scene: String,
    pub frame: u64,
    pub world: String,
    pub world_color: [u8; 3],
    pub pose: Pose,
    pub width: u32,
    pub height: u32,
    pub legend: Vec<WorldInfo>,
    pub knot: Vec<KnotSegment>,
    pub regions: Vec<RegionState>,
    /// Crossings during the step that produced this frame.
    pub events: Vec<EventState>,
}

pub struct Session {
    scene: Arc<Scene>,
    pose: Pose,
    world: WorldState,
    width: u32,
    height: u32,
    frame: u64,
    log: Vec<EventState>,
    cache: RegionCache,
}

impl Session {
    pub fn new(scene: Arc<Scene>, width: u32, height: u32) -> Result<Session, ProtocolError> {
        let pose = Pose::default_for(&scene);
        pose.camera(width, height)?;
        let world = WorldState {
            element: scene.group.table.identity(),
        };
        Ok(Session {
            scene,
            pose,
            world,
            width,
            height,
            frame: 0,
            log: Vec::new(),
            cache: RegionCache::new(),
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn world(&self) -> WorldState {
        self.world
    }

    pub fn world_name(&self) -> &str {
        self.scene.world_name(self.world.element)
    }

    /// Every crossing since the session started.
    pub fn log(&self) -> &[EventState] {
        &self.log
    }

    pub fn camera(&self) -> Result<Camera, CameraError> {
        self.pose.camera(self.width, self.height)
    }

    /// Moves, transports and returns the new view. On error the session is
    /// left as it was.
    pub fn step(&mut self, req: &StepRequest) -> Result<FrameState, ProtocolError> {
        let finite = req.dt.is_finite() && req.movement.iter().chain(&req.look).all(|x| x.is_finite());
        if !finite || req.dt < 0.0 {
            return Err(ProtocolError::BadRequest("non-finite or negative values".into()));
        }
        let mut pose = self.pose;
        pose.yaw = (pose.yaw + req.look[0]).rem_euclid(std::f64::consts::TAU);
        pose.pitch = (pose.pitch + req.look[1]).clamp(-PITCH_LIMIT, PITCH_LIMIT);
        let m = Vec3::from(req.movement).map(|x| x.clamp(-1.0, 1.0));
        let flat = Vec3::new(pose.yaw.cos(), pose.yaw.sin(), 0.0);
        let right = flat.cross(&Vec3::z());
        let dist = STEP_SPEED * self.scene.diameter() * req.dt * FRAME_RATE;
        let from = Vec3::from(self.pose.position);
        let to = from + (right * m.x + flat * m.y + Vec3::z() * m.z) * dist;
        pose.position = arr3(&to);
        pose.camera(self.width, self.height)?;

        let table = &self.scene.group.table;
        let (world, events) = if to == from {
            (self.world, Vec::new())
        } else {
            self.scene.portals.transport_path(table, self.world, &[from, to])?
        };
        let mut w = self.world.element;
        let events: Vec<EventState> = events
            .iter()
            .map(|e| {
                let next = table.product(w, e.applied);
                let ev = EventState {
                    segment: e.segment,
                    sign: e.sign,
                    from: self.scene.world_name(w).to_string(),
                    to: self.scene.world_name(next).to_string(),
                };
                w = next;
                ev
            })
            .collect();
        let map = self.region_map(&pose)?;
        self.pose = pose;
        self.world = world;
        self.frame += 1;
        self.log.extend(events.iter().cloned());
        Ok(self.describe(&map, events))
    }

    fn region_map(&mut self, pose: &Pose) -> Result<Arc<RegionMap>, ProtocolError> {
        let cam = pose.camera(self.width, self.height)?;
        let s = &self.scene;
        Ok(self.cache.get(&cam, &s.curve, &s.portals, &s.group.table)?)
    }

    /// The current view without moving.
    pub fn state(&mut self) -> Result<FrameState, ProtocolError> {
        let map = self.region_map(&self.pose.clone())?;
        Ok(self.describe(&map, Vec::new()))
    }

    /// Pixel frame of the current view.
    pub fn render(&mut self) -> Result<Frame, ProtocolError> {
        let map = self.region_map(&self.pose.clone())?;
        Ok(render_with(&self.scene, &map, &self.camera()?, self.world))
    }

    fn describe(&self, map: &RegionMap, events: Vec<EventState>) -> FrameState {
        let s = &self.scene;
        let labels = map.labels(&s.group.table, self.world);
        let pt = |p: &crate::geom::Vec2| [p.x, p.y];
        FrameState {
            version: PROTOCOL_VERSION,
            scene: s.spec.name.clone(),
            frame: self.frame,
            world: s.world_name(self.world.element).to_string(),
            world_color: s.world_color(self.world.element),
            pose: self.pose,
            width: self.width,
            height: self.height,
            legend: s
                .spec
                .worlds
                .iter()
                .map(|w| WorldInfo {
                    name: w.name.clone(),
                    color: w.color,
                })
                .collect(),
            knot: map
                .segments
                .iter()
                .map(|k| KnotSegment {
                    a: pt(&k.a),
                    b: pt(&k.b),
                    depth: [k.depth_a, k.depth_b],
                    segment: k.segment,
                })
                .collect(),
            regions: map
                .regions()
                .iter()
                .enumerate()
                .map(|(i, r)| RegionState {
                    id: i,
                    loops: std::iter::once(&r.outer)
                        .chain(&r.holes)
                        .map(|l| l.iter().map(pt).collect())
                        .collect(),
                    world: s.world_name(labels[i]).to_string(),
                    color: s.world_color(labels[i]),
                    pole: pt(&map.poles[i]),
                    radius: map.radii[i],
                    bbox: [pt(&map.bboxes[i].0), pt(&map.bboxes[i].1)],
                })
                .collect(),
            events,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{builtin_scene, Scene};

    fn session(name: &str) -> Session {
        let scene = Arc::new(Scene::build(&builtin_scene(name).unwrap()).unwrap());
        Session::new(scene, 64, 48).unwrap()
    }

    fn forward(n: usize, s: &mut Session) -> Vec<FrameState> {
        let req = StepRequest {
            dt: 1.0 / 60.0,
            movement: [0.0, 1.0, 0.0],
            look: [0.0, 0.0],
        };
        (0..n).map(|_| s.step(&req).unwrap()).collect()
    }

    #[test]
    fn walking_into_the_unknot_and_back() {
        let mut s = session("unknot");
        assert_eq!(s.state().unwrap().world, "e");
        // one diameter ahead is the centroid, inside the cone
        let frames = forward(20, &mut s);
        assert_eq!(frames.last().unwrap().world, "a");
        assert_eq!(frames.iter().map(|f| f.events.len()).sum::<usize>(), 1);
        let back = StepRequest {
            dt: 1.0 / 60.0,
            movement: [0.0, -1.0, 0.0],
            look: [0.0, 0.0],
        };
        for _ in 0..20 {
            s.step(&back).unwrap();
        }
        assert_eq!(s.world_name(), "e");
        assert_eq!(s.log().len(), 2);
        assert!((Vec3::from(s.pose().position) - Vec3::from(Pose::default_for(s.scene()).position)).norm() < 1e-9);
    }

    #[test]
    fn turning_in_place_keeps_the_world() {
        let mut s = session("trefoil");
        let before = s.state().unwrap();
        let f = s
            .step(&StepRequest {
                dt: 1.0 / 60.0,
                movement: [0.0; 3],
                look: [0.3, 0.1],
            })
            .unwrap();
        assert_eq!(f.world, before.world);
        assert!(f.events.is_empty());
        assert_ne!(f.pose, before.pose);
    }

    #[test]
    fn frame_state_round_trips_as_json() {
        let mut s = session("figure-eight");
        let f = s.state().unwrap();
        assert_eq!(f.legend.len(), 10);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FrameState>(&text).unwrap(), f);
        let req: StepRequest = serde_json::from_str(r#"{"dt": 0.016, "move": [0, 1, 0], "look": [0.1, 0]}"#).unwrap();
        assert_eq!(req.movement, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn bad_requests_leave_the_session_alone() {
        let mut s = session("unknot");
        let before = s.pose();
        let err = s.step(&StepRequest {
            dt: f64::NAN,
            movement: [0.0, 1.0, 0.0],
            look: [0.0, 0.0],
        });
        assert!(matches!(err, Err(ProtocolError::BadRequest(_))));
        assert_eq!(s.pose(), before);
    }

    #[test]
    fn region_worlds_match_labels() {
        let mut s = session("trefoil");
        let f = s.state().unwrap();
        for r in &f.regions {
            assert!(f.legend.iter().any(|w| w.name == r.world && w.color == r.color));
        }
    }
}
