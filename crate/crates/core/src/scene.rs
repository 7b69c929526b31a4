//! Scene files: knot, apex, group, generator-to-cone map and world colors,
//! as versioned JSON. `Scene::build` turns a validated spec into geometry.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cone::{assign_generators, build_cone, choose_apex, split_cone, ConeError, ConeSegment, SplitCone};
use crate::diagram::{central_diagram, DiagramError};
use crate::geom::{vec3, Vec3};
use crate::group::{
    add_branching_relators, enumerate, parse_table, EnumeratedGroup, GroupElement, GroupError, Presentation,
    DEFAULT_MAX_COSETS,
};
use crate::knot::{catmull_rom, sample_parametric, KnotCurve, KnotError, ParametricKnot, BUILTIN_KNOTS, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::transport::Portals;
use crate::tube::{tube_mesh, TubeError, TubeMesh};

pub const SCENE_VERSION: u32 = 1;
/// Display tube radius relative to the curve diameter.
pub const DEFAULT_TUBE_RADIUS: f64 = 0.05;
/// Halvings tried when the requested tube would fold over itself.
const TUBE_SHRINKS: usize = 8;
const TUBE_RING_SEGMENTS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported scene version {0} (expected {SCENE_VERSION})")]
    Version(u32),
    #[error("unknown builtin knot `{0}`")]
    UnknownKnot(String),
    #[error("unknown builtin scene `{0}`")]
    UnknownScene(String),
    #[error("empty knot")]
    EmptyKnot,
    #[error("sample count must be at least {MIN_SAMPLES}, got {0}")]
    TooFewSamples(usize),
    #[error("scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("gen_to_cone entry `{0}` is not a generator of the group")]
    UnknownGenerator(String),
    #[error("scene declares {worlds} worlds but the group has order {order}")]
    WorldCount { worlds: usize, order: usize },
    #[error("scene has no knot geometry (group only)")]
    GroupOnly,
    #[error("wirtinger groups need a knot")]
    WirtingerWithoutKnot,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Tube(#[from] TubeError),
}

impl SceneError {
    /// Errors in the geometry pipeline, as opposed to the scene description.
    pub fn is_geometry(&self) -> bool {
        matches!(
            self,
            SceneError::GroupOnly
                | SceneError::Knot(_)
                | SceneError::Diagram(_)
                | SceneError::Cone(_)
                | SceneError::Tube(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KnotSource {
    Builtin {
        name: String,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Closed centripetal Catmull-Rom spline through the points; `samples`
    /// is the total target, spread evenly over the spans.
    Points {
        points: Vec<[f64; 3]>,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Parametric {
        terms: ParametricKnot,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

impl KnotSource {
    pub fn samples(&self) -> usize {
        match self {
            KnotSource::Builtin { samples, .. }
            | KnotSource::Points { samples, .. }
            | KnotSource::Parametric { samples, .. } => *samples,
        }
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_order() -> u32 {
    2
}

fn default_scale() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSource {
    /// Enumerated after adding `g^order` for every generator.
    Presentation {
        generators: Vec<String>,
        relators: Vec<String>,
        #[serde(default = "default_order")]
        order: u32,
    },
    /// The knot group read off the knot's diagram from the apex, then
    /// quotiented like a presentation.
    Wirtinger {
        #[serde(default = "default_order")]
        order: u32,
    },
    /// Letter grid rows; the first row's names fix the element order.
    Table { rows: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub name: String,
    pub color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub version: u32,
    pub name: String,
    /// Absent for group-only scenes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knot: Option<KnotSource>,
    /// Uniform factor applied to the knot coordinates.
    #[serde(default = "default_scale", skip_serializing_if = "is_one")]
    pub scale: f64,
    /// Cone apex in world space (after scaling); used when generic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apex: Option<[f64; 3]>,
    pub group: GroupSource,
    #[serde(default)]
    pub gen_to_cone: Vec<String>,
    pub worlds: Vec<World>,
    /// Tube radius relative to the curve diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tube_radius: Option<f64>,
}

impl SceneSpec {
    pub fn is_group_only(&self) -> bool {
        self.knot.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// SHA-256 of the compact serialization, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("scene serializes"));
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Checks that need no geometry: knot source, sample count, scale,
    /// names in an explicit group, world count for explicit groups.
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.version != SCENE_VERSION {
            return Err(SceneError::Version(self.version));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(SceneError::BadScale(self.scale));
        }
        if let Some(k) = &self.knot {
            match k {
                KnotSource::Builtin { name, .. } if !BUILTIN_KNOTS.contains(&name.as_str()) => {
                    return Err(SceneError::UnknownKnot(name.clone()))
                }
                KnotSource::Points { points, .. } if points.is_empty() => return Err(SceneError::EmptyKnot),
                KnotSource::Parametric { terms, .. } if terms.x.is_empty() && terms.y.is_empty() && terms.z.is_empty() => {
                    return Err(SceneError::EmptyKnot)
                }
                _ => {}
            }
            if k.samples() < MIN_SAMPLES {
                return Err(SceneError::TooFewSamples(k.samples()));
            }
        }
        match &self.group {
            GroupSource::Presentation { generators, .. } => {
                self.check_names(generators)?;
            }
            GroupSource::Table { rows } => {
                let t = parse_table(&rows.join("\n"))?;
                self.check_names(t.names())?;
                if self.worlds.len() != t.order() {
                    return Err(SceneError::WorldCount {
                        worlds: self.worlds.len(),
                        order: t.order(),
                    });
                }
            }
            GroupSource::Wirtinger { .. } if self.knot.is_none() => return Err(SceneError::WirtingerWithoutKnot),
            GroupSource::Wirtinger { .. } => {}
        }
        Ok(())
    }

    fn check_names(&self, names: &[String]) -> Result<(), SceneError> {
        match self.gen_to_cone.iter().find(|g| !names.contains(g)) {
            Some(g) => Err(SceneError::UnknownGenerator(g.clone())),
            None => Ok(()),
        }
    }

    /// The sampled, scaled knot.
    pub fn curve(&self) -> Result<KnotCurve, SceneError> {
        let curve = match self.knot.as_ref().ok_or(SceneError::GroupOnly)? {
            KnotSource::Builtin { name, samples } => {
                let k = ParametricKnot::builtin(name).ok_or_else(|| SceneError::UnknownKnot(name.clone()))?;
                sample_parametric(&k, *samples)?
            }
            KnotSource::Parametric { terms, samples } => sample_parametric(terms, *samples)?,
            KnotSource::Points { points, samples } => {
                if points.is_empty() {
                    return Err(SceneError::EmptyKnot);
                }
                let per_span = samples.div_ceil(points.len()).max(1);
                let control: Vec<Vec3> = points.iter().map(|p| vec3(*p)).collect();
                catmull_rom(&control, per_span)?
            }
        };
        Ok(if self.scale == 1.0 { curve } else { curve.scaled(self.scale) })
    }
}

/// Parses and validates scene text.
pub fn parse_scene(text: &str) -> Result<SceneSpec, SceneError> {
    let spec: SceneSpec = serde_json::from_str(text).map_err(|e| SceneError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

fn worlds(pairs: &[(&str, [u8; 3])]) -> Vec<World> {
    pairs
        .iter()
        .map(|(n, c)| World {
            name: n.to_string(),
            color: *c,
        })
        .collect()
}

// A fixed palette; entry i colors element i in enumeration order.
const PALETTE: [[u8; 3]; 10] = [
    [236, 236, 228],
    [214, 69, 65],
    [52, 120, 198],
    [66, 160, 92],
    [240, 178, 48],
    [142, 84, 176],
    [48, 178, 180],
    [226, 112, 170],
    [120, 98, 70],
    [150, 150, 150],
];

fn palette_worlds(names: &[&str]) -> Vec<World> {
    names
        .iter()
        .zip(PALETTE)
        .map(|(n, c)| World {
            name: n.to_string(),
            color: c,
        })
        .collect()
}

fn builtin_knot(name: &str) -> Option<KnotSource> {
    Some(KnotSource::Builtin {
        name: name.to_string(),
        samples: DEFAULT_SAMPLES,
    })
}

/// The example corpus: five knots with geometry and the Hopf link's group.
pub fn builtin_scenes() -> Vec<SceneSpec> {
    let pres = |g: &[&str], r: &[&str]| GroupSource::Presentation {
        generators: g.iter().map(|s| s.to_string()).collect(),
        relators: r.iter().map(|s| s.to_string()).collect(),
        order: 2,
    };
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let scene = |name: &str, group, gen: &[&str], w: Vec<World>| SceneSpec {
        version: SCENE_VERSION,
        name: name.to_string(),
        knot: builtin_knot(name),
        scale: 1.0,
        apex: None,
        group,
        gen_to_cone: names(gen),
        worlds: w,
        tube_radius: None,
    };
    let two = worlds(&[("e", PALETTE[0]), ("a", PALETTE[1])]);
    vec![
        scene("unknot", pres(&["a"], &[]), &["a"], two.clone()),
        SceneSpec {
            // this apex sees two crossings, so the cone splits in two
            apex: Some([3.0, 3.0, -0.5]),
            ..scene("twisted-unknot", pres(&["a"], &[]), &["a", "a"], two)
        },
        scene(
            "trefoil",
            GroupSource::Wirtinger { order: 2 },
            &["a", "b", "c"],
            palette_worlds(&["e", "a", "b", "c", "d", "f"]),
        ),
        scene(
            "figure-eight",
            GroupSource::Wirtinger { order: 2 },
            &["a", "b", "c", "d"],
            palette_worlds(&["e", "a", "b", "c", "d", "f", "g", "h", "i", "j"]),
        ),
        scene(
            "solomon",
            GroupSource::Wirtinger { order: 2 },
            &["a", "b", "c", "d", "f"],
            palette_worlds(&["e", "a", "b", "c", "d", "f", "g", "h", "i", "j"]),
        ),
        SceneSpec {
            knot: None,
            ..scene(
                "hopf",
                pres(&["a", "b"], &["(ab)^2"]),
                &[],
                palette_worlds(&["e", "a", "b", "c"]),
            )
        },
    ]
}

pub fn builtin_scene(name: &str) -> Result<SceneSpec, SceneError> {
    builtin_scenes()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| SceneError::UnknownScene(name.to_string()))
}

/// The cone apex and the mirrored-view Wirtinger presentation, whose arcs
/// correspond to the cone pieces in order.
fn wirtinger_at(curve: &KnotCurve, apex: &Vec3) -> Result<Presentation, SceneError> {
    Ok(central_diagram(curve, apex)?.mirrored().wirtinger())
}

/// Enumerates the scene group; `geometry` supplies the curve and apex for
/// Wirtinger groups.
fn scene_group(spec: &SceneSpec, geometry: Option<(&KnotCurve, &Vec3)>) -> Result<EnumeratedGroup, SceneError> {
    let g = match &spec.group {
        GroupSource::Presentation {
            generators,
            relators,
            order,
        } => {
            let gens: Vec<&str> = generators.iter().map(String::as_str).collect();
            let rels: Vec<&str> = relators.iter().map(String::as_str).collect();
            let p = Presentation::parse(&gens, &rels)?;
            enumerate(&add_branching_relators(&p, *order), DEFAULT_MAX_COSETS)?
        }
        GroupSource::Wirtinger { order } => {
            let (curve, apex) = geometry.ok_or(SceneError::WirtingerWithoutKnot)?;
            let p = wirtinger_at(curve, apex)?;
            enumerate(&add_branching_relators(&p, *order), DEFAULT_MAX_COSETS)?
        }
        GroupSource::Table { rows } => {
            let table = parse_table(&rows.join("\n"))?;
            let names = table.names().to_vec();
            EnumeratedGroup {
                generator_images: (0..names.len()).map(GroupElement).collect(),
                generator_names: names,
                table,
            }
        }
    };
    if spec.worlds.len() != g.table.order() {
        return Err(SceneError::WorldCount {
            worlds: spec.worlds.len(),
            order: g.table.order(),
        });
    }
    if let Some(n) = spec.gen_to_cone.iter().find(|n| g.generator(n).is_none()) {
        return Err(SceneError::UnknownGenerator(n.clone()));
    }
    Ok(g)
}

/// Enumerates the group of a scene, with or without geometry.
pub fn group_of(spec: &SceneSpec) -> Result<EnumeratedGroup, SceneError> {
    if let GroupSource::Wirtinger { .. } = spec.group {
        let curve = spec.curve()?;
        let apex = choose_apex(&curve, spec.apex.map(vec3))?;
        return scene_group(spec, Some((&curve, &apex)));
    }
    scene_group(spec, None)
}

/// Wirtinger presentation of a geometric scene, read from its apex.
pub fn wirtinger_of(spec: &SceneSpec) -> Result<Presentation, SceneError> {
    let curve = spec.curve()?;
    let apex = choose_apex(&curve, spec.apex.map(vec3))?;
    wirtinger_at(&curve, &apex)
}

fn shrinking_tube(curve: &KnotCurve, radius: f64) -> Result<TubeMesh, SceneError> {
    let mut r = radius;
    for _ in 0..TUBE_SHRINKS {
        match tube_mesh(curve, r, TUBE_RING_SEGMENTS) {
            Err(TubeError::RadiusTooLarge { .. }) => r *= 0.5,
            other => return Ok(other?),
        }
    }
    Ok(tube_mesh(curve, r, TUBE_RING_SEGMENTS)?)
}

/// A scene with its geometry built: curve, tube, cone pieces, portals.
#[derive(Debug, Clone)]
pub struct Scene {
    pub spec: SceneSpec,
    pub curve: KnotCurve,
    pub tube: TubeMesh,
    pub apex: Vec3,
    pub group: EnumeratedGroup,
    pub split: SplitCone,
    pub segments: Vec<ConeSegment>,
    pub portals: Portals,
    pub hash: String,
}

impl Scene {
    pub fn build(spec: &SceneSpec) -> Result<Scene, SceneError> {
        spec.validate()?;
        let curve = spec.curve()?;
        let apex = choose_apex(&curve, spec.apex.map(vec3))?;
        let group = scene_group(spec, Some((&curve, &apex)))?;
        let split = split_cone(&build_cone(&curve, &apex)?)?;
        let segments = assign_generators(&split, &spec.gen_to_cone, &group)?;
        let portals = Portals::new(&segments, curve.diameter());
        let wanted = spec.tube_radius.unwrap_or(DEFAULT_TUBE_RADIUS) * curve.diameter();
        let tube = shrinking_tube(&curve, wanted)?;
        Ok(Scene {
            spec: spec.clone(),
            curve,
            tube,
            apex,
            group,
            split,
            segments,
            portals,
            hash: spec.hash(),
        })
    }

    pub fn diameter(&self) -> f64 {
        self.curve.diameter()
    }

    pub fn world_name(&self, e: GroupElement) -> &str {
        &self.spec.worlds[e.0].name
    }

    pub fn world_color(&self, e: GroupElement) -> [u8; 3] {
        self.spec.worlds[e.0].color
    }

    /// Element by world name (falling back to the table's element names).
    pub fn world_by_name(&self, name: &str) -> Option<GroupElement> {
        self.spec
            .worlds
            .iter()
            .position(|w| w.name == name)
            .map(GroupElement)
            .or_else(|| self.group.table.element(name))
    }
}
