//! Command-line front end and the local session service.

pub mod server;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use knotcover_core::camera::Camera;
use knotcover_core::cone::dump_obj;
use knotcover_core::geom::Vec3;
use knotcover_core::group::{abelian_invariants, identify};
use knotcover_core::regions::RegionError;
use knotcover_core::render::{render, render_brute, RenderError};
use knotcover_core::scene::{builtin_scene, group_of, parse_scene, wirtinger_of, Scene, SceneError, SceneSpec};
use knotcover_core::transport::{TransportError, WorldState};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SCENE: u8 = 2;
pub const EXIT_GEOMETRY: u8 = 3;
pub const EXIT_OTHER: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Scene(#[from] SceneError),
    #[error("{0}")]
    Transport(#[from] TransportError),
    #[error("{0}")]
    Regions(#[from] RegionError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Regions(r) => CliError::Regions(r),
            RenderError::Transport(t) => CliError::Transport(t),
            RenderError::Io(source) => CliError::Io {
                path: PathBuf::from("<output>"),
                source,
            },
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Scene(e) if e.is_geometry() => EXIT_GEOMETRY,
            CliError::Scene(_) => EXIT_SCENE,
            CliError::Transport(_) | CliError::Regions(_) => EXIT_GEOMETRY,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Csv(_) => EXIT_OTHER,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "knotcover", about = "Walk through knotted portals between worlds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the builtin scenes.
    Scenes,
    /// Parse and fully validate a scene (file path or builtin name).
    Validate { scene: String },
    /// Sample the knot; optionally write it as x,y,z lines.
    Knot {
        scene: String,
        #[arg(long)]
        dump_curve: Option<PathBuf>,
    },
    /// Wirtinger presentation read from the cone apex (uppercase = inverse).
    Wirtinger { scene: String },
    /// Group order, identification and multiplication table (rows = left factor).
    Group { scene: String },
    /// Cut cone pieces and their generators.
    Cone {
        scene: String,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Transport along a polyline read from a CSV file of x,y,z rows.
    Transport {
        scene: String,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "e")]
        start: String,
    },
    /// Render a frame as binary PPM.
    Render {
        scene: String,
        #[arg(long, value_parser = parse_vec3)]
        pos: Vec3,
        #[arg(long, value_parser = parse_vec3)]
        look: Vec3,
        #[arg(long, default_value = "e")]
        world: String,
        #[arg(long, default_value = "640x480", value_parser = parse_size)]
        size: (u32, u32),
        #[arg(short, long)]
        output: PathBuf,
        /// Per-pixel ray casting instead of screen regions.
        #[arg(long)]
        brute: bool,
    },
    /// Serve the session protocol over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y, z] if v.iter().all(|c| c.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected x,y,z, got `{s}`")),
    }
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let w: u32 = w.parse().map_err(|e| format!("width: {e}"))?;
    let h: u32 = h.parse().map_err(|e| format!("height: {e}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

/// A scene file, or a builtin scene name when no such file exists.
pub fn load_scene(arg: &str) -> Result<SceneSpec, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Ok(parse_scene(&text)?)
    } else {
        Ok(builtin_scene(arg)?)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn world_of(scene: &Scene, name: &str) -> Result<WorldState, CliError> {
    scene
        .world_by_name(name)
        .map(|element| WorldState { element })
        .ok_or_else(|| CliError::Usage(format!("unknown world `{name}`")))
}

/// Runs one command, writing its report to `out`.
pub fn run(cmd: Command, out: &mut impl Write) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match cmd {
        Command::Scenes => {
            for s in knotcover_core::scene::builtin_scenes() {
                let kind = if s.is_group_only() { "group only" } else { "geometry" };
                writeln!(out, "{}\t{} worlds\t{}", s.name, s.worlds.len(), kind).map_err(io)?;
            }
        }
        Command::Validate { scene } => {
            let spec = load_scene(&scene)?;
            let g = group_of(&spec)?;
            if !spec.is_group_only() {
                Scene::build(&spec)?;
            }
            writeln!(out, "ok: {} ({} worlds)", spec.name, g.table.order()).map_err(io)?;
        }
        Command::Knot { scene, dump_curve } => {
            let spec = load_scene(&scene)?;
            let curve = spec.curve()?;
            writeln!(out, "{} points, diameter {:.6}", curve.len(), curve.diameter()).map_err(io)?;
            if let Some(path) = dump_curve {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                for p in curve.points() {
                    w.serialize((p.x, p.y, p.z))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
                write_file(&path, &bytes)?;
            }
        }
        Command::Wirtinger { scene } => {
            let p = wirtinger_of(&load_scene(&scene)?)?;
            writeln!(out, "generators: {}", p.generators.join(" ")).map_err(io)?;
            for r in &p.relators {
                writeln!(out, "{}", r.display(&p.generators)).map_err(io)?;
            }
        }
        Command::Group { scene } => {
            let spec = load_scene(&scene)?;
            let g = group_of(&spec)?;
            writeln!(out, "order: {}", g.table.order()).map_err(io)?;
            writeln!(out, "group: {}", identify(&g.table)).map_err(io)?;
            if let knotcover_core::scene::GroupSource::Presentation { generators, relators, order } = &spec.group {
                let gens: Vec<&str> = generators.iter().map(String::as_str).collect();
                let rels: Vec<&str> = relators.iter().map(String::as_str).collect();
                let p = knotcover_core::group::Presentation::parse(&gens, &rels)
                    .map_err(SceneError::from)?;
                let p = knotcover_core::group::add_branching_relators(&p, *order);
                writeln!(out, "abelianization: {}", abelian_invariants(&p)).map_err(io)?;
            }
            write!(out, "{}", g.table.to_grid()).map_err(io)?;
        }
        Command::Cone { scene, dump } => {
            let s = Scene::build(&load_scene(&scene)?)?;
            writeln!(out, "apex: {} {} {}", s.apex.x, s.apex.y, s.apex.z).map_err(io)?;
            writeln!(out, "pieces: {}", s.segments.len()).map_err(io)?;
            for seg in &s.segments {
                writeln!(
                    out,
                    "piece {}: {} triangles, generator {}",
                    seg.id,
                    seg.triangles.len(),
                    s.group.table.name(seg.generator)
                )
                .map_err(io)?;
            }
            if let Some(path) = dump {
                write_file(&path, dump_obj(&s.segments, &s.group).as_bytes())?;
            }
        }
        Command::Transport { scene, path, start } => {
            let s = Scene::build(&load_scene(&scene)?)?;
            let start = world_of(&s, &start)?;
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .comment(Some(b'#'))
                .trim(csv::Trim::All)
                .from_path(&path)?;
            let points: Vec<Vec3> = reader
                .deserialize::<(f64, f64, f64)>()
                .map(|r| r.map(|(x, y, z)| Vec3::new(x, y, z)))
                .collect::<Result<_, _>>()?;
            if points.len() < 2 {
                return Err(CliError::Usage("a path needs at least two points".into()));
            }
            let (end, events) = s.portals.transport_path(&s.group.table, start, &points)?;
            let mut w = start.element;
            for e in &events {
                let next = s.group.table.product(w, e.applied);
                writeln!(
                    out,
                    "t={:.6} piece={} {} {} -> {}",
                    e.t,
                    e.segment,
                    if e.sign > 0 { "front->back" } else { "back->front" },
                    s.world_name(w),
                    s.world_name(next)
                )
                .map_err(io)?;
                w = next;
            }
            writeln!(out, "world: {}", s.world_name(end.element)).map_err(io)?;
        }
        Command::Render {
            scene,
            pos,
            look,
            world,
            size,
            output,
            brute,
        } => {
            let s = Scene::build(&load_scene(&scene)?)?;
            let w = world_of(&s, &world)?;
            let cam = Camera::look_at(pos, look, size.0, size.1).map_err(|e| CliError::Usage(e.to_string()))?;
            let frame = if brute { render_brute(&s, &cam, w)? } else { render(&s, &cam, w)? };
            write_file(&output, &frame.to_ppm())?;
            writeln!(
                out,
                "wrote {} ({}x{}, world {}, {} colors)",
                output.display(),
                frame.width,
                frame.height,
                s.world_name(w.element),
                frame.distinct_colors()
            )
            .map_err(io)?;
        }
        Command::Serve { addr } => {
            let rt = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: "<runtime>".into(),
                source,
            })?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|source| CliError::Io {
                    path: addr.clone().into(),
                    source,
                })?;
                writeln!(out, "listening on {addr}").map_err(io)?;
                out.flush().map_err(io)?;
                axum::serve(listener, server::router(server::AppState::default()))
                    .await
                    .map_err(|source| CliError::Io {
                        path: addr.into(),
                        source,
                    })
            })?;
        }
    }
    Ok(())
}
