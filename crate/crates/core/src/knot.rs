//! Closed branch curves: trigonometric parametrizations, closed centripetal
//! Catmull-Rom splines, and the polyline they sample to.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{segment_segment_distance, Vec3};

/// Smallest number of polyline points accepted for a knot.
pub const MIN_SAMPLES: usize = 16;
/// Default number of polyline points for builtin knots.
pub const DEFAULT_SAMPLES: usize = 256;
/// Non-adjacent segments closer than this fraction of the diameter count as
/// a self-intersection.
pub const SIMPLICITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnotError {
    #[error("empty knot")]
    Empty,
    #[error("knot needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("consecutive points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("polyline self-intersects near segments {0} and {1}; try a larger sample count")]
    SelfIntersection(usize, usize),
    #[error("non-finite coordinate in knot input")]
    NonFinite,
}

/// One trigonometric term `amplitude * sin(frequency * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl TrigTerm {
    pub const fn sin(amplitude: f64, frequency: f64) -> Self {
        TrigTerm {
            amplitude,
            frequency,
            phase: 0.0,
        }
    }

    pub const fn cos(amplitude: f64, frequency: f64) -> Self {
        TrigTerm {
            amplitude,
            frequency,
            phase: FRAC_PI_2,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t + self.phase).sin()
    }
}

impl From<[f64; 3]> for TrigTerm {
    fn from(v: [f64; 3]) -> Self {
        TrigTerm {
            amplitude: v[0],
            frequency: v[1],
            phase: v[2],
        }
    }
}

impl From<TrigTerm> for [f64; 3] {
    fn from(t: TrigTerm) -> Self {
        [t.amplitude, t.frequency, t.phase]
    }
}

/// A closed space curve given as a sum of sine terms per coordinate,
/// periodic on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricKnot {
    #[serde(default)]
    pub x: Vec<TrigTerm>,
    #[serde(default)]
    pub y: Vec<TrigTerm>,
    #[serde(default)]
    pub z: Vec<TrigTerm>,
}

impl ParametricKnot {
    pub fn eval(&self, t: f64) -> Vec3 {
        let sum = |terms: &[TrigTerm]| terms.iter().map(|term| term.eval(t)).sum::<f64>();
        Vec3::new(sum(&self.x), sum(&self.y), sum(&self.z))
    }

    pub fn is_well_formed(&self) -> bool {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .all(|t| t.amplitude.is_finite() && t.frequency.is_finite() && t.phase.is_finite())
    }

    /// `(0.8 sin t, 1.5 cos t, 0)`
    pub fn unknot() -> Self {
        ParametricKnot {
            x: vec![TrigTerm::sin(0.8, 1.0)],
            y: vec![TrigTerm::cos(1.5, 1.0)],
            z: vec![],
        }
    }

    /// `(2 sin(t+1), 3 sin(t+1) cos(t+1), sin t)`, with the product written
    /// as `1.5 sin(2t+2)`.
    pub fn twisted_unknot() -> Self {
        ParametricKnot {
            x: vec![TrigTerm {
                amplitude: 2.0,
                frequency: 1.0,
                phase: 1.0,
            }],
            y: vec![TrigTerm {
                amplitude: 1.5,
                frequency: 2.0,
                phase: 2.0,
            }],
            z: vec![TrigTerm::sin(1.0, 1.0)],
        }
    }

    /// `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`
    pub fn trefoil() -> Self {
        ParametricKnot {
            x: vec![TrigTerm::sin(1.0, 1.0), TrigTerm::sin(2.0, 2.0)],
            y: vec![TrigTerm::cos(1.0, 1.0), TrigTerm::cos(-2.0, 2.0)],
            z: vec![TrigTerm::sin(-1.0, 3.0)],
        }
    }

    /// `((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t)`, products
    /// expanded into sums.
    pub fn figure_eight() -> Self {
        ParametricKnot {
            x: vec![
                TrigTerm::cos(2.0, 3.0),
                TrigTerm::cos(0.5, 1.0),
                TrigTerm::cos(0.5, 5.0),
            ],
            y: vec![
                TrigTerm::sin(2.0, 3.0),
                TrigTerm::sin(0.5, 5.0),
                TrigTerm::sin(0.5, 1.0),
            ],
            z: vec![TrigTerm::sin(1.0, 4.0)],
        }
    }

    /// `((3 + cos 5t) cos 2t, (3 + cos 5t) sin 2t, sin 5t)`, the (5,2) torus
    /// knot, products expanded into sums.
    pub fn solomon_seal() -> Self {
        ParametricKnot {
            x: vec![
                TrigTerm::cos(3.0, 2.0),
                TrigTerm::cos(0.5, 7.0),
                TrigTerm::cos(0.5, 3.0),
            ],
            y: vec![
                TrigTerm::sin(3.0, 2.0),
                TrigTerm::sin(0.5, 7.0),
                TrigTerm::sin(-0.5, 3.0),
            ],
            z: vec![TrigTerm::sin(1.0, 5.0)],
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "unknot" => Self::unknot(),
            "twisted-unknot" => Self::twisted_unknot(),
            "trefoil" => Self::trefoil(),
            "figure-eight" => Self::figure_eight(),
            "solomon" => Self::solomon_seal(),
            _ => return None,
        })
    }
}

/// Names accepted by [`ParametricKnot::builtin`].
pub const BUILTIN_KNOTS: [&str; 5] = [
    "unknot",
    "twisted-unknot",
    "trefoil",
    "figure-eight",
    "solomon",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Parametric,
    ControlPoints,
}

/// A closed polyline: the last point connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotCurve {
    points: Vec<Vec3>,
    source: CurveSource,
    diameter: f64,
}

impl KnotCurve {
    /// Validates the polyline: enough points, no repeated consecutive point
    /// and no self-intersection.
    pub fn new(points: Vec<Vec3>, source: CurveSource) -> Result<Self, KnotError> {
        if points.is_empty() {
            return Err(KnotError::Empty);
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(KnotError::NonFinite);
        }
        if points.len() < MIN_SAMPLES {
            return Err(KnotError::TooFewPoints {
                min: MIN_SAMPLES,
                got: points.len(),
            });
        }
        let diameter = diameter_of(&points);
        let n = points.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if (points[i] - points[j]).norm() <= 1e-12 * diameter.max(1e-300) {
                return Err(KnotError::CoincidentPoints(i, j));
            }
        }
        let curve = KnotCurve {
            points,
            source,
            diameter,
        };
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(KnotError::SelfIntersection(i, j));
        }
        Ok(curve)
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn source(&self) -> CurveSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance between two polyline vertices.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn centroid(&self) -> Vec3 {
        self.points.iter().sum::<Vec3>() / self.points.len() as f64
    }

    /// Segment `i` runs from point `i` to point `i + 1` (wrapping).
    pub fn segment(&self, i: usize) -> (Vec3, Vec3) {
        let n = self.points.len();
        (self.points[i % n], self.points[(i + 1) % n])
    }

    /// Point at the continuous parameter `s` in `[0, n)`: integer part is the
    /// segment, fractional part the position along it.
    pub fn point_at(&self, s: f64) -> Vec3 {
        let n = self.points.len() as f64;
        let s = s.rem_euclid(n);
        let i = s.floor() as usize;
        let (a, b) = self.segment(i);
        a.lerp(&b, s - i as f64)
    }

    pub fn scaled(&self, factor: f64) -> KnotCurve {
        KnotCurve {
            points: self.points.iter().map(|p| p * factor).collect(),
            source: self.source,
            diameter: self.diameter * factor.abs(),
        }
    }

    /// Minimum distance between non-adjacent segments.
    pub fn min_self_distance(&self) -> f64 {
        let n = self.points.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let (a0, a1) = self.segment(i);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b0, b1) = self.segment(j);
                best = best.min(segment_segment_distance(&a0, &a1, &b0, &b1));
            }
        }
        best
    }

    /// Minimum distance from `p` to the polyline.
    pub fn distance_to(&self, p: &Vec3) -> f64 {
        (0..self.points.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                crate::geom::point_segment_distance(p, &a, &b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.points.len();
        let tol = SIMPLICITY_TOLERANCE * self.diameter;
        for i in 0..n {
            let (a0, a1) = self.segment(i);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b0, b1) = self.segment(j);
                if segment_segment_distance(&a0, &a1, &b0, &b1) <= tol {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn diameter_of(points: &[Vec3]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm_squared());
        }
    }
    best.sqrt()
}

/// Samples `points[i] = formula(2πi/n)`.
pub fn sample_parametric(terms: &ParametricKnot, n: usize) -> Result<KnotCurve, KnotError> {
    if n < MIN_SAMPLES {
        return Err(KnotError::TooFewPoints {
            min: MIN_SAMPLES,
            got: n,
        });
    }
    if !terms.is_well_formed() {
        return Err(KnotError::NonFinite);
    }
    let points = (0..n)
        .map(|i| terms.eval(TAU * i as f64 / n as f64))
        .collect();
    KnotCurve::new(points, CurveSource::Parametric)
}

/// Closed centripetal Catmull-Rom spline through `control`, emitting
/// `samples_per_span` points per span; the first point of each span is the
/// control point itself.
pub fn catmull_rom(control: &[Vec3], samples_per_span: usize) -> Result<KnotCurve, KnotError> {
    if control.is_empty() {
        return Err(KnotError::Empty);
    }
    if control.len() < 4 {
        return Err(KnotError::TooFewPoints {
            min: 4,
            got: control.len(),
        });
    }
    if control.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(KnotError::NonFinite);
    }
    let m = control.len();
    let scale = diameter_of(control).max(1e-300);
    for i in 0..m {
        let j = (i + 1) % m;
        if (control[i] - control[j]).norm() <= 1e-12 * scale {
            return Err(KnotError::CoincidentPoints(i, j));
        }
    }
    let samples_per_span = samples_per_span.max(1);
    let mut points = Vec::with_capacity(m * samples_per_span);
    for i in 0..m {
        let p0 = control[(i + m - 1) % m];
        let p1 = control[i];
        let p2 = control[(i + 1) % m];
        let p3 = control[(i + 2) % m];
        points.push(p1);
        for k in 1..samples_per_span {
            let u = k as f64 / samples_per_span as f64;
            points.push(centripetal_span(&p0, &p1, &p2, &p3, u));
        }
    }
    KnotCurve::new(points, CurveSource::ControlPoints)
}

/// Barry-Goldman evaluation of the span `p1 -> p2` at `u` in `[0, 1]`,
/// knot spacing `|Δp|^0.5`.
pub fn centripetal_span(p0: &Vec3, p1: &Vec3, p2: &Vec3, p3: &Vec3, u: f64) -> Vec3 {
    let knot = |a: &Vec3, b: &Vec3| (b - a).norm().sqrt();
    let t0 = 0.0;
    let t1 = t0 + knot(p0, p1);
    let t2 = t1 + knot(p1, p2);
    let t3 = t2 + knot(p2, p3);
    let t = t1 + u * (t2 - t1);
    let mix = |a: &Vec3, b: &Vec3, ta: f64, tb: f64| -> Vec3 {
        a * ((tb - t) / (tb - ta)) + b * ((t - ta) / (tb - ta))
    };
    let a1 = mix(p0, p1, t0, t1);
    let a2 = mix(p1, p2, t1, t2);
    let a3 = mix(p2, p3, t2, t3);
    let b1 = mix(&a1, &a2, t0, t2);
    let b2 = mix(&a2, &a3, t1, t3);
    mix(&b1, &b2, t1, t2)
}
