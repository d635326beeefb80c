//! Stereographic projection and ideal polyhedra.
//!
//! The plane maps to the unit sphere from the north pole `N = (0, 0, 1)`.
//! A circle or line becomes the intersection of the sphere with a plane
//! `⟨X, n⟩ = d`; the image of its disk is the cap `⟨X, n⟩ ≥ d`. In the Klein
//! ball the same plane bounds the hyperbolic half-space `⟨X, n⟩ ≤ d`.

use super::{embed, EmbedOptions, Layout, Placement, Point};
use crate::complex::{CellComplex, Infinity};
use crate::curvature::{self, Metric};
use crate::error::{Error, Result};
use crate::flow::{self, FlowConfig, FlowProblem, FlowTrace};
use crate::geometry::Background;
use crate::tolerances;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Vec3 = [f64; 3];

/// Plane `⟨X, normal⟩ = offset` with unit `normal` and `|offset| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereCircle {
    pub normal: Vec3,
    pub offset: f64,
}

fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl SphereCircle {
    fn from_plane(m: Vec3, k: f64) -> Result<Self> {
        let s = dot3(m, m).sqrt();
        if !(s > 0.0) || !(k.abs() < s) {
            return Err(Error::Domain("plane misses the sphere".into()));
        }
        Ok(SphereCircle { normal: [m[0] / s, m[1] / s, m[2] / s], offset: k / s })
    }

    /// Image of the circle `|p - center| = radius`.
    pub fn from_circle(center: Point, radius: f64) -> Result<Self> {
        let q = center[0] * center[0] + center[1] * center[1] - radius * radius;
        SphereCircle::from_plane([2.0 * center[0], 2.0 * center[1], q - 1.0], q + 1.0)
    }

    /// Image of the line `⟨p, normal⟩ = offset`; it passes through the pole.
    pub fn from_line(normal: Point, offset: f64) -> Result<Self> {
        SphereCircle::from_plane([normal[0], normal[1], offset], offset)
    }

    pub fn from_placement(p: &Placement) -> Option<Result<Self>> {
        match *p {
            Placement::Circle { center, radius } => Some(SphereCircle::from_circle(center, radius)),
            Placement::Line { normal, offset } => Some(SphereCircle::from_line(normal, offset)),
            Placement::Unplaced => None,
        }
    }

    /// Angular radius of the cap.
    pub fn cap_angle(&self) -> f64 {
        self.offset.clamp(-1.0, 1.0).acos()
    }

    /// Back to the plane: a circle, or a line when the plane contains the pole.
    pub fn unproject(&self) -> Placement {
        let [nx, ny, nz] = self.normal;
        let gap = self.offset - nz;
        if gap.abs() < 1e-14 {
            let s = (nx * nx + ny * ny).sqrt();
            return Placement::Line { normal: [nx / s, ny / s], offset: self.offset / s };
        }
        let lambda = 2.0 / gap;
        let center = [lambda * nx / 2.0, lambda * ny / 2.0];
        let k = lambda * self.offset;
        let r2 = center[0] * center[0] + center[1] * center[1] + 1.0 - k;
        Placement::Circle { center, radius: r2.max(0.0).sqrt() }
    }

    /// Exterior intersection angle of the two caps.
    pub fn intersection_angle(&self, other: &SphereCircle) -> f64 {
        PI - self.normal_angle(other)
    }

    /// Angle between the Lorentzian normals of the two planes.
    fn normal_angle(&self, other: &SphereCircle) -> f64 {
        let s1 = (1.0 - self.offset * self.offset).sqrt();
        let s2 = (1.0 - other.offset * other.offset).sqrt();
        ((dot3(self.normal, other.normal) - self.offset * other.offset) / (s1 * s2))
            .clamp(-1.0, 1.0)
            .acos()
    }

    /// Signed distance of a sphere point from the plane.
    pub fn residual(&self, x: Vec3) -> f64 {
        dot3(x, self.normal) - self.offset
    }
}

/// Inverse stereographic projection of a plane point.
pub fn to_sphere(p: Point) -> Vec3 {
    let s = p[0] * p[0] + p[1] * p[1];
    [2.0 * p[0] / (1.0 + s), 2.0 * p[1] / (1.0 + s), (s - 1.0) / (1.0 + s)]
}

/// Stereographic projection from the north pole.
pub fn from_sphere(x: Vec3) -> Point {
    [x[0] / (1.0 - x[2]), x[1] / (1.0 - x[2])]
}

/// Project every placed circle and line; `None` for unplaced vertices.
pub fn stereographic_project(layout: &Layout) -> Result<Vec<Option<SphereCircle>>> {
    if layout.ambient != super::Ambient::Plane {
        return Err(Error::Unsupported("stereographic projection needs a planar layout".into()));
    }
    layout.placements.iter().map(|p| SphereCircle::from_placement(p).transpose()).collect()
}

/// Translate and scale a planar layout so its circle centers have mean zero
/// and unit RMS distance from the origin. Angles are unchanged.
pub fn normalize(layout: &Layout) -> Layout {
    let centers: Vec<Point> = layout.placements.iter().filter_map(|p| p.circle().map(|(c, _)| c)).collect();
    if centers.is_empty() {
        return layout.clone();
    }
    let n = centers.len() as f64;
    let mean = centers.iter().fold([0.0, 0.0], |a, c| [a[0] + c[0] / n, a[1] + c[1] / n]);
    let spread = (centers.iter().map(|c| (c[0] - mean[0]).powi(2) + (c[1] - mean[1]).powi(2)).sum::<f64>() / n).sqrt();
    let scale = if spread > 0.0 { 1.0 / spread } else { 1.0 };
    let map = |p: Point| [(p[0] - mean[0]) * scale, (p[1] - mean[1]) * scale];
    let mut out = layout.clone();
    for p in &mut out.placements {
        *p = match *p {
            Placement::Circle { center, radius } => Placement::Circle { center: map(center), radius: radius * scale },
            Placement::Line { normal, offset } => {
                Placement::Line { normal, offset: (offset - (normal[0] * mean[0] + normal[1] * mean[1])) * scale }
            }
            Placement::Unplaced => Placement::Unplaced,
        };
    }
    for s in out.star_points.iter_mut().flatten() {
        *s = map(*s);
    }
    out.diameter *= scale;
    out
}

/// Hyperbolic half-space `⟨X, normal⟩ ≤ offset` in the Klein ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec3,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngle {
    pub edge: usize,
    /// Interior dihedral angle between the two bounding planes.
    pub interior: f64,
    /// `π - interior`.
    pub exterior: f64,
    /// Weight `Θ` of the edge.
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronData {
    /// Supporting circle per vertex of the pattern.
    pub circles: Vec<Option<SphereCircle>>,
    pub half_spaces: Vec<Option<HalfSpace>>,
    pub dihedral_angles: Vec<DihedralAngle>,
    /// Ideal vertices: the star points on the sphere, per face.
    pub ideal_vertices: Vec<Option<Vec3>>,
    pub warnings: Vec<String>,
}

impl PolyhedronData {
    /// `max |interior dihedral - Θ|`.
    pub fn max_dihedral_error(&self) -> f64 {
        self.dihedral_angles.iter().map(|d| (d.interior - d.theta).abs()).fold(0.0, f64::max)
    }

    /// Largest distance of an ideal vertex from the planes of its face's circles.
    pub fn max_ideal_vertex_error(&self, complex: &CellComplex) -> f64 {
        let mut worst: f64 = 0.0;
        for (f, x) in self.ideal_vertices.iter().enumerate() {
            let Some(x) = x else { continue };
            for &v in &complex.faces()[f].vertices {
                if let Some(c) = &self.circles[v] {
                    worst = worst.max(c.residual(*x).abs());
                }
            }
        }
        worst
    }
}

/// Caps within this angle of tangency or antitangency are flagged.
const CONDITIONING_ANGLE: f64 = 1e-6;

/// Half-spaces and dihedral angles from the spherical circles of a pattern.
pub fn polyhedron_from_pattern(
    complex: &CellComplex,
    circles: &[Option<SphereCircle>],
    ideal_vertices: Vec<Option<Vec3>>,
) -> Result<PolyhedronData> {
    if circles.len() != complex.vertex_count() {
        return Err(Error::Precondition("one circle per vertex expected".into()));
    }
    let mut warnings = Vec::new();
    let half_spaces = circles
        .iter()
        .map(|c| c.map(|c| HalfSpace { normal: c.normal, offset: c.offset }))
        .collect();
    let mut dihedral_angles = Vec::new();
    for (k, e) in complex.edges().iter().enumerate() {
        let (Some(a), Some(b)) = (&circles[e.u], &circles[e.v]) else { continue };
        let interior = a.intersection_angle(b);
        if !(CONDITIONING_ANGLE..=PI - CONDITIONING_ANGLE).contains(&interior) {
            warnings.push(format!("edge {k} is nearly tangent (angle {interior:.3e})"));
        }
        dihedral_angles.push(DihedralAngle { edge: k, interior, exterior: PI - interior, theta: e.theta });
    }
    Ok(PolyhedronData { circles: circles.to_vec(), half_spaces, dihedral_angles, ideal_vertices, warnings })
}

/// Everything produced while turning exterior angles into a polyhedron.
#[derive(Clone, Debug)]
pub struct PolyhedronRun {
    /// The circle pattern complex: dual of the input, weights `π - Θ_ext`,
    /// face 0 at infinity.
    pub pattern: CellComplex,
    pub reduced: CellComplex,
    /// Indices of the reduced vertices in `pattern`.
    pub reduced_map: Vec<usize>,
    pub trace: FlowTrace,
    pub layout: Layout,
    pub data: PolyhedronData,
}

/// Vertices whose incident exterior angles do not sum to `2π`.
pub fn coboundary_violations(complex: &CellComplex, tolerance: f64) -> Vec<(usize, f64)> {
    (0..complex.vertex_count())
        .filter_map(|v| {
            let s = complex.character(v).ok()?;
            ((s - 2.0 * PI).abs() > tolerance).then_some((v, s))
        })
        .collect()
}

/// Build an ideal polyhedron with the combinatorics of `complex` and exterior
/// dihedral angles given by its edge weights.
///
/// The circle pattern lives on the dual with weights `π - Θ_ext`; its face 0
/// is sent to infinity, the remaining vertices are solved for with the
/// prescribed-curvature flow, and the pattern is laid out with the vertices of
/// that face as lines, normalized and projected to the sphere.
pub fn polyhedron_from_exterior_angles(complex: &CellComplex, config: &FlowConfig) -> Result<PolyhedronRun> {
    let bad = coboundary_violations(complex, tolerances::FACE_ANGLE_SUM);
    if let Some(&(v, s)) = bad.first() {
        return Err(Error::Precondition(format!(
            "exterior angles around vertex {} sum to {s}, not 2π ({} vertices fail)",
            complex.labels()[v],
            bad.len()
        )));
    }
    let mut pattern = complex.dual()?;
    pattern.set_infinity(None)?;
    for e in 0..pattern.edge_count() {
        let ext = pattern.edges()[e].theta;
        pattern.set_theta(e, PI - ext)?;
    }
    pattern.set_infinity(Some(Infinity::Face(0)))?;
    let hat = curvature::prescribed_curvature_hat(&pattern)?;
    let (reduced, reduced_map) = pattern.remove_infinity()?;
    let target: Vec<f64> = reduced_map.iter().map(|&v| hat[v]).collect();
    let problem = FlowProblem::with_free_vertices(&reduced, Background::Euclidean, (0..reduced.vertex_count()).collect())?
        .with_target(target)?;
    let start = Metric::new(Background::Euclidean, vec![0.0; reduced.vertex_count()])?;
    let trace = flow::integrate(&problem, &start, config)?;
    if !trace.converged {
        return Err(Error::Integrator {
            t: *trace.times.last().unwrap_or(&0.0),
            reason: format!("prescribed-curvature flow stalled at residual {:.3e}", trace.final_residual()),
        });
    }
    let mut u = vec![0.0; pattern.vertex_count()];
    for (i, &v) in reduced_map.iter().enumerate() {
        u[v] = trace.final_u[i];
    }
    let metric = Metric::new(Background::Euclidean, u)?;
    let options = EmbedOptions { ideal: pattern.infinity_vertices(), ..EmbedOptions::default() };
    let layout = normalize(&embed(&pattern, &metric, &options)?);
    let circles = stereographic_project(&layout)?;
    let mut ideal: Vec<Option<Vec3>> = layout.star_points.iter().map(|s| s.map(to_sphere)).collect();
    ideal[0] = Some([0.0, 0.0, 1.0]);
    let data = polyhedron_from_pattern(&pattern, &circles, ideal)?;
    Ok(PolyhedronRun { pattern, reduced, reduced_map, trace, layout, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn unit_circle_maps_to_equator() {
        let c = SphereCircle::from_circle([0.0, 0.0], 1.0).unwrap();
        assert!((c.normal[2].abs() - 1.0).abs() < 1e-15 && c.offset.abs() < 1e-15);
        assert!((c.cap_angle() - FRAC_PI_2).abs() < 1e-15);
        // disk side is the southern hemisphere
        assert!(c.residual(to_sphere([0.0, 0.0])) > 0.0);
    }

    #[test]
    fn orthogonal_circles_stay_orthogonal() {
        let a = SphereCircle::from_circle([0.0, 0.0], 1.0).unwrap();
        let b = SphereCircle::from_circle([2.0, 0.0], 3f64.sqrt()).unwrap();
        assert!((a.intersection_angle(&b) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn projection_roundtrip() {
        for &(c, r) in &[([0.3, -0.2], 0.7), ([5.0, 1.0], 2.0), ([-1.0, 4.0], 0.01)] {
            let s = SphereCircle::from_circle(c, r).unwrap();
            let Placement::Circle { center, radius } = s.unproject() else { panic!("expected a circle") };
            assert!((center[0] - c[0]).abs() < 1e-12 && (center[1] - c[1]).abs() < 1e-12);
            assert!((radius - r).abs() < 1e-12);
        }
        let p = [0.4, -2.5];
        let q = from_sphere(to_sphere(p));
        assert!((q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12);
        let line = SphereCircle::from_line([0.6, 0.8], 1.5).unwrap();
        assert!(line.residual([0.0, 0.0, 1.0]).abs() < 1e-15);
        let Placement::Line { normal, offset } = line.unproject() else { panic!("expected a line") };
        assert!((normal[0] - 0.6).abs() < 1e-12 && (offset - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ideal_cube() {
        let cube = generate::cube(2.0 * PI / 3.0).unwrap();
        let run = polyhedron_from_exterior_angles(&cube, &FlowConfig::default()).unwrap();
        assert_eq!(run.data.dihedral_angles.len(), 12);
        assert!(run.data.max_dihedral_error() < 1e-8);
        assert_eq!(run.data.ideal_vertices.iter().flatten().count(), 8);
        assert!(run.data.max_ideal_vertex_error(&run.pattern) < 1e-9);
    }

    #[test]
    fn rivin_condition_enforced() {
        let cube = generate::cube(FRAC_PI_2).unwrap();
        assert!(matches!(
            polyhedron_from_exterior_angles(&cube, &FlowConfig::default()),
            Err(Error::Precondition(_))
        ));
    }
}
