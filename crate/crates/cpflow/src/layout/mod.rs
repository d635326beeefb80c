//! Realizing a metric as circles.
//!
//! Every face `f` carries a star point `v_f` lying on all circles of its
//! vertices; the centers sit at distance `r` from `v_f`, and consecutive
//! centers subtend the angle `π - Θ` at `v_f`. Faces are laid out breadth
//! first, crossing an edge `[a, b]` by reflecting `v_f` in the line of centers.

pub mod sphere;
pub mod svg;

pub use sphere::{PolyhedronData, SphereCircle};

use crate::complex::{CellComplex, Infinity};
use crate::curvature::Metric;
use crate::error::{Error, Result};
use crate::geometry::hyperboloid::{self as hb, Vec3};
use crate::geometry::{self, Background};
use crate::tolerances;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Plane,
    Disk,
    Sphere,
}

/// Where one vertex ended up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Placement {
    Circle { center: Point, radius: f64 },
    /// Limit of a circle of infinite radius: the disk side is `⟨p, normal⟩ ≥ offset`.
    Line { normal: Point, offset: f64 },
    Unplaced,
}

impl Placement {
    pub fn circle(&self) -> Option<(Point, f64)> {
        match *self {
            Placement::Circle { center, radius } => Some((center, radius)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub ambient: Ambient,
    pub background: Background,
    /// Per vertex; disk layouts hold Euclidean circles of the Poincaré model.
    pub placements: Vec<Placement>,
    /// Per face; `None` for faces not reached or at infinity.
    pub star_points: Vec<Option<Point>>,
    /// Hyperboloid centers, hyperbolic layouts only.
    pub hyperbolic_centers: Option<Vec<Option<Vec3>>>,
    /// Largest disagreement when a face re-placed a vertex of the core region.
    pub interior_residual: f64,
    /// Same, for faces touching frozen vertices.
    pub rim_residual: f64,
    pub diameter: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedOptions {
    /// Face to seed from; defaults to the first core face.
    pub seed_face: Option<usize>,
    /// Direction from the seed star point to the first center of the seed face.
    pub seed_angle: f64,
    /// Vertices realized as lines through their star points (Euclidean only).
    pub ideal: Vec<usize>,
    /// Faces with all vertices in this set form the core; `None` means all vertices.
    pub core_vertices: Option<Vec<usize>>,
    /// Relative misclosure tolerance on the core, times the layout diameter.
    pub tolerance: f64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            seed_face: None,
            seed_angle: 0.0,
            ideal: Vec::new(),
            core_vertices: None,
            tolerance: tolerances::LAYOUT_RELATIVE,
        }
    }
}

fn rot(d: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c * d[0] - s * d[1], s * d[0] + c * d[1]]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: Point) -> Point {
    let n = norm(a);
    [a[0] / n, a[1] / n]
}

/// Reflection of `x` in the line through `p` with direction `d`.
fn reflect_line(x: Point, p: Point, d: Point) -> Point {
    let d = unit(d);
    let w = sub(x, p);
    let along = dot(w, d);
    [p[0] + 2.0 * along * d[0] - w[0], p[1] + 2.0 * along * d[1] - w[1]]
}

/// Working state shared by both backgrounds.
struct Frontier {
    placed_face: Vec<bool>,
    excluded: Vec<bool>,
    core: Vec<bool>,
}

impl Frontier {
    fn new(complex: &CellComplex, options: &EmbedOptions) -> Self {
        let mut excluded = vec![false; complex.face_count()];
        if let Some(Infinity::Face(f)) = complex.infinity() {
            excluded[*f] = true;
        }
        let in_core = match &options.core_vertices {
            None => vec![true; complex.vertex_count()],
            Some(vs) => {
                let mut mask = vec![false; complex.vertex_count()];
                for &v in vs {
                    mask[v] = true;
                }
                mask
            }
        };
        let core = complex
            .faces()
            .iter()
            .map(|f| f.vertices.iter().all(|&v| in_core[v]))
            .collect();
        Frontier { placed_face: vec![false; complex.face_count()], excluded, core }
    }

    fn seed(&self, options: &EmbedOptions) -> Result<usize> {
        match options.seed_face {
            Some(f) if f < self.core.len() && !self.excluded[f] => Ok(f),
            Some(f) => Err(Error::Lookup(format!("seed face {f} is missing or at infinity"))),
            None => (0..self.core.len())
                .find(|&f| self.core[f] && !self.excluded[f])
                .ok_or_else(|| Error::Precondition("no face to seed the layout".into())),
        }
    }

    /// Breadth-first face order: core faces reachable through core faces,
    /// then every other reachable face. Each entry is `(face, parent edge)`.
    fn order(&mut self, complex: &CellComplex, seed: usize) -> Vec<(usize, Option<(usize, usize)>)> {
        let mut order = vec![(seed, None)];
        self.placed_face[seed] = true;
        for core_only in [true, false] {
            let mut queue: VecDeque<usize> = order.iter().map(|&(f, _)| f).collect();
            while let Some(f) = queue.pop_front() {
                for &e in &complex.faces()[f].edges {
                    for g in complex.edge_faces(e) {
                        if g == f || self.placed_face[g] || self.excluded[g] || (core_only && !self.core[g]) {
                            continue;
                        }
                        self.placed_face[g] = true;
                        order.push((g, Some((f, e))));
                        queue.push_back(g);
                    }
                }
            }
        }
        order
    }
}

/// Lay out `metric` on `complex`.
pub fn embed(complex: &CellComplex, metric: &Metric, options: &EmbedOptions) -> Result<Layout> {
    if metric.len() != complex.vertex_count() {
        return Err(Error::Precondition("metric does not match the complex".into()));
    }
    match metric.background {
        Background::Euclidean => embed_euclidean(complex, metric, options),
        Background::Hyperbolic => {
            if !options.ideal.is_empty() {
                return Err(Error::Unsupported("ideal vertices in a hyperbolic layout".into()));
            }
            embed_hyperbolic(complex, metric, options)
        }
    }
}

#[derive(Clone, Copy)]
enum Shape {
    Circle(Point, f64),
    Line(Point, f64),
}

fn embed_euclidean(complex: &CellComplex, metric: &Metric, options: &EmbedOptions) -> Result<Layout> {
    let n = complex.vertex_count();
    let mut ideal = vec![false; n];
    for &v in &options.ideal {
        ideal[v] = true;
    }
    let radii = metric.radii();
    let mut frontier = Frontier::new(complex, options);
    let seed = frontier.seed(options)?;
    let order = frontier.order(complex, seed);
    let mut shapes: Vec<Option<Shape>> = vec![None; n];
    let mut stars: Vec<Option<Point>> = vec![None; complex.face_count()];
    let (mut interior, mut rim) = ((0.0f64, 0usize), 0.0f64);
    let edges = complex.edges();
    for (f, parent) in order {
        let face = &complex.faces()[f];
        // star point and one known direction
        let (star, start, dir) = match parent {
            None => ([0.0, 0.0], 0, rot([1.0, 0.0], options.seed_angle)),
            Some((g, e)) => {
                let prev = stars[g].expect("parent placed");
                let (a, b) = (edges[e].u, edges[e].v);
                let star = match (shapes[a], shapes[b]) {
                    (Some(Shape::Circle(ca, _)), Some(Shape::Circle(cb, _))) => reflect_line(prev, ca, sub(cb, ca)),
                    (Some(Shape::Circle(ca, _)), Some(Shape::Line(nb, _)))
                    | (Some(Shape::Line(nb, _)), Some(Shape::Circle(ca, _))) => reflect_line(prev, ca, nb),
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "crossing edge {e} between two ideal vertices"
                        )))
                    }
                };
                let k = face.vertices.iter().position(|&v| v == a).expect("edge on face");
                let dir = match shapes[a].expect("placed") {
                    Shape::Circle(ca, _) => unit(sub(ca, star)),
                    Shape::Line(na, _) => na,
                };
                (star, k, dir)
            }
        };
        stars[f] = Some(star);
        let m = face.len();
        let mut d = dir;
        for step in 0..m {
            let k = (start + step) % m;
            let v = face.vertices[k];
            let shape = if ideal[v] {
                Shape::Line(d, dot(star, d))
            } else {
                Shape::Circle([star[0] + radii[v] * d[0], star[1] + radii[v] * d[1]], radii[v])
            };
            match shapes[v] {
                None => shapes[v] = Some(shape),
                Some(old) => {
                    let gap = match (old, shape) {
                        (Shape::Circle(p, _), Shape::Circle(q, _)) => norm(sub(p, q)),
                        (Shape::Line(p, h), Shape::Line(q, g)) => norm(sub(p, q)) + (h - g).abs(),
                        _ => f64::INFINITY,
                    };
                    if frontier.core[f] {
                        if gap > interior.0 {
                            interior = (gap, v);
                        }
                    } else {
                        rim = rim.max(gap);
                    }
                }
            }
            let e = face.edges[k];
            d = rot(d, PI - edges[e].theta);
        }
    }
    let placements: Vec<Placement> = shapes
        .iter()
        .map(|s| match s {
            Some(Shape::Circle(c, r)) => Placement::Circle { center: *c, radius: *r },
            Some(Shape::Line(nrm, h)) => Placement::Line { normal: *nrm, offset: *h },
            None => Placement::Unplaced,
        })
        .collect();
    let diameter = planar_diameter(&placements);
    let tolerance = options.tolerance * diameter.max(f64::MIN_POSITIVE);
    if interior.0 > tolerance {
        return Err(Error::Misclosure { residual: interior.0, tolerance, vertex: interior.1 });
    }
    let mut layout = Layout {
        ambient: Ambient::Plane,
        background: Background::Euclidean,
        placements,
        star_points: stars,
        hyperbolic_centers: None,
        interior_residual: interior.0,
        rim_residual: rim,
        diameter,
        warnings: Vec::new(),
    };
    layout.check_overlaps(complex);
    Ok(layout)
}

fn embed_hyperbolic(complex: &CellComplex, metric: &Metric, options: &EmbedOptions) -> Result<Layout> {
    let n = complex.vertex_count();
    let radii = metric.radii();
    let mut frontier = Frontier::new(complex, options);
    let seed = frontier.seed(options)?;
    let order = frontier.order(complex, seed);
    let mut centers: Vec<Option<Vec3>> = vec![None; n];
    let mut stars: Vec<Option<Vec3>> = vec![None; complex.face_count()];
    let (mut interior, mut rim) = ((0.0f64, 0usize), 0.0f64);
    let edges = complex.edges();
    for (f, parent) in order {
        let face = &complex.faces()[f];
        let (star, start, dir) = match parent {
            None => {
                let (s, c) = options.seed_angle.sin_cos();
                (hb::ORIGIN, 0, [0.0, c, s])
            }
            Some((g, e)) => {
                let prev = stars[g].expect("parent placed");
                let (a, b) = (edges[e].u, edges[e].v);
                let (ca, cb) = (centers[a].expect("placed"), centers[b].expect("placed"));
                let star = hb::reflect(prev, ca, cb);
                let k = face.vertices.iter().position(|&v| v == a).expect("edge on face");
                (star, k, hb::direction(star, ca))
            }
        };
        stars[f] = Some(star);
        let m = face.len();
        let mut d = dir;
        for step in 0..m {
            let k = (start + step) % m;
            let v = face.vertices[k];
            let c = hb::exp(star, d, radii[v]);
            match centers[v] {
                None => centers[v] = Some(c),
                Some(old) => {
                    let gap = hb::distance(old, c);
                    if frontier.core[f] {
                        if gap > interior.0 {
                            interior = (gap, v);
                        }
                    } else {
                        rim = rim.max(gap);
                    }
                }
            }
            d = hb::rotate(star, d, PI - edges[face.edges[k]].theta);
        }
    }
    let placements: Vec<Placement> = centers
        .iter()
        .zip(&radii)
        .map(|(c, &r)| match c {
            Some(c) => {
                let (center, radius) = hb::circle_to_poincare(*c, r);
                Placement::Circle { center, radius }
            }
            None => Placement::Unplaced,
        })
        .collect();
    let diameter = centers
        .iter()
        .zip(&radii)
        .filter_map(|(c, &r)| c.map(|c| hb::distance(hb::ORIGIN, c) + r))
        .fold(0.0, f64::max)
        * 2.0;
    let tolerance = options.tolerance * diameter.max(f64::MIN_POSITIVE);
    if interior.0 > tolerance {
        return Err(Error::Misclosure { residual: interior.0, tolerance, vertex: interior.1 });
    }
    let mut layout = Layout {
        ambient: Ambient::Disk,
        background: Background::Hyperbolic,
        placements,
        star_points: stars.iter().map(|s| s.map(hb::to_poincare)).collect(),
        hyperbolic_centers: Some(centers),
        interior_residual: interior.0,
        rim_residual: rim,
        diameter,
        warnings: Vec::new(),
    };
    layout.check_overlaps(complex);
    Ok(layout)
}

fn planar_diameter(placements: &[Placement]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in placements {
        if let Placement::Circle { center, radius } = p {
            for k in 0..2 {
                lo[k] = lo[k].min(center[k] - radius);
                hi[k] = hi[k].max(center[k] + radius);
            }
        }
    }
    if lo[0] > hi[0] {
        return 0.0;
    }
    norm(sub(hi, lo))
}

/// Largest vertex count for the quadratic overlap scan.
const OVERLAP_SCAN_LIMIT: usize = 6000;

impl Layout {
    /// Warn about non-adjacent disks overlapping by more than a touch.
    fn check_overlaps(&mut self, complex: &CellComplex) {
        let circles: Vec<(usize, Point, f64)> = self
            .placements
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.circle().map(|(c, r)| (v, c, r)))
            .collect();
        if circles.len() > OVERLAP_SCAN_LIMIT {
            self.warnings.push(format!("overlap scan skipped for {} circles", circles.len()));
            return;
        }
        let slack = tolerances::LAYOUT_RELATIVE * self.diameter.max(1e-300);
        let mut count = 0usize;
        let mut first = None;
        for (i, &(a, ca, ra)) in circles.iter().enumerate() {
            for &(b, cb, rb) in &circles[i + 1..] {
                if norm(sub(ca, cb)) < ra + rb - slack && complex.edge_between(a, b).is_none() {
                    count += 1;
                    first.get_or_insert((a, b));
                }
            }
        }
        if let Some((a, b)) = first {
            self.warnings.push(format!(
                "{count} pairs of non-adjacent circles overlap, first between vertices {} and {}",
                complex.labels()[a],
                complex.labels()[b]
            ));
        }
    }

    /// Planar centers of the placed circles, indexed by vertex.
    pub fn centers(&self) -> Vec<Option<Point>> {
        self.placements.iter().map(|p| p.circle().map(|(c, _)| c)).collect()
    }

    /// Exterior intersection angle realized by the circles of `a` and `b`.
    pub fn realized_angle(&self, a: usize, b: usize) -> Option<f64> {
        if let Some(h) = &self.hyperbolic_centers {
            let (ca, cb) = (h[a]?, h[b]?);
            let (ra, rb) = (self.hyperbolic_radius(a)?, self.hyperbolic_radius(b)?);
            let cos = (hb::distance(ca, cb).cosh() - ra.cosh() * rb.cosh()) / (ra.sinh() * rb.sinh());
            return Some(cos.clamp(-1.0, 1.0).acos());
        }
        let cos = match (self.placements[a], self.placements[b]) {
            (Placement::Circle { center: ca, radius: ra }, Placement::Circle { center: cb, radius: rb }) => {
                let d2 = dot(sub(ca, cb), sub(ca, cb));
                (d2 - ra * ra - rb * rb) / (2.0 * ra * rb)
            }
            (Placement::Circle { center, radius }, Placement::Line { normal, offset })
            | (Placement::Line { normal, offset }, Placement::Circle { center, radius }) => {
                -(dot(center, normal) - offset) / radius
            }
            (Placement::Line { normal: na, .. }, Placement::Line { normal: nb, .. }) => -dot(na, nb),
            _ => return None,
        };
        Some(cos.clamp(-1.0, 1.0).acos())
    }

    fn hyperbolic_radius(&self, v: usize) -> Option<f64> {
        // recover the hyperbolic radius from the Euclidean disk circle
        let (c, r) = self.placements[v].circle()?;
        let rho = norm(c);
        let (near, far) = (rho - r, rho + r);
        let artanh = |x: f64| 0.5 * ((1.0 + x) / (1.0 - x)).ln();
        Some(artanh(far) - artanh(near))
    }

    /// `|realized - Θ|` per edge with both endpoints placed, as `(edge, error)`.
    pub fn angle_errors(&self, complex: &CellComplex) -> Vec<(usize, f64)> {
        complex
            .edges()
            .iter()
            .enumerate()
            .filter_map(|(k, e)| self.realized_angle(e.u, e.v).map(|a| (k, (a - e.theta).abs())))
            .collect()
    }

    /// Realized cone angle at the center of `v`: the sum over faces around `v`
    /// of the triangle angles at `c_v` toward the two face neighbors of `v`.
    pub fn cone_angle(&self, complex: &CellComplex, v: usize) -> Option<f64> {
        let star = complex.vertex_star(v)?;
        let mut total = 0.0;
        for f in star {
            let face = &complex.faces()[f];
            let m = face.len();
            let k = face.vertices.iter().position(|&w| w == v)?;
            let sp = self.star_point_model(f)?;
            for w in [face.vertices[(k + 1) % m], face.vertices[(k + m - 1) % m]] {
                total += self.angle_at_center(v, w, sp)?;
            }
        }
        Some(total)
    }

    fn star_point_model(&self, f: usize) -> Option<StarPoint> {
        let p = self.star_points[f]?;
        Some(match self.background {
            Background::Euclidean => StarPoint::Plane(p),
            Background::Hyperbolic => StarPoint::Hyperboloid(hb::from_poincare(p)),
        })
    }

    /// Angle at the center of `v` between the center of `w` and the star point.
    fn angle_at_center(&self, v: usize, w: usize, star: StarPoint) -> Option<f64> {
        match star {
            StarPoint::Plane(p) => {
                let (cv, _) = self.placements[v].circle()?;
                let (cw, _) = self.placements[w].circle()?;
                let (a, b) = (sub(cw, cv), sub(p, cv));
                Some((a[0] * b[1] - a[1] * b[0]).abs().atan2(dot(a, b)))
            }
            StarPoint::Hyperboloid(p) => {
                let h = self.hyperbolic_centers.as_ref()?;
                let (cv, cw) = (h[v]?, h[w]?);
                let (a, b) = (hb::direction(cv, cw), hb::direction(cv, p));
                Some(hb::dot(a, b).clamp(-1.0, 1.0).acos())
            }
        }
    }

    /// Sum of the angles at the star point of `f`; `2π` for an ideal face.
    pub fn star_angle_sum(&self, complex: &CellComplex, f: usize) -> Option<f64> {
        let face = &complex.faces()[f];
        let sp = self.star_point_model(f)?;
        let m = face.len();
        let mut total = 0.0;
        for k in 0..m {
            let (a, b) = (face.vertices[k], face.vertices[(k + 1) % m]);
            total += match sp {
                StarPoint::Plane(p) => {
                    let da = self.direction_from(p, a)?;
                    let db = self.direction_from(p, b)?;
                    (da[0] * db[1] - da[1] * db[0]).abs().atan2(dot(da, db))
                }
                StarPoint::Hyperboloid(p) => {
                    let h = self.hyperbolic_centers.as_ref()?;
                    let (da, db) = (hb::direction(p, h[a]?), hb::direction(p, h[b]?));
                    hb::dot(da, db).clamp(-1.0, 1.0).acos()
                }
            };
        }
        Some(total)
    }

    fn direction_from(&self, p: Point, v: usize) -> Option<Point> {
        match self.placements[v] {
            Placement::Circle { center, .. } => Some(unit(sub(center, p))),
            Placement::Line { normal, .. } => Some(normal),
            Placement::Unplaced => None,
        }
    }

    /// Edge length realized by the layout, in the layout's background.
    pub fn realized_length(&self, a: usize, b: usize) -> Option<f64> {
        match &self.hyperbolic_centers {
            Some(h) => Some(hb::distance(h[a]?, h[b]?)),
            None => {
                let (ca, _) = self.placements[a].circle()?;
                let (cb, _) = self.placements[b].circle()?;
                Some(norm(sub(ca, cb)))
            }
        }
    }

    /// `max |realized length - edge_length|` over edges with both ends placed.
    pub fn length_error(&self, complex: &CellComplex, metric: &Metric) -> f64 {
        let radii = metric.radii();
        complex
            .edges()
            .iter()
            .filter_map(|e| {
                let l = self.realized_length(e.u, e.v)?;
                let want = geometry::edge_length(metric.background, radii[e.u], radii[e.v], e.theta).ok()?;
                Some((l - want).abs())
            })
            .fold(0.0, f64::max)
    }

    /// JSON dump `{"circles":[{"v","cx","cy","r"}], "lines":[…], "ambient"}`.
    pub fn to_json(&self, complex: &CellComplex) -> serde_json::Value {
        let labels = complex.labels();
        let mut circles = Vec::new();
        let mut lines = Vec::new();
        for (v, p) in self.placements.iter().enumerate() {
            match *p {
                Placement::Circle { center, radius } => circles.push(serde_json::json!({
                    "v": labels[v], "cx": center[0], "cy": center[1], "r": radius
                })),
                Placement::Line { normal, offset } => lines.push(serde_json::json!({
                    "v": labels[v], "nx": normal[0], "ny": normal[1], "h": offset
                })),
                Placement::Unplaced => {}
            }
        }
        serde_json::json!({ "circles": circles, "lines": lines, "ambient": self.ambient })
    }
}

#[derive(Clone, Copy)]
enum StarPoint {
    Plane(Point),
    Hyperboloid(Vec3),
}

/// Rigid motion `x ↦ R x + shift`, `R` a rotation optionally preceded by
/// the reflection `(x, y) ↦ (x, -y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alignment {
    pub angle: f64,
    pub reflected: bool,
    pub shift: Point,
    pub rms: f64,
}

impl Alignment {
    pub fn apply(&self, p: Point) -> Point {
        let p = if self.reflected { [p[0], -p[1]] } else { p };
        let r = rot(p, self.angle);
        [r[0] + self.shift[0], r[1] + self.shift[1]]
    }
}

/// Least-squares rigid motion taking `from` onto `to` (2D Procrustes without
/// scaling); improper motions only when `allow_reflection`.
pub fn rigid_alignment(from: &[Point], to: &[Point], allow_reflection: bool) -> Result<Alignment> {
    if from.len() != to.len() || from.is_empty() {
        return Err(Error::Precondition("alignment needs matched, non-empty point sets".into()));
    }
    let n = from.len() as f64;
    let fit = |reflected: bool| {
        let src: Vec<Point> = from.iter().map(|p| if reflected { [p[0], -p[1]] } else { *p }).collect();
        let mean = |ps: &[Point]| {
            let s = ps.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
            [s[0] / n, s[1] / n]
        };
        let (ms, mt) = (mean(&src), mean(to));
        let (mut cross, mut dotsum) = (0.0, 0.0);
        for (a, b) in src.iter().zip(to) {
            let (p, q) = (sub(*a, ms), sub(*b, mt));
            dotsum += dot(p, q);
            cross += p[0] * q[1] - p[1] * q[0];
        }
        let angle = cross.atan2(dotsum);
        let shift = sub(mt, rot(ms, angle));
        let mut al = Alignment { angle, reflected, shift, rms: 0.0 };
        let sq: f64 = from.iter().zip(to).map(|(a, b)| {
            let d = sub(al.apply(*a), *b);
            dot(d, d)
        }).sum();
        al.rms = (sq / n).sqrt();
        al
    };
    let proper = fit(false);
    if !allow_reflection {
        return Ok(proper);
    }
    let improper = fit(true);
    Ok(if improper.rms < proper.rms { improper } else { proper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn triangle_seed_distances() {
        let c = CellComplex::from_cycles(vec![0, 1, 2], &[vec![0, 1, 2]], |_, _| FRAC_PI_3).unwrap();
        let m = Metric::from_radii(Background::Euclidean, &[1.0, 2.0, 0.5]).unwrap();
        let layout = embed(&c, &m, &EmbedOptions::default()).unwrap();
        assert!(layout.length_error(&c, &m) < 1e-14);
        for (_, err) in layout.angle_errors(&c) {
            assert!(err < 1e-12);
        }
        assert!((layout.star_angle_sum(&c, 0).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn unit_lattice_is_a_grid() {
        let p = generate::z2_lattice(4, FRAC_PI_2).unwrap();
        let m = Metric::constant_radius(Background::Euclidean, p.complex.vertex_count(), 1.0).unwrap();
        let layout = embed(&p.complex, &m, &EmbedOptions::default()).unwrap();
        let coords = p.coords.as_ref().unwrap();
        let grid: Vec<Point> = coords.iter().map(|c| [c[0] as f64 * 2f64.sqrt(), c[1] as f64 * 2f64.sqrt()]).collect();
        // the tips of the ball bound no face and stay unplaced
        let mut on_face = vec![false; p.complex.vertex_count()];
        for f in p.complex.faces() {
            f.vertices.iter().for_each(|&v| on_face[v] = true);
        }
        let centers = layout.centers();
        let (mut placed, mut target) = (Vec::new(), Vec::new());
        for v in 0..centers.len() {
            assert_eq!(centers[v].is_some(), on_face[v], "vertex {v}");
            if let Some(c) = centers[v] {
                placed.push(c);
                target.push(grid[v]);
            }
        }
        let al = rigid_alignment(&placed, &target, true).unwrap();
        assert!(al.rms < 1e-12, "rms {}", al.rms);
        for v in p.complex.interior_vertices() {
            assert!((layout.cone_angle(&p.complex, v).unwrap() - 2.0 * PI).abs() < 1e-12);
        }
        assert!(layout.warnings.is_empty(), "{:?}", layout.warnings);
    }

    #[test]
    fn non_flat_metric_misclosure() {
        let p = generate::z2_lattice(3, FRAC_PI_2).unwrap();
        let mut m = Metric::constant_radius(Background::Euclidean, p.complex.vertex_count(), 1.0).unwrap();
        m.u[p.root] = 0.3;
        assert!(matches!(embed(&p.complex, &m, &EmbedOptions::default()), Err(Error::Misclosure { .. })));
    }

    #[test]
    fn alignment_recovers_motion() {
        let a: Vec<Point> = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]];
        let b: Vec<Point> = a.iter().map(|&p| {
            let r = rot(p, 0.7);
            [r[0] + 5.0, r[1] - 1.0]
        }).collect();
        let al = rigid_alignment(&a, &b, false).unwrap();
        assert!((al.angle - 0.7).abs() < 1e-12 && al.rms < 1e-12);
        assert!((al.shift[0] - 5.0).abs() < 1e-12 && (al.shift[1] + 1.0).abs() < 1e-12);
        let mirrored: Vec<Point> = b.iter().map(|p| [p[0], -p[1]]).collect();
        assert!(rigid_alignment(&a, &mirrored, false).unwrap().rms > 0.1);
        assert!(rigid_alignment(&a, &mirrored, true).unwrap().rms < 1e-12);
    }
}
