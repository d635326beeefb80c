//! Discrete Gaussian curvature and its derivatives.
//!
//! Every edge `v ~ j` contributes the half-angle `θ_vj` twice to the cone
//! angle at `v`, once from each side of the edge, so
//! `K_v = 2π - 2 Σ_{j~v} θ_vj`.

use crate::complex::{CellComplex, Infinity};
use crate::error::{Error, Result};
use crate::geometry::{self, Background};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this many vertices the per-vertex maps stay sequential.
const PAR_MIN_LEN: usize = 512;

/// Per-vertex log radii in a background geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub background: Background,
    pub u: Vec<f64>,
}

impl Metric {
    pub fn new(background: Background, u: Vec<f64>) -> Result<Self> {
        if let Some((v, &x)) = u.iter().enumerate().find(|(_, &x)| !background.admits_u(x)) {
            return Err(Error::Domain(format!(
                "u[{v}] = {x} outside the {} coordinate domain",
                background.name()
            )));
        }
        Ok(Metric { background, u })
    }

    pub fn from_radii(background: Background, radii: &[f64]) -> Result<Self> {
        if let Some((v, &r)) = radii.iter().enumerate().find(|(_, &r)| !(r > 0.0 && r.is_finite())) {
            return Err(Error::Domain(format!("radius[{v}] = {r} is not positive")));
        }
        Metric::new(background, radii.iter().map(|&r| background.u_from_radius(r)).collect())
    }

    pub fn constant_radius(background: Background, n: usize, r: f64) -> Result<Self> {
        Metric::from_radii(background, &vec![r; n])
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.background.radius_from_u(self.u[v])
    }

    pub fn radii(&self) -> Vec<f64> {
        radii_of(self.background, &self.u)
    }
}

pub(crate) fn radii_of(bg: Background, u: &[f64]) -> Vec<f64> {
    u.par_iter().with_min_len(PAR_MIN_LEN).map(|&x| bg.radius_from_u(x)).collect()
}

fn check_metric(complex: &CellComplex, metric: &Metric) -> Result<()> {
    if metric.len() != complex.vertex_count() {
        return Err(Error::Precondition(format!(
            "metric has {} values for {} vertices",
            metric.len(),
            complex.vertex_count()
        )));
    }
    Ok(())
}

/// `K_v` from precomputed radii; no validation.
pub(crate) fn curvature_at(complex: &CellComplex, bg: Background, radii: &[f64], v: usize) -> f64 {
    let edges = complex.edges();
    let sum: f64 = complex
        .neighbors(v)
        .iter()
        .map(|&(w, e)| geometry::half_angle_unchecked(bg, radii[v], radii[w], edges[e].theta))
        .sum();
    2.0 * PI - 2.0 * sum
}

/// Curvature at one vertex.
pub fn vertex_curvature(complex: &CellComplex, metric: &Metric, v: usize) -> Result<f64> {
    check_metric(complex, metric)?;
    if v >= complex.vertex_count() {
        return Err(Error::Lookup(format!("no vertex {v}")));
    }
    let bg = metric.background;
    let mut radii = Vec::with_capacity(complex.degree(v) + 1);
    radii.push(metric.radius(v));
    for &(w, _) in complex.neighbors(v) {
        radii.push(metric.radius(w));
    }
    let edges = complex.edges();
    let sum: f64 = complex
        .neighbors(v)
        .iter()
        .zip(&radii[1..])
        .map(|(&(_, e), &r_w)| geometry::half_angle_unchecked(bg, radii[0], r_w, edges[e].theta))
        .sum();
    Ok(2.0 * PI - 2.0 * sum)
}

/// Curvature at every vertex, computed in parallel.
pub fn curvatures(complex: &CellComplex, metric: &Metric) -> Result<Vec<f64>> {
    check_metric(complex, metric)?;
    let radii = metric.radii();
    Ok((0..complex.vertex_count())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|v| curvature_at(complex, metric.background, &radii, v))
        .collect())
}

/// Target field: `Σ 2Θ` over edges to `V_∞` for vertices adjacent to `V_∞`,
/// zero elsewhere (including on `V_∞` itself).
pub fn prescribed_curvature_hat(complex: &CellComplex) -> Result<Vec<f64>> {
    if complex.infinity().is_none() {
        return Err(Error::Config("prescribed curvature needs infinity marks".into()));
    }
    let mut at_infinity = vec![false; complex.vertex_count()];
    for v in complex.infinity_vertices() {
        at_infinity[v] = true;
    }
    let edges = complex.edges();
    Ok((0..complex.vertex_count())
        .map(|v| {
            if at_infinity[v] {
                return 0.0;
            }
            complex
                .neighbors(v)
                .iter()
                .filter(|&&(w, _)| at_infinity[w])
                .map(|&(_, e)| 2.0 * edges[e].theta)
                .sum()
        })
        .collect())
}

/// Faces at infinity: the marked face, or every face touching a marked vertex.
pub fn infinity_faces(complex: &CellComplex) -> Vec<bool> {
    let mut marked = vec![false; complex.face_count()];
    match complex.infinity() {
        None => {}
        Some(Infinity::Face(f)) => marked[*f] = true,
        Some(Infinity::Vertices(vs)) => {
            for (fi, face) in complex.faces().iter().enumerate() {
                if face.vertices.iter().any(|v| vs.contains(v)) {
                    marked[fi] = true;
                }
            }
        }
    }
    marked
}

/// Face-based curvature `Σ_{f'~f} α arcsin(r' sinΘ / √(r² + r'² - 2 cosΘ r r'))`.
///
/// `face_radii` is indexed by face; entries for faces at infinity are ignored.
/// `α = 1` when both faces border the faces at infinity, `2` otherwise.
pub fn dual_face_curvature(complex: &CellComplex, face_radii: &[f64], f: usize) -> Result<f64> {
    if face_radii.len() != complex.face_count() {
        return Err(Error::Precondition(format!(
            "{} face radii for {} faces",
            face_radii.len(),
            complex.face_count()
        )));
    }
    if f >= complex.face_count() {
        return Err(Error::Lookup(format!("no face {f}")));
    }
    let at_infinity = infinity_faces(complex);
    if at_infinity[f] {
        return Err(Error::Precondition(format!("face {f} lies at infinity")));
    }
    let neighbors_of = |g: usize| -> Vec<(usize, usize)> {
        complex.faces()[g]
            .edges
            .iter()
            .filter_map(|&e| {
                complex.edge_faces(e).into_iter().find(|&h| h != g).map(|h| (h, e))
            })
            .collect()
    };
    let on_rim = |g: usize| neighbors_of(g).iter().any(|&(h, _)| at_infinity[h]);
    let r_f = face_radii[f];
    let f_rim = on_rim(f);
    let mut total = 0.0;
    for (g, e) in neighbors_of(f) {
        if at_infinity[g] {
            continue;
        }
        let r_g = face_radii[g];
        if !(r_f > 0.0 && r_g > 0.0) {
            return Err(Error::Domain(format!("non-positive face radius near face {f}")));
        }
        let theta = complex.edges()[e].theta;
        let chord = (r_f * r_f + r_g * r_g - 2.0 * theta.cos() * r_f * r_g).sqrt();
        let alpha = if f_rim && on_rim(g) { 1.0 } else { 2.0 };
        total += alpha * (r_g * theta.sin() / chord).clamp(-1.0, 1.0).asin();
    }
    Ok(total)
}

/// Pointwise linearization of the curvature map.
///
/// `omega[e] = -∂K_i/∂u_j` for edge `e = [i, j]` and
/// `g[i] = -(∂K_i/∂u_i + Σ_j ∂K_i/∂u_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianWeights {
    pub omega: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn flow_jacobian_weights(complex: &CellComplex, metric: &Metric) -> Result<JacobianWeights> {
    check_metric(complex, metric)?;
    let bg = metric.background;
    let radii = metric.radii();
    let omega: Vec<f64> = complex
        .edges()
        .iter()
        .map(|e| 2.0 * geometry::d_theta_d_u_unchecked(bg, radii[e.u], radii[e.v], e.theta).1)
        .collect();
    let g = (0..complex.vertex_count())
        .map(|v| {
            complex
                .neighbors(v)
                .iter()
                .map(|&(w, e)| {
                    let (own, cross) =
                        geometry::d_theta_d_u_unchecked(bg, radii[v], radii[w], complex.edges()[e].theta);
                    2.0 * (own + cross)
                })
                .sum()
        })
        .collect();
    Ok(JacobianWeights { omega, g })
}

/// Row `v` of the curvature Jacobian as `(w, ∂K_v/∂u_w)`, diagonal first.
pub fn curvature_gradient(complex: &CellComplex, metric: &Metric, v: usize) -> Result<Vec<(usize, f64)>> {
    check_metric(complex, metric)?;
    if v >= complex.vertex_count() {
        return Err(Error::Lookup(format!("no vertex {v}")));
    }
    let bg = metric.background;
    let r_v = metric.radius(v);
    let mut row = vec![(v, 0.0)];
    for &(w, e) in complex.neighbors(v) {
        let (own, cross) = geometry::d_theta_d_u_unchecked(bg, r_v, metric.radius(w), complex.edges()[e].theta);
        row[0].1 -= 2.0 * own;
        row.push((w, -2.0 * cross));
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn lattice() -> generate::Patch {
        generate::z2_lattice(4, FRAC_PI_2).unwrap()
    }

    #[test]
    fn flat_lattice_has_zero_curvature() {
        let p = lattice();
        let m = Metric::constant_radius(Background::Euclidean, p.complex.vertex_count(), 1.0).unwrap();
        let k = curvatures(&p.complex, &m).unwrap();
        for v in p.complex.interior_vertices() {
            assert!(k[v].abs() < 1e-14);
        }
    }

    #[test]
    fn single_bumped_vertex() {
        let p = lattice();
        let mut m = Metric::constant_radius(Background::Euclidean, p.complex.vertex_count(), 1.0).unwrap();
        m.u[p.root] = 2f64.ln();
        let k = vertex_curvature(&p.complex, &m, p.root).unwrap();
        assert!((k - (2.0 * PI - 8.0 * 0.5f64.atan())).abs() < 1e-14);
        assert!((k - 2.5740).abs() < 1e-4);
    }

    #[test]
    fn huge_hyperbolic_radii_approach_upper_bound() {
        let c = generate::octahedron(FRAC_PI_3).unwrap();
        let m = Metric::constant_radius(Background::Hyperbolic, 6, 35.0).unwrap();
        let k = vertex_curvature(&c, &m, 0).unwrap();
        assert!(k < 2.0 * PI && 2.0 * PI - k < 1e-6);
    }

    #[test]
    fn targets_from_infinity_marks() {
        let mut oct = generate::octahedron(FRAC_PI_3).unwrap();
        assert!(prescribed_curvature_hat(&oct).is_err());
        oct.set_infinity(Some(Infinity::Vertices(vec![0]))).unwrap();
        let hat = prescribed_curvature_hat(&oct).unwrap();
        // vertex 1 (-x) is the antipode of 0; the ±y, ±z vertices each touch it once
        assert_eq!(hat[0], 0.0);
        assert_eq!(hat[1], 0.0);
        for v in 2..6 {
            assert!((hat[v] - 2.0 * FRAC_PI_3).abs() < 1e-15);
        }
        let mut cube = generate::cube(FRAC_PI_2).unwrap();
        cube.set_infinity(Some(Infinity::Vertices(vec![1, 2]))).unwrap();
        let hat = prescribed_curvature_hat(&cube).unwrap();
        assert!((hat[0] - 2.0 * PI).abs() < 1e-15);
        assert!((hat[3] - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn dual_face_curvature_on_square_faces() {
        let t = generate::square_torus(4, FRAC_PI_2).unwrap();
        let r = vec![1.0; t.face_count()];
        let k = dual_face_curvature(&t, &r, 5).unwrap();
        assert!((k - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn dual_face_alpha_on_rim() {
        let mut cube = generate::cube(FRAC_PI_2).unwrap();
        cube.set_infinity(Some(Infinity::Face(0))).unwrap();
        let r = vec![1.0; 6];
        // face 0 (x=0) is at infinity; face 1 (x=1) is interior, the other four are rim faces
        let interior = dual_face_curvature(&cube, &r, 1).unwrap();
        assert!((interior - 4.0 * 2.0 * FRAC_PI_2 / 2.0).abs() < 1e-14);
        let rim = dual_face_curvature(&cube, &r, 2).unwrap();
        // neighbors of y=0: x=1 (α=2), z=0 and z=1 (α=1 each)
        assert!((rim - (2.0 + 1.0 + 1.0) * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn lattice_weights_are_one() {
        let p = lattice();
        let m = Metric::constant_radius(Background::Euclidean, p.complex.vertex_count(), 1.0).unwrap();
        let w = flow_jacobian_weights(&p.complex, &m).unwrap();
        assert!(w.omega.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!(w.g.iter().all(|&x| x.abs() < 1e-14));
    }

    #[test]
    fn metric_rejects_positive_hyperbolic_u() {
        assert!(Metric::new(Background::Hyperbolic, vec![-1.0, 0.0]).is_err());
        assert!(Metric::from_radii(Background::Euclidean, &[1.0, -1.0]).is_err());
    }
}
