//! Named fixture generators.
//!
//! Infinite lattices are materialized as finite graph balls around a root.

use super::{tiling, CellComplex};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

/// A materialized finite patch of a (possibly infinite) pattern.
#[derive(Clone, Debug)]
pub struct Patch {
    pub complex: CellComplex,
    pub root: usize,
    /// Integer lattice coordinates, for square-lattice patches.
    pub coords: Option<Vec<[i64; 2]>>,
}

/// Square lattice ball `|m| + |n| ≤ radius` with all unit squares inside it.
pub fn z2_lattice(radius: usize, theta: f64) -> Result<Patch> {
    let r = radius as i64;
    if r < 1 {
        return Err(Error::Config("z2_lattice needs radius ≥ 1".into()));
    }
    let mut coords = Vec::new();
    let mut index = HashMap::new();
    for m in -r..=r {
        let span = r - m.abs();
        for n in -span..=span {
            index.insert((m, n), coords.len());
            coords.push([m, n]);
        }
    }
    let mut cycles = Vec::new();
    let mut edges = Vec::new();
    for &[m, n] in &coords {
        let corners = [(m, n), (m + 1, n), (m + 1, n + 1), (m, n + 1)];
        if let Some(cycle) = corners.iter().map(|c| index.get(c).copied()).collect::<Option<Vec<_>>>() {
            cycles.push(cycle);
        }
        for d in [(1, 0), (0, 1)] {
            if let Some(&j) = index.get(&(m + d.0, n + d.1)) {
                edges.push((index[&(m, n)], j));
            }
        }
    }
    // the tips of the ball lie on no full square and hang by a single edge
    let labels = (0..coords.len() as u64).collect();
    let complex = CellComplex::from_cycles_and_edges(labels, &cycles, &edges, |_, _| theta)?;
    Ok(Patch { complex, root: index[&(0, 0)], coords: Some(coords) })
}

/// `n × n` square grid on a torus; a closed self-dual fixture.
pub fn square_torus(n: usize, theta: f64) -> Result<CellComplex> {
    if n < 3 {
        return Err(Error::Config("square_torus needs n ≥ 3".into()));
    }
    let id = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut cycles = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cycles.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    CellComplex::from_cycles((0..(n * n) as u64).collect(), &cycles, |_, _| theta)
}

/// Regular `{p, q}` hyperbolic tiling: `p`-gons, `q` around each vertex,
/// materialized as `layers` face layers around a vertex (see the tiling module).
pub fn pq_tiling(p: usize, q: usize, layers: usize, theta: f64) -> Result<Patch> {
    let (complex, root) = tiling::hyperbolic_patch(p, q, layers, theta)?;
    Ok(Patch { complex, root, coords: None })
}

/// Hexagonal faces, six around each vertex (`{6,6}`); with `Θ = 2π/3` each
/// face satisfies the ideal-face condition and the normalized character is `π/3`.
pub fn hex_lattice(layers: usize, theta: f64) -> Result<Patch> {
    pq_tiling(6, 6, layers, theta)
}

pub fn cube(theta: f64) -> Result<CellComplex> {
    let cycles = vec![
        vec![0, 4, 6, 2],
        vec![1, 3, 7, 5],
        vec![0, 1, 5, 4],
        vec![2, 6, 7, 3],
        vec![0, 2, 3, 1],
        vec![4, 5, 7, 6],
    ];
    CellComplex::from_cycles((0..8).collect(), &cycles, |_, _| theta)
}

/// Vertices `±x, ±y, ±z` as `0..6`; face 0 is `(+x, +y, +z)`.
pub fn octahedron(theta: f64) -> Result<CellComplex> {
    let mut cycles = Vec::new();
    for s in 0..8usize {
        cycles.push(vec![s & 1, 2 + ((s >> 1) & 1), 4 + ((s >> 2) & 1)]);
    }
    CellComplex::from_cycles((0..6).collect(), &cycles, |_, _| theta)
}

pub fn icosahedron(theta: f64) -> Result<CellComplex> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    let near = |i: usize, j: usize| {
        let d: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum();
        (d - 4.0).abs() < 1e-9
    };
    let mut cycles = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if near(i, j) && near(j, k) && near(i, k) {
                    cycles.push(vec![i, j, k]);
                }
            }
        }
    }
    CellComplex::from_cycles((0..12).collect(), &cycles, |_, _| theta)
}

pub fn dodecahedron(theta: f64) -> Result<CellComplex> {
    icosahedron(FRAC_PI_3)?.dual()?.with_uniform_theta(theta)
}

/// Generator parameters; unset fields take per-generator defaults.
#[derive(Clone, Debug, Default)]
pub struct GeneratorParams {
    /// Hop radius for `z2_lattice`; number of face layers for the tilings.
    pub radius: Option<usize>,
    pub theta: Option<f64>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub n: Option<usize>,
}

/// Weight under which every face of the named fixture is ideal.
pub fn default_theta(name: &str) -> Option<f64> {
    Some(match name {
        "z2_lattice" | "cube" | "square_torus" => FRAC_PI_2,
        "hex_lattice" => 2.0 * FRAC_PI_3,
        "octahedron" | "icosahedron" => FRAC_PI_3,
        "dodecahedron" => 3.0 * PI / 5.0,
        _ => return None,
    })
}

pub const GENERATORS: &[&str] = &[
    "z2_lattice",
    "hex_lattice",
    "pq_tiling",
    "square_torus",
    "cube",
    "octahedron",
    "dodecahedron",
    "icosahedron",
];

/// Dispatch by name.
pub fn by_name(name: &str, params: &GeneratorParams) -> Result<Patch> {
    let theta = match params.theta.or_else(|| default_theta(name)) {
        Some(t) => t,
        None if name == "pq_tiling" => {
            // face angle sums of exactly 2π
            PI - 2.0 * PI / params.p.unwrap_or(6) as f64
        }
        None => return Err(Error::Lookup(format!("unknown generator '{name}'"))),
    };
    // hop radius for the square lattice, face layers for the tilings
    let radius = params.radius.unwrap_or(if name == "z2_lattice" { 4 } else { 2 });
    let closed = |c: CellComplex| Patch { complex: c, root: 0, coords: None };
    match name {
        "z2_lattice" => z2_lattice(radius, theta),
        "hex_lattice" => hex_lattice(radius, theta),
        "pq_tiling" => pq_tiling(params.p.unwrap_or(6), params.q.unwrap_or(6), radius, theta),
        "square_torus" => square_torus(params.n.unwrap_or(4), theta).map(closed),
        "cube" => cube(theta).map(closed),
        "octahedron" => octahedron(theta).map(closed),
        "dodecahedron" => dodecahedron(theta).map(closed),
        "icosahedron" => icosahedron(theta).map(closed),
        other => Err(Error::Lookup(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        let z = z2_lattice(6, FRAC_PI_2).unwrap();
        assert_eq!(z.complex.vertex_count(), 2 * 36 + 2 * 6 + 1);
        assert!(z.complex.validate_c1().is_empty());
        assert_eq!(z.coords.as_ref().unwrap()[z.root], [0, 0]);
    }

    #[test]
    fn platonic_counts() {
        let c = cube(FRAC_PI_2).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count(), c.face_count()), (8, 12, 6));
        let o = octahedron(FRAC_PI_3).unwrap();
        assert_eq!((o.vertex_count(), o.edge_count(), o.face_count()), (6, 12, 8));
        let i = icosahedron(FRAC_PI_3).unwrap();
        assert_eq!((i.vertex_count(), i.edge_count(), i.face_count()), (12, 30, 20));
        let d = dodecahedron(3.0 * PI / 5.0).unwrap();
        assert_eq!((d.vertex_count(), d.edge_count(), d.face_count()), (20, 30, 12));
        assert!(d.validate_c1().is_empty());
        for c in [&c, &o, &i, &d] {
            assert!(c.is_closed());
        }
    }

    #[test]
    fn hex_lattice_characters() {
        let hex = hex_lattice(2, 2.0 * FRAC_PI_3).unwrap();
        let c = &hex.complex;
        assert!(c.validate_c1().is_empty());
        let interior = c.interior_vertices();
        assert!(!interior.is_empty());
        for v in interior {
            assert_eq!(c.degree(v), 6);
            assert!((c.normalized_character(v).unwrap() - FRAC_PI_3).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_generator() {
        assert!(matches!(by_name("klein_bottle", &GeneratorParams::default()), Err(Error::Lookup(_))));
    }
}
