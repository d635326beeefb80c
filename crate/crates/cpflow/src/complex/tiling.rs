//! Regular hyperbolic tilings grown combinatorially, one face at a time.
//!
//! Coordinates are never used: reflections far from the root lose about
//! `ε e^{2D}` in accuracy, which breaks vertex identification after a few
//! layers. Growth instead keeps the patch a disk and glues each new face to
//! the boundary, closing every boundary vertex that would reach `q` faces.

use super::CellComplex;
use crate::error::{Error, Result};

const VERTEX_CAP: usize = 2_000_000;

/// Disk-shaped patch with its boundary kept as a ccw doubly linked cycle.
struct Patch {
    p: usize,
    faces: Vec<Vec<usize>>,
    count: Vec<usize>,
    succ: Vec<usize>,
    pred: Vec<usize>,
}

impl Patch {
    fn new_vertex(&mut self) -> usize {
        self.count.push(0);
        self.succ.push(usize::MAX);
        self.pred.push(usize::MAX);
        self.count.len() - 1
    }

    /// Glue a face across the boundary edge `a -> succ(a)`. A boundary vertex
    /// with `q - 1` faces is closed by the new face, so the face also runs
    /// along its other boundary edge.
    fn attach(&mut self, a: usize, q: usize) -> Result<()> {
        let mut chain = std::collections::VecDeque::from([a, self.succ[a]]);
        while self.count[chain[0]] == q - 1 && chain.len() < self.p {
            chain.push_front(self.pred[chain[0]]);
        }
        while self.count[*chain.back().unwrap()] == q - 1 && chain.len() < self.p {
            chain.push_back(self.succ[*chain.back().unwrap()]);
        }
        let (first, last) = (chain[0], *chain.back().unwrap());
        if first == last || self.count[first] >= q || self.count[last] >= q {
            return Err(Error::Structural("tiling growth closed up on itself".into()));
        }
        let fresh: Vec<usize> = (chain.len()..self.p).map(|_| self.new_vertex()).collect();
        // ccw around the new face: the boundary run backwards, then the new vertices
        let face: Vec<usize> = chain.iter().rev().copied().chain(fresh.iter().copied()).collect();
        for &v in &face {
            self.count[v] += 1;
        }
        let mut run = vec![first];
        run.extend(&fresh);
        run.push(last);
        for w in run.windows(2) {
            self.succ[w[0]] = w[1];
            self.pred[w[1]] = w[0];
        }
        self.faces.push(face);
        Ok(())
    }

    fn boundary_from(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut v = self.succ[start];
        while v != start {
            out.push(v);
            v = self.succ[v];
        }
        out
    }
}

/// Patch of the `{p, q}` tiling made of `layers` face layers around a vertex.
///
/// Layer 1 is the `q` faces at the root; layer `k + 1` adds every face touching
/// a vertex of layers `1..=k`. Every vertex of the first `layers - 1` layers is
/// therefore interior. The root is vertex 0.
pub(super) fn hyperbolic_patch(p: usize, q: usize, layers: usize, theta: f64) -> Result<(CellComplex, usize)> {
    if p < 3 || q < 3 || (p - 2) * (q - 2) <= 4 {
        return Err(Error::Config(format!("{{{p},{q}}} is not a hyperbolic tiling")));
    }
    if layers == 0 {
        return Err(Error::Config("a tiling patch needs at least one face layer".into()));
    }
    let mut patch = Patch { p, faces: vec![(0..p).collect()], count: vec![1; p], succ: vec![], pred: vec![] };
    patch.succ = (0..p).map(|v| (v + 1) % p).collect();
    patch.pred = (0..p).map(|v| (v + p - 1) % p).collect();
    let mut pending = vec![0];
    for layer in 0..layers {
        for &v in &pending {
            while patch.count[v] < q {
                patch.attach(v, q)?;
            }
            if patch.count.len() > VERTEX_CAP {
                return Err(Error::Config(format!("{{{p},{q}}} patch of {layers} layers is too large")));
            }
        }
        if layer + 1 < layers {
            // the whole boundary, walked in order so each gap is filled next to a closed one
            let start = patch.faces.last().and_then(|f| f.iter().copied().find(|&v| patch.count[v] < q));
            pending = start.map(|s| patch.boundary_from(s)).unwrap_or_default();
        }
    }
    let labels = (0..patch.count.len() as u64).collect();
    let complex = CellComplex::from_cycles(labels, &patch.faces, |_, _| theta)?;
    Ok((complex, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn six_six_layers() {
        let (c, root) = hyperbolic_patch(6, 6, 1, 2.0 * PI / 3.0).unwrap();
        assert_eq!((c.face_count(), c.vertex_count()), (6, 25));
        assert_eq!(c.interior_vertices(), vec![root]);
        let (c, root) = hyperbolic_patch(6, 6, 2, 2.0 * PI / 3.0).unwrap();
        assert!(c.faces().iter().all(|f| f.len() == 6));
        let interior = c.interior_vertices();
        assert_eq!((c.vertex_count(), interior.len()), (361, 25));
        assert!(interior.iter().all(|&v| c.degree(v) == 6));
        assert!(c.neighbors(root).len() == 6);
        let (c, _) = hyperbolic_patch(6, 6, 3, 2.0 * PI / 3.0).unwrap();
        assert_eq!((c.vertex_count(), c.interior_vertices().len()), (5041, 361));
    }

    #[test]
    fn seven_three_interior_degrees() {
        let (c, _) = hyperbolic_patch(7, 3, 3, 5.0 * PI / 7.0).unwrap();
        let interior = c.interior_vertices();
        assert!(interior.len() > 20);
        assert!(interior.iter().all(|&v| c.degree(v) == 3));
        assert!(c.validate_c1().is_empty());
    }

    #[test]
    fn patches_are_disks() {
        for (p, q, layers) in [(7, 3, 5), (3, 7, 4), (4, 5, 4), (5, 4, 4), (6, 6, 4)] {
            let (c, _) = hyperbolic_patch(p, q, layers, 1.0).unwrap();
            let chi = c.vertex_count() as i64 - c.edge_count() as i64 + c.face_count() as i64;
            assert_eq!(chi, 1, "{{{p},{q}}}");
            assert!(c.faces().iter().all(|f| f.len() == p));
            assert!(c.interior_vertices().iter().all(|&v| c.degree(v) == q));
        }
    }

    #[test]
    fn euclidean_parameters_rejected() {
        assert!(hyperbolic_patch(4, 4, 2, 1.0).is_err());
        assert!(hyperbolic_patch(6, 3, 2, 1.0).is_err());
    }
}
