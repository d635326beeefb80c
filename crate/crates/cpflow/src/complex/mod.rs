//! Weighted cellular decompositions.
//!
//! Faces are stored as oriented cycles of vertices and edges, with a half-edge
//! table on top. Orientation is made coherent at construction time, so a
//! face's cycle is counterclockwise in any orientation-preserving layout.

pub mod generate;
mod json;
mod tiling;

pub use json::ComplexJson;

use crate::error::{Error, Result};
use crate::geometry::check_weight;
use crate::tolerances;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::f64::consts::PI;

/// An edge `[u, v]` with intersection angle `theta ∈ (0, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub theta: f64,
}

impl Edge {
    /// The endpoint opposite `w`.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

/// A face: `edges[k]` joins `vertices[k]` and `vertices[k + 1]` (cyclically).
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn reverse(&mut self) {
        self.vertices.reverse();
        // edge k joined vertices k, k+1; after reversal it joins m-1-k, m-2-k
        let m = self.edges.len();
        let old = self.edges.clone();
        for k in 0..m {
            self.edges[k] = old[(2 * m - 2 - k) % m];
        }
    }
}

/// Marks of the part of the surface sent to infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Infinity {
    /// A distinguished face `f_∞`; its boundary vertices form `V_∞`.
    Face(usize),
    /// An explicit vertex set `V_∞`.
    Vertices(Vec<usize>),
}

/// Directed side of an edge inside one face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub target: usize,
    pub face: usize,
    pub edge: usize,
    pub next: usize,
    pub prev: usize,
    pub twin: Option<usize>,
}

/// Finite weighted cellular decomposition of a surface (possibly with boundary).
#[derive(Clone, Debug)]
pub struct CellComplex {
    labels: Vec<u64>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    infinity: Option<Infinity>,
    half_edges: Vec<HalfEdge>,
    face_start: Vec<usize>,
    vertex_out: Vec<Option<usize>>,
    edge_halves: Vec<[Option<usize>; 2]>,
    adj_start: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

type EdgePairs = Vec<(usize, usize)>;

/// Vertex-cycle faces plus an edge-weight rule, the common generator input.
pub(crate) fn edges_from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<(EdgePairs, Vec<Vec<usize>>)> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut faces = Vec::with_capacity(cycles.len());
    for cycle in cycles {
        let m = cycle.len();
        let mut face_edges = Vec::with_capacity(m);
        for k in 0..m {
            let (a, b) = (cycle[k], cycle[(k + 1) % m]);
            if a >= n || b >= n {
                return Err(Error::Structural(format!("face vertex out of range in {cycle:?}")));
            }
            let key = (a.min(b), a.max(b));
            let e = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                pairs.len() - 1
            });
            face_edges.push(e);
        }
        faces.push(face_edges);
    }
    Ok((pairs, faces))
}

impl CellComplex {
    /// Build from explicit edges and faces given as cyclic edge-index lists.
    ///
    /// Validates the structure and reorients faces coherently.
    pub fn new(
        labels: Vec<u64>,
        edges: Vec<Edge>,
        faces: Vec<Vec<usize>>,
        infinity: Option<Infinity>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Structural("complex has no vertices".into()));
        }
        let mut seen_labels = BTreeSet::new();
        for &l in &labels {
            if !seen_labels.insert(l) {
                return Err(Error::Structural(format!("duplicate vertex id {l}")));
            }
        }
        let mut pair_seen = BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Structural(format!("edge {k} references a missing vertex")));
            }
            if e.u == e.v {
                return Err(Error::Structural(format!("edge {k} is a loop at vertex {}", labels[e.u])));
            }
            if !pair_seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Structural(format!(
                    "parallel edges between {} and {}",
                    labels[e.u], labels[e.v]
                )));
            }
            check_weight(e.theta).map_err(|_| {
                Error::Domain(format!("edge {k} weight {} outside (0, π)", e.theta))
            })?;
        }
        let mut built = Vec::with_capacity(faces.len());
        for (fi, fe) in faces.iter().enumerate() {
            built.push(face_cycle(fi, fe, &edges)?);
        }
        let mut complex = CellComplex {
            labels,
            edges,
            faces: built,
            infinity: None,
            half_edges: Vec::new(),
            face_start: Vec::new(),
            vertex_out: Vec::new(),
            edge_halves: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
        };
        complex.check_face_pairs()?;
        complex.orient()?;
        complex.rebuild();
        complex.check_connected()?;
        if let Some(inf) = infinity {
            complex.set_infinity(Some(inf))?;
        }
        Ok(complex)
    }

    /// Build from faces given as vertex cycles; edges get weights from `theta`.
    pub fn from_cycles(
        labels: Vec<u64>,
        cycles: &[Vec<usize>],
        theta: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        CellComplex::from_cycles_and_edges(labels, cycles, &[], theta)
    }

    /// Like [`CellComplex::from_cycles`], plus edges that bound no face.
    pub fn from_cycles_and_edges(
        labels: Vec<u64>,
        cycles: &[Vec<usize>],
        extra_edges: &[(usize, usize)],
        theta: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let (mut pairs, faces) = edges_from_cycles(labels.len(), cycles)?;
        let known: HashSet<(usize, usize)> = pairs.iter().copied().collect();
        let mut extra: Vec<(usize, usize)> = extra_edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .filter(|p| !known.contains(p))
            .collect();
        extra.sort_unstable();
        extra.dedup();
        pairs.extend(extra);
        let edges = pairs
            .into_iter()
            .map(|(u, v)| Edge { u, v, theta: theta(u, v) })
            .collect();
        CellComplex::new(labels, edges, faces, None)
    }

    fn check_face_pairs(&self) -> Result<()> {
        let mut uses = vec![0usize; self.edges.len()];
        let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &e in &f.edges {
                uses[e] += 1;
                edge_faces[e].push(fi);
            }
        }
        for (e, &count) in uses.iter().enumerate() {
            if count > 2 {
                return Err(Error::Structural(format!("edge {e} lies on {count} faces")));
            }
        }
        for fs in &edge_faces {
            if fs.len() == 2 {
                if fs[0] == fs[1] {
                    return Err(Error::Structural(format!("face {} meets itself along an edge", fs[0])));
                }
                let key = (fs[0].min(fs[1]), fs[0].max(fs[1]));
                let c = shared.entry(key).or_insert(0);
                *c += 1;
                if *c > 1 {
                    return Err(Error::Structural(format!(
                        "faces {} and {} share more than one edge",
                        key.0, key.1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Flip faces so that every interior edge is traversed in opposite directions.
    fn orient(&mut self) -> Result<()> {
        let nf = self.faces.len();
        let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &e in &f.edges {
                edge_faces[e].push(fi);
            }
        }
        let mut fixed = vec![false; nf];
        for start in 0..nf {
            if fixed[start] {
                continue;
            }
            fixed[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                for k in 0..self.faces[f].len() {
                    let e = self.faces[f].edges[k];
                    let a = self.faces[f].vertices[k];
                    for &g in &edge_faces[e] {
                        if g == f {
                            continue;
                        }
                        let same_dir = self.traverses(g, e, a);
                        if fixed[g] {
                            if same_dir {
                                return Err(Error::Structural("surface is not orientable".into()));
                            }
                        } else {
                            if same_dir {
                                self.faces[g].reverse();
                            }
                            fixed[g] = true;
                            queue.push_back(g);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether face `f` traverses edge `e` starting at vertex `a`.
    fn traverses(&self, f: usize, e: usize, a: usize) -> bool {
        let face = &self.faces[f];
        face.edges
            .iter()
            .position(|&x| x == e)
            .map(|k| face.vertices[k] == a)
            .unwrap_or(false)
    }

    fn rebuild(&mut self) {
        let n = self.labels.len();
        self.half_edges.clear();
        self.face_start.clear();
        self.edge_halves = vec![[None, None]; self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let base = self.half_edges.len();
            self.face_start.push(base);
            let m = f.len();
            for k in 0..m {
                let h = base + k;
                self.half_edges.push(HalfEdge {
                    origin: f.vertices[k],
                    target: f.vertices[(k + 1) % m],
                    face: fi,
                    edge: f.edges[k],
                    next: base + (k + 1) % m,
                    prev: base + (k + m - 1) % m,
                    twin: None,
                });
                let slot = &mut self.edge_halves[f.edges[k]];
                if slot[0].is_none() {
                    slot[0] = Some(h);
                } else {
                    slot[1] = Some(h);
                }
            }
        }
        self.vertex_out = vec![None; n];
        for (h, he) in self.half_edges.iter().enumerate() {
            self.vertex_out[he.origin].get_or_insert(h);
        }
        for halves in &self.edge_halves {
            if let [Some(a), Some(b)] = *halves {
                self.half_edges[a].twin = Some(b);
                self.half_edges[b].twin = Some(a);
            }
        }
        let mut degree = vec![0usize; n];
        for e in &self.edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        self.adj_start = Vec::with_capacity(n + 1);
        self.adj_start.push(0);
        for d in &degree {
            let last = *self.adj_start.last().unwrap();
            self.adj_start.push(last + d);
        }
        let mut fill = self.adj_start.clone();
        self.adj = vec![(0, 0); 2 * self.edges.len()];
        for (k, e) in self.edges.iter().enumerate() {
            self.adj[fill[e.u]] = (e.v, k);
            fill[e.u] += 1;
            self.adj[fill[e.v]] = (e.u, k);
            fill[e.v] += 1;
        }
    }

    fn check_connected(&self) -> Result<()> {
        let dist = self.distances_from(0);
        if let Some(v) = dist.iter().position(|d| d.is_none()) {
            return Err(Error::Structural(format!(
                "1-skeleton is disconnected: vertex {} unreachable",
                self.labels[v]
            )));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// External vertex ids.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Internal index of an external vertex id.
    pub fn vertex_by_label(&self, label: u64) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::Lookup(format!("no vertex with id {label}")))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn infinity(&self) -> Option<&Infinity> {
        self.infinity.as_ref()
    }

    /// Replace the infinity marks after validating them.
    pub fn set_infinity(&mut self, infinity: Option<Infinity>) -> Result<()> {
        match &infinity {
            Some(Infinity::Face(f)) if *f >= self.faces.len() => {
                return Err(Error::Lookup(format!("infinity face {f} does not exist")))
            }
            Some(Infinity::Vertices(vs)) => {
                if let Some(v) = vs.iter().find(|&&v| v >= self.labels.len()) {
                    return Err(Error::Lookup(format!("infinity vertex index {v} does not exist")));
                }
            }
            _ => {}
        }
        self.infinity = infinity;
        Ok(())
    }

    /// Set every edge weight to `theta`.
    pub fn with_uniform_theta(mut self, theta: f64) -> Result<Self> {
        check_weight(theta)?;
        for e in &mut self.edges {
            e.theta = theta;
        }
        Ok(self)
    }

    pub fn set_theta(&mut self, edge: usize, theta: f64) -> Result<()> {
        check_weight(theta)?;
        self.edges
            .get_mut(edge)
            .ok_or_else(|| Error::Lookup(format!("no edge {edge}")))?
            .theta = theta;
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.labels.len() {
            Ok(())
        } else {
            Err(Error::Lookup(format!("no vertex with index {v}")))
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_start[v + 1] - self.adj_start[v]
    }

    /// `(neighbor, edge index)` pairs around `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[self.adj_start[v]..self.adj_start[v + 1]]
    }

    /// Index of the edge joining `a` and `b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.neighbors(a).iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    /// Number of faces containing `edge` (0, 1 or 2).
    pub fn edge_face_count(&self, edge: usize) -> usize {
        self.edge_halves[edge].iter().filter(|h| h.is_some()).count()
    }

    /// Faces on either side of `edge`.
    pub fn edge_faces(&self, edge: usize) -> Vec<usize> {
        self.edge_halves[edge]
            .iter()
            .flatten()
            .map(|&h| self.half_edges[h].face)
            .collect()
    }

    /// Half-edges of `face` in cyclic order.
    pub fn face_half_edges(&self, face: usize) -> std::ops::Range<usize> {
        let start = self.face_start[face];
        start..start + self.faces[face].len()
    }

    /// Whether every edge lies on exactly two faces.
    pub fn is_closed(&self) -> bool {
        (0..self.edges.len()).all(|e| self.edge_face_count(e) == 2)
    }

    /// Faces around `v` in rotation order, each paired with the edge it shares
    /// with the next face, if the star of `v` is a complete disk.
    pub fn vertex_rotation(&self, v: usize) -> Option<Vec<(usize, usize)>> {
        let deg = self.degree(v);
        let start = self.vertex_out[v]?;
        let mut out = Vec::with_capacity(deg);
        let mut h = start;
        loop {
            let back = self.half_edges[h].prev;
            out.push((self.half_edges[h].face, self.half_edges[back].edge));
            h = self.half_edges[back].twin?;
            if h == start {
                break;
            }
            if out.len() > deg {
                return None;
            }
        }
        (out.len() == deg).then_some(out)
    }

    /// Faces around `v` in rotation order, if its star is a complete disk.
    pub fn vertex_star(&self, v: usize) -> Option<Vec<usize>> {
        self.vertex_rotation(v).map(|r| r.into_iter().map(|(f, _)| f).collect())
    }

    /// Whether `v` has a complete disk of faces around it.
    pub fn is_interior(&self, v: usize) -> bool {
        self.vertex_star(v).is_some()
    }

    /// Vertices with complete stars.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.is_interior(v)).collect()
    }

    /// Faces whose weight sum misses `(m - 2)π` by more than `tolerance`.
    pub fn validate_c1_with(&self, tolerance: f64) -> Vec<FaceViolation> {
        self.faces
            .iter()
            .enumerate()
            .filter_map(|(fi, f)| {
                let sum: f64 = f.edges.iter().map(|&e| self.edges[e].theta).sum();
                let expected = (f.len() as f64 - 2.0) * PI;
                ((sum - expected).abs() > tolerance).then_some(FaceViolation {
                    face: fi,
                    sum,
                    expected,
                })
            })
            .collect()
    }

    /// Faces violating the ideal-face condition at the default tolerance.
    pub fn validate_c1(&self) -> Vec<FaceViolation> {
        self.validate_c1_with(tolerances::FACE_ANGLE_SUM)
    }

    /// Sum of weights over edges incident to `v`.
    pub fn character(&self, v: usize) -> Result<f64> {
        self.check_vertex(v)?;
        Ok(self.neighbors(v).iter().map(|&(_, e)| self.edges[e].theta).sum())
    }

    /// `(character - 2π) / degree`.
    pub fn normalized_character(&self, v: usize) -> Result<f64> {
        let c = self.character(v)?;
        let d = self.degree(v);
        if d == 0 {
            return Err(Error::Domain(format!("vertex {} is isolated", self.labels[v])));
        }
        Ok((c - 2.0 * PI) / d as f64)
    }

    /// Hop distances from `root`; `None` marks unreachable vertices.
    pub fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &(w, _) in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within `radius` hops of `root`, sorted.
    pub fn ball(&self, root: usize, radius: usize) -> Result<Vec<usize>> {
        self.check_vertex(root)?;
        Ok(self
            .distances_from(root)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.filter(|&d| d <= radius).map(|_| v))
            .collect())
    }

    /// `V_∞` from the infinity marks.
    pub fn infinity_vertices(&self) -> Vec<usize> {
        match &self.infinity {
            None => Vec::new(),
            Some(Infinity::Face(f)) => {
                let mut vs = self.faces[*f].vertices.clone();
                vs.sort_unstable();
                vs
            }
            Some(Infinity::Vertices(vs)) => {
                let mut vs = vs.clone();
                vs.sort_unstable();
                vs.dedup();
                vs
            }
        }
    }

    /// Induced sub-complex on `vertices`: edges with both ends and faces with
    /// every vertex inside. Returns the complex and the map to parent indices.
    pub fn induced(&self, vertices: &[usize]) -> Result<(CellComplex, Vec<usize>)> {
        let mut local = vec![usize::MAX; self.vertex_count()];
        let mut map = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        for (i, &v) in map.iter().enumerate() {
            self.check_vertex(v)?;
            local[v] = i;
        }
        let mut edge_local = vec![usize::MAX; self.edge_count()];
        let mut edges = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if local[e.u] != usize::MAX && local[e.v] != usize::MAX {
                edge_local[k] = edges.len();
                edges.push(Edge { u: local[e.u], v: local[e.v], theta: e.theta });
            }
        }
        let mut faces = Vec::new();
        let mut face_local = vec![usize::MAX; self.face_count()];
        for (fi, f) in self.faces.iter().enumerate() {
            if f.vertices.iter().all(|&v| local[v] != usize::MAX) {
                face_local[fi] = faces.len();
                faces.push(f.edges.iter().map(|&e| edge_local[e]).collect());
            }
        }
        let infinity = match &self.infinity {
            Some(Infinity::Face(f)) if face_local[*f] != usize::MAX => {
                Some(Infinity::Face(face_local[*f]))
            }
            Some(Infinity::Vertices(vs)) => {
                let kept: Vec<usize> = vs
                    .iter()
                    .filter(|&&v| local[v] != usize::MAX)
                    .map(|&v| local[v])
                    .collect();
                (!kept.is_empty()).then_some(Infinity::Vertices(kept))
            }
            _ => None,
        };
        let labels = map.iter().map(|&v| self.labels[v]).collect();
        let sub = CellComplex::new(labels, edges, faces, infinity)?;
        Ok((sub, map))
    }

    /// The complex with `V_∞`, its incident edges and every face touching it
    /// removed. Returns the reduced complex and the map to parent indices.
    pub fn remove_infinity(&self) -> Result<(CellComplex, Vec<usize>)> {
        let inf = self.infinity_vertices();
        if inf.is_empty() {
            return Err(Error::Config("complex carries no infinity marks".into()));
        }
        let keep: Vec<usize> = (0..self.vertex_count())
            .filter(|v| inf.binary_search(v).is_err())
            .collect();
        if keep.is_empty() {
            return Err(Error::Structural("every vertex lies at infinity".into()));
        }
        let mut reduced = self.clone();
        reduced.infinity = None;
        let (sub, map) = reduced.induced(&keep)?;
        Ok((sub, map))
    }

    /// Poincaré dual: faces become vertices, vertices become faces, and each
    /// edge keeps its weight. Vertex `k` of the dual is face `k` here, and face
    /// `k` of the dual is vertex `k` here.
    ///
    /// A complex with a single boundary cycle is closed off by an extra face
    /// when it carries infinity marks; otherwise open boundary is rejected.
    pub fn dual(&self) -> Result<CellComplex> {
        let closed = if self.is_closed() {
            self.clone()
        } else if self.infinity.is_some() {
            self.close_boundary()?
        } else {
            return Err(Error::Unsupported(
                "dual of a complex with open boundary needs infinity marks".into(),
            ));
        };
        let nf = closed.face_count();
        let mut edges = Vec::with_capacity(closed.edge_count());
        for (k, e) in closed.edges.iter().enumerate() {
            let fs = closed.edge_faces(k);
            if fs.len() != 2 {
                return Err(Error::Structural(format!("edge {k} is not shared by two faces")));
            }
            edges.push(Edge { u: fs[0], v: fs[1], theta: e.theta });
        }
        let mut faces = Vec::with_capacity(closed.vertex_count());
        for v in 0..closed.vertex_count() {
            let rotation = closed.vertex_rotation(v).ok_or_else(|| {
                Error::Structural(format!("vertex {} has an incomplete star", closed.labels[v]))
            })?;
            faces.push(rotation.into_iter().map(|(_, e)| e).collect());
        }
        let infinity = match &closed.infinity {
            Some(Infinity::Face(f)) => Some(Infinity::Vertices(vec![*f])),
            _ => None,
        };
        let labels = (0..nf as u64).collect();
        CellComplex::new(labels, edges, faces, infinity)
    }

    /// Cap a single boundary cycle with an extra face marked as `f_∞`.
    fn close_boundary(&self) -> Result<CellComplex> {
        let boundary: Vec<usize> = self
            .half_edges
            .iter()
            .enumerate()
            .filter(|(_, h)| h.twin.is_none())
            .map(|(i, _)| i)
            .collect();
        if boundary.is_empty() {
            return Ok(self.clone());
        }
        let mut next_of: HashMap<usize, usize> = HashMap::new();
        for &h in &boundary {
            // boundary half-edges run origin→target inside their face; the cap
            // traverses them backwards
            let he = self.half_edges[h];
            if next_of.insert(he.target, h).is_some() {
                return Err(Error::Unsupported("boundary is not a simple cycle".into()));
            }
        }
        let first = boundary[0];
        let mut cycle_edges = Vec::new();
        let mut h = first;
        loop {
            let he = self.half_edges[h];
            cycle_edges.push(he.edge);
            h = *next_of
                .get(&he.origin)
                .ok_or_else(|| Error::Unsupported("boundary is not closed".into()))?;
            if h == first {
                break;
            }
            if cycle_edges.len() > boundary.len() {
                return Err(Error::Unsupported("boundary is not a simple cycle".into()));
            }
        }
        if cycle_edges.len() != boundary.len() {
            return Err(Error::Unsupported("more than one boundary cycle".into()));
        }
        let mut faces: Vec<Vec<usize>> = self.faces.iter().map(|f| f.edges.clone()).collect();
        faces.push(cycle_edges);
        let cap = faces.len() - 1;
        CellComplex::new(
            self.labels.clone(),
            self.edges.clone(),
            faces,
            Some(Infinity::Face(cap)),
        )
    }

    /// Stable content hash (hex SHA-256 of the canonical JSON form).
    pub fn content_hash(&self) -> String {
        let text = serde_json::to_string(&ComplexJson::from(self)).expect("serializable");
        crate::flow::hex_digest(text.as_bytes())
    }
}

/// A face whose weight sum misses `(m - 2)π`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceViolation {
    pub face: usize,
    pub sum: f64,
    pub expected: f64,
}

fn face_cycle(fi: usize, fe: &[usize], edges: &[Edge]) -> Result<Face> {
    let m = fe.len();
    if m < 3 {
        return Err(Error::Structural(format!("face {fi} has {m} < 3 edges")));
    }
    for &e in fe {
        if e >= edges.len() {
            return Err(Error::Structural(format!("face {fi} references missing edge {e}")));
        }
    }
    let (e0, e1) = (edges[fe[0]], edges[fe[1]]);
    let start = if e0.u == e1.u || e0.u == e1.v {
        e0.v
    } else if e0.v == e1.u || e0.v == e1.v {
        e0.u
    } else {
        return Err(Error::Structural(format!(
            "face {fi}: edges {} and {} are not consecutive",
            fe[0], fe[1]
        )));
    };
    let mut vertices = Vec::with_capacity(m);
    let mut cur = start;
    for (k, &e) in fe.iter().enumerate() {
        let edge = edges[e];
        if edge.u != cur && edge.v != cur {
            return Err(Error::Structural(format!(
                "face {fi}: edge {e} is not on the boundary walk at position {k}"
            )));
        }
        vertices.push(cur);
        cur = edge.other(cur);
    }
    if cur != start {
        return Err(Error::Structural(format!("face {fi} boundary does not close")));
    }
    let distinct: BTreeSet<_> = vertices.iter().collect();
    if distinct.len() != m {
        return Err(Error::Structural(format!("face {fi} repeats a vertex")));
    }
    Ok(Face { vertices, edges: fe.to_vec() })
}

/// Nested combinatorial balls around a root.
#[derive(Clone, Debug)]
pub struct Exhaustion {
    pub root: usize,
    pub radii: Vec<usize>,
    /// Sorted vertex sets, one per radius.
    pub levels: Vec<Vec<usize>>,
}

impl Exhaustion {
    /// Balls of the given strictly increasing hop radii around `root`.
    ///
    /// Every ball vertex must have a complete star in `complex`, so that the
    /// ball does not run into the edge of the materialized region.
    pub fn build(complex: &CellComplex, root: usize, radii: &[usize]) -> Result<Self> {
        complex.check_vertex(root)?;
        if radii.is_empty() {
            return Err(Error::Config("exhaustion needs at least one radius".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("radii {radii:?} are not strictly increasing")));
        }
        let dist = complex.distances_from(root);
        let mut levels = Vec::with_capacity(radii.len());
        for &r in radii {
            let level: Vec<usize> = (0..complex.vertex_count())
                .filter(|&v| dist[v].is_some_and(|d| d <= r))
                .collect();
            if let Some(&v) = level.iter().find(|&&v| !complex.is_interior(v)) {
                return Err(Error::Config(format!(
                    "ball of radius {r} reaches vertex {} on the edge of the materialized region",
                    complex.labels()[v]
                )));
            }
            levels.push(level);
        }
        Ok(Exhaustion { root, radii: radii.to_vec(), levels })
    }

    /// Induced sub-complex of level `k`, with its map to parent indices.
    pub fn subcomplex(&self, complex: &CellComplex, k: usize) -> Result<(CellComplex, Vec<usize>)> {
        let level = self
            .levels
            .get(k)
            .ok_or_else(|| Error::Lookup(format!("no exhaustion level {k}")))?;
        complex.induced(level)
    }

    /// Membership mask of level `k`.
    pub fn mask(&self, vertex_count: usize, k: usize) -> Vec<bool> {
        let mut mask = vec![false; vertex_count];
        for &v in &self.levels[k] {
            mask[v] = true;
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::generate;
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn triangle(thetas: [f64; 3]) -> CellComplex {
        let edges = vec![
            Edge { u: 0, v: 1, theta: thetas[0] },
            Edge { u: 1, v: 2, theta: thetas[1] },
            Edge { u: 2, v: 0, theta: thetas[2] },
        ];
        CellComplex::new(vec![0, 1, 2], edges, vec![vec![0, 1, 2]], None).unwrap()
    }

    #[test]
    fn c1_examples() {
        assert!(triangle([FRAC_PI_3; 3]).validate_c1().is_empty());
        let bad = triangle([FRAC_PI_3, FRAC_PI_3, FRAC_PI_2]).validate_c1();
        assert_eq!(bad.len(), 1);
        assert!((bad[0].sum - 7.0 * PI / 6.0).abs() < 1e-12);
        let z2 = generate::z2_lattice(3, FRAC_PI_2).unwrap();
        assert!(z2.complex.validate_c1().is_empty());
    }

    #[test]
    fn malformed_faces_are_rejected() {
        let edges = vec![
            Edge { u: 0, v: 1, theta: 1.0 },
            Edge { u: 1, v: 2, theta: 1.0 },
            Edge { u: 2, v: 3, theta: 1.0 },
            Edge { u: 3, v: 0, theta: 1.0 },
        ];
        let err = CellComplex::new(vec![0, 1, 2, 3], edges.clone(), vec![vec![0, 2, 1, 3]], None);
        assert!(matches!(err, Err(Error::Structural(_))));
        let err = CellComplex::new(vec![0, 1, 2, 3], edges, vec![vec![0, 1]], None);
        assert!(matches!(err, Err(Error::Structural(_))));
        let loop_edge = vec![Edge { u: 0, v: 0, theta: 1.0 }];
        assert!(CellComplex::new(vec![0], loop_edge, vec![], None).is_err());
        let bad_weight = vec![Edge { u: 0, v: 1, theta: PI }];
        assert!(matches!(
            CellComplex::new(vec![0, 1], bad_weight, vec![], None),
            Err(Error::Domain(_))
        ));
        let split = vec![Edge { u: 0, v: 1, theta: 1.0 }];
        assert!(CellComplex::new(vec![0, 1, 2], split, vec![], None).is_err());
    }

    #[test]
    fn characters() {
        let z2 = generate::z2_lattice(3, FRAC_PI_2).unwrap();
        let c = &z2.complex;
        assert!((c.character(z2.root).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(c.normalized_character(z2.root).unwrap().abs() < 1e-15);
        let star = CellComplex::new(
            vec![0, 1, 2, 3],
            vec![
                Edge { u: 0, v: 1, theta: 0.5 },
                Edge { u: 0, v: 2, theta: 0.6 },
                Edge { u: 0, v: 3, theta: 0.7 },
            ],
            vec![],
            None,
        )
        .unwrap();
        assert!((star.character(0).unwrap() - 1.8).abs() < 1e-15);
        assert!(star.character(9).is_err());
        let hex = generate::hex_lattice(2, 2.0 * FRAC_PI_3).unwrap();
        let hc = &hex.complex;
        assert!((hc.character(hex.root).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((hc.normalized_character(hex.root).unwrap() - FRAC_PI_3).abs() < 1e-12);
        let oct = generate::octahedron(FRAC_PI_3).unwrap();
        let v = 0;
        assert!((oct.normalized_character(v).unwrap() + PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustion_balls() {
        let z2 = generate::z2_lattice(6, FRAC_PI_2).unwrap();
        let ex = Exhaustion::build(&z2.complex, z2.root, &[1]).unwrap();
        assert_eq!(ex.levels[0].len(), 5);
        let ex = Exhaustion::build(&z2.complex, z2.root, &[1, 2]).unwrap();
        assert_eq!(ex.levels[1].len(), 13);
        assert!(ex.levels[0].iter().all(|v| ex.levels[1].contains(v)));
        assert!(Exhaustion::build(&z2.complex, z2.root, &[2, 2]).is_err());
        assert!(Exhaustion::build(&z2.complex, z2.root, &[6]).is_err());
        assert!(Exhaustion::build(&z2.complex, 10_000, &[1]).is_err());
        let (sub, map) = ex.subcomplex(&z2.complex, 1).unwrap();
        assert_eq!(sub.vertex_count(), 13);
        assert_eq!(map.len(), 13);
        assert_eq!(sub.face_count(), 4);
    }

    #[test]
    fn interior_detection() {
        let z2 = generate::z2_lattice(3, FRAC_PI_2).unwrap();
        let interior = z2.complex.interior_vertices();
        assert_eq!(interior.len(), 5);
        let cube = generate::cube(FRAC_PI_2).unwrap();
        assert!(cube.is_closed());
        assert_eq!(cube.interior_vertices().len(), 8);
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let cube = generate::cube(2.0 * FRAC_PI_3).unwrap();
        let d = cube.dual().unwrap();
        assert_eq!((d.vertex_count(), d.edge_count(), d.face_count()), (6, 12, 8));
        assert!((0..6).all(|v| d.degree(v) == 4));
        assert!(d.faces().iter().all(|f| f.len() == 3));
        assert!(d.edges().iter().all(|e| (e.theta - 2.0 * FRAC_PI_3).abs() < 1e-15));
    }

    #[test]
    fn open_boundary_dual_needs_marks() {
        let z2 = generate::z2_lattice(2, FRAC_PI_2).unwrap();
        assert!(matches!(z2.complex.dual(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn remove_infinity_octahedron() {
        let mut oct = generate::octahedron(FRAC_PI_3).unwrap();
        oct.set_infinity(Some(Infinity::Face(0))).unwrap();
        let (reduced, map) = oct.remove_infinity().unwrap();
        assert_eq!(reduced.vertex_count(), 3);
        assert_eq!(reduced.edge_count(), 3);
        assert_eq!(reduced.face_count(), 1);
        let inf = oct.infinity_vertices();
        assert!(map.iter().all(|v| !inf.contains(v)));
    }
}
