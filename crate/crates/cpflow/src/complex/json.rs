//! JSON interchange format for complexes.

use super::{CellComplex, Edge, Infinity};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `{"vertices":[ids], "edges":[{"u","v","theta"}], "faces":[[edge indices]], "infinity":…}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeJson>,
    pub faces: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinity: Option<InfinityJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub u: u64,
    pub v: u64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfinityJson {
    Face(usize),
    Vertices(Vec<u64>),
}

impl From<&CellComplex> for ComplexJson {
    fn from(c: &CellComplex) -> Self {
        let labels = c.labels();
        ComplexJson {
            vertices: labels.to_vec(),
            edges: c
                .edges()
                .iter()
                .map(|e| EdgeJson { u: labels[e.u], v: labels[e.v], theta: e.theta })
                .collect(),
            faces: c.faces().iter().map(|f| f.edges.clone()).collect(),
            infinity: c.infinity().map(|inf| match inf {
                Infinity::Face(f) => InfinityJson::Face(*f),
                Infinity::Vertices(vs) => {
                    InfinityJson::Vertices(vs.iter().map(|&v| labels[v]).collect())
                }
            }),
        }
    }
}

impl TryFrom<ComplexJson> for CellComplex {
    type Error = Error;

    fn try_from(j: ComplexJson) -> Result<Self> {
        let index: HashMap<u64, usize> = j.vertices.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let lookup = |id: u64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::Lookup(format!("edge references unknown vertex id {id}")))
        };
        let mut edges = Vec::with_capacity(j.edges.len());
        for e in &j.edges {
            edges.push(Edge { u: lookup(e.u)?, v: lookup(e.v)?, theta: e.theta });
        }
        let infinity = match j.infinity {
            None => None,
            Some(InfinityJson::Face(f)) => Some(Infinity::Face(f)),
            Some(InfinityJson::Vertices(vs)) => Some(Infinity::Vertices(
                vs.into_iter().map(lookup).collect::<Result<_>>()?,
            )),
        };
        CellComplex::new(j.vertices, edges, j.faces, infinity)
    }
}

impl CellComplex {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let j: ComplexJson = serde_json::from_str(text)?;
        CellComplex::try_from(j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ComplexJson::from(self)).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;

    #[test]
    fn roundtrip_preserves_structure() {
        let mut cube = generate::cube(2.0).unwrap();
        cube.set_infinity(Some(Infinity::Face(2))).unwrap();
        let text = cube.to_json_string();
        let back = CellComplex::from_json_str(&text).unwrap();
        assert_eq!(back.to_json_string(), text);
        assert_eq!(back.content_hash(), cube.content_hash());
    }

    #[test]
    fn parses_the_documented_shape() {
        let text = r#"{"vertices":[10,11,12],
            "edges":[{"u":10,"v":11,"theta":1.0471975511965976},
                     {"u":11,"v":12,"theta":1.0471975511965976},
                     {"u":12,"v":10,"theta":1.0471975511965976}],
            "faces":[[0,1,2]],
            "infinity":{"vertices":[12]}}"#;
        let c = CellComplex::from_json_str(text).unwrap();
        assert_eq!(c.infinity_vertices(), vec![2]);
        assert!(c.validate_c1().is_empty());
        let bad = text.replace("\"v\":12,\"theta\"", "\"v\":99,\"theta\"");
        assert!(matches!(CellComplex::from_json_str(&bad), Err(Error::Lookup(_))));
    }
}
