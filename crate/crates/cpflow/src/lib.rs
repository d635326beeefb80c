//! Combinatorial Ricci flow for ideal circle patterns.
//!
//! The engine works on finite truncations of weighted cellular
//! decompositions. A flow drives the per-vertex log radii until the discrete
//! Gaussian curvature matches a target, after which the metric can be laid out
//! as circles in the plane or the Poincaré disk, projected to the sphere, and
//! turned into ideal hyperbolic polyhedron data.
//!
//! Module map:
//! - [`complex`]: cell complexes, validation, characters, exhaustions, duals, generators.
//! - [`geometry`]: two-circle configurations in both backgrounds.
//! - [`curvature`]: vertex and dual-face curvature, targets, Jacobian weights.
//! - [`flow`]: integrators, initial metrics, heat harness, convergence fits.
//! - [`lattice`]: difference calculus on the square lattice.
//! - [`layout`]: embedding, stereographic projection, polyhedra, SVG.

pub mod complex;
pub mod curvature;
mod error;
pub mod flow;
pub mod geometry;
pub mod lattice;
pub mod layout;
pub mod tolerances;

pub use complex::{CellComplex, Edge, Exhaustion, Face, Infinity};
pub use curvature::Metric;
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowProblem, FlowTrace};
pub use geometry::{Background, TwoCircle};
pub use layout::{Layout, PolyhedronData};
