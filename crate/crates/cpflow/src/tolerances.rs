//! Fixed numerical tolerances shared by validation, flows and layouts.

/// Absolute slack on a face's weight sum against `(m - 2)π`.
pub const FACE_ANGLE_SUM: f64 = 1e-9;

/// Layout closure tolerance, relative to the layout diameter.
pub const LAYOUT_RELATIVE: f64 = 1e-6;

/// Intersection angles must survive stereographic projection to this level.
pub const PROJECTION_ANGLE: f64 = 1e-9;

/// Dihedral angles of an emitted polyhedron against the pattern weights.
pub const DIHEDRAL_ANGLE: f64 = 1e-8;

/// Default stop when the curvature residual sup-norm drops below this.
pub const CURVATURE_RESIDUAL: f64 = 1e-10;

/// Default per-step error tolerance of the adaptive integrator.
pub const STEP_ERROR: f64 = 1e-8;

/// Sign and monotonicity checks along numerical traces.
pub const TRACE_MONOTONE: f64 = 1e-8;

/// Grid spacing of coordinates written to SVG.
pub const SVG_PRECISION: f64 = 1e-4;

/// Bisection steps used by the constant initial-metric constructors.
pub const BISECTION_STEPS: usize = 80;
