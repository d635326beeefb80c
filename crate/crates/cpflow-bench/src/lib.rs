//! Shared fixtures for the benchmarks.

use cpflow::complex::generate;
use cpflow::flow::{self, FlowProblem};
use cpflow::{Background, CellComplex, FlowConfig, Metric};
use std::f64::consts::FRAC_PI_2;

/// Square-lattice ball with a converged flat metric and a noisy start.
pub struct LatticeFixture {
    pub complex: CellComplex,
    pub noisy: Metric,
    pub flat: Metric,
}

pub fn lattice_fixture(radius: usize) -> LatticeFixture {
    let patch = generate::z2_lattice(radius, FRAC_PI_2).expect("lattice");
    let complex = patch.complex;
    let free = complex.interior_vertices();
    let u = flow::white_noise(complex.vertex_count(), &free, 0.05, 1);
    let noisy = Metric::new(Background::Euclidean, u).expect("metric");
    let problem = FlowProblem::new(&complex, Background::Euclidean).expect("problem");
    let config = FlowConfig { snapshot_stride: usize::MAX, ..FlowConfig::default() };
    let flat = flow::integrate(&problem, &noisy, &config).expect("flow").final_metric();
    LatticeFixture { complex, noisy, flat }
}
