use cpflow::complex::generate;
use cpflow::curvature;
use cpflow::flow::{self, FlowProblem};
use cpflow::geometry::{self, Background};
use cpflow::layout::{self, EmbedOptions};
use cpflow::FlowConfig;
use cpflow_bench::lattice_fixture;
use criterion::{criterion_group, criterion_main, Criterion};
use std::f64::consts::PI;
use std::hint::black_box;

fn two_circle(c: &mut Criterion) {
    for bg in [Background::Euclidean, Background::Hyperbolic] {
        c.bench_function(&format!("half_angle/{}", bg.name()), |b| {
            b.iter(|| geometry::half_angle(bg, black_box(0.7), black_box(1.3), black_box(2.0)))
        });
        c.bench_function(&format!("d_theta_d_u/{}", bg.name()), |b| {
            b.iter(|| geometry::d_theta_d_u(bg, black_box(0.7), black_box(1.3), black_box(2.0)))
        });
    }
}

fn assembly(c: &mut Criterion) {
    let fx = lattice_fixture(20);
    let problem = FlowProblem::new(&fx.complex, Background::Euclidean).unwrap();
    c.bench_function("curvatures/z2_r20", |b| b.iter(|| curvature::curvatures(&fx.complex, black_box(&fx.noisy))));
    c.bench_function("flow_rhs/z2_r20", |b| b.iter(|| flow::ricci_flow_rhs(&problem, black_box(&fx.noisy))));
    c.bench_function("jacobian_weights/z2_r20", |b| {
        b.iter(|| curvature::flow_jacobian_weights(&fx.complex, black_box(&fx.noisy)))
    });
}

fn runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("runs");
    group.sample_size(10);
    let fx = lattice_fixture(10);
    let problem = FlowProblem::new(&fx.complex, Background::Euclidean).unwrap();
    let config = FlowConfig { snapshot_stride: usize::MAX, ..FlowConfig::default() };
    group.bench_function("integrate/z2_r10", |b| b.iter(|| flow::integrate(&problem, black_box(&fx.noisy), &config)));
    let options = EmbedOptions::default();
    group.bench_function("embed/z2_r10", |b| b.iter(|| layout::embed(&fx.complex, black_box(&fx.flat), &options)));
    group.bench_function("hex_lattice/layers3", |b| b.iter(|| generate::hex_lattice(black_box(3), 2.0 * PI / 3.0)));
    group.finish();
}

criterion_group!(benches, two_circle, assembly, runs);
criterion_main!(benches);
