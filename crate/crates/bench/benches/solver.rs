use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use filament_core::coefficients::{cal_b_matrix, CoefficientSet, InertiaSpec};
use filament_core::dynamics::{step_rk4, DynamicsSettings, FlowModel, SimState};
use filament_core::geometry::{builtin_curve, TubeMesh};
use filament_core::kernels::{h2d_field, RingBlob, VortexParticleCloud};
use filament_core::neumann::{kirchhoff_system, NeumannSolver};
use filament_core::V3;
use nalgebra::Vector6;

fn geometry(c: &mut Criterion) {
    c.bench_function("curve_circle_1024", |b| b.iter(|| builtin_curve(black_box("circle R=1"), 1024).unwrap()));
    let curve = Arc::new(builtin_curve("trefoil", 1024).unwrap());
    c.bench_function("mesh_trefoil_128x16", |b| b.iter(|| TubeMesh::build(curve.clone(), 0.05, 128, 16).unwrap()));
}

fn boundary_elements(c: &mut Criterion) {
    let curve = Arc::new(builtin_curve("circle R=1", 512).unwrap());
    let mesh = Arc::new(TubeMesh::build(curve, 0.1, 64, 8).unwrap());
    let mut g = c.benchmark_group("bem_64x8");
    g.sample_size(10);
    g.bench_function("assemble_and_factor", |b| b.iter(|| NeumannSolver::new(mesh.clone()).unwrap()));
    let solver = Arc::new(NeumannSolver::new(mesh.clone()).unwrap());
    g.bench_function("kirchhoff_system", |b| b.iter(|| kirchhoff_system(solver.clone()).unwrap()));
    let h = h2d_field(&mesh);
    g.bench_function("coupling_matrix", |b| b.iter(|| cal_b_matrix(&mesh, black_box(&h))));
    g.finish();
}

fn particles(c: &mut Criterion) {
    let spec = RingBlob { center: V3::new(0.0, 0.0, -10.0), strength: -1.0, core: 1.0, particles: 1000, delta_factor: 1.5 };
    let cloud = VortexParticleCloud::ring_blob(&spec).unwrap();
    let mut g = c.benchmark_group("particles_1000");
    g.sample_size(10);
    g.bench_function("self_field_with_gradient", |b| b.iter(|| cloud.self_field(true)));
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let curve = Arc::new(builtin_curve("trefoil", 256).unwrap());
    let model = Arc::new(FlowModel::limit(curve.clone()));
    let coeffs = Arc::new(CoefficientSet::limit(&InertiaSpec::unit(), &curve));
    let p0 = Vector6::new(0.3, -0.2, 0.5, 0.1, 0.4, -0.3);
    let state =
        SimState::new(model.clone(), coeffs, 1.0, p0, VortexParticleCloud::empty(0.1), DynamicsSettings::for_model(&model)).unwrap();
    c.bench_function("limit_rk4_step", |b| b.iter(|| step_rk4(black_box(&state), 1e-3).unwrap()));
}

criterion_group!(benches, geometry, boundary_elements, particles, dynamics);
criterion_main!(benches);
