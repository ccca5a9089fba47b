use std::f64::consts::PI;
use std::sync::Arc;

use filament_core::field::{SurfaceField, VelocityField};
use filament_core::geometry::{builtin_curve, TubeMesh};
use filament_core::kernels::{
    biot_savart_curve, biot_savart_particles, h2d, h2d_field, ring_axis_oracle, FilamentField, RingBlob,
    VortexParticleCloud,
};
use filament_core::numerics::loglog_slope;
use filament_core::{FilamentError, V3};
use proptest::prelude::*;

fn unit_circle(n: usize) -> filament_core::Curve {
    builtin_curve("circle R=1", n).unwrap()
}

/// Direct midpoint quadrature of the ring integral in the angle variable.
fn ring_direct(x: &V3, m: usize) -> V3 {
    let mut u = V3::zeros();
    let dphi = 2.0 * PI / m as f64;
    for k in 0..m {
        let phi = dphi * (k as f64 + 0.5);
        let y = V3::new(phi.cos(), phi.sin(), 0.0);
        let t = V3::new(-phi.sin(), phi.cos(), 0.0) * dphi;
        let r = x - y;
        u -= r.cross(&t) / (4.0 * PI * r.norm().powi(3));
    }
    u
}

#[test]
fn on_axis_field_matches_closed_form_at_2048_nodes() {
    let c = unit_circle(2048);
    for z in [0.0, 0.5, 1.0, 3.0] {
        let x = V3::new(0.0, 0.0, z);
        let exact = ring_axis_oracle(1.0, z).unwrap();
        assert!((ring_direct(&x, 20000) - exact).norm() < 1e-12);
        let u = biot_savart_curve(&c, 1.0, &x).unwrap();
        assert!((u - exact).norm() <= 1e-6 * exact.norm(), "z={z}: {u} vs {exact}");
    }
}

#[test]
fn far_field_decays_with_slope_minus_three() {
    let c = unit_circle(512);
    let dir = V3::new(1.0, 0.7, 0.4).normalize();
    let d = [25.0, 50.0, 100.0];
    let mags: Vec<f64> = d.iter().map(|&s| biot_savart_curve(&c, 1.0, &(dir * s)).unwrap().norm()).collect();
    let slope = loglog_slope(&d, &mags);
    assert!((-3.1..=-2.9).contains(&slope), "{slope}");
}

#[test]
fn filament_matches_direct_quadrature_off_axis() {
    let c = unit_circle(1024);
    let x = V3::new(0.5, 0.0, -10.0);
    let u = biot_savart_curve(&c, 1.0, &x).unwrap();
    let oracle = ring_direct(&x, 20000);
    assert!((u - oracle).norm() < 1e-9 * oracle.norm());
}

#[test]
fn evaluation_on_the_curve_is_rejected() {
    let c = unit_circle(256);
    let p = c.samples()[3];
    assert!(matches!(biot_savart_curve(&c, 1.0, &p), Err(FilamentError::SingularEvaluation(_))));
}

#[test]
fn particle_ring_approximates_filament_on_axis() {
    let ring = VortexParticleCloud::thin_ring(V3::zeros(), 1.0, 1.0, 256, 0.05).unwrap();
    let x = V3::new(0.0, 0.0, 1.0);
    let up = biot_savart_particles(&ring, &x, false).value;
    let uc = biot_savart_curve(&unit_circle(1024), 1.0, &x).unwrap();
    assert!((up - uc).norm() <= 0.05 * uc.norm());
}

#[test]
fn regularization_is_negligible_at_hundred_cores() {
    let delta = 0.01;
    let cloud = VortexParticleCloud::new(vec![V3::zeros()], vec![V3::new(0.2, -0.5, 1.0)], delta).unwrap();
    let x = V3::new(0.6, 0.0, 0.8);
    let reg = biot_savart_particles(&cloud, &x, false).value;
    let sing = -x.cross(&cloud.alphas[0]) / (4.0 * PI * x.norm().powi(3));
    assert!((reg - sing).norm() <= 1e-3 * sing.norm());
}

#[test]
fn filament_circulation_around_cross_section_is_input() {
    let c = Arc::new(builtin_curve("trefoil", 256).unwrap());
    let mesh = TubeMesh::build(c.clone(), 0.05, 128, 16).unwrap();
    let field = FilamentField::new(&c, 1.7, 8);
    let trace = SurfaceField::from_field(&mesh, &field).unwrap();
    for it in [0, 31, 100] {
        let circ = trace.cross_section_circulation(&mesh, it);
        assert!((circ - 1.7).abs() <= 1e-2 * 1.7, "{circ}");
    }
}

#[test]
fn h2d_is_tangent_with_unit_circulation() {
    let c = Arc::new(unit_circle(256));
    let mesh = TubeMesh::build(c, 0.1, 64, 16).unwrap();
    let scale = 1.0 / (2.0 * PI * 0.1);
    for p in mesh.panels.iter().step_by(37) {
        let v = h2d(&p.centroid, &mesh).unwrap();
        assert!((v.norm() - scale).abs() < 1e-12 * scale);
        assert!(v.dot(&p.normal).abs() < 1e-12 && v.dot(&p.tau).abs() < 1e-12);
    }
    let f = h2d_field(&mesh);
    assert!((f.cross_section_circulation(&mesh, 5) - 1.0).abs() < 1e-3);
    assert!(matches!(h2d(&V3::new(5.0, 0.0, 0.0), &mesh), Err(FilamentError::NotOnSurface)));
}

#[test]
fn ring_axis_oracle_decays_as_inverse_cube() {
    let z = [100.0, 200.0, 400.0];
    let v: Vec<f64> = z.iter().map(|&z| ring_axis_oracle(1.0, z).unwrap().z).collect();
    assert!((loglog_slope(&z, &v) + 3.0).abs() < 1e-3);
    assert!(matches!(ring_axis_oracle(-1.0, 0.0), Err(FilamentError::InvalidRadius(_))));
}

#[test]
fn ring_blob_has_zero_total_vorticity_and_requested_size() {
    let spec = RingBlob { center: V3::new(0.0, 0.0, -10.0), strength: -1.0, core: 1.0, particles: 2000, delta_factor: 1.5 };
    let cloud = VortexParticleCloud::ring_blob(&spec).unwrap();
    let n = cloud.len() as f64;
    assert!((n - 2000.0).abs() < 0.1 * 2000.0, "{n}");
    let scale: f64 = cloud.alphas.iter().map(|a| a.norm()).sum();
    assert!(cloud.total_vorticity().norm() < 1e-12 * scale);
    assert!(cloud.support_diameter() <= 2.0);
    let d = cloud.min_distance_to_curve(&unit_circle(256));
    assert!(d > 8.0 && d < 9.5, "{d}");
}

#[test]
fn invalid_clouds_are_rejected() {
    assert!(VortexParticleCloud::new(vec![V3::zeros()], vec![V3::z()], 0.0).is_err());
    assert!(VortexParticleCloud::new(vec![V3::new(f64::NAN, 0.0, 0.0)], vec![V3::z()], 0.1).is_err());
    assert!(VortexParticleCloud::new(vec![V3::zeros()], vec![], 0.1).is_err());
}

fn v3() -> impl Strategy<Value = V3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| V3::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn particle_gradient_is_trace_free(ys in prop::collection::vec(v3(), 1..6), als in prop::collection::vec(v3(), 6), x in v3(), delta in 0.05..1.0f64) {
        let n = ys.len();
        let cloud = VortexParticleCloud::new(ys, als[..n].to_vec(), delta).unwrap();
        let g = biot_savart_particles(&cloud, &x, true).gradient.unwrap();
        prop_assert!(g.trace().abs() <= 1e-10 * (1.0 + g.norm()));
    }

    #[test]
    fn kernel_is_odd_under_exchange(x in v3(), y in v3(), a in v3(), delta in 0.01..1.0f64) {
        let at_x = VortexParticleCloud::new(vec![y], vec![a], delta).unwrap();
        let at_y = VortexParticleCloud::new(vec![x], vec![a], delta).unwrap();
        let u = biot_savart_particles(&at_x, &x, false).value;
        let v = biot_savart_particles(&at_y, &y, false).value;
        prop_assert!((u + v).norm() <= 1e-14 * (1.0 + u.norm()));
    }

    #[test]
    fn filament_field_is_linear_in_circulation(gamma in -3.0..3.0f64, x in v3()) {
        let c = builtin_curve("ellipse", 128).unwrap();
        prop_assume!(c.distance(&x) > 0.05);
        let f = FilamentField::new(&c, 1.0, 2);
        let u1 = f.sample(&x, false).unwrap().value;
        let ug = f.scaled(gamma).sample(&x, false).unwrap().value;
        prop_assert!((ug - u1 * gamma).norm() <= 1e-12 * (1.0 + u1.norm() * gamma.abs()));
    }
}
