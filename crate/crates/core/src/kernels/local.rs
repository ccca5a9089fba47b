//! The cross-section field H_2D and closed-form ring oracles.

use crate::error::{FilamentError, Result};
use crate::field::SurfaceField;
use crate::geometry::TubeMesh;
use crate::numerics::V3;

/// H_2D = e_θ / (2πε) at a panel centroid.
pub fn h2d(point: &V3, mesh: &TubeMesh) -> Result<V3> {
    let tol = 1e-9 * (1.0 + point.norm());
    let panel = mesh
        .panels
        .iter()
        .find(|p| (p.centroid - point).norm() <= tol)
        .ok_or(FilamentError::NotOnSurface)?;
    Ok(panel.normal.cross(&panel.tau) / (2.0 * std::f64::consts::PI * mesh.eps))
}

/// H_2D at every panel centroid.
pub fn h2d_field(mesh: &TubeMesh) -> SurfaceField {
    let s = 1.0 / (2.0 * std::f64::consts::PI * mesh.eps);
    SurfaceField { vectors: mesh.panels.iter().map(|p| p.normal.cross(&p.tau) * s).collect() }
}

/// On-axis field of a unit-circulation circular ring of radius `r` in the plane z = 0.
pub fn ring_axis_oracle(r: f64, z: f64) -> Result<V3> {
    if !(r > 0.0) {
        return Err(FilamentError::InvalidRadius(r));
    }
    Ok(V3::new(0.0, 0.0, r * r / (2.0 * (r * r + z * z).powf(1.5))))
}

/// Far-field radial component −3 r x₃ / (4|x₃|⁵) of a unit ring, as displayed in the asymptotic expansion.
pub fn ring_radial_asymptotic(r: f64, x3: f64) -> f64 {
    -3.0 * r * x3 / (4.0 * x3.abs().powi(5))
}
