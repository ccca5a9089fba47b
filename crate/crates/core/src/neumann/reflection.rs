//! Reflection field u_ref = ∇φ_ref restoring impermeability against K[ω].

use std::sync::Arc;

use super::solver::{field_scale, NeumannSolver};
use crate::error::{FilamentError, Result};
use crate::field::{FieldSample, SurfaceDensity, SurfaceField, VelocityField};
use crate::kernels::{biot_savart_particles, VortexParticleCloud};
use crate::numerics::V3;

/// Minimum distance from the vorticity to the curve, in units of ε.
pub const SEPARATION_FACTOR: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct ReflectionField {
    pub solver: Arc<NeumannSolver>,
    /// Neumann data −K[ω]·n.
    pub data: Vec<f64>,
    pub density: SurfaceDensity,
    /// Trace of K[ω] on the surface.
    pub free_trace: SurfaceField,
    /// Trace of u_ref on the surface.
    pub surface: SurfaceField,
}

pub fn reflection_field(solver: Arc<NeumannSolver>, cloud: &VortexParticleCloud) -> Result<ReflectionField> {
    let mesh = solver.mesh().clone();
    let n = mesh.len();
    if cloud.is_empty() {
        return Ok(ReflectionField {
            solver,
            data: vec![0.0; n],
            density: SurfaceDensity { values: vec![0.0; n] },
            free_trace: SurfaceField::zeros(n),
            surface: SurfaceField::zeros(n),
        });
    }
    let floor = SEPARATION_FACTOR * mesh.eps;
    let distance = cloud.min_distance_to_curve(&mesh.curve);
    if distance < floor {
        return Err(FilamentError::SupportTooClose { distance, floor });
    }
    let free_trace =
        SurfaceField { vectors: mesh.panels.iter().map(|p| biot_savart_particles(cloud, &p.centroid, false).value).collect() };
    let data: Vec<f64> = free_trace.vectors.iter().zip(&mesh.panels).map(|(v, p)| -v.dot(&p.normal)).collect();
    let density = solver.solve_with_scale(&data, field_scale(&mesh, &free_trace))?;
    let surface = solver.surface_gradient(&density, &data);
    Ok(ReflectionField { solver, data, density, free_trace, surface })
}

impl VelocityField for ReflectionField {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        let s = self.solver.evaluate(x, &[&self.density.values], want_gradient)[0];
        Ok(FieldSample { value: s.gradient, gradient: want_gradient.then_some(s.hessian) })
    }
}
