//! The circulation-one harmonic field H^ε = K[κ] + ∇φ̃ with ∂ₙφ̃ = −K[κ]·n.

use std::sync::Arc;

use super::solver::{field_scale, NeumannSolver};
use crate::error::Result;
use crate::field::{FieldSample, SurfaceDensity, SurfaceField, VelocityField};
use crate::kernels::FilamentField;
use crate::numerics::V3;

/// Filament nodes per mesh interval along the curve.
pub const FILAMENT_REFINEMENT: usize = 8;

#[derive(Debug, Clone)]
pub struct HarmonicField {
    pub solver: Arc<NeumannSolver>,
    pub filament: FilamentField,
    /// Neumann data −K[κ]·n.
    pub data: Vec<f64>,
    pub density: SurfaceDensity,
    /// Trace of H^ε on the surface.
    pub surface: SurfaceField,
    /// Trace of K[κ] alone.
    pub filament_trace: SurfaceField,
}

pub fn harmonic_field(solver: Arc<NeumannSolver>) -> Result<HarmonicField> {
    let mesh = solver.mesh().clone();
    let filament = FilamentField::with_nodes(&mesh.curve, 1.0, FILAMENT_REFINEMENT * mesh.nt);
    let filament_trace = SurfaceField::from_field(&mesh, &filament)?;
    let data: Vec<f64> = filament_trace.vectors.iter().zip(&mesh.panels).map(|(v, p)| -v.dot(&p.normal)).collect();
    let density = solver.solve_with_scale(&data, field_scale(&mesh, &filament_trace))?;
    let correction = solver.surface_gradient(&density, &data);
    let surface = filament_trace.add(&correction);
    Ok(HarmonicField { solver, filament, data, density, surface, filament_trace })
}

impl HarmonicField {
    /// Gradient part ∇φ̃ at an off-surface point.
    pub fn correction(&self, x: &V3, want_gradient: bool) -> FieldSample {
        let s = self.solver.evaluate(x, &[&self.density.values], want_gradient)[0];
        FieldSample { value: s.gradient, gradient: want_gradient.then_some(s.hessian) }
    }
}

impl VelocityField for HarmonicField {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        let k = self.filament.sample(x, want_gradient)?;
        let c = self.correction(x, want_gradient);
        Ok(FieldSample {
            value: k.value + c.value,
            gradient: k.gradient.zip(c.gradient).map(|(a, b)| a + b),
        })
    }
}
