//! Kirchhoff potentials of the six rigid modes and the added-mass matrix.

use std::sync::Arc;

use nalgebra::Matrix6;

use super::solver::{field_scale, NeumannSolver};
use crate::error::Result;
use crate::field::{SurfaceDensity, SurfaceField};
use crate::numerics::{zeta, Compensated};

/// Solutions Φ_i of ∂ₙΦ_i = ζ_i·n, i = 1..6, on one mesh.
#[derive(Debug, Clone)]
pub struct KirchhoffSet {
    pub solver: Arc<NeumannSolver>,
    /// Neumann data K_i at the collocation points.
    pub data: Vec<Vec<f64>>,
    pub densities: Vec<SurfaceDensity>,
    /// Φ_i at the collocation points.
    pub potentials: Vec<Vec<f64>>,
    /// ∇Φ_i on the surface.
    pub surface_gradients: Vec<SurfaceField>,
    /// Symmetrized added mass ∫ Φ_i ∂ₙΦ_j dσ.
    pub ma: Matrix6<f64>,
    /// Largest |Ma_ij − Ma_ji| of the raw boundary form, relative to ‖Ma‖.
    pub asymmetry: f64,
}

/// Neumann data K_i = ζ_i·n at every collocation point.
pub fn kirchhoff_data(solver: &NeumannSolver) -> Vec<Vec<f64>> {
    let mesh = solver.mesh();
    (0..6)
        .map(|i| mesh.panels.iter().map(|p| zeta(&p.centroid)[i].dot(&p.normal)).collect())
        .collect()
}

pub fn kirchhoff_system(solver: Arc<NeumannSolver>) -> Result<KirchhoffSet> {
    let data = kirchhoff_data(&solver);
    let mesh = solver.mesh();
    let densities = (0..6)
        .map(|i| {
            let modes = SurfaceField { vectors: mesh.panels.iter().map(|p| zeta(&p.centroid)[i]).collect() };
            solver.solve_with_scale(&data[i], field_scale(mesh, &modes))
        })
        .collect::<Result<Vec<_>>>()?;
    let potentials: Vec<Vec<f64>> = densities.iter().map(|d| solver.surface_potential(d)).collect();
    let surface_gradients = densities.iter().zip(&data).map(|(d, g)| solver.surface_gradient(d, g)).collect();
    let mut raw = Matrix6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            let mut acc = Compensated::default();
            for (k, p) in mesh.panels.iter().enumerate() {
                acc.add(potentials[i][k] * data[j][k] * p.area);
            }
            raw[(i, j)] = acc.value();
        }
    }
    let ma = (raw + raw.transpose()) * 0.5;
    let asymmetry = (raw - raw.transpose()).amax() / ma.norm().max(f64::MIN_POSITIVE);
    Ok(KirchhoffSet { solver, data, densities, potentials, surface_gradients, ma, asymmetry })
}

impl KirchhoffSet {
    pub fn density_slices(&self) -> Vec<&[f64]> {
        self.densities.iter().map(|d| d.values.as_slice()).collect()
    }
}
