//! Exterior Neumann problem on the tube surface: dense single-layer collocation,
//! Kirchhoff potentials and added mass, the harmonic circulation field and the
//! reflection of free vorticity.

pub mod cache;
mod harmonic;
mod kirchhoff;
mod quadrature;
mod reflection;
mod solver;

use std::sync::Arc;

pub use harmonic::{harmonic_field, HarmonicField, FILAMENT_REFINEMENT};
pub use kirchhoff::{kirchhoff_data, kirchhoff_system, KirchhoffSet};
pub use quadrature::{LayerKernel, PanelRules};
pub use reflection::{reflection_field, ReflectionField, SEPARATION_FACTOR};
pub use solver::{assemble, field_scale, tangential_gradient, NeumannSolver, PotentialSample, TOL_COMPAT};

use crate::error::Result;
use crate::field::SurfaceDensity;
use crate::geometry::TubeMesh;

/// Assembles a solver on `mesh` and solves one Neumann problem.
pub fn solve_exterior_neumann(mesh: Arc<TubeMesh>, g: &[f64]) -> Result<SurfaceDensity> {
    NeumannSolver::new(mesh)?.solve(g)
}
