//! Coefficients of the reduced Newton equations: inertia, the quadratic terms
//! Γ_g and Γ_a, the skew coupling matrices 𝓑[u] and B*, the vortical forcing
//! D and D*, the energy, and the Lamb identity residual.

mod forcing;
mod inertia;
mod lamb;
mod matrices;

pub use forcing::{cal_d, cal_d_from, cal_d_star, cal_d_star_from, rigid_velocity};
pub use inertia::{gamma_g, InertiaSpec, ScalingMode};
pub use lamb::{lamb_residual, lamb_terms, LambTerms, VolumeNode};
pub use matrices::{bstar_matrix, cal_b_matrix, gamma_a, total_energy, CoefficientSet};
