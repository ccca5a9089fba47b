//! Velocity models for the body-frame system and the stage right-hand side.

use std::sync::Arc;

use nalgebra::{Matrix3, Matrix6, Vector6};

use super::state::Joint;
use crate::coefficients::{cal_b_matrix, cal_d_from, cal_d_star_from, gamma_a, gamma_g, rigid_velocity, CoefficientSet};
use crate::error::{FilamentError, Result};
use crate::field::VelocityField;
use crate::geometry::Curve;
use crate::kernels::{FilamentField, VortexParticleCloud};
use crate::neumann::{reflection_field, HarmonicField, KirchhoffSet, ReflectionField};
use crate::numerics::{cross_matrix, V3};

/// Limit-mode separation floor as a fraction of the curve length.
pub const LIMIT_SEPARATION_FRACTION: f64 = 0.05;

/// Where the fluid velocity comes from.
pub enum FlowModel {
    /// Zero-radius filament: u = μK[κ] + K[ω].
    Limit { curve: Arc<Curve>, filament: FilamentField },
    /// Tube of radius ε: u = μH^ε + Σ p_i∇Φ_i + K[ω] + u_ref[ω].
    Eps { kirchhoff: Arc<KirchhoffSet>, harmonic: Arc<HarmonicField> },
    /// A fixed body-frame velocity field; particles do not induce velocity.
    Prescribed { curve: Arc<Curve>, field: Arc<dyn VelocityField> },
}

impl std::fmt::Debug for FlowModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowModel::Limit { curve, .. } => write!(f, "Limit(L = {})", curve.length()),
            FlowModel::Eps { kirchhoff, .. } => write!(f, "Eps({})", kirchhoff.solver.mesh().eps),
            FlowModel::Prescribed { .. } => write!(f, "Prescribed"),
        }
    }
}

impl FlowModel {
    /// Limit model with one filament node per curve sample.
    pub fn limit(curve: Arc<Curve>) -> FlowModel {
        let filament = FilamentField::with_nodes(&curve, 1.0, curve.len());
        FlowModel::Limit { curve, filament }
    }

    pub fn eps(kirchhoff: Arc<KirchhoffSet>, harmonic: Arc<HarmonicField>) -> FlowModel {
        FlowModel::Eps { kirchhoff, harmonic }
    }

    pub fn curve(&self) -> &Arc<Curve> {
        match self {
            FlowModel::Limit { curve, .. } | FlowModel::Prescribed { curve, .. } => curve,
            FlowModel::Eps { kirchhoff, .. } => &kirchhoff.solver.mesh().curve,
        }
    }

    pub fn eps_value(&self) -> Option<f64> {
        match self {
            FlowModel::Eps { kirchhoff, .. } => Some(kirchhoff.solver.mesh().eps),
            _ => None,
        }
    }

    /// 3ε for a tube, 0.05·L for the limit filament, 0 for a prescribed flow.
    pub fn default_separation_floor(&self) -> f64 {
        match self {
            FlowModel::Limit { curve, .. } => LIMIT_SEPARATION_FRACTION * curve.length(),
            FlowModel::Eps { kirchhoff, .. } => crate::neumann::SEPARATION_FACTOR * kirchhoff.solver.mesh().eps,
            FlowModel::Prescribed { .. } => 0.0,
        }
    }

    /// Checks that `coeffs` were built for this model.
    pub fn check_coefficients(&self, coeffs: &CoefficientSet) -> Result<()> {
        let ok = match (self, coeffs.eps) {
            (FlowModel::Eps { kirchhoff, .. }, Some(e)) => e == kirchhoff.solver.mesh().eps,
            (FlowModel::Eps { .. }, None) | (_, Some(_)) => false,
            (_, None) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(FilamentError::InvalidArgument(format!("coefficient set (eps = {:?}) does not match the flow model {self:?}", coeffs.eps)))
        }
    }
}

/// Stage quantities kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StageForces {
    /// D (tube) or D* (limit); zero without vorticity.
    pub d: Vector6<f64>,
    /// 𝓑[K_F[ω]] in tube mode, zero otherwise.
    pub b_vortical: Matrix6<f64>,
}

/// Fluid velocity and its gradient at every particle, plus the forcing terms.
struct ParticleSample {
    u: Vec<V3>,
    grad: Vec<Matrix3<f64>>,
    forces: StageForces,
}

/// Inputs that stay fixed over one stage evaluation.
pub(crate) struct StageContext<'a> {
    pub model: &'a FlowModel,
    pub coeffs: &'a CoefficientSet,
    pub mu: f64,
    pub delta: f64,
    pub separation_floor: f64,
    pub axial_only: bool,
    /// Reflection field held fixed over the step; `None` re-solves it at this stage.
    pub frozen_reflection: Option<&'a ReflectionField>,
}

/// p′ from (Mg + Ma)p′ = −Γ_g − Γ_a + μBp + 𝓑[K_F[ω]]p + D.
/// With `axial_only`, only the third row is solved, (Mg + Ma)₃₃ p₃′ = rhs₃.
pub(crate) fn solve_rigid(
    coeffs: &CoefficientSet,
    mu: f64,
    p: &Vector6<f64>,
    forces: &StageForces,
    axial_only: bool,
) -> Result<Vector6<f64>> {
    let rhs = -gamma_g(&coeffs.inertia, p) - gamma_a(coeffs, p) + coeffs.b * p * mu + forces.b_vortical * p + forces.d;
    if axial_only {
        let m33 = coeffs.total_inertia()[(2, 2)];
        return Ok(Vector6::new(0.0, 0.0, rhs[2] / m33, 0.0, 0.0, 0.0));
    }
    let chol = coeffs
        .total_inertia()
        .cholesky()
        .ok_or_else(|| FilamentError::SolverFailure("total inertia is not positive definite".into()))?;
    Ok(chol.solve(&rhs))
}

impl StageContext<'_> {
    fn cloud_of(&self, y: &Joint) -> VortexParticleCloud {
        VortexParticleCloud { positions: y.x.clone(), alphas: y.alpha.clone(), delta: self.delta }
    }

    pub(crate) fn check_separation(&self, cloud: &VortexParticleCloud) -> Result<()> {
        if cloud.is_empty() || self.separation_floor <= 0.0 {
            return Ok(());
        }
        let distance = cloud.min_distance_to_curve(self.model.curve());
        if distance < self.separation_floor {
            return Err(FilamentError::SupportTooClose { distance, floor: self.separation_floor });
        }
        Ok(())
    }

    /// Fluid velocity, its gradient and the forcing at the particles of `y`.
    fn sample_particles(&self, y: &Joint, cloud: &VortexParticleCloud, rigid: bool) -> Result<ParticleSample> {
        let n = cloud.len();
        let mut forces = StageForces { d: Vector6::zeros(), b_vortical: Matrix6::zeros() };
        match self.model {
            FlowModel::Prescribed { field, .. } => {
                let (mut u, mut grad) = (Vec::with_capacity(n), Vec::with_capacity(n));
                for x in &cloud.positions {
                    let s = field.sample(x, true)?;
                    u.push(s.value);
                    grad.push(s.gradient.unwrap_or_else(Matrix3::zeros));
                }
                if rigid {
                    forces.d = cal_d_star_from(cloud, &u);
                }
                Ok(ParticleSample { u, grad, forces })
            }
            FlowModel::Limit { filament, .. } => {
                let own = cloud.self_field(true);
                let (mut u, mut grad) = (Vec::with_capacity(n), Vec::with_capacity(n));
                for (x, s) in cloud.positions.iter().zip(own) {
                    let k = filament.sample(x, true)?;
                    u.push(s.value + k.value * self.mu);
                    grad.push(s.gradient.unwrap() + k.gradient.unwrap() * self.mu);
                }
                if rigid {
                    forces.d = cal_d_star_from(cloud, &u);
                }
                Ok(ParticleSample { u, grad, forces })
            }
            FlowModel::Eps { kirchhoff, harmonic } => {
                let solved;
                let reflection = match self.frozen_reflection {
                    Some(r) => r,
                    None => {
                        solved = reflection_field(kirchhoff.solver.clone(), cloud)?;
                        &solved
                    }
                };
                // One layer pass: the six Kirchhoff densities for D, and the combined
                // density μσ_H + Σ p_i σ_i + σ_ref for the rest of the velocity.
                let m = kirchhoff.solver.mesh().len();
                let combined: Vec<f64> = (0..m)
                    .map(|j| {
                        let mut s = self.mu * harmonic.density.values[j] + reflection.density.values[j];
                        for (i, d) in kirchhoff.densities.iter().enumerate() {
                            s += y.p[i] * d.values[j];
                        }
                        s
                    })
                    .collect();
                let mut slices = kirchhoff.density_slices();
                slices.push(&combined);
                let own = cloud.self_field(true);
                let (mut u, mut grad) = (Vec::with_capacity(n), Vec::with_capacity(n));
                let mut grad_phi = Vec::with_capacity(n);
                for (x, s) in cloud.positions.iter().zip(own) {
                    let layer = kirchhoff.solver.evaluate(x, &slices, true);
                    let k = harmonic.filament.sample(x, true)?;
                    u.push(s.value + k.value * self.mu + layer[6].gradient);
                    grad.push(s.gradient.unwrap() + k.gradient.unwrap() * self.mu + layer[6].hessian);
                    grad_phi.push(std::array::from_fn(|i| layer[i].gradient));
                }
                if rigid {
                    forces.d = cal_d_from(cloud, &y.p, &u, Some(&grad_phi));
                    let mesh = kirchhoff.solver.mesh();
                    forces.b_vortical = cal_b_matrix(mesh, &reflection.free_trace.add(&reflection.surface));
                }
                Ok(ParticleSample { u, grad, forces })
            }
        }
    }

    /// Time derivative of the joint state. With `rigid = false`, p and the pose are held fixed.
    pub(crate) fn rates(&self, y: &Joint, rigid: bool) -> Result<(Joint, StageForces)> {
        let omega = V3::new(y.p[3], y.p[4], y.p[5]);
        let (mut dx, mut dalpha) = (Vec::new(), Vec::new());
        let mut forces = StageForces { d: Vector6::zeros(), b_vortical: Matrix6::zeros() };
        if !y.x.is_empty() {
            let cloud = self.cloud_of(y);
            self.check_separation(&cloud)?;
            let sample = self.sample_particles(y, &cloud, rigid)?;
            dx = y.x.iter().zip(&sample.u).map(|(x, u)| u - rigid_velocity(&y.p, x)).collect();
            dalpha = y.alpha.iter().zip(&sample.grad).map(|(a, g)| g * a - omega.cross(a)).collect();
            forces = sample.forces;
        }
        let (dp, dh, dq) = if rigid {
            let dp = solve_rigid(self.coeffs, self.mu, &y.p, &forces, self.axial_only)?;
            (dp, y.q * V3::new(y.p[0], y.p[1], y.p[2]), y.q * cross_matrix(&omega))
        } else {
            (Vector6::zeros(), V3::zeros(), Matrix3::zeros())
        };
        Ok((Joint { p: dp, h: dh, q: dq, x: dx, alpha: dalpha }, forces))
    }
}
