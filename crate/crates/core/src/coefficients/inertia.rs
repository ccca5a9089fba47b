use nalgebra::{Matrix3, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{FilamentError, Result};
use crate::numerics::V3;

/// Whether the body inertia is fixed or scales with the cross-section area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    #[default]
    Massive,
    /// m̃ = ε² m, J̃ = ε² J0.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaSpec {
    pub m: f64,
    pub j0: Matrix3<f64>,
    pub scaling: ScalingMode,
}

impl InertiaSpec {
    pub fn new(m: f64, j0: Matrix3<f64>, scaling: ScalingMode) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(FilamentError::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        if (j0 - j0.transpose()).amax() > 1e-12 * j0.amax().max(1.0) {
            return Err(FilamentError::InvalidArgument("rotational inertia is not symmetric".into()));
        }
        let min_eig = j0.symmetric_eigenvalues().min();
        if !(min_eig > 0.0) {
            return Err(FilamentError::InvalidArgument(format!("rotational inertia not positive definite (min eigenvalue {min_eig})")));
        }
        Ok(InertiaSpec { m, j0, scaling })
    }

    /// m = 1, J0 = I, massive.
    pub fn unit() -> Self {
        InertiaSpec { m: 1.0, j0: Matrix3::identity(), scaling: ScalingMode::Massive }
    }

    /// The massive spec actually used at tube radius `eps`.
    pub fn at_eps(&self, eps: f64) -> InertiaSpec {
        match self.scaling {
            ScalingMode::Massive => *self,
            ScalingMode::Density => {
                let s = eps * eps;
                InertiaSpec { m: self.m * s, j0: self.j0 * s, scaling: ScalingMode::Massive }
            }
        }
    }

    /// Block-diagonal (m I₃, J0).
    pub fn mg(&self) -> Matrix6<f64> {
        let mut mg = Matrix6::zeros();
        mg.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() * self.m));
        mg.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.j0);
        mg
    }
}

/// ⟨Γ_g, p, p⟩ = −(m ℓ∧Ω, (J0Ω)∧Ω).
pub fn gamma_g(inertia: &InertiaSpec, p: &Vector6<f64>) -> Vector6<f64> {
    let l = V3::new(p[0], p[1], p[2]);
    let w = V3::new(p[3], p[4], p[5]);
    let a = -l.cross(&w) * inertia.m;
    let b = -(inertia.j0 * w).cross(&w);
    Vector6::new(a.x, a.y, a.z, b.x, b.y, b.z)
}
