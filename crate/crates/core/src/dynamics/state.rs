//! Rigid state, pose and the joint integration vector.

use nalgebra::{Matrix3, Vector6};

use super::rk4::Axpy;
use crate::numerics::{orthonormalize, V3};

/// Body-frame velocities p = (ℓ, Ω) at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidState {
    pub p: Vector6<f64>,
    pub t: f64,
}

impl RigidState {
    pub fn linear(&self) -> V3 {
        V3::new(self.p[0], self.p[1], self.p[2])
    }

    pub fn angular(&self) -> V3 {
        V3::new(self.p[3], self.p[4], self.p[5])
    }
}

/// Lab-frame position h and orientation Q of the body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub h: V3,
    pub q: Matrix3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Pose { h: V3::zeros(), q: Matrix3::identity() }
    }
}

impl Pose {
    /// ‖QᵀQ − I‖ (max entry).
    pub fn orthonormality_defect(&self) -> f64 {
        (self.q.transpose() * self.q - Matrix3::identity()).amax()
    }

    /// Rotational inertia in the lab frame, J = Q J0 Qᵀ.
    pub fn lab_inertia(&self, j0: &Matrix3<f64>) -> Matrix3<f64> {
        self.q * j0 * self.q.transpose()
    }

    /// Projects Q back onto SO(3).
    pub fn reorthonormalized(&self) -> Pose {
        Pose { h: self.h, q: orthonormalize(&self.q) }
    }

    /// Maps a body-frame point to the lab frame.
    pub fn to_lab(&self, x: &V3) -> V3 {
        self.q * x + self.h
    }
}

/// Everything RK4 advances together: p, the pose and the particle cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub p: Vector6<f64>,
    pub h: V3,
    pub q: Matrix3<f64>,
    pub x: Vec<V3>,
    pub alpha: Vec<V3>,
}

impl Axpy for Joint {
    fn axpy(&self, a: f64, r: &Self) -> Self {
        Joint {
            p: self.p + r.p * a,
            h: self.h + r.h * a,
            q: self.q + r.q * a,
            x: self.x.iter().zip(&r.x).map(|(x, v)| x + v * a).collect(),
            alpha: self.alpha.iter().zip(&r.alpha).map(|(x, v)| x + v * a).collect(),
        }
    }
}
