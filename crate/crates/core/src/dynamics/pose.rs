//! Lab-frame pose from body-frame velocities, and the lab-frame limit system.

use nalgebra::{Matrix3, Vector6};

use super::rk4::{rk4, Axpy};
use super::state::Pose;
use crate::coefficients::InertiaSpec;
use crate::error::{FilamentError, Result};
use crate::geometry::{area_volume_vectors, Curve};
use crate::numerics::{cross_matrix, orthonormalize, V3};

impl Axpy for Pose {
    fn axpy(&self, a: f64, r: &Self) -> Self {
        Pose { h: self.h + r.h * a, q: self.q + r.q * a }
    }
}

/// Cubic Lagrange value at `t` through four samples.
fn lagrange4(ts: [f64; 4], ys: [Vector6<f64>; 4], t: f64) -> Vector6<f64> {
    let mut out = Vector6::zeros();
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (t - ts[j]) / (ts[i] - ts[j]);
            }
        }
        out += ys[i] * w;
    }
    out
}

/// Integrates Q′ = Q[Ω]×, h′ = Qℓ from the identity pose through sampled p(t).
/// Midpoint values come from cubic interpolation, so the result is fourth order
/// in the sampling interval. Q is projected back onto SO(3) after every interval.
pub fn reconstruct_pose(times: &[f64], ps: &[Vector6<f64>]) -> Result<Vec<Pose>> {
    let n = times.len();
    if n != ps.len() || n == 0 {
        return Err(FilamentError::InvalidArgument("times and velocities must be non-empty and equally long".into()));
    }
    if n < 4 && n > 1 {
        return Err(FilamentError::InvalidArgument("at least four samples are needed".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut pose = Pose::default();
    out.push(pose);
    for k in 0..n.saturating_sub(1) {
        let dt = times[k + 1] - times[k];
        let base = k.saturating_sub(1).min(n - 4);
        let ts = [times[base], times[base + 1], times[base + 2], times[base + 3]];
        let ys = [ps[base], ps[base + 1], ps[base + 2], ps[base + 3]];
        let mid = lagrange4(ts, ys, times[k] + 0.5 * dt);
        pose = rk4(&pose, dt, |s, y| {
            let p = if s == 0.0 {
                ps[k]
            } else if s == dt {
                ps[k + 1]
            } else {
                mid
            };
            Ok(body_rate(y, &p))
        })?
        .reorthonormalized();
        out.push(pose);
    }
    Ok(out)
}

fn body_rate(pose: &Pose, p: &Vector6<f64>) -> Pose {
    let l = V3::new(p[0], p[1], p[2]);
    let w = V3::new(p[3], p[4], p[5]);
    Pose { h: pose.q * l, q: pose.q * cross_matrix(&w) }
}

/// State of the lab-frame limit system: position, velocity, orientation and
/// angular momentum 𝒥R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabState {
    pub h: V3,
    pub v: V3,
    pub q: Matrix3<f64>,
    pub momentum: V3,
}

impl Axpy for LabState {
    fn axpy(&self, a: f64, r: &Self) -> Self {
        LabState { h: self.h + r.h * a, v: self.v + r.v * a, q: self.q + r.q * a, momentum: self.momentum + r.momentum * a }
    }
}

impl LabState {
    /// Lab state for body-frame velocities p at the identity pose.
    pub fn from_body(inertia: &InertiaSpec, p: &Vector6<f64>) -> LabState {
        let l = V3::new(p[0], p[1], p[2]);
        let w = V3::new(p[3], p[4], p[5]);
        LabState { h: V3::zeros(), v: l, q: Matrix3::identity(), momentum: inertia.j0 * w }
    }

    /// Lab angular velocity R = 𝒥⁻¹(𝒥R) with 𝒥 = Q J0 Qᵀ.
    pub fn angular_velocity(&self, inertia: &InertiaSpec) -> V3 {
        let j = self.q * inertia.j0 * self.q.transpose();
        j.try_inverse().unwrap_or_else(Matrix3::zeros) * self.momentum
    }

    /// Body-frame p = (Qᵀh′, QᵀR).
    pub fn body_velocities(&self, inertia: &InertiaSpec) -> Vector6<f64> {
        let l = self.q.transpose() * self.v;
        let w = self.q.transpose() * self.angular_velocity(inertia);
        Vector6::new(l.x, l.y, l.z, w.x, w.y, w.z)
    }
}

/// Area and volume vectors of the moved curve, taken about the current center h.
pub fn moved_area_volume(curve: &Curve, q: &Matrix3<f64>) -> (V3, V3) {
    area_volume_vectors(&curve.transformed(q, &V3::zeros()))
}

/// m h″ = μ𝒜∧R, (𝒥R)′ = μ𝒜∧h′ + μ𝒱∧R, Q′ = [R]×Q.
pub fn lab_limit_rate(inertia: &InertiaSpec, curve: &Curve, mu: f64, s: &LabState) -> LabState {
    let (a, v) = moved_area_volume(curve, &s.q);
    let r = s.angular_velocity(inertia);
    LabState {
        h: s.v,
        v: a.cross(&r) * (mu / inertia.m),
        q: cross_matrix(&r) * s.q,
        momentum: (a.cross(&s.v) + v.cross(&r)) * mu,
    }
}

/// Integrates the lab-frame limit system with fixed-step RK4; returns the state at
/// every step, starting with `s0`.
pub fn integrate_lab_limit(inertia: &InertiaSpec, curve: &Curve, mu: f64, s0: LabState, dt: f64, steps: usize) -> Result<Vec<LabState>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(s);
    for _ in 0..steps {
        s = rk4(&s, dt, |_, y| Ok(lab_limit_rate(inertia, curve, mu, y)))?;
        s.q = orthonormalize(&s.q);
        out.push(s);
    }
    Ok(out)
}
