//! Rotation-minimizing normal frame with a uniform twist that closes it.

use super::curve::Curve;
use crate::error::{FilamentError, Result};
use crate::numerics::V3;

/// Orthonormal frame (s1, s2, τ) at every curve sample, with s1 ∧ s2 = τ.
#[derive(Debug, Clone)]
pub struct Frame {
    pub s1: Vec<V3>,
    pub s2: Vec<V3>,
    pub tau: Vec<V3>,
    /// Closure angle of the uncorrected rotation-minimizing frame, in (-π, π].
    pub holonomy: f64,
    /// Twist rate added to the rotation-minimizing frame so that it closes.
    pub twist_rate: f64,
    /// Per-interval angle correction that makes the interpolated frame continuous.
    corrections: Vec<f64>,
    spacing: f64,
}

/// Minimal rotation taking unit `from` to unit `to`, applied to `v`.
fn minimal_rotation(from: &V3, to: &V3, v: &V3) -> V3 {
    let c = from.dot(to);
    let k = from.cross(to);
    v * c + k.cross(v) + k * (k.dot(v) / (1.0 + c))
}

fn rotate_about(axis: &V3, v: &V3, angle: f64) -> V3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

/// Signed angle from `a` to `b` about `axis`.
fn signed_angle(a: &V3, b: &V3, axis: &V3) -> f64 {
    a.cross(b).dot(axis).atan2(a.dot(b))
}

impl Frame {
    /// Double-reflection rotation-minimizing frame with the closure mismatch
    /// removed as a uniform twist.
    pub fn build(curve: &Curve) -> Result<Frame> {
        if !curve.is_closed() {
            return Err(FilamentError::NotClosed);
        }
        let n = curve.len();
        let x = curve.samples();
        let tau: Vec<V3> = curve.arc_params().iter().map(|&t| curve.unit_tangent(t)).collect();
        let r0 = initial_normal(curve, &tau[0]);
        let mut r = Vec::with_capacity(n + 1);
        r.push(r0);
        for i in 0..n {
            let j = (i + 1) % n;
            r.push(double_reflection(&x[i], &x[j], &tau[i], &tau[j], &r[i]));
        }
        let holonomy = signed_angle(&r[0], &r[n], &tau[0]);
        let length = curve.length();
        let twist_rate = -holonomy / length;
        let h = curve.spacing();
        let mut s1 = Vec::with_capacity(n);
        for (i, ri) in r.iter().take(n).enumerate() {
            let v = rotate_about(&tau[i], ri, twist_rate * h * i as f64);
            s1.push((v - tau[i] * tau[i].dot(&v)).normalize());
        }
        let s2: Vec<V3> = tau.iter().zip(&s1).map(|(t, s)| t.cross(s)).collect();
        let mut frame = Frame { s1, s2, tau, holonomy, twist_rate, corrections: vec![0.0; n], spacing: h };
        frame.corrections = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                let (p, _, _) = frame.propagate(curve, i, h, 0.0);
                signed_angle(&p, &frame.s1[j], &frame.tau[j])
            })
            .collect();
        Ok(frame)
    }

    /// Frame rotated by a constant angle about τ (same curve, different s1, s2).
    pub fn rotated(&self, angle: f64) -> Frame {
        let mut f = self.clone();
        for i in 0..f.s1.len() {
            f.s1[i] = rotate_about(&f.tau[i], &self.s1[i], angle);
            f.s2[i] = f.tau[i].cross(&f.s1[i]);
        }
        f
    }

    pub fn len(&self) -> usize {
        self.s1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty()
    }

    /// Carries sample frame `i` a distance `dt` along the curve, adding
    /// `extra` radians of rotation about the tangent.
    fn propagate(&self, curve: &Curve, i: usize, dt: f64, extra: f64) -> (V3, V3, V3) {
        let t = curve.arc_params()[i] + dt;
        let tau = curve.unit_tangent(t);
        let v = minimal_rotation(&self.tau[i], &tau, &self.s1[i]);
        let v = rotate_about(&tau, &v, self.twist_rate * dt + extra);
        let s1 = (v - tau * tau.dot(&v)).normalize();
        (s1, tau.cross(&s1), tau)
    }

    /// Frame (s1, s2, τ) at an arbitrary arc parameter.
    pub fn at(&self, curve: &Curve, t: f64) -> (V3, V3, V3) {
        let n = self.s1.len();
        let h = self.spacing;
        let t = t.rem_euclid(curve.length());
        let i = ((t / h).floor() as usize).min(n - 1);
        let dt = t - curve.arc_params()[i];
        self.propagate(curve, i, dt, self.corrections[i] * dt / h)
    }

    /// Twist s1'·s2 at `t`, by central differences of the interpolated frame.
    pub fn twist_at(&self, curve: &Curve, t: f64) -> f64 {
        let d = 1e-5 * self.spacing;
        let (a, _, _) = self.at(curve, t + d);
        let (b, _, _) = self.at(curve, t - d);
        let (_, s2, _) = self.at(curve, t);
        (a - b).dot(&s2) / (2.0 * d)
    }

    /// Largest orthonormality defect over the samples.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.s1.len() {
            let (a, b, c) = (&self.s1[i], &self.s2[i], &self.tau[i]);
            for v in [a.dot(b), a.dot(c), b.dot(c), a.norm() - 1.0, b.norm() - 1.0, c.norm() - 1.0] {
                worst = worst.max(v.abs());
            }
            worst = worst.max((a.cross(b) - c).norm());
        }
        worst
    }
}

/// Principal normal at the start if the curvature is resolvable, else any
/// unit vector perpendicular to the tangent.
fn initial_normal(curve: &Curve, tau: &V3) -> V3 {
    let k = curve.second_derivative(0.0);
    let kp = k - tau * tau.dot(&k);
    if kp.norm() > 1e-8 {
        return kp.normalize();
    }
    let trial = if tau.x.abs() < 0.9 { V3::x() } else { V3::y() };
    (trial - tau * tau.dot(&trial)).normalize()
}

fn double_reflection(xi: &V3, xj: &V3, ti: &V3, tj: &V3, ri: &V3) -> V3 {
    let v1 = xj - xi;
    let c1 = v1.dot(&v1);
    let rl = ri - v1 * (2.0 / c1 * v1.dot(ri));
    let tl = ti - v1 * (2.0 / c1 * v1.dot(ti));
    let v2 = tj - tl;
    let c2 = v2.dot(&v2);
    if c2 < 1e-300 {
        return rl;
    }
    rl - v2 * (2.0 / c2 * v2.dot(&rl))
}
