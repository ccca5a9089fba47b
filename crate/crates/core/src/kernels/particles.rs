//! Regularized vortex particles (Rosenhead-Moore kernel).

use nalgebra::Matrix3;

use crate::error::{FilamentError, Result};
use crate::field::{FieldSample, VelocityField};
use crate::geometry::Curve;
use crate::numerics::{cross_matrix, V3};

const INV_FOUR_PI: f64 = 0.25 / std::f64::consts::PI;

/// Particles at `positions` carrying vector weights α = ω·volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexParticleCloud {
    pub positions: Vec<V3>,
    pub alphas: Vec<V3>,
    pub delta: f64,
}

/// Axisymmetric vortex blob ω = s·η(|x−c|/a)·(x₂−c₂, −(x₁−c₁), 0) with η(ρ) = (1−ρ²)³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingBlob {
    pub center: V3,
    pub strength: f64,
    /// Support radius a.
    pub core: f64,
    /// Approximate number of particles.
    pub particles: usize,
    /// Regularization radius as a multiple of the grid spacing.
    pub delta_factor: f64,
}

/// Profile η(ρ) = (1 − ρ²)³ on the unit ball.
pub fn blob_profile(rho: f64) -> f64 {
    if rho >= 1.0 {
        0.0
    } else {
        (1.0 - rho * rho).powi(3)
    }
}

impl VortexParticleCloud {
    pub fn new(positions: Vec<V3>, alphas: Vec<V3>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(FilamentError::InvalidArgument(format!("core radius must be positive, got {delta}")));
        }
        if positions.len() != alphas.len() {
            return Err(FilamentError::InvalidArgument("positions and weights differ in length".into()));
        }
        if positions.iter().chain(&alphas).any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(FilamentError::InvalidArgument("non-finite particle data".into()));
        }
        Ok(VortexParticleCloud { positions, alphas, delta })
    }

    pub fn empty(delta: f64) -> Self {
        VortexParticleCloud { positions: Vec::new(), alphas: Vec::new(), delta }
    }

    /// Cell-centred grid discretization of a [`RingBlob`].
    pub fn ring_blob(spec: &RingBlob) -> Result<Self> {
        if !(spec.core > 0.0) || spec.particles == 0 {
            return Err(FilamentError::InvalidArgument("ring blob needs a positive core and particle count".into()));
        }
        let a = spec.core;
        let h = a * (4.0 * std::f64::consts::PI / (3.0 * spec.particles as f64)).cbrt();
        let k = (a / h).ceil() as i64;
        let vol = h * h * h;
        let (mut pos, mut alp) = (Vec::new(), Vec::new());
        for i in -k..k {
            for j in -k..k {
                for l in -k..k {
                    let y = V3::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (l as f64 + 0.5) * h);
                    let eta = blob_profile(y.norm() / a);
                    if eta <= 0.0 {
                        continue;
                    }
                    pos.push(spec.center + y);
                    alp.push(V3::new(y.y, -y.x, 0.0) * (spec.strength * eta * vol));
                }
            }
        }
        VortexParticleCloud::new(pos, alp, spec.delta_factor * h)
    }

    /// `n` particles on a circle of radius `radius` about the e3 axis through `center`,
    /// carrying circulation `circulation` counter-clockwise.
    pub fn thin_ring(center: V3, radius: f64, circulation: f64, n: usize, delta: f64) -> Result<Self> {
        let ds = 2.0 * std::f64::consts::PI * radius / n as f64;
        let (mut pos, mut alp) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            pos.push(center + V3::new(radius * a.cos(), radius * a.sin(), 0.0));
            alp.push(V3::new(-a.sin(), a.cos(), 0.0) * (circulation * ds));
        }
        VortexParticleCloud::new(pos, alp, delta)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_vorticity(&self) -> V3 {
        self.alphas.iter().sum()
    }

    pub fn centroid(&self) -> V3 {
        if self.is_empty() {
            return V3::zeros();
        }
        self.positions.iter().sum::<V3>() / self.len() as f64
    }

    /// Upper bound on the support diameter: twice the largest distance from the centroid.
    pub fn support_diameter(&self) -> f64 {
        let c = self.centroid();
        2.0 * self.positions.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
    }

    /// Smallest particle distance to the curve (∞ for an empty cloud).
    pub fn min_distance_to_curve(&self, curve: &Curve) -> f64 {
        let samples = curve.samples();
        let mut best = f64::INFINITY;
        let mut best_point = V3::zeros();
        for p in &self.positions {
            for s in samples {
                let d = (p - s).norm_squared();
                if d < best {
                    best = d;
                    best_point = *p;
                }
            }
        }
        if best.is_infinite() {
            return best;
        }
        curve.distance(&best_point).min(best.sqrt())
    }

    /// Velocity (and gradient) induced at every particle, using pair symmetry.
    pub fn self_field(&self, want_gradient: bool) -> Vec<FieldSample> {
        let n = self.len();
        let d2 = self.delta * self.delta;
        let mut u = vec![V3::zeros(); n];
        let mut g = vec![Matrix3::zeros(); if want_gradient { n } else { 0 }];
        let self_grad = 1.0 / (d2 * self.delta);
        for k in 0..n {
            let (yk, ak) = (self.positions[k], self.alphas[k]);
            if want_gradient {
                g[k] += cross_matrix(&ak) * self_grad;
            }
            for l in (k + 1)..n {
                let (yl, al) = (self.positions[l], self.alphas[l]);
                let r = yk - yl;
                let s = r.norm_squared() + d2;
                let f3 = 1.0 / (s * s.sqrt());
                let ral = r.cross(&al);
                let rak = r.cross(&ak);
                u[k] -= ral * f3;
                u[l] += rak * f3;
                if want_gradient {
                    let f5 = 3.0 * f3 / s;
                    g[k] += cross_matrix(&al) * f3 + ral * r.transpose() * f5;
                    g[l] += cross_matrix(&ak) * f3 + rak * r.transpose() * f5;
                }
            }
        }
        (0..n)
            .map(|k| FieldSample {
                value: u[k] * INV_FOUR_PI,
                gradient: want_gradient.then(|| g[k] * INV_FOUR_PI),
            })
            .collect()
    }
}

/// Regularized Biot-Savart sum of the cloud at `x`.
pub fn biot_savart_particles(cloud: &VortexParticleCloud, x: &V3, want_gradient: bool) -> FieldSample {
    let d2 = cloud.delta * cloud.delta;
    let mut u = V3::zeros();
    let mut g = Matrix3::zeros();
    for (y, a) in cloud.positions.iter().zip(&cloud.alphas) {
        let r = x - y;
        let s = r.norm_squared() + d2;
        let f3 = 1.0 / (s * s.sqrt());
        let ra = r.cross(a);
        u -= ra * f3;
        if want_gradient {
            g += cross_matrix(a) * f3 + ra * r.transpose() * (3.0 * f3 / s);
        }
    }
    FieldSample { value: u * INV_FOUR_PI, gradient: want_gradient.then(|| g * INV_FOUR_PI) }
}

impl VelocityField for VortexParticleCloud {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        Ok(biot_savart_particles(self, x, want_gradient))
    }
}
