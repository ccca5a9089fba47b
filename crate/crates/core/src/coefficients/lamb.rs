use crate::field::SurfaceField;
use crate::geometry::TubeMesh;
use crate::numerics::{zeta, Compensated, V3};

/// One volume quadrature node in the fluid with both fields and their curls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeNode {
    pub x: V3,
    pub weight: f64,
    pub u: V3,
    pub curl_u: V3,
    pub v: V3,
    pub curl_v: V3,
}

/// The three integrals of the Lamb-type identity for the rigid mode ζ_i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambTerms {
    /// ∫ (u·v) K_i dσ.
    pub lhs: f64,
    /// ∫ ζ_i·((u·n)v + (v·n)u) dσ.
    pub surface: f64,
    /// ∫_F ζ_i·(u∧curl v + v∧curl u) dx.
    pub volume: f64,
    /// The same integrals with every integrand replaced by its magnitude bound.
    pub magnitude: f64,
}

impl LambTerms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.surface - self.volume).abs()
    }

    /// Largest of the three terms in magnitude.
    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.surface.abs()).max(self.volume.abs())
    }
}

/// `i` is zero-based (0..6).
pub fn lamb_terms(mesh: &TubeMesh, u: &SurfaceField, v: &SurfaceField, i: usize, nodes: &[VolumeNode]) -> LambTerms {
    let (mut lhs, mut surface, mut volume) = (Compensated::default(), Compensated::default(), Compensated::default());
    let mut magnitude = Compensated::default();
    for ((p, uk), vk) in mesh.panels.iter().zip(&u.vectors).zip(&v.vectors) {
        let z = zeta(&p.centroid)[i];
        lhs.add(uk.dot(vk) * z.dot(&p.normal) * p.area);
        surface.add(z.dot(&(vk * uk.dot(&p.normal) + uk * vk.dot(&p.normal))) * p.area);
        magnitude.add(3.0 * z.norm() * uk.norm() * vk.norm() * p.area);
    }
    for n in nodes {
        let z = zeta(&n.x)[i];
        volume.add(z.dot(&(n.u.cross(&n.curl_v) + n.v.cross(&n.curl_u))) * n.weight);
        magnitude.add(z.norm() * (n.u.norm() * n.curl_v.norm() + n.v.norm() * n.curl_u.norm()) * n.weight);
    }
    LambTerms { lhs: lhs.value(), surface: surface.value(), volume: volume.value(), magnitude: magnitude.value() }
}

/// |LHS − RHS| of the identity.
pub fn lamb_residual(mesh: &TubeMesh, u: &SurfaceField, v: &SurfaceField, i: usize, nodes: &[VolumeNode]) -> f64 {
    lamb_terms(mesh, u, v, i, nodes).residual()
}
