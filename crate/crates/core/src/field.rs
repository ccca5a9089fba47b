//! Field containers shared between the kernels, the boundary solver and the coefficients.

use nalgebra::Matrix3;

use crate::error::Result;
use crate::geometry::TubeMesh;
use crate::numerics::V3;

/// Velocity (and optionally its gradient, `gradient[(i, m)] = ∂_m u_i`) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: V3,
    pub gradient: Option<Matrix3<f64>>,
}

impl FieldSample {
    pub fn zero(with_gradient: bool) -> Self {
        FieldSample { value: V3::zeros(), gradient: with_gradient.then(Matrix3::zeros) }
    }

    /// Curl from the gradient, if present.
    pub fn curl(&self) -> Option<V3> {
        self.gradient.map(|g| curl_of(&g))
    }
}

/// curl u from ∇u with `g[(i, m)] = ∂_m u_i`.
pub fn curl_of(g: &Matrix3<f64>) -> V3 {
    V3::new(g[(2, 1)] - g[(1, 2)], g[(0, 2)] - g[(2, 0)], g[(1, 0)] - g[(0, 1)])
}

/// A velocity field that can be sampled anywhere in the fluid.
pub trait VelocityField: Send + Sync {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample>;
}

/// Sum of several fields.
pub struct SumField<'a>(pub Vec<&'a dyn VelocityField>);

impl VelocityField for SumField<'_> {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        let mut acc = FieldSample::zero(want_gradient);
        for f in &self.0 {
            let s = f.sample(x, want_gradient)?;
            acc.value += s.value;
            if let (Some(a), Some(b)) = (acc.gradient.as_mut(), s.gradient) {
                *a += b;
            }
        }
        Ok(acc)
    }
}

/// Field given by a closure `x -> (u, ∇u)`.
pub struct FnField<F>(pub F);

impl<F> VelocityField for FnField<F>
where
    F: Fn(&V3) -> (V3, Matrix3<f64>) + Send + Sync,
{
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        let (v, g) = (self.0)(x);
        Ok(FieldSample { value: v, gradient: want_gradient.then_some(g) })
    }
}

/// Scalar single-layer density, one value per panel.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDensity {
    pub values: Vec<f64>,
}

/// Trace of a vector field on the surface, one vector per panel centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceField {
    pub vectors: Vec<V3>,
}

impl SurfaceField {
    pub fn zeros(n: usize) -> Self {
        SurfaceField { vectors: vec![V3::zeros(); n] }
    }

    /// Samples a field at every panel centroid.
    pub fn from_field(mesh: &TubeMesh, field: &dyn VelocityField) -> Result<Self> {
        let vectors = mesh.panels.iter().map(|p| field.sample(&p.centroid, false).map(|s| s.value)).collect::<Result<_>>()?;
        Ok(SurfaceField { vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Normal components v·n per panel.
    pub fn normal_components(&self, mesh: &TubeMesh) -> Vec<f64> {
        self.vectors.iter().zip(&mesh.panels).map(|(v, p)| v.dot(&p.normal)).collect()
    }

    /// Tangential parts v − (v·n)n.
    pub fn tangential(&self, mesh: &TubeMesh) -> SurfaceField {
        let vectors = self.vectors.iter().zip(&mesh.panels).map(|(v, p)| v - p.normal * v.dot(&p.normal)).collect();
        SurfaceField { vectors }
    }

    /// Area-weighted root mean square of |v|.
    pub fn rms(&self, mesh: &TubeMesh) -> f64 {
        (self.l2_squared(mesh) / mesh.total_area()).sqrt()
    }

    /// Surface L² norm (Σ|v|² area)^{1/2}.
    pub fn l2(&self, mesh: &TubeMesh) -> f64 {
        self.l2_squared(mesh).sqrt()
    }

    fn l2_squared(&self, mesh: &TubeMesh) -> f64 {
        self.vectors.iter().zip(&mesh.panels).map(|(v, p)| v.norm_squared() * p.area).sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &SurfaceField) -> SurfaceField {
        SurfaceField { vectors: self.vectors.iter().zip(&other.vectors).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &SurfaceField) -> SurfaceField {
        SurfaceField { vectors: self.vectors.iter().zip(&other.vectors).map(|(a, b)| a - b).collect() }
    }

    pub fn scaled(&self, s: f64) -> SurfaceField {
        SurfaceField { vectors: self.vectors.iter().map(|a| a * s).collect() }
    }

    /// Circulation ∮ v·e_θ ds around cross-section `it` (midpoint rule on the panel ring).
    pub fn cross_section_circulation(&self, mesh: &TubeMesh, it: usize) -> f64 {
        let ds = mesh.eps * mesh.dtheta();
        (0..mesh.ntheta)
            .map(|ik| {
                let j = mesh.index(it, ik);
                self.vectors[j].dot(&mesh.panels[j].e_theta) * ds
            })
            .sum()
    }
}
