//! Dense collocation solver for the exterior Neumann problem with a single-layer density.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, Matrix3, LU};

use super::cache;
use super::quadrature::{self_integrals, LayerKernel, PanelRules};
use crate::error::{FilamentError, Result};
use crate::field::{SurfaceDensity, SurfaceField};
use crate::geometry::TubeMesh;
use crate::numerics::{Compensated, V3};

/// Default relative flux tolerance for Neumann data.
pub const TOL_COMPAT: f64 = 1e-6;

/// Potential, gradient and Hessian of a single-layer potential at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub value: f64,
    pub gradient: V3,
    pub hessian: Matrix3<f64>,
}

impl From<LayerKernel> for PotentialSample {
    fn from(k: LayerKernel) -> Self {
        PotentialSample { value: k.value, gradient: k.gradient, hessian: k.hessian }
    }
}

/// Assembled and factorized operators on one tube mesh.
///
/// With the normal n pointing into the solid, the single layer φ = Sσ has
/// fluid-side normal derivative ∂ₙφ = σ/2 + n·∫∇ₓG σ, which is the collocated
/// operator `A`.
pub struct NeumannSolver {
    mesh: Arc<TubeMesh>,
    rules: PanelRules,
    a: DMatrix<f64>,
    s: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    pub tol_compat: f64,
}

impl std::fmt::Debug for NeumannSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeumannSolver").field("panels", &self.mesh.len()).field("eps", &self.mesh.eps).finish()
    }
}

/// Assembles (A, S) for `mesh`.
pub fn assemble(mesh: &TubeMesh, rules: &PanelRules) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = mesh.len();
    let mut a = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let pi = &mesh.panels[i];
        for j in 0..n {
            if i == j {
                let (single, normal_grad) = self_integrals(mesh, j);
                s[(i, j)] = single;
                a[(i, j)] = 0.5 + normal_grad;
            } else {
                let k = rules.integrate(mesh, j, &pi.centroid, false);
                s[(i, j)] = k.value;
                a[(i, j)] = pi.normal.dot(&k.gradient);
            }
        }
    }
    (a, s)
}

impl NeumannSolver {
    pub fn new(mesh: Arc<TubeMesh>) -> Result<Self> {
        let rules = PanelRules::new(&mesh);
        let (a, s) = assemble(&mesh, &rules);
        Self::from_parts(mesh, rules, a, s)
    }

    /// Like [`NeumannSolver::new`], reusing assembled matrices stored under `dir`.
    pub fn with_cache(mesh: Arc<TubeMesh>, dir: &Path) -> Result<Self> {
        let key = cache::key(&mesh);
        let rules = PanelRules::new(&mesh);
        if let Some((a, s)) = cache::load(dir, &key, mesh.len())? {
            return Self::from_parts(mesh, rules, a, s);
        }
        let (a, s) = assemble(&mesh, &rules);
        cache::store(dir, &key, &a, &s)?;
        Self::from_parts(mesh, rules, a, s)
    }

    fn from_parts(mesh: Arc<TubeMesh>, rules: PanelRules, a: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        if !a.iter().chain(s.iter()).all(|v| v.is_finite()) {
            return Err(FilamentError::SolverFailure("non-finite matrix entry".into()));
        }
        let lu = a.clone().lu();
        let u = lu.u();
        let diag = u.diagonal().map(f64::abs);
        let (lo, hi) = (diag.min(), diag.max());
        if !(lo > 1e-12 * hi) {
            return Err(FilamentError::SolverFailure(format!("collocation matrix is singular (pivot ratio {:e})", lo / hi)));
        }
        Ok(NeumannSolver { mesh, rules, a, s, lu, tol_compat: TOL_COMPAT })
    }

    pub fn mesh(&self) -> &Arc<TubeMesh> {
        &self.mesh
    }

    pub fn operator(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn single_layer(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Net flux Σ g·area and the scale Σ |g|·area.
    pub fn flux(&self, g: &[f64]) -> (f64, f64) {
        debug_assert_eq!(g.len(), self.mesh.len());
        let (mut net, mut abs) = (Compensated::default(), Compensated::default());
        for (p, v) in self.mesh.panels.iter().zip(g) {
            net.add(v * p.area);
            abs.add(v.abs() * p.area);
        }
        (net.value(), abs.value())
    }

    /// Density whose single layer has normal derivative `g` at the collocation points.
    /// The net flux must be below `tol_compat` times Σ|g|·area.
    pub fn solve(&self, g: &[f64]) -> Result<SurfaceDensity> {
        let (_, abs) = self.flux(g);
        self.solve_with_scale(g, abs)
    }

    /// Like [`NeumannSolver::solve`] with the flux tolerance measured against `scale`,
    /// for data g = v·n whose natural size is Σ|v|·area.
    pub fn solve_with_scale(&self, g: &[f64], scale: f64) -> Result<SurfaceDensity> {
        let n = self.mesh.len();
        if g.len() != n {
            return Err(FilamentError::InvalidArgument(format!("expected {n} data values, got {}", g.len())));
        }
        if !g.iter().all(|v| v.is_finite()) {
            return Err(FilamentError::InvalidArgument("non-finite Neumann data".into()));
        }
        let (net, _) = self.flux(g);
        let tol = self.tol_compat * scale;
        if net.abs() > tol {
            return Err(FilamentError::CompatibilityViolation { flux: net, tol });
        }
        let b = DVector::from_column_slice(g);
        let mut x = self.lu.solve(&b).ok_or_else(|| FilamentError::SolverFailure("LU solve failed".into()))?;
        let r = &b - &self.a * &x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        Ok(SurfaceDensity { values: x.as_slice().to_vec() })
    }

    /// Relative collocation residual ‖Aσ − g‖ / ‖g‖ (absolute when g = 0).
    pub fn residual(&self, sigma: &SurfaceDensity, g: &[f64]) -> f64 {
        let x = DVector::from_column_slice(&sigma.values);
        let b = DVector::from_column_slice(g);
        let r = (&self.a * x - &b).norm();
        let scale = b.norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }

    /// Normal derivative of the represented potential at the collocation points.
    pub fn normal_derivative(&self, sigma: &SurfaceDensity) -> Vec<f64> {
        (&self.a * DVector::from_column_slice(&sigma.values)).as_slice().to_vec()
    }

    /// Potential φ = Sσ at the collocation points.
    pub fn surface_potential(&self, sigma: &SurfaceDensity) -> Vec<f64> {
        (&self.s * DVector::from_column_slice(&sigma.values)).as_slice().to_vec()
    }

    /// Surface trace of ∇φ: tangential part from periodic fourth-order differences of
    /// the surface potential on the (t, θ) grid, normal part from `g`.
    pub fn surface_gradient(&self, sigma: &SurfaceDensity, g: &[f64]) -> SurfaceField {
        let phi = self.surface_potential(sigma);
        tangential_gradient(&self.mesh, &phi, g)
    }

    /// φ, ∇φ (and the Hessian when requested) of several densities at an off-surface point.
    pub fn evaluate(&self, x: &V3, densities: &[&[f64]], hessian: bool) -> Vec<PotentialSample> {
        self.rules.integrate_all(&self.mesh, x, densities, hessian).into_iter().map(PotentialSample::from).collect()
    }
}

/// ∇φ on the surface from grid values of φ and the normal derivative `g`.
pub fn tangential_gradient(mesh: &TubeMesh, phi: &[f64], g: &[f64]) -> SurfaceField {
    let (dt, dth) = (mesh.dt(), mesh.dtheta());
    let d = |f: &dyn Fn(isize) -> f64, h: f64| (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * h);
    let vectors = mesh
        .panels
        .iter()
        .zip(g)
        .map(|(p, &gn)| {
            let (it, ik) = (p.it as isize, p.ik as isize);
            let at = |a: isize, b: isize| {
                let nt = mesh.nt as isize;
                let nk = mesh.ntheta as isize;
                phi[mesh.index((it + a).rem_euclid(nt) as usize, (ik + b).rem_euclid(nk) as usize)]
            };
            let dphi_t = d(&|s| at(s, 0), dt);
            let dphi_th = d(&|s| at(0, s), dth);
            let b = dphi_th / mesh.eps;
            let a = (dphi_t - mesh.eps * p.twist * b) / p.xt_tau;
            p.tau * a + p.e_theta * b + p.normal * gn
        })
        .collect();
    SurfaceField { vectors }
}

/// Σ |v|·area, the flux scale of data derived from the normal part of `v`.
pub fn field_scale(mesh: &TubeMesh, v: &SurfaceField) -> f64 {
    let mut acc = Compensated::default();
    for (p, x) in mesh.panels.iter().zip(&v.vectors) {
        acc.add(x.norm() * p.area);
    }
    acc.value()
}
