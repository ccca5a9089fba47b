use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix6, Vector6};

use super::inertia::InertiaSpec;
use crate::error::{FilamentError, Result};
use crate::field::SurfaceField;
use crate::geometry::{area_volume_vectors, Curve, TubeMesh};
use crate::neumann::{HarmonicField, KirchhoffSet};
use crate::numerics::{cross_matrix, triple, zeta, Compensated};

/// 𝓑[u]_ij = ∫ [ζ_j, ζ_i, u∧n] dσ by the panel midpoint rule.
pub fn cal_b_matrix(mesh: &TubeMesh, u: &SurfaceField) -> Matrix6<f64> {
    let mut acc = [[Compensated::default(); 6]; 6];
    for (p, v) in mesh.panels.iter().zip(&u.vectors) {
        let z = zeta(&p.centroid);
        let un = v.cross(&p.normal);
        for i in 0..6 {
            for j in (i + 1)..6 {
                acc[i][j].add(triple(&z[j], &z[i], &un) * p.area);
            }
        }
    }
    let mut b = Matrix6::zeros();
    for i in 0..6 {
        for j in (i + 1)..6 {
            b[(i, j)] = acc[i][j].value();
            b[(j, i)] = -b[(i, j)];
        }
    }
    b
}

/// Limit matrix with blocks (0, A0∧·; A0∧·, V0∧·).
pub fn bstar_matrix(curve: &Curve) -> Matrix6<f64> {
    let (a0, v0) = area_volume_vectors(curve);
    let mut b = Matrix6::zeros();
    let ax = cross_matrix(&a0);
    b.fixed_view_mut::<3, 3>(0, 3).copy_from(&ax);
    b.fixed_view_mut::<3, 3>(3, 0).copy_from(&ax);
    b.fixed_view_mut::<3, 3>(3, 3).copy_from(&cross_matrix(&v0));
    b
}

/// All coefficients of one body-frame Newton system.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    /// Inertia actually used (already scaled for density mode).
    pub inertia: InertiaSpec,
    pub mg: Matrix6<f64>,
    pub ma: Matrix6<f64>,
    /// B* in limit mode, 𝓑[H^ε] in ε mode.
    pub b: Matrix6<f64>,
    /// 𝓑[∇Φ_i], i = 1..6 (zero in limit mode).
    pub gamma_a_tensor: [Matrix6<f64>; 6],
    /// Tube radius, `None` in limit mode.
    pub eps: Option<f64>,
}

impl CoefficientSet {
    pub fn limit(inertia: &InertiaSpec, curve: &Curve) -> Self {
        CoefficientSet {
            inertia: *inertia,
            mg: inertia.mg(),
            ma: Matrix6::zeros(),
            b: bstar_matrix(curve),
            gamma_a_tensor: [Matrix6::zeros(); 6],
            eps: None,
        }
    }

    pub fn eps(inertia: &InertiaSpec, kirchhoff: &KirchhoffSet, harmonic: &HarmonicField) -> Result<Self> {
        let mesh = kirchhoff.solver.mesh();
        let eps = mesh.eps;
        let inertia = inertia.at_eps(eps);
        let mut gamma_a_tensor = [Matrix6::zeros(); 6];
        for (t, g) in gamma_a_tensor.iter_mut().zip(&kirchhoff.surface_gradients) {
            *t = cal_b_matrix(mesh, g);
        }
        let set = CoefficientSet {
            inertia,
            mg: inertia.mg(),
            ma: kirchhoff.ma,
            b: cal_b_matrix(mesh, &harmonic.surface),
            gamma_a_tensor,
            eps: Some(eps),
        };
        set.validate()?;
        Ok(set)
    }

    /// Mg + Ma.
    pub fn total_inertia(&self) -> Matrix6<f64> {
        self.mg + self.ma
    }

    /// Checks symmetry and definiteness of Mg + Ma and skew-symmetry of B and 𝓑[∇Φ_i].
    pub fn validate(&self) -> Result<()> {
        let m = self.total_inertia();
        let min = m.symmetric_eigenvalues().min();
        if (m - m.transpose()).amax() > 1e-8 * m.amax() || !(min > 0.0) {
            return Err(FilamentError::SolverFailure(format!("total inertia not symmetric positive definite (min eigenvalue {min})")));
        }
        for b in std::iter::once(&self.b).chain(&self.gamma_a_tensor) {
            if (b + b.transpose()).amax() > 1e-10 * b.amax().max(f64::MIN_POSITIVE) {
                return Err(FilamentError::SolverFailure("coupling matrix is not skew-symmetric".into()));
            }
        }
        Ok(())
    }

    /// Plain-text bundle of all matrices, for regression snapshots.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# coefficient bundle")?;
        match self.eps {
            Some(e) => writeln!(f, "eps {e:.17e}")?,
            None => writeln!(f, "eps limit")?,
        }
        let mut block = |name: &str, m: &Matrix6<f64>| -> std::io::Result<()> {
            writeln!(f, "[{name}]")?;
            for i in 0..6 {
                let row: Vec<String> = (0..6).map(|j| format!("{:.17e}", m[(i, j)])).collect();
                writeln!(f, "{}", row.join(" "))?;
            }
            Ok(())
        };
        block("Mg", &self.mg)?;
        block("Ma", &self.ma)?;
        block("B", &self.b)?;
        for (i, t) in self.gamma_a_tensor.iter().enumerate() {
            block(&format!("B_grad_phi_{}", i + 1), t)?;
        }
        Ok(())
    }
}

/// ⟨Γ_a, p, p⟩ = −Σ p_i 𝓑[∇Φ_i] p.
pub fn gamma_a(coeffs: &CoefficientSet, p: &Vector6<f64>) -> Vector6<f64> {
    let mut out = Vector6::zeros();
    for (i, t) in coeffs.gamma_a_tensor.iter().enumerate() {
        out -= t * p * p[i];
    }
    out
}

/// ½ p·(Mg + Ma) p.
pub fn total_energy(coeffs: &CoefficientSet, p: &Vector6<f64>) -> f64 {
    0.5 * p.dot(&(coeffs.total_inertia() * p))
}
