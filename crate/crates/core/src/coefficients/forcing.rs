use nalgebra::Vector6;

use crate::error::{FilamentError, Result};
use crate::field::VelocityField;
use crate::kernels::VortexParticleCloud;
use crate::neumann::{KirchhoffSet, SEPARATION_FACTOR};
use crate::numerics::{triple, zeta, Compensated, V3};

/// Rigid velocity u_S(x) = ℓ + Ω∧x.
pub fn rigid_velocity(p: &Vector6<f64>, x: &V3) -> V3 {
    V3::new(p[0], p[1], p[2]) + V3::new(p[3], p[4], p[5]).cross(x)
}

/// D*_i = Σ_k [ζ_i(y_k), α_k, u_k] from velocities already sampled at the particles.
pub fn cal_d_star_from(cloud: &VortexParticleCloud, u: &[V3]) -> Vector6<f64> {
    let mut acc = [Compensated::default(); 6];
    for ((y, a), uk) in cloud.positions.iter().zip(&cloud.alphas).zip(u) {
        let z = zeta(y);
        for i in 0..6 {
            acc[i].add(triple(&z[i], a, uk));
        }
    }
    Vector6::from_fn(|i, _| acc[i].value())
}

/// D* for a velocity field sampled at the particle positions.
pub fn cal_d_star(cloud: &VortexParticleCloud, u_eval: &dyn VelocityField) -> Result<Vector6<f64>> {
    let u = sample_all(cloud, u_eval)?;
    Ok(cal_d_star_from(cloud, &u))
}

/// D_i = Σ_k [ζ_i, α_k, u_k] − Σ_k [α_k, u_k − u_S(y_k), ∇Φ_i(y_k)], with ∇Φ_i
/// already sampled (`None` means Φ ≡ 0).
pub fn cal_d_from(cloud: &VortexParticleCloud, p: &Vector6<f64>, u: &[V3], grad_phi: Option<&[[V3; 6]]>) -> Vector6<f64> {
    let mut acc = [Compensated::default(); 6];
    for (k, ((y, a), uk)) in cloud.positions.iter().zip(&cloud.alphas).zip(u).enumerate() {
        let z = zeta(y);
        let rel = uk - rigid_velocity(p, y);
        for i in 0..6 {
            let mut term = triple(&z[i], a, uk);
            if let Some(g) = grad_phi {
                term -= triple(a, &rel, &g[k][i]);
            }
            acc[i].add(term);
        }
    }
    Vector6::from_fn(|i, _| acc[i].value())
}

/// D[p, u, ω] with the cloud as quadrature; `kirchhoff = None` is the zero-radius case.
pub fn cal_d(
    kirchhoff: Option<&KirchhoffSet>,
    p: &Vector6<f64>,
    cloud: &VortexParticleCloud,
    u_eval: &dyn VelocityField,
) -> Result<Vector6<f64>> {
    if cloud.is_empty() {
        return Ok(Vector6::zeros());
    }
    let u = sample_all(cloud, u_eval)?;
    let Some(k) = kirchhoff else {
        return Ok(cal_d_from(cloud, p, &u, None));
    };
    let mesh = k.solver.mesh();
    let floor = SEPARATION_FACTOR * mesh.eps;
    let distance = cloud.min_distance_to_curve(&mesh.curve);
    if distance < floor {
        return Err(FilamentError::SupportTooClose { distance, floor });
    }
    let slices = k.density_slices();
    let grads: Vec<[V3; 6]> = cloud
        .positions
        .iter()
        .map(|y| {
            let s = k.solver.evaluate(y, &slices, false);
            std::array::from_fn(|i| s[i].gradient)
        })
        .collect();
    Ok(cal_d_from(cloud, p, &u, Some(&grads)))
}

fn sample_all(cloud: &VortexParticleCloud, u_eval: &dyn VelocityField) -> Result<Vec<V3>> {
    cloud.positions.iter().map(|y| u_eval.sample(y, false).map(|s| s.value)).collect()
}
