//! Quadrilateral panel mesh of the tube surface x(t, θ) = γ(t) + ε(cos θ s1 + sin θ s2).

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::curve::Curve;
use super::frame::Frame;
use crate::error::{FilamentError, Result};
use crate::numerics::{gauss_interval, V3};

/// One panel: the image of [t0, t1] × [θ0, θ1].
#[derive(Debug, Clone)]
pub struct Panel {
    /// Image of the parametric center.
    pub centroid: V3,
    /// Unit normal at the centroid, pointing into the solid.
    pub normal: V3,
    /// Midpoint-rule area |∂x/∂t ∧ ∂x/∂θ|·Δt·Δθ at the centroid, so that panel sums are
    /// the periodic midpoint rule on the (t, θ) grid.
    pub area: f64,
    pub it: usize,
    pub ik: usize,
    pub t0: f64,
    pub t1: f64,
    pub theta0: f64,
    pub theta1: f64,
    /// Unit tangent τ at the centroid.
    pub tau: V3,
    /// Unit vector ∂x/∂θ / ε at the centroid (equal to n ∧ τ).
    pub e_theta: V3,
    /// ∂x/∂t · τ at the centroid.
    pub xt_tau: f64,
    /// Frame twist s1'·s2 at the centroid's arc parameter.
    pub twist: f64,
    /// Upper bound on the panel's spatial extent.
    pub diameter: f64,
}

/// Structured panel mesh of the tube of radius `eps` around a curve.
#[derive(Debug, Clone)]
pub struct TubeMesh {
    pub panels: Vec<Panel>,
    pub eps: f64,
    pub nt: usize,
    pub ntheta: usize,
    pub curve: Arc<Curve>,
    pub frame: Arc<Frame>,
}

/// A point on the tube surface with its normal and area density.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub x: V3,
    pub normal: V3,
    /// |∂x/∂t ∧ ∂x/∂θ|.
    pub jacobian: f64,
}

impl TubeMesh {
    pub fn new(curve: Arc<Curve>, frame: Arc<Frame>, eps: f64, nt: usize, ntheta: usize) -> Result<TubeMesh> {
        if nt < 32 || ntheta < 8 {
            return Err(FilamentError::InvalidArgument(format!("mesh resolution ({nt}, {ntheta}) below (32, 8)")));
        }
        if !(eps > 0.0) {
            return Err(FilamentError::InvalidArgument(format!("tube radius must be positive, got {eps}")));
        }
        let min_radius = curve.min_curvature_radius();
        if eps >= 0.5 * min_radius {
            return Err(FilamentError::TubeSelfOverlap { eps, min_radius });
        }
        let mut mesh = TubeMesh { panels: Vec::with_capacity(nt * ntheta), eps, nt, ntheta, curve, frame };
        let ht = mesh.curve.length() / nt as f64;
        let hth = 2.0 * PI / ntheta as f64;
        for it in 0..nt {
            let (t0, t1) = (ht * it as f64, ht * (it + 1) as f64);
            let tm = 0.5 * (t0 + t1);
            let [_, d1, d2] = mesh.curve.jet(tm);
            let g = d1.norm();
            let (s1, s2, tau) = mesh.frame.at(&mesh.curve, tm);
            let twist = mesh.frame.twist_at(&mesh.curve, tm);
            for ik in 0..ntheta {
                let (th0, th1) = (hth * ik as f64, hth * (ik + 1) as f64);
                let thm = 0.5 * (th0 + th1);
                let (c, s) = (thm.cos(), thm.sin());
                let radial = s1 * c + s2 * s;
                let centroid = mesh.curve.position(tm) + radial * eps;
                let normal = -radial;
                let e_theta = s2 * c - s1 * s;
                let xt_tau = g - eps * (c * s1.dot(&d2) + s * s2.dot(&d2)) / g;
                let area = eps * xt_tau * ht * hth;
                let diameter = ((t1 - t0) * (g + eps * (d2.norm() / g))).hypot(eps * (th1 - th0));
                mesh.panels.push(Panel {
                    centroid,
                    normal,
                    area,
                    it,
                    ik,
                    t0,
                    t1,
                    theta0: th0,
                    theta1: th1,
                    tau,
                    e_theta,
                    xt_tau,
                    twist,
                    diameter,
                });
            }
        }
        Ok(mesh)
    }

    /// Convenience constructor building the frame as well.
    pub fn build(curve: Arc<Curve>, eps: f64, nt: usize, ntheta: usize) -> Result<TubeMesh> {
        let frame = Arc::new(Frame::build(&curve)?);
        TubeMesh::new(curve, frame, eps, nt, ntheta)
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn index(&self, it: usize, ik: usize) -> usize {
        (it % self.nt) * self.ntheta + (ik % self.ntheta)
    }

    pub fn dt(&self) -> f64 {
        self.curve.length() / self.nt as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    /// Surface point at parameters (t, θ).
    pub fn surface_point(&self, t: f64, theta: f64) -> SurfacePoint {
        let [p, d1, d2] = self.curve.jet(t);
        let (s1, s2, _) = self.frame.at(&self.curve, t);
        let (s, c) = theta.sin_cos();
        let radial = s1 * c + s2 * s;
        let g = d1.norm();
        let jacobian = self.eps * (g - self.eps * radial.dot(&d2) / g);
        SurfacePoint { x: p + radial * self.eps, normal: -radial, jacobian }
    }

    /// Tensor Gauss rule of order `q` on a parameter rectangle; weights include the area density.
    pub fn rect_rule(&self, t0: f64, t1: f64, th0: f64, th1: f64, q: usize) -> Vec<(V3, f64)> {
        let rt = gauss_interval(q, t0, t1);
        let rth = gauss_interval(q, th0, th1);
        let mut out = Vec::with_capacity(q * q);
        for &(t, wt) in &rt {
            let [p, d1, d2] = self.curve.jet(t);
            let (s1, s2, _) = self.frame.at(&self.curve, t);
            let g = d1.norm();
            for &(th, wth) in &rth {
                let (s, c) = th.sin_cos();
                let radial = s1 * c + s2 * s;
                let jac = self.eps * (g - self.eps * radial.dot(&d2) / g);
                out.push((p + radial * self.eps, wt * wth * jac));
            }
        }
        out
    }

    /// Writes the panel corners as a Wavefront OBJ quad mesh.
    pub fn write_obj(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# tube mesh eps={} nt={} ntheta={}", self.eps, self.nt, self.ntheta)?;
        let ht = self.dt();
        let hth = self.dtheta();
        for it in 0..self.nt {
            for ik in 0..self.ntheta {
                let x = self.surface_point(ht * it as f64, hth * ik as f64).x;
                writeln!(f, "v {:.12} {:.12} {:.12}", x.x, x.y, x.z)?;
            }
        }
        for it in 0..self.nt {
            for ik in 0..self.ntheta {
                let a = self.index(it, ik) + 1;
                let b = self.index(it + 1, ik) + 1;
                let c = self.index(it + 1, ik + 1) + 1;
                let d = self.index(it, ik + 1) + 1;
                writeln!(f, "f {a} {b} {c} {d}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin_curve;

    #[test]
    fn torus_area_and_centroid_distance() {
        let c = Arc::new(builtin_curve("circle R=1", 256).unwrap());
        let m = TubeMesh::build(c.clone(), 0.1, 64, 16).unwrap();
        let exact = 4.0 * PI * PI * 0.1;
        assert!((m.total_area() - exact).abs() < 1e-6 * exact);
        for p in &m.panels {
            let d = c.distance(&p.centroid);
            assert!((d - 0.1).abs() < 1e-6 * 0.1, "{d}");
            assert!((p.normal.norm() - 1.0).abs() < 1e-12);
            assert!((p.normal.cross(&p.tau) - p.e_theta).norm() < 1e-10);
        }
    }

    #[test]
    fn large_radius_overlaps() {
        let c = Arc::new(builtin_curve("circle R=1", 128).unwrap());
        assert!(matches!(TubeMesh::build(c, 0.9, 64, 16), Err(FilamentError::TubeSelfOverlap { .. })));
    }

    #[test]
    fn coarse_resolution_rejected() {
        let c = Arc::new(builtin_curve("circle R=1", 128).unwrap());
        assert!(TubeMesh::build(c, 0.1, 16, 16).is_err());
    }
}
