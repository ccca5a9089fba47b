//! Single-layer panel integrals of G(x, y) = 1/(4π|x − y|) and its x-derivatives.

use nalgebra::Matrix3;

use crate::geometry::TubeMesh;
use crate::numerics::{gauss_legendre, V3};

const INV_FOUR_PI: f64 = 0.25 / std::f64::consts::PI;
const MAX_DEPTH: u32 = 5;
const DUFFY_ORDER: usize = 8;

/// ∫G, ∫∇ₓG and optionally ∫∇ₓ∇ₓG over one panel (or a sum of panels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerKernel {
    pub value: f64,
    pub gradient: V3,
    pub hessian: Matrix3<f64>,
}

impl Default for LayerKernel {
    fn default() -> Self {
        LayerKernel { value: 0.0, gradient: V3::zeros(), hessian: Matrix3::zeros() }
    }
}

impl LayerKernel {
    #[inline]
    fn add_node(&mut self, x: &V3, y: &V3, w: f64, hessian: bool) {
        let r = x - y;
        let r2 = r.norm_squared();
        let inv = 1.0 / r2.sqrt();
        let inv3 = inv / r2;
        self.value += w * inv * INV_FOUR_PI;
        self.gradient -= r * (w * inv3 * INV_FOUR_PI);
        if hessian {
            let inv5 = inv3 / r2;
            self.hessian += (r * r.transpose() * (3.0 * inv5) - Matrix3::identity() * inv3) * (w * INV_FOUR_PI);
        }
    }
}

/// Per-panel tensor Gauss rules used for well-separated targets.
#[derive(Debug, Clone)]
pub struct PanelRules {
    rule2: Vec<(V3, f64)>,
    rule4: Vec<(V3, f64)>,
}

impl PanelRules {
    pub fn new(mesh: &TubeMesh) -> Self {
        let mut rule2 = Vec::with_capacity(4 * mesh.len());
        let mut rule4 = Vec::with_capacity(16 * mesh.len());
        for p in &mesh.panels {
            rule2.extend(mesh.rect_rule(p.t0, p.t1, p.theta0, p.theta1, 2));
            rule4.extend(mesh.rect_rule(p.t0, p.t1, p.theta0, p.theta1, 4));
        }
        PanelRules { rule2, rule4 }
    }

    /// Integrals over panel `j` at a target `x` off that panel.
    pub fn integrate(&self, mesh: &TubeMesh, j: usize, x: &V3, hessian: bool) -> LayerKernel {
        let p = &mesh.panels[j];
        let rho = (x - p.centroid).norm() / p.diameter;
        let mut k = LayerKernel::default();
        if rho > 8.0 {
            k.add_node(x, &p.centroid, p.area, hessian);
        } else if rho > 4.0 {
            for (y, w) in &self.rule2[4 * j..4 * j + 4] {
                k.add_node(x, y, *w, hessian);
            }
        } else if rho > 2.0 {
            for (y, w) in &self.rule4[16 * j..16 * j + 16] {
                k.add_node(x, y, *w, hessian);
            }
        } else {
            subdivide(mesh, (p.t0, p.t1, p.theta0, p.theta1), p.diameter, x, 0, hessian, &mut k);
        }
        k
    }

    /// Integrals over all panels, weighted by one or more densities.
    pub fn integrate_all(&self, mesh: &TubeMesh, x: &V3, densities: &[&[f64]], hessian: bool) -> Vec<LayerKernel> {
        let mut out = vec![LayerKernel::default(); densities.len()];
        for j in 0..mesh.len() {
            let k = self.integrate(mesh, j, x, hessian);
            for (acc, d) in out.iter_mut().zip(densities) {
                let s = d[j];
                acc.value += s * k.value;
                acc.gradient += k.gradient * s;
                if hessian {
                    acc.hessian += k.hessian * s;
                }
            }
        }
        out
    }
}

fn subdivide(
    mesh: &TubeMesh,
    (t0, t1, th0, th1): (f64, f64, f64, f64),
    diameter: f64,
    x: &V3,
    depth: u32,
    hessian: bool,
    acc: &mut LayerKernel,
) {
    let (tm, thm) = (0.5 * (t0 + t1), 0.5 * (th0 + th1));
    let center = mesh.surface_point(tm, thm).x;
    let rho = (x - center).norm() / diameter;
    if rho > 2.0 || depth == MAX_DEPTH {
        for (y, w) in mesh.rect_rule(t0, t1, th0, th1, 4) {
            acc.add_node(x, &y, w, hessian);
        }
        return;
    }
    let half = 0.5 * diameter;
    for (a, b) in [(t0, tm), (tm, t1)] {
        for (c, d) in [(th0, thm), (thm, th1)] {
            subdivide(mesh, (a, b, c, d), half, x, depth + 1, hessian, acc);
        }
    }
}

/// Self-panel integrals at the panel's own centroid: (∫G, n·∫∇ₓG), by Duffy
/// transformation on the four triangles around the collocation point.
pub fn self_integrals(mesh: &TubeMesh, j: usize) -> (f64, f64) {
    let p = &mesh.panels[j];
    let c = (0.5 * (p.t0 + p.t1), 0.5 * (p.theta0 + p.theta1));
    let x = p.centroid;
    let corners = [(p.t0, p.theta0), (p.t1, p.theta0), (p.t1, p.theta1), (p.t0, p.theta1)];
    let (nodes, weights) = gauss_legendre(DUFFY_ORDER);
    let unit: Vec<(f64, f64)> = nodes.iter().zip(&weights).map(|(&s, &w)| (0.5 * (s + 1.0), 0.5 * w)).collect();
    let (mut single, mut normal_grad) = (0.0, 0.0);
    for e in 0..4 {
        let (pa, pb) = (corners[e], corners[(e + 1) % 4]);
        let (ax, ay) = (pa.0 - c.0, pa.1 - c.1);
        let (ex, ey) = (pb.0 - pa.0, pb.1 - pa.1);
        let det = (ax * ey - ay * ex).abs();
        for &(u, wu) in &unit {
            for &(v, wv) in &unit {
                let t = c.0 + u * (ax + v * ex);
                let th = c.1 + u * (ay + v * ey);
                let sp = mesh.surface_point(t, th);
                let r = x - sp.x;
                let d = r.norm();
                let w = wu * wv * u * det * sp.jacobian;
                single += w * INV_FOUR_PI / d;
                normal_grad -= w * INV_FOUR_PI * p.normal.dot(&r) / (d * d * d);
            }
        }
    }
    (single, normal_grad)
}
