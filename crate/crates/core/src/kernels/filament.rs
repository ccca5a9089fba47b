//! Biot-Savart field of a circulation filament along a closed curve.

use nalgebra::Matrix3;

use crate::error::{FilamentError, Result};
use crate::field::{FieldSample, VelocityField};
use crate::geometry::Curve;
use crate::numerics::{cross_matrix, V3};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Trapezoidal Biot-Savart quadrature of a closed filament.
#[derive(Debug, Clone)]
pub struct FilamentField {
    nodes: Vec<V3>,
    /// γ'(t) dt at each node.
    segments: Vec<V3>,
    circulation: f64,
    min_distance: f64,
}

impl FilamentField {
    /// Nodes at `refine` points per curve sample interval.
    pub fn new(curve: &Curve, circulation: f64, refine: usize) -> Self {
        let refine = refine.max(1);
        let m = curve.len() * refine;
        let dt = curve.length() / m as f64;
        let mut nodes = Vec::with_capacity(m);
        let mut segments = Vec::with_capacity(m);
        for k in 0..m {
            let [p, d1, _] = curve.jet(dt * k as f64);
            nodes.push(p);
            segments.push(d1 * dt);
        }
        FilamentField { nodes, segments, circulation, min_distance: 1e-12 * curve.length() }
    }

    /// Field with `nodes` quadrature points, regardless of the curve sampling.
    pub fn with_nodes(curve: &Curve, circulation: f64, nodes: usize) -> Self {
        let dt = curve.length() / nodes as f64;
        let (mut pts, mut segs) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
        for k in 0..nodes {
            let [p, d1, _] = curve.jet(dt * k as f64);
            pts.push(p);
            segs.push(d1 * dt);
        }
        FilamentField { nodes: pts, segments: segs, circulation, min_distance: 1e-12 * curve.length() }
    }

    pub fn circulation(&self) -> f64 {
        self.circulation
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn scaled(&self, circulation: f64) -> Self {
        let mut f = self.clone();
        f.circulation = circulation;
        f
    }
}

impl VelocityField for FilamentField {
    fn sample(&self, x: &V3, want_gradient: bool) -> Result<FieldSample> {
        let mut u = V3::zeros();
        let mut g = Matrix3::zeros();
        for (y, t) in self.nodes.iter().zip(&self.segments) {
            let r = x - y;
            let r2 = r.norm_squared();
            let d = r2.sqrt();
            if d < self.min_distance {
                return Err(FilamentError::SingularEvaluation(d));
            }
            let f3 = 1.0 / (r2 * d);
            let rt = r.cross(t);
            u -= rt * f3;
            if want_gradient {
                let f5 = f3 / r2;
                g += cross_matrix(t) * f3 + rt * r.transpose() * (3.0 * f5);
            }
        }
        let s = self.circulation / FOUR_PI;
        Ok(FieldSample { value: u * s, gradient: want_gradient.then(|| g * s) })
    }
}

/// Velocity induced at `x` by circulation `circulation` along `curve`.
pub fn biot_savart_curve(curve: &Curve, circulation: f64, x: &V3) -> Result<V3> {
    Ok(FilamentField::new(curve, circulation, 1).sample(x, false)?.value)
}
