//! Tube coordinates (t, a, b) around a curve.

use super::curve::Curve;
use super::frame::Frame;
use crate::error::{FilamentError, Result};
use crate::numerics::V3;

/// x = γ(t) + a s1(t) + b s2(t); `w` is the Jacobian factor ∂_τ t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeCoords {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub w: f64,
}

impl TubeCoords {
    pub fn to_point(&self, curve: &Curve, frame: &Frame) -> V3 {
        let (s1, s2, _) = frame.at(curve, self.t);
        curve.position(self.t) + s1 * self.a + s2 * self.b
    }

    pub fn radius(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// Projects `x` onto the curve. `neighborhood` defaults to half the minimum curvature radius.
pub fn tube_coordinates(x: &V3, curve: &Curve, frame: &Frame, neighborhood: Option<f64>) -> Result<TubeCoords> {
    let radius = neighborhood.unwrap_or_else(|| 0.5 * curve.min_curvature_radius());
    let (t, d) = curve.closest_point(x);
    if d >= radius {
        return Err(FilamentError::OutsideTubeNeighborhood { distance: d, radius });
    }
    let [p, d1, d2] = curve.jet(t);
    let (s1, s2, _) = frame.at(curve, t);
    let r = x - p;
    let (a, b) = (r.dot(&s1), r.dot(&s2));
    let g2 = d1.norm_squared();
    let k1 = s1.dot(&d2) / g2;
    let k2 = s2.dot(&d2) / g2;
    let w = 1.0 / (1.0 - (a * k1 + b * k2));
    Ok(TubeCoords { t, a, b, w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin_curve;

    #[test]
    fn round_trip_on_trefoil() {
        let c = builtin_curve("trefoil", 512).unwrap();
        let f = Frame::build(&c).unwrap();
        let t0 = 1.234;
        let x = c.position(t0) + f.at(&c, t0).0 * 0.05;
        let tc = tube_coordinates(&x, &c, &f, None).unwrap();
        assert!((tc.t - t0).abs() < 1e-8 && (tc.a - 0.05).abs() < 1e-8 && tc.b.abs() < 1e-8);
        assert!((tc.to_point(&c, &f) - x).norm() < 1e-12);
    }

    #[test]
    fn far_point_rejected() {
        let c = builtin_curve("circle R=1", 128).unwrap();
        let f = Frame::build(&c).unwrap();
        let r = tube_coordinates(&V3::new(0.0, 0.0, 10.0), &c, &f, None);
        assert!(matches!(r, Err(FilamentError::OutsideTubeNeighborhood { .. })));
    }
}
