//! Area and volume vectors of a closed curve.

use super::curve::Curve;
use crate::numerics::{CompensatedV3, V3};

/// A0 = ½∮γ∧γ' ds and V0 = −½∮|γ|²γ' ds by the trapezoidal rule on the samples.
pub fn area_volume_vectors(curve: &Curve) -> (V3, V3) {
    let h = curve.spacing();
    let mut a = CompensatedV3::default();
    let mut v = CompensatedV3::default();
    for (p, &t) in curve.samples().iter().zip(curve.arc_params()) {
        let d = curve.derivative(t);
        a.add(&(p.cross(&d) * (0.5 * h)));
        v.add(&(d * (-0.5 * h * p.norm_squared())));
    }
    (a.value(), v.value())
}
