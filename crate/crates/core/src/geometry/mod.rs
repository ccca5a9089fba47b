//! Closed curves, normal frames, tube surface meshes and tube coordinates.

mod coords;
mod curve;
mod frame;
mod io;
mod mesh;
mod spline;
mod vectors;

pub use coords::{tube_coordinates, TubeCoords};
pub use curve::Curve;
pub use frame::Frame;
pub use io::{builtin_curve, builtin_points, curve_from_spec, parse_curve_table, read_curve_table, torus_knot, BUILTIN_CURVES};
pub use mesh::{Panel, SurfacePoint, TubeMesh};
pub use spline::PeriodicSpline;
pub use vectors::area_volume_vectors;

use crate::error::Result;

/// Arc-length resampling of a closed polygon; see [`Curve::resample_arclength`].
pub fn resample_arclength(points: &[crate::numerics::V3], n: usize) -> Result<Curve> {
    Curve::resample_arclength(points, n)
}

/// Rotation-minimizing frame; see [`Frame::build`].
pub fn build_frame(curve: &Curve) -> Result<Frame> {
    Frame::build(curve)
}

/// Panel mesh of the tube of radius `eps`; see [`TubeMesh::new`].
pub fn tube_mesh(curve: std::sync::Arc<Curve>, frame: std::sync::Arc<Frame>, eps: f64, nt: usize, ntheta: usize) -> Result<TubeMesh> {
    TubeMesh::new(curve, frame, eps, nt, ntheta)
}
