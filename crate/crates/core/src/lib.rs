//! Rigid closed filament moving in a three-dimensional perfect fluid.
//!
//! The crate assembles the reduced six-degree-of-freedom Newton system for a
//! thin tube around a closed curve, its zero-radius limit, and the coupling
//! with a vortex-particle representation of the fluid vorticity.

pub mod coefficients;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod kernels;
pub mod neumann;
pub mod numerics;
pub mod scenarios;

pub use error::{FilamentError, Result};
pub use geometry::{Curve, Frame, Panel, TubeCoords, TubeMesh};
pub use numerics::V3;
