//! Free-space Biot-Savart kernels for filaments and vortex particles, the
//! local cross-section field, and closed-form ring oracles.

mod filament;
mod local;
mod particles;

pub use filament::{biot_savart_curve, FilamentField};
pub use local::{h2d, h2d_field, ring_axis_oracle, ring_radial_asymptotic};
pub use particles::{biot_savart_particles, blob_profile, RingBlob, VortexParticleCloud};
