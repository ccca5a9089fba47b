//! Time integration of the body-frame Newton system coupled with vortex particles.

mod model;
mod pose;
mod rk4;
mod sim;
mod state;

pub use model::{FlowModel, StageForces, LIMIT_SEPARATION_FRACTION};
pub use pose::{integrate_lab_limit, lab_limit_rate, moved_area_volume, reconstruct_pose, LabState};
pub use rk4::{rk4, Axpy};
pub use sim::{advect_stretch, rhs_body_frame, step_rk4, DynamicsSettings, Mode, Regime, SimState};
pub use state::{Joint, Pose, RigidState};
