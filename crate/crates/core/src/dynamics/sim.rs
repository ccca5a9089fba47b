//! The coupled simulation state and its RK4 step.

use std::sync::Arc;

use nalgebra::Vector6;

use super::model::{FlowModel, StageContext, StageForces};
use super::rk4::rk4;
use super::state::{Joint, Pose, RigidState};
use crate::coefficients::{total_energy, CoefficientSet};
use crate::error::{FilamentError, Result};
use crate::kernels::VortexParticleCloud;
use crate::neumann::{reflection_field, ReflectionField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Limit,
    Eps,
    Prescribed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub regime: Regime,
    pub vortical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSettings {
    /// Smallest allowed particle distance to the curve.
    pub separation_floor: f64,
    /// Steps between reflection-field solves. 1 re-solves at every stage; larger
    /// values solve at the start of every `stride`-th step and hold it fixed.
    pub reflection_stride: usize,
    /// Integrate only p₃, the reduced form for axisymmetric data.
    pub axial_only: bool,
}

impl DynamicsSettings {
    pub fn for_model(model: &FlowModel) -> Self {
        DynamicsSettings { separation_floor: model.default_separation_floor(), reflection_stride: 1, axial_only: false }
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub rigid: RigidState,
    pub pose: Pose,
    pub cloud: VortexParticleCloud,
    pub coeffs: Arc<CoefficientSet>,
    pub model: Arc<FlowModel>,
    /// Circulation around the filament, fixed for the whole run.
    mu: f64,
    pub settings: DynamicsSettings,
    pub steps: u64,
    /// Forcing at the start of the last step.
    pub last_forces: Option<StageForces>,
    reflection: Option<Arc<ReflectionField>>,
}

impl SimState {
    pub fn new(
        model: Arc<FlowModel>,
        coeffs: Arc<CoefficientSet>,
        mu: f64,
        p0: Vector6<f64>,
        cloud: VortexParticleCloud,
        settings: DynamicsSettings,
    ) -> Result<SimState> {
        model.check_coefficients(&coeffs)?;
        if !mu.is_finite() || !p0.iter().all(|v| v.is_finite()) {
            return Err(FilamentError::InvalidArgument("non-finite initial state".into()));
        }
        if settings.reflection_stride == 0 {
            return Err(FilamentError::InvalidArgument("reflection stride must be at least 1".into()));
        }
        let state = SimState {
            rigid: RigidState { p: p0, t: 0.0 },
            pose: Pose::default(),
            cloud,
            coeffs,
            model,
            mu,
            settings,
            steps: 0,
            last_forces: None,
            reflection: None,
        };
        if !state.cloud.is_empty() {
            let distance = state.min_separation();
            if distance < settings.separation_floor {
                return Err(FilamentError::SupportTooClose { distance, floor: settings.separation_floor });
            }
        }
        Ok(state)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mode(&self) -> Mode {
        let regime = match *self.model {
            FlowModel::Limit { .. } => Regime::Limit,
            FlowModel::Eps { .. } => Regime::Eps,
            FlowModel::Prescribed { .. } => Regime::Prescribed,
        };
        Mode { regime, vortical: !self.cloud.is_empty() }
    }

    /// ½ p·(Mg + Ma)p.
    pub fn energy(&self) -> f64 {
        total_energy(&self.coeffs, &self.rigid.p)
    }

    /// Smallest particle distance to the curve (∞ without particles).
    pub fn min_separation(&self) -> f64 {
        self.cloud.min_distance_to_curve(self.model.curve())
    }

    fn joint(&self) -> Joint {
        Joint {
            p: self.rigid.p,
            h: self.pose.h,
            q: self.pose.q,
            x: self.cloud.positions.clone(),
            alpha: self.cloud.alphas.clone(),
        }
    }

    fn context<'a>(&'a self, frozen: Option<&'a ReflectionField>) -> StageContext<'a> {
        StageContext {
            model: &self.model,
            coeffs: &self.coeffs,
            mu: self.mu,
            delta: self.cloud.delta,
            separation_floor: self.settings.separation_floor,
            axial_only: self.settings.axial_only,
            frozen_reflection: frozen,
        }
    }

    /// Reflection field to hold over the next step, if the stride asks for one.
    fn reflection_for_step(&self) -> Result<Option<Arc<ReflectionField>>> {
        let FlowModel::Eps { kirchhoff, .. } = &*self.model else {
            return Ok(None);
        };
        if self.settings.reflection_stride == 1 || self.cloud.is_empty() {
            return Ok(None);
        }
        if self.steps % self.settings.reflection_stride as u64 == 0 || self.reflection.is_none() {
            return Ok(Some(Arc::new(reflection_field(kirchhoff.solver.clone(), &self.cloud)?)));
        }
        Ok(self.reflection.clone())
    }

    /// Forcing terms at the current state.
    pub fn forces(&self) -> Result<StageForces> {
        let frozen = self.reflection_for_step()?;
        Ok(self.context(frozen.as_deref()).rates(&self.joint(), true)?.1)
    }
}

/// dp/dt at the current state.
pub fn rhs_body_frame(state: &SimState) -> Result<Vector6<f64>> {
    let frozen = state.reflection_for_step()?;
    Ok(state.context(frozen.as_deref()).rates(&state.joint(), true)?.0.p)
}

/// Advances only the particles over `dt`, with p held fixed.
pub fn advect_stretch(state: &SimState, dt: f64) -> Result<VortexParticleCloud> {
    let frozen = state.reflection_for_step()?;
    let ctx = state.context(frozen.as_deref());
    let y = rk4(&state.joint(), dt, |_, y| Ok(ctx.rates(y, false)?.0))?;
    let cloud = VortexParticleCloud { positions: y.x, alphas: y.alpha, delta: state.cloud.delta };
    ctx.check_separation(&cloud)?;
    Ok(cloud)
}

/// One classical RK4 step of (p, pose, cloud). On error the input state is untouched.
pub fn step_rk4(state: &SimState, dt: f64) -> Result<SimState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(FilamentError::InvalidTimestep(dt));
    }
    let frozen = state.reflection_for_step()?;
    let ctx = state.context(frozen.as_deref());
    let mut first = None;
    let y = rk4(&state.joint(), dt, |_, y| {
        let (rate, forces) = ctx.rates(y, true)?;
        first.get_or_insert(forces);
        Ok(rate)
    })?;
    let cloud = VortexParticleCloud { positions: y.x, alphas: y.alpha, delta: state.cloud.delta };
    ctx.check_separation(&cloud)?;
    if !y.p.iter().all(|v| v.is_finite()) {
        return Err(FilamentError::SolverFailure(format!("non-finite velocity at t = {}", state.rigid.t + dt)));
    }
    Ok(SimState {
        rigid: RigidState { p: y.p, t: state.rigid.t + dt },
        pose: Pose { h: y.h, q: y.q }.reorthonormalized(),
        cloud,
        coeffs: state.coeffs.clone(),
        model: state.model.clone(),
        mu: state.mu,
        settings: state.settings,
        steps: state.steps + 1,
        last_forces: first,
        reflection: frozen,
    })
}
