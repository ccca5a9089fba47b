//! Scenario configuration, experiment drivers and output emission.

mod config;
mod convergence;
mod csv;
mod divergence;
mod report;
mod svg;
mod trajectory;

use std::sync::Arc;
use std::time::Instant;

pub use config::{config_reference, InertiaConfig, MeshConfig, ScenarioConfig, VorticityConfig, SCENARIOS};
pub use convergence::run_convergence_study;
pub use csv::CsvTable;
pub use divergence::run_divergence_experiment;
pub use report::{emit_outputs, Check, FileEntry, Halt, RunData, RunReport};
pub use svg::{Plot, Series};
pub use trajectory::run_trajectory_comparison;

use crate::dynamics::{step_rk4, SimState, StageForces};
use crate::error::{FilamentError, Result};
use crate::geometry::{Curve, TubeMesh};
use crate::neumann::{harmonic_field, kirchhoff_system, HarmonicField, KirchhoffSet, NeumannSolver};

/// Runs the scenario named in the config and writes its outputs.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    match config.scenario.as_str() {
        "convergence" => run_convergence_study(config),
        "trajectory" => run_trajectory_comparison(config),
        "divergence" => run_divergence_experiment(config),
        other => Err(FilamentError::InvalidConfig(format!("unknown scenario '{other}'"))),
    }
}

/// Mesh, solver, Kirchhoff potentials and harmonic field at one ε.
pub(crate) struct TubeSystem {
    pub mesh: Arc<TubeMesh>,
    pub solver: Arc<NeumannSolver>,
    pub kirchhoff: Arc<KirchhoffSet>,
    pub harmonic: Arc<HarmonicField>,
}

pub(crate) fn build_system(config: &ScenarioConfig, curve: &Arc<Curve>, eps: f64) -> Result<TubeSystem> {
    let mesh = Arc::new(TubeMesh::build(curve.clone(), eps, config.mesh.nt, config.mesh.ntheta)?);
    let solver = Arc::new(match &config.cache_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| FilamentError::IoFailure(format!("{}: {e}", dir.display())))?;
            NeumannSolver::with_cache(mesh.clone(), dir)?
        }
        None => NeumannSolver::new(mesh.clone())?,
    });
    let kirchhoff = Arc::new(kirchhoff_system(solver.clone())?);
    let harmonic = Arc::new(harmonic_field(solver.clone())?);
    Ok(TubeSystem { mesh, solver, kirchhoff, harmonic })
}

pub(crate) const TIMESERIES_COLUMNS: [&str; 27] = [
    "t", "p1", "p2", "p3", "p4", "p5", "p6", "h1", "h2", "h3", "q11", "q12", "q13", "q21", "q22", "q23", "q31", "q32",
    "q33", "energy", "min_separation", "particles", "centroid_x", "centroid_y", "centroid_z", "d3", "floor",
];

/// One time-series row; `forces` is the forcing at this state when known.
pub(crate) fn timeseries_row(s: &SimState, forces: Option<&StageForces>) -> Vec<f64> {
    let mut row = vec![s.rigid.t];
    row.extend(s.rigid.p.iter());
    row.extend(s.pose.h.iter());
    for r in 0..3 {
        for c in 0..3 {
            row.push(s.pose.q[(r, c)]);
        }
    }
    let c = s.cloud.centroid();
    row.extend([s.energy(), s.min_separation(), s.cloud.len() as f64, c.x, c.y, c.z]);
    row.push(forces.map_or(f64::NAN, |f| f.d[2]));
    row.push(s.settings.separation_floor);
    row
}

pub(crate) fn timeseries_table() -> CsvTable {
    CsvTable::new("timeseries", 1, &TIMESERIES_COLUMNS)
}

/// Outcome of a fixed-step run: the time series and, if the floor was hit, the halt.
pub(crate) struct Integration {
    pub table: CsvTable,
    pub halt: Option<Halt>,
    pub seconds: f64,
}

/// Integrates `steps` RK4 steps, emitting a row every `stride` steps and at the end.
/// A separation violation stops the run and is reported as a halt; other errors propagate.
pub(crate) fn integrate(
    mut state: SimState,
    dt: f64,
    steps: usize,
    stride: usize,
    with_forces: bool,
    eps: Option<f64>,
) -> Result<Integration> {
    let start = Instant::now();
    let mut table = timeseries_table();
    let mut halt = None;
    for k in 0..steps {
        let next = match step_rk4(&state, dt) {
            Ok(n) => n,
            Err(e @ FilamentError::SupportTooClose { .. }) => {
                halt = Some(Halt { eps, t: state.rigid.t, message: e.to_string() });
                break;
            }
            Err(e) => return Err(e),
        };
        if k % stride == 0 {
            let forces = if with_forces { next.last_forces.as_ref() } else { None };
            table.push(timeseries_row(&state, forces));
        }
        state = next;
    }
    let forces = if with_forces { state.forces().ok() } else { None };
    table.push(timeseries_row(&state, forces.as_ref()));
    Ok(Integration { table, halt, seconds: start.elapsed().as_secs_f64() })
}

/// File-name fragment for one ε.
pub(crate) fn eps_tag(eps: f64) -> String {
    format!("eps_{eps}")
}
