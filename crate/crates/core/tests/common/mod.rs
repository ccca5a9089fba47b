#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use filament_core::geometry::{builtin_curve, Curve, TubeMesh};
use filament_core::neumann::{harmonic_field, kirchhoff_system, HarmonicField, KirchhoffSet, NeumannSolver};

pub const CURVE_SAMPLES: usize = 1024;
pub const NT: usize = 128;
pub const NTHETA: usize = 16;
pub const EPS_SWEEP: [f64; 3] = [0.2, 0.1, 0.05];

pub struct System {
    pub mesh: Arc<TubeMesh>,
    pub solver: Arc<NeumannSolver>,
    pub kirchhoff: KirchhoffSet,
    pub harmonic: HarmonicField,
}

pub fn unit_circle() -> Arc<Curve> {
    static C: OnceLock<Arc<Curve>> = OnceLock::new();
    C.get_or_init(|| Arc::new(builtin_curve("circle R=1", CURVE_SAMPLES).unwrap())).clone()
}

pub fn build_system(curve: Arc<Curve>, eps: f64, nt: usize, ntheta: usize) -> System {
    let mesh = Arc::new(TubeMesh::build(curve, eps, nt, ntheta).unwrap());
    let solver = Arc::new(NeumannSolver::new(mesh.clone()).unwrap());
    let kirchhoff = kirchhoff_system(solver.clone()).unwrap();
    let harmonic = harmonic_field(solver.clone()).unwrap();
    System { mesh, solver, kirchhoff, harmonic }
}

/// Unit-circle system at the standard resolution, built once per test binary.
pub fn circle_system(eps: f64) -> &'static System {
    static CACHE: OnceLock<Mutex<HashMap<u64, &'static System>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(Default::default).lock().unwrap();
    map.entry(eps.to_bits()).or_insert_with(|| Box::leak(Box::new(build_system(unit_circle(), eps, NT, NTHETA))))
}
