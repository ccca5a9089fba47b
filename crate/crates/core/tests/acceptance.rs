//! Acceptance suite: one pass/fail line per criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use filament_core::coefficients::{
    bstar_matrix, cal_b_matrix, cal_d_star_from, gamma_a, gamma_g, lamb_terms, CoefficientSet, InertiaSpec, VolumeNode,
};
use filament_core::dynamics::{integrate_lab_limit, reconstruct_pose, step_rk4, DynamicsSettings, FlowModel, LabState, SimState};
use filament_core::field::{SurfaceField, VelocityField};
use filament_core::geometry::{builtin_curve, Curve, TubeMesh};
use filament_core::kernels::{
    biot_savart_particles, blob_profile, h2d_field, ring_axis_oracle, ring_radial_asymptotic, FilamentField, RingBlob,
    VortexParticleCloud,
};
use filament_core::neumann::{harmonic_field, kirchhoff_system, NeumannSolver};
use filament_core::numerics::{loglog_slope, V3};
use filament_core::scenarios::{run_convergence_study, run_divergence_experiment, run_trajectory_comparison, RunReport, ScenarioConfig};
use nalgebra::{Matrix3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS_SWEEP: [f64; 3] = [0.2, 0.1, 0.05];

// Criterion 1
const SKEW_NULL_POWER_TOL: f64 = 1e-12;
const GAMMA_NULL_POWER_TOL: f64 = 1e-10;
const C1_SECONDS: f64 = 1.0;
// Criterion 2
const ENERGY_DRIFT_TOL: f64 = 1e-6;
const C2_SECONDS: f64 = 10.0;
// Criterion 3
const H2D_ENTRY_TOL: f64 = 0.05;
const H2D_ORDER: (f64, f64) = (0.7, 1.3);
const C3_SECONDS: f64 = 60.0;
// Criterion 4
const BEPS_MIN_ORDER: f64 = 0.7;
const C4_SECONDS: f64 = 600.0;
// Criterion 5
const MA_SLOPE: (f64, f64) = (1.6, 2.3);
// Criterion 6
const CIRCULATION_TOL: f64 = 1e-2;
const NORMAL_RESIDUAL_TOL: f64 = 1e-2;
// Criterion 7
const AXIS_REL_TOL: f64 = 1e-6;
const FAR_FIELD_REL_TOL: f64 = 0.10;
const DECAY_SLOPE: (f64, f64) = (-3.1, -2.9);
// Criterion 8
const LAMB_KIRCHHOFF_TOL: f64 = 1e-4;
const LAMB_MIN_ORDER: f64 = 1.0;
// Criterion 9
const CANCELLATION_TOL: f64 = 1e-3;
const C9_SECONDS: f64 = 60.0;
// Criterion 12
const BODY_LAB_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn run(id: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    println!(
        "criterion {id:>2} [{}] {title}: {} ({:.1} s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
    o.pass
}

fn circle(samples: usize) -> Arc<Curve> {
    Arc::new(builtin_curve("circle R=1", samples).unwrap())
}

fn random_p(rng: &mut ChaCha8Rng) -> Vector6<f64> {
    Vector6::from_fn(|_, _| rng.gen_range(-1.0..1.0))
}

fn skew_and_null_power() -> Outcome {
    let mesh = Arc::new(TubeMesh::build(circle(256), 0.1, 32, 8).unwrap());
    let solver = Arc::new(NeumannSolver::new(mesh.clone()).unwrap());
    let k = kirchhoff_system(solver.clone()).unwrap();
    let h = harmonic_field(solver).unwrap();
    let inertia = InertiaSpec::new(1.3, Matrix3::new(1.0, 0.2, 0.0, 0.2, 1.5, 0.1, 0.0, 0.1, 0.8), Default::default()).unwrap();
    let coeffs = CoefficientSet::eps(&inertia, &k, &h).unwrap();

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut skew_exact, mut worst_b, mut worst_g, mut worst_a) = (true, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let u = SurfaceField { vectors: (0..mesh.len()).map(|_| V3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect() };
        let p = random_p(&mut rng);
        let b = cal_b_matrix(&mesh, &u);
        skew_exact &= (0..6).all(|i| (0..6).all(|j| b[(i, j)] == -b[(j, i)]));
        worst_b = worst_b.max((p.dot(&(b * p))).abs() / (p.norm_squared() * b.norm()));
        let g = gamma_g(&coeffs.inertia, &p);
        worst_g = worst_g.max(g.dot(&p).abs() / (g.norm() * p.norm()).max(f64::MIN_POSITIVE));
        let a = gamma_a(&coeffs, &p);
        worst_a = worst_a.max(a.dot(&p).abs() / (a.norm() * p.norm()).max(f64::MIN_POSITIVE));
    }
    let seconds = start.elapsed().as_secs_f64();
    let pass = skew_exact
        && worst_b <= SKEW_NULL_POWER_TOL
        && worst_g <= GAMMA_NULL_POWER_TOL
        && worst_a <= GAMMA_NULL_POWER_TOL
        && seconds < C1_SECONDS;
    outcome(
        pass,
        format!(
            "exact skew {skew_exact}, |p.Bp| rel {worst_b:.1e}, Gamma_g rel {worst_g:.1e}, Gamma_a rel {worst_a:.1e}, checks {seconds:.2} s"
        ),
    )
}

fn energy_drift(model: Arc<FlowModel>, coeffs: CoefficientSet, p0: Vector6<f64>) -> f64 {
    let settings = DynamicsSettings::for_model(&model);
    let mut s = SimState::new(model, Arc::new(coeffs), 1.0, p0, VortexParticleCloud::empty(0.1), settings).unwrap();
    let e0 = s.energy();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        s = step_rk4(&s, 1e-3).unwrap();
        worst = worst.max((s.energy() - e0).abs() / e0);
    }
    worst
}

fn energy_conservation() -> Outcome {
    let start = Instant::now();
    let curve = circle(1024);
    let inertia = InertiaSpec::unit();
    let p0 = random_p(&mut ChaCha8Rng::seed_from_u64(2));
    let limit = energy_drift(Arc::new(FlowModel::limit(curve.clone())), CoefficientSet::limit(&inertia, &curve), p0);
    let mesh = Arc::new(TubeMesh::build(curve, 0.1, 128, 16).unwrap());
    let solver = Arc::new(NeumannSolver::new(mesh).unwrap());
    let k = Arc::new(kirchhoff_system(solver.clone()).unwrap());
    let h = Arc::new(harmonic_field(solver).unwrap());
    let coeffs = CoefficientSet::eps(&inertia, &k, &h).unwrap();
    let tube = energy_drift(Arc::new(FlowModel::eps(k, h)), coeffs, p0);
    let seconds = start.elapsed().as_secs_f64();
    let pass = limit <= ENERGY_DRIFT_TOL && tube <= ENERGY_DRIFT_TOL && seconds < C2_SECONDS;
    outcome(pass, format!("drift limit {limit:.1e}, eps=0.1 {tube:.1e} over T = 10"))
}

fn h2d_oracle() -> Outcome {
    let start = Instant::now();
    let curve = circle(1024);
    let bstar = bstar_matrix(&curve);
    let errs: Vec<f64> = EPS_SWEEP
        .iter()
        .map(|&e| {
            let mesh = TubeMesh::build(curve.clone(), e, 128, 16).unwrap();
            (cal_b_matrix(&mesh, &h2d_field(&mesh)) - bstar).amax()
        })
        .collect();
    let order = loglog_slope(&EPS_SWEEP, &errs);
    let entry_ok = errs[2] <= H2D_ENTRY_TOL;
    let order_ok = (H2D_ORDER.0..=H2D_ORDER.1).contains(&order);
    let seconds = start.elapsed().as_secs_f64();
    outcome(
        entry_ok && order_ok && seconds < C3_SECONDS,
        format!(
            "max entry at eps=0.05 {:.2e} [{}], fitted order {order:.2} in [{}, {}] [{}]",
            errs[2],
            mark(entry_ok),
            H2D_ORDER.0,
            H2D_ORDER.1,
            mark(order_ok)
        ),
    )
}

fn check_line(r: &RunReport, names: &[&str]) -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in names {
        match r.check(n) {
            Some(c) => {
                pass &= c.ok;
                parts.push(format!("{n} {:.3e} [{}]", c.value, mark(c.ok)));
            }
            None => {
                pass = false;
                parts.push(format!("{n} missing"));
            }
        }
    }
    (pass, parts.join(", "))
}

fn scenario(name: &str, out: &Path, cache: &Path) -> ScenarioConfig {
    let mut c = ScenarioConfig::defaults(name).unwrap();
    c.output_dir = out.join(name);
    c.cache_dir = Some(cache.to_path_buf());
    c
}

fn kernel_oracles() -> Outcome {
    let c = circle(2048);
    let field = FilamentField::with_nodes(&c, 1.0, 2048);
    let axis = [0.0, 0.5, 1.0, 3.0]
        .iter()
        .map(|&z| {
            let exact = ring_axis_oracle(1.0, z).unwrap();
            (field.sample(&V3::new(0.0, 0.0, z), false).unwrap().value - exact).norm() / exact.norm()
        })
        .fold(0.0, f64::max);
    let x = V3::new(0.5, 0.0, -10.0);
    let radial = field.sample(&x, false).unwrap().value.x;
    let asymptotic = ring_radial_asymptotic(0.5, -10.0);
    let far_rel = (radial - asymptotic).abs() / asymptotic.abs();
    let dir = V3::new(1.0, 0.7, 0.4).normalize();
    let d = [25.0, 50.0, 100.0];
    let mags: Vec<f64> = d.iter().map(|&s| field.sample(&(dir * s), false).unwrap().value.norm()).collect();
    let slope = loglog_slope(&d, &mags);
    let (a, b, s) =
        (axis <= AXIS_REL_TOL, far_rel <= FAR_FIELD_REL_TOL, (DECAY_SLOPE.0..=DECAY_SLOPE.1).contains(&slope));
    outcome(
        a && b && s,
        format!(
            "on-axis rel {axis:.1e} [{}], far-field radial {radial:.3e} vs {asymptotic:.3e} (rel {far_rel:.2}) [{}], decay slope {slope:.3} [{}]",
            mark(a),
            mark(b),
            mark(s)
        ),
    )
}

/// Largest Lamb residual and term scale over the six modes, for a blob near a trefoil tube.
fn lamb_blob(nt: usize, ntheta: usize, particles: usize) -> (f64, f64) {
    let c = Arc::new(builtin_curve("trefoil", 1024).unwrap());
    let mesh = TubeMesh::build(c, 0.05, nt, ntheta).unwrap();
    let (center, core) = (V3::new(0.4, -0.3, 1.5), 0.6);
    let spec = RingBlob { center, strength: 1.0, core, particles, delta_factor: 1.5 };
    let cloud = VortexParticleCloud::ring_blob(&spec).unwrap();
    let u = SurfaceField { vectors: mesh.panels.iter().map(|p| biot_savart_particles(&cloud, &p.centroid, false).value).collect() };
    let h3 = core.powi(3) * 4.0 * PI / (3.0 * particles as f64);
    let nodes: Vec<VolumeNode> = cloud
        .positions
        .iter()
        .zip(cloud.self_field(false))
        .map(|(x, s)| {
            let y = x - center;
            let omega = V3::new(y.y, -y.x, 0.0) * blob_profile(y.norm() / core);
            VolumeNode { x: *x, weight: h3, u: s.value, curl_u: omega, v: s.value, curl_v: omega }
        })
        .collect();
    (0..6).map(|i| lamb_terms(&mesh, &u, &u, i, &nodes)).fold((0.0f64, 0.0f64), |(r, s), t| (r.max(t.residual()), s.max(t.scale())))
}

fn lamb_identity() -> Outcome {
    let c = Arc::new(builtin_curve("trefoil", 1024).unwrap());
    let mesh = Arc::new(TubeMesh::build(c, 0.05, 128, 16).unwrap());
    let k = kirchhoff_system(Arc::new(NeumannSolver::new(mesh.clone()).unwrap())).unwrap();
    let grad = &k.surface_gradients[0];
    let kirchhoff = (0..6)
        .map(|i| {
            let t = lamb_terms(&mesh, grad, grad, i, &[]);
            t.residual() / t.magnitude
        })
        .fold(0.0, f64::max);
    let (coarse, s1) = lamb_blob(96, 12, 1000);
    let (fine, s2) = lamb_blob(192, 24, 8000);
    let order = (coarse / fine).log2();
    let (a, b) = (kirchhoff <= LAMB_KIRCHHOFF_TOL, order >= LAMB_MIN_ORDER);
    outcome(
        a && b,
        format!(
            "u = v = grad Phi_1 residual/magnitude {kirchhoff:.1e} [{}], blob refinement {:.1e} -> {:.1e} of scale, order {order:.2} [{}]",
            mark(a),
            coarse / s1,
            fine / s2,
            mark(b)
        ),
    )
}

fn self_cancellation() -> Outcome {
    let start = Instant::now();
    let spec = RingBlob { center: V3::new(0.0, 0.0, -10.0), strength: -1.0, core: 1.0, particles: 10_000, delta_factor: 1.5 };
    let cloud = VortexParticleCloud::ring_blob(&spec).unwrap();
    let u: Vec<V3> = cloud.self_field(false).into_iter().map(|s| s.value).collect();
    let d = cal_d_star_from(&cloud, &u);
    let scale: f64 = cloud.alphas.iter().zip(&u).map(|(a, v)| a.norm() * v.norm()).sum();
    let rel = d[2].abs() / scale;
    let seconds = start.elapsed().as_secs_f64();
    outcome(
        rel <= CANCELLATION_TOL && seconds < C9_SECONDS,
        format!("{} particles, |sum [e3, omega, K[omega]]| / scale {rel:.1e}", cloud.len()),
    )
}

fn body_lab() -> Outcome {
    let inertia = InertiaSpec::new(1.5, Matrix3::new(1.2, 0.1, 0.0, 0.1, 0.9, -0.05, 0.0, -0.05, 1.6), Default::default()).unwrap();
    let curve = circle(1024);
    let p0 = random_p(&mut ChaCha8Rng::seed_from_u64(5));
    let (dt, steps) = (1e-3, 1000);
    let model = Arc::new(FlowModel::limit(curve.clone()));
    let coeffs = Arc::new(CoefficientSet::limit(&inertia, &curve));
    let settings = DynamicsSettings::for_model(&model);
    let mut s = SimState::new(model, coeffs, 1.0, p0, VortexParticleCloud::empty(0.1), settings).unwrap();
    let (mut times, mut ps) = (vec![0.0], vec![p0]);
    for _ in 0..steps {
        s = step_rk4(&s, dt).unwrap();
        times.push(s.rigid.t);
        ps.push(s.rigid.p);
    }
    let poses = reconstruct_pose(&times, &ps).unwrap();
    let lab = integrate_lab_limit(&inertia, &curve, 1.0, LabState::from_body(&inertia, &p0), dt, steps).unwrap();
    let worst = poses.iter().zip(&lab).map(|(p, l)| (p.h - l.h).norm()).fold(0.0, f64::max);
    outcome(worst <= BODY_LAB_TOL, format!("max |h_body - h_lab| over T = 1: {worst:.1e}"))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let (out, cache) = (tmp.path().join("out"), tmp.path().join("cache"));
    let mut convergence: Option<RunReport> = None;
    let mut results = Vec::new();

    results.push(run(1, "skew-symmetry and null power", skew_and_null_power));
    results.push(run(2, "energy conservation", energy_conservation));
    results.push(run(3, "B[H2D] vs B*", h2d_oracle));
    results.push(run(4, "B^eps convergence", || {
        let start = Instant::now();
        let mut c = scenario("convergence", &out, &cache);
        c.cache_dir = None;
        let r = run_convergence_study(&c).unwrap();
        let seconds = start.elapsed().as_secs_f64();
        let (pass, line) = check_line(&r, &["b_eps_decreasing", "b_eps_order"]);
        let fitted = r.fitted("b_eps_err").unwrap_or(f64::NAN);
        convergence = Some(r);
        outcome(pass && fitted >= BEPS_MIN_ORDER && seconds < C4_SECONDS, format!("{line}, order {fitted:.2}"))
    }));
    results.push(run(5, "added-mass scaling", || {
        let r = convergence.as_ref().expect("convergence report");
        let slope = r.fitted("ma_norm").unwrap_or(f64::NAN);
        outcome((MA_SLOPE.0..=MA_SLOPE.1).contains(&slope), format!("log-log slope of |Ma| {slope:.3}"))
    }));
    results.push(run(6, "harmonic field contract", || {
        let r = convergence.as_ref().expect("convergence report");
        let (pass, line) = check_line(r, &["circulation", "normal_residual", "h_h2d_decreasing"]);
        let circ = r.check("circulation").map_or(f64::NAN, |c| c.value);
        let res = r.check("normal_residual").map_or(f64::NAN, |c| c.value);
        outcome(pass && circ <= CIRCULATION_TOL && res <= NORMAL_RESIDUAL_TOL, line)
    }));
    results.push(run(7, "kernel oracles", kernel_oracles));
    results.push(run(8, "Lamb identity", lamb_identity));
    results.push(run(9, "self-interaction cancellation", self_cancellation));
    results.push(run(10, "limit vs eps trajectories", || {
        let r = run_trajectory_comparison(&scenario("trajectory", &out, &cache)).unwrap();
        let (pass, line) = check_line(&r, &["all_eps_completed", "sup_dp_decreasing"]);
        let sup: Vec<String> = r.summary.column("sup_dp").unwrap().iter().map(|v| format!("{v:.3e}")).collect();
        outcome(pass, format!("sup |p^eps - p*| = [{}], {line}", sup.join(", ")))
    }));
    results.push(run(11, "divergence experiment", || {
        let r = run_divergence_experiment(&scenario("divergence", &out, &cache)).unwrap();
        let (pass, line) = check_line(&r, &["all_eps_completed", "p3_increasing", "accel_ratio", "separation"]);
        outcome(pass && !r.halted(), line)
    }));
    results.push(run(12, "body/lab cross-validation", body_lab));

    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
