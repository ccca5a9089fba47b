//! Limit-versus-tube trajectory comparison from identical initial data.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use nalgebra::Vector6;

use super::config::ScenarioConfig;
use super::csv::CsvTable;
use super::report::{emit_outputs, loglog_plot, read_optional, strictly_decreasing, Analysis, Check, RunData, RunReport};
use super::svg::{Plot, Series};
use super::{build_system, eps_tag, integrate, TubeSystem};
use crate::coefficients::CoefficientSet;
use crate::dynamics::{DynamicsSettings, FlowModel, SimState};
use crate::error::{FilamentError, Result};
use crate::field::VelocityField;
use crate::geometry::Curve;
use crate::kernels::{biot_savart_particles, VortexParticleCloud};
use crate::neumann::reflection_field;
use crate::numerics::{gauss_interval, loglog_slope, V3};

const LIMIT_TABLE: &str = "trajectory_limit.csv";
const PROBES: &str = "probes.csv";
const PROBES_LIMIT: &str = "probes_limit.csv";
const PROBE_COUNT: usize = 4;

fn eps_table(eps: f64) -> String {
    format!("trajectory_{}.csv", eps_tag(eps))
}

/// Probe points at distance `d` from γ(t_k) along rotated normal directions.
fn probe_points(curve: &Curve, d: f64) -> Result<Vec<V3>> {
    let frame = crate::geometry::Frame::build(curve)?;
    Ok((0..PROBE_COUNT)
        .map(|k| {
            let t = (k as f64 + 0.25) * curve.length() / PROBE_COUNT as f64;
            let th = PI / 4.0 + k as f64 * PI / 2.0;
            let (s1, s2, _) = frame.at(curve, t);
            curve.position(t) + (s1 * th.cos() + s2 * th.sin()) * d
        })
        .collect())
}

/// μK[κ] at `x` by 6-point Gauss quadrature on every sample interval of the spline.
fn filament_oracle(curve: &Curve, mu: f64, x: &V3) -> V3 {
    let n = curve.len();
    let h = curve.length() / n as f64;
    let mut u = V3::zeros();
    for i in 0..n {
        for (s, w) in gauss_interval(6, h * i as f64, h * (i + 1) as f64) {
            let [y, t, _] = curve.jet(s);
            let r = x - y;
            u += t.cross(&r) * (w / r.norm().powi(3));
        }
    }
    u * (mu / (4.0 * PI))
}

fn settings(config: &ScenarioConfig, model: &FlowModel) -> DynamicsSettings {
    let mut s = DynamicsSettings::for_model(model);
    if let Some(f) = config.separation_floor {
        s.separation_floor = f;
    }
    s.reflection_stride = config.reflection_stride;
    s
}

fn initial_cloud(config: &ScenarioConfig) -> Result<VortexParticleCloud> {
    match config.ring() {
        Some(spec) => VortexParticleCloud::ring_blob(&spec),
        None => Ok(VortexParticleCloud::empty(1.0)),
    }
}

/// Body-frame tube velocity μH^ε + Σ p_i ∇Φ_i (+ K[ω] + u_ref with vorticity) at each probe.
fn tube_probe_velocities(sys: &TubeSystem, mu: f64, p: &Vector6<f64>, cloud: &VortexParticleCloud, probes: &[V3]) -> Result<Vec<V3>> {
    let reflection = reflection_field(sys.solver.clone(), cloud)?;
    let mut densities: Vec<&[f64]> = sys.kirchhoff.density_slices();
    densities.push(&sys.harmonic.density.values);
    densities.push(&reflection.density.values);
    probes
        .iter()
        .map(|x| {
            let s = sys.solver.evaluate(x, &densities, false);
            let mut u = (sys.harmonic.filament.sample(x, false)?.value + s[6].gradient) * mu + s[7].gradient;
            for i in 0..6 {
                u += s[i].gradient * p[i];
            }
            if !cloud.is_empty() {
                u += biot_savart_particles(cloud, x, false).value;
            }
            Ok(u)
        })
        .collect()
}

/// Integrates the limit system and the tube system at every ε from the same data.
pub fn run_trajectory_comparison(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let curve = Arc::new(config.build_curve()?);
    let inertia = config.inertia_spec()?;
    let p0 = config.initial_p();
    let cloud = initial_cloud(config)?;
    let steps = config.steps();
    let mut data = RunData::default();

    let limit = Arc::new(FlowModel::limit(curve.clone()));
    let FlowModel::Limit { filament, .. } = &*limit else { unreachable!("limit model") };
    let limit_field = filament.scaled(config.mu);
    let coeffs = Arc::new(CoefficientSet::limit(&inertia, &curve));
    let state = SimState::new(limit.clone(), coeffs, config.mu, p0, cloud.clone(), settings(config, &limit));
    match state {
        Ok(s) => {
            let run = integrate(s, config.dt, steps, config.output_stride, false, None)?;
            data.timings.push(("limit".into(), run.seconds));
            data.halts.extend(run.halt);
            data.tables.push((LIMIT_TABLE.into(), run.table));
        }
        Err(e @ FilamentError::SupportTooClose { .. }) => {
            data.halts.push(super::Halt { eps: None, t: 0.0, message: e.to_string() })
        }
        Err(e) => return Err(e),
    }

    let probes = probe_points(&curve, config.probe_distance)?;
    let mut limit_probes = CsvTable::new(
        "probes_limit",
        1,
        &["probe", "x", "y", "z", "distance", "u_x", "u_y", "u_z", "oracle_x", "oracle_y", "oracle_z", "rel_err"],
    );
    let mut limit_u = Vec::new();
    for (k, x) in probes.iter().enumerate() {
        let mut u = limit_field.sample(x, false)?.value;
        let oracle = filament_oracle(&curve, config.mu, x);
        let rel = (u - oracle).norm() / oracle.norm();
        limit_probes.push(vec![k as f64, x.x, x.y, x.z, curve.distance(x), u.x, u.y, u.z, oracle.x, oracle.y, oracle.z, rel]);
        if !cloud.is_empty() {
            u += biot_savart_particles(&cloud, x, false).value;
        }
        limit_u.push(u);
    }
    data.tables.push((PROBES_LIMIT.into(), limit_probes));

    let mut probe_table = CsvTable::new(
        "probes",
        1,
        &["eps", "probe", "distance", "u_eps_x", "u_eps_y", "u_eps_z", "u_star_x", "u_star_y", "u_star_z", "diff", "bound_c"],
    );
    for &eps in &config.eps_list {
        let started = std::time::Instant::now();
        let outcome = (|| -> Result<()> {
            let sys = build_system(config, &curve, eps)?;
            let u = tube_probe_velocities(&sys, config.mu, &p0, &cloud, &probes)?;
            let scale = eps * eps.ln().powi(2);
            for (k, (ue, us)) in u.iter().zip(&limit_u).enumerate() {
                let diff = (ue - us).norm();
                probe_table.push(vec![eps, k as f64, curve.distance(&probes[k]), ue.x, ue.y, ue.z, us.x, us.y, us.z, diff, diff / scale]);
            }
            let model = Arc::new(FlowModel::eps(sys.kirchhoff.clone(), sys.harmonic.clone()));
            let coeffs = Arc::new(CoefficientSet::eps(&inertia, &sys.kirchhoff, &sys.harmonic)?);
            match SimState::new(model.clone(), coeffs, config.mu, p0, cloud.clone(), settings(config, &model)) {
                Ok(s) => {
                    let run = integrate(s, config.dt, steps, config.output_stride, false, Some(eps))?;
                    data.halts.extend(run.halt);
                    data.tables.push((eps_table(eps), run.table));
                }
                Err(e @ FilamentError::SupportTooClose { .. }) => {
                    data.halts.push(super::Halt { eps: Some(eps), t: 0.0, message: e.to_string() })
                }
                Err(e) => return Err(e),
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            data.errors.push(format!("eps {eps}: {e}"));
        }
        data.timings.push((format!("eps {eps}"), started.elapsed().as_secs_f64()));
    }
    data.tables.push((PROBES.into(), probe_table));
    emit_outputs(&data, config)
}

fn max_energy_drift(t: &CsvTable) -> Result<f64> {
    let e = t.column("energy")?;
    let e0 = e.first().copied().unwrap_or(f64::NAN);
    Ok(e.iter().map(|v| (v - e0).abs() / e0.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max))
}

/// Largest |p^ε − p*| over rows with equal times.
fn sup_difference(a: &CsvTable, b: &CsvTable) -> Result<f64> {
    let (ia, ib) = (a.column_index("p1")?, b.column_index("p1")?);
    let mut sup = 0.0f64;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        if ra[0] != rb[0] {
            return Err(FilamentError::InvalidArgument(format!("time columns disagree: {} vs {}", ra[0], rb[0])));
        }
        let d: f64 = (0..6).map(|i| (ra[ia + i] - rb[ib + i]).powi(2)).sum::<f64>().sqrt();
        sup = sup.max(d);
    }
    Ok(sup)
}

pub(crate) fn analyze(dir: &Path, config: &ScenarioConfig) -> Result<Analysis> {
    let limit = read_optional(dir, LIMIT_TABLE)?;
    let probes = read_optional(dir, PROBES)?.unwrap_or_else(|| CsvTable::new("probes", 1, &["eps", "diff", "bound_c"]));
    let limit_probes = read_optional(dir, PROBES_LIMIT)?;
    let mut summary = CsvTable::new("trajectory_summary", 1, &["eps", "sup_dp", "energy_drift", "t_last", "probe_diff_max", "probe_c_max"]);
    let (pe, pd, pc) = (probes.column("eps")?, probes.column("diff")?, probes.column("bound_c")?);
    let mut drift = limit.as_ref().map(max_energy_drift).transpose()?.unwrap_or(f64::NAN);
    let mut series = Vec::new();
    for &eps in &config.eps_list {
        let Some(t) = read_optional(dir, &eps_table(eps))? else { continue };
        let sup = match &limit {
            Some(l) => sup_difference(&t, l)?,
            None => f64::NAN,
        };
        let d = max_energy_drift(&t)?;
        drift = drift.max(d);
        let rows = pe.iter().enumerate().filter(|(_, e)| **e == eps).map(|(i, _)| i);
        let (dmax, cmax) = rows.fold((0.0f64, 0.0f64), |(a, b), i| (a.max(pd[i]), b.max(pc[i])));
        let t_last = t.rows.last().map_or(f64::NAN, |r| r[0]);
        summary.push(vec![eps, sup, d, t_last, dmax, cmax]);
        series.push((eps, t));
    }
    let sup = summary.column("sup_dp")?;
    let cs = summary.column("probe_c_max")?;
    let mut fitted = Vec::new();
    if sup.len() >= 2 {
        fitted.push(("sup_dp".to_string(), loglog_slope(&summary.column("eps")?, &sup)));
        fitted.push(("probe_diff_max".to_string(), loglog_slope(&summary.column("eps")?, &summary.column("probe_diff_max")?)));
    }
    let c0 = cs.first().copied().unwrap_or(f64::NAN);
    let c_stable = !cs.is_empty() && cs.iter().all(|c| *c <= c0 * (1.0 + 1e-9));
    let kernel_err = match &limit_probes {
        Some(t) => t.column("rel_err")?.into_iter().fold(0.0, f64::max),
        None => f64::NAN,
    };
    let complete = summary.rows.len() == config.eps_list.len() && limit.is_some();
    let t_end_reached = summary.column("t_last")?.iter().all(|t| (t - config.t_end).abs() <= 1e-9 * config.t_end);
    let mut checks = vec![
        Check::new("all_eps_completed", summary.rows.len() as f64, complete && t_end_reached, "every run reached t_end"),
        Check::new("sup_dp_decreasing", sup.last().copied().unwrap_or(f64::NAN), strictly_decreasing(&sup), "sup_t |p^eps - p*| strictly decreasing"),
        Check::new("probe_bound_stable", cs.iter().copied().fold(0.0, f64::max), c_stable, "|u^eps - u*| / (eps |log eps|^2) not above its value at the largest eps"),
        Check::new("limit_probe_kernel", kernel_err, kernel_err <= 1e-6, "limit probe field vs Gauss quadrature of mu K[kappa], relative"),
    ];
    if config.ring().is_none() {
        checks.push(Check::new("energy_drift", drift, drift <= 1e-6, "relative energy drift <= 1e-6 (irrotational)"));
    }

    let mut plots = Vec::new();
    if let Some(l) = &limit {
        let t = l.column("t")?;
        let mut s = Vec::new();
        for c in ["p1", "p2", "p3", "p4", "p5", "p6"] {
            s.push(Series { label: format!("{c} limit"), points: t.iter().copied().zip(l.column(c)?).collect() });
        }
        if let Some((eps, tab)) = series.last() {
            let te = tab.column("t")?;
            s.push(Series { label: format!("p1 eps={eps}"), points: te.iter().copied().zip(tab.column("p1")?).collect() });
        }
        plots.push((
            "p_vs_t.svg".to_string(),
            Plot { title: "Body-frame velocities".into(), x_label: "t".into(), y_label: "p".into(), series: s, ..Plot::default() },
        ));
    }
    if summary.rows.len() >= 2 {
        plots.push(("sup_dp.svg".into(), loglog_plot("Limit vs tube", "difference", &summary, &["sup_dp", "probe_diff_max"], &fitted)?));
    }
    Ok(Analysis { summary, fitted, checks, plots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::builtin_curve;

    #[test]
    fn gauss_oracle_matches_on_axis_closed_form() {
        let c = builtin_curve("circle R=1", 256).unwrap();
        let u = filament_oracle(&c, 1.0, &V3::new(0.0, 0.0, 0.7));
        let exact = 1.0 / (2.0 * (1.0f64 + 0.49).powf(1.5));
        assert!((u.z - exact).abs() < 1e-9 * exact, "{} vs {exact}", u.z);
        assert!(u.x.abs() < 1e-12 && u.y.abs() < 1e-12);
    }

    #[test]
    fn probes_sit_at_the_requested_distance_on_a_circle() {
        let c = builtin_curve("circle R=1", 256).unwrap();
        for x in probe_points(&c, 0.5).unwrap() {
            assert!((c.distance(&x) - 0.5).abs() < 1e-6);
        }
    }
}
