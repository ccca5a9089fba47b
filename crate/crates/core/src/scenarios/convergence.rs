//! Coefficient convergence study over a decreasing list of tube radii.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::Vector6;

use super::config::ScenarioConfig;
use super::csv::CsvTable;
use super::report::{emit_outputs, loglog_plot, read_optional, strictly_decreasing, Analysis, Check, RunData, RunReport};
use super::{build_system, TubeSystem};
use crate::coefficients::{bstar_matrix, cal_b_matrix, gamma_a, CoefficientSet};
use crate::error::Result;
use crate::field::VelocityField;
use crate::kernels::h2d_field;
use crate::numerics::loglog_slope;

pub(crate) const TABLE: &str = "convergence.csv";

const COLUMNS: [&str; 13] = [
    "eps",
    "b_eps_err",
    "b_eps_max",
    "b_h2d_err",
    "b_h2d_max",
    "ma_norm",
    "gamma_a_norm",
    "circ_min",
    "circ_max",
    "circ_2eps",
    "normal_residual",
    "h_h2d_l2",
    "ma_asymmetry",
];

/// Circulation of H^ε around the circle of radius 2ε in the cross-section at arc length `t`.
fn loop_circulation(sys: &TubeSystem, t: f64, points: usize) -> Result<f64> {
    let eps = sys.mesh.eps;
    let (s1, s2, _) = sys.mesh.frame.at(&sys.mesh.curve, t);
    let c = sys.mesh.curve.position(t);
    let ds = 2.0 * eps * 2.0 * PI / points as f64;
    let mut sum = 0.0;
    for k in 0..points {
        let th = 2.0 * PI * k as f64 / points as f64;
        let x = c + (s1 * th.cos() + s2 * th.sin()) * (2.0 * eps);
        let e = s2 * th.cos() - s1 * th.sin();
        sum += sys.harmonic.sample(&x, false)?.value.dot(&e) * ds;
    }
    Ok(sum)
}

fn row(config: &ScenarioConfig, sys: &TubeSystem) -> Result<Vec<f64>> {
    let inertia = config.inertia_spec()?;
    let coeffs = CoefficientSet::eps(&inertia, &sys.kirchhoff, &sys.harmonic)?;
    let bstar = bstar_matrix(&sys.mesh.curve);
    let d_eps = coeffs.b - bstar;
    let d_h2d = cal_b_matrix(&sys.mesh, &h2d_field(&sys.mesh)) - bstar;
    let p_ref = Vector6::from_column_slice(&config.p_ref);
    let h = &sys.harmonic;
    let circ: Vec<f64> = (0..sys.mesh.nt).map(|it| h.surface.cross_section_circulation(&sys.mesh, it)).collect();
    let circ_min = circ.iter().copied().fold(f64::INFINITY, f64::min);
    let circ_max = circ.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let circ_2eps = loop_circulation(sys, 0.37 * sys.mesh.curve.length() / (2.0 * PI), 64)?;
    let data_rms = (h.data.iter().map(|v| v * v).sum::<f64>() / h.data.len() as f64).sqrt();
    let normal_residual = sys.solver.residual(&h.density, &h.data) * data_rms / h.surface.rms(&sys.mesh);
    let h_h2d_l2 = h.surface.sub(&h2d_field(&sys.mesh)).l2(&sys.mesh);
    Ok(vec![
        sys.mesh.eps,
        d_eps.norm(),
        d_eps.amax(),
        d_h2d.norm(),
        d_h2d.amax(),
        coeffs.ma.norm(),
        gamma_a(&coeffs, &p_ref).norm(),
        circ_min,
        circ_max,
        circ_2eps,
        normal_residual,
        h_h2d_l2,
        sys.kirchhoff.asymmetry,
    ])
}

/// Builds the boundary-element system at every ε and tabulates the coefficient errors.
/// A failure at one ε is recorded and the sweep continues.
pub fn run_convergence_study(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let curve = Arc::new(config.build_curve()?);
    let mut data = RunData::default();
    let mut table = CsvTable::new("convergence", 1, &COLUMNS);
    for &eps in &config.eps_list {
        let start = Instant::now();
        match build_system(config, &curve, eps).and_then(|sys| row(config, &sys)) {
            Ok(r) => table.push(r),
            Err(e) => data.errors.push(format!("eps {eps}: {e}")),
        }
        data.timings.push((format!("eps {eps}"), start.elapsed().as_secs_f64()));
    }
    data.tables.push((TABLE.into(), table));
    emit_outputs(&data, config)
}

pub(crate) fn analyze(dir: &Path, config: &ScenarioConfig) -> Result<Analysis> {
    let table = read_optional(dir, TABLE)?.unwrap_or_else(|| CsvTable::new("convergence", 1, &COLUMNS));
    let eps = table.column("eps")?;
    let col = |n: &str| table.column(n);
    let mut fitted = Vec::new();
    if eps.len() >= 2 {
        for c in ["b_eps_err", "b_h2d_max", "ma_norm", "gamma_a_norm", "h_h2d_l2"] {
            fitted.push((c.to_string(), loglog_slope(&eps, &col(c)?)));
        }
    }
    let fit = |n: &str| fitted.iter().find(|(k, _)| k == n).map_or(f64::NAN, |(_, v)| *v);
    let b_eps = col("b_eps_err")?;
    let b_h2d_max = col("b_h2d_max")?;
    let h_h2d = col("h_h2d_l2")?;
    let circ_dev = ["circ_min", "circ_max", "circ_2eps"]
        .iter()
        .map(|c| col(c).map(|v| v.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let residual = col("normal_residual")?.into_iter().fold(0.0, f64::max);
    let smallest = b_h2d_max.last().copied().unwrap_or(f64::NAN);
    let complete = eps.len() == config.eps_list.len();
    let checks = vec![
        Check::new("all_eps_completed", eps.len() as f64, complete, format!("{} of {}", eps.len(), config.eps_list.len())),
        Check::new("b_eps_decreasing", b_eps.last().copied().unwrap_or(f64::NAN), strictly_decreasing(&b_eps), "|B^eps - B*| strictly decreasing"),
        Check::new("b_eps_order", fit("b_eps_err"), fit("b_eps_err") >= 0.7, "fitted order >= 0.7"),
        Check::new("b_h2d_entrywise", smallest, smallest <= 0.05, "max entry of B[H2D] - B* at smallest eps <= 0.05"),
        Check::new("b_h2d_order", fit("b_h2d_max"), (0.7..=1.3).contains(&fit("b_h2d_max")), "fitted order in [0.7, 1.3]"),
        Check::new("ma_slope", fit("ma_norm"), (1.6..=2.3).contains(&fit("ma_norm")), "log-log slope of |Ma| in [1.6, 2.3]"),
        Check::new("circulation", circ_dev, complete && circ_dev <= 1e-2, "max |circulation - 1| <= 1e-2"),
        Check::new("normal_residual", residual, complete && residual <= 1e-2, "normal residual rms / field rms <= 1e-2"),
        Check::new("h_h2d_decreasing", h_h2d.last().copied().unwrap_or(f64::NAN), strictly_decreasing(&h_h2d), "surface L2 of H^eps - H2D strictly decreasing"),
    ];
    let plot = loglog_plot("Coefficient errors", "error / norm", &table, &["b_eps_err", "b_h2d_max", "ma_norm", "h_h2d_l2"], &fitted)?;
    Ok(Analysis { summary: table, fitted, checks, plots: vec![("convergence.svg".into(), plot)] })
}
