//! Divergence experiment: a light ring driven by a distant coaxial vortex blob.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use super::config::{ScenarioConfig, VorticityConfig};
use super::csv::CsvTable;
use super::report::{emit_outputs, read_optional, Analysis, Check, RunData, RunReport};
use super::svg::{Plot, Series};
use super::{build_system, eps_tag, integrate, Halt, TIMESERIES_COLUMNS};
use crate::coefficients::CoefficientSet;
use crate::dynamics::{DynamicsSettings, FlowModel, SimState};
use crate::error::{FilamentError, Result};
use crate::kernels::{blob_profile, VortexParticleCloud};
use crate::numerics::gauss_interval;

fn eps_table(eps: f64) -> String {
    format!("divergence_{}.csv", eps_tag(eps))
}

/// ∫_{|y|<1} (y₁² + y₂²) η(|y|) dy by Gauss quadrature in the radius.
pub fn profile_second_moment() -> f64 {
    let radial: f64 = gauss_interval(12, 0.0, 1.0).iter().map(|&(r, w)| w * r.powi(4) * blob_profile(r)).sum();
    (2.0 / 3.0) * 4.0 * std::f64::consts::PI * radial
}

/// Far-field forcing −(3/4)·strength·core⁵·M₂·dist⁻⁴ on the unit ring from a blob at axial distance `dist`.
pub fn predicted_d3(strength: f64, core: f64, dist: f64) -> f64 {
    -0.75 * strength * core.powi(5) * profile_second_moment() / dist.powi(4)
}

fn columns() -> Vec<&'static str> {
    TIMESERIES_COLUMNS.iter().copied().chain(["d3_pred"]).collect()
}

/// Runs the reduced axial system at every ε. A separation violation halts that ε and
/// keeps the rows computed so far.
pub fn run_divergence_experiment(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let VorticityConfig::Ring { strength, core, .. } = config.vorticity else {
        return Err(FilamentError::InvalidConfig("divergence needs ring vorticity".into()));
    };
    let spec = config.ring().expect("ring vorticity");
    let curve = Arc::new(config.build_curve()?);
    let inertia = config.inertia_spec()?;
    let p0 = config.initial_p();
    let cloud = VortexParticleCloud::ring_blob(&spec)?;
    let mut data = RunData::default();
    for &eps in &config.eps_list {
        let started = Instant::now();
        let outcome = (|| -> Result<()> {
            let sys = build_system(config, &curve, eps)?;
            let model = Arc::new(FlowModel::eps(sys.kirchhoff.clone(), sys.harmonic.clone()));
            let coeffs = Arc::new(CoefficientSet::eps(&inertia, &sys.kirchhoff, &sys.harmonic)?);
            let mut settings = DynamicsSettings::for_model(&model);
            settings.axial_only = true;
            settings.reflection_stride = config.reflection_stride;
            if let Some(f) = config.separation_floor {
                settings.separation_floor = f;
            }
            let state = match SimState::new(model, coeffs, config.mu, p0, cloud.clone(), settings) {
                Ok(s) => s,
                Err(e @ FilamentError::SupportTooClose { .. }) => {
                    data.halts.push(Halt { eps: Some(eps), t: 0.0, message: e.to_string() });
                    return Ok(());
                }
                Err(e) => return Err(e),
            };
            let run = integrate(state, config.dt, config.steps(), config.output_stride, true, Some(eps))?;
            let cz = run.table.column_index("centroid_z")?;
            let mut table = CsvTable::new("divergence", 1, &columns());
            for mut row in run.table.rows {
                let pred = predicted_d3(strength, core, -row[cz]);
                row.push(pred);
                table.push(row);
            }
            data.halts.extend(run.halt);
            data.tables.push((eps_table(eps), table));
            Ok(())
        })();
        if let Err(e) = outcome {
            data.errors.push(format!("eps {eps}: {e}"));
        }
        data.timings.push((format!("eps {eps}"), started.elapsed().as_secs_f64()));
    }
    emit_outputs(&data, config)
}

pub(crate) fn analyze(dir: &Path, config: &ScenarioConfig) -> Result<Analysis> {
    let mut summary = CsvTable::new(
        "divergence_summary",
        1,
        &[
            "eps",
            "p3_final",
            "early_accel",
            "accel_ratio",
            "accel_theory",
            "increasing",
            "min_separation",
            "floor",
            "d3_ratio0",
            "travel",
            "eps_pow",
            "t_last",
        ],
    );
    let mut runs = Vec::new();
    for &eps in &config.eps_list {
        let Some(t) = read_optional(dir, &eps_table(eps))? else { continue };
        let (time, p3) = (t.column("t")?, t.column("p3")?);
        let early = if p3.len() >= 2 { (p3[1] - p3[0]) / (time[1] - time[0]) } else { f64::NAN };
        let increasing = p3.len() >= 2 && p3.windows(2).all(|w| w[1] > w[0]);
        let min_sep = t.column("min_separation")?.into_iter().fold(f64::INFINITY, f64::min);
        let floor = t.column("floor")?.first().copied().unwrap_or(f64::NAN);
        let (d3, pred) = (t.column("d3")?, t.column("d3_pred")?);
        let ratio0 = d3.first().zip(pred.first()).map_or(f64::NAN, |(a, b)| a / b);
        let travel: f64 = time.windows(2).zip(p3.windows(2)).map(|(tw, pw)| 0.5 * (tw[1] - tw[0]) * (pw[0] + pw[1])).sum();
        let (accel_ratio, theory) = match summary.rows.last() {
            Some(prev) => (early / prev[2], 4.0 / (1.0 + 2f64.ln() / eps.ln().abs())),
            None => (f64::NAN, f64::NAN),
        };
        let t_last = time.last().copied().unwrap_or(f64::NAN);
        summary.push(vec![
            eps,
            p3.last().copied().unwrap_or(f64::NAN),
            early,
            accel_ratio,
            theory,
            f64::from(u8::from(increasing)),
            min_sep,
            floor,
            ratio0,
            travel,
            eps.powf(-0.1),
            t_last,
        ]);
        runs.push((eps, t));
    }
    let complete = summary.rows.len() == config.eps_list.len()
        && summary.column("t_last")?.iter().all(|t| (t - config.t_end).abs() <= 1e-9 * config.t_end);
    let increasing = summary.column("increasing")?;
    let ratios: Vec<f64> = summary.column("accel_ratio")?.into_iter().skip(1).collect();
    let eps = summary.column("eps")?;
    let halving = eps.windows(2).all(|w| (w[0] / w[1] - 2.0).abs() <= 1e-9);
    let sep_margin = summary
        .rows
        .iter()
        .map(|r| r[6] - r[7])
        .fold(f64::INFINITY, f64::min);
    let d3_dev = summary.column("d3_ratio0")?.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let mut checks = vec![
        Check::new("all_eps_completed", summary.rows.len() as f64, complete, "every eps reached t_end"),
        Check::new(
            "p3_increasing",
            increasing.iter().sum(),
            !increasing.is_empty() && increasing.iter().all(|v| *v == 1.0),
            "p3 strictly increasing on every run",
        ),
        Check::new("separation", sep_margin, complete && sep_margin >= 0.0, "min separation minus floor >= 0"),
        Check::new("d3_initial", d3_dev, !summary.rows.is_empty() && d3_dev <= 0.25, "|D3(0) / prediction - 1| <= 0.25"),
    ];
    if !ratios.is_empty() && halving {
        let band = |r: &f64| (2.5..=6.0).contains(r);
        let ok = ratios.iter().all(band);
        let shown = ratios.iter().copied().find(|r| !band(r)).unwrap_or(ratios[0]);
        checks.push(Check::new("accel_ratio", shown, ok, "early p3' ratio per eps halving in [2.5, 6]"));
    }

    let mut p3_series = Vec::new();
    let mut d3_series = Vec::new();
    for (eps, t) in &runs {
        let time = t.column("t")?;
        p3_series.push(Series { label: format!("eps={eps}"), points: time.iter().copied().zip(t.column("p3")?).collect() });
        d3_series.push(Series { label: format!("D3 eps={eps}"), points: time.iter().copied().zip(t.column("d3")?).collect() });
    }
    if let Some((_, t)) = runs.first() {
        let time = t.column("t")?;
        d3_series.push(Series { label: "prediction".into(), points: time.into_iter().zip(t.column("d3_pred")?).collect() });
    }
    let plots = vec![
        ("p3_vs_t.svg".to_string(), Plot { title: "Axial velocity".into(), x_label: "t".into(), y_label: "p3".into(), series: p3_series, ..Plot::default() }),
        ("d3_vs_t.svg".to_string(), Plot { title: "Axial forcing".into(), x_label: "t".into(), y_label: "D3".into(), series: d3_series, ..Plot::default() }),
    ];
    Ok(Analysis { summary, fitted: Vec::new(), checks, plots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_moment_matches_closed_form() {
        // η(r) r⁴ expands to r⁴ − 3r⁶ + 3r⁸ − r¹⁰.
        let closed = 4.0 * std::f64::consts::PI * (1.0 / 5.0 - 3.0 / 7.0 + 3.0 / 9.0 - 1.0 / 11.0) * 2.0 / 3.0;
        assert!((profile_second_moment() - closed).abs() < 1e-14);
    }

    #[test]
    fn prediction_is_positive_for_negative_strength() {
        assert!(predicted_d3(-1.0, 1.0, 10.0) > 0.0);
        let r = predicted_d3(-1.0, 1.0, 10.0) / predicted_d3(-1.0, 1.0, 20.0);
        assert!((r - 16.0).abs() < 1e-12);
    }
}
