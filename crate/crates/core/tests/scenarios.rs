use std::path::{Path, PathBuf};

use filament_core::scenarios::{
    config_reference, run_divergence_experiment, run_scenario, run_trajectory_comparison, CsvTable, ScenarioConfig,
    VorticityConfig, SCENARIOS,
};
use filament_core::FilamentError;
use proptest::prelude::*;

fn invalid_message(r: Result<ScenarioConfig, FilamentError>) -> String {
    match r {
        Err(FilamentError::InvalidConfig(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

/// A trajectory run small enough for a unit-test budget.
fn small_trajectory(out: &Path) -> ScenarioConfig {
    let text = format!(
        r#"
scenario = "trajectory"
eps_list = [0.2, 0.1]
curve_samples = 256
t_end = 0.05
dt = 0.005
output_stride = 2
mesh = {{ nt = 32, ntheta = 8 }}
output_dir = "{}"
"#,
        out.display()
    );
    ScenarioConfig::from_toml(&text, None).unwrap()
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect();
    v.sort();
    v
}

#[test]
fn unknown_scenario_lists_valid_names() {
    let m = invalid_message(ScenarioConfig::from_toml("scenario = \"vortex-street\"\n", None));
    for name in SCENARIOS {
        assert!(m.contains(name), "{m}");
    }
    assert!(ScenarioConfig::defaults("nope").is_err());
}

#[test]
fn unknown_keys_are_rejected() {
    let m = invalid_message(ScenarioConfig::from_toml("scenario = \"trajectory\"\nepsilon = 0.1\n", None));
    assert!(m.contains("epsilon"), "{m}");
    let nested = "scenario = \"trajectory\"\n[mesh]\nnt = 64\nnphi = 3\n";
    assert!(ScenarioConfig::from_toml(nested, None).is_err());
}

#[test]
fn partial_tables_merge_over_defaults() {
    let c = ScenarioConfig::from_toml("[mesh]\nnt = 64\n", Some("convergence")).unwrap();
    assert_eq!(c.mesh.nt, 64);
    assert_eq!(c.mesh.ntheta, ScenarioConfig::defaults("convergence").unwrap().mesh.ntheta);
    let d = ScenarioConfig::from_toml("[vorticity]\nkind = \"ring\"\ns0 = 8.0\nstrength = -2.0\ncore = 0.5\nparticles = 10\ndelta_factor = 1.0\n", Some("divergence")).unwrap();
    assert_eq!(d.vorticity, VorticityConfig::Ring { s0: 8.0, strength: -2.0, core: 0.5, particles: 10, delta_factor: 1.0 });
}

#[test]
fn defaults_round_trip_and_validate() {
    for name in SCENARIOS {
        let d = ScenarioConfig::defaults(name).unwrap();
        d.validate().unwrap();
        assert_eq!(ScenarioConfig::from_toml(&d.to_toml(), None).unwrap(), d);
        assert_eq!(d.hash().len(), 64);
    }
}

#[test]
fn scenario_name_must_agree_with_the_file() {
    let m = invalid_message(ScenarioConfig::from_toml("scenario = \"divergence\"\n", Some("trajectory")));
    assert!(m.contains("divergence") && m.contains("trajectory"), "{m}");
}

#[test]
fn downstream_preconditions_are_checked_at_load() {
    let cases = [
        ("convergence", "eps_list = [0.2, 0.1]\n"),
        ("convergence", "eps_list = [0.1, 0.2, 0.05]\n"),
        ("trajectory", "eps_list = [0.6]\n"),
        ("trajectory", "eps_list = [-0.1]\n"),
        ("trajectory", "dt = 0.3\nt_end = 1.0\n"),
        ("trajectory", "dt = 2.0\nt_end = 1.0\n"),
        ("trajectory", "[inertia]\nscaling = \"density\"\n"),
        ("trajectory", "[inertia]\nm = -1.0\n"),
        ("trajectory", "[inertia]\nj0 = [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]\n"),
        ("trajectory", "[mesh]\nntheta = 4\n"),
        ("trajectory", "output_stride = 0\n"),
        ("trajectory", "curve = \"spiral\"\n"),
        ("divergence", "p0 = [0.1, 0.0, 0.0, 0.0, 0.0, 0.0]\n"),
        ("divergence", "[vorticity]\nkind = \"none\"\n"),
        ("divergence", "curve = \"trefoil\"\neps_list = [0.05]\n"),
        ("divergence", "[vorticity]\nkind = \"ring\"\ns0 = 10.0\nstrength = -1.0\ncore = 0.0\nparticles = 10\ndelta_factor = 1.0\n"),
    ];
    for (scenario, text) in cases {
        let r = ScenarioConfig::from_toml(text, Some(scenario));
        assert!(matches!(r, Err(FilamentError::InvalidConfig(_))), "{scenario}: {text} -> {r:?}");
    }
}

#[test]
fn missing_p0_is_drawn_from_the_seed() {
    let base = ScenarioConfig { p0: None, ..ScenarioConfig::defaults("trajectory").unwrap() };
    let a = ScenarioConfig { seed: 7, ..base.clone() };
    let b = ScenarioConfig { seed: 8, ..base };
    assert_eq!(a.initial_p(), a.clone().initial_p());
    assert_ne!(a.initial_p(), b.initial_p());
    assert!(a.initial_p().iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn reference_page_is_in_sync() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/config_reference.md");
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(on_disk, config_reference(), "regenerate with `simulate --reference > docs/config_reference.md`");
}

#[test]
fn reruns_give_byte_identical_csvs_and_a_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let ra = run_trajectory_comparison(&small_trajectory(&a)).unwrap();
    run_trajectory_comparison(&small_trajectory(&b)).unwrap();
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    assert_eq!(fa.len(), fb.len());
    assert!(fa.len() >= 5);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }

    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], small_trajectory(&a).hash());
    let listed = manifest["files"].as_array().unwrap();
    assert_eq!(listed.len(), fa.len());
    for entry in listed {
        let t = CsvTable::read(&a.join(entry["name"].as_str().unwrap())).unwrap();
        assert_eq!(entry["rows"].as_u64().unwrap() as usize, t.rows.len());
        assert_eq!(entry["schema"].as_str().unwrap(), format!("{}/{}", t.schema, t.version));
    }
    assert_eq!(CsvTable::read(&a.join("summary.csv")).unwrap(), ra.summary);
    for plot in &ra.plots {
        assert!(std::fs::read_to_string(a.join(plot)).unwrap().starts_with("<svg"));
    }
}

#[test]
fn time_series_rows_follow_the_output_stride() {
    let tmp = tempfile::tempdir().unwrap();
    let c = small_trajectory(tmp.path());
    let r = run_scenario(&c).unwrap();
    let t = CsvTable::read(&tmp.path().join("trajectory_limit.csv")).unwrap();
    // Steps 0, 2, 4, 6, 8 and the final state at step 10.
    assert_eq!(t.rows.len(), 6);
    assert!((t.rows[5][0] - 0.05).abs() < 1e-12);
    assert!(r.check("energy_drift").unwrap().ok);
    let q: Vec<f64> = (1..=3).flat_map(|i| (1..=3).map(move |j| (i, j))).map(|(i, j)| t.column(&format!("q{i}{j}")).unwrap()[5]).collect();
    let qq = nalgebra::Matrix3::from_row_slice(&q);
    assert!((qq * qq.transpose() - nalgebra::Matrix3::identity()).amax() < 1e-12);
}

#[test]
fn unwritable_output_directory_is_an_io_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let c = small_trajectory(&blocker.join("out"));
    assert!(matches!(run_trajectory_comparison(&c), Err(FilamentError::IoFailure(_))));
}

#[test]
fn divergence_with_a_close_blob_halts_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
scenario = "divergence"
eps_list = [0.1]
curve_samples = 256
mesh = {{ nt = 32, ntheta = 8 }}
vorticity = {{ kind = "ring", s0 = 0.5, strength = -1.0, core = 1.0, particles = 200, delta_factor = 1.5 }}
output_dir = "{}"
"#,
        tmp.path().display()
    );
    let r = run_divergence_experiment(&ScenarioConfig::from_toml(&text, None).unwrap()).unwrap();
    assert!(r.halted());
    assert!(r.halts[0].message.contains("floor"), "{}", r.halts[0].message);
    assert!(!r.check("all_eps_completed").unwrap().ok);
    assert!(tmp.path().join("manifest.json").exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(prop::num::f64::ANY, 3), 0..20)) {
        let mut t = CsvTable::new("prop", 3, &["a", "b", "c"]);
        for r in &rows {
            t.push(r.clone());
        }
        let back = CsvTable::parse(&t.to_text()).unwrap();
        prop_assert_eq!(back.rows.len(), rows.len());
        for (x, y) in back.rows.iter().flatten().zip(rows.iter().flatten()) {
            prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }

    #[test]
    fn config_text_round_trips(p in prop::array::uniform6(-10.0..10.0f64), mu in -5.0..5.0f64, seed in 0..=i64::MAX as u64) {
        let c = ScenarioConfig { p0: Some(p), mu, seed, ..ScenarioConfig::defaults("trajectory").unwrap() };
        let back = ScenarioConfig::from_toml(&c.to_toml(), None).unwrap();
        prop_assert_eq!(back.hash(), c.hash());
        prop_assert_eq!(back, c);
    }
}
