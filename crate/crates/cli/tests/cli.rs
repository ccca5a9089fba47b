use std::path::Path;
use std::process::{Command, Output};

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn unknown_scenario_exits_with_validation_code() {
    let out = simulate(&["spin-up"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("convergence") && err.contains("trajectory") && err.contains("divergence"), "{err}");
}

#[test]
fn unknown_config_key_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "scenario = \"trajectory\"\ntimestep = 0.1\n");
    assert_eq!(simulate(&["trajectory", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn bad_eps_override_exits_with_validation_code() {
    assert_eq!(simulate(&["convergence", "--eps", "0.1,0.05"]).status.code(), Some(2));
}

#[test]
fn reference_lists_every_key() {
    let out = simulate(&["--reference"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["eps_list", "reflection_stride", "separation_floor", "cache_dir"] {
        assert!(text.contains(key), "{key}");
    }
}

#[test]
fn small_trajectory_run_succeeds_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scenario = \"trajectory\"\ncurve_samples = 256\nt_end = 0.02\ndt = 0.005\nmesh = { nt = 32, ntheta = 8 }\n",
    );
    let out_dir = tmp.path().join("run");
    let out = simulate(&["trajectory", "--config", &cfg, "--eps", "0.2", "--out", out_dir.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sup_dp"));
    for f in ["manifest.json", "summary.csv", "trajectory_limit.csv", "trajectory_eps_0.2.csv", "config.toml"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let written = std::fs::read_to_string(out_dir.join("config.toml")).unwrap();
    assert!(written.contains("seed = 3") && written.contains("eps_list = [0.2]"), "{written}");
}

#[test]
fn separation_halt_exits_with_code_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scenario = \"divergence\"\neps_list = [0.1]\ncurve_samples = 256\nmesh = { nt = 32, ntheta = 8 }\n\
         vorticity = { kind = \"ring\", s0 = 0.5, strength = -1.0, core = 1.0, particles = 100, delta_factor = 1.5 }\n",
    );
    let out = simulate(&["divergence", "--config", &cfg, "--out", tmp.path().join("run").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
