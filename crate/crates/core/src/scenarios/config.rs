//! Scenario configuration: TOML text merged over per-scenario defaults.

use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector6};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coefficients::{InertiaSpec, ScalingMode};
use crate::error::{FilamentError, Result};
use crate::geometry::{curve_from_spec, Curve};
use crate::kernels::RingBlob;
use crate::numerics::V3;

/// Valid scenario names.
pub const SCENARIOS: [&str; 3] = ["convergence", "trajectory", "divergence"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InertiaConfig {
    pub m: f64,
    pub j0: [[f64; 3]; 3],
    pub scaling: ScalingMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub nt: usize,
    pub ntheta: usize,
}

/// Initial vorticity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum VorticityConfig {
    None,
    /// ω₀ = strength·η(|x + s0 e3|/core)(x₂, −x₁, 0) with η(ρ) = (1 − ρ²)³.
    Ring { s0: f64, strength: f64, core: f64, particles: usize, delta_factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Built-in curve spec (e.g. `"circle R=1"`) or `file:<path>`.
    pub curve: String,
    pub curve_samples: usize,
    pub eps_list: Vec<f64>,
    pub mu: f64,
    /// Initial p = (ℓ, Ω); drawn from the seed when absent.
    pub p0: Option<[f64; 6]>,
    /// Reference state for the Γ_a magnitude in the convergence study.
    pub p_ref: [f64; 6],
    pub inertia: InertiaConfig,
    pub vorticity: VorticityConfig,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between time-series rows.
    pub output_stride: usize,
    pub mesh: MeshConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Directory for assembled BEM matrices; no caching when absent.
    pub cache_dir: Option<PathBuf>,
    pub reflection_stride: usize,
    /// Overrides the model default (3ε for a tube, 0.05·L for the limit).
    pub separation_floor: Option<f64>,
    /// Distance from the curve of the velocity probes.
    pub probe_distance: f64,
}

fn invalid(msg: impl Into<String>) -> FilamentError {
    FilamentError::InvalidConfig(msg.into())
}

fn check_scenario(name: &str) -> Result<()> {
    if SCENARIOS.contains(&name) {
        Ok(())
    } else {
        Err(invalid(format!("unknown scenario '{name}'; valid names: {}", SCENARIOS.join(", "))))
    }
}

impl ScenarioConfig {
    /// Defaults for one scenario.
    pub fn defaults(scenario: &str) -> Result<ScenarioConfig> {
        check_scenario(scenario)?;
        let mut c = ScenarioConfig {
            scenario: scenario.to_string(),
            curve: "circle R=1".into(),
            curve_samples: 1024,
            eps_list: vec![0.2, 0.1, 0.05],
            mu: 1.0,
            p0: Some([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            p_ref: [0.3, -0.5, 0.7, 0.2, 0.4, -0.6],
            inertia: InertiaConfig { m: 1.0, j0: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], scaling: ScalingMode::Massive },
            vorticity: VorticityConfig::None,
            dt: 1e-3,
            t_end: 1.0,
            output_stride: 10,
            mesh: MeshConfig { nt: 128, ntheta: 16 },
            output_dir: PathBuf::from(format!("out/{scenario}")),
            seed: 0,
            cache_dir: None,
            reflection_stride: 1,
            separation_floor: None,
            probe_distance: 1.0,
        };
        if scenario == "divergence" {
            c.eps_list = vec![0.1, 0.05];
            c.p0 = Some([0.0; 6]);
            c.inertia.scaling = ScalingMode::Density;
            c.vorticity = VorticityConfig::Ring { s0: 10.0, strength: -1.0, core: 1.0, particles: 10_000, delta_factor: 1.5 };
            c.dt = 0.05;
            c.t_end = 0.5;
            c.output_stride = 1;
        }
        Ok(c)
    }

    /// Parses TOML text over the defaults of `scenario` (or of the file's own
    /// `scenario` key when `scenario` is `None`).
    pub fn from_toml(text: &str, scenario: Option<&str>) -> Result<ScenarioConfig> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| invalid(e.message().to_string()))?;
        let named = match user.get("scenario") {
            Some(toml::Value::String(s)) => Some(s.as_str()),
            Some(_) => return Err(invalid("'scenario' must be a string")),
            None => None,
        };
        let name = match (scenario, named) {
            (Some(a), Some(b)) if a != b => {
                check_scenario(b)?;
                return Err(invalid(format!("config is for scenario '{b}', not '{a}'")));
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(invalid("no scenario given")),
        };
        let defaults = Self::defaults(name)?;
        let mut base = toml::Table::try_from(&defaults).map_err(|e| invalid(e.to_string()))?;
        merge(&mut base, user);
        let config: ScenarioConfig = toml::Value::Table(base).try_into().map_err(|e: toml::de::Error| invalid(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, scenario: Option<&str>) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, scenario)
    }

    /// Canonical TOML form; the basis of the config hash.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex sha256 of the canonical form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn inertia_spec(&self) -> Result<InertiaSpec> {
        let j = &self.inertia.j0;
        let j0 = Matrix3::from_fn(|r, c| j[r][c]);
        InertiaSpec::new(self.inertia.m, j0, self.inertia.scaling).map_err(|e| invalid(e.to_string()))
    }

    pub fn build_curve(&self) -> Result<Curve> {
        curve_from_spec(&self.curve, self.curve_samples).map_err(|e| invalid(format!("curve '{}': {e}", self.curve)))
    }

    /// The configured p0, or one drawn uniformly from [−1, 1]⁶ with the seed.
    pub fn initial_p(&self) -> Vector6<f64> {
        match self.p0 {
            Some(p) => Vector6::from_column_slice(&p),
            None => {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
                Vector6::from_fn(|_, _| rng.gen_range(-1.0..1.0))
            }
        }
    }

    pub fn ring(&self) -> Option<RingBlob> {
        match self.vorticity {
            VorticityConfig::None => None,
            VorticityConfig::Ring { s0, strength, core, particles, delta_factor } => {
                Some(RingBlob { center: V3::new(0.0, 0.0, -s0), strength, core, particles, delta_factor })
            }
        }
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Checks every field against what the downstream operations accept.
    pub fn validate(&self) -> Result<()> {
        check_scenario(&self.scenario)?;
        let finite = |name: &str, v: f64| if v.is_finite() { Ok(()) } else { Err(invalid(format!("{name} must be finite"))) };
        finite("mu", self.mu)?;
        for v in self.p0.iter().flatten().chain(&self.p_ref) {
            finite("p0/p_ref", *v)?;
        }
        if self.curve_samples < 16 {
            return Err(invalid(format!("curve_samples = {} below 16", self.curve_samples)));
        }
        if self.mesh.nt < 32 || self.mesh.ntheta < 8 {
            return Err(invalid(format!("mesh ({}, {}) below (32, 8)", self.mesh.nt, self.mesh.ntheta)));
        }
        if self.eps_list.is_empty() {
            return Err(invalid("eps_list is empty"));
        }
        let curve = self.build_curve()?;
        let limit = 0.5 * curve.min_curvature_radius();
        for &e in &self.eps_list {
            if !(e > 0.0 && e < limit) {
                return Err(invalid(format!("eps {e} outside (0, {limit:.4}) for this curve")));
            }
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || self.dt > self.t_end || !self.t_end.is_finite() {
            return Err(invalid(format!("need 0 < dt <= t_end, got dt = {}, t_end = {}", self.dt, self.t_end)));
        }
        if ((self.t_end / self.dt).round() * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(invalid("t_end must be a whole number of steps"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(invalid(format!("seed {} exceeds {}", self.seed, i64::MAX)));
        }
        if self.output_stride == 0 || self.reflection_stride == 0 {
            return Err(invalid("output_stride and reflection_stride must be at least 1"));
        }
        if let Some(f) = self.separation_floor {
            if !(f >= 0.0) {
                return Err(invalid(format!("separation_floor must be non-negative, got {f}")));
            }
        }
        if !(self.probe_distance > 0.0) {
            return Err(invalid("probe_distance must be positive"));
        }
        self.inertia_spec()?;
        if let VorticityConfig::Ring { s0, strength, core, particles, delta_factor } = self.vorticity {
            for (name, v) in [("s0", s0), ("strength", strength)] {
                finite(name, v)?;
            }
            if !(core > 0.0) || !(delta_factor > 0.0) || particles == 0 {
                return Err(invalid("ring needs core > 0, delta_factor > 0 and at least one particle"));
            }
        }
        let decreasing = self.eps_list.windows(2).all(|w| w[1] < w[0]);
        match self.scenario.as_str() {
            "convergence" if self.eps_list.len() < 3 || !decreasing => {
                Err(invalid("convergence needs at least three strictly decreasing eps values"))
            }
            "divergence" => {
                if !self.curve.trim_start().starts_with("circle") {
                    return Err(invalid("divergence needs a circle curve"));
                }
                if self.ring().is_none() || self.inertia.scaling != ScalingMode::Density {
                    return Err(invalid("divergence needs ring vorticity and density scaling"));
                }
                let p = self.initial_p();
                if [0, 1, 3, 4, 5].iter().any(|&i| p[i] != 0.0) {
                    return Err(invalid("divergence needs an axial p0 (only p0[2] may be non-zero)"));
                }
                if !decreasing {
                    return Err(invalid("divergence needs strictly decreasing eps values"));
                }
                Ok(())
            }
            "trajectory" if self.inertia.scaling != ScalingMode::Massive => {
                Err(invalid("trajectory compares against the limit system and needs massive scaling"))
            }
            _ => Ok(()),
        }
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if k != "vorticity" => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

struct Key {
    name: &'static str,
    doc: &'static str,
}

const KEYS: [Key; 20] = [
    Key { name: "scenario", doc: "Scenario name: convergence, trajectory or divergence." },
    Key { name: "curve", doc: "Built-in curve (`circle R=..`, `ellipse a=.. b=..`, `trefoil scale=..`, `torus-knot p=.. q=.. R=.. r=..`) or `file:<path>` to a 3-column point table." },
    Key { name: "curve_samples", doc: "Arc-length samples of the centre line (at least 16)." },
    Key { name: "eps_list", doc: "Tube radii. Convergence needs at least three strictly decreasing values." },
    Key { name: "mu", doc: "Circulation around the filament; constant during a run." },
    Key { name: "p0", doc: "Initial (l1, l2, l3, w1, w2, w3) in the body frame. Drawn from `seed` when omitted." },
    Key { name: "p_ref", doc: "Reference state for the Gamma_a magnitude in the convergence study." },
    Key { name: "inertia.m", doc: "Body mass." },
    Key { name: "inertia.j0", doc: "Rotational inertia (3x3, symmetric positive definite)." },
    Key { name: "inertia.scaling", doc: "`massive` keeps m, J0 fixed; `density` uses eps^2 m and eps^2 J0." },
    Key { name: "vorticity", doc: "`{ kind = \"none\" }` or `{ kind = \"ring\", s0, strength, core, particles, delta_factor }`: omega0 = strength * eta(|x + s0 e3| / core) (x2, -x1, 0) with eta(r) = (1 - r^2)^3. With the counter-clockwise circle a negative strength pushes p3 upwards." },
    Key { name: "dt", doc: "RK4 step." },
    Key { name: "t_end", doc: "Final time (a whole number of steps)." },
    Key { name: "output_stride", doc: "Steps between time-series rows." },
    Key { name: "mesh.nt, mesh.ntheta", doc: "Panels along the curve and around the cross-section (at least 32 and 8)." },
    Key { name: "output_dir", doc: "Directory for CSV, SVG and manifest files." },
    Key { name: "seed", doc: "Seed for drawn initial data; identical seed and config give identical CSVs." },
    Key { name: "cache_dir", doc: "Optional directory caching assembled boundary-element matrices." },
    Key { name: "reflection_stride", doc: "1 re-solves the reflection field at every RK stage; s > 1 solves it every s steps and holds it in between." },
    Key { name: "separation_floor, probe_distance", doc: "Minimum vorticity distance to the curve (default 3 eps, or 0.05 L in the limit); distance of the trajectory velocity probes from the curve." },
];

/// Markdown reference of every key with its default per scenario.
pub fn config_reference() -> String {
    let mut out = String::from("# Scenario configuration reference\n\n");
    out.push_str("Configs are TOML. Keys left out take the scenario default below. Unknown keys are rejected.\n\n");
    out.push_str("| key | meaning |\n|---|---|\n");
    for k in &KEYS {
        out.push_str(&format!("| `{}` | {} |\n", k.name, k.doc));
    }
    for name in SCENARIOS {
        let d = ScenarioConfig::defaults(name).expect("valid scenario");
        out.push_str(&format!("\n## Defaults: {name}\n\n```toml\n{}```\n", d.to_toml()));
    }
    out
}
