//! Built-in curves and plain-text curve tables.

use std::f64::consts::PI;
use std::path::Path;

use super::curve::Curve;
use crate::error::{FilamentError, Result};
use crate::numerics::V3;

fn parse_params(tokens: &[&str]) -> Result<Vec<(String, f64)>> {
    tokens
        .iter()
        .map(|tok| {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| FilamentError::InvalidConfig(format!("expected key=value, got '{tok}'")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| FilamentError::InvalidConfig(format!("bad number in '{tok}'")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn param(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(default)
}

/// Names accepted by [`builtin_curve`].
pub const BUILTIN_CURVES: [&str; 4] = ["circle", "ellipse", "trefoil", "torus-knot"];

/// Points of a named analytic curve, e.g. `"circle R=1"`, `"trefoil scale=0.4"`,
/// `"torus-knot p=2 q=3 R=1 r=0.4"`, `"ellipse a=1 b=0.6"`.
pub fn builtin_points(spec: &str, m: usize) -> Result<Vec<V3>> {
    let tokens: Vec<&str> = spec.split_whitespace().collect();
    let (name, rest) = tokens
        .split_first()
        .ok_or_else(|| FilamentError::InvalidConfig("empty curve spec".into()))?;
    let params = parse_params(rest)?;
    let angle = |j: usize| 2.0 * PI * j as f64 / m as f64;
    let pts = match *name {
        "circle" => {
            let r = param(&params, "R", 1.0);
            if !(r > 0.0) {
                return Err(FilamentError::InvalidRadius(r));
            }
            (0..m).map(|j| V3::new(r * angle(j).cos(), r * angle(j).sin(), 0.0)).collect()
        }
        "ellipse" => {
            let (a, b) = (param(&params, "a", 1.0), param(&params, "b", 0.6));
            (0..m).map(|j| V3::new(a * angle(j).cos(), b * angle(j).sin(), 0.0)).collect()
        }
        "trefoil" => {
            let s = param(&params, "scale", 1.0 / 3.0);
            (0..m)
                .map(|j| {
                    let t = angle(j);
                    V3::new(t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()) * s
                })
                .collect()
        }
        "torus-knot" => {
            let p = param(&params, "p", 2.0);
            let q = param(&params, "q", 3.0);
            let big = param(&params, "R", 1.0);
            let small = param(&params, "r", 0.4);
            (0..m).map(|j| torus_knot(p, q, big, small, angle(j))).collect()
        }
        other => {
            return Err(FilamentError::InvalidConfig(format!(
                "unknown curve '{other}', expected one of {BUILTIN_CURVES:?}"
            )))
        }
    };
    Ok(pts)
}

/// Point of the (p, q) torus knot at parameter `t` ∈ [0, 2π).
pub fn torus_knot(p: f64, q: f64, big: f64, small: f64, t: f64) -> V3 {
    let r = big + small * (q * t).cos();
    V3::new(r * (p * t).cos(), r * (p * t).sin(), small * (q * t).sin())
}

/// Named analytic curve resampled to `n` arc-length samples.
pub fn builtin_curve(spec: &str, n: usize) -> Result<Curve> {
    let pts = builtin_points(spec, 8 * n.max(64))?;
    Curve::resample_arclength(&pts, n)
}

/// Reads `x,y,z` (or whitespace separated) rows; `#` starts a comment.
pub fn read_curve_table(path: &Path) -> Result<Vec<V3>> {
    let text = std::fs::read_to_string(path)?;
    parse_curve_table(&text)
}

pub fn parse_curve_table(text: &str) -> Result<Vec<V3>> {
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| FilamentError::InvalidConfig(format!("line {}: not a number", lineno + 1)))?;
        if vals.len() != 3 {
            return Err(FilamentError::InvalidConfig(format!("line {}: expected 3 columns", lineno + 1)));
        }
        pts.push(V3::new(vals[0], vals[1], vals[2]));
    }
    Ok(pts)
}

/// Curve from a spec: a built-in name with parameters, or `file:<path>`.
pub fn curve_from_spec(spec: &str, n: usize) -> Result<Curve> {
    match spec.strip_prefix("file:") {
        Some(path) => Curve::resample_arclength(&read_curve_table(Path::new(path.trim()))?, n),
        None => builtin_curve(spec, n),
    }
}
