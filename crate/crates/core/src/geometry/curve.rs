//! Closed curves sampled uniformly in arc length.

use nalgebra::Matrix3;
use sha2::{Digest, Sha256};

use super::spline::PeriodicSpline;
use crate::error::{FilamentError, Result};
use crate::numerics::{gauss_legendre, V3};

const ARC_GAUSS: usize = 16;

/// A closed curve with `N` samples at uniform arc-length spacing `h = L/N`,
/// stored together with the periodic cubic spline through those samples.
#[derive(Debug, Clone)]
pub struct Curve {
    samples: Vec<V3>,
    arc_params: Vec<f64>,
    length: f64,
    spline: PeriodicSpline,
}

impl Curve {
    /// Uniform arc-length resampling of the periodic spline through `points`.
    pub fn resample_arclength(points: &[V3], n: usize) -> Result<Curve> {
        if n < 16 {
            return Err(FilamentError::InvalidArgument(format!("need N >= 16 samples, got {n}")));
        }
        let pts = clean_input(points)?;
        let mut knots = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        for i in 0..pts.len() {
            knots.push(acc);
            acc += (pts[(i + 1) % pts.len()] - pts[i]).norm();
        }
        let input = PeriodicSpline::new(pts, knots, acc);
        let table = ArcTable::new(&input);
        let length = table.total();
        let targets: Vec<f64> = (0..n).map(|k| length * k as f64 / n as f64).collect();
        let samples: Vec<V3> = targets.iter().map(|&s| input.eval(table.invert(&input, s))).collect();
        let curve = Curve::from_uniform_samples_with_length(samples, length);
        curve.check_self_intersection()?;
        Ok(curve)
    }

    /// Curve through samples that are already uniform in arc length.
    pub fn from_uniform_samples(samples: Vec<V3>) -> Result<Curve> {
        if samples.len() < 16 {
            return Err(FilamentError::InvalidArgument("need at least 16 samples".into()));
        }
        let n = samples.len();
        let poly: f64 = (0..n).map(|i| (samples[(i + 1) % n] - samples[i]).norm()).sum();
        if poly <= 0.0 {
            return Err(FilamentError::DegenerateCurve("zero length".into()));
        }
        let spline = PeriodicSpline::uniform(samples.clone(), poly);
        let length = ArcTable::new(&spline).total();
        let curve = Curve::from_uniform_samples_with_length(samples, length);
        curve.check_self_intersection()?;
        Ok(curve)
    }

    fn from_uniform_samples_with_length(samples: Vec<V3>, length: f64) -> Curve {
        let n = samples.len();
        let arc_params = (0..n).map(|k| length * k as f64 / n as f64).collect();
        let spline = PeriodicSpline::uniform(samples.clone(), length);
        Curve { samples, arc_params, length, spline }
    }

    fn check_self_intersection(&self) -> Result<()> {
        let n = self.samples.len();
        let h = self.spacing();
        for i in 0..n {
            for j in (i + 3)..n {
                let gap = (j - i).min(n + i - j);
                if gap < 3 {
                    continue;
                }
                if (self.samples[i] - self.samples[j]).norm() <= 2.0 * h {
                    return Err(FilamentError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> &[V3] {
        &self.samples
    }

    pub fn arc_params(&self) -> &[f64] {
        &self.arc_params
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        true
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.samples.len() as f64
    }

    pub fn position(&self, t: f64) -> V3 {
        self.spline.eval(t)
    }

    /// dγ/dt; unit up to the spline error.
    pub fn derivative(&self, t: f64) -> V3 {
        self.spline.deriv(t)
    }

    pub fn second_derivative(&self, t: f64) -> V3 {
        self.spline.deriv2(t)
    }

    /// Position and first two derivatives.
    pub fn jet(&self, t: f64) -> [V3; 3] {
        let a = self.spline.eval_all(t);
        [a[0], a[1], a[2]]
    }

    pub fn unit_tangent(&self, t: f64) -> V3 {
        self.derivative(t).normalize()
    }

    /// Curvature |γ'∧γ''|/|γ'|³ at `t`.
    pub fn curvature(&self, t: f64) -> f64 {
        let [_, d1, d2] = self.jet(t);
        d1.cross(&d2).norm() / d1.norm().powi(3)
    }

    /// Smallest osculating radius, sampled at the knots and the segment midpoints.
    pub fn min_curvature_radius(&self) -> f64 {
        let h = self.spacing();
        let kmax = (0..2 * self.len()).map(|k| self.curvature(0.5 * h * k as f64)).fold(0.0, f64::max);
        if kmax == 0.0 {
            f64::INFINITY
        } else {
            1.0 / kmax
        }
    }

    /// Arc-length mean of the samples (center of mass of a uniform tube to O(ε²)).
    pub fn centroid(&self) -> V3 {
        self.samples.iter().sum::<V3>() / self.samples.len() as f64
    }

    pub fn translated(&self, c: &V3) -> Curve {
        let s = self.samples.iter().map(|p| p + c).collect();
        Curve::from_uniform_samples_with_length(s, self.length)
    }

    /// Rigid motion x -> q x + h.
    pub fn transformed(&self, q: &Matrix3<f64>, h: &V3) -> Curve {
        let s = self.samples.iter().map(|p| q * p + h).collect();
        Curve::from_uniform_samples_with_length(s, self.length)
    }

    /// Same point set traversed in the opposite direction.
    pub fn reversed(&self) -> Curve {
        let n = self.samples.len();
        let s = (0..n).map(|k| self.samples[(n - k) % n]).collect();
        Curve::from_uniform_samples_with_length(s, self.length)
    }

    /// Arc parameter of the closest point and its distance.
    pub fn closest_point(&self, x: &V3) -> (f64, f64) {
        let (j, _) = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, p)| (j, (p - x).norm_squared()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let h = self.spacing();
        let mut t = self.arc_params[j];
        for _ in 0..30 {
            let [p, d1, d2] = self.jet(t);
            let r = p - x;
            let f = r.dot(&d1);
            let df = d1.norm_squared() + r.dot(&d2);
            if df <= 0.0 {
                break;
            }
            let step = (f / df).clamp(-h, h);
            t -= step;
            if step.abs() < 1e-15 * self.length {
                break;
            }
        }
        let t = t.rem_euclid(self.length);
        (t, (self.position(t) - x).norm())
    }

    pub fn distance(&self, x: &V3) -> f64 {
        self.closest_point(x).1
    }

    /// Hex digest of the sample coordinates, used as a cache key.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for p in &self.samples {
            for k in 0..3 {
                hasher.update(p[k].to_le_bytes());
            }
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn clean_input(points: &[V3]) -> Result<Vec<V3>> {
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(FilamentError::DegenerateCurve("non-finite coordinate".into()));
    }
    let mut pts = points.to_vec();
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-12 * scale;
    if pts.len() >= 2 && (pts[0] - pts[pts.len() - 1]).norm() <= tol {
        pts.pop();
    }
    for i in 0..pts.len() {
        let j = (i + 1) % pts.len();
        if (pts[i] - pts[j]).norm() <= tol {
            return Err(FilamentError::DegenerateCurve(format!("points {i} and {j} coincide")));
        }
    }
    if pts.len() < 4 {
        return Err(FilamentError::DegenerateCurve(format!("need at least 4 distinct points, got {}", pts.len())));
    }
    Ok(pts)
}

/// Cumulative arc length at the knots of a spline.
struct ArcTable {
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ArcTable {
    fn new(s: &PeriodicSpline) -> Self {
        let (nodes, weights) = gauss_legendre(ARC_GAUSS);
        let mut t = ArcTable { cumulative: vec![0.0], nodes, weights };
        let mut acc = 0.0;
        for i in 0..s.len() {
            let (a, b) = s.segment(i);
            acc += t.integrate(s, a, b);
            t.cumulative.push(acc);
        }
        t
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn integrate(&self, s: &PeriodicSpline, a: f64, b: f64) -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * h * s.deriv(c + h * x).norm()).sum()
    }

    /// Spline parameter at arc length `target`.
    fn invert(&self, s: &PeriodicSpline, target: f64) -> f64 {
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&target).unwrap()) {
            Ok(i) => i.min(s.len() - 1),
            Err(i) => i - 1,
        };
        let (a, b) = s.segment(i);
        let base = self.cumulative[i];
        let seg_len = self.cumulative[i + 1] - base;
        let mut t = a + (b - a) * (target - base) / seg_len;
        let (mut lo, mut hi) = (a, b);
        for _ in 0..60 {
            let f = base + self.integrate(s, a, t) - target;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / s.deriv(t).norm();
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() < 1e-15 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_pts(n: usize, r: f64) -> Vec<V3> {
        (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                V3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect()
    }

    #[test]
    fn dense_circle_has_length_two_pi() {
        let c = Curve::resample_arclength(&circle_pts(64, 1.0), 256).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-6, "{}", c.length());
    }

    #[test]
    fn samples_are_uniform_in_arc_length() {
        let c = Curve::resample_arclength(&circle_pts(7, 1.0), 128).unwrap();
        let h = c.spacing();
        for w in c.arc_params().windows(2) {
            assert!(((w[1] - w[0]) - h).abs() <= 1e-12 * h);
        }
        for t in c.arc_params() {
            assert!((c.unit_tangent(*t).norm() - 1.0).abs() < 1e-12);
            assert!((c.derivative(*t).norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn duplicate_consecutive_points_rejected() {
        let mut p = circle_pts(8, 1.0);
        p.insert(3, p[3]);
        assert!(matches!(Curve::resample_arclength(&p, 64), Err(FilamentError::DegenerateCurve(_))));
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(Curve::resample_arclength(&circle_pts(8, 1.0), 8).is_err());
    }

    #[test]
    fn figure_eight_crossing_rejected() {
        let p: Vec<V3> = (0..40)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / 40.0;
                V3::new(a.sin(), (2.0 * a).sin() * 0.5, 0.0)
            })
            .collect();
        assert!(matches!(Curve::resample_arclength(&p, 128), Err(FilamentError::SelfIntersecting(_, _))));
    }

    #[test]
    fn closest_point_on_circle() {
        let c = Curve::resample_arclength(&circle_pts(64, 1.0), 256).unwrap();
        let (_, d) = c.closest_point(&V3::new(1.3, 0.4, 0.2));
        let exact = ((V3::new(1.3, 0.4, 0.0).norm() - 1.0).powi(2) + 0.04).sqrt();
        assert!((d - exact).abs() < 1e-7);
    }

    #[test]
    fn reversed_curve_flips_tangent() {
        let c = Curve::resample_arclength(&circle_pts(64, 1.0), 128).unwrap();
        let r = c.reversed();
        assert!((r.samples()[0] - c.samples()[0]).norm() < 1e-15);
        assert!((r.derivative(0.0) + c.derivative(0.0)).norm() < 1e-8);
    }
}
