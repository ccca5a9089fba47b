//! Small numerical helpers shared by the modules: Gauss-Legendre rules,
//! compensated summation, cross-product matrices and log-log fits.

use nalgebra::{Matrix3, Vector3};

pub type V3 = Vector3<f64>;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Compensated accumulator for 3-vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedV3([Compensated; 3]);

impl CompensatedV3 {
    pub fn add(&mut self, v: &V3) {
        for k in 0..3 {
            self.0[k].add(v[k]);
        }
    }

    pub fn value(&self) -> V3 {
        V3::new(self.0[0].value(), self.0[1].value(), self.0[2].value())
    }
}

/// Matrix of `v ∧ ·`.
pub fn cross_matrix(v: &V3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Scalar triple product [a, b, c] = a · (b ∧ c).
#[inline]
pub fn triple(a: &V3, b: &V3, c: &V3) -> f64 {
    a.dot(&b.cross(c))
}

/// The six rigid modes ζ_i at `x`: e_1, e_2, e_3, e_1∧x, e_2∧x, e_3∧x.
#[inline]
pub fn zeta(x: &V3) -> [V3; 6] {
    [
        V3::x(),
        V3::y(),
        V3::z(),
        V3::new(0.0, -x.z, x.y),
        V3::new(x.z, 0.0, -x.x),
        V3::new(-x.y, x.x, 0.0),
    ]
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_slope(&lx, &ly)
}

/// Least-squares slope of y against x.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Nearest rotation to `m` (polar factor), computed by Newton iteration.
pub fn orthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let mut q = *m;
    for _ in 0..30 {
        let inv_t = match q.try_inverse() {
            Some(i) => i.transpose(),
            None => return q,
        };
        let next = 0.5 * (q + inv_t);
        let diff = (next - q).norm();
        q = next;
        if diff < 1e-15 {
            break;
        }
    }
    q
}

/// Rotation matrix about unit `axis` by `angle`.
pub fn rotation(axis: &V3, angle: f64) -> Matrix3<f64> {
    let k = cross_matrix(axis);
    Matrix3::identity() + angle.sin() * k + (1.0 - angle.cos()) * k * k
}
