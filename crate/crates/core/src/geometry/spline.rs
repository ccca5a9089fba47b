//! Periodic cubic spline through 3D points with arbitrary knot spacing.

use crate::numerics::V3;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    /// Knots t_0 < ... < t_{n-1}; the period closes at `period`.
    knots: Vec<f64>,
    period: f64,
    points: Vec<V3>,
    /// Second derivatives at the knots.
    m: Vec<V3>,
    uniform: bool,
}

impl PeriodicSpline {
    /// Interpolant through `points` at `knots` (strictly increasing, all below `period`).
    pub fn new(points: Vec<V3>, knots: Vec<f64>, period: f64) -> Self {
        let n = points.len();
        assert!(n >= 3 && knots.len() == n);
        let h: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { knots[i + 1] - knots[i] } else { period - knots[n - 1] + knots[0] })
            .collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![V3::zeros(); n];
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            sub[i] = h[im];
            diag[i] = 2.0 * (h[im] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((points[ip] - points[i]) / h[i] - (points[i] - points[im]) / h[im]);
        }
        let m = solve_cyclic(&sub, &diag, &sup, &rhs);
        let h0 = h[0];
        let uniform = h.iter().all(|v| (v - h0).abs() <= 1e-13 * h0);
        Self { knots, period, points, m, uniform }
    }

    /// Interpolant through `points` at uniform knots j·period/n.
    pub fn uniform(points: Vec<V3>, period: f64) -> Self {
        let n = points.len();
        let knots = (0..n).map(|j| period * j as f64 / n as f64).collect();
        Self::new(points, knots, period)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Segment index and local coordinates (t - t_i, t_{i+1} - t, h_i).
    fn locate(&self, t: f64) -> (usize, f64, f64, f64) {
        let n = self.points.len();
        let t = t.rem_euclid(self.period);
        let i = if self.uniform {
            let mut i = ((t / self.period * n as f64).floor() as usize).min(n - 1);
            if i > 0 && t < self.knots[i] {
                i -= 1;
            } else if i + 1 < n && t >= self.knots[i + 1] {
                i += 1;
            }
            i
        } else {
            match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
                Ok(i) => i,
                Err(0) => n - 1,
                Err(i) => i - 1,
            }
        };
        let t0 = self.knots[i];
        let t1 = if i + 1 < n { self.knots[i + 1] } else { self.period + self.knots[0] };
        let b = if t < t0 { t + self.period - t0 } else { t - t0 };
        let h = t1 - t0;
        (i, b, h - b, h)
    }

    /// Value and first three derivatives at `t`.
    pub fn eval_all(&self, t: f64) -> [V3; 4] {
        let n = self.points.len();
        let (i, b, a, h) = self.locate(t);
        let j = (i + 1) % n;
        let (mi, mj) = (self.m[i], self.m[j]);
        let (yi, yj) = (self.points[i], self.points[j]);
        let ci = yi / h - mi * (h / 6.0);
        let cj = yj / h - mj * (h / 6.0);
        let val = mi * (a * a * a / (6.0 * h)) + mj * (b * b * b / (6.0 * h)) + ci * a + cj * b;
        let d1 = -mi * (a * a / (2.0 * h)) + mj * (b * b / (2.0 * h)) - ci + cj;
        let d2 = mi * (a / h) + mj * (b / h);
        let d3 = (mj - mi) / h;
        [val, d1, d2, d3]
    }

    pub fn eval(&self, t: f64) -> V3 {
        self.eval_all(t)[0]
    }

    pub fn deriv(&self, t: f64) -> V3 {
        self.eval_all(t)[1]
    }

    pub fn deriv2(&self, t: f64) -> V3 {
        self.eval_all(t)[2]
    }

    /// Segment endpoints for segment `i`.
    pub fn segment(&self, i: usize) -> (f64, f64) {
        let n = self.points.len();
        let t0 = self.knots[i];
        let t1 = if i + 1 < n { self.knots[i + 1] } else { self.period + self.knots[0] };
        (t0, t1)
    }
}

/// Solves a cyclic tridiagonal system (Sherman-Morrison on the Thomas algorithm).
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[V3]) -> Vec<V3> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![V3::zeros(); n];
    u[0] = V3::repeat(gamma);
    u[n - 1] = V3::repeat(alpha);
    let z = thomas(sub, &d, sup, &u);
    let fact_num = x[0] + x[n - 1] * (beta / gamma);
    let fact_den = V3::repeat(1.0) + z[0] + z[n - 1] * (beta / gamma);
    let fact = fact_num.component_div(&fact_den);
    x.iter().zip(&z).map(|(xi, zi)| xi - zi.component_mul(&fact)).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[V3]) -> Vec<V3> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![V3::zeros(); n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / den;
        d[i] = (rhs[i] - d[i - 1] * sub[i]) / den;
    }
    let mut x = vec![V3::zeros(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - x[i + 1] * c[i];
    }
    x
}
