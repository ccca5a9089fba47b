//! Classical fourth-order Runge-Kutta on any state closed under `y + a·k`.

use crate::error::{FilamentError, Result};

/// States that RK4 can combine.
pub trait Axpy: Clone {
    /// `self + a·rate`.
    fn axpy(&self, a: f64, rate: &Self) -> Self;
}

impl Axpy for f64 {
    fn axpy(&self, a: f64, rate: &Self) -> Self {
        self + a * rate
    }
}

impl<const N: usize> Axpy for [f64; N] {
    fn axpy(&self, a: f64, rate: &Self) -> Self {
        std::array::from_fn(|i| self[i] + a * rate[i])
    }
}

/// One step of size `dt`. `f(offset, y)` is the rate at time `t + offset`.
pub fn rk4<S, F>(y: &S, dt: f64, mut f: F) -> Result<S>
where
    S: Axpy,
    F: FnMut(f64, &S) -> Result<S>,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(FilamentError::InvalidTimestep(dt));
    }
    let h = 0.5 * dt;
    let k1 = f(0.0, y)?;
    let k2 = f(h, &y.axpy(h, &k1))?;
    let k3 = f(h, &y.axpy(h, &k2))?;
    let k4 = f(dt, &y.axpy(dt, &k3))?;
    Ok(y.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4))
}
