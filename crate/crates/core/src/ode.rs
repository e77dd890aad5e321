//! Fixed-step classical Runge-Kutta, shared by the flat and curved radial
//! integrators.

use crate::error::{domain, Result};

/// Integrates `y' = rhs(x, y)` from `x0` to `x1` with RK4.
///
/// The step count is `ceil((x1 - x0) / step)` and the effective step is
/// shrunk so the last sample lands exactly on `x1`. Samples include both
/// end points.
pub(crate) fn rk4<const N: usize, F>(
    mut rhs: F,
    x0: f64,
    x1: f64,
    step: f64,
    y0: [f64; N],
) -> Result<Vec<(f64, [f64; N])>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
        return Err(domain(format!("integration interval [{x0}, {x1}] is empty or not finite")));
    }
    if !(step > 0.0 && step < x1 - x0) {
        return Err(domain(format!(
            "step {step} must be positive and smaller than the interval length {}",
            x1 - x0
        )));
    }
    let n = ((x1 - x0) / step).ceil() as usize;
    let h = (x1 - x0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push((x0, y));
    for i in 0..n {
        let x = x0 + i as f64 * h;
        let k1 = rhs(x, &y)?;
        let k2 = rhs(x + h / 2.0, &axpy(&y, h / 2.0, &k1))?;
        let k3 = rhs(x + h / 2.0, &axpy(&y, h / 2.0, &k2))?;
        let k4 = rhs(x + h, &axpy(&y, h, &k3))?;
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let xn = if i + 1 == n { x1 } else { x0 + (i + 1) as f64 * h };
        out.push((xn, y));
    }
    Ok(out)
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|j| y[j] + a * k[j])
}
