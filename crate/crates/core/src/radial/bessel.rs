//! Spherical Bessel functions of integer order for real positive argument.

/// `j_n(x)`, the regular spherical Bessel function.
///
/// Power series for small `x`, upward recurrence once `x` exceeds the
/// order, and Miller's downward recurrence in between.
pub fn spherical_j(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    if ax < 1.0 {
        return series_j(n, x);
    }
    let j0 = x.sin() / x;
    if n == 0 {
        return j0;
    }
    if ax > f64::from(n) {
        let mut prev = j0;
        let mut cur = x.sin() / (x * x) - x.cos() / x;
        for k in 1..n {
            let next = f64::from(2 * k + 1) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    miller_j(n, x, j0)
}

fn series_j(n: u32, x: f64) -> f64 {
    // j_n(x) = x^n/(2n+1)!! Σ_k (−x²/2)^k / (k! (2n+3)(2n+5)…(2n+2k+1))
    let mut lead = 1.0;
    for k in 0..n {
        lead *= x / f64::from(2 * k + 3);
    }
    let z = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40u32 {
        term *= z / (f64::from(k) * f64::from(2 * n + 2 * k + 1));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn miller_j(n: u32, x: f64, j0: f64) -> f64 {
    let start = n + 20 + (x.abs() as u32);
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let prev = f64::from(2 * k + 1) / x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == n {
            wanted = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            wanted *= 1e-250;
        }
    }
    // cur now holds the unnormalised j_0
    wanted * (j0 / cur)
}

/// `y_n(x)`, the irregular spherical Bessel function, by upward recurrence.
pub fn spherical_y(n: u32, x: f64) -> f64 {
    let y0 = -x.cos() / x;
    if n == 0 {
        return y0;
    }
    let mut prev = y0;
    let mut cur = -x.cos() / (x * x) - x.sin() / x;
    for k in 1..n {
        let next = f64::from(2 * k + 1) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_elementary_forms() {
        for &x in &[0.05f64, 0.3, 0.99, 1.0, 1.7, 4.2, 11.0, 30.0] {
            let (s, c) = x.sin_cos();
            let j1 = s / (x * x) - c / x;
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let j3 = (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x;
            let y1 = -c / (x * x) - s / x;
            let y2 = (-3.0 / (x * x) + 1.0) * c / x - 3.0 * s / (x * x);
            let tol = if x < 0.5 { 1e-9 } else { 1e-13 };
            assert!((spherical_j(0, x) - s / x).abs() < 1e-15);
            assert!((spherical_j(1, x) - j1).abs() < tol, "j1 {x}");
            assert!((spherical_j(2, x) - j2).abs() < tol, "j2 {x}");
            assert!((spherical_j(3, x) - j3).abs() < tol * 10.0, "j3 {x}");
            assert!((spherical_y(1, x) - y1).abs() < 1e-12 * y1.abs().max(1.0));
            assert!((spherical_y(2, x) - y2).abs() < 1e-12 * y2.abs().max(1.0));
        }
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for n in 0..8 {
            for &x in &[1.0 - 1e-12, 1.0 + 1e-12] {
                assert!((spherical_j(n, x) - series_j(n, x)).abs() < 1e-14);
            }
            let x = f64::from(n) + 1e-9;
            if x > 1.0 {
                let up = spherical_j(n, x);
                let mi = miller_j(n, x, x.sin() / x);
                assert!((up - mi).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn small_argument_power_law() {
        // j_n(x) ~ x^n / (2n+1)!!
        let x = 1e-4;
        assert!((spherical_j(2, x) / (x * x) - 1.0 / 15.0).abs() < 1e-9);
        assert!((spherical_j(3, x) / x.powi(3) - 1.0 / 105.0).abs() < 1e-9);
    }

    #[test]
    fn wronskian() {
        // j_n y_{n-1} − j_{n-1} y_n = 1/x²
        for n in 1..6 {
            for &x in &[0.4, 2.5, 7.0, 19.0] {
                let w = spherical_j(n, x) * spherical_y(n - 1, x) - spherical_j(n - 1, x) * spherical_y(n, x);
                assert!((w * x * x - 1.0).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }
}
