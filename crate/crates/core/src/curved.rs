//! The constrained radial system on a space of constant positive curvature
//! and the obstruction to the fermion-type substitutions there.
//!
//! On the sphere the radial coordinate is an angle `χ`; the flat terms
//! `1/r` split into `1/sin χ` (coupling through `a = √(J(J+1))`) and
//! `cot χ` (the self terms of `M` and `N`). The two coincide only in the
//! flat limit, and the mismatch `(J+1)/sin χ − (cot χ + J/sin χ) = tan(χ/2)`
//! is what prevents the substitutions that decouple the flat system.

use crate::error::{domain, invalid, Result};
use crate::ode::rk4;
use crate::radial::{closed_form_regular, RadialParams};

/// Background geometry of the four-function radial system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Flat space, radial coordinate `r`.
    Flat,
    /// Unit 3-sphere, radial angle `χ ∈ (0, π)`.
    Sphere,
}

impl Geometry {
    /// `(1/sin χ, cot χ)` on the sphere, `(1/r, 1/r)` in flat space.
    fn factors(self, x: f64) -> Result<(f64, f64)> {
        match self {
            Geometry::Flat => {
                if !(x > 0.0) {
                    return Err(domain(format!("radius r = {x} must be positive")));
                }
                Ok((1.0 / x, 1.0 / x))
            }
            Geometry::Sphere => {
                if !(x > 0.0 && x < std::f64::consts::PI) || x.sin() < 1e-12 {
                    return Err(domain(format!("chi = {x} outside (0, pi)")));
                }
                Ok((1.0 / x.sin(), x.cos() / x.sin()))
            }
        }
    }
}

/// Parameters of the curved system (`Δ = λ = +1`; use `−m` for the others).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvedRadialParams {
    pub epsilon: f64,
    pub mass: f64,
    pub j: i32,
}

impl CurvedRadialParams {
    fn check(&self) -> Result<()> {
        if self.j < 1 {
            return Err(invalid(format!("the curved system needs J >= 1, got {}", self.j)));
        }
        Ok(())
    }
}

/// Derivatives of `(K, L, M, N)` in the given geometry:
///
/// ```text
/// K' = −(a/s)M − (ε+m)L          L' = (a/s)N + (ε−m)K
/// M' = −c M − (a/s)K − (ε+m)N    N' = c N + (a/s)L + (ε−m)M
/// ```
///
/// with `1/s`, `c` the geometry factors.
pub fn quartet_rhs(geometry: Geometry, params: &CurvedRadialParams, x: f64, y: [f64; 4]) -> Result<[f64; 4]> {
    params.check()?;
    let (inv_s, c) = geometry.factors(x)?;
    let a = (f64::from(params.j) * f64::from(params.j + 1)).sqrt() * inv_s;
    let [k, l, m, n] = y;
    let (ep, em) = (params.epsilon + params.mass, params.epsilon - params.mass);
    Ok([-a * m - ep * l, a * n + em * k, -c * m - a * k - ep * n, c * n + a * l + em * m])
}

/// [`quartet_rhs`] on the sphere.
pub fn curved_rhs(params: &CurvedRadialParams, chi: f64, y: [f64; 4]) -> Result<[f64; 4]> {
    quartet_rhs(Geometry::Sphere, params, chi, y)
}

/// `(1 − cos χ)/sin χ`.
pub fn obstruction_gap(j: i32, chi: f64) -> Result<f64> {
    if j < 1 {
        return Err(invalid(format!("need J >= 1, got {j}")));
    }
    Geometry::Sphere.factors(chi)?;
    Ok((1.0 - chi.cos()) / chi.sin())
}

/// The fermion-type ansatz `K = f/√(J+1)`, `L = g/√(J+1)`, `M = f/√J`, `N = g/√J`.
pub fn ansatz(j: i32, f: f64, g: f64) -> [f64; 4] {
    let (a, b) = ((f64::from(j) + 1.0).sqrt(), f64::from(j).sqrt());
    [f / a, g / a, f / b, g / b]
}

/// Measures the gap by substituting the ansatz into the system.
///
/// The `K` and `M` equations each imply a value of `f'`, and the `L` and
/// `N` equations each imply a value of `g'`; the differences are
/// `gap·f` and `gap·g`. Returns their least-squares ratio.
pub fn measured_gap(geometry: Geometry, params: &CurvedRadialParams, x: f64, (f, g): (f64, f64)) -> Result<f64> {
    params.check()?;
    let norm = f * f + g * g;
    if norm == 0.0 {
        return Err(domain("the sample (f, g) must be nonzero"));
    }
    let d = quartet_rhs(geometry, params, x, ansatz(params.j, f, g))?;
    let (a, b) = ((f64::from(params.j) + 1.0).sqrt(), f64::from(params.j).sqrt());
    let df_k = a * d[0];
    let dg_l = a * d[1];
    let df_m = b * d[2];
    let dg_n = b * d[3];
    Ok(((df_m - df_k) * f + (dg_l - dg_n) * g) / norm)
}

/// One sample of the overdetermination witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessSample {
    pub chi: f64,
    /// `‖(R_M, R_N)‖`, the residual of the `M` and `N` equations.
    pub residual: f64,
    /// `‖(M, N)‖ = ‖(f, g)‖/√J`.
    pub solution_norm: f64,
}

impl WitnessSample {
    /// `residual / solution_norm`; tracks `tan(χ/2)`.
    pub fn ratio(&self) -> f64 {
        self.residual / self.solution_norm
    }
}

/// Pair system obeyed by `(f, g)` when the `K` and `L` equations hold
/// under the ansatz: `f' = −((J+1)/sin χ) f − (ε+m) g`,
/// `g' = ((J+1)/sin χ) g + (ε−m) f`.
fn kl_pair_rhs(params: &CurvedRadialParams, chi: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
    let (inv_s, _) = Geometry::Sphere.factors(chi)?;
    let k = (f64::from(params.j) + 1.0) * inv_s;
    Ok([-k * y[0] - (params.epsilon + params.mass) * y[1], k * y[1] + (params.epsilon - params.mass) * y[0]])
}

/// Integrates the `(K, L)` pair under the ansatz and evaluates the residual
/// of the `(M, N)` pair at `count` equally spaced angles in
/// `[chi_min, chi_max]`, with `M'`, `N'` from a five-point stencil on the
/// trajectory.
pub fn overdetermination_witness(
    params: &CurvedRadialParams,
    chi_min: f64,
    chi_max: f64,
    count: usize,
) -> Result<Vec<WitnessSample>> {
    params.check()?;
    if count == 0 {
        return Err(invalid("scan needs at least one point"));
    }
    if !(chi_min > 0.0 && chi_max < std::f64::consts::PI && chi_min <= chi_max) {
        return Err(domain(format!("range [{chi_min}, {chi_max}] must lie inside (0, pi)")));
    }
    if count > 1 && chi_max == chi_min {
        return Err(domain("several points need a non-empty range"));
    }
    // step dividing the scan spacing, small enough for the stencil to fit
    // between the start and the first sample
    let target = 1e-3f64.min(chi_min / 8.0);
    let spacing = if count > 1 { (chi_max - chi_min) / (count - 1) as f64 } else { target };
    let sub = (spacing / target).ceil().max(1.0);
    let h = spacing / sub;
    let lead = ((chi_min / 2.0) / h).floor().max(2.0);
    let start = chi_min - lead * h;
    let end = chi_max + 2.0 * h;
    if !(start > 0.0) || end >= std::f64::consts::PI {
        return Err(domain("range too close to the poles for the derivative stencil"));
    }
    let flat = RadialParams::new(params.epsilon, params.mass, params.j + 1);
    let init = closed_form_regular(&flat)?.values(start)?;
    let n_steps = (lead + (count - 1) as f64 * sub + 2.0).round() as usize;
    let traj = rk4(|x, y: &[f64; 2]| kl_pair_rhs(params, x, y), start, start + n_steps as f64 * h, h * (1.0 + 1e-9), [init.0, init.1])?;
    // rk4 recomputes the step from the count; verify the grid is the one intended
    if traj.len() != n_steps + 1 {
        return Err(domain("internal grid mismatch in the witness integration"));
    }
    let jsq = f64::from(params.j).sqrt();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let idx = lead as usize + i * sub as usize;
        let (chi, y) = traj[idx];
        let der = |c: usize| {
            let v = |o: isize| traj[(idx as isize + o) as usize].1[c] / jsq;
            (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * h)
        };
        let mn = [y[0] / jsq, y[1] / jsq];
        let kl = {
            let a = (f64::from(params.j) + 1.0).sqrt();
            [y[0] / a, y[1] / a]
        };
        let full = curved_rhs(params, chi, [kl[0], kl[1], mn[0], mn[1]])?;
        let rm = der(0) - full[2];
        let rn = der(1) - full[3];
        out.push(WitnessSample { chi, residual: rm.hypot(rn), solution_norm: mn[0].hypot(mn[1]) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(j: i32) -> CurvedRadialParams {
        CurvedRadialParams { epsilon: 1.3, mass: 0.4, j }
    }

    #[test]
    fn flat_instance_is_the_flat_system() {
        let p = params(2);
        let y = [0.3, -0.7, 1.1, 0.25];
        for &r in &[0.4, 1.0, 3.5] {
            let a = quartet_rhs(Geometry::Flat, &p, r, y).unwrap();
            let b = crate::radial::quartet_rhs(2, p.epsilon, p.mass, r, y).unwrap();
            for i in 0..4 {
                assert!((a[i] - b[i]).abs() < 1e-14 * (1.0 + b[i].abs()));
            }
        }
    }

    #[test]
    fn zero_maps_to_zero_and_poles_fail() {
        assert_eq!(curved_rhs(&params(1), 1.0, [0.0; 4]).unwrap(), [0.0; 4]);
        assert!(curved_rhs(&params(1), 0.0, [0.0; 4]).is_err());
        assert!(curved_rhs(&params(1), PI, [0.0; 4]).is_err());
        assert!(obstruction_gap(1, 0.0).is_err());
        assert!(curved_rhs(&CurvedRadialParams { j: 0, ..params(1) }, 1.0, [0.0; 4]).is_err());
    }

    #[test]
    fn gap_is_half_angle_tangent() {
        assert!((obstruction_gap(3, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        for j in 1..=5 {
            for &chi in &[0.01, 0.4, 1.3, 2.2, 3.0] {
                let m = measured_gap(Geometry::Sphere, &params(j), chi, (0.8, -0.35)).unwrap();
                assert!((m - (chi / 2.0).tan()).abs() < 1e-12 * (chi / 2.0).tan().max(1.0));
                let flat = measured_gap(Geometry::Flat, &params(j), chi, (0.8, -0.35)).unwrap();
                assert!(flat.abs() < 1e-14 / chi, "{flat}");
            }
        }
    }

    fn stencil_mismatch(p: &CurvedRadialParams, step: f64) -> f64 {
        let traj = rk4(|x, y: &[f64; 2]| kl_pair_rhs(p, x, y), 0.2, 2.0, step, [1e-3, -2e-3]).unwrap();
        let h = traj[1].0 - traj[0].0;
        let mut worst: f64 = 0.0;
        for i in 2..traj.len() - 2 {
            let d = |c: usize| (-traj[i + 2].1[c] + 8.0 * traj[i + 1].1[c] - 8.0 * traj[i - 1].1[c] + traj[i - 2].1[c]) / (12.0 * h);
            let r = kl_pair_rhs(p, traj[i].0, &traj[i].1).unwrap();
            let scale = r[0].hypot(r[1]);
            worst = worst.max((d(0) - r[0]).hypot(d(1) - r[1]) / scale);
        }
        worst
    }

    #[test]
    fn trajectory_satisfies_the_integrated_pair() {
        let p = params(2);
        let coarse = stencil_mismatch(&p, 1e-3);
        let fine = stencil_mismatch(&p, 5e-4);
        assert!(fine < 1e-9, "{fine}");
        let order = (coarse / fine).log2();
        assert!((order - 4.0).abs() < 0.3, "{order}");
    }

    #[test]
    fn witness_tracks_the_gap() {
        for j in 1..=3 {
            let samples = overdetermination_witness(&params(j), 0.1, 1.5, 29).unwrap();
            assert!((samples[0].chi - 0.1).abs() < 1e-12);
            assert!((samples.last().unwrap().chi - 1.5).abs() < 1e-12);
            for s in &samples {
                let t = (s.chi / 2.0).tan();
                assert!((s.ratio() / t - 1.0).abs() < 0.05, "J={j} chi={}: {}", s.chi, s.ratio() / t);
            }
            assert!(samples.windows(2).all(|w| w[1].ratio() > w[0].ratio()));
        }
    }
}
