//! Radial equations: the eight-function system obtained from the field
//! substitution, its reductions, the unified two-component kernel shared by
//! every reduced system, closed-form Bessel solutions and an RK4 oracle.
//!
//! Every two-component system is written as
//!
//! ```text
//! f' = −κ f / r − (ε + m) g
//! g' = +κ g / r + (ε − m) f
//! ```
//!
//! with `κ = J+1` (type I), `κ = −J` (type II), `κ = 1` (`J = 0`) and
//! `κ = j + 1/2` for the Dirac equation. The sign of `m` entering the kernel
//! is `Δ·λ·m` for boson modes and `δ·m` for Dirac modes.

mod bessel;

pub use bessel::{spherical_j, spherical_y};

use crate::error::{domain, invalid, Error, Result};
use crate::ode::rk4;
use crate::Sign;

/// Parameters of one two-component radial system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialParams {
    pub epsilon: f64,
    /// Bare mass `m ≥ 0`; the sign map is applied by [`RadialParams::effective_mass`].
    pub mass: f64,
    pub kappa: i32,
    pub lambda_sign: Sign,
    pub delta_sign: Sign,
}

impl RadialParams {
    pub fn new(epsilon: f64, mass: f64, kappa: i32) -> Self {
        RadialParams { epsilon, mass, kappa, lambda_sign: Sign::Plus, delta_sign: Sign::Plus }
    }

    pub fn with_signs(self, delta_sign: Sign, lambda_sign: Sign) -> Self {
        RadialParams { delta_sign, lambda_sign, ..self }
    }

    /// `Δ·λ·m`, the mass seen by the reduced system.
    pub fn effective_mass(&self) -> f64 {
        (self.delta_sign * self.lambda_sign).value() * self.mass
    }

    /// `√(ε² − m²)`.
    pub fn momentum(&self) -> f64 {
        (self.epsilon * self.epsilon - self.mass * self.mass).sqrt()
    }
}

/// Right-hand side of the unified two-component system.
pub fn unified_rhs(params: &RadialParams, r: f64, (f, g): (f64, f64)) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(domain(format!("radius r = {r} must be positive")));
    }
    let k = f64::from(params.kappa);
    let m = params.effective_mass();
    let e = params.epsilon;
    Ok((-k * f / r - (e + m) * g, k * g / r + (e - m) * f))
}

/// Which Bessel family a closed form is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    /// `j_n`, finite at the origin.
    Regular,
    /// `y_n`, singular at the origin.
    Irregular,
}

/// Closed-form solution `(f, g)` of the unified system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    kappa: i32,
    p: f64,
    ratio: f64,
    kind: BesselKind,
}

impl ClosedForm {
    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    /// `(f(r), g(r))`.
    pub fn values(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(domain(format!("radius r = {r} must be positive")));
        }
        let z = |n: u32| match self.kind {
            BesselKind::Regular => spherical_j(n, self.p * r),
            BesselKind::Irregular => spherical_y(n, self.p * r),
        };
        Ok(if self.kappa > 0 {
            let k = self.kappa.unsigned_abs();
            (r * z(k), -self.ratio * r * z(k - 1))
        } else {
            let l = self.kappa.unsigned_abs();
            (r * z(l - 1), self.ratio * r * z(l))
        })
    }
}

fn closed_form(params: &RadialParams, kind: BesselKind) -> Result<ClosedForm> {
    if params.kappa == 0 {
        return Err(invalid("kappa must be nonzero"));
    }
    if !(params.mass >= 0.0) {
        return Err(invalid(format!("mass {} must be non-negative", params.mass)));
    }
    if !(params.epsilon > params.mass) {
        return Err(Error::Unsupported(format!(
            "epsilon = {} <= mass = {}: bound states are not covered",
            params.epsilon, params.mass
        )));
    }
    let p = params.momentum();
    Ok(ClosedForm { kappa: params.kappa, p, ratio: p / (params.epsilon + params.effective_mass()), kind })
}

/// The solution regular at the origin.
///
/// With `p = √(ε² − m²)`: for `κ > 0`, `f = r j_κ(pr)` and
/// `g = −p/(ε+m) · r j_{κ−1}(pr)`; for `κ = −l`, `f = r j_{l−1}(pr)` and
/// `g = p/(ε+m) · r j_l(pr)`.
pub fn closed_form_regular(params: &RadialParams) -> Result<ClosedForm> {
    closed_form(params, BesselKind::Regular)
}

/// Same as [`closed_form_regular`] with `y_n` in place of `j_n`.
pub fn closed_form_irregular(params: &RadialParams) -> Result<ClosedForm> {
    closed_form(params, BesselKind::Irregular)
}

/// Sampled `(f, g)` along a radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTrajectory {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// Fixed-step RK4 integration of [`unified_rhs`] from `r0` to `r1`.
pub fn integrate_radial(
    params: &RadialParams,
    r0: f64,
    r1: f64,
    step: f64,
    init: (f64, f64),
) -> Result<RadialTrajectory> {
    if !(r0 > 0.0) {
        return Err(domain(format!("start radius r0 = {r0} must be positive")));
    }
    let traj = rk4(
        |r, y: &[f64; 2]| unified_rhs(params, r, (y[0], y[1])).map(|(a, b)| [a, b]),
        r0,
        r1,
        step,
        [init.0, init.1],
    )?;
    let mut out = RadialTrajectory { r: Vec::new(), f: Vec::new(), g: Vec::new() };
    for (r, y) in traj {
        out.r.push(r);
        out.f.push(y[0]);
        out.g.push(y[1]);
    }
    Ok(out)
}

/// The eight real radial functions at one radius.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OctetValues {
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl OctetValues {
    fn to_array(self) -> [f64; 8] {
        [self.k, self.l, self.m, self.n, self.a, self.b, self.c, self.d]
    }

    fn from_array(v: [f64; 8]) -> Self {
        OctetValues { k: v[0], l: v[1], m: v[2], n: v[3], a: v[4], b: v[5], c: v[6], d: v[7] }
    }
}

/// The two substitutions that decouple the constrained system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Substitution {
    /// `√(J+1)K = f`, `√(J+1)L = g`, `√J M = f`, `√J N = g`.
    I,
    /// `√J K = f`, `√J L = g`, `√(J+1) M = −f`, `√(J+1) N = −g`.
    II,
}

impl Substitution {
    /// Radial index of the decoupled pair.
    pub fn kappa(self, j: i32) -> i32 {
        match self {
            Substitution::I => j + 1,
            Substitution::II => -j,
        }
    }
}

/// Builds the octet from `(f, g)` through a substitution and the linear
/// constraint `A = λK, B = λL, C = λM, D = λN`.
pub fn octet_from_pair(sub: Substitution, lambda: Sign, j: i32, f: f64, g: f64) -> OctetValues {
    let jf = f64::from(j);
    let (ck, cm) = match sub {
        Substitution::I => (1.0 / (jf + 1.0).sqrt(), 1.0 / jf.sqrt()),
        Substitution::II => (1.0 / jf.sqrt(), -1.0 / (jf + 1.0).sqrt()),
    };
    let (k, l, m, n) = (ck * f, ck * g, cm * f, cm * g);
    let s = lambda.value();
    OctetValues { k, l, m, n, a: s * k, b: s * l, c: s * m, d: s * n }
}

fn five_point<const N: usize>(field: &dyn Fn(f64) -> [f64; N], r: f64, h: f64) -> [f64; N] {
    let p2 = field(r + 2.0 * h);
    let p1 = field(r + h);
    let m1 = field(r - h);
    let m2 = field(r - 2.0 * h);
    std::array::from_fn(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
}

fn fd_step(r: f64) -> f64 {
    (1e-3f64).min(r / 4.0)
}

/// Maximum absolute residual of the eight first-order equations at `r`,
/// with `a = √(J(J+1))`, the mass `Δ·m` and derivatives by a five-point
/// stencil. The λ-constraint, if any, is carried by the octet itself.
pub fn octet_residual(j: i32, params: &RadialParams, octet: &dyn Fn(f64) -> OctetValues, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(format!("radius r = {r} must be positive")));
    }
    if j < 1 {
        return Err(invalid(format!("the octet system needs J >= 1, got {j}")));
    }
    let v = octet(r);
    let dv = OctetValues::from_array(five_point(&|x| octet(x).to_array(), r, fd_step(r)));
    let a = (f64::from(j) * f64::from(j + 1)).sqrt() / r;
    let e = params.epsilon;
    let m = params.delta_sign.value() * params.mass;
    let res = [
        e * v.k - dv.l + a * v.n - m * v.a,
        e * v.l + dv.k + a * v.m + m * v.b,
        e * v.a - dv.b + a * v.d - m * v.k,
        e * v.b + dv.a + a * v.c + m * v.l,
        e * v.m - dv.n + v.n / r + a * v.l - m * v.c,
        e * v.n + dv.m + v.m / r + a * v.k + m * v.d,
        e * v.c - dv.d + v.d / r + a * v.b - m * v.m,
        e * v.d + dv.c + v.c / r + a * v.a + m * v.n,
    ];
    Ok(res.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
}

/// Maximum absolute residual of the four `J = 0` equations for
/// `(M, N, C, D)`, with mass `Δ·m`.
pub fn j0_system_residual(params: &RadialParams, quad: &dyn Fn(f64) -> [f64; 4], r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(format!("radius r = {r} must be positive")));
    }
    let [mm, n, c, d] = quad(r);
    let [dm, dn, dc, dd] = five_point(quad, r, fd_step(r));
    let e = params.epsilon;
    let m = params.delta_sign.value() * params.mass;
    let res = [
        e * mm - dn + n / r - m * c,
        e * n + dm + mm / r + m * d,
        e * c - dd + d / r - m * mm,
        e * d + dc + c / r + m * n,
    ];
    Ok(res.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
}

/// `(M, N, C, D) = (f, g, λf, λg)`, the `J = 0` constraint.
pub fn j0_quad_from_pair(lambda: Sign, f: f64, g: f64) -> [f64; 4] {
    [f, g, lambda.value() * f, lambda.value() * g]
}

/// Right-hand side of the constrained four-function system for
/// `(K, L, M, N)` at `λ = +1` with mass `m` (use `−m` for `λ = −1`).
pub fn quartet_rhs(j: i32, epsilon: f64, mass: f64, r: f64, y: [f64; 4]) -> Result<[f64; 4]> {
    if !(r > 0.0) {
        return Err(domain(format!("radius r = {r} must be positive")));
    }
    let a = (f64::from(j) * f64::from(j + 1)).sqrt() / r;
    let [k, l, m, n] = y;
    let (ep, em) = (epsilon + mass, epsilon - mass);
    Ok([
        -a * m - ep * l,
        a * n + em * k,
        -m / r - a * k - ep * n,
        n / r + a * l + em * m,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_ode_residual(params: &RadialParams, cf: &ClosedForm, r0: f64, r1: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut r = r0;
        while r <= r1 {
            let h = 1e-3 * r.min(1.0);
            let d = |x: f64| cf.values(x).unwrap();
            let (p2, p1, m1, m2) = (d(r + 2.0 * h), d(r + h), d(r - h), d(r - 2.0 * h));
            let df = (-p2.0 + 8.0 * p1.0 - 8.0 * m1.0 + m2.0) / (12.0 * h);
            let dg = (-p2.1 + 8.0 * p1.1 - 8.0 * m1.1 + m2.1) / (12.0 * h);
            let (rf, rg) = unified_rhs(params, r, d(r)).unwrap();
            worst = worst.max((df - rf).abs()).max((dg - rg).abs());
            r += 0.37;
        }
        worst
    }

    #[test]
    fn closed_forms_solve_the_kernel() {
        for kappa in [-3, -2, -1, 1, 2, 3] {
            for (d, l) in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Plus)] {
                let params = RadialParams::new(1.25, 0.75, kappa).with_signs(d, l);
                let reg = closed_form_regular(&params).unwrap();
                let irr = closed_form_irregular(&params).unwrap();
                let a = max_ode_residual(&params, &reg, 0.1, 20.0);
                let b = max_ode_residual(&params, &irr, 1.0, 20.0);
                assert!(a < 1e-9 && b < 1e-8, "kappa {kappa}: {a} {b}");
            }
        }
    }

    #[test]
    fn kappa_minus_one_is_a_sine() {
        let params = RadialParams::new(1.25, 0.75, -1);
        let cf = closed_form_regular(&params).unwrap();
        for &r in &[0.2, 1.0, 3.3, 9.0] {
            assert!((cf.values(r).unwrap().0 - r.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn regular_solution_vanishes_as_a_power() {
        let params = RadialParams::new(1.25, 0.75, 2);
        let cf = closed_form_regular(&params).unwrap();
        let r = 1e-4;
        let ratio = cf.values(r).unwrap().0 / r.powi(3);
        assert!((ratio - 1.0 / 15.0).abs() < 1e-8);
    }

    #[test]
    fn bound_states_and_bad_radii_are_rejected() {
        assert!(matches!(closed_form_regular(&RadialParams::new(0.5, 0.75, 1)), Err(Error::Unsupported(_))));
        assert!(closed_form_regular(&RadialParams::new(1.5, 0.75, 0)).is_err());
        assert!(unified_rhs(&RadialParams::new(1.5, 0.75, 1), 0.0, (1.0, 1.0)).is_err());
        assert_eq!(unified_rhs(&RadialParams::new(1.5, 0.75, 1), 1.0, (0.0, 0.0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let tr = integrate_radial(&RadialParams::new(1.25, 0.75, 2), 0.1, 3.0, 0.01, (0.0, 0.0)).unwrap();
        assert!(tr.f.iter().chain(tr.g.iter()).all(|&x| x == 0.0));
        assert_eq!(*tr.r.last().unwrap(), 3.0);
    }

    #[test]
    fn kappa_one_kernel_is_the_j0_system() {
        // (d/dr + 1/r)M + (ε+m)N = 0, (d/dr − 1/r)N − (ε−m)M = 0
        let (e, m, r, mm, n) = (1.3, 0.4, 0.9, 0.7, -0.2);
        let (dm, dn) = unified_rhs(&RadialParams::new(e, m, 1), r, (mm, n)).unwrap();
        assert!((dm + mm / r + (e + m) * n).abs() < 1e-15);
        assert!((dn - n / r - (e - m) * mm).abs() < 1e-15);
        let (dm, _) = unified_rhs(&RadialParams::new(e, m, 1).with_signs(Sign::Minus, Sign::Plus), r, (mm, n)).unwrap();
        assert!((dm + mm / r + (e - m) * n).abs() < 1e-15);
    }

    #[test]
    fn octet_chain_certifies() {
        for sub in [Substitution::I, Substitution::II] {
            for j in 1..=3 {
                for d in Sign::BOTH {
                    for l in Sign::BOTH {
                        let params = RadialParams::new(1.25, 0.75, sub.kappa(j)).with_signs(d, l);
                        let cf = closed_form_regular(&params).unwrap();
                        let oct = move |r: f64| {
                            let (f, g) = cf.values(r).unwrap();
                            octet_from_pair(sub, l, j, f, g)
                        };
                        for &r in &[0.5, 1.7, 4.0, 9.5] {
                            let res = octet_residual(j, &params, &oct, r).unwrap();
                            assert!(res < 1e-8, "{sub:?} J={j} {d}{l} r={r}: {res}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn octet_wrong_constraint_sign_fails() {
        let j = 2;
        let params = RadialParams::new(1.25, 0.75, 3);
        let cf = closed_form_regular(&params).unwrap();
        let oct = move |r: f64| {
            let (f, g) = cf.values(r).unwrap();
            let mut o = octet_from_pair(Substitution::I, Sign::Plus, j, f, g);
            o.a = -o.k;
            o
        };
        let r = 2.3;
        let res = octet_residual(j, &params, &oct, r).unwrap();
        assert!(res > 0.1 * (0.75 * oct(r).k).abs());
        assert_eq!(octet_residual(j, &params, &|_| OctetValues::default(), r).unwrap(), 0.0);
    }

    #[test]
    fn j0_reductions_certify() {
        for d in Sign::BOTH {
            for l in Sign::BOTH {
                let params = RadialParams::new(1.25, 0.75, 1).with_signs(d, l);
                let cf = closed_form_regular(&params).unwrap();
                let quad = move |r: f64| {
                    let (f, g) = cf.values(r).unwrap();
                    j0_quad_from_pair(l, f, g)
                };
                for &r in &[0.4, 2.0, 7.7] {
                    assert!(j0_system_residual(&params, &quad, r).unwrap() < 1e-8);
                }
                assert_eq!(j0_system_residual(&params, &|_| [0.0; 4], 1.0).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn substitutions_reduce_to_the_kernel_operator() {
        // Arbitrary smooth (f, g), not solutions: the quartet residual under
        // substitution I/II is the kernel residual, row-scaled.
        let f = |r: f64| (1.3 * r).sin() * (-0.1 * r).exp();
        let g = |r: f64| (0.7 * r).cos() + 0.2 * r;
        let (e, m) = (1.4, 0.6);
        for j in 1..=3 {
            for sub in [Substitution::I, Substitution::II] {
                let jf = f64::from(j);
                let r = 1.7;
                let h = 1e-3;
                let fd = |u: &dyn Fn(f64) -> f64| (-u(r + 2.0 * h) + 8.0 * u(r + h) - 8.0 * u(r - h) + u(r - 2.0 * h)) / (12.0 * h);
                let (df, dg) = (fd(&f), fd(&g));
                let (kf, kg) = unified_rhs(&RadialParams::new(e, m, sub.kappa(j)), r, (f(r), g(r))).unwrap();
                let kernel = [df - kf, dg - kg];
                let o = octet_from_pair(sub, Sign::Plus, j, f(r), g(r));
                let od = octet_from_pair(sub, Sign::Plus, j, df, dg);
                let rhs = quartet_rhs(j, e, m, r, [o.k, o.l, o.m, o.n]).unwrap();
                let res = [od.k - rhs[0], od.l - rhs[1], od.m - rhs[2], od.n - rhs[3]];
                let (ck, cm) = match sub {
                    Substitution::I => ((jf + 1.0).sqrt(), jf.sqrt()),
                    Substitution::II => (jf.sqrt(), -(jf + 1.0).sqrt()),
                };
                for i in 0..2 {
                    assert!((res[i] * ck - kernel[i]).abs() < 1e-9);
                    assert!((res[i + 2] * cm - kernel[i]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rk4_tracks_closed_form_and_converges_at_fourth_order() {
        for kappa in [-2, -1, 1, 2, 3] {
            let params = RadialParams::new(1.25, 0.75, kappa);
            let cf = closed_form_regular(&params).unwrap();
            let err = |h: f64| {
                let tr = integrate_radial(&params, 0.1, 20.0, h, cf.values(0.1).unwrap()).unwrap();
                tr.r.iter()
                    .zip(tr.f.iter().zip(&tr.g))
                    .map(|(&r, (&f, &g))| {
                        let (cf_f, cf_g) = cf.values(r).unwrap();
                        (f - cf_f).abs().max((g - cf_g).abs())
                    })
                    .fold(0.0, f64::max)
            };
            assert!(err(1e-3) < 1e-8, "kappa {kappa}");
            let order = (err(0.01) / err(0.005)).log2();
            assert!((order - 4.0).abs() < 0.2, "kappa {kappa}: order {order}");
        }
    }
}
