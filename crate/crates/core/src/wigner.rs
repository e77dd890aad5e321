//! Wigner functions `D^J_{m,σ}(φ, θ, 0)` for integer and half-integer `J`,
//! the first-order recurrence identities they satisfy, and the coupling of
//! a half-angle factor with an integer-`J` function into half-integer ones.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};
use crate::{HalfInt, C64};

/// Validated `(J, m, σ)` triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WignerIndex {
    j: HalfInt,
    m: HalfInt,
    sigma: HalfInt,
}

impl WignerIndex {
    pub fn new(j: HalfInt, m: HalfInt, sigma: HalfInt) -> Result<Self> {
        check_indices(j, m, sigma)?;
        Ok(WignerIndex { j, m, sigma })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn sigma(&self) -> HalfInt {
        self.sigma
    }
}

/// Polar and azimuthal angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularPoint {
    pub theta: f64,
    pub phi: f64,
}

impl AngularPoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        AngularPoint { theta, phi }
    }

    /// Like [`AngularPoint::new`] but insists on `θ ∈ (0, π)`, `φ ∈ [0, 2π)`.
    pub fn checked(theta: f64, phi: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(domain(format!("theta = {theta} outside (0, pi)")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(domain(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(AngularPoint { theta, phi })
    }
}

fn check_indices(j: HalfInt, m1: HalfInt, m2: HalfInt) -> Result<()> {
    let (tj, t1, t2) = (j.twice(), m1.twice(), m2.twice());
    if tj < 0 {
        return Err(domain(format!("J = {j} is negative")));
    }
    if t1.abs() > tj || t2.abs() > tj {
        return Err(domain(format!("indices ({m1}, {m2}) out of range for J = {j}")));
    }
    if (tj - t1) % 2 != 0 || (tj - t2) % 2 != 0 {
        return Err(domain(format!("J = {j} and indices ({m1}, {m2}) differ by non-integers")));
    }
    Ok(())
}

/// `C(n, k)` in floating point; exact for the sizes used here.
fn binomial(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
fn jacobi(n: i32, a: f64, b: f64, x: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = f64::from(k);
        let s = 2.0 * k + a + b;
        let c0 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let p2 = (c1 * p1 - c2 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// The reduced rotation matrix `d^J_{m1,m2}(θ)`.
///
/// Evaluated as a Fourier sum in `θ`,
/// `d_{m1,m2}(θ) = Σ_μ d_{m1,μ}(π/2) d_{m2,μ}(π/2) cos(μθ + π(m1 − m2)/2)`,
/// with the fixed `d(π/2)` from the Jacobi-polynomial form. Unlike a
/// polynomial in `cos θ`, the sum has no loss of resolution near the poles,
/// which keeps finite differences of `d` clean.
pub fn small_d(j: HalfInt, m1: HalfInt, m2: HalfInt, theta: f64) -> Result<f64> {
    check_indices(j, m1, m2)?;
    Ok(small_d_unchecked(j.twice(), m1.twice(), m2.twice(), theta))
}

/// Arguments are doubled values, assumed valid.
fn small_d_unchecked(tj: i32, t1: i32, t2: i32, theta: f64) -> f64 {
    let quarter_turns = ((t1 - t2) / 2).rem_euclid(4);
    let mut sum = 0.0;
    for tm in (-tj..=tj).step_by(2) {
        let w = d_half_pi(tj, t1, tm) * d_half_pi(tj, t2, tm);
        if w == 0.0 {
            continue;
        }
        // μθ rounded, plus its exact rounding error for a first-order correction
        let mu = f64::from(tm) / 2.0;
        let arg = mu * theta;
        let err = mu.mul_add(theta, -arg);
        let (s0, c0) = arg.sin_cos();
        let (sin, cos) = (s0 + c0 * err, c0 - s0 * err);
        sum += w * match quarter_turns {
            0 => cos,
            1 => -sin,
            2 => -cos,
            _ => sin,
        };
    }
    sum
}

/// `d^J_{m1,m2}(π/2)` from the Jacobi-polynomial form at `cos θ = 0`.
fn d_half_pi(tj: i32, t1: i32, t2: i32) -> f64 {
    let jm = (tj + t2) / 2; // j + m   (m = m2, column index)
    let jmm = (tj - t2) / 2; // j - m
    let jp = (tj + t1) / 2; // j + m'  (m' = m1, row index)
    let jpm = (tj - t1) / 2; // j - m'
    let diff = (t1 - t2) / 2; // m' - m
    let k = jm.min(jmm).min(jp).min(jpm);
    let (a, lam) = if k == jm { (diff, diff) } else if k == jmm || k == jp { (-diff, 0) } else { (diff, diff) };
    let b = tj - 2 * k - a;
    let norm = (binomial(tj - k, k + a) / binomial(k + b, b)).sqrt();
    let sign = if lam.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    sign * norm * FRAC_1_SQRT_2.powi(a + b) * jacobi(k, f64::from(a), f64::from(b), 0.0)
}

/// `D^J_{m,σ}(φ, θ, 0) = e^{−imφ} d^J_{m,σ}(θ)`.
pub fn wigner_d(idx: WignerIndex, p: AngularPoint) -> C64 {
    let d = small_d_unchecked(idx.j.twice(), idx.m.twice(), idx.sigma.twice(), p.theta);
    C64::from_polar(d, -idx.m.value() * p.phi)
}

/// Like [`wigner_d`] but returns zero when the indices are out of range,
/// the natural extension used by recurrence formulas at their edges.
pub fn wigner_d_or_zero(j: HalfInt, m: HalfInt, sigma: HalfInt, p: AngularPoint) -> C64 {
    match WignerIndex::new(j, m, sigma) {
        Ok(idx) => wigner_d(idx, p),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// The functions `D_σ = D^J_{−M,σ}` used by the field substitutions, for
/// `σ ∈ {−2, …, 2}` (zero outside the allowed range).
pub(crate) fn d_row(j: i32, m: i32, sigma: i32, p: AngularPoint) -> C64 {
    wigner_d_or_zero(HalfInt::from_int(j), HalfInt::from_int(-m), HalfInt::from_int(sigma), p)
}

/// The six first-order identities relating `D_{−1}, D_0, D_{+1}` to their
/// neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    /// `∂_θ D_{−1} = ½(b D_{−2} − a D_0)`
    DThetaMinus,
    /// `[(−M + cos θ)/sin θ] D_{−1} = ½(−b D_{−2} − a D_0)`
    RatioMinus,
    /// `∂_θ D_{+1} = ½(a D_0 − b D_{+2})`
    DThetaPlus,
    /// `[(−M − cos θ)/sin θ] D_{+1} = ½(−a D_0 − b D_{+2})`
    RatioPlus,
    /// `∂_θ D_0 = ½(a D_{−1} − a D_{+1})`
    DThetaZero,
    /// `[−M / sin θ] D_0 = ½(−a D_{−1} − a D_{+1})`
    RatioZero,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 6] = [
        IdentityKind::DThetaMinus,
        IdentityKind::RatioMinus,
        IdentityKind::DThetaPlus,
        IdentityKind::RatioPlus,
        IdentityKind::DThetaZero,
        IdentityKind::RatioZero,
    ];

    /// Kinds numbered 1 to 6 in the order above.
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1..=6 => Ok(Self::ALL[usize::from(n - 1)]),
            _ => Err(domain(format!("identity kind {n} outside 1..=6"))),
        }
    }
}

/// Step used for the θ-derivative in [`derivative_identity_residual`].
pub const IDENTITY_FD_STEP: f64 = 1e-6;

/// `|LHS − RHS|` of one identity at `p`, with `∂_θ` taken by central
/// differences, `a = √(J(J+1))` and `b = √((J−1)(J+2))`.
pub fn derivative_identity_residual(kind: IdentityKind, j: i32, m: i32, p: AngularPoint) -> Result<f64> {
    if j < 1 {
        return Err(domain(format!("identities need J >= 1, got {j}")));
    }
    if m.abs() > j {
        return Err(domain(format!("|M| = {} exceeds J = {j}", m.abs())));
    }
    let sin = p.theta.sin();
    if sin < 1e-8 {
        return Err(domain(format!("theta = {} too close to a pole", p.theta)));
    }
    let jf = f64::from(j);
    let a = (jf * (jf + 1.0)).sqrt();
    let b = ((jf - 1.0) * (jf + 2.0)).sqrt();
    let dd = |s: i32| d_row(j, m, s, p);
    let dtheta = |s: i32| {
        let (hi, lo) = (p.theta + IDENTITY_FD_STEP, p.theta - IDENTITY_FD_STEP);
        let up = d_row(j, m, s, AngularPoint::new(hi, p.phi));
        let dn = d_row(j, m, s, AngularPoint::new(lo, p.phi));
        // the rounded abscissae, not 2h, set the divided difference
        (up - dn) / (hi - lo)
    };
    let mf = f64::from(m);
    let cos = p.theta.cos();
    let (lhs, rhs) = match kind {
        IdentityKind::DThetaMinus => (dtheta(-1), 0.5 * (b * dd(-2) - a * dd(0))),
        IdentityKind::RatioMinus => ((-mf + cos) / sin * dd(-1), 0.5 * (-b * dd(-2) - a * dd(0))),
        IdentityKind::DThetaPlus => (dtheta(1), 0.5 * (a * dd(0) - b * dd(2))),
        IdentityKind::RatioPlus => ((-mf - cos) / sin * dd(1), 0.5 * (-a * dd(0) - b * dd(2))),
        IdentityKind::DThetaZero => (dtheta(0), 0.5 * a * (dd(-1) - dd(1))),
        IdentityKind::RatioZero => (-mf / sin * dd(0), -0.5 * a * (dd(-1) + dd(1))),
    };
    Ok((lhs - rhs).norm())
}

/// Half-angle factors that multiply integer-`J` functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HalfAngleFactor {
    /// `cos(θ/2) e^{+iφ/2}`
    CosPlus,
    /// `cos(θ/2) e^{−iφ/2}`
    CosMinus,
    /// `sin(θ/2) e^{+iφ/2}`
    SinPlus,
    /// `sin(θ/2) e^{−iφ/2}`
    SinMinus,
}

impl HalfAngleFactor {
    pub const ALL: [HalfAngleFactor; 4] = [
        HalfAngleFactor::CosPlus,
        HalfAngleFactor::CosMinus,
        HalfAngleFactor::SinPlus,
        HalfAngleFactor::SinMinus,
    ];

    /// The factor as `sign · D^{1/2}_{a,b}`, returned as `(sign, a, b)`.
    pub fn as_spin_half(self) -> (f64, HalfInt, HalfInt) {
        let up = HalfInt::HALF;
        let dn = -HalfInt::HALF;
        match self {
            HalfAngleFactor::CosPlus => (1.0, dn, dn),
            HalfAngleFactor::CosMinus => (1.0, up, up),
            HalfAngleFactor::SinPlus => (1.0, dn, up),
            HalfAngleFactor::SinMinus => (-1.0, up, dn),
        }
    }

    pub fn eval(self, p: AngularPoint) -> C64 {
        let (s, c) = (p.theta / 2.0).sin_cos();
        let (amp, phase) = match self {
            HalfAngleFactor::CosPlus => (c, 0.5),
            HalfAngleFactor::CosMinus => (c, -0.5),
            HalfAngleFactor::SinPlus => (s, 0.5),
            HalfAngleFactor::SinMinus => (s, -0.5),
        };
        C64::from_polar(amp, phase * p.phi)
    }
}

/// `factor · D^J_{−M,σ} = c_minus · D^{J−1/2}[minus] + c_plus · D^{J+1/2}[plus]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingExpansion {
    pub c_minus: f64,
    pub c_plus: f64,
    /// Absent when `J = 0` or when the `J − 1/2` index is out of range.
    pub minus: Option<WignerIndex>,
    pub plus: WignerIndex,
}

impl CouplingExpansion {
    /// Evaluates the right-hand side at `p`.
    pub fn eval(&self, p: AngularPoint) -> C64 {
        let lo = self.minus.map_or(C64::new(0.0, 0.0), |i| self.c_minus * wigner_d(i, p));
        lo + self.c_plus * wigner_d(self.plus, p)
    }
}

/// Expands `factor · D^J_{−M,σ}` into functions of weight `J ± 1/2`.
///
/// The coefficients are products of two Clebsch–Gordan coefficients,
/// one for each index of the product representation.
pub fn coupling_expand(factor: HalfAngleFactor, sigma: i32, j: i32, m: i32) -> Result<CouplingExpansion> {
    if j < 0 || m.abs() > j {
        return Err(domain(format!("need |M| <= J, got J = {j}, M = {m}")));
    }
    if sigma.abs() > j {
        return Err(domain(format!("sigma = {sigma} out of range for J = {j}")));
    }
    let (sign, a, b) = factor.as_spin_half();
    let jj = HalfInt::from_int(j);
    let row = HalfInt::from_int(-m);
    let col = HalfInt::from_int(sigma);
    let coeff = |big: HalfInt| {
        sign * clebsch_gordan(HalfInt::HALF, a, jj, row, big) * clebsch_gordan(HalfInt::HALF, b, jj, col, big)
    };
    let up = jj + HalfInt::HALF;
    let plus = WignerIndex::new(up, a + row, b + col)?;
    let (c_minus, minus) = if j == 0 {
        (0.0, None)
    } else {
        let lo = jj - HalfInt::HALF;
        match WignerIndex::new(lo, a + row, b + col) {
            Ok(idx) => (coeff(lo), Some(idx)),
            Err(_) => (0.0, None),
        }
    };
    Ok(CouplingExpansion { c_minus, c_plus: coeff(up), minus, plus })
}

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// `⟨j1 m1; j2 m2 | J, m1+m2⟩` by the Racah formula (Condon–Shortley phase).
pub(crate) fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, big: HalfInt) -> f64 {
    let mm = m1 + m2;
    if check_indices(j1, m1, m1).is_err()
        || check_indices(j2, m2, m2).is_err()
        || check_indices(big, mm, mm).is_err()
    {
        return 0.0;
    }
    let t = |x: HalfInt| x.twice();
    // all combinations below are integers once triangle/parity hold
    let tri = [t(big) + t(j1) - t(j2), t(big) - t(j1) + t(j2), t(j1) + t(j2) - t(big)];
    if tri.iter().any(|&x| x < 0 || x % 2 != 0) {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let pre = (f64::from(t(big) + 1) * factorial(h(tri[0])) * factorial(h(tri[1])) * factorial(h(tri[2]))
        / factorial(h(t(j1) + t(j2) + t(big)) + 1))
        .sqrt();
    let pre2 = (factorial(h(t(big) + t(mm)))
        * factorial(h(t(big) - t(mm)))
        * factorial(h(t(j1) - t(m1)))
        * factorial(h(t(j1) + t(m1)))
        * factorial(h(t(j2) - t(m2)))
        * factorial(h(t(j2) + t(m2))))
    .sqrt();
    let mut sum = 0.0;
    for k in 0.. {
        let args = [
            k,
            h(t(j1) + t(j2) - t(big)) - k,
            h(t(j1) - t(m1)) - k,
            h(t(j2) + t(m2)) - k,
            h(t(big) - t(j2) + t(m1)) + k,
            h(t(big) - t(j1) - t(m2)) + k,
        ];
        if args[1] < 0 || args[2] < 0 || args[3] < 0 {
            break;
        }
        if args[4] < 0 || args[5] < 0 {
            continue;
        }
        let den: f64 = args.iter().map(|&x| factorial(x)).product();
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    pre * pre2 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hi(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn fact(n: i32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// The alternating factorial sum, written out independently.
    fn d_by_sum(tj: i32, t1: i32, t2: i32, th: f64) -> f64 {
        let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
        let jm1 = (tj + t1) / 2;
        let jm1m = (tj - t1) / 2;
        let jm2 = (tj + t2) / 2;
        let jm2m = (tj - t2) / 2;
        let d12 = (t1 - t2) / 2;
        let mut acc = 0.0;
        for k in 0..=tj {
            let a = [jm2 - k, k, jm1m - k, d12 + k];
            if a.iter().any(|&x| x < 0) {
                continue;
            }
            let sg = if (k + d12).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            acc += sg * c.powi(tj - d12 - 2 * k) * s.powi(d12 + 2 * k) / a.iter().map(|&x| fact(x)).product::<f64>();
        }
        acc * (fact(jm1) * fact(jm1m) * fact(jm2) * fact(jm2m)).sqrt()
    }

    #[test]
    fn matches_factorial_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for tj in 0..=16 {
            for t1 in (-tj..=tj).step_by(2) {
                for t2 in (-tj..=tj).step_by(2) {
                    let th = rng.gen_range(0.0..PI);
                    let got = small_d(hi(tj), hi(t1), hi(t2), th).unwrap();
                    let want = d_by_sum(tj, t1, t2, th);
                    assert!((got - want).abs() < 1e-12, "{tj} {t1} {t2}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn low_order_closed_forms() {
        let th = 0.83;
        assert_eq!(small_d(hi(0), hi(0), hi(0), th).unwrap(), 1.0);
        assert!((small_d(hi(1), hi(1), hi(1), th).unwrap() - (th / 2.0).cos()).abs() < 1e-15);
        assert!((small_d(hi(1), hi(1), hi(-1), th).unwrap() + (th / 2.0).sin()).abs() < 1e-15);
        assert!((small_d(hi(2), hi(0), hi(0), th).unwrap() - th.cos()).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(small_d(hi(2), hi(4), hi(0), 1.0).is_err());
        assert!(small_d(hi(2), hi(1), hi(0), 1.0).is_err());
        assert!(WignerIndex::new(hi(3), hi(1), hi(2)).is_err());
    }

    #[test]
    fn identity_at_zero_angle() {
        for tj in 0..=12 {
            for t1 in (-tj..=tj).step_by(2) {
                for t2 in (-tj..=tj).step_by(2) {
                    let d = small_d(hi(tj), hi(t1), hi(t2), 0.0).unwrap();
                    let want = if t1 == t2 { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn row_normalisation() {
        let p = AngularPoint::new(1.1, 2.3);
        let total: f64 = (-2..=2)
            .map(|s| wigner_d(WignerIndex::new(hi(4), hi(-2), hi(2 * s)).unwrap(), p).norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn transpose_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let tj = rng.gen_range(0..=12);
            let t1 = 2 * rng.gen_range(0..=tj) - tj;
            let t2 = 2 * rng.gen_range(0..=tj) - tj;
            let th = rng.gen_range(0.0..PI);
            let a = small_d(hi(tj), hi(t1), hi(t2), th).unwrap();
            let b = small_d(hi(tj), hi(t2), hi(t1), th).unwrap();
            let sg = if ((t1 - t2) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((a - sg * b).abs() < 1e-12);
        }
    }

    #[test]
    fn j1_reduces_to_a_over_two() {
        // b vanishes at J = 1, so ∂θ D_{-1} = −(√2/2) D_0
        for m in -1..=1 {
            let p = AngularPoint::new(0.9, 0.4);
            assert!(derivative_identity_residual(IdentityKind::DThetaMinus, 1, m, p).unwrap() < 1e-9);
        }
    }

    #[test]
    fn identities_reject_poles() {
        let p = AngularPoint::new(1e-10, 0.0);
        assert!(derivative_identity_residual(IdentityKind::RatioZero, 2, 0, p).is_err());
        assert!(IdentityKind::from_number(7).is_err());
    }

    #[test]
    fn clebsch_gordan_orthonormality() {
        // Σ_{m1} ⟨1/2 m1; J M−m1 | j M⟩⟨1/2 m1; J M−m1 | j' M⟩ = δ_{jj'}
        for j in 1..=4 {
            let jj = HalfInt::from_int(j);
            for tm in (-(2 * j + 1)..=(2 * j + 1)).step_by(2) {
                let big_m = hi(tm);
                for (u, v) in [(1, 1), (-1, -1), (1, -1)] {
                    let ju = jj + hi(u);
                    let jv = jj + hi(v);
                    let s: f64 = [hi(1), hi(-1)]
                        .iter()
                        .map(|&m1| {
                            clebsch_gordan(hi(1), m1, jj, big_m - m1, ju) * clebsch_gordan(hi(1), m1, jj, big_m - m1, jv)
                        })
                        .sum();
                    let valid = |x: HalfInt| x.twice() >= tm.abs();
                    let want = if u == v && valid(ju) { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-13, "j={j} M={tm}/2 {u} {v}: {s}");
                }
            }
        }
    }

    #[test]
    fn clebsch_gordan_spot_values() {
        // ⟨1/2 1/2; 1/2 −1/2 | 1 0⟩ = 1/√2, ⟨1/2 1/2; 1/2 −1/2 | 0 0⟩ = 1/√2
        let v = clebsch_gordan(hi(1), hi(1), hi(1), hi(-1), hi(2));
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v = clebsch_gordan(hi(1), hi(1), hi(1), hi(-1), hi(0));
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v = clebsch_gordan(hi(1), hi(-1), hi(1), hi(1), hi(0));
        assert!((v + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coupling_rejects_bad_input() {
        assert!(coupling_expand(HalfAngleFactor::CosPlus, 1, 0, 0).is_err());
        assert!(coupling_expand(HalfAngleFactor::CosPlus, 0, 1, 2).is_err());
        let e = coupling_expand(HalfAngleFactor::CosPlus, 0, 0, 0).unwrap();
        assert!(e.minus.is_none());
    }

    #[test]
    fn coupling_identity_pointwise() {
        let p = AngularPoint::new(1.234, 0.567);
        for f in HalfAngleFactor::ALL {
            for j in 1..=3 {
                for m in -j..=j {
                    for s in -1..=1 {
                        let e = coupling_expand(f, s, j, m).unwrap();
                        let lhs = f.eval(p) * d_row(j, m, s, p);
                        assert!((lhs - e.eval(p)).norm() < 1e-13);
                    }
                }
            }
        }
    }
}
