//! Assembly of boson fields `U(x)` and Dirac spinors `Ψ(x)` at spacetime
//! points, and finite-difference residuals of their wave operators in the
//! spherical tetrad.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix4;

use crate::clifford::{bilateral_generator, gamma_basis, parity_matrix_action};
use crate::error::{domain, invalid, Result};
use crate::radial::{closed_form_regular, OctetValues, RadialParams};
use crate::wigner::{d_row, wigner_d_or_zero, AngularPoint};
use crate::{CMatrix4, CVector4, HalfInt, Sign, C64};

/// Default central-difference step for operator residuals.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// A point `(t, r, θ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Self {
        SpacetimePoint { t, r, theta, phi }
    }

    pub fn angular(&self) -> AngularPoint {
        AngularPoint::new(self.theta, self.phi)
    }

    /// The spatially reflected point `(t, r, π − θ, φ + π)`.
    pub fn reflected(&self) -> Self {
        SpacetimePoint { theta: PI - self.theta, phi: self.phi + PI, ..*self }
    }

    fn shifted(&self, axis: usize, h: f64) -> Self {
        let mut q = *self;
        match axis {
            0 => q.t += h,
            1 => q.r += h,
            2 => q.theta += h,
            _ => q.phi += h,
        }
        q
    }
}

/// Family of a boson solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BosonKind {
    /// Radial index `κ = J + 1`.
    I,
    /// Radial index `κ = −J`.
    II,
    /// The angle-independent `J = 0` solutions.
    J0,
}

impl std::str::FromStr for BosonKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(BosonKind::I),
            "II" | "ii" | "2" => Ok(BosonKind::II),
            "J0" | "j0" | "0" => Ok(BosonKind::J0),
            other => Err(invalid(format!("unknown boson kind '{other}' (expected I, II or J0)"))),
        }
    }
}

impl std::fmt::Display for BosonKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BosonKind::I => "I",
            BosonKind::II => "II",
            BosonKind::J0 => "J0",
        })
    }
}

/// Quantum numbers of a boson solution `U_{εJMΔ}^{λ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BosonModeSpec {
    pub epsilon: f64,
    pub mass: f64,
    pub j: i32,
    pub m: i32,
    pub delta: Sign,
    pub lambda: Sign,
    pub kind: BosonKind,
}

impl BosonModeSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            BosonKind::J0 if self.j != 0 => {
                return Err(invalid(format!("kind J0 requires J = 0, got J = {}", self.j)))
            }
            BosonKind::I | BosonKind::II if self.j < 1 => {
                return Err(invalid(format!("kind {} requires J >= 1, got J = {}", self.kind, self.j)))
            }
            _ => {}
        }
        if self.m.abs() > self.j {
            return Err(invalid(format!("|M| = {} exceeds J = {}", self.m.abs(), self.j)));
        }
        if !(self.mass >= 0.0 && self.epsilon > self.mass) {
            return Err(invalid(format!(
                "need epsilon > mass >= 0, got epsilon = {}, mass = {}",
                self.epsilon, self.mass
            )));
        }
        Ok(())
    }

    /// Radial system of the mode: `κ` by kind, mass sign `Δ·λ`.
    pub fn radial_params(&self) -> RadialParams {
        let kappa = match self.kind {
            BosonKind::I => self.j + 1,
            BosonKind::II => -self.j,
            BosonKind::J0 => 1,
        };
        RadialParams::new(self.epsilon, self.mass, kappa).with_signs(self.delta, self.lambda)
    }

    /// Regular radial pair `(f, g)` at `r`.
    pub fn radial(&self, r: f64) -> Result<(f64, f64)> {
        closed_form_regular(&self.radial_params())?.values(r)
    }
}

/// Quantum numbers of a Dirac solution `Ψ_{εjmδ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracModeSpec {
    pub epsilon: f64,
    pub mass: f64,
    pub j: HalfInt,
    pub m: HalfInt,
    pub delta: Sign,
    /// Column slot (1 to 4) of the spinor inside a 4×4 field.
    pub channel: u8,
}

impl DiracModeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.j.is_integer() || self.j.twice() < 1 {
            return Err(invalid(format!("j = {} must be a positive half-odd integer", self.j)));
        }
        if self.m.is_integer() || self.m.twice().abs() > self.j.twice() {
            return Err(invalid(format!("m = {} must be half-odd with |m| <= j = {}", self.m, self.j)));
        }
        if !(1..=4).contains(&self.channel) {
            return Err(invalid(format!("channel {} outside 1..=4", self.channel)));
        }
        if !(self.mass >= 0.0 && self.epsilon > self.mass) {
            return Err(invalid(format!(
                "need epsilon > mass >= 0, got epsilon = {}, mass = {}",
                self.epsilon, self.mass
            )));
        }
        Ok(())
    }

    /// `κ = j + 1/2`, mass sign `δ`.
    pub fn radial_params(&self) -> RadialParams {
        let kappa = (self.j.twice() + 1) / 2;
        RadialParams::new(self.epsilon, self.mass, kappa).with_signs(self.delta, Sign::Plus)
    }

    pub fn radial(&self, r: f64) -> Result<(f64, f64)> {
        closed_form_regular(&self.radial_params())?.values(r)
    }
}

fn check_radius(p: &SpacetimePoint) -> Result<()> {
    if !(p.r > 0.0) {
        return Err(domain(format!("radius r = {} must be positive", p.r)));
    }
    Ok(())
}

fn prefactor(epsilon: f64, p: &SpacetimePoint) -> C64 {
    C64::from_polar(1.0 / p.r, -epsilon * p.t)
}

/// Row multipliers `((f+ig), (f−ig), Δ(f−ig), Δ(f+ig))/√2`.
fn row_multipliers(delta: Sign, f: f64, g: f64) -> [C64; 4] {
    let plus = C64::new(f, g) * FRAC_1_SQRT_2;
    let minus = C64::new(f, -g) * FRAC_1_SQRT_2;
    let d = delta.value();
    [plus, minus, minus * d, plus * d]
}

/// `U(x)` with the regular closed-form radial functions.
pub fn eval_u(spec: &BosonModeSpec, p: &SpacetimePoint) -> Result<CMatrix4> {
    spec.validate()?;
    check_radius(p)?;
    let fg = spec.radial(p.r)?;
    eval_u_with_radial(spec, p, fg)
}

/// `U(x)` with the radial pair supplied by the caller.
pub fn eval_u_with_radial(spec: &BosonModeSpec, p: &SpacetimePoint, fg: (f64, f64)) -> Result<CMatrix4> {
    let coeff = u_coefficients(spec, p, fg)?;
    if spec.kind == BosonKind::J0 {
        return Ok(coeff);
    }
    let ang = p.angular();
    let d = [-1, 0, 1].map(|s| d_row(spec.j, spec.m, s, ang));
    Ok(Matrix4::from_fn(|r, c| coeff[(r, c)] * d[(template_sigma(r, c) + 1) as usize]))
}

/// The factors multiplying `D_σ` in each entry of `U`, including the
/// prefactor `e^{−iεt}/r` and the row multipliers; `σ` of entry `(r, c)`
/// is [`template_sigma`]. For `J = 0` the entries carry no D-function.
pub fn u_coefficients(spec: &BosonModeSpec, p: &SpacetimePoint, (f, g): (f64, f64)) -> Result<CMatrix4> {
    spec.validate()?;
    check_radius(p)?;
    let lam = spec.lambda.value();
    let angular: [[f64; 4]; 4] = match spec.kind {
        BosonKind::J0 => [[0.0, lam, 0.0, 1.0], [lam, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, lam], [1.0, 0.0, lam, 0.0]],
        BosonKind::I | BosonKind::II => {
            let jf = f64::from(spec.j);
            // type I: D_{±1}/√(J+1), D_0/√J; type II: D_{±1}/√J, −D_0/√(J+1)
            let (x, y) = if spec.kind == BosonKind::I {
                (1.0 / (jf + 1.0).sqrt(), 1.0 / jf.sqrt())
            } else {
                (1.0 / jf.sqrt(), -1.0 / (jf + 1.0).sqrt())
            };
            [
                [lam * x, lam * y, x, y],
                [lam * y, lam * x, y, x],
                [x, y, lam * x, lam * y],
                [y, x, lam * y, lam * x],
            ]
        }
    };
    let rows = row_multipliers(spec.delta, f, g);
    let pre = prefactor(spec.epsilon, p);
    Ok(Matrix4::from_fn(|r, c| pre * rows[r] * angular[r][c]))
}

/// `σ` of the function `D_σ = D^J_{−M,σ}` in entry `(row, col)` (0-based):
/// rows 1, 3 carry `(D_{−1}, D_0, D_{−1}, D_0)`, rows 2, 4 carry
/// `(D_0, D_{+1}, D_0, D_{+1})`.
pub fn template_sigma(row: usize, col: usize) -> i32 {
    let base = if row % 2 == 0 { -1 } else { 0 };
    base + (col % 2) as i32
}

/// The general parity-`Δ` template filled from eight radial values.
///
/// `f_11 = (A+iB)/√2`, `f_22 = (A−iB)/√2`, `f_12 = (C+iD)/√2`,
/// `f_21 = (C−iD)/√2`, `f_13 = (K+iL)/√2`, `f_24 = (K−iL)/√2`,
/// `f_14 = (M+iN)/√2`, `f_23 = (M−iN)/√2`; rows 3 and 4 are
/// `Δ(f_24, f_23, f_22, f_21)` and `Δ(f_14, f_13, f_12, f_11)`.
pub fn octet_to_u(j: i32, m: i32, delta: Sign, epsilon: f64, o: &OctetValues, p: &SpacetimePoint) -> Result<CMatrix4> {
    check_radius(p)?;
    if m.abs() > j {
        return Err(invalid(format!("|M| = {} exceeds J = {j}", m.abs())));
    }
    let s = FRAC_1_SQRT_2;
    let f11 = C64::new(o.a, o.b) * s;
    let f22 = C64::new(o.a, -o.b) * s;
    let f12 = C64::new(o.c, o.d) * s;
    let f21 = C64::new(o.c, -o.d) * s;
    let f13 = C64::new(o.k, o.l) * s;
    let f24 = C64::new(o.k, -o.l) * s;
    let f14 = C64::new(o.m, o.n) * s;
    let f23 = C64::new(o.m, -o.n) * s;
    let ang = p.angular();
    let (dm, d0, dp) = (d_row(j, m, -1, ang), d_row(j, m, 0, ang), d_row(j, m, 1, ang));
    let dl = delta.value();
    let t = [
        [f11 * dm, f12 * d0, f13 * dm, f14 * d0],
        [f21 * d0, f22 * dp, f23 * d0, f24 * dp],
        [f24 * dm * dl, f23 * d0 * dl, f22 * dm * dl, f21 * d0 * dl],
        [f14 * d0 * dl, f13 * dp * dl, f12 * d0 * dl, f11 * dp * dl],
    ];
    let pre = prefactor(epsilon, p);
    Ok(Matrix4::from_fn(|r, c| pre * t[r][c]))
}

/// `Ψ(x)` with the regular closed-form radial functions.
pub fn eval_psi(spec: &DiracModeSpec, p: &SpacetimePoint) -> Result<CVector4> {
    spec.validate()?;
    check_radius(p)?;
    let fg = spec.radial(p.r)?;
    eval_psi_with_radial(spec, p, fg)
}

/// `Ψ(x) = e^{−iεt}/r · (D_{−1/2}(F+iG), D_{+1/2}(F−iG), δD_{−1/2}(F−iG), δD_{+1/2}(F+iG))/√2`
/// with `D_σ = D^j_{−m,σ}` and the radial pair supplied by the caller.
pub fn eval_psi_with_radial(spec: &DiracModeSpec, p: &SpacetimePoint, (f, g): (f64, f64)) -> Result<CVector4> {
    spec.validate()?;
    check_radius(p)?;
    let ang = p.angular();
    let dm = wigner_d_or_zero(spec.j, -spec.m, -HalfInt::HALF, ang);
    let dp = wigner_d_or_zero(spec.j, -spec.m, HalfInt::HALF, ang);
    let rows = row_multipliers(spec.delta, f, g);
    let pre = prefactor(spec.epsilon, p);
    Ok(CVector4::new(rows[0] * dm, rows[1] * dp, rows[2] * dm, rows[3] * dp) * pre)
}

/// A 4×4 field with `Ψ` in column `channel` and zeros elsewhere.
pub fn psi_in_channel(spec: &DiracModeSpec, p: &SpacetimePoint) -> Result<CMatrix4> {
    let psi = eval_psi(spec, p)?;
    let mut out = CMatrix4::zeros();
    out.set_column(usize::from(spec.channel - 1), &psi);
    Ok(out)
}

/// Absolute residual together with the norm of the field it refers to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub absolute: f64,
    pub scale: f64,
}

impl Residual {
    /// `absolute / scale`, or `absolute` when the field vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.absolute / self.scale
        } else {
            self.absolute
        }
    }
}

fn check_singularities(p: &SpacetimePoint, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(domain(format!("step h = {h} must be positive")));
    }
    let margin = 10.0 * h;
    if p.r <= margin || p.theta <= margin || PI - p.theta <= margin {
        return Err(domain(format!(
            "point (r = {}, theta = {}) within 10h = {margin} of a coordinate singularity",
            p.r, p.theta
        )));
    }
    Ok(())
}

/// Which spin generators enter the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinAction {
    /// `J^{ab}`, acting on both bispinor indices (Dirac-Kähler).
    Bilateral,
    /// `σ^{ab}` from the left only (Dirac, column by column).
    Left,
}

/// Applies
/// `iγ⁰∂_t + i(γ³∂_r + (γ¹S³¹ + γ²S³²)/r) + [iγ¹∂_θ + γ²(i∂_φ + iS¹²cos θ)/sin θ]/r − m`
/// to `field` at `p`, where `S` is the chosen spin action. All partial
/// derivatives are central differences of step `h`.
pub fn tetrad_operator(
    field: &dyn Fn(&SpacetimePoint) -> Result<CMatrix4>,
    action: SpinAction,
    mass: f64,
    p: &SpacetimePoint,
    h: f64,
) -> Result<CMatrix4> {
    check_singularities(p, h)?;
    let g = gamma_basis();
    let spin = |a: usize, b: usize, u: &CMatrix4| match action {
        SpinAction::Bilateral => bilateral_generator(a, b, u),
        SpinAction::Left => g.sigma[a][b] * u,
    };
    let mut d = [CMatrix4::zeros(); 4];
    for (axis, slot) in d.iter_mut().enumerate() {
        let up = field(&p.shifted(axis, h))?;
        let dn = field(&p.shifted(axis, -h))?;
        *slot = (up - dn) * C64::from(0.5 / h);
    }
    let u = field(p)?;
    let i = C64::i();
    let (sin, cos) = p.theta.sin_cos();
    let angular = g.gamma[1] * d[2] * i + g.gamma[2] * (d[3] * i + spin(1, 2, &u) * (i * cos)) * C64::from(1.0 / sin);
    let radial = g.gamma[3] * d[1] + (g.gamma[1] * spin(3, 1, &u) + g.gamma[2] * spin(3, 2, &u)) * C64::from(1.0 / p.r);
    Ok(g.gamma[0] * d[0] * i + radial * i + angular * C64::from(1.0 / p.r) - u * C64::from(mass))
}

/// Dirac-Kähler residual of the boson solution at `p`.
pub fn dk_residual(spec: &BosonModeSpec, p: &SpacetimePoint, h: f64) -> Result<Residual> {
    spec.validate()?;
    let field = |q: &SpacetimePoint| eval_u(spec, q);
    let out = tetrad_operator(&field, SpinAction::Bilateral, spec.mass, p, h)?;
    Ok(Residual { absolute: out.norm(), scale: eval_u(spec, p)?.norm() })
}

/// Dirac residual of the spinor solution at `p`.
pub fn psi_residual(spec: &DiracModeSpec, p: &SpacetimePoint, h: f64) -> Result<Residual> {
    spec.validate()?;
    let field = |q: &SpacetimePoint| psi_in_channel(spec, q);
    let out = tetrad_operator(&field, SpinAction::Left, spec.mass, p, h)?;
    Ok(Residual { absolute: out.norm(), scale: eval_psi(spec, p)?.norm() })
}

/// Placeholder amplitudes for the angular template: distinct complex
/// constants so that misplaced entries cannot cancel.
fn placeholder(a: usize, b: usize) -> C64 {
    C64::new(1.0 + 0.5 * a as f64 + 0.125 * b as f64, 0.3 * b as f64 - 0.2 * a as f64)
}

/// `|Σ_{θφ}U − RHS|`: the angular operator applied by finite differences
/// to the generic template `f_{ab} D_σ(θ, φ)` versus the row-permuted
/// matrix `i√(J(J+1)) (−f_{4c}, f_{3c}, f_{2c}, −f_{1c})` with the
/// D-pattern of rows 1 and 2 alternating down the result.
pub fn sigma_action_check(j: i32, m: i32, p: AngularPoint) -> Result<f64> {
    if j < 1 || m.abs() > j {
        return Err(invalid(format!("need J >= 1 and |M| <= J, got J = {j}, M = {m}")));
    }
    let h = 1e-5;
    if p.theta.sin() < 10.0 * h {
        return Err(domain(format!("theta = {} too close to a pole", p.theta)));
    }
    let template = |th: f64, ph: f64| {
        let q = AngularPoint::new(th, ph);
        Matrix4::from_fn(|r, c| placeholder(r, c) * d_row(j, m, template_sigma(r, c), q))
    };
    let g = gamma_basis();
    let i = C64::i();
    let u = template(p.theta, p.phi);
    let dth = (template(p.theta + h, p.phi) - template(p.theta - h, p.phi)) * C64::from(0.5 / h);
    let dph = (template(p.theta, p.phi + h) - template(p.theta, p.phi - h)) * C64::from(0.5 / h);
    let (sin, cos) = p.theta.sin_cos();
    let lhs = g.gamma[1] * dth * i + g.gamma[2] * (dph * i + bilateral_generator(1, 2, &u) * (i * cos)) * C64::from(1.0 / sin);
    let a = (f64::from(j) * f64::from(j + 1)).sqrt();
    let source = [(3usize, -1.0), (2, 1.0), (1, 1.0), (0, -1.0)];
    let rhs = Matrix4::from_fn(|r, c| {
        let (src, sign) = source[r];
        // rows 1, 3 of the result carry the row-1 pattern, rows 2, 4 the row-2 pattern
        let pattern_row = r % 2;
        i * a * sign * placeholder(src, c) * d_row(j, m, template_sigma(pattern_row, c), p)
    });
    Ok((lhs - rhs).norm())
}

/// Result of comparing `Π U(P̂x)` with `±U(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityOutcome {
    /// The sign that best matches.
    pub eigenvalue: Sign,
    /// `‖ΠU(P̂x) − sU(x)‖ / ‖U(x)‖` for that sign.
    pub residual: f64,
    /// `Δ·(−1)^J`, the value the labels predict.
    pub expected: Sign,
}

/// `Π = Δ·(−1)^J`.
pub fn expected_parity(j: i32, delta: Sign) -> Sign {
    let base = if j.rem_euclid(2) == 0 { Sign::Plus } else { Sign::Minus };
    base * delta
}

/// Applies the reflection `(Π ⊗ Π)·P̂` and measures the eigenvalue.
pub fn parity_check(spec: &BosonModeSpec, p: &SpacetimePoint) -> Result<ParityOutcome> {
    let u = eval_u(spec, p)?;
    let pu = parity_matrix_action(&eval_u(spec, &p.reflected())?);
    parity_outcome(&u, &pu, expected_parity(spec.j, spec.delta))
}

/// Matches `pu` against `±u`.
pub fn parity_outcome(u: &CMatrix4, pu: &CMatrix4, expected: Sign) -> Result<ParityOutcome> {
    let scale = u.norm();
    if scale == 0.0 {
        return Err(domain("field vanishes at the sample point; parity undetermined"));
    }
    let plus = (pu - u).norm() / scale;
    let minus = (pu + u).norm() / scale;
    let (eigenvalue, residual) = if plus <= minus { (Sign::Plus, plus) } else { (Sign::Minus, minus) };
    Ok(ParityOutcome { eigenvalue, residual, expected })
}

/// Entry-wise pattern of the `J = 0` field under the reflection
/// constraints: `f_32 = Δf_23`, `f_34 = Δf_21`, `f_41 = Δf_14`, `f_43 = Δf_12`.
pub fn j0_constraint_residual(u: &CMatrix4, delta: Sign) -> f64 {
    let d = delta.value();
    let pairs = [((2, 1), (1, 2)), ((2, 3), (1, 0)), ((3, 0), (0, 3)), ((3, 2), (0, 1))];
    pairs.iter().map(|&(a, b)| (u[a] - u[b] * d).norm()).fold(0.0, f64::max)
}
