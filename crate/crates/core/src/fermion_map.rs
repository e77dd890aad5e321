//! From boson to fermion solutions: the local spinor rotation that removes
//! the connection from the second bispinor index, the split of the rotated
//! field into parts built from `D^{J−1/2}` and `D^{J+1/2}`, and the
//! expansion of each part over Dirac spherical waves.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4};

use crate::clifford::gamma_basis;
use crate::error::{domain, invalid, Error, Result};
use crate::fields::{
    eval_psi, eval_psi_with_radial, eval_u, tetrad_operator, u_coefficients, BosonKind,
    BosonModeSpec, DiracModeSpec, Residual, SpacetimePoint, SpinAction,
};
use crate::radial::{octet_from_pair, Substitution};
use crate::wigner::{coupling_expand, wigner_d_or_zero, AngularPoint, HalfAngleFactor};
use crate::{CMatrix2, CMatrix4, CVector4, HalfInt, Sign, C64};

/// The rotation `B(θ, φ)` and `S = diag(B, B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeMatrix {
    pub b: CMatrix2,
    pub s: CMatrix4,
}

/// `B = [[c e^{−iφ/2}, −s e^{−iφ/2}], [s e^{iφ/2}, c e^{iφ/2}]]` with
/// `c = cos(θ/2)`, `s = sin(θ/2)`; this is `D^{1/2}(φ, θ, 0)` with rows
/// and columns ordered `(+1/2, −1/2)`.
pub fn gauge_b(theta: f64, phi: f64) -> GaugeMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let em = C64::from_polar(1.0, -phi / 2.0);
    let ep = C64::from_polar(1.0, phi / 2.0);
    let b = Matrix2::new(em * c, -em * s, ep * s, ep * c);
    let mut big = CMatrix4::zeros();
    big.fixed_view_mut::<2, 2>(0, 0).copy_from(&b);
    big.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    GaugeMatrix { b, s: big }
}

/// The spinor connection of the spherical tetrad along `θ` and `φ`:
/// `Γ_θ = σ^{31}`, `Γ_φ = sin θ σ^{32} + cos θ σ^{12}` (`Γ_t = Γ_r = 0`).
pub fn spherical_connection(theta: f64) -> [CMatrix4; 2] {
    let sg = &gamma_basis().sigma;
    let (sin, cos) = theta.sin_cos();
    [sg[3][1], sg[3][2] * C64::from(sin) + sg[1][2] * C64::from(cos)]
}

const GAUGE_FD_STEP: f64 = 1e-6;

/// `max_α ‖S Γ_α S⁻¹ + S ∂_α S⁻¹‖` over `α ∈ {θ, φ}` for a given connection.
pub fn bracket_residual(theta: f64, phi: f64, gammas: &[CMatrix4; 2]) -> Result<f64> {
    if theta.sin() < 1e-4 {
        return Err(domain(format!("theta = {theta} too close to a pole")));
    }
    let h = GAUGE_FD_STEP;
    let inv = |t: f64, p: f64| gauge_b(t, p).s.adjoint();
    let s = gauge_b(theta, phi).s;
    let d_theta = (inv(theta + h, phi) - inv(theta - h, phi)) * C64::from(0.5 / h);
    let d_phi = (inv(theta, phi + h) - inv(theta, phi - h)) * C64::from(0.5 / h);
    let sinv = s.adjoint();
    let r_theta = (s * gammas[0] * sinv + s * d_theta).norm();
    let r_phi = (s * gammas[1] * sinv + s * d_phi).norm();
    Ok(r_theta.max(r_phi))
}

/// [`bracket_residual`] with the spherical connection.
pub fn cancellation_residual(theta: f64, phi: f64) -> Result<f64> {
    bracket_residual(theta, phi, &spherical_connection(theta))
}

/// Which bispinor index the rotation acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GaugeOrdering {
    /// `(I ⊗ S)`: `V = U Sᵀ`. This is the ordering that splits the equation.
    #[default]
    SecondIndex,
    /// `(S ⊗ I)`: `V = S U`.
    FirstIndex,
}

/// Rotates a field value.
pub fn transform_to_v(u: &CMatrix4, theta: f64, phi: f64, ordering: GaugeOrdering) -> CMatrix4 {
    let s = gauge_b(theta, phi).s;
    match ordering {
        GaugeOrdering::SecondIndex => u * s.transpose(),
        GaugeOrdering::FirstIndex => s * u,
    }
}

/// `V(x)` for a boson mode.
pub fn eval_v(spec: &BosonModeSpec, p: &SpacetimePoint, ordering: GaugeOrdering) -> Result<CMatrix4> {
    Ok(transform_to_v(&eval_u(spec, p)?, p.theta, p.phi, ordering))
}

/// Dirac residual of each column of `V`, the operator acting from the left.
/// Each is scaled by the column norm, or by `‖V‖` for a column that is zero.
pub fn dirac_split_residual(
    spec: &BosonModeSpec,
    p: &SpacetimePoint,
    h: f64,
    ordering: GaugeOrdering,
) -> Result<[Residual; 4]> {
    spec.validate()?;
    let field = |q: &SpacetimePoint| eval_v(spec, q, ordering);
    let out = tetrad_operator(&field, SpinAction::Left, spec.mass, p, h)?;
    let v = field(p)?;
    // a column that vanishes identically is measured against the whole field
    let floor = 1e-10 * v.norm();
    Ok(std::array::from_fn(|k| {
        let col = v.column(k).norm();
        Residual { absolute: out.column(k).norm(), scale: if col > floor { col } else { v.norm() } }
    }))
}

/// `V = V^{(J−1/2)} + V^{(J+1/2)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitPair {
    pub v_minus: CMatrix4,
    pub v_plus: CMatrix4,
}

/// Factor `S_{kc}` as `sign × half-angle factor`, for the `2×2` block.
fn block_factor(k: usize, c: usize) -> (f64, HalfAngleFactor) {
    match (k % 2, c % 2) {
        (0, 0) => (1.0, HalfAngleFactor::CosMinus),
        (0, _) => (-1.0, HalfAngleFactor::SinMinus),
        (_, 0) => (1.0, HalfAngleFactor::SinPlus),
        _ => (1.0, HalfAngleFactor::CosPlus),
    }
}

/// Splits `V` at `p` by coupling every product `S_{kc} · D^J_{−M,σ}` into
/// weights `J ± 1/2`.
pub fn split_half_integer(spec: &BosonModeSpec, p: &SpacetimePoint) -> Result<SplitPair> {
    let fg = spec.radial(p.r)?;
    split_with_radial(spec, p, fg)
}

/// [`split_half_integer`] with the radial pair supplied by the caller.
pub fn split_with_radial(spec: &BosonModeSpec, p: &SpacetimePoint, fg: (f64, f64)) -> Result<SplitPair> {
    let coeff = u_coefficients(spec, p, fg)?;
    let ang = p.angular();
    let mut v_minus = CMatrix4::zeros();
    let mut v_plus = CMatrix4::zeros();
    for i in 0..4 {
        for k in 0..4 {
            // V_{ik} = Σ_c U_{ic} S_{kc}; S is block diagonal
            let block = 2 * (k / 2);
            for c in block..block + 2 {
                let a = coeff[(i, c)];
                if a == C64::from(0.0) {
                    continue;
                }
                let (sign, factor) = block_factor(k, c);
                let sigma = crate::fields::template_sigma(i, c);
                let e = coupling_expand(factor, sigma, spec.j, spec.m)?;
                if let Some(idx) = e.minus {
                    v_minus[(i, k)] += a * sign * e.c_minus * crate::wigner::wigner_d(idx, ang);
                }
                v_plus[(i, k)] += a * sign * e.c_plus * crate::wigner::wigner_d(e.plus, ang);
            }
        }
    }
    Ok(SplitPair { v_minus, v_plus })
}

/// Radial bundles of the split: for the `J − 1/2` part
/// `H^± = √(J(J+1))/(2J+1) · [√(J+1)(K ± iL) − √J(M ± iN)]`, for the
/// `J + 1/2` part `H^± = √(J(J+1))/(2J+1) · [√J(K ± iL) + √(J+1)(M ± iN)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialBundles {
    /// `(H^+, H^−)` of the `J − 1/2` part.
    pub lower: (C64, C64),
    /// `(H^+, H^−)` of the `J + 1/2` part.
    pub upper: (C64, C64),
}

pub fn radial_bundles(spec: &BosonModeSpec, (f, g): (f64, f64)) -> Result<RadialBundles> {
    let sub = match spec.kind {
        BosonKind::I => Substitution::I,
        BosonKind::II => Substitution::II,
        BosonKind::J0 => return Err(invalid("radial bundles need J >= 1")),
    };
    let o = octet_from_pair(sub, spec.lambda, spec.j, f, g);
    let jf = f64::from(spec.j);
    let norm = (jf * (jf + 1.0)).sqrt() / (2.0 * jf + 1.0);
    let kl = |s: f64| C64::new(o.k, s * o.l);
    let mn = |s: f64| C64::new(o.m, s * o.n);
    let lower = |s: f64| (kl(s) * (jf + 1.0).sqrt() - mn(s) * jf.sqrt()) * norm;
    let upper = |s: f64| (kl(s) * jf.sqrt() + mn(s) * (jf + 1.0).sqrt()) * norm;
    Ok(RadialBundles { lower: (lower(1.0), lower(-1.0)), upper: (upper(1.0), upper(-1.0)) })
}

/// The split written as explicit tables of angular slots `Ω, Ξ, Υ, Z`
/// times radial bundles, independent of the constructive coupling.
pub fn split_table(spec: &BosonModeSpec, p: &SpacetimePoint, fg: (f64, f64)) -> Result<SplitPair> {
    spec.validate()?;
    let bundles = radial_bundles(spec, fg)?;
    let ang = p.angular();
    let (j, m) = (f64::from(spec.j), f64::from(spec.m));
    let jj = HalfInt::from_int(spec.j);
    let mm = HalfInt::from_int(spec.m);
    let half = HalfInt::HALF;
    let dd = |big: HalfInt, row: HalfInt, col: HalfInt| wigner_d_or_zero(big, row, col, ang);
    let lam = spec.lambda.value();
    let del = spec.delta.value();
    let jj1 = j * (j + 1.0);
    let pre = C64::from_polar(FRAC_1_SQRT_2 / p.r, -spec.epsilon * p.t);

    // J − 1/2
    let lo = jj - half;
    let cp = ((j + m) / jj1).sqrt();
    let cm = ((j - m) / jj1).sqrt();
    let om = dd(lo, half - mm, -half) * cp;
    let up = dd(lo, half - mm, half) * cp;
    let xi = dd(lo, -mm - half, -half) * cm;
    let z = dd(lo, -mm - half, half) * cm;
    let (hp, hm) = bundles.lower;
    let minus = [
        [om * lam, -xi * lam, om, -xi].map(|x| x * hp),
        [-up * lam, z * lam, -up, z].map(|x| x * hm),
        [om, -xi, om * lam, -xi * lam].map(|x| x * hm * del),
        [-up, z, -up * lam, z * lam].map(|x| x * hp * del),
    ];

    // J + 1/2
    let hi = jj + half;
    let cp = ((j - m + 1.0) / jj1).sqrt();
    let cm = ((j + m + 1.0) / jj1).sqrt();
    let om = dd(hi, half - mm, -half) * cp;
    let xi = dd(hi, -mm - half, -half) * cm;
    let up = dd(hi, half - mm, half) * cp;
    let z = dd(hi, -mm - half, half) * cm;
    let (hp, hm) = bundles.upper;
    let plus = [
        [om * lam, xi * lam, om, xi].map(|x| x * hp),
        [up * lam, z * lam, up, z].map(|x| x * hm),
        [om, xi, om * lam, xi * lam].map(|x| x * hm * del),
        [up, z, up * lam, z * lam].map(|x| x * hp * del),
    ];
    Ok(SplitPair {
        v_minus: Matrix4::from_fn(|r, c| minus[r][c] * pre),
        v_plus: Matrix4::from_fn(|r, c| plus[r][c] * pre),
    })
}

/// Which half-integer part an expansion describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `j = J + 1/2`.
    Plus,
    /// `j = J − 1/2`.
    Minus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "J+1/2",
            Branch::Minus => "J-1/2",
        })
    }
}

/// `(α, β) = (√((J−M+1)/(J(J+1))), √((J+M+1)/(J(J+1))))` for the plus
/// branch, `(ρ, σ) = (√((J+M)/(J(J+1))), √((J−M)/(J(J+1))))` for the minus
/// branch.
pub fn expansion_coefficients(j: i32, m: i32, branch: Branch) -> Result<(f64, f64)> {
    if j < 1 || m.abs() > j {
        return Err(domain(format!("need J >= 1 and |M| <= J, got J = {j}, M = {m}")));
    }
    let (jf, mf) = (f64::from(j), f64::from(m));
    let n = jf * (jf + 1.0);
    Ok(match branch {
        Branch::Plus => (((jf - mf + 1.0) / n).sqrt(), ((jf + mf + 1.0) / n).sqrt()),
        Branch::Minus => (((jf + mf) / n).sqrt(), ((jf - mf) / n).sqrt()),
    })
}

/// One expansion `V^{(j)} = Σ_k c_k Ψ^{(k)}_{j m_k δ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionCase {
    pub kind: BosonKind,
    pub delta: Sign,
    pub lambda: Sign,
    /// Parity label `δ` of the Dirac waves.
    pub dirac_delta: Sign,
    /// Sign of each column's coefficient.
    pub column_signs: [Sign; 4],
    /// Whether every coefficient carries a factor `i`.
    pub imaginary: bool,
}

const P: Sign = Sign::Plus;
const M: Sign = Sign::Minus;

const fn case(kind: BosonKind, delta: Sign, lambda: Sign, dirac_delta: Sign, column_signs: [Sign; 4], imaginary: bool) -> ExpansionCase {
    ExpansionCase { kind, delta, lambda, dirac_delta, column_signs, imaginary }
}

/// The twelve expansions: type I into `j = J + 1/2` with coefficients
/// `(α, β, α, β)`, type II into `j = J − 1/2` with `i(ρ, σ, ρ, σ)`, and the
/// `J = 0` solutions into `j = 1/2` with unit coefficients.
pub const EXPANSION_CASES: [ExpansionCase; 12] = [
    case(BosonKind::I, P, P, P, [P, P, P, P], false),
    case(BosonKind::I, P, M, M, [M, M, P, P], false),
    case(BosonKind::I, M, P, M, [P, P, P, P], false),
    case(BosonKind::I, M, M, P, [M, M, P, P], false),
    case(BosonKind::II, P, P, M, [P, M, P, M], true),
    case(BosonKind::II, M, M, M, [M, P, P, M], true),
    case(BosonKind::II, P, M, P, [M, P, P, M], true),
    case(BosonKind::II, M, P, P, [P, M, P, M], true),
    case(BosonKind::J0, P, P, P, [P, P, P, P], false),
    case(BosonKind::J0, M, M, P, [M, M, P, P], false),
    case(BosonKind::J0, P, M, M, [M, M, P, P], false),
    case(BosonKind::J0, M, P, M, [P, P, P, P], false),
];

/// Looks up the expansion for a boson mode.
pub fn expansion_case(spec: &BosonModeSpec) -> Result<ExpansionCase> {
    EXPANSION_CASES
        .iter()
        .find(|c| c.kind == spec.kind && c.delta == spec.delta && c.lambda == spec.lambda)
        .copied()
        .ok_or_else(|| {
            Error::Unimplemented(format!(
                "no expansion for kind {} with (Delta, lambda) = ({}, {})",
                spec.kind, spec.delta, spec.lambda
            ))
        })
}

/// Outcome of [`verify_expansion`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionReport {
    pub case: ExpansionCase,
    pub branch: Branch,
    /// `2j`.
    pub twice_j: i32,
    /// Closed-form coefficient magnitudes `(α, β)` or `(ρ, σ)`; `(1, 1)` at `J = 0`.
    pub coefficients: (f64, f64),
    /// Coefficient magnitudes recovered by projecting each column of
    /// `V^{(j)}` on its Dirac wave; `None` where that wave vanishes.
    pub fitted: [Option<f64>; 4],
    /// `‖V^{(j)}_{·k} − (expansion)_{·k}‖` per column.
    pub column_residuals: [f64; 4],
    /// `‖V^{(j)}‖` at the point.
    pub scale: f64,
}

impl ExpansionReport {
    pub fn max_residual(&self) -> f64 {
        self.column_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Largest deviation between fitted and closed-form coefficients.
    pub fn coefficient_error(&self) -> f64 {
        let want = [self.coefficients.0, self.coefficients.1, self.coefficients.0, self.coefficients.1];
        self.fitted
            .iter()
            .zip(want)
            .filter_map(|(f, w)| f.map(|f| (f - w).abs()))
            .fold(0.0, f64::max)
    }
}

/// Checks the expansion of the appropriate `V^{(J±1/2)}` over Dirac waves
/// at `p`. Columns 1, 3 use `m = M − 1/2`, columns 2, 4 use `m = M + 1/2`.
/// For the minus branch the Dirac radial pair is `(F, G) = (g, −f)`.
pub fn verify_expansion(spec: &BosonModeSpec, p: &SpacetimePoint) -> Result<ExpansionReport> {
    spec.validate()?;
    let case = expansion_case(spec)?;
    let (branch, twice_j, coefficients) = match spec.kind {
        BosonKind::I => (Branch::Plus, 2 * spec.j + 1, expansion_coefficients(spec.j, spec.m, Branch::Plus)?),
        BosonKind::II => (Branch::Minus, 2 * spec.j - 1, expansion_coefficients(spec.j, spec.m, Branch::Minus)?),
        BosonKind::J0 => (Branch::Plus, 1, (1.0, 1.0)),
    };
    let fg = spec.radial(p.r)?;
    let split = split_with_radial(spec, p, fg)?;
    let target = match branch {
        Branch::Plus => split.v_plus,
        Branch::Minus => split.v_minus,
    };
    let big_m = HalfInt::from_int(spec.m);
    let phase = if case.imaginary { C64::i() } else { C64::from(1.0) };
    let mut column_residuals = [0.0; 4];
    let mut fitted = [None; 4];
    for k in 0..4 {
        let m = if k % 2 == 0 { big_m - HalfInt::HALF } else { big_m + HalfInt::HALF };
        let mag = if k % 2 == 0 { coefficients.0 } else { coefficients.1 };
        let dspec = DiracModeSpec {
            epsilon: spec.epsilon,
            mass: spec.mass,
            j: HalfInt::from_twice(twice_j),
            m,
            delta: case.dirac_delta,
            channel: (k + 1) as u8,
        };
        let psi: CVector4 = if m.twice().abs() > twice_j {
            CVector4::zeros()
        } else {
            match branch {
                Branch::Plus => eval_psi(&dspec, p)?,
                Branch::Minus => eval_psi_with_radial(&dspec, p, (fg.1, -fg.0))?,
            }
        };
        let unit = psi * (phase * case.column_signs[k].value());
        let col = target.column(k).into_owned();
        column_residuals[k] = (col - unit * C64::from(mag)).norm();
        let nn = unit.norm_squared();
        if nn > 1e-24 {
            fitted[k] = Some(unit.dotc(&col).re / nn);
        }
    }
    Ok(ExpansionReport { case, branch, twice_j, coefficients, fitted, column_residuals, scale: target.norm() })
}

/// `D^{1/2}(φ, θ, 0)` with rows and columns ordered `(+1/2, −1/2)`;
/// equal to `B`.
pub fn gauge_as_spin_half(p: AngularPoint) -> CMatrix2 {
    let half = HalfInt::HALF;
    let d = |a: HalfInt, b: HalfInt| wigner_d_or_zero(half, a, b, p);
    Matrix2::new(d(half, half), d(half, -half), d(-half, half), d(-half, -half))
}
