//! Dirac matrices in the spinor (Weyl) representation, the spin generators
//! `σ^{ab} = ¼[γ^a, γ^b]`, and their action on 4×4 Dirac-Kähler fields.
//!
//! A Dirac-Kähler field `U` is a 2-rank bispinor: the first index transforms
//! by left multiplication and the second by right multiplication with the
//! transposed matrix. Under vectorisation by rows, `A ⊗ B` acts as
//! `U ↦ A U Bᵀ`.

use std::sync::OnceLock;

use nalgebra::Matrix4;

use crate::{CMatrix4, C64};

/// Gamma matrices and their commutators.
#[derive(Clone, Debug)]
pub struct GammaBasis {
    /// `γ^0, γ^1, γ^2, γ^3`.
    pub gamma: [CMatrix4; 4],
    /// `sigma[a][b] = ¼[γ^a, γ^b]`.
    pub sigma: [[CMatrix4; 4]; 4],
}

/// Minkowski metric signature `(+, −, −, −)`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Builds the basis `γ^0 = [[0, I], [I, 0]]`, `γ^j = [[0, −σ_j], [σ_j, 0]]`.
///
/// In this representation `σ^{12} = diag(−i/2, i/2, −i/2, i/2)`.
pub fn build_gamma_basis() -> GammaBasis {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let pauli = [
        [[z, one], [one, z]],
        [[z, -i], [i, z]],
        [[one, z], [z, -one]],
    ];
    let mut gamma = [CMatrix4::zeros(); 4];
    for k in 0..2 {
        gamma[0][(k, k + 2)] = one;
        gamma[0][(k + 2, k)] = one;
    }
    for (j, p) in pauli.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                gamma[j + 1][(r, c + 2)] = -p[r][c];
                gamma[j + 1][(r + 2, c)] = p[r][c];
            }
        }
    }
    let sigma = std::array::from_fn(|a| {
        std::array::from_fn(|b| (gamma[a] * gamma[b] - gamma[b] * gamma[a]) * C64::new(0.25, 0.0))
    });
    GammaBasis { gamma, sigma }
}

/// Shared instance of [`build_gamma_basis`].
pub fn gamma_basis() -> &'static GammaBasis {
    static BASIS: OnceLock<GammaBasis> = OnceLock::new();
    BASIS.get_or_init(build_gamma_basis)
}

/// Which bispinor index a 4×4 operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorSlot {
    /// `A ⊗ I`: `U ↦ A U`.
    First,
    /// `I ⊗ A`: `U ↦ U Aᵀ`.
    Second,
}

/// Applies `a` to one index of the bispinor `u`.
pub fn act(slot: TensorSlot, a: &CMatrix4, u: &CMatrix4) -> CMatrix4 {
    match slot {
        TensorSlot::First => a * u,
        TensorSlot::Second => u * a.transpose(),
    }
}

/// The bilateral generator `J^{ab} U = σ^{ab} U + U σ^{ab,T}`, i.e.
/// `σ^{ab} ⊗ I + I ⊗ σ^{ab}`.
pub fn bilateral_generator(a: usize, b: usize, u: &CMatrix4) -> CMatrix4 {
    let s = &gamma_basis().sigma[a][b];
    s * u + u * s.transpose()
}

/// The spherical-tetrad parity matrix: anti-diagonal with entries −1.
pub fn parity_matrix() -> CMatrix4 {
    Matrix4::from_fn(|r, c| if r + c == 3 { C64::new(-1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `(Π ⊗ Π) U = Π U Πᵀ`. The coordinate reflection is applied by the caller.
pub fn parity_matrix_action(u: &CMatrix4) -> CMatrix4 {
    let p = parity_matrix();
    p * u * p.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn clifford_relations_hold_exactly() {
        let g = build_gamma_basis();
        for a in 0..4 {
            for b in 0..4 {
                let ac = g.gamma[a] * g.gamma[b] + g.gamma[b] * g.gamma[a];
                let eta = if a == b { 2.0 * METRIC[a] } else { 0.0 };
                let want = CMatrix4::identity() * c(eta, 0.0);
                assert_eq!(ac, want, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn sigma12_is_diagonal() {
        let s = &build_gamma_basis().sigma[1][2];
        let want = CMatrix4::from_diagonal(&nalgebra::Vector4::new(
            c(0.0, -0.5),
            c(0.0, 0.5),
            c(0.0, -0.5),
            c(0.0, 0.5),
        ));
        assert_eq!(*s, want);
    }

    fn sample(seed: u64) -> CMatrix4 {
        let mut x = seed as f64;
        CMatrix4::from_fn(|_, _| {
            x = (x * 7.31 + 0.17).sin() * 3.0;
            let re = x;
            x = (x * 5.77 + 0.41).cos() * 2.0;
            c(re, x)
        })
    }

    fn vec_rows(u: &CMatrix4) -> DMatrix<C64> {
        DMatrix::from_fn(16, 1, |k, _| u[(k / 4, k % 4)])
    }

    fn dyn4(a: &CMatrix4) -> DMatrix<C64> {
        DMatrix::from_fn(4, 4, |r, c| a[(r, c)])
    }

    #[test]
    fn bilateral_generator_matches_kronecker_oracle() {
        let id = DMatrix::<C64>::identity(4, 4);
        let g = build_gamma_basis();
        let u = sample(3);
        for a in 0..4 {
            for b in 0..4 {
                let s = dyn4(&g.sigma[a][b]);
                let big = s.kronecker(&id) + id.kronecker(&s);
                let want = big * vec_rows(&u);
                let got = vec_rows(&bilateral_generator(a, b, &u));
                assert!((want - got).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn tensor_slots_match_kronecker_oracle() {
        let id = DMatrix::<C64>::identity(4, 4);
        let a = sample(11);
        let u = sample(5);
        let first = dyn4(&a).kronecker(&id) * vec_rows(&u);
        let second = id.kronecker(&dyn4(&a)) * vec_rows(&u);
        assert!((first - vec_rows(&act(TensorSlot::First, &a, &u))).norm() < 1e-12);
        assert!((second - vec_rows(&act(TensorSlot::Second, &a, &u))).norm() < 1e-12);
    }

    #[test]
    fn parity_is_an_involution() {
        let u = sample(7);
        let twice = parity_matrix_action(&parity_matrix_action(&u));
        assert!((twice - u).norm() < 1e-14);
    }

    #[test]
    fn generators_close_lorentz_algebra() {
        // [σ^{ab}, σ^{cd}] = η^{bc}σ^{ad} − η^{ac}σ^{bd} − η^{bd}σ^{ac} + η^{ad}σ^{bc}
        let g = build_gamma_basis();
        let eta = |i: usize, j: usize| if i == j { METRIC[i] } else { 0.0 };
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        let s = &g.sigma;
                        let lhs = s[a][b] * s[cc][d] - s[cc][d] * s[a][b];
                        let rhs = s[a][d] * c(eta(b, cc), 0.0) - s[b][d] * c(eta(a, cc), 0.0)
                            - s[a][cc] * c(eta(b, d), 0.0)
                            + s[b][cc] * c(eta(a, d), 0.0);
                        assert!((lhs - rhs).norm() < 1e-14);
                    }
                }
            }
        }
    }
}
