//! Spherical-wave solutions of the Dirac-Kähler equation in a spherical
//! tetrad, their splitting into Dirac fermions, and numerical certification
//! of every identity the construction relies on.
//!
//! The crate is organised bottom-up:
//!
//! * [`clifford`]: gamma matrices, spin generators and the bilateral action
//!   on 4×4 fields.
//! * [`wigner`]: Wigner functions, their recurrence identities and
//!   half-angle coupling.
//! * [`radial`]: the radial systems, closed-form Bessel solutions and a
//!   fixed-step RK4 integrator.
//! * [`fields`]: assembly of the boson field matrix `U`, the Dirac spinor
//!   `Ψ`, and finite-difference residuals of both wave operators.
//! * [`fermion_map`]: the local gauge transform to a Cartesian spinor frame,
//!   the split into two half-integer families and the expansion over Dirac
//!   solutions.
//! * [`curved`]: the radial system on a spherical space and its
//!   overdetermination.
//! * [`cli`]: the `dkwaves` command-line front end.

pub mod cli;
pub mod clifford;
pub mod curved;
mod error;
pub mod fermion_map;
pub mod fields;
mod numbers;
mod ode;
pub mod radial;
pub mod wigner;

pub use error::{Error, Result};
pub use numbers::{HalfInt, Sign};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// 4×4 complex matrix, the shape of a Dirac-Kähler field.
pub type CMatrix4 = nalgebra::Matrix4<C64>;
/// Complex 4-vector, the shape of a Dirac spinor.
pub type CVector4 = nalgebra::Vector4<C64>;
/// 2×2 complex matrix.
pub type CMatrix2 = nalgebra::Matrix2<C64>;
