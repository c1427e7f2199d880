//! Truncated orthonormal-polynomial models of φ-sub-Gaussian processes.
//!
//! A second-order process `X(t) = Σ ξ_k a_k(t)` is modelled by the finite sum
//! `X_N(t) = Σ_{k≤N} ξ_k â_k(t)`, where `â_k` are numerically computed
//! coefficients against an orthonormal Legendre, generalized Laguerre or
//! Gegenbauer basis. The [`bounds`] module turns generating-function
//! identities of those families into an upper estimate `C_N` of
//! `∫_0^T τ_φ(X(t) − X_N(t))^p dt`, and picks the smallest `N` for which the
//! model has accuracy `δ` in `L_p[0, T]` with reliability `1 − α`.
//! The [`process`] module checks that statement by Monte Carlo.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the type
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
mod error;
pub mod orlicz;
pub mod orthopoly;
pub mod process;
pub mod quadrature;
mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bounds::{BoundReport, Resolution, Selection};
pub use orlicz::{OrliczSpec, Regime, TailBoundSpec};
pub use orthopoly::{FamilyKind, PolynomialFamily};
pub use process::{CoefficientTable, Kernel, KernelKind, ProcessSpec, VerificationReport, XiMode};
pub use quadrature::{QuadratureRule, RuleKind};
pub use specfun::SpecFunResult;

/// `f64` instantiations of the generic types.
pub type Family = PolynomialFamily<f64>;
pub type Orlicz = OrliczSpec<f64>;
pub type TailBound = TailBoundSpec<f64>;
pub type Rule = QuadratureRule<f64>;
pub type Process = ProcessSpec<f64>;
pub type Coefficients = CoefficientTable<f64>;
pub type Report = BoundReport<f64>;
pub type Verification = VerificationReport<f64>;

/// `f32` instantiations, mainly useful for fast previews.
pub type Family32 = PolynomialFamily<f32>;
pub type Rule32 = QuadratureRule<f32>;
