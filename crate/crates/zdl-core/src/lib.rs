//! Numerics laboratory for Hardy's Z-function and its derivatives.
//!
//! The crate evaluates Z(t), its derivatives, the associated eta_k family
//! of meromorphic functions, mollifier Dirichlet polynomials, mean-square
//! integrals over short intervals with their closed-form main terms, and
//! zero counts / Littlewood-type weighted zero sums, all at "desk scale"
//! heights (t up to about 1e8).
//!
//! Layout follows the pipeline:
//!   [`ntk`]  exact integer/rational arithmetic and arithmetic sums
//!   [`special`]  zeta derivatives, chi, theta, omega, lambda_k
//!   [`hardy`]  Z, Z^(k), eta_k, the approximate functional equation
//!   [`mollifier`]  Dirichlet polynomials and the standard mollifier
//!   [`meansquare`]  window integrals and closed-form main terms
//!   [`zerolab`]  argument-principle counting and weighted zero sums
//!   [`verify`]  the acceptance suite run by `zdl verify` and the tests

pub mod dd;
pub mod error;
pub mod hardy;
pub mod jets;
pub mod meansquare;
pub mod mollifier;
pub mod ntk;
pub mod precision;
pub mod quad;
pub mod special;
pub mod verify;
pub mod zerolab;

pub use error::{Error, Result};
pub use precision::PrecisionConfig;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
