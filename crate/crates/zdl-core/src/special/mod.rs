//! Complex-analytic primitives: log-gamma, zeta and its derivatives,
//! the functional-equation factor chi, the theta phase, omega = chi'/chi
//! and the lambda_k family.

mod chi;
mod gamma;
mod zeta;

pub use chi::{
    chi, i_pow, lambda, lambda_all, lambda_k, log_chi_dd, omega, omega_jet, theta, theta_dd,
    theta_jet,
};
pub use gamma::{digamma, lgamma_dd, lgamma_f64, lgamma_jet};
pub use zeta::{zeta_deriv, zeta_jet, ComplexPoint};
