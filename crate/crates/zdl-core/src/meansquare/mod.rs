//! Windowed mean-square integrals and their closed-form main terms.

mod integrate;
pub mod mainterms;
mod oscillatory;

pub use integrate::{
    integrate_izeta, integrate_jz, integrate_jz_resumable, mean_square_report, paper_error_scale,
    MeanSquareReport, WindowIntegral, PANEL_BLOCK,
};
pub use mainterms::{
    main_term_thm0, main_term_thm4, moment_prod_hardy_constant, p_k_theta, parity_factor,
    prop_l12_j, zeta_main_constant_thm5, InnerLimit, PAIR_SUM_CAP,
};
pub use oscillatory::{
    oscillatory_window_integral, stationary_phase_mismatch, OscillatoryReport,
};
