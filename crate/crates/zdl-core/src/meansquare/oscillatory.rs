//! The oscillatory window integral int_T^{T+H} (t/(e xi))^{it} (log tau)^{-alpha} dt
//! with its stationary-phase prediction.

use crate::dd::{phase_exp, Dd};
use crate::error::{Error, Result};
use crate::mollifier::WindowSpec;
use crate::precision::PrecisionConfig;
use crate::quad::gl32;
use crate::C64;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy)]
pub struct OscillatoryReport {
    pub numeric: C64,
    /// Stationary-phase prediction; zero outside T <= xi <= T+H (where
    /// only the error scale remains).
    pub prediction: C64,
    pub stationary_inside: bool,
    /// The comparison scale R(xi) (log T)^{-alpha}.
    pub error_scale: f64,
    /// Whether sqrt(T) <= H <= T / log T held (the stated regime).
    pub regime_ok: bool,
    pub panels: u64,
}

/// Numeric quadrature plus the prediction
/// 2^alpha e^{i pi/4} sqrt(2 pi xi) e^{-i xi} (log(xi/2pi))^{-alpha}.
pub fn oscillatory_window_integral(
    xi: f64,
    alpha: usize,
    window: &WindowSpec,
    prec: &PrecisionConfig,
) -> Result<OscillatoryReport> {
    if xi <= 0.0 {
        return Err(Error::Validation("xi must be positive".into()));
    }
    if window.h <= 0.0 {
        return Err(Error::Validation("window has zero length".into()));
    }
    let t0 = window.t_lo;
    let t1 = window.t_hi();
    let regime_ok = window.h >= t0.sqrt() && window.h <= t0 / t0.ln();

    // phase phi(t) = t (log t - log xi - 1); |phi'| = |log(t/xi)|
    let f_max = (t0 / xi).ln().abs().max((t1 / xi).ln().abs()).max(1e-4);
    // resolve both the oscillation and the Fresnel-zone curvature
    let width = (TAU / (8.0 * f_max))
        .min((TAU * t0).sqrt() / 6.0)
        .min(window.h / 8.0);
    let n_panels = (window.h / width).ceil() as usize;
    let width = window.h / n_panels as f64;
    let ln_xi = Dd::from_f64(xi).ln();
    let (nodes, weights) = gl32();
    let mut acc = C64::new(0.0, 0.0);
    let _ = prec;
    for p in 0..n_panels {
        let a = t0 + width * p as f64;
        let c = a + 0.5 * width;
        let hw = 0.5 * width;
        let mut psum = C64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights) {
            let t = c + hw * x;
            // t*(ln t - ln xi - 1) in double-double
            let phase = Dd::from_f64(t)
                .ln()
                .sub(ln_xi)
                .add_f64(-1.0)
                .mul_f64(t);
            let amp = (0.5 * (t / TAU).ln()).powi(-(alpha as i32));
            psum += phase_exp(phase) * (w * amp);
        }
        acc += psum * hw;
    }

    let inside = xi >= t0 && xi <= t1;
    let prediction = if inside {
        let lead = 2.0f64.powi(alpha as i32)
            * (TAU * xi).sqrt()
            * (xi / TAU).ln().powi(-(alpha as i32));
        // e^{i pi/4} e^{-i xi} with the xi phase reduced in double-double
        let ph = phase_exp(Dd::from_f64(-xi).add(Dd::PI.mul_f64(0.25)));
        ph * lead
    } else {
        C64::new(0.0, 0.0)
    };
    let r_xi = 1.0
        + t0 / ((t0 - xi).abs() + t0.sqrt())
        + t1 / ((t1 - xi).abs() + t1.sqrt());
    let error_scale = r_xi * t0.ln().powi(-(alpha as i32));

    Ok(OscillatoryReport {
        numeric: acc,
        prediction,
        stationary_inside: inside,
        error_scale,
        regime_ok,
        panels: n_panels as u64,
    })
}

/// Convenience: |numeric - prediction| relative to |prediction|.
pub fn stationary_phase_mismatch(report: &OscillatoryReport) -> f64 {
    (report.numeric - report.prediction).norm() / report.prediction.norm().max(1e-300)
}
