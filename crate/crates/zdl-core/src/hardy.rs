//! Z(t), its derivatives, the eta_k family and the approximate
//! functional equation.
//!
//! Two independent exact evaluators back every Z^(k): the eta route
//! (through the explicit eta_k formula) and the Leibniz route
//! (differentiating e^{i theta(t)} zeta(1/2+it) in t).  Disagreement is
//! an error, not a warning.

use crate::dd::{phase_exp, Dd, LnTable};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::mollifier::WindowSpec;
use crate::precision::PrecisionConfig;
use crate::quad::NeumaierSum;
use crate::special::{i_pow, lambda_all, omega_jet, theta_dd, zeta_jet};
use crate::C64;
use std::f64::consts::TAU;

/// How a Z value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZMethod {
    ExactEta,
    ExactLeibniz,
    Afe,
}

impl std::fmt::Display for ZMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZMethod::ExactEta => write!(f, "exact-eta"),
            ZMethod::ExactLeibniz => write!(f, "exact-leibniz"),
            ZMethod::Afe => write!(f, "afe"),
        }
    }
}

/// One evaluation of Z^(k)(t).
#[derive(Debug, Clone, Copy)]
pub struct ZEvaluation {
    pub t: f64,
    pub k: usize,
    pub value: f64,
    pub method: ZMethod,
    pub est_error: f64,
}

/// Parameters of the approximate functional equation over one window.
#[derive(Debug, Clone)]
pub struct AfeParams {
    pub tau0: f64,
    pub window: WindowSpec,
}

impl AfeParams {
    pub fn new(window: WindowSpec) -> Self {
        AfeParams {
            tau0: (window.t_lo / TAU).sqrt(),
            window,
        }
    }

    /// Window around a single point (h = 0 selects the sharp error branch).
    pub fn at_point(t: f64) -> Self {
        AfeParams::new(WindowSpec::with_h(t, 0.0, 0.0))
    }
}

/// eta_k(s): k = 0 gives -2 zeta/omega; k >= 1 uses the explicit formula
/// lambda_k zeta + sum_{j=1}^{k-1} C(k,j) lambda_{k-j} zeta^(j)
///   - (2/omega) zeta^(k).
pub fn eta_k(s: C64, k: usize, prec: &PrecisionConfig) -> Result<C64> {
    let om = crate::special::omega(s);
    if om.norm() < 1e-9 {
        return Err(Error::Pole(format!("omega(s) ~ 0 near s = {s}")));
    }
    let zs = zeta_jet(s, k, prec)?;
    if k == 0 {
        return Ok(-zs[0] * 2.0 / om);
    }
    let lams = lambda_all(s, k)?;
    let mut acc = lams[k - 1] * zs[0]; // lambda_k zeta
    for j in 1..k {
        acc += binomial(k, j) * lams[k - j - 1] * zs[j];
    }
    acc -= zs[k] * 2.0 / om;
    Ok(acc)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0f64;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Z_k(s) = omega(s) eta_k(s) / (2 i^k); |Z_k(1/2+it)| = |Z^(k)(t)| and
/// Z_k(s) = (-1)^k chi(s) Z_k(1-s).
pub fn zk_meromorphic(s: C64, k: usize, prec: &PrecisionConfig) -> Result<C64> {
    let om = crate::special::omega(s);
    let eta = eta_k(s, k, prec)?;
    Ok(om * eta / (i_pow(k as i32) * 2.0))
}

/// Both exact routes for the jet of Z at t, orders 0..=k_max.
/// Returns (eta-route values, leibniz-route values, imag residue
/// magnitude, certified zeta error scale).
fn z_exact_routes(
    t: f64,
    k_max: usize,
    prec: &PrecisionConfig,
) -> Result<(Option<Vec<f64>>, Vec<f64>, f64, f64)> {
    let s = C64::new(0.5, t);
    let zs = zeta_jet(s, k_max, prec)?;
    let th = theta_dd(t);
    let e_i_theta = phase_exp(th);

    // Leibniz route: jet in t of e^{i theta(t)} zeta(1/2 + it).
    let oj = if k_max >= 1 {
        Some(omega_jet(s, k_max.max(1) - 1))
    } else {
        None
    };
    let mut theta_t = Jet::constant(C64::new(0.0, 0.0), k_max);
    // c_r = theta^{(r)}/r!; theta^{(r)}(t) = -(1/2) i^{r-1} omega^{(r-1)}(s)
    let mut fact = 1.0;
    for r in 1..=k_max {
        fact *= r as f64;
        let w = oj.as_ref().unwrap().derivative(r - 1);
        let val = -0.5 * (i_pow(r as i32 - 1) * w).re;
        theta_t.c[r] = C64::new(val / fact, 0.0);
    }
    // e^{i theta}: constant coefficient from the dd-reduced phase
    let e_jet = theta_t
        .scale(C64::new(0.0, 1.0))
        .exp_with_base(e_i_theta);
    let mut zeta_t = Jet::constant(C64::new(0.0, 0.0), k_max);
    let mut fct = 1.0;
    for j in 0..=k_max {
        if j > 0 {
            fct *= j as f64;
        }
        zeta_t.c[j] = i_pow(j as i32) * zs[j] / fct;
    }
    let z_jet = e_jet.mul(&zeta_t);
    let mut leib = Vec::with_capacity(k_max + 1);
    let mut imag_res = 0.0f64;
    for m in 0..=k_max {
        let d = z_jet.derivative(m);
        leib.push(d.re);
        imag_res = imag_res.max(d.im.abs());
    }

    // Eta route: Z^(k) = i^k theta'(t) e^{i theta} eta_k(1/2+it).
    let om = crate::special::omega(s);
    let eta_route = if om.norm() < 1e-9 {
        None
    } else {
        let theta_prime = -0.5 * om.re;
        let lams = if k_max >= 1 {
            lambda_all(s, k_max)?
        } else {
            Vec::new()
        };
        let mut vals = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let eta = if k == 0 {
                -zs[0] * 2.0 / om
            } else {
                let mut acc = lams[k - 1] * zs[0];
                for j in 1..k {
                    acc += binomial(k, j) * lams[k - j - 1] * zs[j];
                }
                acc - zs[k] * 2.0 / om
            };
            let v = i_pow(k as i32) * eta * e_i_theta * theta_prime;
            imag_res = imag_res.max(v.im.abs());
            vals.push(v.re);
        }
        Some(vals)
    };

    Ok((eta_route, leib, imag_res, prec.target_abs_tol))
}

/// Exact Z^(k)(t) with the mandatory two-route agreement check.
pub fn z_exact(t: f64, k: usize, prec: &PrecisionConfig) -> Result<ZEvaluation> {
    if t < 2.0 {
        return Err(Error::Validation("z_exact requires t >= 2".into()));
    }
    let (eta, leib, imag_res, cert) = z_exact_routes(t, k, prec)?;
    let scale = 10.0 * prec.target_abs_tol * leib[k].abs().max(1.0);
    if imag_res > scale {
        return Err(Error::PrecisionUnreachable(format!(
            "discarded imaginary residue {imag_res:.3e} above {scale:.3e} at t = {t}"
        )));
    }
    match eta {
        Some(ev) => {
            let diff = (ev[k] - leib[k]).abs();
            let tol = 100.0 * prec.target_abs_tol * leib[k].abs().max(1.0);
            if diff > tol {
                return Err(Error::MethodDisagreement(format!(
                    "Z^({k})({t}): eta route {} vs leibniz route {} (diff {diff:.3e})",
                    ev[k], leib[k]
                )));
            }
            Ok(ZEvaluation {
                t,
                k,
                value: ev[k],
                method: ZMethod::ExactEta,
                est_error: diff.max(imag_res).max(cert),
            })
        }
        None => Ok(ZEvaluation {
            t,
            k,
            value: leib[k],
            method: ZMethod::ExactLeibniz,
            est_error: imag_res.max(cert),
        }),
    }
}

/// Exact derivatives Z^(0..=k)(t) in one pass (Leibniz route, checked
/// against the eta route at the top order when omega is away from zero).
pub fn z_exact_jet(t: f64, k_max: usize, prec: &PrecisionConfig) -> Result<Vec<f64>> {
    let (eta, leib, _imag, _) = z_exact_routes(t, k_max, prec)?;
    if let Some(ev) = eta {
        let diff = (ev[k_max] - leib[k_max]).abs();
        let tol = 100.0 * prec.target_abs_tol * leib[k_max].abs().max(1.0);
        if diff > tol {
            return Err(Error::MethodDisagreement(format!(
                "Z jet at t = {t}: top-order routes differ by {diff:.3e}"
            )));
        }
    }
    Ok(leib)
}

/// Leibniz-only evaluator valid for any t >= 0 (used by integrals that
/// start below the exact-evaluator domain).
pub(crate) fn z_leibniz_any(t: f64, k: usize, prec: &PrecisionConfig) -> Result<f64> {
    let (_, leib, _, _) = z_exact_routes(t, k, prec)?;
    Ok(leib[k])
}

/// Error budget Y_k(T) of the approximate functional equation, by the
/// window-exponent branch.
pub fn afe_error_budget(k: usize, params: &AfeParams) -> f64 {
    let t0 = params.window.t_lo;
    let a = params.window.a;
    let split = (2.0 * k as f64 + 1.0) / (2.0 * (k as f64 + 1.0));
    if a <= split {
        t0.powf(-0.25) * t0.ln().powi(k as i32)
    } else {
        (params.window.h / t0).powi(k as i32 + 1) * t0.powf(0.25)
    }
}

/// Z^(k)(t) by the approximate functional equation:
/// 2 Re[ i^k e^{i theta(t)} sum_{n <= tau0} (log(tau/n))^k n^{-1/2 - it} ].
pub fn z_afe(t: f64, k: usize, params: &AfeParams, prec: &PrecisionConfig) -> Result<ZEvaluation> {
    let a = params.window.a;
    let cap = (4.0 * k as f64 + 3.0) / (4.0 * (k as f64 + 1.0));
    if a >= cap {
        return Err(Error::WindowViolation(format!(
            "window exponent a = {a} at or above {cap} for k = {k}"
        )));
    }
    if t < params.window.t_lo - 1e-9 || t > params.window.t_lo + params.window.h.max(0.0) + 1e-9 {
        return Err(Error::Validation(format!(
            "t = {t} outside the window [{}, {}]",
            params.window.t_lo,
            params.window.t_lo + params.window.h
        )));
    }
    let mut table = LnTable::new();
    let n_max = params.tau0.floor() as usize;
    let ln_tau = 0.5 * (t / TAU).ln();
    let th = theta_dd(t);
    let mut acc_re = NeumaierSum::new();
    let mut acc_im = NeumaierSum::new();
    for n in 1..=n_max {
        let ln_dd = table.ln(n);
        let ln_n = ln_dd.to_f64();
        let w = if k == 0 {
            1.0
        } else {
            (ln_tau - ln_n).powi(k as i32)
        };
        let amp = w / (n as f64).sqrt();
        let ph = phase_exp(th.sub(ln_dd.mul_f64(t)));
        acc_re.add(amp * ph.re);
        acc_im.add(amp * ph.im);
    }
    let sum = C64::new(acc_re.total(), acc_im.total());
    let v = (i_pow(k as i32) * sum).re * 2.0;
    let _ = prec;
    Ok(ZEvaluation {
        t,
        k,
        value: v,
        method: ZMethod::Afe,
        est_error: afe_error_budget(k, params),
    })
}

/// Fast per-window evaluator reusing the log table across nodes.
pub struct AfeEvaluator {
    params: AfeParams,
    ln_dd: Vec<Dd>,
    inv_sqrt: Vec<f64>,
}

impl AfeEvaluator {
    /// `k_min_used` is the smallest derivative order the caller will
    /// request; the validity cap (4k+3)/(4(k+1)) grows with k, so the
    /// smallest order is the binding one.
    pub fn new(params: AfeParams, k_min_used: usize) -> Result<Self> {
        let cap = (4.0 * k_min_used as f64 + 3.0) / (4.0 * (k_min_used as f64 + 1.0));
        if params.window.a >= cap {
            return Err(Error::WindowViolation(format!(
                "window exponent a = {} at or above {} for k = {}",
                params.window.a, cap, k_min_used
            )));
        }
        let n_max = params.tau0.floor() as usize;
        let mut table = LnTable::new();
        let mut ln_dd = Vec::with_capacity(n_max + 1);
        let mut inv_sqrt = Vec::with_capacity(n_max + 1);
        ln_dd.push(Dd::ZERO);
        inv_sqrt.push(0.0);
        for n in 1..=n_max {
            ln_dd.push(table.ln(n));
            inv_sqrt.push(1.0 / (n as f64).sqrt());
        }
        Ok(AfeEvaluator { params, ln_dd, inv_sqrt })
    }

    pub fn params(&self) -> &AfeParams {
        &self.params
    }

    /// Z^(k)(t) for every k in 0..=k_max, sharing the phase work.
    pub fn z_all(&self, t: f64, k_max: usize, out: &mut [f64]) {
        debug_assert!(out.len() >= k_max + 1);
        let ln_tau = 0.5 * (t / TAU).ln();
        let th = theta_dd(t);
        let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); k_max + 1];
        for n in 1..self.ln_dd.len() {
            let ln_dd = self.ln_dd[n];
            let base = phase_exp(th.sub(ln_dd.mul_f64(t))) * self.inv_sqrt[n];
            let lw = ln_tau - ln_dd.hi;
            let mut w = 1.0;
            acc[0] += base;
            for k in 1..=k_max {
                w *= lw;
                acc[k] += base * w;
            }
        }
        for k in 0..=k_max {
            out[k] = (i_pow(k as i32) * acc[k]).re * 2.0;
        }
    }
}

/// |zeta'(1/2+it) + i e^{-i theta}(Z'(t) - i theta'(t) Z(t))|; the bracket
/// equals i zeta'(1/2+it) exactly, so the residual is pure numeric noise.
pub fn hall_identity_residual(t: f64, prec: &PrecisionConfig) -> Result<f64> {
    let zj = z_exact_jet(t, 1, prec)?;
    let th = theta_dd(t);
    let tp = crate::special::theta_jet(t, 1)[1];
    let zeta1 = zeta_jet(C64::new(0.5, t), 1, prec)?[1];
    let bracket = C64::new(zj[1], 0.0) - C64::new(0.0, tp) * zj[0];
    let rhs = -C64::new(0.0, 1.0) * phase_exp(th.neg()) * bracket;
    Ok((zeta1 - rhs).norm())
}

/// zeta^(n)(1/2+it) reconstructed from Z-derivatives:
/// (-i)^n e^{-i theta} sum_j C(n-1,j) [(-iL)^{n-1-j} Z^(j+1) + (-iL)^{n-j} Z^(j)]
/// with L = log tau.  Returns (reconstruction, residual against zeta_jet).
pub fn zeta_deriv_from_z(t: f64, n: usize, prec: &PrecisionConfig) -> Result<(C64, f64)> {
    if n < 1 {
        return Err(Error::Validation("zeta_deriv_from_z needs n >= 1".into()));
    }
    if t < 10.0 {
        return Err(Error::Validation("zeta_deriv_from_z needs t >= 10".into()));
    }
    let zj = z_exact_jet(t, n, prec)?;
    let th = theta_dd(t);
    let ln_tau = 0.5 * (t / TAU).ln();
    let mil = C64::new(0.0, -ln_tau); // -i L
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let b = binomial(n - 1, j);
        let p1 = mil.powu((n - 1 - j) as u32);
        let p2 = mil.powu((n - j) as u32);
        acc += (p1 * zj[j + 1] + p2 * zj[j]) * b;
    }
    let rec = i_pow(-(n as i32)) * phase_exp(th.neg()) * acc;
    let truth = zeta_jet(C64::new(0.5, t), n, prec)?[n];
    Ok((rec, (rec - truth).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::cauchy_derivative;
    use approx::assert_relative_eq;

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn z_is_real_and_matches_direct_product() {
        // independent assembly: theta by dd, zeta by the certified jet
        let p = prec();
        let t = 20.0;
        let th = theta_dd(t);
        let zv = zeta_jet(C64::new(0.5, t), 0, &p).unwrap()[0];
        let direct = phase_exp(th) * zv;
        assert!(direct.im.abs() < 1e-10 * direct.re.abs().max(1.0));
        let z = z_exact(t, 0, &p).unwrap();
        assert_relative_eq!(z.value, direct.re, epsilon = 1e-10);
        assert_eq!(z.method, ZMethod::ExactEta);
    }

    #[test]
    fn z_vanishes_at_first_zero() {
        let p = prec();
        let z = z_exact(14.134725141734694, 0, &p).unwrap();
        assert!(z.value.abs() < 1e-6, "Z(t1) = {}", z.value);
    }

    #[test]
    fn z_prime_matches_finite_difference() {
        let p = prec();
        let t = 100.0;
        let h = 1e-4;
        let fd = (z_exact(t + h, 0, &p).unwrap().value - z_exact(t - h, 0, &p).unwrap().value)
            / (2.0 * h);
        let z1 = z_exact(t, 1, &p).unwrap();
        assert!((z1.value - fd).abs() < 1e-6, "{} vs {fd}", z1.value);
    }

    #[test]
    fn z_requires_t_at_least_two() {
        assert!(matches!(
            z_exact(0.0, 0, &prec()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn eta_one_explicit_form() {
        // eta_1 = zeta - 2 zeta'/omega (the factor 2 is forced by the
        // functional-equation consistency checks below)
        let p = prec();
        let s = C64::new(0.6, 40.0);
        let zs = zeta_jet(s, 1, &p).unwrap();
        let om = crate::special::omega(s);
        let want = zs[0] - zs[1] * 2.0 / om;
        let got = eta_k(s, 1, &p).unwrap();
        assert!((want - got).norm() < 1e-12);
    }

    #[test]
    fn eta_functional_equation() {
        // eta_k(s) = (-1)^k chi(s) eta_k(1-s)
        let p = prec();
        for k in 0..=4usize {
            for &(sig, t) in &[(0.7, 200.0), (0.3, 55.0), (0.5, 120.5)] {
                let s = C64::new(sig, t);
                let lhs = eta_k(s, k, &p).unwrap();
                let rhs = crate::special::chi(s).unwrap()
                    * eta_k(C64::new(1.0 - sig, -t), k, &p).unwrap()
                    * if k % 2 == 0 { 1.0 } else { -1.0 };
                let rel = (lhs - rhs).norm() / lhs.norm().max(1.0);
                assert!(rel < 1e-7, "k={k} s=({sig},{t}): {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn eta_recursion_with_cauchy_derivative() {
        // eta_{k+1} = lambda eta_k + eta_k', derivative by Cauchy circle
        let p = prec();
        let s = C64::new(0.5, 50.0);
        let radius = 1.0 / 50.0f64.ln();
        for k in 1..=3usize {
            let lam = crate::special::lambda(s).unwrap();
            let ek = eta_k(s, k, &p).unwrap();
            let ekp = cauchy_derivative(|z| eta_k(z, k, &p).unwrap(), s, 1, radius, 32);
            let want = lam * ek + ekp;
            let got = eta_k(s, k + 1, &p).unwrap();
            let rel = (want - got).norm() / got.norm().max(1.0);
            assert!(rel < 1e-7, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn zk_modulus_matches_z_on_line() {
        let p = prec();
        let t = 100.0;
        let zk = zk_meromorphic(C64::new(0.5, t), 1, &p).unwrap();
        let z1 = z_exact(t, 1, &p).unwrap();
        assert!((zk.norm() - z1.value.abs()).abs() < 1e-8);
    }

    #[test]
    fn zk_functional_equation() {
        let p = prec();
        let s = C64::new(0.8, 300.0);
        let k = 2usize;
        let lhs = zk_meromorphic(s, k, &p).unwrap();
        let rhs = crate::special::chi(s).unwrap()
            * zk_meromorphic(C64::new(0.2, -300.0), k, &p).unwrap();
        assert!((lhs - rhs).norm() / lhs.norm().max(1.0) < 1e-7);
    }

    #[test]
    fn zk_zero_at_first_zeta_zero() {
        let p = prec();
        let v = zk_meromorphic(C64::new(0.5, 14.1347251417), 0, &p).unwrap();
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn hall_residual_tiny() {
        let p = prec();
        for &t in &[50.0, 500.0, 5000.0] {
            let r = hall_identity_residual(t, &p).unwrap();
            assert!(r < 1e-9, "t={t}: residual {r}");
        }
    }

    #[test]
    fn afe_agrees_with_exact_at_1e4() {
        let p = prec();
        let params = AfeParams::new(WindowSpec::with_h(1.0e4, 50.0, 0.0));
        let budget = afe_error_budget(0, &params);
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let t = 1.0e4 + 2.5 * i as f64;
            let a = z_afe(t, 0, &params, &p).unwrap().value;
            let e = z_exact(t, 0, &p).unwrap().value;
            worst = worst.max((a - e).abs());
        }
        // fitted constant well under 10x the budget
        assert!(worst < 10.0 * budget, "worst {worst} vs budget {budget}");
    }

    #[test]
    fn afe_window_violation() {
        let params = AfeParams::new(WindowSpec::new(1.0e4, 0.9, 0.0).unwrap());
        assert!(matches!(
            z_afe(1.0e4, 0, &params, &prec()),
            Err(Error::WindowViolation(_))
        ));
    }

    #[test]
    fn afe_sum_length_at_1e6() {
        let params = AfeParams::at_point(1.0e6);
        assert_eq!(params.tau0.floor() as u64, 398);
    }

    #[test]
    fn zeta_deriv_from_z_residual_scaling() {
        let p = prec();
        let (_, r3) = zeta_deriv_from_z(1.0e3, 2, &p).unwrap();
        let budget3 = 1.0e3f64.powf(-5.0 / 6.0) * 1.0e3f64.ln();
        assert!(r3 < 10.0 * budget3, "residual {r3} vs {budget3}");
        let (_, r4) = zeta_deriv_from_z(1.0e4, 2, &p).unwrap();
        assert!(r4 < r3, "no decay: {r3} -> {r4}");
    }

    #[test]
    fn evaluator_matches_single_calls() {
        let p = prec();
        let params = AfeParams::new(WindowSpec::with_h(5.0e4, 10.0, 0.0));
        let ev = AfeEvaluator::new(params.clone(), 2).unwrap();
        let mut out = [0.0; 3];
        ev.z_all(5.0e4 + 3.0, 2, &mut out);
        for k in 0..=2 {
            let single = z_afe(5.0e4 + 3.0, k, &params, &p).unwrap().value;
            assert_relative_eq!(out[k], single, epsilon = 1e-9);
        }
    }
}
