//! The functional-equation factor chi(s) = h(1-s)/h(s) with
//! h(s) = pi^{-s/2} Gamma(s/2), the continuous theta phase, the
//! logarithmic derivative omega = chi'/chi and the lambda_k recursion.

use crate::dd::{phase_exp, Dd, LN_PI};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::special::gamma::{lgamma_dd, lgamma_jet};
use crate::C64;

/// log chi(s) as double-double (re, im):
/// (s - 1/2) log pi + log Gamma((1-s)/2) - log Gamma(s/2).
pub fn log_chi_dd(s: C64) -> (Dd, Dd) {
    let zh = C64::new(s.re * 0.5, s.im * 0.5);
    let zo = C64::new((1.0 - s.re) * 0.5, -s.im * 0.5);
    let (re_o, im_o) = lgamma_dd(zo);
    let (re_h, im_h) = lgamma_dd(zh);
    let re = LN_PI
        .mul_f64(s.re - 0.5)
        .add(re_o)
        .sub(re_h);
    let im = LN_PI.mul_f64(s.im).add(im_o).sub(im_h);
    (re, im)
}

/// chi(s); errors at the poles of the gamma factors.
pub fn chi(s: C64) -> Result<C64> {
    // Gamma((1-s)/2) poles at s = 1, 3, 5, ...; Gamma(s/2) poles at
    // s = 0, -2, -4, ... (log-route cannot represent the zero there).
    if s.im == 0.0 {
        let near_odd = s.re >= 0.999 && ((s.re - 1.0) * 0.5 - ((s.re - 1.0) * 0.5).round()).abs() < 1e-9;
        let near_even = s.re <= 1e-9 && (s.re * 0.5 - (s.re * 0.5).round()).abs() < 1e-9;
        if near_odd || near_even {
            return Err(Error::Pole(format!("chi at s = {s} hits a gamma pole")));
        }
    }
    let (re, im) = log_chi_dd(s);
    Ok(phase_exp(im) * re.to_f64().exp())
}

/// theta(t) = arg h(1/2 + it), continuous with theta(0) = 0, double-double.
pub fn theta_dd(t: f64) -> Dd {
    let (_, im) = lgamma_dd(C64::new(0.25, 0.5 * t));
    im.sub(LN_PI.mul_f64(0.5 * t))
}

pub fn theta(t: f64) -> f64 {
    theta_dd(t).to_f64()
}

/// Jet of omega(s) = (chi'/chi)(s) to the given order,
/// omega(s) = log pi - (1/2) psi(s/2) - (1/2) psi((1-s)/2).
pub fn omega_jet(s: C64, order: usize) -> Jet {
    let gh = compose_half(lgamma_jet(C64::new(s.re * 0.5, s.im * 0.5), order + 1), 0.5);
    let go = compose_half(
        lgamma_jet(C64::new((1.0 - s.re) * 0.5, -s.im * 0.5), order + 1),
        -0.5,
    );
    // log chi jet = lnpi * (s - 1/2 + eps) + go - gh, then differentiate
    let mut logchi = go.sub(&gh);
    logchi.c[0] += C64::new(LN_PI.to_f64() * (s.re - 0.5), LN_PI.to_f64() * s.im);
    logchi.c[1] += C64::new(LN_PI.to_f64(), 0.0);
    logchi.deriv()
}

/// Rescale a jet g(w0 + u) to g(w0 + c*eps).
fn compose_half(mut j: Jet, c: f64) -> Jet {
    let mut f = 1.0;
    for m in 0..j.c.len() {
        j.c[m] *= f;
        f *= c;
    }
    j
}

pub fn omega(s: C64) -> C64 {
    omega_jet(s, 0).c[0]
}

/// theta^{(r)}(t) for r = 0..=order; theta'(t) = -omega(1/2+it)/2.
pub fn theta_jet(t: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(theta(t));
    if order == 0 {
        return out;
    }
    let s = C64::new(0.5, t);
    let oj = omega_jet(s, order - 1);
    // theta^{(r)}(t) = -(1/2) * d^{r-1}/dt^{r-1} omega(1/2+it)
    //               = -(1/2) i^{r-1} omega^{(r-1)}(s), real on the line
    for r in 1..=order {
        let w = oj.derivative(r - 1);
        let rot = i_pow(r as i32 - 1);
        out.push(-0.5 * (rot * w).re);
    }
    out
}

/// i^k as an exact complex unit.
pub fn i_pow(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// lambda(s) = (omega'/omega)(s) - omega(s)/2.
pub fn lambda(s: C64) -> Result<C64> {
    Ok(lambda_all(s, 2)?[1])
}

/// lambda_1..lambda_k as values (lambda_1 = 1, lambda_2 = lambda,
/// lambda_{k+1} = lambda lambda_k + lambda_k').
pub fn lambda_all(s: C64, k: usize) -> Result<Vec<C64>> {
    assert!(k >= 1);
    let order = k + 1;
    let oj = omega_jet(s, order);
    if oj.c[0].norm() < 1e-12 {
        return Err(Error::Pole(format!("omega vanishes near s = {s}")));
    }
    let lam = oj.deriv().div(&oj.truncate(order - 1)).sub(&oj.truncate(order - 1).scale(C64::new(0.5, 0.0)));
    let mut out = Vec::with_capacity(k);
    let mut cur = Jet::constant(C64::new(1.0, 0.0), lam.order());
    out.push(cur.value());
    for _ in 2..=k {
        cur = lam.mul(&cur).add(&cur.deriv());
        out.push(cur.value());
    }
    Ok(out)
}

pub fn lambda_k(s: C64, k: usize) -> Result<C64> {
    Ok(*lambda_all(s, k)?.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chi_at_half_is_one() {
        let c = chi(C64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(c.re, 1.0, epsilon = 1e-13);
        assert!(c.im.abs() < 1e-13);
    }

    #[test]
    fn chi_unimodular_on_critical_line() {
        for &t in &[30.0, 100.0, 1234.5] {
            let c = chi(C64::new(0.5, t)).unwrap();
            assert!((c.norm() - 1.0).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn chi_product_identity() {
        // chi(s) chi(1-s) = 1
        for &(sig, t) in &[(0.3, 17.0), (-0.5, 200.0), (1.7, 55.5), (0.5, 999.0)] {
            let s = C64::new(sig, t);
            let p = chi(s).unwrap() * chi(C64::new(1.0 - sig, -t)).unwrap();
            assert!((p - C64::new(1.0, 0.0)).norm() < 1e-11, "s=({sig},{t})");
        }
    }

    #[test]
    fn theta_zero_at_origin() {
        assert!(theta(0.0).abs() < 1e-14);
    }

    #[test]
    fn theta_defining_identity() {
        // e^{-2 i theta(t)} = chi(1/2 + it)
        for &t in &[10.0, 100.0, 5000.0] {
            let th = theta_dd(t);
            let lhs = phase_exp(th.mul_f64(-2.0));
            let rhs = chi(C64::new(0.5, t)).unwrap();
            assert!((lhs - rhs).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn theta_prime_asymptotics_and_fd() {
        // theta'(50) = log sqrt(50/2pi) + O(1/50^2), and matches a central
        // finite difference of theta.
        let tj = theta_jet(50.0, 2);
        let asym = (50.0 / (2.0 * std::f64::consts::PI)).sqrt().ln();
        assert!((tj[1] - asym).abs() < 1e-3);
        let h = 1e-4;
        let fd = (theta(50.0 + h) - theta(50.0 - h)) / (2.0 * h);
        assert!((tj[1] - fd).abs() < 1e-8);
        let fd2 = (theta(50.0 + h) + theta(50.0 - h) - 2.0 * theta(50.0)) / (h * h);
        assert!((tj[2] - fd2).abs() < 1e-5);
    }

    #[test]
    fn omega_equals_minus_two_theta_prime() {
        let t = 100.0;
        let w = omega(C64::new(0.5, t));
        let tp = theta_jet(t, 1)[1];
        assert!(w.im.abs() < 1e-12);
        assert!((w.re + 2.0 * tp).abs() < 1e-10);
    }

    #[test]
    fn omega_asymptotic() {
        // omega(1/2 + it) ~ -log(t/2pi) with O(1/t) defect
        let t = 1000.0;
        let w = omega(C64::new(0.5, t)).re;
        let asym = -(t / (2.0 * std::f64::consts::PI)).ln();
        assert!((w - asym).abs() < 5.0 / t, "{w} vs {asym}");
    }

    #[test]
    fn omega_matches_log_chi_difference_quotient() {
        // central difference of log chi at s = 2 + 50i
        let s = C64::new(2.0, 50.0);
        let h = 1e-5;
        let f = |s: C64| {
            let (re, im) = log_chi_dd(s);
            C64::new(re.to_f64(), im.to_f64())
        };
        let fd = (f(s + C64::new(h, 0.0)) - f(s - C64::new(h, 0.0))) / C64::new(2.0 * h, 0.0);
        let w = omega(s);
        assert!((fd - w).norm() < 1e-6, "{fd} vs {w}");
    }

    #[test]
    fn omega_symmetric_under_reflection() {
        // differentiating chi(s) chi(1-s) = 1 gives omega(s) = omega(1-s)
        let s = C64::new(0.8, 42.0);
        let a = omega(s);
        let b = omega(C64::new(0.2, -42.0));
        assert!((a - b).norm() < 1e-11);
    }

    #[test]
    fn lambda_one_is_unity() {
        let v = lambda_all(C64::new(0.5, 300.0), 1).unwrap();
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn lambda_k_asymptotic_trend() {
        // lambda_k(s) ~ (log tau)^{k-1}; the relative defect shrinks as t
        // grows by a factor of ten.
        for k in 2..=4usize {
            let defect = |t: f64| {
                let lt = (t / (2.0 * std::f64::consts::PI)).sqrt().ln();
                let v = lambda_k(C64::new(0.5, t), k).unwrap();
                (v / lt.powi(k as i32 - 1) - C64::new(1.0, 0.0)).norm()
            };
            let d4 = defect(1.0e4);
            let d5 = defect(1.0e5);
            assert!(d5 < d4, "k={k}: {d4} -> {d5}");
            assert!(d4 < 0.01, "k={k}: defect {d4}");
        }
    }

    #[test]
    fn lambda_recursion_against_cauchy_derivative() {
        // lambda_3 = lambda^2 + lambda' with lambda' from a Cauchy circle
        let s = C64::new(0.5, 500.0);
        let l2 = lambda(s).unwrap();
        let l3 = lambda_k(s, 3).unwrap();
        let radius = 1.0 / 500.0f64.ln();
        let lp = crate::quad::cauchy_derivative(
            |z| lambda(z).unwrap(),
            s,
            1,
            radius,
            32,
        );
        assert!((l3 - (l2 * l2 + lp)).norm() < 1e-8, "{l3} vs {}", l2 * l2 + lp);
    }
}
