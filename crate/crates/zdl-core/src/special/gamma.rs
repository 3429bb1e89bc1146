//! Complex log-gamma: Stirling series after shifting the argument right,
//! in two flavors.  `lgamma_dd` carries the dominant terms in
//! double-double so the theta phase and log chi keep absolute accuracy at
//! heights where (t/2) log t is large; `lgamma_jet` evaluates the Taylor
//! jet in f64 for the digamma/omega/lambda derivative chains.
//!
//! The imaginary part is continuous along vertical lines in the right
//! half-plane: every shifted point stays at Re > 0 where the principal
//! argument of each factor cannot wrap.

use crate::dd::{Dd, HALF_LN_2PI};
use crate::jets::{log_jet, Jet};
use crate::C64;

/// B_{2j} / (2j (2j-1)) for the Stirling correction, j = 1..=12.
const STIRLING: [f64; 12] = [
    8.333333333333333e-2,    // 1/12
    -2.777777777777778e-3,   // -1/360
    7.936507936507937e-4,    // 1/1260
    -5.952380952380953e-4,   // -1/1680
    8.417508417508417e-4,    // 1/1188
    -1.9175269175269176e-3,  // -691/360360
    6.410256410256410e-3,    // 1/156
    -2.955065359477124e-2,   // -3617/122400
    1.7964437236883057e-1,   // 43867/244188
    -1.3924322169059011e0,   // -174611/125400
    1.3402864044168392e1,    // 854513/63756
    -1.5684828462600202e2,   // -236364091/1506960
];

const SHIFT_RADIUS: f64 = 24.0;

fn shifts_needed(z: C64) -> usize {
    if z.norm_sqr() >= SHIFT_RADIUS * SHIFT_RADIUS {
        return 0;
    }
    let need = (SHIFT_RADIUS * SHIFT_RADIUS - z.im * z.im).max(0.0).sqrt();
    ((need - z.re).ceil().max(0.0)) as usize + 1
}

/// log Gamma(z) with double-double real and imaginary parts.
///
/// Requires z off the negative real axis and its pole chain.
pub fn lgamma_dd(z: C64) -> (Dd, Dd) {
    debug_assert!(
        z.im != 0.0 || z.re > 0.0 || z.re.fract() != 0.0,
        "lgamma_dd: z at a gamma pole"
    );
    let m = shifts_needed(z);
    let w = C64::new(z.re + m as f64, z.im);

    // Stirling main terms in double-double.
    let x = w.re;
    let y = w.im;
    let norm2 = Dd::from_f64(x)
        .mul_f64(x)
        .add(Dd::from_f64(y).mul_f64(y));
    let ln_abs = norm2.ln().mul_f64(0.5);
    let arg = Dd::atan2(Dd::from_f64(y), Dd::from_f64(x));
    // (w - 1/2) log w - w + (1/2) log 2 pi
    let a = x - 0.5;
    let mut re = ln_abs.mul_f64(a).sub(arg.mul_f64(y)).add_f64(-x);
    let mut im = arg.mul_f64(a).add(ln_abs.mul_f64(y)).add_f64(-y);
    re = re.add(*HALF_LN_2PI);

    // Bernoulli corrections in f64 (magnitude <= 1/(12*24)).
    let winv = C64::new(1.0, 0.0) / w;
    let winv2 = winv * winv;
    let mut p = winv;
    let mut corr = C64::new(0.0, 0.0);
    for c in STIRLING {
        corr += p * c;
        p *= winv2;
    }
    re = re.add_f64(corr.re);
    im = im.add_f64(corr.im);

    // Remove the shift: log Gamma(z) = log Gamma(z+m) - sum log(z+j).
    for j in 0..m {
        let zj = C64::new(z.re + j as f64, z.im);
        let l = zj.ln();
        re = re.add_f64(-l.re);
        im = im.add_f64(-l.im);
    }
    (re, im)
}

/// Plain f64 log-gamma (principal on the shifted chain).
pub fn lgamma_f64(z: C64) -> C64 {
    let (re, im) = lgamma_dd(z);
    C64::new(re.to_f64(), im.to_f64())
}

/// Taylor jet of log Gamma at z, order `order` (f64 coefficients).
pub fn lgamma_jet(z: C64, order: usize) -> Jet {
    let m = shifts_needed(z);
    let w = C64::new(z.re + m as f64, z.im);

    let lw = log_jet(w, order);
    // (w + eps - 1/2) * log(w + eps) - (w + eps) + (1/2) ln 2pi
    let mut lin = Jet::variable(w - C64::new(0.5, 0.0), order);
    let mut total = lin.mul(&lw);
    lin = Jet::variable(w, order);
    total = total.sub(&lin);
    total.c[0] += C64::new(HALF_LN_2PI.to_f64(), 0.0);
    // corrections sum_j c_j (w+eps)^{1-2j}
    let winv = Jet::variable(w, order).recip();
    let winv2 = winv.mul(&winv);
    let mut p = winv;
    for c in STIRLING {
        total = total.add(&p.scale(C64::new(c, 0.0)));
        p = p.mul(&winv2);
    }
    // shift removal
    for j in 0..m {
        let zj = C64::new(z.re + j as f64, z.im);
        total = total.sub(&log_jet(zj, order));
    }
    // fix the order-0 coefficient to the dd value for consistency
    total.c[0] = lgamma_f64(z);
    total
}

/// psi(z) = d/dz log Gamma(z).
pub fn digamma(z: C64) -> C64 {
    lgamma_jet(z, 1).c[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_small_integers() {
        // Gamma(4) = 6, Gamma(1) = 1, Gamma(1/2) = sqrt(pi)
        let g4 = lgamma_f64(C64::new(4.0, 0.0)).re.exp();
        assert_relative_eq!(g4, 6.0, epsilon = 1e-12);
        let g1 = lgamma_f64(C64::new(1.0, 0.0)).re;
        assert!(g1.abs() < 1e-13);
        let gh = lgamma_f64(C64::new(0.5, 0.0)).re.exp();
        assert_relative_eq!(gh, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn recurrence_gamma_z_plus_one() {
        // log Gamma(z+1) - log Gamma(z) = log z, complex case
        for &z in &[C64::new(0.25, 5.0), C64::new(-0.5, 12.0), C64::new(1.3, 0.7)] {
            let a = lgamma_f64(z + C64::new(1.0, 0.0));
            let b = lgamma_f64(z);
            let d = a - b - z.ln();
            assert!(d.norm() < 1e-12, "z={z}: residual {}", d.norm());
        }
    }

    #[test]
    fn reflection_on_critical_strip() {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z), z = 1/4 + 2i
        let z = C64::new(0.25, 2.0);
        let lhs = lgamma_f64(z) + lgamma_f64(C64::new(1.0, 0.0) - z);
        let rhs = (C64::new(std::f64::consts::PI, 0.0)
            / (C64::new(std::f64::consts::PI, 0.0) * z).sin())
        .ln();
        // compare exponentials (branch-free)
        let d = (lhs.exp() - rhs.exp()).norm() / rhs.exp().norm();
        assert!(d < 1e-11, "reflection residual {d}");
    }

    #[test]
    fn digamma_matches_difference_quotient() {
        let z = C64::new(0.25, 7.0);
        let h = 1e-5;
        let fd = (lgamma_f64(z + C64::new(h, 0.0)) - lgamma_f64(z - C64::new(h, 0.0)))
            / C64::new(2.0 * h, 0.0);
        let d = digamma(z);
        assert!((fd - d).norm() < 1e-9);
    }

    #[test]
    fn digamma_recurrence() {
        // psi(z+1) = psi(z) + 1/z
        let z = C64::new(0.3, 3.0);
        let d = digamma(z + C64::new(1.0, 0.0)) - digamma(z) - C64::new(1.0, 0.0) / z;
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn jet_higher_derivatives_match_cauchy() {
        let z = C64::new(0.25, 4.0);
        let j = lgamma_jet(z, 4);
        for k in 1..=4 {
            let want = crate::quad::cauchy_derivative(lgamma_f64, z, k, 0.5, 64);
            let got = j.derivative(k);
            assert!(
                (want - got).norm() < 1e-9 * got.norm().max(1.0),
                "k={k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn dd_im_continuity_across_shift_boundary() {
        // theta-like path: Im log Gamma(1/4 + it/2) must be smooth where
        // the shift count changes (|z| crosses 24, i.e. t near 96).
        let mut prev = f64::NAN;
        let mut max_jump = 0.0f64;
        let mut t = 95.0;
        while t <= 97.0 {
            let (_, im) = lgamma_dd(C64::new(0.25, t / 2.0));
            let v = im.to_f64();
            if !prev.is_nan() {
                max_jump = max_jump.max((v - prev).abs());
            }
            prev = v;
            t += 0.01;
        }
        // d/dt Im lgamma ~ (1/2) log(t/2) ~ 1.9, so steps of 0.01 move ~0.02
        assert!(max_jump < 0.05, "jump {max_jump}");
    }
}
