//! zeta(s) and its derivatives by Euler-Maclaurin summation evaluated in
//! jet arithmetic, with the n^{-it} phases carried in double-double.
//!
//! The main-sum length is proportional to |t|/2pi (the Bernoulli
//! corrections only converge once N exceeds that), so a single evaluation
//! costs O(|t|) terms; the approximate functional equation in `hardy` is
//! the O(sqrt t) fast path and this evaluator is the certified slow one.
//! Certification compares the last two correction depths against
//! `target_abs_tol`.

use crate::dd::{phase_exp, Dd, LnTable, LN_TABLE_CAP};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::precision::PrecisionConfig;
use crate::quad::NeumaierSum;
use crate::C64;
use std::cell::RefCell;
use std::f64::consts::TAU;

/// A point s = sigma + it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        ComplexPoint { sigma, t }
    }

    pub fn as_c64(self) -> C64 {
        C64::new(self.sigma, self.t)
    }
}

thread_local! {
    static LN_TABLE: RefCell<LnTable> = RefCell::new(LnTable::new());
}

/// B_{2j} for j = 1..=15.
const B2J: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Derivatives zeta^(m)(s) for m = 0..=k, certified against
/// `prec.target_abs_tol` by comparing two correction depths.  On a failed
/// check the main-sum cutoff is doubled once before giving up (the
/// corrections converge more slowly at negative sigma).
pub fn zeta_jet(s: C64, k: usize, prec: &PrecisionConfig) -> Result<Vec<C64>> {
    let mut cutoff = prec.cutoff_multiplier;
    for attempt in 0..3 {
        match zeta_jet_once(s, k, prec, cutoff) {
            Err(Error::PrecisionUnreachable(msg)) if attempt < 2 => {
                let _ = msg;
                cutoff *= 2.0;
            }
            other => return other,
        }
    }
    unreachable!()
}

fn zeta_jet_once(s: C64, k: usize, prec: &PrecisionConfig, cutoff: f64) -> Result<Vec<C64>> {
    if (s - C64::new(1.0, 0.0)).norm() < 1e-8 {
        return Err(Error::Pole("zeta evaluated at its pole s = 1".into()));
    }
    if s.im.abs() > prec.t_ceiling {
        return Err(Error::Validation(format!(
            "|t| = {} above the configured ceiling {}",
            s.im.abs(),
            prec.t_ceiling
        )));
    }
    if s.re < -6.0 {
        return Err(Error::Validation(
            "zeta_jet supports sigma >= -6 (use the functional equation)".into(),
        ));
    }
    if k > 8 {
        return Err(Error::Validation("zeta_jet supports k <= 8".into()));
    }
    let j_terms = prec.euler_maclaurin_terms.clamp(4, 15) as usize;
    let n_main = ((cutoff * (s.im.abs() / TAU)).ceil() as usize).max(50) + 4 * j_terms + 20;

    // Main sum: sum_{n<N} n^{-s}, as a jet in eps via (-ln n)^m / m!.
    let sigma = s.re;
    let t = s.im;
    let mut acc_re = vec![NeumaierSum::new(); k + 1];
    let mut acc_im = vec![NeumaierSum::new(); k + 1];
    LN_TABLE.with(|tbl| {
        let mut tbl = tbl.borrow_mut();
        let mut ln_dd = Dd::ZERO;
        for n in 1..n_main {
            if n < LN_TABLE_CAP {
                ln_dd = tbl.ln(n);
            } else {
                ln_dd = ln_dd.add(Dd::ln1p_ratio(1.0, (n - 1) as f64));
            }
            let ln_n = ln_dd.to_f64();
            let amp = (-sigma * ln_n).exp();
            let base = phase_exp(ln_dd.mul_f64(-t)) * amp;
            let mut w = base;
            acc_re[0].add(w.re);
            acc_im[0].add(w.im);
            for m in 1..=k {
                w *= -ln_n / m as f64;
                acc_re[m].add(w.re);
                acc_im[m].add(w.im);
            }
        }
    });
    let mut main = Jet {
        c: (0..=k)
            .map(|m| C64::new(acc_re[m].total(), acc_im[m].total()))
            .collect(),
    };

    // Tail at N (jets in eps): N^{1-s-eps}/(s-1+eps) + N^{-s-eps}/2
    //   + sum_j B_{2j}/(2j)! (s+eps)_{2j-1} N^{1-s-eps-2j}.
    let nf = n_main as f64;
    let ln_n_dd = LN_TABLE.with(|tbl| {
        if n_main < LN_TABLE_CAP {
            tbl.borrow_mut().ln(n_main)
        } else {
            Dd::from_f64(nf).ln()
        }
    });
    let ln_n = ln_n_dd.to_f64();
    // N^{-s} with dd phase
    let n_pow_minus_s = phase_exp(ln_n_dd.mul_f64(-t)) * (-sigma * ln_n).exp();
    // e^{-eps ln N} jet
    let mut expjet = Jet::constant(C64::new(1.0, 0.0), k);
    {
        let mut c = 1.0;
        for m in 1..=k {
            c *= -ln_n / m as f64;
            expjet.c[m] = C64::new(c, 0.0);
        }
    }
    let s_minus_1 = Jet::variable(s - C64::new(1.0, 0.0), k);
    let t1 = s_minus_1
        .recip()
        .mul(&expjet)
        .scale(n_pow_minus_s * nf);
    let t2 = expjet.scale(n_pow_minus_s * 0.5);
    main = main.add(&t1).add(&t2);

    let with_depth = |depth: usize| -> Jet {
        let mut total = Jet::constant(C64::new(0.0, 0.0), k);
        let mut poch = Jet::constant(C64::new(1.0, 0.0), k); // (s)_{2j-1} incrementally
        let mut fact = 1.0; // (2j)!
        let mut n_scale = 1.0; // N^{1-2j} relative to N^{-s}, i.e. N * N^{-2j}
        for j in 1..=depth {
            let a = 2 * j - 2;
            poch = poch
                .mul(&Jet::variable(s + C64::new(a as f64, 0.0), k))
                .mul(&Jet::variable(s + C64::new(a as f64 + 1.0, 0.0), k));
            // after multiplying two factors we have (s)_{2j}; divide the
            // trailing one out lazily by tracking (s)_{2j-1} = (s)_{2j} / (s+2j-1)
            // -- instead keep (s)_{2j} and divide at use.
            fact *= (2 * j - 1) as f64 * (2 * j) as f64;
            n_scale /= nf * nf;
            let term = poch
                .div(&Jet::variable(s + C64::new((2 * j - 1) as f64, 0.0), k))
                .mul(&expjet)
                .scale(n_pow_minus_s * nf * n_scale * (B2J[j - 1] / fact));
            total = total.add(&term);
        }
        total
    };

    let full = with_depth(j_terms);
    let shallow = with_depth(j_terms - 2);
    let mut worst = 0.0f64;
    for m in 0..=k {
        let mut fct = 1.0;
        for i in 2..=m {
            fct *= i as f64;
        }
        let d = (full.c[m] - shallow.c[m]).norm() * fct;
        worst = worst.max(d);
    }
    if worst > prec.target_abs_tol {
        return Err(Error::PrecisionUnreachable(format!(
            "two-depth Euler-Maclaurin check at s = {s}: depth difference {worst:.3e} \
             exceeds target {:.3e}",
            prec.target_abs_tol
        )));
    }
    main = main.add(&full);

    Ok((0..=k).map(|m| main.derivative(m)).collect())
}

/// zeta^(k)(s).
pub fn zeta_deriv(s: C64, k: usize, prec: &PrecisionConfig) -> Result<C64> {
    Ok(zeta_jet(s, k, prec)?[k])
}
