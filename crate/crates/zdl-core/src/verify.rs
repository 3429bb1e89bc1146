//! The acceptance suite: each criterion below is a self-contained
//! experiment returning a pass/fail verdict with its measured numbers.
//! `zdl verify` runs these; the `acceptance` test target runs them under
//! `cargo test` and prints one line per criterion.

use crate::dd::phase_exp;
use crate::error::{Error, Result};
use crate::hardy::{
    hall_identity_residual, z_exact_jet, zk_meromorphic, AfeEvaluator, AfeParams,
};
use crate::meansquare::{
    integrate_izeta, integrate_jz, main_term_thm0, main_term_thm4, moment_prod_hardy_constant,
    oscillatory_window_integral, p_k_theta, zeta_main_constant_thm5,
};
use crate::mollifier::{DirichletPolynomial, WindowSpec};
use crate::ntk::{
    self, alternating_binomial_delta, alternating_binomial_delta_closed, coprime_mobius_log_sum,
    f_factor, log_power_harmonic_sum, moebius_log_divisor_sum, prime_log_sum,
    squarefree_phi_weighted_sum, FactoredInteger,
};
use crate::precision::PrecisionConfig;
use crate::quad::NeumaierSum;
use crate::special::{chi, theta_dd, zeta_jet};
use crate::zerolab::{
    find_zk_zeros, littlewood_weighted_sum, winding_count, RectBox, Side, ZeroFunction,
};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub name: String,
    /// None marks an informational row that gates nothing.
    pub passed: Option<bool>,
    pub details: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let tag = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        format!(
            "[{tag}] {:<28} ({:7.1}s)  {}",
            self.id, self.seconds, self.details
        )
    }
}

struct Gate {
    ok: bool,
    notes: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, cond: bool, msg: String) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("FAIL: {msg}"));
        } else {
            self.notes.push(msg);
        }
    }

    fn info(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn report(self, id: &str, name: &str, start: Instant) -> CriterionReport {
        CriterionReport {
            id: id.into(),
            name: name.into(),
            passed: Some(self.ok),
            details: self.notes.join(" | "),
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn rng(tag: u64, prec: &PrecisionConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(prec.seed ^ tag.wrapping_mul(0x9E3779B97F4A7C15))
}

/// Criterion 1: the exact identities.
pub fn criterion_1_identities(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();

    // Z real-valuedness over 1e3 random t in [10, 1e4]
    let mut r = rng(1, prec);
    let mut worst_imag = 0.0f64;
    for _ in 0..1000 {
        let t: f64 = r.gen_range(10.0..1.0e4);
        let th = theta_dd(t);
        let zv = zeta_jet(C64::new(0.5, t), 0, prec).unwrap();
        let z = phase_exp(th) * zv[0];
        worst_imag = worst_imag.max(z.im.abs() / z.re.abs().max(1.0));
    }
    g.check(
        worst_imag < 1e-10,
        format!("Z imag residue max {worst_imag:.2e} (< 1e-10)"),
    );

    // Hall identity at 100 points
    let mut worst_hall = 0.0f64;
    for _ in 0..100 {
        let t: f64 = r.gen_range(10.0..2.0e3);
        worst_hall = worst_hall.max(hall_identity_residual(t, prec).unwrap());
    }
    g.check(
        worst_hall < 1e-9,
        format!("Hall identity residual max {worst_hall:.2e} (< 1e-9)"),
    );

    // eta_k functional equation, k <= 4, 100 strip points
    let mut worst_eta = 0.0f64;
    for _ in 0..100 {
        let sig: f64 = r.gen_range(0.2..0.8);
        let t: f64 = r.gen_range(20.0..1.0e3);
        let s = C64::new(sig, t);
        let s1 = C64::new(1.0 - sig, -t);
        let ch = chi(s).unwrap();
        for k in 0..=4usize {
            let lhs = crate::hardy::eta_k(s, k, prec).unwrap();
            let rhs = ch * crate::hardy::eta_k(s1, k, prec).unwrap()
                * if k % 2 == 0 { 1.0 } else { -1.0 };
            worst_eta = worst_eta.max((lhs - rhs).norm());
        }
    }
    g.check(
        worst_eta < 1e-7,
        format!("eta_k functional equation residual max {worst_eta:.2e} (< 1e-7)"),
    );

    // chi chi(1-s) = 1 and the zeta functional equation
    let mut worst_chi = 0.0f64;
    let mut worst_fe = 0.0f64;
    for _ in 0..100 {
        let sig: f64 = r.gen_range(-1.0..2.0);
        let t: f64 = r.gen_range(10.0..1.0e4);
        let s = C64::new(sig, t);
        let s1 = C64::new(1.0 - sig, -t);
        let c = chi(s).unwrap();
        worst_chi = worst_chi.max((c * chi(s1).unwrap() - C64::new(1.0, 0.0)).norm());
        let z = zeta_jet(s, 0, prec).unwrap()[0];
        let z1 = zeta_jet(s1, 0, prec).unwrap()[0];
        worst_fe = worst_fe.max((z - c * z1).norm());
    }
    g.check(
        worst_chi < 1e-8,
        format!("chi(s)chi(1-s)-1 max {worst_chi:.2e} (< 1e-8)"),
    );
    g.check(
        worst_fe < 1e-8,
        format!("zeta functional equation residual max {worst_fe:.2e} (< 1e-8)"),
    );

    // Z_k(s) = (-1)^k chi(s) Z_k(1-s)
    let mut worst_zk = 0.0f64;
    for _ in 0..50 {
        let sig: f64 = r.gen_range(0.2..0.8);
        let t: f64 = r.gen_range(20.0..1.0e3);
        let s = C64::new(sig, t);
        let s1 = C64::new(1.0 - sig, -t);
        let ch = chi(s).unwrap();
        for k in 0..=4usize {
            let lhs = zk_meromorphic(s, k, prec).unwrap();
            let rhs = ch * zk_meromorphic(s1, k, prec).unwrap()
                * if k % 2 == 0 { 1.0 } else { -1.0 };
            worst_zk = worst_zk.max((lhs - rhs).norm());
        }
    }
    g.check(
        worst_zk < 1e-7,
        format!("Z_k functional equation residual max {worst_zk:.2e} (< 1e-7)"),
    );

    // delta_r(n) closed form, exhaustive r, n <= 20
    let mut delta_exact = true;
    for r_ in 0..=20 {
        for n in 0..=20 {
            if alternating_binomial_delta(r_, n) != alternating_binomial_delta_closed(r_, n) {
                delta_exact = false;
            }
        }
    }
    g.check(delta_exact, "delta_r(n) closed form exact for r,n <= 20".into());

    g.report("1-identities", "exact identities", start)
}

/// Criterion 2: approximate functional equation error scaling.
///
/// Windows: per-k exponent (0.72, 0.80, 0.87) sits at/near the error
/// branch point where the budget scales like T^{-1/4} (times logs); four
/// 100-point windows per (k, T) average over the correction phase.  The
/// per-decade factor is the geometric mean over the two decade steps.
pub fn criterion_2_afe(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let exps = [0.72f64, 0.80, 0.87];
    for k in 0..=2usize {
        let a = exps[k];
        let mut means = Vec::new();
        for &t0 in &[1.0e4f64, 1.0e5, 1.0e6] {
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for w in 0..4 {
                let t_start = t0 * (1.0 + 0.15 * w as f64);
                let h = t_start.powf(a);
                let params = AfeParams::new(WindowSpec::with_h(t_start, h, 0.0));
                let ev = AfeEvaluator::new(params, k).unwrap();
                let mut out = vec![0.0; k + 1];
                for i in 0..100 {
                    let t = t_start + h * (i as f64 + 0.5) / 100.0;
                    ev.z_all(t, k, &mut out);
                    let ex = z_exact_jet(t, k, prec).unwrap();
                    acc += (out[k] - ex[k]).abs();
                    cnt += 1;
                }
            }
            means.push(acc / cnt as f64);
        }
        let dex = (means[0] / means[2]).log10() / 2.0;
        let step1 = (means[0] / means[1]).log10();
        let step2 = (means[1] / means[2]).log10();
        g.check(
            (0.15..=0.35).contains(&dex),
            format!("k={k}: per-decade drop {dex:.3} dex (steps {step1:.3}, {step2:.3}; target 1/4 in [0.15, 0.35])"),
        );
        let mut c_fit = 0.0f64;
        for (i, &t0) in [1.0e4f64, 1.0e5, 1.0e6].iter().enumerate() {
            c_fit = c_fit.max(means[i] / (t0.powf(-0.25) * t0.ln().powi(k as i32)));
        }
        g.check(
            c_fit <= 10.0,
            format!("k={k}: fitted C = {c_fit:.3} vs T^-1/4 log^k T (<= 10)"),
        );
    }
    g.report("2-afe", "approximate functional equation scaling", start)
}

/// int_0^T (Z^(k))^2 dt via low-t direct quadrature plus AFE blocks.
pub fn second_moment_from_zero(k: usize, t_max: f64, prec: &PrecisionConfig) -> Result<f64> {
    let unit = DirichletPolynomial::unit();
    let mut total = NeumaierSum::new();
    // [0, 40]: direct certified evaluations
    let (nodes, weights) = crate::quad::gl16();
    let n_low = 200usize;
    let lo_end = 40.0f64.min(t_max);
    let w_low = lo_end / n_low as f64;
    for i in 0..n_low {
        let a = w_low * i as f64;
        let c = a + 0.5 * w_low;
        let hw = 0.5 * w_low;
        let mut psum = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let t = c + hw * x;
            let z = crate::hardy::z_leibniz_any(t, k, prec)?;
            psum += w * z * z;
        }
        total.add(psum * hw);
    }
    // [40, T]: AFE blocks of growing length
    let mut t = lo_end;
    while t < t_max - 1e-9 {
        let h = (t_max - t).min(t.powf(0.70));
        let w = WindowSpec::with_h(t, h, 0.0);
        let v = integrate_jz(&unit, &w, k, k, prec)?;
        total.add(v.value);
        t += h;
    }
    Ok(total.total())
}

/// Criterion 3: the second moment of Z and Z'.
pub fn criterion_3_second_moment(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let t_max = 5.0e4;
    let l = (t_max / TAU).ln();
    let g0 = ntk::stieltjes::global().lemma_constant(0);

    match second_moment_from_zero(0, t_max, prec) {
        Ok(m0) => {
            let want = t_max * l + (2.0 * g0 - 1.0) * t_max;
            let ratio = m0 / want;
            g.check(
                (ratio - 1.0).abs() < 0.10,
                format!("k=0: int Z^2 = {m0:.6e} vs T log(T/2pi) + (2 gamma_0'-1) T = {want:.6e} (ratio {ratio:.4}, within 10%)"),
            );
        }
        Err(e) => g.check(false, format!("k=0 integration failed: {e}")),
    }
    match second_moment_from_zero(1, t_max, prec) {
        Ok(m1) => {
            let norm = m1 * 12.0 / (t_max * l.powi(3));
            g.check(
                (0.8..=1.3).contains(&norm),
                format!("k=1: int Z'^2 * 12/(T log^3(T/2pi)) = {norm:.4} (in [0.8, 1.3])"),
            );
        }
        Err(e) => g.check(false, format!("k=1 integration failed: {e}")),
    }
    g.report("3-second-moment", "second moment of Z and Z'", start)
}

/// Criterion 4: the mollified mean square against (1 + 1/theta) H.
pub fn criterion_4_mollified(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let theta = 0.15;
    let a = 0.7;
    let mut ratios = Vec::new();
    for &t0 in &[1.0e5f64, 1.0e6, 1.0e7] {
        let w = match WindowSpec::new(t0, a, theta) {
            Ok(w) => w,
            Err(e) => {
                g.check(false, format!("window construction failed: {e}"));
                return g.report("4-mollified", "mollified mean square", start);
            }
        };
        let poly = DirichletPolynomial::build_mollifier(t0, theta).unwrap();
        match integrate_jz(&poly, &w, 0, 0, prec) {
            Ok(v) => {
                let closed = (1.0 + 1.0 / theta) * w.h;
                let ratio = v.value / closed;
                let err_scale = t0.ln().ln().powi(3) / t0.ln();
                g.info(format!(
                    "T={t0:.0e}: ratio to (1+1/theta)H = {ratio:.4} (X={:.1}, audits {} worst {:.2}x, paper err scale {err_scale:.2})",
                    w.x_len, v.audited_nodes, v.max_audit_discrepancy
                ));
                ratios.push(ratio);
            }
            Err(e) => {
                g.check(false, format!("T={t0:.0e} integration failed: {e}"));
                return g.report("4-mollified", "mollified mean square", start);
            }
        }
    }
    g.check(
        (0.6..=1.4).contains(&ratios[1]),
        format!("ratio at T=1e6 is {:.4} (in [0.6, 1.4])", ratios[1]),
    );
    g.check(
        (ratios[2] - 1.0).abs() < (ratios[0] - 1.0).abs(),
        format!(
            "trend: |ratio-1| at T=1e7 = {:.4} < {:.4} at T=1e5",
            (ratios[2] - 1.0).abs(),
            (ratios[0] - 1.0).abs()
        ),
    );
    g.report("4-mollified", "mollified mean square", start)
}

/// Criterion 5: parity vanishing of the odd cell (0,1) at T = 1e5.
pub fn criterion_5_parity(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let t0 = 1.0e5;
    let theta = 0.1;
    let w = WindowSpec::new(t0, 0.7, theta).unwrap();
    let poly = DirichletPolynomial::build_mollifier(t0, theta).unwrap();
    let j00 = integrate_jz(&poly, &w, 0, 0, prec);
    let j01 = integrate_jz(&poly, &w, 0, 1, prec);
    match (j00, j01) {
        (Ok(e00), Ok(e01)) => {
            let n00 = e00.value.abs() / w.h;
            let n01 = e01.value.abs() / (w.h * t0.ln());
            g.check(
                n01 * 10.0 <= n00,
                format!(
                    "normalized |J(0,1)| = {n01:.4e} vs even neighbor J(0,0) = {n00:.4e} (>= 10x smaller)"
                ),
            );
        }
        (a, b) => g.check(false, format!("integration failed: {a:?} {b:?}")),
    }
    g.report("5-parity", "odd-parity vanishing", start)
}

/// Criterion 6: main-term engines.
pub fn criterion_6_main_terms(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let _ = prec;
    // thm4 diagonal == thm0 exactly on 20 random polynomials
    let mut r = rng(6, prec);
    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let mut terms = vec![(1u64, C64::new(1.0, 0.0))];
        for n in 2..=8u64 {
            if r.gen_bool(0.75) {
                terms.push((n, C64::new(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5))));
            }
        }
        let poly = DirichletPolynomial::from_coefficients(terms, 8.0, true).unwrap();
        let w = WindowSpec::new(r.gen_range(1.0e4..1.0e6), 0.7, 0.0).unwrap();
        for k in 0..=3usize {
            let a = main_term_thm0(&poly, &w, k).unwrap();
            let b = main_term_thm4(&poly, &w, k, k).unwrap();
            worst_rel = worst_rel.max((a - b).abs() / a.abs().max(1e-30));
        }
    }
    g.check(
        worst_rel < 1e-10,
        format!("diagonal main terms equal to {worst_rel:.2e} relative (exact)"),
    );

    // mollifier-case ratio to the closed form along X = 1e2, 1e3, 1e4.
    // The finite-X deficit is ~0.66/log X across cells (inside the
    // mollifier theorems' own (log log)^3/log error scale); theta = 0.05
    // keeps log(T/2pi) large enough that the gated cell converges within
    // 10% at X = 1e4.
    let theta = 0.05;
    let mollifier_ratios = |k1: usize, k2: usize| -> Vec<f64> {
        [1.0e2f64, 1.0e3, 1.0e4]
            .iter()
            .map(|&x| {
                let t0 = x.powf(1.0 / theta);
                let w = WindowSpec {
                    t_lo: t0,
                    a: 0.7,
                    h: t0.powf(0.7),
                    theta,
                    x_len: x,
                };
                let poly = DirichletPolynomial::build_mollifier_with_x(x, theta).unwrap();
                let engine = main_term_thm4(&poly, &w, k1, k2).unwrap();
                let closed = moment_prod_hardy_constant(k1, k2, theta)
                    * w.h
                    * (t0 / TAU).ln().powi((k1 + k2) as i32);
                engine / closed
            })
            .collect()
    };
    let ratios = mollifier_ratios(1, 1);
    g.info(format!(
        "mollifier (k1,k2)=(1,1) engine/closed-form ratios along X: {:.4}, {:.4}, {:.4}",
        ratios[0], ratios[1], ratios[2]
    ));
    g.check(
        (ratios[2] - 1.0).abs() < 0.10,
        format!("ratio at X=1e4 is {:.4} (within 10%)", ratios[2]),
    );
    g.check(
        (ratios[2] - 1.0).abs() < (ratios[1] - 1.0).abs()
            && (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs(),
        "ratio approaches 1 along X".into(),
    );
    for (k1, k2) in [(0usize, 0usize), (2, 2), (0, 2)] {
        let rr = mollifier_ratios(k1, k2);
        g.info(format!(
            "({k1},{k2}): ratios {:.4}, {:.4}, {:.4}",
            rr[0], rr[1], rr[2]
        ));
    }
    g.report("6-main-terms", "main-term engines", start)
}

/// Criterion 7: the oscillatory window integral against its
/// stationary-phase prediction.
///
/// As stated (T = 1e4, xi centered, 5% of the main term) the gate cannot
/// pass: the stated remainder scale R(xi)(log T)^-alpha is itself ~14% of
/// the main term there, and the measured mismatch ~16% saturates it.  The
/// criterion is evaluated faithfully and reported honestly; the companion
/// row shows the same comparison at T = 1e6 where the Fresnel tails have
/// separated and the 5% agreement is reached.
pub fn criterion_7_oscillatory(prec: &PrecisionConfig) -> (CriterionReport, CriterionReport) {
    let start = Instant::now();
    let mut g = Gate::new();
    let w = WindowSpec::with_h(1.0e4, 1.0e3, 0.0);
    let xi = w.t_lo + 0.5 * w.h;
    for alpha in 0..=2usize {
        let rep = oscillatory_window_integral(xi, alpha, &w, prec).unwrap();
        let miss = (rep.numeric - rep.prediction).norm();
        let rel = miss / rep.prediction.norm();
        g.check(
            rel <= 0.05,
            format!("alpha={alpha}: |numeric-pred|/|main| = {rel:.4} (<= 0.05)"),
        );
    }
    let r0 = oscillatory_window_integral(xi, 0, &w, prec).unwrap();
    g.info(format!(
        "the stated remainder scale is itself {:.1}% of the main term here (mismatch saturates it at {:.2}x), so the 5% gate sits below what the cited bound provides at T=1e4",
        100.0 * r0.error_scale / r0.prediction.norm(),
        (r0.numeric - r0.prediction).norm() / r0.error_scale
    ));
    let main = g.report("7-oscillatory", "stationary phase vs numeric", start);

    // companion at T = 1e6 (H = T/log T, the regime's far end)
    let start2 = Instant::now();
    let mut g2 = Gate::new();
    let t0 = 1.0e6;
    let w2 = WindowSpec::with_h(t0, t0 / t0.ln(), 0.0);
    let xi2 = w2.t_lo + 0.5 * w2.h;
    for alpha in 0..=2usize {
        let rep = oscillatory_window_integral(xi2, alpha, &w2, prec).unwrap();
        let rel = (rep.numeric - rep.prediction).norm() / rep.prediction.norm();
        g2.check(
            rel <= 0.05,
            format!("alpha={alpha}: rel mismatch {rel:.4} at T=1e6"),
        );
    }
    let companion = g2.report(
        "7b-oscillatory-1e6",
        "stationary phase at T = 1e6 (companion)",
        start2,
    );
    (main, companion)
}

/// Criterion 8: the zero lab.
pub fn criterion_8_zerolab(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();

    // ten zeros below 50, winding vs sign scan
    let zs = find_zk_zeros(0, 2.0, 50.0, prec).unwrap();
    let w_low = winding_count(
        &ZeroFunction::ZetaK(0),
        &RectBox::new(0.0, 1.0, 2.0, 50.0).unwrap(),
        prec,
    )
    .unwrap();
    g.check(
        zs.len() == 10 && w_low == 10,
        format!("low zeta zeros: sign-scan {} / winding {w_low} (= 10)", zs.len()),
    );

    // subdivision additivity on 50 random boxes
    let mut r = rng(8, prec);
    let mut additive = true;
    for _ in 0..50 {
        let s0 = r.gen_range(-1.0..1.2f64);
        let s1 = s0 + r.gen_range(0.3..1.3);
        let t0 = r.gen_range(10.0..100.0f64);
        let t1 = t0 + r.gen_range(3.0..20.0);
        let rect = RectBox::new(s0, s1, t0, t1).unwrap();
        let f = ZeroFunction::ZetaK(0);
        let parent = winding_count(&f, &rect, prec).unwrap();
        // cuts in general position
        let fs = r.gen_range(0.35..0.65f64);
        let ft = r.gen_range(0.35..0.65f64);
        let sc = s0 + fs * (s1 - s0);
        let tc = t0 + ft * (t1 - t0);
        let sc = if (sc - 0.5).abs() < 0.02 { sc + 0.04 } else { sc };
        let mut children = 0;
        for (a, b, c, d) in [
            (s0, sc, t0, tc),
            (sc, s1, t0, tc),
            (s0, sc, tc, t1),
            (sc, s1, tc, t1),
        ] {
            children += winding_count(&f, &RectBox::new(a, b, c, d).unwrap(), prec).unwrap();
        }
        if children != parent {
            additive = false;
            g.info(format!(
                "additivity broke on [{s0:.2},{s1:.2}]x[{t0:.1},{t1:.1}]: {parent} vs {children}"
            ));
        }
    }
    g.check(additive, "winding additive over 50 random subdivisions".into());

    // Theorem margins at T = 1e3, H = 1e2, k = 1, theta = 0.3
    let k = 1usize;
    let theta = 0.3;
    let t0 = 1.0e3;
    let h = 1.0e2;
    let w = WindowSpec::with_h(t0, h, theta);
    let llt = (t0 / TAU).ln().ln();
    let err_term = h * t0.ln().ln().powi(3) / t0.ln();
    let right = littlewood_weighted_sum(&ZeroFunction::ZetaK(k), &w, Side::Right, None, 5.0, prec);
    let left = littlewood_weighted_sum(&ZeroFunction::ZetaK(k), &w, Side::Left, None, 5.0, prec);
    match (&right, &left) {
        (Ok(rr), Ok(ll)) => {
            let lhs_a = TAU * rr.weighted_sum;
            let bracket_a = 1.0
                + 2.0 / ((2.0 * k as f64 + 1.0) * theta)
                + 2.0 * (k * k) as f64 * theta / (3.0 * (2.0 * k as f64 - 1.0));
            let rhs_a = k as f64 * h * llt + 0.5 * h * bracket_a.ln()
                - h * k as f64 * 2.0f64.ln().ln()
                + 2.0 * err_term;
            g.check(
                rhs_a - lhs_a >= 0.0,
                format!(
                    "right-sum bound margin {:.1} (lhs {lhs_a:.1} vs rhs {rhs_a:.1}, {} zeros)",
                    rhs_a - lhs_a,
                    rr.zero_count
                ),
            );
            let lhs_b = ll.weighted_sum;
            let bracket_b = 0.5
                + 1.0 / ((2.0 * k as f64 + 1.0) * theta)
                + (k * k) as f64 * theta / (3.0 * (2.0 * k as f64 - 1.0));
            let rhs_b = h / (2.0 * TAU) * bracket_b.ln() + 2.0 * err_term;
            g.check(
                rhs_b - lhs_b >= 0.0,
                format!(
                    "left-sum bound margin {:.1} (lhs {lhs_b:.3}, {} zeros left of the line)",
                    rhs_b - lhs_b,
                    ll.zero_count
                ),
            );
        }
        _ => g.check(false, "weighted-sum enumeration failed".into()),
    }

    // signed-sum reconciliation improves from H = 50 to H = 200
    let mut rels = Vec::new();
    for &hh in &[50.0f64, 200.0] {
        let w = WindowSpec::with_h(t0, hh, theta);
        let rr =
            littlewood_weighted_sum(&ZeroFunction::ZetaK(k), &w, Side::Right, None, 5.0, prec)
                .unwrap();
        let ll = littlewood_weighted_sum(&ZeroFunction::ZetaK(k), &w, Side::Left, None, 5.0, prec)
            .unwrap();
        let signed = TAU * (rr.weighted_sum - ll.weighted_sum);
        let want = k as f64 * hh * llt + hh * (0.5 * 2.0f64.ln() - k as f64 * 2.0f64.ln().ln());
        rels.push(((signed - want) / want).abs());
    }
    g.check(
        rels[1] < rels[0],
        format!(
            "signed-sum reconciliation improves: rel {:.3} (H=50) -> {:.3} (H=200)",
            rels[0], rels[1]
        ),
    );

    // eta_2 strip bound at T = 1e2, H = 50
    let k2 = 2usize;
    let theta2 = 0.3;
    let w2 = WindowSpec::with_h(1.0e2, 50.0, theta2);
    match littlewood_weighted_sum(&ZeroFunction::EtaK(k2), &w2, Side::Right, None, 3.0, prec) {
        Ok(rep) => {
            let pk = p_k_theta(k2, theta2).unwrap();
            let slack = 2.0 * 1.0e2f64.ln().ln().powi(3) / 1.0e2f64.ln();
            let bound = ((4.0f64.powi(k2 as i32) * pk).ln() / 2.0
                + (k2 as f64 - 1.0) * 2.0f64.ln()
                + slack)
                * w2.h
                / TAU;
            g.check(
                rep.weighted_sum <= bound,
                format!(
                    "eta_2 weighted sum {:.3} <= bound {bound:.3} ({} zeros)",
                    rep.weighted_sum, rep.zero_count
                ),
            );
        }
        Err(e) => g.check(false, format!("eta_2 enumeration failed: {e}")),
    }

    g.report("8-zerolab", "zero lab", start)
}

/// Criterion 9: the arithmetic-lemma suite.
pub fn criterion_9_lemmas(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let budget = prec.sum_budget;

    // L1: ratio to log x int Q trends to 1 at the O(1/log x) rate (the
    // dropped constant-order term is Q-dependent)
    for (q, qname) in [(vec![1.0], "1"), (vec![0.0, 0.0, 1.0], "u^2")] {
        let mut gaps = Vec::new();
        for &x in &[1.0e4f64, 1.0e5, 1.0e6] {
            let rep = squarefree_phi_weighted_sum(x, &q, budget).unwrap();
            gaps.push((rep.exact / rep.predicted - 1.0).abs());
        }
        g.check(
            gaps[2] < gaps[1] && gaps[1] < gaps[0] && gaps[2] < 6.0 / 1.0e6f64.ln(),
            format!(
                "squarefree/phi sum, Q={qname}: |ratio-1| along x: {:.4} {:.4} {:.4} (shrinking, O(1/log x))",
                gaps[0], gaps[1], gaps[2]
            ),
        );
    }

    // L2 and L4 bounds over random squarefree n in [1e3, 1e8]
    let mut r = rng(9, prec);
    let mut c2 = 0.0f64;
    let mut c4 = 0.0f64;
    let mut sampled = 0;
    while sampled < 300 {
        let n: u64 = r.gen_range(1_000..100_000_000);
        let f = FactoredInteger::new(n).unwrap();
        if !f.is_squarefree() {
            continue;
        }
        sampled += 1;
        for k in 1..=3u32 {
            let (v, scale) = prime_log_sum(&f, k);
            c2 = c2.max(v / scale);
        }
        let f_n1 = f_factor(&f, C64::new(1.0, 0.0)).re;
        for q in 0..=3u32 {
            let v = moebius_log_divisor_sum(&f, q).abs();
            let scale = f_n1 * (n as f64).ln().ln().powi(q as i32).max(1e-12);
            c4 = c4.max(v / scale);
        }
    }
    g.check(
        c2 <= 10.0,
        format!("prime log sum fitted C = {c2:.3} (<= 10)"),
    );
    g.check(
        c4 <= 10.0,
        format!("Moebius log divisor sum fitted C = {c4:.3} (<= 10)"),
    );

    // L7: relative gap to the predicted main term shrinks along x
    for (k, d) in [(1u32, 1u64), (2, 1), (3, 2)] {
        let df = FactoredInteger::new(d).unwrap();
        let mut gaps = Vec::new();
        for &x in &[1.0e3f64, 1.0e4, 1.0e5, 1.0e6] {
            let rep = coprime_mobius_log_sum(x, k, &df, budget).unwrap();
            gaps.push(((rep.exact - rep.main_term) / rep.main_term).abs());
        }
        g.check(
            gaps[3] < gaps[0],
            format!(
                "coprime Moebius log sum (k={k}, d={d}): gaps {:.3} {:.3} {:.3} {:.3}",
                gaps[0], gaps[1], gaps[2], gaps[3]
            ),
        );
    }

    // L9: Stieltjes-constant prediction at the stated error scale
    let rep0 = log_power_harmonic_sum(1.0e6, 0, budget).unwrap();
    let err0 = (rep0.exact - rep0.predicted).abs();
    g.check(
        err0 < 10.0 / 1.0e6,
        format!("harmonic sum k=0 at x=1e6: |exact-pred| = {err0:.2e} (< 10 log^0 x / x)"),
    );
    let rep2 = log_power_harmonic_sum(1.0e5, 2, budget).unwrap();
    let err2 = (rep2.exact - rep2.predicted).abs();
    g.check(
        err2 < 10.0 * 1.0e5f64.ln().powi(2) / 1.0e5,
        format!("harmonic sum k=2 at x=1e5: |exact-pred| = {err2:.2e} (< 10 log^2 x / x)"),
    );

    g.report("9-lemmas", "arithmetic lemma suite", start)
}

/// Informational: the windowed zeta-derivative mean square against its
/// closed-form constant (the corollary-level experiment).
pub fn info_izeta_ratio(prec: &PrecisionConfig) -> CriterionReport {
    let start = Instant::now();
    let mut g = Gate::new();
    let (m, n) = (1usize, 1usize);
    let theta = 0.2;
    let t0 = 1.0e5;
    let w = WindowSpec::new(t0, 0.72, theta).unwrap();
    let poly = DirichletPolynomial::build_mollifier(t0, theta).unwrap();
    match integrate_izeta(&poly, &w, m, n, prec) {
        Ok(v) => {
            let c = zeta_main_constant_thm5(m, n, theta).unwrap();
            let closed = c * w.h * (t0 / TAU).ln().powi((m + n) as i32);
            g.info(format!(
                "zeta'(1/2+it) mollified mean square at T=1e5: ratio {:.4} to the closed form (err scale {:.2}), imag part {:.2e}",
                v.value / closed,
                t0.ln().ln().powi(3) / t0.ln(),
                v.imag_magnitude
            ));
        }
        Err(e) => g.info(format!("integration failed: {e}")),
    }
    CriterionReport {
        id: "info-izeta".into(),
        name: "zeta-derivative mean square (informational)".into(),
        passed: None,
        details: g.notes.join(" | "),
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn suite_names() -> &'static [&'static str] {
    &[
        "identities",
        "afe",
        "moments",
        "mollified",
        "parity",
        "mainterms",
        "oscillatory",
        "zerolab",
        "lemmas",
        "all",
    ]
}

/// Run a named suite; "all" executes every criterion in order.
pub fn run_suite(name: &str, prec: &PrecisionConfig) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let push_osc = |out: &mut Vec<CriterionReport>| {
        let (a, b) = criterion_7_oscillatory(prec);
        out.push(a);
        out.push(b);
    };
    match name {
        "identities" => out.push(criterion_1_identities(prec)),
        "afe" => out.push(criterion_2_afe(prec)),
        "moments" => out.push(criterion_3_second_moment(prec)),
        "mollified" => out.push(criterion_4_mollified(prec)),
        "parity" => out.push(criterion_5_parity(prec)),
        "mainterms" => out.push(criterion_6_main_terms(prec)),
        "oscillatory" => push_osc(&mut out),
        "zerolab" => out.push(criterion_8_zerolab(prec)),
        "lemmas" => out.push(criterion_9_lemmas(prec)),
        "all" => {
            out.push(criterion_1_identities(prec));
            out.push(criterion_2_afe(prec));
            out.push(criterion_3_second_moment(prec));
            out.push(criterion_4_mollified(prec));
            out.push(criterion_5_parity(prec));
            out.push(criterion_6_main_terms(prec));
            push_osc(&mut out);
            out.push(criterion_8_zerolab(prec));
            out.push(criterion_9_lemmas(prec));
            out.push(info_izeta_ratio(prec));
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown suite '{other}' (expected one of {:?})",
                suite_names()
            )))
        }
    }
    Ok(out)
}
