//! Closed-form main terms of the windowed mean squares: the general
//! pair-sum engines, the mollifier-case constants, and the J(r1,r2)
//! harmonic pair sums.

use crate::error::{Error, Result};
use crate::mollifier::{DirichletPolynomial, WindowSpec};
use crate::ntk::gcd;
use crate::quad::{gauss_legendre, NeumaierSum};
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Desk-scale cap on the O(X^2) pair sums.
pub const PAIR_SUM_CAP: f64 = 1.0e4;

fn check_pair_budget(poly: &DirichletPolynomial) -> Result<()> {
    if poly.length_x > PAIR_SUM_CAP {
        return Err(Error::ResourceBudget(format!(
            "pair sum over X = {} exceeds the cap {PAIR_SUM_CAP}",
            poly.length_x
        )));
    }
    Ok(())
}

/// P_k(theta) = k^2 theta/(3(2k-1)4^{k-1}) + 1/(4^k(2k+1)theta) + 1/4^k;
/// the k = 0 convention drops the k^2 term (P_0 = 1 + 1/theta).
pub fn p_k_theta(k: usize, theta: f64) -> Result<f64> {
    let cap = WindowSpec::theta_cap(k);
    if !(theta > 0.0 && theta < cap) {
        return Err(Error::Validation(format!(
            "theta = {theta} outside (0, {cap}) for k = {k}"
        )));
    }
    let four_k = 4.0f64.powi(k as i32);
    let quad = if k == 0 {
        0.0
    } else {
        (k * k) as f64 * theta / (3.0 * (2.0 * k as f64 - 1.0) * (four_k / 4.0))
    };
    Ok(quad + 1.0 / (four_k * (2.0 * k as f64 + 1.0) * theta) + 1.0 / four_k)
}

/// The windowed zeta-derivative mean-square constant
/// 1/2 + 1/(theta(m+n+1)) + m n theta/(3(m+n-1)), for m, n >= 1.
pub fn zeta_main_constant_thm5(m: usize, n: usize, theta: f64) -> Result<f64> {
    if m < 1 || n < 1 {
        return Err(Error::Validation(
            "the zeta mean-square constant is defined for m, n >= 1".into(),
        ));
    }
    let k = m.min(n);
    let cap = WindowSpec::theta_cap(k);
    if !(theta > 0.0 && theta < cap) {
        return Err(Error::Validation(format!(
            "theta = {theta} outside (0, {cap}) for k = min(m,n) = {k}"
        )));
    }
    Ok(0.5
        + 1.0 / (theta * (m + n + 1) as f64)
        + (m * n) as f64 * theta / (3.0 * (m + n - 1) as f64))
}

/// Parity sign: (-1)^{(k2-k1)/2} for even k1+k2, zero for odd.
pub fn parity_factor(k1: usize, k2: usize) -> f64 {
    if (k1 + k2) % 2 == 1 {
        0.0
    } else {
        let d = (k2 as i64 - k1 as i64) / 2;
        if d.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Mollifier-case closed form of the pair-sum main term:
/// theta(k1,k2)/2^{k1+k2} (1 + 1/((k1+k2+1) theta) + 4 k1 k2 theta/(3(k1+k2-1))).
/// The product term is dropped when k1 k2 = 0.
pub fn moment_prod_hardy_constant(k1: usize, k2: usize, theta: f64) -> f64 {
    let v = parity_factor(k1, k2) / 2.0f64.powi((k1 + k2) as i32);
    if v == 0.0 {
        return 0.0;
    }
    let cross = if k1 == 0 || k2 == 0 {
        0.0
    } else {
        4.0 * (k1 * k2) as f64 * theta / (3.0 * (k1 + k2 - 1) as f64)
    };
    v * (1.0 + 1.0 / ((k1 + k2 + 1) as f64 * theta) + cross)
}

/// Main term of the windowed mean square of Z^(k) |Phi|^2:
/// (H/4^k) sum_{l,q<=X} b_l conj(b_q) (l,q)/(lq) L int_0^1 (x^2 L^2 - log^2(q/l))^k dx
/// with L = log(T (l,q)^2 / (2 pi l q)); the inner integral is expanded
/// binomially (it is a polynomial in x).
pub fn main_term_thm0(
    poly: &DirichletPolynomial,
    window: &WindowSpec,
    k: usize,
) -> Result<f64> {
    check_pair_budget(poly)?;
    let terms = poly.terms();
    let t0 = window.t_lo;
    let h = window.h;
    // binomial coefficients for (A - B)^k expansion
    let binoms: Vec<f64> = (0..=k).map(|j| crate::hardy::binomial(k, j)).collect();
    let rows: Vec<f64> = terms
        .par_iter()
        .enumerate()
        .map(|(i, &(l, bl))| {
            let mut acc = NeumaierSum::new();
            for &(q, bq) in &terms[i..] {
                let g = gcd(l, q) as f64;
                let coeff = (bl * bq.conj()).re * g / (l as f64 * q as f64);
                let weight = if q == l { 1.0 } else { 2.0 };
                if coeff == 0.0 {
                    continue;
                }
                let big_l = (t0 * g * g / (TAU * l as f64 * q as f64)).ln();
                let a2 = {
                    let r = (q as f64 / l as f64).ln();
                    r * r
                };
                // int_0^1 (x^2 L^2 - a^2)^k dx = sum_j C(k,j) L^{2j} (-a^2)^{k-j} / (2j+1)
                let mut inner = 0.0;
                for j in 0..=k {
                    let mut v = binoms[j] / (2.0 * j as f64 + 1.0);
                    v *= big_l.powi(2 * j as i32);
                    v *= (-a2).powi((k - j) as i32);
                    inner += v;
                }
                acc.add(weight * coeff * big_l * inner);
            }
            acc.total()
        })
        .collect();
    let mut total = NeumaierSum::new();
    for r in rows {
        total.add(r);
    }
    Ok(h / 4.0f64.powi(k as i32) * total.total())
}

/// Main term of the windowed mean of Z^(k1) Z^(k2) |Phi|^2:
/// H theta(k1,k2)/2^{k1+k2} sum b_l conj(b_q) (l,q)/(lq) (F + G), with
/// F by Gauss-Legendre exact for the polynomial degree and G in closed form.
pub fn main_term_thm4(
    poly: &DirichletPolynomial,
    window: &WindowSpec,
    k1: usize,
    k2: usize,
) -> Result<f64> {
    check_pair_budget(poly)?;
    let v = parity_factor(k1, k2);
    if v == 0.0 {
        return Ok(0.0);
    }
    let terms = poly.terms();
    let t0 = window.t_lo;
    let h = window.h;
    let deg = k1 + k2;
    let n_nodes = deg / 2 + 1; // exact for degree <= 2n-1 >= deg
    let (nodes, weights) = gauss_legendre(n_nodes.max(1));
    // G's y-integral is a pure (k1,k2) number, exact at the same rule
    let y_int = {
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let y = 0.5 + 0.5 * x;
            let f = (y + 1.0).powi(k1 as i32) * (1.0 - y).powi(k2 as i32)
                - (1.0 - y).powi(k1 as i32) * (y + 1.0).powi(k2 as i32);
            acc += w * f;
        }
        acc * 0.5
    };
    let rows: Vec<f64> = terms
        .par_iter()
        .enumerate()
        .map(|(i, &(l, bl))| {
            let mut acc = NeumaierSum::new();
            for &(q, bq) in &terms[i..] {
                let g = gcd(l, q) as f64;
                let base = (bl * bq.conj()).re * g / (l as f64 * q as f64);
                if base == 0.0 {
                    continue;
                }
                let big_l = (t0 * g * g / (TAU * l as f64 * q as f64)).ln();
                let a = (q as f64 / l as f64).ln();
                // F = L int_0^1 (xL - a)^{k1} (xL + a)^{k2} dx
                let mut f_int = 0.0;
                for (x, w) in nodes.iter().zip(&weights) {
                    let xx = 0.5 + 0.5 * x;
                    f_int += w
                        * (xx * big_l - a).powi(k1 as i32)
                        * (xx * big_l + a).powi(k2 as i32);
                }
                f_int *= 0.5 * big_l;
                // G = (a/2)^{k1} (-a/2)^{k2+1} * y_int
                let g_term = (0.5 * a).powi(k1 as i32) * (-0.5 * a).powi(k2 as i32 + 1) * y_int;
                let fg = f_int + g_term;
                if q == l {
                    acc.add(base * fg);
                } else {
                    // the (q,l) partner has a -> -a; F/G swap roles of k1,k2
                    let mut f_int2 = 0.0;
                    for (x, w) in nodes.iter().zip(&weights) {
                        let xx = 0.5 + 0.5 * x;
                        f_int2 += w
                            * (xx * big_l + a).powi(k1 as i32)
                            * (xx * big_l - a).powi(k2 as i32);
                    }
                    f_int2 *= 0.5 * big_l;
                    let g_term2 =
                        (-0.5 * a).powi(k1 as i32) * (0.5 * a).powi(k2 as i32 + 1) * y_int;
                    acc.add(base * (fg + f_int2 + g_term2));
                }
            }
            acc.total()
        })
        .collect();
    let mut total = NeumaierSum::new();
    for r in rows {
        total.add(r);
    }
    Ok(h * v / 2.0f64.powi(deg as i32) * total.total())
}

/// Which denominator bounds the inner harmonic sum of J(r1, r2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerLimit {
    /// y <= tau0 (l,q) / q (the displayed form).
    DenomQ,
    /// y <= tau0 (l,q) / l (the alternative noted alongside it).
    DenomL,
}

/// The harmonic pair sum
/// J(r1,r2) = sum_{m1<=r1, m2<=r2} C(r1,m1) C(r2,m2)
///   sum_{l,q<=X} b_l conj(b_q) (l,q)/(lq) log^{m1}(l/(l,q)) log^{m2}(q/(l,q))
///   sum_{y <= tau0 (l,q)/q} log^r y / y,     r = r1+r2-m1-m2.
pub fn prop_l12_j(
    r1: usize,
    r2: usize,
    poly: &DirichletPolynomial,
    tau0: f64,
    limit: InnerLimit,
) -> Result<f64> {
    check_pair_budget(poly)?;
    if tau0 < 1.0 {
        return Err(Error::Validation("prop_l12_j needs tau0 >= 1".into()));
    }
    let terms = poly.terms();
    let r_max = r1 + r2;
    // dense prefix tables H_r(m) = sum_{n<=m} log^r n / n for r <= r1+r2
    let top = tau0.floor() as usize;
    if (r_max + 1) * (top + 1) > 60_000_000 {
        return Err(Error::ResourceBudget(format!(
            "prefix harmonic tables for tau0 = {tau0}, r <= {r_max} exceed the budget"
        )));
    }
    let mut prefix: Vec<Vec<f64>> = vec![Vec::with_capacity(top + 1); r_max + 1];
    {
        let mut accs = vec![NeumaierSum::new(); r_max + 1];
        for r in 0..=r_max {
            prefix[r].push(0.0);
        }
        for n in 1..=top {
            let ln_n = (n as f64).ln();
            let inv = 1.0 / n as f64;
            let mut w = inv;
            for r in 0..=r_max {
                accs[r].add(w);
                prefix[r].push(accs[r].total());
                w *= ln_n;
            }
        }
    }
    let harmonic = |y: f64, r: usize| -> f64 {
        let yn = (y.floor() as usize).min(top);
        prefix[r][yn]
    };
    let binom = crate::hardy::binomial;
    let mut total = NeumaierSum::new();
    for &(l, bl) in terms {
        for &(q, bq) in terms {
            let g = gcd(l, q);
            let base = (bl * bq.conj()).re * g as f64 / (l as f64 * q as f64);
            if base == 0.0 {
                continue;
            }
            let denom = match limit {
                InnerLimit::DenomQ => q,
                InnerLimit::DenomL => l,
            };
            let y = tau0 * g as f64 / denom as f64;
            let ln_l = ((l / g) as f64).ln();
            let ln_q = ((q / g) as f64).ln();
            let mut cell = 0.0;
            for m1 in 0..=r1 {
                for m2 in 0..=r2 {
                    let r = r_max - m1 - m2;
                    let w = binom(r1, m1)
                        * binom(r2, m2)
                        * ln_l.powi(m1 as i32)
                        * ln_q.powi(m2 as i32);
                    if w == 0.0 {
                        continue;
                    }
                    cell += w * harmonic(y, r);
                }
            }
            total.add(base * cell);
        }
    }
    Ok(total.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use approx::assert_relative_eq;

    #[test]
    fn p_k_values() {
        assert_relative_eq!(p_k_theta(0, 0.2).unwrap(), 6.0, epsilon = 1e-14);
        assert_relative_eq!(p_k_theta(1, 0.25).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        assert!(p_k_theta(1, 0.5).is_err()); // above the k=1 cap 3/8
    }

    #[test]
    fn p_k_minimizer_location() {
        // the bracket 1/((2k+1)theta) + k^2 theta/(3(2k-1)) is minimized at
        // theta* = sqrt(3(2k-1)/(k^2(2k+1))), inside the cap exactly when
        // k >= 4
        for k in 1..=6usize {
            let star = (3.0 * (2.0 * k as f64 - 1.0) / ((k * k) as f64 * (2.0 * k as f64 + 1.0)))
                .sqrt();
            let bracket = |th: f64| {
                1.0 / ((2.0 * k as f64 + 1.0) * th)
                    + (k * k) as f64 * th / (3.0 * (2.0 * k as f64 - 1.0))
            };
            assert!(bracket(star) <= bracket(star * 1.01) + 1e-12);
            assert!(bracket(star) <= bracket(star * 0.99) + 1e-12);
            let inside = star < WindowSpec::theta_cap(k);
            assert_eq!(inside, k >= 4, "k={k}: theta* = {star}");
        }
    }

    #[test]
    fn thm5_constants() {
        assert_relative_eq!(
            zeta_main_constant_thm5(1, 1, 0.2).unwrap(),
            0.5 + 1.0 / 0.6 + 0.2 / 3.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            zeta_main_constant_thm5(1, 2, 0.1).unwrap(),
            0.5 + 1.0 / 0.4 + 0.2 / 6.0,
            epsilon = 1e-14
        );
        // m = n = k matches the diagonal corollary form
        for k in 1..=3usize {
            let th = 0.2 * WindowSpec::theta_cap(k);
            let a = zeta_main_constant_thm5(k, k, th).unwrap();
            let b = 0.5
                + 1.0 / ((2.0 * k as f64 + 1.0) * th)
                + th * (k * k) as f64 / (3.0 * (2.0 * k as f64 - 1.0));
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
        assert!(zeta_main_constant_thm5(0, 0, 0.1).is_err());
    }

    #[test]
    fn thm0_single_pair_closed_forms() {
        let unit = DirichletPolynomial::unit();
        let w = WindowSpec::new(1.0e4, 0.7, 0.0).unwrap();
        let l = (1.0e4 / TAU).ln();
        // k = 0: H log(T/2pi)
        let m0 = main_term_thm0(&unit, &w, 0).unwrap();
        assert_relative_eq!(m0, w.h * l, epsilon = 1e-12);
        // k = 1: (H/12) log^3(T/2pi)
        let m1 = main_term_thm0(&unit, &w, 1).unwrap();
        assert_relative_eq!(m1, w.h / 12.0 * l.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn thm4_odd_parity_vanishes() {
        let poly = DirichletPolynomial::build_mollifier_with_x(30.0, 0.2).unwrap();
        let w = WindowSpec::new(1.0e5, 0.7, 0.2).unwrap();
        assert_eq!(main_term_thm4(&poly, &w, 0, 1).unwrap(), 0.0);
        assert_eq!(main_term_thm4(&poly, &w, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn thm4_equals_thm0_on_diagonal() {
        // same formula when k1 = k2 = k; exact to roundoff
        let mut rng_state = 12345u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 33) as f64) / (2.0f64.powi(31))
        };
        for trial in 0..20 {
            let mut terms = vec![(1u64, C64::new(1.0, 0.0))];
            for n in 2..=6u64 {
                terms.push((n, C64::new(next() - 0.5, next() - 0.5)));
            }
            let poly = DirichletPolynomial::from_coefficients(terms, 6.0, true).unwrap();
            let w = WindowSpec::new(1.0e4 + 1000.0 * trial as f64, 0.7, 0.0).unwrap();
            for k in 0..=3usize {
                let a = main_term_thm0(&poly, &w, k).unwrap();
                let b = main_term_thm4(&poly, &w, k, k).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn thm4_off_diagonal_closed_form() {
        // (k1, k2) = (0, 2), b_1 = 1: -(H/12) log^3(T/2pi)
        let unit = DirichletPolynomial::unit();
        let w = WindowSpec::new(1.0e4, 0.7, 0.0).unwrap();
        let l = (1.0e4 / TAU).ln();
        let m = main_term_thm4(&unit, &w, 0, 2).unwrap();
        assert_relative_eq!(m, -w.h / 12.0 * l.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn thm0_against_direct_double_sum_oracle() {
        // independent oracle: same sum with a numeric inner integral
        // (midpoint rule, 20000 points) and naive accumulation over all
        // ordered pairs
        let terms = vec![
            (1u64, C64::new(1.0, 0.0)),
            (2, C64::new(-0.4, 0.1)),
            (3, C64::new(0.2, -0.3)),
            (5, C64::new(0.1, 0.05)),
            (6, C64::new(-0.15, 0.0)),
        ];
        let poly = DirichletPolynomial::from_coefficients(terms.clone(), 6.0, true).unwrap();
        let w = WindowSpec::new(5.0e4, 0.6, 0.0).unwrap();
        let k = 2usize;
        let mut oracle = 0.0;
        for &(l, bl) in &terms {
            for &(q, bq) in &terms {
                let g = gcd(l, q) as f64;
                let c = (bl * bq.conj()).re * g / (l as f64 * q as f64);
                let big_l = (w.t_lo * g * g / (TAU * l as f64 * q as f64)).ln();
                let a2 = (q as f64 / l as f64).ln().powi(2);
                let m = 20000;
                let mut inner = 0.0;
                for i in 0..m {
                    let x = (i as f64 + 0.5) / m as f64;
                    inner += (x * x * big_l * big_l - a2).powi(k as i32);
                }
                inner /= m as f64;
                oracle += c * big_l * inner;
            }
        }
        oracle *= w.h / 4.0f64.powi(k as i32);
        let got = main_term_thm0(&poly, &w, k).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-6);
    }

    #[test]
    fn pair_budget_enforced() {
        let poly = DirichletPolynomial::build_mollifier_with_x(20.0, 0.2).unwrap();
        let mut fat = poly.clone();
        fat.length_x = 2.0e4;
        let w = WindowSpec::new(1.0e5, 0.7, 0.2).unwrap();
        assert!(matches!(
            main_term_thm0(&fat, &w, 0),
            Err(Error::ResourceBudget(_))
        ));
    }

    #[test]
    fn l12_unit_harmonic() {
        // b_1 = 1, r1 = r2 = 0: sum_{y <= tau0} 1/y ~ log tau0 + gamma_0
        let unit = DirichletPolynomial::unit();
        let tau0 = 1.0e4;
        let j = prop_l12_j(0, 0, &unit, tau0, InnerLimit::DenomQ).unwrap();
        let want = tau0.ln() + crate::ntk::stieltjes::global().lemma_constant(0);
        assert!((j - want).abs() < 1e-3, "{j} vs {want}");
    }

    #[test]
    fn l12_mollifier_constants() {
        // mollifier case, inner sums bounded by tau0 (l,q)/q:
        //   J(0,0) -> 1/(2 theta) + 1/2
        //   J(1,0) -> (1/(4 theta) - 2 theta/3) log tau0
        //   J(0,1) -> log tau0 / (4 theta)
        // (the off-diagonal values follow the general r1,r2 formula with
        // its -2 theta r1/3 term; the swap under the alternative inner
        // limit is checked at the end).  Convergence in X is slow, so the
        // check is a tolerance at X = 3000 plus an X-trend.
        let theta = 0.25f64;
        let measure = |x: f64, r1: usize, r2: usize, lim: InnerLimit| -> (f64, f64) {
            let t_anchor = x.powf(1.0 / theta);
            let tau0 = (t_anchor / TAU).sqrt();
            let poly = DirichletPolynomial::build_mollifier_with_x(x, theta).unwrap();
            (
                prop_l12_j(r1, r2, &poly, tau0, lim).unwrap(),
                tau0.ln(),
            )
        };
        let want00 = 1.0 / (2.0 * theta) + 0.5;
        let (j00_a, _) = measure(300.0, 0, 0, InnerLimit::DenomQ);
        let (j00_b, _) = measure(3000.0, 0, 0, InnerLimit::DenomQ);
        let (ra, rb) = ((j00_a / want00 - 1.0).abs(), (j00_b / want00 - 1.0).abs());
        assert!(rb < 0.15, "J(0,0) = {j00_b} vs {want00}");
        assert!(rb < ra, "J(0,0) relative error not shrinking: {ra} -> {rb}");

        let (j10, lt) = measure(3000.0, 1, 0, InnerLimit::DenomQ);
        let want10 = (1.0 / (4.0 * theta) - 2.0 * theta / 3.0) * lt;
        assert!(
            (j10 / want10 - 1.0).abs() < 0.2,
            "J(1,0) = {j10} vs {want10}"
        );
        let (j01, _) = measure(3000.0, 0, 1, InnerLimit::DenomQ);
        let want01 = lt / (4.0 * theta);
        assert!(
            (j01 / want01 - 1.0).abs() < 0.2,
            "J(0,1) = {j01} vs {want01}"
        );
        // the alternative inner limit swaps the two off-diagonal values
        let (j10_alt, _) = measure(3000.0, 1, 0, InnerLimit::DenomL);
        assert!(
            (j10_alt / want01 - 1.0).abs() < 0.2,
            "J(1,0)|alt = {j10_alt} vs {want01}"
        );
        let (j01_alt, _) = measure(3000.0, 0, 1, InnerLimit::DenomL);
        assert!(
            (j01_alt / want10 - 1.0).abs() < 0.2,
            "J(0,1)|alt = {j01_alt} vs {want10}"
        );
    }
}
