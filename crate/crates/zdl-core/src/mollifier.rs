//! Dirichlet polynomials Phi(s) = sum_{n <= X} b_n n^{-s} and the
//! standard mollifier coefficients mu(n)(1 - log n / log X).

use crate::dd::{phase_exp, LnTable};
use crate::error::{Error, Result};
use crate::ntk::mobius_sieve;
use crate::precision::PrecisionConfig;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// The window [T, T+H] with H = T^a, plus the mollifier exponent theta
/// and length X = T^theta.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowSpec {
    /// Left endpoint T.
    pub t_lo: f64,
    /// Window exponent a (H = T^a).
    pub a: f64,
    /// Window length H.
    pub h: f64,
    /// Mollifier exponent theta.
    pub theta: f64,
    /// Mollifier length X = T^theta.
    pub x_len: f64,
}

impl WindowSpec {
    pub fn new(t_lo: f64, a: f64, theta: f64) -> Result<Self> {
        if !(t_lo > 1.0) {
            return Err(Error::Validation("window requires T > 1".into()));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Validation("window exponent a must lie in [0, 1]".into()));
        }
        if theta < 0.0 {
            return Err(Error::Validation("theta must be >= 0".into()));
        }
        let h = if a == 0.0 { 0.0 } else { t_lo.powf(a) };
        Ok(WindowSpec {
            t_lo,
            a,
            h,
            theta,
            x_len: t_lo.powf(theta),
        })
    }

    /// Window from an explicit length (a is derived; h = 0 allowed for
    /// point evaluations).
    pub fn with_h(t_lo: f64, h: f64, theta: f64) -> Self {
        let a = if h > 0.0 { h.ln() / t_lo.ln() } else { 0.0 };
        WindowSpec {
            t_lo,
            a,
            h,
            theta,
            x_len: t_lo.powf(theta),
        }
    }

    pub fn t_hi(&self) -> f64 {
        self.t_lo + self.h
    }

    /// theta cap (2k+1)/(4(k+1)) for order-k mean squares.
    pub fn theta_cap(k: usize) -> f64 {
        (2.0 * k as f64 + 1.0) / (4.0 * (k as f64 + 1.0))
    }

    pub fn validate_theta_for_k(&self, k: usize) -> Result<()> {
        let cap = Self::theta_cap(k);
        if self.theta >= cap {
            return Err(Error::Validation(format!(
                "theta = {} outside (0, {cap}) for order k = {k}",
                self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    Explicit,
    Mollifier { theta: f64 },
}

/// Immutable Dirichlet polynomial; coefficients are stored sparsely with
/// strictly increasing n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirichletPolynomial {
    terms: Vec<(u64, C64)>,
    pub length_x: f64,
    pub scheme: Scheme,
}

/// Default coefficient-size gate exponent for |b_n| <= n^eps.
pub const COEFF_GATE_EPS: f64 = 0.1;

impl DirichletPolynomial {
    /// b_n = mu(n)(1 - log n / log X) for n <= X = T^theta; b_1 = 1.
    /// Entries with mu(n) = 0 are omitted; the boundary coefficient at
    /// n = X comes out exactly zero and is kept.
    pub fn build_mollifier(t_anchor: f64, theta: f64) -> Result<Self> {
        if theta <= 0.0 {
            return Err(Error::Validation("mollifier needs theta > 0".into()));
        }
        let x = t_anchor.powf(theta);
        Self::build_mollifier_with_x(x, theta)
    }

    /// Same, parameterized directly by the length X.
    pub fn build_mollifier_with_x(x: f64, theta: f64) -> Result<Self> {
        if x < 2.0 {
            return Err(Error::Validation(format!(
                "mollifier length X = {x} < 2 yields an empty polynomial"
            )));
        }
        if x > 2.0e7 {
            return Err(Error::ResourceBudget(format!(
                "mollifier length X = {x} above the desk-scale cap 2e7"
            )));
        }
        let n_max = x.floor() as usize;
        let mu = mobius_sieve(n_max);
        let ln_x = x.ln();
        let mut terms = Vec::new();
        for n in 1..=n_max {
            if mu[n] == 0 {
                continue;
            }
            let b = mu[n] as f64 * (1.0 - (n as f64).ln() / ln_x);
            terms.push((n as u64, C64::new(b, 0.0)));
        }
        Ok(DirichletPolynomial {
            terms,
            length_x: x,
            scheme: Scheme::Mollifier { theta },
        })
    }

    /// Explicit coefficients with the |b_n| <= n^eps build gate.
    pub fn from_coefficients(
        mut terms: Vec<(u64, C64)>,
        length_x: f64,
        gate_override: bool,
    ) -> Result<Self> {
        terms.sort_by_key(|&(n, _)| n);
        for w in terms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!("duplicate coefficient n = {}", w[0].0)));
            }
        }
        for &(n, b) in &terms {
            if n == 0 {
                return Err(Error::Validation("coefficient index n = 0".into()));
            }
            if n as f64 > length_x {
                return Err(Error::Validation(format!(
                    "coefficient n = {n} beyond the stated length X = {length_x}"
                )));
            }
            if !gate_override && b.norm() > (n as f64).powf(COEFF_GATE_EPS) + 1e-12 {
                return Err(Error::Validation(format!(
                    "|b_{n}| = {} violates the n^{COEFF_GATE_EPS} size gate \
                     (pass the override to accept)",
                    b.norm()
                )));
            }
        }
        Ok(DirichletPolynomial {
            terms,
            length_x,
            scheme: Scheme::Explicit,
        })
    }

    pub fn terms(&self) -> &[(u64, C64)] {
        &self.terms
    }

    pub fn coefficient(&self, n: u64) -> C64 {
        match self.terms.binary_search_by_key(&n, |&(m, _)| m) {
            Ok(i) => self.terms[i].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Phi(1/2 + it) = sum b_n n^{-1/2} e^{-i t log n}.
    pub fn evaluate(&self, t: f64, _prec: &PrecisionConfig) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut table = LnTable::new();
        for &(n, b) in &self.terms {
            let ln_dd = table.ln(n as usize);
            acc += b * phase_exp(ln_dd.mul_f64(-t)) / (n as f64).sqrt();
        }
        acc
    }

    pub fn abs_square(&self, t: f64, prec: &PrecisionConfig) -> f64 {
        self.evaluate(t, prec).norm_sqr()
    }

    /// Phi(s) at a general point s = sigma + it.
    pub fn evaluate_at(&self, s: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut table = LnTable::new();
        for &(n, b) in &self.terms {
            let ln_dd = table.ln(n as usize);
            let amp = (-s.re * ln_dd.to_f64()).exp();
            acc += b * phase_exp(ln_dd.mul_f64(-s.im)) * amp;
        }
        acc
    }

    /// sum |b_n|^2 / n (the classical mean value of |Phi|^2).
    pub fn sum_b2_over_n(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(n, b)| b.norm_sqr() / n as f64)
            .sum()
    }

    /// Evaluation helper caching the per-term phases tables.
    pub fn evaluator(&self) -> PolyEvaluator {
        let mut table = LnTable::new();
        let ln_dd = self
            .terms
            .iter()
            .map(|&(n, _)| table.ln(n as usize))
            .collect();
        let amp = self
            .terms
            .iter()
            .map(|&(n, b)| b / (n as f64).sqrt())
            .collect();
        PolyEvaluator {
            ln_dd,
            amp,
        }
    }

    /// CSV with header `n,re,im`, one row per nonzero coefficient.
    pub fn to_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,re,im")?;
        for &(n, b) in &self.terms {
            writeln!(w, "{n},{:.17e},{:.17e}", b.re, b.im)?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.to_csv(std::io::BufWriter::new(f))
    }

    pub fn from_csv<R: BufRead>(r: R, gate_override: bool) -> Result<Self> {
        let mut terms = Vec::new();
        let mut max_n = 1.0f64;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 {
                if line != "n,re,im" {
                    return Err(Error::Validation(format!(
                        "coefficient CSV must start with header 'n,re,im', got '{line}'"
                    )));
                }
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Validation(format!("bad CSV row '{line}'")));
            }
            let n: u64 = cols[0]
                .trim()
                .parse()
                .map_err(|e| Error::Validation(format!("bad n in '{line}': {e}")))?;
            let re: f64 = cols[1]
                .trim()
                .parse()
                .map_err(|e| Error::Validation(format!("bad re in '{line}': {e}")))?;
            let im: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|e| Error::Validation(format!("bad im in '{line}': {e}")))?;
            max_n = max_n.max(n as f64);
            terms.push((n, C64::new(re, im)));
        }
        Self::from_coefficients(terms, max_n, gate_override)
    }

    pub fn read_csv_file(path: &Path, gate_override: bool) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(f), gate_override)
    }

    /// The unit polynomial b_1 = 1.
    pub fn unit() -> Self {
        DirichletPolynomial {
            terms: vec![(1, C64::new(1.0, 0.0))],
            length_x: 1.0,
            scheme: Scheme::Explicit,
        }
    }
}

/// Cached evaluator for tight quadrature loops.
pub struct PolyEvaluator {
    ln_dd: Vec<crate::dd::Dd>,
    amp: Vec<C64>,
}

impl PolyEvaluator {
    pub fn eval(&self, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (ln_dd, amp) in self.ln_dd.iter().zip(&self.amp) {
            acc += amp * phase_exp(ln_dd.mul_f64(-t));
        }
        acc
    }

    pub fn abs_square(&self, t: f64) -> f64 {
        self.eval(t).norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn mollifier_boundary_x2() {
        let p = DirichletPolynomial::build_mollifier_with_x(2.0, 0.1).unwrap();
        assert_eq!(p.terms().len(), 2);
        assert_relative_eq!(p.coefficient(1).re, 1.0, epsilon = 1e-15);
        assert!(p.coefficient(2).norm() < 1e-15);
    }

    #[test]
    fn mollifier_x10_coefficients() {
        let p = DirichletPolynomial::build_mollifier_with_x(10.0, 0.1).unwrap();
        let ln10 = 10.0f64.ln();
        // mu(6) = +1
        assert_relative_eq!(
            p.coefficient(6).re,
            1.0 - 6.0f64.ln() / ln10,
            epsilon = 1e-15
        );
        // non-squarefree entries vanish
        for n in [4u64, 8, 9] {
            assert_eq!(p.coefficient(n), C64::new(0.0, 0.0), "n={n}");
        }
        // mu(2) = -1
        assert_relative_eq!(
            p.coefficient(2).re,
            -(1.0 - 2.0f64.ln() / ln10),
            epsilon = 1e-15
        );
    }

    #[test]
    fn unit_polynomial_evaluates_to_one() {
        let u = DirichletPolynomial::unit();
        let v = u.evaluate(1234.5, &prec());
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn evaluate_matches_termwise_oracle() {
        let p = DirichletPolynomial::build_mollifier_with_x(10.0, 0.1).unwrap();
        let t = 100.0;
        // independent term-by-term oracle with std complex exponentials
        let mut oracle = C64::new(0.0, 0.0);
        for &(n, b) in p.terms() {
            let phase = -t * (n as f64).ln();
            oracle += b * C64::new(phase.cos(), phase.sin()) / (n as f64).sqrt();
        }
        let v = p.evaluate(t, &prec());
        assert!((v - oracle).norm() < 1e-10);
        assert_relative_eq!(p.abs_square(t, &prec()), v.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn conjugate_symmetry_in_t() {
        let p = DirichletPolynomial::build_mollifier_with_x(50.0, 0.1).unwrap();
        for &t in &[3.0, 77.7, 1000.0] {
            let a = p.evaluate(t, &prec());
            let b = p.evaluate(-t, &prec());
            assert!((a.conj() - b).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn coefficient_gate() {
        let terms = vec![(1u64, C64::new(1.0, 0.0)), (5, C64::new(3.0, 0.0))];
        assert!(DirichletPolynomial::from_coefficients(terms.clone(), 10.0, false).is_err());
        assert!(DirichletPolynomial::from_coefficients(terms, 10.0, true).is_ok());
    }

    #[test]
    fn csv_roundtrip() {
        let p = DirichletPolynomial::build_mollifier_with_x(12.0, 0.2).unwrap();
        let mut buf = Vec::new();
        p.to_csv(&mut buf).unwrap();
        let q = DirichletPolynomial::from_csv(std::io::Cursor::new(buf), false).unwrap();
        assert_eq!(p.terms().len(), q.terms().len());
        for (&(n1, b1), &(n2, b2)) in p.terms().iter().zip(q.terms()) {
            assert_eq!(n1, n2);
            assert!((b1 - b2).norm() < 1e-16);
        }
    }

    #[test]
    fn evaluator_matches_direct() {
        let p = DirichletPolynomial::build_mollifier_with_x(100.0, 0.2).unwrap();
        let ev = p.evaluator();
        for &t in &[10.0, 500.0, 12345.6] {
            let a = ev.eval(t);
            let b = p.evaluate(t, &prec());
            assert!((a - b).norm() < 1e-13);
        }
    }
}
