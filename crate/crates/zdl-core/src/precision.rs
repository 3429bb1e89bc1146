use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Working precision and truncation knobs for every analytic evaluation.
///
/// `working_digits >= 30` switches the oscillatory phases (t*log n, the
/// theta phase, log chi) to double-double arithmetic, which keeps well
/// over ten significant digits after reduction mod 2*pi up to t = 1e8.
/// Plain f64 is used below that.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PrecisionConfig {
    /// Decimal digits of working precision (15 = plain f64, >=30 = f64
    /// with double-double phases).
    pub working_digits: u32,
    /// Number of Bernoulli correction terms in the Euler-Maclaurin tail.
    pub euler_maclaurin_terms: u32,
    /// Main-sum length multiplier for zeta evaluation.
    pub cutoff_multiplier: f64,
    /// Absolute error target certified by the two-depth check.
    pub target_abs_tol: f64,
    /// Ceiling on |Im s| for zeta evaluation.
    pub t_ceiling: f64,
    /// Term budget for exact arithmetic sums.
    pub sum_budget: u64,
    /// Fraction of quadrature nodes re-checked with the exact evaluator.
    pub audit_fraction: f64,
    /// Hard cap on audit nodes per integral (desk-scale CPU budget).
    pub audit_max_nodes: usize,
    /// Multiplier on the approximate-functional-equation error budget
    /// above which an audit aborts the run.
    pub audit_slack: f64,
    /// Seed for audit-node selection and randomized checks.
    pub seed: u64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_digits: 30,
            euler_maclaurin_terms: 14,
            cutoff_multiplier: 2.5,
            target_abs_tol: 1e-10,
            t_ceiling: 1e8,
            sum_budget: 100_000_000,
            audit_fraction: 0.01,
            audit_max_nodes: 128,
            audit_slack: 5.0,
            seed: 0xC0FFEE,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.working_digits < 15 {
            return Err(Error::Validation("working_digits must be >= 15".into()));
        }
        if !(2..=30).contains(&self.euler_maclaurin_terms) {
            return Err(Error::Validation(
                "euler_maclaurin_terms must lie in [2, 30]".into(),
            ));
        }
        if !(self.target_abs_tol > 0.0) {
            return Err(Error::Validation("target_abs_tol must be positive".into()));
        }
        if !(self.cutoff_multiplier >= 1.0) {
            return Err(Error::Validation("cutoff_multiplier must be >= 1".into()));
        }
        Ok(())
    }

    /// Double-double phase arithmetic enabled?
    pub fn dd_phases(&self) -> bool {
        self.working_digits >= 30
    }
}
