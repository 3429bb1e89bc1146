//! Double-double arithmetic for the oscillatory phases.
//!
//! Phases of the form t*log n reach 1e8 and beyond while the evaluations
//! need them mod 2*pi to a dozen significant digits; plain f64 leaves too
//! little after the reduction.  A double-double (~31 decimal digits)
//! carries the phase through products and reductions.  Only the handful
//! of operations the evaluators need are implemented.

use once_cell::sync::Lazy;

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const PI_2: Dd = Dd {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };
    pub const LN_2: Dd = Dd {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, o: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, o);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, o: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, o);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * o);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let y = self.hi.sqrt();
        // One Newton step: y + (a - y^2) / (2y)
        let y2 = Dd::from_f64(y).mul_f64(y);
        let corr = self.sub(y2).div(Dd::from_f64(2.0 * y));
        Dd::from_f64(y).add(corr)
    }

    /// Natural log of a positive double-double.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        // a = m * 2^e with m in [sqrt(2)/2, sqrt(2))
        let mut e = (self.hi.to_bits() >> 52) as i64 - 1023;
        let mut m = self.mul_f64(f64::from_bits(((1023 - e) as u64) << 52));
        if m.hi >= std::f64::consts::SQRT_2 {
            m = m.mul_f64(0.5);
            e += 1;
        }
        // ln m = 2 atanh(r), r = (m-1)/(m+1), |r| <= 0.1716
        let r = m.add_f64(-1.0).div(m.add_f64(1.0));
        let r2 = r.mul(r);
        let mut term = r;
        let mut sum = r;
        for k in 1..=24 {
            term = term.mul(r2);
            sum = sum.add(term.div(Dd::from_f64((2 * k + 1) as f64)));
        }
        sum.mul_f64(2.0).add(Dd::LN_2.mul_f64(e as f64))
    }

    /// log(1 + num/den) for 0 < num/den <= 1e-3, used by the incremental
    /// log-table recurrence.
    pub fn ln1p_ratio(num: f64, den: f64) -> Dd {
        let r = Dd::from_f64(num).div(Dd::from_f64(den));
        debug_assert!(r.hi.abs() <= 1.5e-3);
        // ln(1+r) = r - r^2/2 + r^3/3 - ... ; r <= 1e-3 needs 11 terms
        let mut sum = Dd::ZERO;
        let mut pw = r;
        let mut sign = 1.0;
        for k in 1..=11 {
            sum = sum.add(pw.div(Dd::from_f64(k as f64)).mul_f64(sign));
            pw = pw.mul(r);
            sign = -sign;
        }
        sum
    }

    /// atan for |w| <= 1, by three half-angle reductions plus the series.
    fn atan_leq1(self) -> Dd {
        let mut w = self;
        let mut scale = 1.0;
        for _ in 0..3 {
            // atan(w) = 2 atan(w / (1 + sqrt(1+w^2)))
            let root = w.mul(w).add_f64(1.0).sqrt().add_f64(1.0);
            w = w.div(root);
            scale *= 2.0;
        }
        let w2 = w.mul(w);
        let mut term = w;
        let mut sum = w;
        let mut sign = -1.0;
        for k in 1..=18 {
            term = term.mul(w2);
            sum = sum.add(term.div(Dd::from_f64((2 * k + 1) as f64)).mul_f64(sign));
            sign = -sign;
        }
        sum.mul_f64(scale)
    }

    pub fn atan2(y: Dd, x: Dd) -> Dd {
        if y.hi == 0.0 && y.lo == 0.0 {
            return if x.hi >= 0.0 { Dd::ZERO } else { Dd::PI };
        }
        if x.hi == 0.0 && x.lo == 0.0 {
            return if y.hi > 0.0 { Dd::PI_2 } else { Dd::PI_2.neg() };
        }
        let w = y.div(x);
        let aw = if w.hi.abs() <= 1.0 {
            let a = Dd { hi: w.hi.abs(), lo: if w.hi < 0.0 { -w.lo } else { w.lo } };
            a.atan_leq1()
        } else {
            let a = Dd { hi: w.hi.abs(), lo: if w.hi < 0.0 { -w.lo } else { w.lo } };
            Dd::PI_2.sub(a.recip().atan_leq1())
        };
        let base = if w.hi >= 0.0 { aw } else { aw.neg() };
        if x.hi > 0.0 {
            base
        } else if y.hi >= 0.0 {
            base.add(Dd::PI)
        } else {
            base.sub(Dd::PI)
        }
    }

    /// Reduce into (-pi, pi] (up to a rounding sliver at the boundary).
    pub fn mod_2pi(self) -> Dd {
        let q = (self.hi / Dd::TWO_PI.hi).round();
        let mut r = self.sub(Dd::TWO_PI.mul_f64(q));
        while r.hi > Dd::PI.hi {
            r = r.sub(Dd::TWO_PI);
        }
        while r.hi < -Dd::PI.hi {
            r = r.add(Dd::TWO_PI);
        }
        r
    }
}

/// ln(2*pi)/2 as a double-double, derived once from the constants above.
pub static HALF_LN_2PI: Lazy<Dd> = Lazy::new(|| Dd::TWO_PI.ln().mul_f64(0.5));
/// ln(pi).
pub static LN_PI: Lazy<Dd> = Lazy::new(|| Dd::PI.ln());

/// e^{i phase} with the phase carried as a double-double.
#[inline]
pub fn phase_exp(phase: Dd) -> num_complex::Complex64 {
    let r = phase.mod_2pi().to_f64();
    let (s, c) = r.sin_cos();
    num_complex::Complex64::new(c, s)
}

/// Shared incremental table of ln n as double-doubles.
///
/// Sequential summation loops index it in increasing n; beyond the cap the
/// caller should switch to the incremental recurrence (`ln1p_ratio`).
pub struct LnTable {
    table: Vec<Dd>,
}

pub const LN_TABLE_CAP: usize = 1 << 20;

impl LnTable {
    pub fn new() -> Self {
        LnTable {
            table: vec![Dd::ZERO, Dd::ZERO],
        }
    }

    /// ln n for n >= 1; grows the table up to the cap.
    pub fn ln(&mut self, n: usize) -> Dd {
        debug_assert!(n >= 1 && n < LN_TABLE_CAP);
        while self.table.len() <= n {
            let m = self.table.len();
            let prev = self.table[m - 1];
            let next = if m < 1024 {
                Dd::from_f64(m as f64).ln()
            } else {
                prev.add(Dd::ln1p_ratio(1.0, (m - 1) as f64))
            };
            self.table.push(next);
        }
        self.table[n]
    }
}

impl Default for LnTable {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_mul_roundtrip() {
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let three = a.mul_f64(3.0);
        assert!((three.to_f64() - 1.0).abs() < 1e-30);
        let b = a.add(a).add(a).add_f64(-1.0);
        assert!(b.to_f64().abs() < 1e-30);
    }

    #[test]
    fn ln_matches_f64_and_is_refined() {
        for &x in &[2.0_f64, 10.0, 1234.5678, 1e-3, 7.0e9] {
            let l = Dd::from_f64(x).ln();
            assert!(
                (l.hi - x.ln()).abs() <= x.ln().abs().max(1.0) * 1e-15,
                "ln({x})"
            );
        }
        // ln(2) against the stored constant
        let l2 = Dd::from_f64(2.0).ln();
        assert!(l2.sub(Dd::LN_2).to_f64().abs() < 1e-30);
        // exp/ln consistency through squaring: ln(x^2) = 2 ln x
        let x = Dd::from_f64(123.456);
        let d = x.mul(x).ln().sub(x.ln().mul_f64(2.0));
        assert!(d.to_f64().abs() < 1e-28);
    }

    #[test]
    fn ln1p_ratio_agrees_with_ln() {
        for n in [1000_u64, 5000, 999_983] {
            let direct = Dd::from_f64((n + 1) as f64)
                .ln()
                .sub(Dd::from_f64(n as f64).ln());
            let series = Dd::ln1p_ratio(1.0, n as f64);
            assert!(direct.sub(series).to_f64().abs() < 1e-28);
        }
    }

    #[test]
    fn ln_table_matches_direct() {
        let mut t = LnTable::new();
        for n in [2usize, 97, 4096, 100_000] {
            let got = t.ln(n);
            let want = Dd::from_f64(n as f64).ln();
            assert!(got.sub(want).to_f64().abs() < 1e-26, "n={n}");
        }
    }

    #[test]
    fn atan2_matches_std() {
        let pts = [
            (1.0, 1.0),
            (-1.0, 1.0),
            (1.0, -1.0),
            (-1.0, -1.0),
            (0.3, 2.0),
            (-5.0, 0.1),
            (1e-8, -1.0),
            (2.0, 1e-9),
        ];
        for &(y, x) in &pts {
            let got = Dd::atan2(Dd::from_f64(y), Dd::from_f64(x)).to_f64();
            let want = y.atan2(x);
            assert!((got - want).abs() < 4e-16, "atan2({y},{x}): {got} vs {want}");
        }
        // identity atan(w) + atan(1/w) = pi/2 at double-double accuracy
        let w = Dd::from_f64(0.37);
        let s = Dd::atan2(w, Dd::ONE).add(Dd::atan2(Dd::ONE, w));
        assert!(s.sub(Dd::PI_2).to_f64().abs() < 1e-30);
    }

    #[test]
    fn mod_2pi_reduces() {
        let big = Dd::from_f64(1.0e8).mul(Dd::from_f64(17.0).ln());
        let r = big.mod_2pi();
        assert!(r.hi.abs() <= Dd::PI.hi + 1e-10);
        // reduction is exact modulo 2 pi: adding back q*2pi recovers input
        let q = ((big.hi / Dd::TWO_PI.hi).round()) as i64;
        let back = r.add(Dd::TWO_PI.mul_f64(q as f64));
        // the comparison tolerates the while-loop adjustments
        assert!(back.sub(big).mod_2pi().to_f64().abs() < 1e-18);
    }

    #[test]
    fn sqrt_newton() {
        let a = Dd::from_f64(2.0);
        let r = a.sqrt();
        assert!(r.mul(r).sub(a).to_f64().abs() < 1e-30);
    }
}
