//! Truncated Taylor ("jet") arithmetic over complex doubles.
//!
//! A jet stores f(s0+eps) as coefficients c[m] = f^(m)(s0)/m! up to a
//! fixed order.  Evaluating a formula in jets yields all derivatives of
//! the formula in one pass, which is how the zeta, omega and lambda_k
//! derivatives are produced without finite differences.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub c: Vec<C64>,
}

impl Jet {
    pub fn constant(v: C64, order: usize) -> Jet {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity jet s0 + eps.
    pub fn variable(v: C64, order: usize) -> Jet {
        let mut j = Jet::constant(v, order);
        if order >= 1 {
            j.c[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// m-th derivative encoded by this jet.
    pub fn derivative(&self, m: usize) -> C64 {
        let mut fact = 1.0;
        for i in 2..=m {
            fact *= i as f64;
        }
        self.c[m] * fact
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = Vec::with_capacity(n);
        for m in 0..n {
            c.push(self.c[m] + o.c[m]);
        }
        Jet { c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = Vec::with_capacity(n);
        for m in 0..n {
            c.push(self.c[m] - o.c[m]);
        }
        Jet { c }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            c: self.c.iter().map(|z| -z).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Jet {
        Jet {
            c: self.c.iter().map(|z| z * k).collect(),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[0] = self.c[0] / o.c[0];
        for m in 1..n {
            let mut acc = self.c[m];
            for k in 1..=m {
                acc -= o.c[k] * c[m - k];
            }
            c[m] = acc / o.c[0];
        }
        Jet { c }
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(C64::new(1.0, 0.0), self.order()).div(self)
    }

    /// exp of the jet; the order-0 exponential may be supplied separately
    /// (used when the constant phase was reduced in double-double).
    pub fn exp_with_base(&self, base0: C64) -> Jet {
        let n = self.c.len();
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[0] = base0;
        for m in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.c[k] * c[m - k] * (k as f64);
            }
            c[m] = acc / (m as f64);
        }
        Jet { c }
    }

    pub fn exp(&self) -> Jet {
        self.exp_with_base(self.c[0].exp())
    }

    /// Jet of the derivative; one order shorter.
    pub fn deriv(&self) -> Jet {
        let n = self.c.len();
        let mut c = Vec::with_capacity(n.saturating_sub(1).max(1));
        if n == 1 {
            c.push(C64::new(0.0, 0.0));
        } else {
            for m in 1..n {
                c.push(self.c[m] * (m as f64));
            }
        }
        Jet { c }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }
}

/// Jet of log(w0 + eps) for w0 away from the branch cut.
pub fn log_jet(w0: C64, order: usize) -> Jet {
    let mut c = Vec::with_capacity(order + 1);
    c.push(w0.ln());
    let inv = 1.0 / w0;
    let mut p = C64::new(1.0, 0.0);
    for m in 1..=order {
        p *= inv;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        c.push(p * sign / (m as f64));
    }
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mul_div_inverse() {
        let a = Jet {
            c: vec![
                C64::new(2.0, 1.0),
                C64::new(-0.5, 0.3),
                C64::new(0.1, 0.0),
                C64::new(0.0, -0.2),
            ],
        };
        let b = a.recip();
        let one = a.mul(&b);
        assert_relative_eq!(one.c[0].re, 1.0, epsilon = 1e-14);
        for m in 1..=3 {
            assert!(one.c[m].norm() < 1e-14);
        }
    }

    #[test]
    fn exp_of_log_is_identity() {
        let w = C64::new(3.0, 4.0);
        let lj = log_jet(w, 5);
        let back = lj.exp();
        // exp(log(w+eps)) = w + eps
        assert_relative_eq!(back.c[0].re, 3.0, epsilon = 1e-13);
        assert_relative_eq!(back.c[0].im, 4.0, epsilon = 1e-13);
        assert_relative_eq!(back.c[1].re, 1.0, epsilon = 1e-13);
        for m in 2..=5 {
            assert!(back.c[m].norm() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn derivative_extraction() {
        // f(s) = s^3 at s0=2: f''(2) = 12
        let s = Jet::variable(C64::new(2.0, 0.0), 3);
        let f = s.mul(&s).mul(&s);
        assert_relative_eq!(f.derivative(2).re, 12.0, epsilon = 1e-12);
        assert_relative_eq!(f.derivative(3).re, 6.0, epsilon = 1e-12);
    }
}
