//! Quadrature primitives: Gauss-Legendre panels, compensated summation,
//! and Cauchy-circle differentiation.

use crate::C64;
use once_cell::sync::Lazy;

/// Nodes/weights on [-1, 1] by Newton iteration on the Legendre recurrence.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x)
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0_f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| legendre_rule(16));
static GL32: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| legendre_rule(32));

pub fn gl16() -> (&'static [f64], &'static [f64]) {
    (&GL16.0, &GL16.1)
}

pub fn gl32() -> (&'static [f64], &'static [f64]) {
    (&GL32.0, &GL32.1)
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    legendre_rule(n)
}

/// Integrate f over [a, b] with one n-point Gauss-Legendre panel.
pub fn gl_panel<F: FnMut(f64) -> f64>(a: f64, b: f64, nodes: &[f64], weights: &[f64], mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

pub fn gl_panel_c64<F: FnMut(f64) -> C64>(
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
    mut f: F,
) -> C64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = C64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(c + h * x) * *w;
    }
    acc * h
}

/// Neumaier compensated accumulator; order-insensitive to ~1e-16 relative
/// but always driven in a fixed order for bit-identical output.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    s: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.comp += (self.s - t) + x;
        } else {
            self.comp += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn total(&self) -> f64 {
        self.s + self.comp
    }
}

/// k-th derivative of f at `center` by the trapezoid rule on a circle of
/// radius r (spectrally accurate for analytic f).
pub fn cauchy_derivative<F: FnMut(C64) -> C64>(
    mut f: F,
    center: C64,
    k: usize,
    radius: f64,
    n_nodes: usize,
) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n_nodes {
        let th = 2.0 * std::f64::consts::PI * (j as f64) / (n_nodes as f64);
        let rot = C64::new(th.cos(), th.sin());
        let z = center + rot * radius;
        // f(z) * e^{-i k theta}
        let kk = -(k as f64) * th;
        acc += f(z) * C64::new(kk.cos(), kk.sin());
    }
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    acc * fact / (n_nodes as f64) / radius.powi(k as i32)
}
