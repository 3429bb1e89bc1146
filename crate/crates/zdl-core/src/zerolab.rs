//! Zero location and counting: argument-principle winding numbers over
//! rectangles, sign-change scans of the real Z^(k), and Littlewood-type
//! weighted zero sums.

use crate::error::{Error, Result};
use crate::hardy::{eta_k, z_exact, zk_meromorphic};
use crate::mollifier::{DirichletPolynomial, WindowSpec};
use crate::precision::PrecisionConfig;
use crate::special::zeta_jet;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// A closed search rectangle in the s-plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RectBox {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl RectBox {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !(sigma_min < sigma_max && t_min < t_max) {
            return Err(Error::Validation("degenerate rectangle".into()));
        }
        Ok(RectBox {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
        })
    }

    fn contains(&self, s: C64) -> bool {
        s.re >= self.sigma_min && s.re <= self.sigma_max && s.im >= self.t_min && s.im <= self.t_max
    }

    fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    fn height(&self) -> f64 {
        self.t_max - self.t_min
    }
}

/// Which function's zeros are being studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroFunction {
    /// zeta^(k)
    ZetaK(usize),
    /// eta_k
    EtaK(usize),
    /// Z_k = omega eta_k / (2 i^k)
    ZK(usize),
}

impl ZeroFunction {
    pub fn eval(&self, s: C64, prec: &PrecisionConfig) -> Result<C64> {
        match *self {
            ZeroFunction::ZetaK(k) => Ok(zeta_jet(s, k, prec)?[k]),
            ZeroFunction::EtaK(k) => eta_k(s, k, prec),
            ZeroFunction::ZK(k) => zk_meromorphic(s, k, prec),
        }
    }

    pub fn label(&self) -> (&'static str, usize) {
        match *self {
            ZeroFunction::ZetaK(k) => ("zeta", k),
            ZeroFunction::EtaK(k) => ("eta", k),
            ZeroFunction::ZK(k) => ("Z", k),
        }
    }

    /// Rectangles must avoid the poles: s = 1 for every variant, and the
    /// low-t region where omega has zeros for the eta-based ones.
    pub fn validate_box(&self, b: &RectBox) -> Result<()> {
        let hits_pole =
            b.sigma_min <= 1.0 && b.sigma_max >= 1.0 && b.t_min <= 0.0 && b.t_max >= 0.0;
        if hits_pole {
            return Err(Error::Validation(
                "rectangle contains the pole at s = 1".into(),
            ));
        }
        match *self {
            ZeroFunction::ZetaK(_) => Ok(()),
            ZeroFunction::EtaK(_) | ZeroFunction::ZK(_) => {
                if b.t_min < 10.0 {
                    return Err(Error::Validation(
                        "eta-based rectangles need t_min >= 10 (omega zeros below)".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// A located zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub function: String,
    pub k: usize,
    pub sigma: f64,
    pub t: f64,
    pub multiplicity: u32,
    pub residual: f64,
}

impl ZeroRecord {
    pub const CSV_HEADER: &'static str = "function,k,sigma,t,multiplicity,residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12e},{:.12e},{},{:.3e}",
            self.function, self.k, self.sigma, self.t, self.multiplicity, self.residual
        )
    }
}

const MAX_EDGE_SAMPLES: usize = 1 << 15;

/// Walk one straight edge accumulating the argument increment, refining
/// until every step turns by less than pi/2.
fn edge_arg_sweep<F: FnMut(C64) -> Result<C64>>(
    f: &mut F,
    from: C64,
    to: C64,
    scale_floor: f64,
) -> Result<f64> {
    // initial sampling fine enough that a full 2 pi turn cannot hide
    // between neighbors: the phase speed of the zeta-family functions is
    // O(log t) per unit in either direction
    let t_top = from.im.abs().max(to.im.abs()).max(8.0);
    let density = 1.5 * (t_top / TAU).ln().max(1.0) + 2.0;
    let n0 = ((to - from).norm() * density).ceil().max(3.0) as usize;
    let mut params: Vec<f64> = (0..=n0).map(|i| i as f64 / n0 as f64).collect();
    let mut vals = Vec::with_capacity(n0 + 1);
    for &pm in &params {
        let v = f(from + (to - from) * pm)?;
        if v.norm() < scale_floor {
            return Err(Error::NonConvergence("near-zero on boundary".into()));
        }
        vals.push(v);
    }
    loop {
        let mut insert: Vec<usize> = Vec::new();
        for i in 0..params.len() - 1 {
            let turn = (vals[i + 1] / vals[i]).arg().abs();
            if turn > PI / 2.0 {
                insert.push(i);
            }
        }
        if insert.is_empty() {
            break;
        }
        if params.len() + insert.len() > MAX_EDGE_SAMPLES {
            return Err(Error::NonConvergence(
                "argument walk refinement exhausted (zero on or near boundary?)".into(),
            ));
        }
        let mut new_params = Vec::with_capacity(params.len() + insert.len());
        let mut new_vals = Vec::with_capacity(params.len() + insert.len());
        let mut ins = insert.iter().peekable();
        for i in 0..params.len() {
            new_params.push(params[i]);
            new_vals.push(vals[i]);
            if ins.peek() == Some(&&i) {
                ins.next();
                let pm = 0.5 * (params[i] + params[i + 1]);
                let z = from + (to - from) * pm;
                let v = f(z)?;
                if v.norm() < scale_floor {
                    return Err(Error::NonConvergence("near-zero on boundary".into()));
                }
                new_params.push(pm);
                new_vals.push(v);
            }
        }
        params = new_params;
        vals = new_vals;
    }
    let mut total = 0.0;
    for i in 0..vals.len() - 1 {
        total += (vals[i + 1] / vals[i]).arg();
    }
    Ok(total)
}

/// Winding number of f around the rectangle boundary, with automatic
/// boundary perturbation (<= 1e-3) when a zero sits on or near an edge.
pub fn winding_count(f: &ZeroFunction, rect: &RectBox, prec: &PrecisionConfig) -> Result<i64> {
    f.validate_box(rect)?;
    winding_count_fn(&mut |s| f.eval(s, prec), rect)
}

/// Same, for an arbitrary analytic function on the closed box.
pub fn winding_count_fn<F: FnMut(C64) -> Result<C64>>(f: &mut F, rect: &RectBox) -> Result<i64> {
    let mut grow = 0.0f64;
    for attempt in 0..4 {
        let b = RectBox {
            sigma_min: rect.sigma_min - grow,
            sigma_max: rect.sigma_max + grow,
            t_min: rect.t_min - grow,
            t_max: rect.t_max + grow,
        };
        match winding_once(f, &b) {
            Ok(w) => return Ok(w),
            Err(Error::NonConvergence(_)) if attempt < 3 => {
                grow = 1e-3 * (attempt as f64 + 1.0) / 3.0;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn winding_once<F: FnMut(C64) -> Result<C64>>(f: &mut F, b: &RectBox) -> Result<i64> {
    let corners = [
        C64::new(b.sigma_min, b.t_min),
        C64::new(b.sigma_max, b.t_min),
        C64::new(b.sigma_max, b.t_max),
        C64::new(b.sigma_min, b.t_max),
    ];
    // floor below which a boundary value counts as sitting on a zero
    let scale_floor = 1e-12;
    let mut total = 0.0;
    for i in 0..4 {
        total += edge_arg_sweep(f, corners[i], corners[(i + 1) % 4], scale_floor)?;
    }
    let w = total / TAU;
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(Error::NonConvergence(format!(
            "winding {w:.3} is not near an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Zeros of the real function Z^(k) on [t_min, t_max] by sign-change scan
/// plus bisection; even-order zeros are caught as deep minima of |Z^(k)|.
pub fn find_zk_zeros(
    k: usize,
    t_min: f64,
    t_max: f64,
    prec: &PrecisionConfig,
) -> Result<Vec<ZeroRecord>> {
    if t_min < 2.0 || t_max <= t_min {
        return Err(Error::Validation(
            "find_zk_zeros needs 2 <= t_min < t_max".into(),
        ));
    }
    let zf = |t: f64| -> Result<f64> { Ok(z_exact(t, k, prec)?.value) };
    let mut out = Vec::new();
    let mut t = t_min;
    let mut prev_t = t;
    let mut prev_v = zf(t)?;
    let mut history: Vec<(f64, f64)> = vec![(prev_t, prev_v)];
    while t < t_max {
        let log_tau = 0.5 * (t.max(7.0) / TAU).ln();
        let step = (PI / (4.0 * log_tau.max(0.2))).min(t_max - t).max(1e-4);
        t += step;
        let v = zf(t)?;
        if prev_v == 0.0 {
            out.push(make_record(k, prev_t, 1, 0.0));
        } else if prev_v * v < 0.0 {
            let (mut a, mut b) = (prev_t, t);
            let mut fa = prev_v;
            while b - a > 1e-9 {
                let m = 0.5 * (a + b);
                let fm = zf(m)?;
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            let root = 0.5 * (a + b);
            out.push(make_record(k, root, 1, zf(root)?.abs()));
        }
        history.push((t, v));
        prev_t = t;
        prev_v = v;
    }
    // even-order zeros: interior minima of |Z| below tolerance without a
    // sign change
    for w in history.windows(3) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        let (t2, v2) = w[2];
        if v0.signum() == v1.signum()
            && v1.signum() == v2.signum()
            && v1.abs() < v0.abs()
            && v1.abs() < v2.abs()
            && v1.abs() < 1e-4
        {
            // golden-section refinement of the |Z| dip
            let (mut a, mut b) = (t0, t2);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let mut x1 = b - phi * (b - a);
            let mut x2 = a + phi * (b - a);
            let mut f1 = zf(x1)?.abs();
            let mut f2 = zf(x2)?.abs();
            for _ in 0..60 {
                if f1 < f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - phi * (b - a);
                    f1 = zf(x1)?.abs();
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + phi * (b - a);
                    f2 = zf(x2)?.abs();
                }
            }
            let tm = 0.5 * (a + b);
            let res = zf(tm)?.abs();
            if res < 1e-6 && (t1 - tm).abs() < (t2 - t0) {
                out.push(make_record(k, tm, 2, res));
            }
        }
    }
    out.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    out.dedup_by(|a, b| (a.t - b.t).abs() < 1e-6);
    Ok(out)
}

fn make_record(k: usize, t: f64, mult: u32, residual: f64) -> ZeroRecord {
    ZeroRecord {
        function: "Z".into(),
        k,
        sigma: 0.5,
        t,
        multiplicity: mult,
        residual,
    }
}

/// Zeros of one of the named functions inside a rectangle.
pub fn enumerate_zeros(
    f: &ZeroFunction,
    rect: &RectBox,
    resolution: f64,
    prec: &PrecisionConfig,
) -> Result<Vec<ZeroRecord>> {
    f.validate_box(rect)?;
    let mut g = |s: C64| f.eval(s, prec);
    let zeros = enumerate_zeros_fn(&mut g, rect, resolution)?;
    let (name, k) = f.label();
    zeros
        .into_iter()
        .map(|(z, mult)| {
            Ok(ZeroRecord {
                function: name.into(),
                k,
                sigma: z.re,
                t: z.im,
                multiplicity: mult,
                residual: f.eval(z, prec)?.norm(),
            })
        })
        .collect()
}

/// Zeros of an analytic function inside a rectangle by recursive winding
/// subdivision, polished by the secant iteration once isolated.  Each
/// split is reconciled against the parent count.
pub fn enumerate_zeros_fn<F: FnMut(C64) -> Result<C64>>(
    f: &mut F,
    rect: &RectBox,
    resolution: f64,
) -> Result<Vec<(C64, u32)>> {
    let total = winding_count_fn(f, rect)?;
    if total < 0 {
        return Err(Error::Validation(
            "negative winding: a pole sits inside the rectangle".into(),
        ));
    }
    let mut out = Vec::new();
    subdivide(f, rect, total, resolution, &mut out, 0)?;
    Ok(out)
}

fn subdivide<F: FnMut(C64) -> Result<C64>>(
    f: &mut F,
    rect: &RectBox,
    count: i64,
    resolution: f64,
    out: &mut Vec<(C64, u32)>,
    depth: usize,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if depth > 64 {
        return Err(Error::EnumerationIncomplete(
            "subdivision depth exhausted".into(),
        ));
    }
    if count == 1 && rect.width().max(rect.height()) < 0.05 {
        let center = C64::new(
            0.5 * (rect.sigma_min + rect.sigma_max),
            0.5 * (rect.t_min + rect.t_max),
        );
        if let Some(root) = secant_polish(f, center, rect)? {
            out.push((root, 1));
            return Ok(());
        }
    }
    if rect.width().max(rect.height()) < resolution {
        let center = C64::new(
            0.5 * (rect.sigma_min + rect.sigma_max),
            0.5 * (rect.t_min + rect.t_max),
        );
        out.push((center, count as u32));
        return Ok(());
    }
    // split the longer side; nudge the cut if a zero sits on it
    for attempt in 0..4 {
        let frac = 0.5 + [0.0, 0.0173, -0.0231, 0.0311][attempt];
        let (b1, b2) = if rect.height() >= rect.width() {
            let cut = rect.t_min + frac * rect.height();
            (
                RectBox { t_max: cut, ..*rect },
                RectBox { t_min: cut, ..*rect },
            )
        } else {
            let cut = rect.sigma_min + frac * rect.width();
            (
                RectBox {
                    sigma_max: cut,
                    ..*rect
                },
                RectBox {
                    sigma_min: cut,
                    ..*rect
                },
            )
        };
        let w1 = match winding_count_fn(f, &b1) {
            Ok(w) => w,
            Err(Error::NonConvergence(_)) => continue,
            Err(e) => return Err(e),
        };
        let w2 = match winding_count_fn(f, &b2) {
            Ok(w) => w,
            Err(Error::NonConvergence(_)) => continue,
            Err(e) => return Err(e),
        };
        if w1 + w2 != count {
            if attempt == 3 {
                return Err(Error::EnumerationIncomplete(format!(
                    "children windings {w1}+{w2} != parent {count}"
                )));
            }
            continue;
        }
        subdivide(f, &b1, w1, resolution, out, depth + 1)?;
        subdivide(f, &b2, w2, resolution, out, depth + 1)?;
        return Ok(());
    }
    Err(Error::EnumerationIncomplete(
        "could not find a clean subdivision cut".into(),
    ))
}

fn secant_polish<F: FnMut(C64) -> Result<C64>>(
    f: &mut F,
    start: C64,
    rect: &RectBox,
) -> Result<Option<C64>> {
    let mut z0 = start;
    let mut z1 = start + C64::new(1e-4, 1e-4);
    let mut f0 = f(z0)?;
    let mut f1 = f(z1)?;
    for _ in 0..60 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            return Ok(None);
        }
        let z2 = z1 - f1 * (z1 - z0) / denom;
        let pad = RectBox {
            sigma_min: rect.sigma_min - 0.05,
            sigma_max: rect.sigma_max + 0.05,
            t_min: rect.t_min - 0.05,
            t_max: rect.t_max + 0.05,
        };
        if !pad.contains(z2) {
            return Ok(None);
        }
        if (z2 - z1).norm() < 1e-11 {
            let fv = f(z2)?;
            if fv.norm() < 1e-6 && rect.contains(z2) {
                return Ok(Some(z2));
            }
            return Ok(None);
        }
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f(z1)?;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Right,
    Left,
}

#[derive(Debug, Clone)]
pub struct LittlewoodReport {
    pub weighted_sum: f64,
    pub zero_count: u64,
    pub zeros: Vec<ZeroRecord>,
}

/// Sum over located zeros of (beta - 1/2) (right of the critical line) or
/// (1/2 - beta) (left), for zeros with T <= t <= T+H, found by recursive
/// winding subdivision down to isolating boxes of width 1e-4.
///
/// `sigma_extent` is the outer edge m of the search strip.  An optional
/// Dirichlet polynomial multiplies the function (its zeros then count).
pub fn littlewood_weighted_sum(
    f: &ZeroFunction,
    window: &WindowSpec,
    side: Side,
    poly: Option<&DirichletPolynomial>,
    sigma_extent: f64,
    prec: &PrecisionConfig,
) -> Result<LittlewoodReport> {
    if window.h > 1.0e3 + 1e-9 {
        return Err(Error::ResourceBudget(
            "zero enumeration windows are capped at H = 1e3".into(),
        ));
    }
    if !(2.0..=10.0).contains(&sigma_extent) {
        return Err(Error::Validation(
            "sigma_extent m must lie in [2, 10]".into(),
        ));
    }
    let off = 1e-4;
    let rect = match side {
        Side::Right => RectBox::new(0.5 + off, sigma_extent, window.t_lo, window.t_hi())?,
        Side::Left => RectBox::new(1.0 - sigma_extent, 0.5 - off, window.t_lo, window.t_hi())?,
    };
    f.validate_box(&rect)?;
    let mut g = |s: C64| -> Result<C64> {
        let base = f.eval(s, prec)?;
        Ok(match poly {
            Some(p) => base * p.evaluate_at(s),
            None => base,
        })
    };
    let zeros = enumerate_zeros_fn(&mut g, &rect, 1e-4)?;
    let (name, k) = f.label();
    let mut sum = 0.0;
    let mut count = 0u64;
    let mut recs = Vec::new();
    for (z, mult) in zeros {
        let weight = match side {
            Side::Right => z.re - 0.5,
            Side::Left => 0.5 - z.re,
        };
        sum += weight * mult as f64;
        count += mult as u64;
        recs.push(ZeroRecord {
            function: name.into(),
            k,
            sigma: z.re,
            t: z.im,
            multiplicity: mult,
            residual: g(z)?.norm(),
        });
    }
    Ok(LittlewoodReport {
        weighted_sum: sum,
        zero_count: count,
        zeros: recs,
    })
}

/// int_T^{T+H} log |f(sigma0 + it) Phi(1/2 + it)| dt by adaptive panels;
/// the integrable log singularities are handled by geometric refinement
/// down to a 1e-6 width floor.
pub fn log_modulus_line_integral(
    f: &ZeroFunction,
    sigma0: f64,
    window: &WindowSpec,
    poly: Option<&DirichletPolynomial>,
    prec: &PrecisionConfig,
) -> Result<f64> {
    let (nodes16, w16) = crate::quad::gl16();
    let (nodes8, w8) = crate::quad::gauss_legendre(8);
    let mut g = |t: f64| -> Result<f64> {
        let base = f.eval(C64::new(sigma0, t), prec)?;
        let m = match poly {
            Some(p) => (base * p.evaluate(t, prec)).norm(),
            None => base.norm(),
        };
        Ok(m.max(1e-300).ln())
    };
    fn adapt<G: FnMut(f64) -> Result<f64>>(
        g: &mut G,
        a: f64,
        b: f64,
        nodes16: &[f64],
        w16: &[f64],
        nodes8: &[f64],
        w8: &[f64],
        depth: usize,
    ) -> Result<f64> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut v16 = 0.0;
        for (x, w) in nodes16.iter().zip(w16) {
            v16 += w * g(c + h * x)?;
        }
        v16 *= h;
        let mut v8 = 0.0;
        for (x, w) in nodes8.iter().zip(w8) {
            v8 += w * g(c + h * x)?;
        }
        v8 *= h;
        if (v16 - v8).abs() < 1e-7 * (1.0 + v16.abs()) || b - a < 1e-6 || depth > 48 {
            return Ok(v16);
        }
        Ok(adapt(g, a, c, nodes16, w16, nodes8, w8, depth + 1)?
            + adapt(g, c, b, nodes16, w16, nodes8, w8, depth + 1)?)
    }
    let base_width = (0.5 / (window.t_lo / TAU).ln()).min(window.h / 4.0);
    let n = (window.h / base_width).ceil() as usize;
    let width = window.h / n as f64;
    let mut total = crate::quad::NeumaierSum::new();
    for i in 0..n {
        let a = window.t_lo + width * i as f64;
        total.add(adapt(&mut g, a, a + width, nodes16, w16, &nodes8, &w8, 0)?);
    }
    Ok(total.total())
}
