//! Adaptive Gauss–Kronrod quadrature and oscillatory Fourier integrals.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{QbmError, Result};
use super::series::wynn_epsilon;

// 15-point Kronrod nodes on [0, 1] (symmetric), with 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7–K15 integration of f over [a, b], first split at
/// the given interior breakpoints.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breakpoints: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let f: &dyn Fn(f64) -> f64 = &f;
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(f, w[0], w[1]);
            evaluations += 15;
            heap.push(Segment { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(QbmError::NonConvergence { what: "quadrature", detail: "non-finite integrand".into() });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if heap.len() >= opts.max_intervals {
            return Err(QbmError::NonConvergence {
                what: "quadrature",
                detail: format!("error estimate {err:e} after {} intervals (value {total:e})", heap.len()),
            });
        }
        let worst = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evaluations += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

/// ∫_a^∞ f via the map x = a + s/(1−s).
pub fn integrate_to_infinity(f: impl Fn(f64) -> f64, a: f64, breakpoints: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let to_s = |x: f64| (x - a) / (1.0 + x - a);
    let mapped: Vec<f64> = breakpoints.iter().filter(|&&x| x > a).map(|&x| to_s(x)).collect();
    integrate(
        |s| {
            let one_minus = 1.0 - s;
            let x = a + s / one_minus;
            let v = f(x);
            if v == 0.0 { 0.0 } else { v / (one_minus * one_minus) }
        },
        0.0,
        1.0,
        &mapped,
        opts,
    )
}

/// ∫_a^∞ f(ω) cos(ωt) dω for an f decaying at least as 1/ω.
///
/// For t > 0 the range beyond the last breakpoint is cut at the zeros of
/// cos(ωt); the resulting alternating partial sums are accelerated with the
/// Wynn epsilon algorithm. For t = 0 the plain semi-infinite map is used.
pub fn fourier_cos_integral(
    f: impl Fn(f64) -> f64,
    t: f64,
    a: f64,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    let t = t.abs();
    if t == 0.0 {
        return integrate_to_infinity(&f, a, breakpoints, opts).map(|r| r.value);
    }
    let g = |w: f64| f(w) * (w * t).cos();
    let half_period = std::f64::consts::PI / t;
    let last_bp = breakpoints.iter().copied().fold(a, f64::max);
    // first zero of cos(ωt) beyond the breakpoints
    let k0 = ((last_bp * t / std::f64::consts::PI) - 0.5).ceil().max(0.0);
    let mut start = (k0 + 0.5) * half_period;
    if start <= last_bp {
        start += half_period;
    }
    let mut head_cuts: Vec<f64> = breakpoints.to_vec();
    // keep oscillations resolved in the head
    let n_osc = ((start - a) / half_period).ceil() as usize;
    if n_osc > 1 {
        for k in 1..n_osc.min(2000) {
            head_cuts.push(a + (start - a) * k as f64 / n_osc as f64);
        }
    }
    let head = integrate(g, a, start, &head_cuts, opts)?.value;
    let cell_opts = QuadOptions { abs_tol: opts.abs_tol * 1e-2, ..opts };
    let mut partials = Vec::new();
    let mut running = head;
    let mut lo = start;
    let mut last_estimate = f64::NAN;
    for cell in 0..600 {
        let hi = lo + half_period;
        running += integrate(g, lo, hi, &[], cell_opts)?.value;
        partials.push(running);
        lo = hi;
        if cell >= 8 && cell % 2 == 0 {
            let window = &partials[partials.len().saturating_sub(24)..];
            let estimate = wynn_epsilon(window);
            if (estimate - last_estimate).abs() <= opts.abs_tol.max(opts.rel_tol * estimate.abs()) {
                return Ok(estimate);
            }
            last_estimate = estimate;
        }
    }
    Err(QbmError::NonConvergence {
        what: "oscillatory quadrature",
        detail: format!("Wynn extrapolation unsettled at t = {t}, last estimate {last_estimate:e}"),
    })
}
