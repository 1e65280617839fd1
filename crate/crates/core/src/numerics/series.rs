//! Series summation with algebraic tails, Richardson extrapolation and the
//! Wynn epsilon accelerator.

use num_complex::Complex64;

use crate::error::{QbmError, Result};
use crate::numerics::quad::{integrate_to_infinity, QuadOptions};

/// Relative disagreement between the tail-corrected sums at n_max and
/// n_max/2 above which `tail_corrected_sum` reports non-convergence.
pub const TAIL_CONSISTENCY_TOL: f64 = 1e-6;

const MIN_TERMS: u64 = 16;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn two_sum(s: f64, x: f64, comp: &mut f64) -> f64 {
    let t = s + x;
    if s.abs() >= x.abs() {
        *comp += (s - t) + x;
    } else {
        *comp += (x - t) + s;
    }
    t
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k+a)^{-s} for s > 1, a > 0: direct terms
/// until a ≥ 40, then Euler–Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let mut head = 0.0;
    let mut a = a;
    while a < 40.0 {
        head += a.powf(-s);
        a += 1.0;
    }
    head + hurwitz_tail(s, a)
}

fn hurwitz_tail(s: f64, a: f64) -> f64 {
    let a_s = a.powf(-s);
    let s1 = s + 1.0;
    let s2 = s + 2.0;
    let s3 = s + 3.0;
    let s4 = s + 4.0;
    a * a_s / (s - 1.0) + 0.5 * a_s + s * a_s / (12.0 * a)
        - s * s1 * s2 * a_s / (720.0 * a.powi(3))
        + s * s1 * s2 * s3 * s4 * a_s / (30240.0 * a.powi(5))
}

/// Fits term(n) ≈ c n^-p + d n^-(p+1) + e n^-(p+2) through three late terms
/// and returns the summed model over n > n_max.
fn algebraic_tail(term: &dyn Fn(u64) -> Complex64, p: u32, n_max: u64) -> Complex64 {
    let nodes = [n_max, (3 * n_max) / 4, n_max / 2];
    let xs: Vec<f64> = nodes.iter().map(|&n| 1.0 / n as f64).collect();
    let ys: Vec<Complex64> = nodes.iter().map(|&n| term(n) * (n as f64).powi(p as i32)).collect();
    // quadratic through (x_i, y_i) in monomial form c + d x + e x²
    let (x0, x1, x2) = (xs[0], xs[1], xs[2]);
    let l0 = ys[0] / ((x0 - x1) * (x0 - x2));
    let l1 = ys[1] / ((x1 - x0) * (x1 - x2));
    let l2 = ys[2] / ((x2 - x0) * (x2 - x1));
    let e = l0 + l1 + l2;
    let d = -(l0 * (x1 + x2) + l1 * (x0 + x2) + l2 * (x0 + x1));
    let c = l0 * x1 * x2 + l1 * x0 * x2 + l2 * x0 * x1;
    let a = n_max as f64 + 1.0;
    let p = p as f64;
    c * hurwitz_zeta(p, a) + d * hurwitz_zeta(p + 1.0, a) + e * hurwitz_zeta(p + 2.0, a)
}

/// Incrementally extendable partial sum Σ_{n=1}^{N} term(n).
struct PartialSum<'a> {
    term: &'a dyn Fn(u64) -> Complex64,
    upto: u64,
    acc: Compensated,
    abs_acc: f64,
}

impl<'a> PartialSum<'a> {
    fn new(term: &'a dyn Fn(u64) -> Complex64) -> Self {
        Self { term, upto: 0, acc: Compensated::default(), abs_acc: 0.0 }
    }

    fn extend_to(&mut self, n: u64) -> Complex64 {
        while self.upto < n {
            self.upto += 1;
            let t = (self.term)(self.upto);
            self.abs_acc += t.norm();
            self.acc.add(t);
        }
        self.acc.value()
    }
}

/// Σ_{n≥1} term(n) for complex terms decaying as c/n^p.
pub fn tail_corrected_sum_complex(
    term: impl Fn(u64) -> Complex64,
    tail_exponent: u32,
    n_max: u64,
) -> Result<Complex64> {
    check_args(tail_exponent, n_max)?;
    let term_ref: &dyn Fn(u64) -> Complex64 = &term;
    let mut partial = PartialSum::new(term_ref);
    let half = n_max / 2;
    let s_half = partial.extend_to(half) + algebraic_tail(term_ref, tail_exponent, half);
    let s_full = partial.extend_to(n_max) + algebraic_tail(term_ref, tail_exponent, n_max);
    let scale = partial.abs_acc.max(f64::MIN_POSITIVE);
    let gap = (s_full - s_half).norm();
    if !s_full.re.is_finite() || !s_full.im.is_finite() || gap > TAIL_CONSISTENCY_TOL * scale {
        return Err(QbmError::NonConvergence {
            what: "tail-corrected sum",
            detail: format!("estimates at n = {half} and n = {n_max} differ by {gap:e} (scale {scale:e})"),
        });
    }
    Ok(s_full)
}

/// Σ_{n≥1} term(n) ≈ partial sum to n_max plus a fitted algebraic tail
/// c ζ(p, n_max+1) + …, for terms behaving as c/n^p with p = tail_exponent.
pub fn tail_corrected_sum(term: impl Fn(u64) -> f64, tail_exponent: u32, n_max: u64) -> Result<f64> {
    tail_corrected_sum_complex(|n| Complex64::new(term(n), 0.0), tail_exponent, n_max).map(|z| z.re)
}

fn check_args(tail_exponent: u32, n_max: u64) -> Result<()> {
    if tail_exponent < 2 {
        return Err(QbmError::Domain("tail exponent must be >= 2".into()));
    }
    if n_max < MIN_TERMS {
        return Err(QbmError::Domain(format!("n_max must be >= {MIN_TERMS}")));
    }
    Ok(())
}

/// Controls for [`adaptive_tail_sum_complex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSum {
    pub rel_tol: f64,
    pub n_start: u64,
    pub n_cap: u64,
}

impl Default for AdaptiveSum {
    fn default() -> Self {
        Self { rel_tol: 1e-10, n_start: 256, n_cap: 1 << 24 }
    }
}

/// Result of an adaptive sum: the value and the truncation index used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumOutcome<T> {
    pub value: T,
    pub n_max: u64,
}

/// Doubles n_max until successive tail-corrected sums agree within
/// `rel_tol` relative to Σ|term|.
pub fn adaptive_tail_sum_complex(
    term: impl Fn(u64) -> Complex64,
    tail_exponent: u32,
    opts: AdaptiveSum,
) -> Result<SumOutcome<Complex64>> {
    check_args(tail_exponent, opts.n_start)?;
    let term_ref: &dyn Fn(u64) -> Complex64 = &term;
    let mut partial = PartialSum::new(term_ref);
    let mut n = opts.n_start;
    let mut prev = partial.extend_to(n) + algebraic_tail(term_ref, tail_exponent, n);
    while n < opts.n_cap {
        n *= 2;
        let next = partial.extend_to(n) + algebraic_tail(term_ref, tail_exponent, n);
        let scale = partial.abs_acc.max(f64::MIN_POSITIVE);
        if (next - prev).norm() <= opts.rel_tol * scale {
            return Ok(SumOutcome { value: next, n_max: n });
        }
        prev = next;
    }
    Err(QbmError::NonConvergence {
        what: "adaptive tail sum",
        detail: format!("no agreement to {:e} up to n = {}", opts.rel_tol, opts.n_cap),
    })
}

pub fn adaptive_tail_sum(
    term: impl Fn(u64) -> f64,
    tail_exponent: u32,
    opts: AdaptiveSum,
) -> Result<SumOutcome<f64>> {
    adaptive_tail_sum_complex(|n| Complex64::new(term(n), 0.0), tail_exponent, opts)
        .map(|o| SumOutcome { value: o.value.re, n_max: o.n_max })
}

/// Σ_{n≥1} f(n) for f smooth in a real argument: n_direct explicit terms,
/// then the midpoint Euler–Maclaurin remainder
/// ∫_{N+½}^∞ f dx + f′(N+½)/24 − 7f‴(N+½)/5760. `scales` are values of n near which f
/// changes character; they become quadrature breakpoints.
pub fn smooth_series_sum(f: impl Fn(f64) -> f64, n_direct: u64, scales: &[f64]) -> Result<f64> {
    if n_direct < MIN_TERMS {
        return Err(QbmError::Domain(format!("need at least {MIN_TERMS} explicit terms, got {n_direct}")));
    }
    let mut acc = Compensated::default();
    for n in 1..=n_direct {
        acc.add(Complex64::new(f(n as f64), 0.0));
    }
    let a = n_direct as f64 + 0.5;
    let mut breaks: Vec<f64> = scales.iter().copied().filter(|x| x.is_finite() && *x > a).collect();
    breaks.sort_by(f64::total_cmp);
    let opts = QuadOptions::with_tol(0.0, 1e-12);
    let tail = integrate_to_infinity(&f, a, &breaks, opts)?.value;
    let (f1, f2, fm1, fm2) = (f(a + 1.0), f(a + 2.0), f(a - 1.0), f(a - 2.0));
    let d1 = (8.0 * (f1 - fm1) - (f2 - fm2)) / 12.0;
    let d3 = (f2 - 2.0 * f1 + 2.0 * fm1 - fm2) / 2.0;
    Ok(acc.value().re + tail + d1 / 24.0 - 7.0 * d3 / 5760.0)
}

/// Richardson extrapolation to h → 0 of samples f(h_k) taken on a ladder
/// h_k = h_0 / 2^k, assuming f(h) = f(0) + a h + b h² + ….
///
/// Returns the extrapolated value and the change produced by the final
/// table column as an error estimate.
pub fn richardson(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(QbmError::Extrapolation("need at least two ladder values".into()));
    }
    let mut table = values.to_vec();
    let mut last_change = f64::INFINITY;
    for order in 1..values.len() {
        let factor = 2f64.powi(order as i32);
        let mut next = Vec::with_capacity(table.len() - 1);
        for w in table.windows(2) {
            next.push((factor * w[1] - w[0]) / (factor - 1.0));
        }
        last_change = (next[next.len() - 1] - table[table.len() - 1]).abs();
        table = next;
    }
    Ok((table[0], last_change))
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns
/// the best accelerated estimate from the highest complete even column.
pub fn wynn_epsilon(partials: &[f64]) -> f64 {
    let n = partials.len();
    if n < 3 {
        return *partials.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partials.to_vec();
    let mut best = partials[n - 1];
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let v = if diff == 0.0 { f64::INFINITY } else { prev[i + 1] + 1.0 / diff };
            next.push(v);
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if k % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
        if cur.len() < 2 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_with_tail() {
        let s = tail_corrected_sum(|n| 1.0 / (n as f64).powi(2), 2, 10_000).unwrap();
        assert!((s - PI * PI / 6.0).abs() < 1e-10 * PI * PI / 6.0);
    }

    #[test]
    fn zero_terms_sum_to_zero() {
        assert_eq!(tail_corrected_sum(|_| 0.0, 2, 64).unwrap(), 0.0);
    }

    #[test]
    fn telescoping_sum() {
        let s = tail_corrected_sum(|n| 1.0 / ((n * n + n) as f64), 2, 10_000).unwrap();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn slowly_decaying_terms_are_rejected() {
        let r = tail_corrected_sum(|n| 1.0 / (n as f64).sqrt().powi(3), 2, 4096);
        assert!(matches!(r, Err(QbmError::NonConvergence { .. })));
    }

    #[test]
    fn argument_checks() {
        assert!(tail_corrected_sum(|_| 1.0, 1, 100).is_err());
        assert!(tail_corrected_sum(|_| 1.0, 2, 4).is_err());
    }

    #[test]
    fn hurwitz_against_direct() {
        // reference values from mpmath zeta(s, a) at 30 digits
        for (s, a, expect) in [
            (2.0, 8.0, 0.13313701469403142513),
            (3.0, 11.0, 0.0045249174854010337311),
            (4.0, 100.0, 3.3836666500022217224e-7),
        ] {
            assert!((hurwitz_zeta(s, a) - expect).abs() < 1e-14 * expect, "s={s} a={a}");
        }
    }

    #[test]
    fn adaptive_sum_reports_index() {
        let out = adaptive_tail_sum(|n| 1.0 / ((n as f64) + 50.0).powi(2), 2, AdaptiveSum::default()).unwrap();
        // Σ_{n≥1} 1/(n+50)² = ψ′(51)
        let expect = crate::numerics::trigamma(Complex64::new(51.0, 0.0)).unwrap().re;
        assert!((out.value - expect).abs() < 1e-11);
        assert!(out.n_max >= 512);
    }

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let f = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h + 0.5 * h.powi(3);
        let vals: Vec<f64> = (0..5).map(|k| f(0.1 / 2f64.powi(k))).collect();
        let (v, _) = richardson(&vals).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 − 1/2 + 1/3 − …
        let mut partials = Vec::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            partials.push(s);
        }
        assert!((wynn_epsilon(&partials) - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn smooth_sum_matches_zeta_and_adaptive_route() {
        let z2 = smooth_series_sum(|x| 1.0 / (x * x), 64, &[]).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() < 1e-12);
        let f = |x: f64| 1.0 / (1.0 + x * x + 3.0 * x * 50.0 / (x + 50.0));
        let a = smooth_series_sum(f, 128, &[50.0]).unwrap();
        let b = adaptive_tail_sum(|n| f(n as f64), 2, AdaptiveSum::default()).unwrap().value;
        assert!((a - b).abs() < 1e-10 * b, "{a} {b}");
        assert!(smooth_series_sum(f, 4, &[]).is_err());
    }
}
