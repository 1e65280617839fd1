//! Partition function of the damped oscillator, its ground-state energy and
//! the density of states obtained by inverting Z(β).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::damping::DampingModel;
use crate::error::{QbmError, Result};
use crate::numerics::{bisect, integrate_to_infinity, ln_gamma, richardson, smooth_series_sum, QuadOptions};
use crate::oscillator::{OscillatorSpec, DEFAULT_DIRECT_TERMS};
use crate::units::ThermalParams;

/// Relative step of the ω₀ finite difference in [`q2_from_partition`].
pub const Q2_FD_STEP: f64 = 1e-5;

fn require_cutoff(damp: &DampingModel) -> Result<()> {
    if damp.is_strictly_ohmic() {
        return Err(QbmError::DivergentProduct(
            "the partition function diverges for ohmic friction; use a Drude cutoff or an explicit bath".into(),
        ));
    }
    Ok(())
}

/// ν³ + ω_D ν² + (ω₀² + γω_D) ν + ω₀²ω_D = Π_k (ν + λ_k) for Drude friction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeFactorization {
    pub lambdas: [Complex64; 3],
    pub cutoff: f64,
}

impl DrudeFactorization {
    pub fn new(omega0: f64, gamma: f64, cutoff: f64) -> Result<Self> {
        let (c2, c1, c0) = (cutoff, omega0 * omega0 + gamma * cutoff, omega0 * omega0 * cutoff);
        let p = |x: f64| ((x + c2) * x + c1) * x + c0;
        // P(0) > 0 and P(−ω_D − γ − 1) < 0 bracket a real root
        let lo = -(cutoff + gamma + omega0 + 1.0);
        let r = bisect(p, lo, 0.0)?;
        let (b, c) = (c2 + r, -c0 / r);
        let disc = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
        let roots = [Complex64::new(r, 0.0), (-b + disc) / 2.0, (-b - disc) / 2.0];
        let pc = |z: Complex64| ((z + c2) * z + c1) * z + c0;
        let dpc = |z: Complex64| (3.0 * z + 2.0 * c2) * z + c1;
        let lambdas = roots.map(|mut z| {
            for _ in 0..3 {
                let d = dpc(z);
                if d.norm() > 0.0 {
                    z -= pc(z) / d;
                }
            }
            -z
        });
        Ok(Self { lambdas, cutoff })
    }

    fn from_model(spec: &OscillatorSpec, damp: &DampingModel) -> Result<Option<Self>> {
        match damp {
            DampingModel::Drude { gamma, cutoff } if *gamma > 0.0 => Self::new(spec.omega0, *gamma, *cutoff).map(Some),
            _ => Ok(None),
        }
    }

    /// ln Π_{n≥1} ν_n²(ν_n + ω_D)/Π_k(ν_n + λ_k) with ν_n = 2πn/ħβ.
    fn ln_product(&self, hbar_beta: Complex64) -> Result<Complex64> {
        let s = hbar_beta / (2.0 * PI);
        let mut acc = -ln_gamma(1.0 + self.cutoff * s)?;
        for l in self.lambdas {
            acc += ln_gamma(1.0 + l * s)?;
        }
        Ok(acc)
    }

    /// ε₀ = (ħ/2π)[ω_D ln ω_D − Σ λ_k ln λ_k].
    pub fn ground_state_energy(&self, hbar: f64) -> f64 {
        let s: Complex64 = self.lambdas.iter().map(|l| l * l.ln()).sum();
        hbar / (2.0 * PI) * (self.cutoff * self.cutoff.ln() - s.re)
    }
}

/// ln Z from the Matsubara product, for any friction model with a cutoff.
pub fn ln_partition_product(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    thermal: &ThermalParams,
    n_max: Option<u64>,
) -> Result<f64> {
    require_cutoff(damp)?;
    thermal.require_finite("partition function")?;
    let w02 = spec.omega0 * spec.omega0;
    let nu1 = thermal.matsubara(1);
    let term = |n: f64| {
        let nu = n * nu1;
        -((w02 + damp.matsubara_weight(nu)) / (nu * nu)).ln_1p()
    };
    let scales = [spec.omega0 / nu1, damp.high_frequency_scale() / nu1];
    let sum = smooth_series_sum(term, n_max.unwrap_or(DEFAULT_DIRECT_TERMS), &scales)?;
    Ok(sum - (thermal.hbar_beta() * spec.omega0).ln())
}

/// ln Z; exact Gamma-function form for Drude friction, the product otherwise.
pub fn ln_partition_function(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    thermal: &ThermalParams,
    n_max: Option<u64>,
) -> Result<f64> {
    require_cutoff(damp)?;
    thermal.require_finite("partition function")?;
    if damp.is_undamped() {
        let x = thermal.hbar_beta() * spec.omega0 / 2.0;
        // −ln(2 sinh x)
        return Ok(-x - (-(-2.0 * x).exp()).ln_1p());
    }
    match DrudeFactorization::from_model(spec, damp)? {
        Some(f) => ln_partition_complex_with(&f, spec, Complex64::new(thermal.hbar_beta(), 0.0)).map(|z| z.re),
        None => ln_partition_product(spec, damp, thermal, n_max),
    }
}

pub fn partition_function(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    thermal: &ThermalParams,
    n_max: Option<u64>,
) -> Result<f64> {
    ln_partition_function(spec, damp, thermal, n_max).map(f64::exp)
}

fn ln_partition_complex_with(f: &DrudeFactorization, spec: &OscillatorSpec, hbar_beta: Complex64) -> Result<Complex64> {
    Ok(f.ln_product(hbar_beta)? - (hbar_beta * spec.omega0).ln())
}

/// ln Z(β) for complex β with Re β > 0 (Drude or undamped).
pub fn ln_partition_complex(spec: &OscillatorSpec, damp: &DampingModel, hbar: f64, beta: Complex64) -> Result<Complex64> {
    if !(beta.re > 0.0) {
        return Err(QbmError::Domain(format!("need Re beta > 0, got {beta}")));
    }
    let hb = hbar * beta;
    if damp.is_undamped() {
        let x = hb * spec.omega0 / 2.0;
        return Ok(-x - (1.0 - (-2.0 * x).exp()).ln());
    }
    match DrudeFactorization::from_model(spec, damp)? {
        Some(f) => ln_partition_complex_with(&f, spec, hb),
        None => Err(QbmError::Domain("complex-temperature partition function needs Drude friction".into())),
    }
}

/// ⟨q²⟩ = −(1/Mβω₀) ∂ ln Z/∂ω₀ by central difference.
pub fn q2_from_partition(spec: &OscillatorSpec, damp: &DampingModel, thermal: &ThermalParams) -> Result<f64> {
    let h = Q2_FD_STEP * spec.omega0;
    let at = |w: f64| ln_partition_function(&OscillatorSpec { omega0: w, ..*spec }, damp, thermal, None);
    let d = (at(spec.omega0 + h)? - at(spec.omega0 - h)?) / (2.0 * h);
    Ok(-d / (spec.mass * thermal.beta() * spec.omega0))
}

/// ε₀ = −lim_{β→∞} ln Z/β.
pub fn ground_state_energy(spec: &OscillatorSpec, damp: &DampingModel, hbar: f64) -> Result<f64> {
    require_cutoff(damp)?;
    if damp.is_undamped() {
        return Ok(0.5 * hbar * spec.omega0);
    }
    if let Some(f) = DrudeFactorization::from_model(spec, damp)? {
        return Ok(f.ground_state_energy(hbar));
    }
    // (ħ/2π) ∫₀^∞ ln(1 + (ω₀² + νγ̂(ν))/ν²) dν
    let w02 = spec.omega0 * spec.omega0;
    let g = |nu: f64| if nu == 0.0 { 0.0 } else { ((w02 + damp.matsubara_weight(nu)) / (nu * nu)).ln_1p() };
    let mut breaks = vec![spec.omega0, damp.high_frequency_scale()];
    breaks.sort_by(f64::total_cmp);
    let v = integrate_to_infinity(g, 0.0, &breaks, QuadOptions::default())?.value;
    Ok(hbar / (2.0 * PI) * v)
}

/// ε₀ by Richardson extrapolation of −ln Z/β on the ladder
/// ħβω₀ = β₀·2^{k/2}, linear in h = 1/β². Returns (value, error estimate).
pub fn ground_state_energy_extrapolated(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    hbar: f64,
    hbar_beta0: f64,
    levels: usize,
) -> Result<(f64, f64)> {
    // the low-temperature free energy is ε₀ − cT² + O(T⁴); stepping ħβω₀ by
    // √2 halves 1/β² per level, the ladder Richardson expects
    let f = |hb: f64| -> Result<f64> {
        let th = ThermalParams::from_beta(hb / (hbar * spec.omega0), hbar, 1.0)?;
        Ok(-ln_partition_function(spec, damp, &th, None)? / th.beta())
    };
    let mut vals = Vec::with_capacity(levels);
    for k in 0..levels {
        vals.push(f(hbar_beta0 * 2f64.powf(0.5 * k as f64))?);
    }
    let (v, err) = richardson(&vals)?;
    if !err.is_finite() || err > 1e-6 * v.abs().max(1.0) {
        return Err(QbmError::Extrapolation(format!("ground-state ladder did not settle: change {err:e}")));
    }
    Ok((v, err))
}

/// Inversion settings for [`density_of_states`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DosOptions {
    /// Re β of the Bromwich line, in units of 1/ħω₀.
    pub contour: f64,
    /// Factor applied to `contour` for the shift check.
    pub contour_shift: f64,
    /// Trapezoid step in Im β, in units of 1/ħω₀.
    pub step: f64,
    /// First Im β truncation, doubled until the result stabilizes.
    pub y_start: f64,
    pub y_cap: f64,
    /// Absolute tolerance on ρ·ħω₀ for truncation and contour checks.
    pub tol: f64,
}

impl Default for DosOptions {
    fn default() -> Self {
        Self { contour: 0.5, contour_shift: 0.7, step: 0.025, y_start: 64.0, y_cap: 8192.0, tol: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOfStates {
    /// Excitation energies E − ε₀.
    pub energies: Vec<f64>,
    pub rho: Vec<f64>,
    pub epsilon0: f64,
    /// Weight of δ(E − ε₀), excluded from `rho`.
    pub delta_weight: f64,
    /// Re β of the contour used.
    pub contour: f64,
    /// Im β truncation reached.
    pub y_max: f64,
    /// Largest |Δρ| between the two contours.
    pub shift_discrepancy: f64,
}

/// ρ(E) by numerical Bromwich inversion of Z(β)e^{βε₀} on Re β = c.
/// The constant δ-weight and the 1/β step are removed before the
/// quadrature and restored analytically.
pub fn density_of_states(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    hbar: f64,
    energies: &[f64],
    opts: DosOptions,
) -> Result<DensityOfStates> {
    require_cutoff(damp)?;
    if damp.is_undamped() || !matches!(damp, DampingModel::Drude { .. }) {
        return Err(QbmError::Domain("density of states needs Drude friction with gamma > 0".into()));
    }
    if energies.iter().any(|e| !(*e > 0.0)) {
        return Err(QbmError::Domain("density-of-states energies are excitation energies and must be > 0".into()));
    }
    let scale = hbar * spec.omega0;
    let eps0 = ground_state_energy(spec, damp, hbar)?;
    let ln_zt = |beta: Complex64| -> Result<Complex64> { Ok(ln_partition_complex(spec, damp, hbar, beta)? + beta * eps0) };

    // δ-weight: Z̃(β) → w as β → ∞, approached like 1/β
    let ladder: Vec<f64> = (0..6)
        .map(|k| ln_zt(Complex64::new(1e3 * 2f64.powi(k) / scale, 0.0)).map(|z| z.re.exp()))
        .collect::<Result<_>>()?;
    let (w, _) = richardson(&ladder)?;

    let run = |c_units: f64| -> Result<(Vec<f64>, f64)> {
        let c = c_units / scale;
        let h = opts.step / scale;
        let mut y_max = opts.y_start / scale;
        let mut samples: Vec<Complex64> = Vec::new();
        let mut prev: Option<Vec<f64>> = None;
        loop {
            let n = (y_max / h).round() as usize;
            let start = samples.len();
            let fresh: Vec<Complex64> = (start..=n)
                .into_par_iter()
                .map(|j| {
                    let beta = Complex64::new(c, j as f64 * h);
                    ln_zt(beta).map(|l| l.exp() - w)
                })
                .collect::<Result<_>>()?;
            samples.extend(fresh);
            // Z̃ − w ≈ A/β for large |β|; A is ρ just above ε₀
            let last = Complex64::new(c, n as f64 * h);
            let a = (samples[n] * last).re;
            let rho: Vec<f64> = energies
                .par_iter()
                .map(|&e| {
                    let mut acc = 0.0;
                    for (j, z) in samples[..=n].iter().enumerate() {
                        let y = j as f64 * h;
                        let beta = Complex64::new(c, y);
                        let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
                        acc += weight * ((z - a / beta) * Complex64::new(0.0, y * e).exp()).re;
                    }
                    (c * e).exp() / PI * acc * h + a
                })
                .collect();
            if let Some(p) = &prev {
                let change = p.iter().zip(&rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if change * scale <= opts.tol {
                    return Ok((rho, y_max * scale));
                }
            }
            if y_max * 2.0 > opts.y_cap / scale {
                return Err(QbmError::ContourFailure(format!(
                    "inversion did not stabilize up to Im beta = {} / (hbar omega0) on Re beta = {c_units}",
                    opts.y_cap
                )));
            }
            prev = Some(rho);
            y_max *= 2.0;
        }
    };

    let (rho, y_max) = run(opts.contour)?;
    let (shifted, _) = run(opts.contour * opts.contour_shift)?;
    let shift_discrepancy = rho.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if shift_discrepancy * scale > opts.tol {
        return Err(QbmError::ContourFailure(format!(
            "contour shift changed rho by {:e} (tolerance {:e}); contour {} vs {}",
            shift_discrepancy * scale,
            opts.tol,
            opts.contour,
            opts.contour * opts.contour_shift
        )));
    }
    Ok(DensityOfStates {
        energies: energies.to_vec(),
        rho,
        epsilon0: eps0,
        delta_weight: w,
        contour: opts.contour,
        y_max,
        shift_discrepancy,
    })
}

/// ρ(E) as the residue sum over the poles of Z(β) (Drude friction):
/// β = 0 and β = −2πm/ħλ_k from the Gamma-function factors.
pub fn density_of_states_poles(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    hbar: f64,
    energies: &[f64],
    poles_per_root: usize,
) -> Result<Vec<f64>> {
    let f = DrudeFactorization::from_model(spec, damp)?
        .ok_or_else(|| QbmError::Domain("pole route needs Drude friction with gamma > 0".into()))?;
    let eps0 = f.ground_state_energy(hbar);
    let w0 = spec.omega0;
    let lg = |z: Complex64| ln_gamma(z);
    // log residues without the e^{βE} factor
    let mut residues: Vec<(Complex64, Complex64)> = Vec::new();
    for (k, lk) in f.lambdas.iter().enumerate() {
        for m in 1..=poles_per_root {
            let beta = -2.0 * PI * m as f64 / (hbar * lk);
            let s = hbar * beta / (2.0 * PI);
            let mut ln_res = (2.0 * PI / (hbar * lk)).ln() + Complex64::new(0.0, PI * (m - 1) as f64)
                - ln_gamma(Complex64::new(m as f64, 0.0))?;
            for (j, lj) in f.lambdas.iter().enumerate() {
                if j != k {
                    ln_res += lg(1.0 + lj * s)?;
                }
            }
            ln_res -= lg(1.0 + f.cutoff * s)?;
            ln_res -= (hbar * beta * w0).ln();
            residues.push((beta, ln_res));
        }
    }
    Ok(energies
        .iter()
        .map(|&e| {
            let en = e + eps0;
            let s: Complex64 = residues.iter().map(|(b, l)| (l + b * en).exp()).sum();
            1.0 / (hbar * w0) + s.re
        })
        .collect())
}

/// A fitted resonance of the density of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Excitation energy of the peak centre.
    pub center: f64,
    /// Full width at half maximum.
    pub width: f64,
    /// Integrated weight.
    pub weight: f64,
}

/// Least-squares fit of ρ on (0.3, count + ½)ħω₀ by a linear background
/// plus Lorentzians near E = nħω₀; two extra peaks absorb the tails from
/// above the window. Returns the first `count` resonances.
pub fn fit_resonances(dos: &DensityOfStates, hbar_omega0: f64, count: usize) -> Result<Vec<Resonance>> {
    use nalgebra::{DMatrix, DVector};
    let lo = 0.3 * hbar_omega0;
    let hi = (count as f64 + 0.5) * hbar_omega0;
    let data: Vec<(f64, f64)> =
        dos.energies.iter().zip(&dos.rho).filter(|(e, _)| **e >= lo && **e <= hi).map(|(e, r)| (*e, *r)).collect();
    let peaks = count + 2;
    if data.len() < 4 * peaks {
        return Err(QbmError::Domain("too few energy samples to fit resonances".into()));
    }
    // parameters: b0, b1, then (weight, centre, half width) per peak
    let mut p = vec![0.0, 0.0];
    for n in 1..=peaks {
        p.extend([1.0, n as f64 * hbar_omega0, 0.05 * n as f64 * hbar_omega0]);
    }
    let eval = |p: &[f64], e: f64, grad: Option<&mut [f64]>| -> f64 {
        let mut v = p[0] + p[1] * e;
        let mut g = grad;
        if let Some(g) = g.as_deref_mut() {
            g[0] = 1.0;
            g[1] = e;
        }
        for k in 0..peaks {
            let (w, c, h) = (p[2 + 3 * k], p[3 + 3 * k], p[4 + 3 * k]);
            let x = e - c;
            let den = x * x + h * h;
            let l = w / PI * h / den;
            v += l;
            if let Some(g) = g.as_deref_mut() {
                g[2 + 3 * k] = h / (PI * den);
                g[3 + 3 * k] = w / PI * h * 2.0 * x / (den * den);
                g[4 + 3 * k] = w / PI * (x * x - h * h) / (den * den);
            }
        }
        v
    };
    let np = p.len();
    let cost = |p: &[f64]| data.iter().map(|(e, r)| (eval(p, *e, None) - r).powi(2)).sum::<f64>();
    let mut mu = 1e-3;
    let mut current = cost(&p);
    let mut grad = vec![0.0; np];
    for _ in 0..500 {
        let mut jtj = DMatrix::<f64>::zeros(np, np);
        let mut jtr = DVector::<f64>::zeros(np);
        for (e, r) in &data {
            let res = eval(&p, *e, Some(&mut grad)) - r;
            let g = DVector::from_column_slice(&grad);
            jtj += &g * g.transpose();
            jtr += &g * res;
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut a = jtj.clone();
            for i in 0..np {
                a[(i, i)] += mu * jtj[(i, i)].max(1e-12);
            }
            let Some(ch) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = ch.solve(&(-&jtr));
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let c = cost(&trial);
            if c < current {
                let rel = (current - c) / current.max(f64::MIN_POSITIVE);
                p = trial;
                current = c;
                mu = (mu / 10.0).max(1e-12);
                improved = rel > 1e-14;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok((0..count)
        .map(|k| Resonance { weight: p[2 + 3 * k], center: p[3 + 3 * k], width: 2.0 * p[4 + 3 * k].abs() })
        .collect())
}
