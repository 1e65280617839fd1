//! The damped harmonic oscillator in equilibrium: susceptibility, position
//! autocorrelation, second moments, reduced density matrix and the
//! weak-coupling correction to ⟨q²⟩.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::damping::DampingModel;
use crate::error::{QbmError, Result};
use crate::numerics::{coth_weight, fourier_cos_integral, integrate_to_infinity, smooth_series_sum, trigamma, QuadOptions};
use crate::response::DissipativeResponse;
use crate::units::ThermalParams;

/// Explicit Matsubara terms summed before the Euler–Maclaurin remainder.
pub const DEFAULT_DIRECT_TERMS: u64 = 128;

/// Cutoff used when a finite memory time is needed but none was given.
pub fn default_drude_cutoff(spec: &OscillatorSpec, gamma: f64) -> f64 {
    100.0 * spec.omega0.max(gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub mass: f64,
    pub omega0: f64,
}

impl OscillatorSpec {
    pub fn new(mass: f64, omega0: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) || !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(QbmError::Domain(format!("need M > 0 and omega0 > 0, got M={mass}, omega0={omega0}")));
        }
        Ok(Self { mass, omega0 })
    }
}

/// χ_qq(ω) = (1/M)/(ω₀² − ω² − iω γ̃(ω)).
pub fn susceptibility(spec: &OscillatorSpec, damp: &DampingModel, omega: f64) -> Complex64 {
    1.0 / (spec.mass * denominator(spec, damp, omega))
}

fn denominator(spec: &OscillatorSpec, damp: &DampingModel, omega: f64) -> Complex64 {
    let w2 = spec.omega0 * spec.omega0 - omega * omega;
    Complex64::new(w2, 0.0) - Complex64::i() * omega * damp.fourier(omega)
}

/// Im χ(ω)/ω, regular at ω = 0.
fn im_chi_over_omega(spec: &OscillatorSpec, damp: &DampingModel, omega: f64) -> f64 {
    damp.fourier(omega).re / (spec.mass * denominator(spec, damp, omega).norm_sqr())
}

/// χ̃ᵈ_qq = Im χ_qq as an FDT input.
pub fn dissipative_response(spec: &OscillatorSpec, damp: &DampingModel) -> DissipativeResponse {
    let (s, d) = (*spec, damp.clone());
    DissipativeResponse::new("position", move |w| w * im_chi_over_omega(&s, &d, w))
}

/// The two contributions to the ohmic position autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqqParts {
    /// Damped oscillation at ω̄ = (ω₀² − γ²/4)^{1/2}.
    pub resonant: f64,
    /// Matsubara contribution, which carries the algebraic tail at T = 0.
    pub matsubara: f64,
}

impl SqqParts {
    pub fn total(&self) -> f64 {
        self.resonant + self.matsubara
    }
}

/// Symmetrized S_qq(t) for ohmic damping from the contour-integral closed form.
pub fn sqq_ohmic_closed_form(
    spec: &OscillatorSpec,
    gamma: f64,
    thermal: &ThermalParams,
    t: f64,
    n_max: Option<u64>,
) -> Result<f64> {
    sqq_ohmic_parts(spec, gamma, thermal, t, n_max).map(|p| p.total())
}

pub fn sqq_ohmic_parts(
    spec: &OscillatorSpec,
    gamma: f64,
    thermal: &ThermalParams,
    t: f64,
    n_max: Option<u64>,
) -> Result<SqqParts> {
    let (m, w0) = (spec.mass, spec.omega0);
    if !(gamma >= 0.0) {
        return Err(QbmError::Domain(format!("gamma must be >= 0, got {gamma}")));
    }
    if gamma >= 2.0 * w0 {
        return Err(QbmError::Overdamped { gamma, two_omega0: 2.0 * w0 });
    }
    let hbar = thermal.hbar;
    let t = t.abs();
    let wbar = (w0 * w0 - gamma * gamma / 4.0).sqrt();
    let envelope = hbar / (2.0 * m * wbar) * (-gamma * t / 2.0).exp();
    let denom4 = |nu: f64| {
        let a = nu * nu + w0 * w0;
        a * a - gamma * gamma * nu * nu
    };

    if thermal.is_zero_temperature() {
        let resonant = envelope * (wbar * t).cos();
        if gamma == 0.0 {
            return Ok(SqqParts { resonant, matsubara: 0.0 });
        }
        let f = |nu: f64| nu * (-nu * t).exp() / denom4(nu);
        let mut breaks = vec![w0];
        if t > 0.0 {
            breaks.push(1.0 / t);
        }
        breaks.sort_by(f64::total_cmp);
        let integral = integrate_to_infinity(f, 0.0, &breaks, QuadOptions::default())?.value;
        return Ok(SqqParts { resonant, matsubara: -hbar * gamma / (PI * m) * integral });
    }

    let hb = thermal.hbar_beta();
    let x = hb * wbar;
    let y = hb * gamma / 2.0;
    // sinh x/(cosh x − cos y) and sin y/(cosh x − cos y), written in e^{−x}
    let e = (-x).exp();
    let one_minus_e = -(-x).exp_m1();
    let d = one_minus_e * one_minus_e + 4.0 * (y / 2.0).sin().powi(2) * e;
    if !(d > 0.0) || !d.is_finite() {
        return Err(QbmError::ResonantDenominator { value: d });
    }
    let r1 = one_minus_e * (1.0 + e) / d;
    let r2 = 2.0 * y.sin() * e / d;
    let resonant = envelope * (r1 * (wbar * t).cos() + r2 * (wbar * t).sin());
    if gamma == 0.0 {
        return Ok(SqqParts { resonant, matsubara: 0.0 });
    }
    let nu1 = 2.0 * PI / hb;
    let f = |n: f64| {
        let nu = n * nu1;
        nu * (-nu * t).exp() / denom4(nu)
    };
    let mut scales = vec![w0 / nu1];
    if t > 0.0 {
        scales.push(1.0 / (nu1 * t));
    }
    let sum = smooth_series_sum(f, n_max.unwrap_or(DEFAULT_DIRECT_TERMS), &scales)?;
    let beta = thermal.beta();
    Ok(SqqParts { resonant, matsubara: -2.0 * gamma / (m * beta) * sum })
}

/// S_qq(t) = (1/π) ∫₀^∞ cos(ωt) ħ coth(ħω/2kT) Im χ(ω) dω for any
/// continuum friction model.
pub fn sqq_quadrature(spec: &OscillatorSpec, damp: &DampingModel, thermal: &ThermalParams, t: f64) -> Result<f64> {
    if let DampingModel::FromBath { .. } = damp {
        return Err(QbmError::Domain(
            "a finite bath has a discrete spectrum; use the normal-mode correlation instead".into(),
        ));
    }
    let (m, w0) = (spec.mass, spec.omega0);
    if damp.is_undamped() {
        return Ok(thermal.hbar / (2.0 * m * w0) * coth_weight(w0, thermal) / (thermal.hbar * w0) * (w0 * t).cos());
    }
    let f = |w: f64| coth_weight(w, thermal) * im_chi_over_omega(spec, damp, w) / PI;
    let g = damp.static_friction();
    let mut breaks = vec![w0];
    for k in [1.0, 5.0] {
        breaks.push(w0 + k * g);
        if w0 - k * g > 0.0 {
            breaks.push(w0 - k * g);
        }
    }
    if let DampingModel::Drude { cutoff, .. } = damp {
        breaks.push(*cutoff);
    }
    if !thermal.is_zero_temperature() {
        breaks.push(thermal.kt() / thermal.hbar);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    fourier_cos_integral(f, t, 0.0, &breaks, QuadOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMoments {
    pub q2: f64,
    pub p2: f64,
}

impl SecondMoments {
    pub fn uncertainty_product(&self) -> f64 {
        self.q2 * self.p2
    }

    /// ⟨q²⟩⟨p²⟩ ≥ ħ²/4 up to a relative slack.
    pub fn satisfies_uncertainty(&self, hbar: f64, rel_slack: f64) -> bool {
        self.uncertainty_product() >= 0.25 * hbar * hbar * (1.0 - rel_slack)
    }
}

/// ⟨q²⟩ from the Matsubara sum; valid for every friction model.
pub fn position_variance(spec: &OscillatorSpec, damp: &DampingModel, thermal: &ThermalParams, n_max: Option<u64>) -> Result<f64> {
    let w02 = spec.omega0 * spec.omega0;
    let inv = |nu: f64| 1.0 / (w02 + nu * nu + damp.matsubara_weight(nu));
    matsubara_moment(spec, damp, thermal, n_max, inv).map(|s| s / spec.mass)
}

/// ⟨p²⟩; diverges for strictly ohmic friction.
pub fn momentum_variance(spec: &OscillatorSpec, damp: &DampingModel, thermal: &ThermalParams, n_max: Option<u64>) -> Result<f64> {
    if damp.is_strictly_ohmic() {
        return Err(QbmError::DivergentMoment(
            "<p^2> diverges logarithmically for ohmic friction; use a Drude cutoff or an explicit bath".into(),
        ));
    }
    let w02 = spec.omega0 * spec.omega0;
    let ratio = |nu: f64| {
        let k = w02 + damp.matsubara_weight(nu);
        k / (k + nu * nu)
    };
    matsubara_moment(spec, damp, thermal, n_max, ratio).map(|s| s * spec.mass)
}

pub fn second_moments(spec: &OscillatorSpec, damp: &DampingModel, thermal: &ThermalParams, n_max: Option<u64>) -> Result<SecondMoments> {
    Ok(SecondMoments {
        q2: position_variance(spec, damp, thermal, n_max)?,
        p2: momentum_variance(spec, damp, thermal, n_max)?,
    })
}

/// (1/β) Σ_{n∈ℤ} g(|ν_n|), or (ħ/π) ∫₀^∞ g at T = 0.
fn matsubara_moment(
    spec: &OscillatorSpec,
    damp: &DampingModel,
    thermal: &ThermalParams,
    n_max: Option<u64>,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut freq_scales = vec![spec.omega0, damp.high_frequency_scale()];
    if let DampingModel::FromBath { bath, .. } = damp {
        freq_scales.push(bath.oscillators()[0].frequency);
    }
    if thermal.is_zero_temperature() {
        freq_scales.sort_by(f64::total_cmp);
        let v = integrate_to_infinity(&g, 0.0, &freq_scales, QuadOptions::default())?.value;
        return Ok(thermal.hbar / PI * v);
    }
    let nu1 = thermal.matsubara(1);
    let scales: Vec<f64> = freq_scales.iter().map(|w| w / nu1).collect();
    let sum = smooth_series_sum(|n| g(n * nu1), n_max.unwrap_or(DEFAULT_DIRECT_TERMS), &scales)?;
    Ok((g(0.0) + 2.0 * sum) / thermal.beta())
}

/// Gaussian reduced density matrix ρ(q, q′) in the position basis.
pub fn reduced_density_matrix(moments: &SecondMoments, hbar: f64, q: f64, q_prime: f64) -> f64 {
    let s = q + q_prime;
    let d = q - q_prime;
    (2.0 * PI * moments.q2).powf(-0.5) * (-s * s / (8.0 * moments.q2) - moments.p2 * d * d / (2.0 * hbar * hbar)).exp()
}

/// Relative correction to ⟨q²⟩ at first order in γ for ohmic damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakCoupling {
    pub delta_q: f64,
}

impl WeakCoupling {
    /// ⟨q²⟩(γ)/⟨q²⟩(0) ≈ 1 + (γ/πω₀) Δ_q.
    pub fn ratio(&self, spec: &OscillatorSpec, gamma: f64) -> f64 {
        1.0 + gamma / (PI * spec.omega0) * self.delta_q
    }
}

/// Δ_q = x Im ψ′(ix)/coth(πx), x = ħβω₀/2π.
pub fn weak_coupling_correction(spec: &OscillatorSpec, thermal: &ThermalParams) -> Result<WeakCoupling> {
    if thermal.is_zero_temperature() {
        return Ok(WeakCoupling { delta_q: -1.0 });
    }
    let x = thermal.hbar_beta() * spec.omega0 / (2.0 * PI);
    if x == 0.0 {
        return Ok(WeakCoupling { delta_q: 0.0 });
    }
    let psi1 = trigamma(Complex64::new(0.0, x))?;
    Ok(WeakCoupling { delta_q: x * psi1.im * (PI * x).tanh() })
}
