//! Imaginary-time influence kernel, the nonlocal effective action of periodic
//! paths, and metastability of the cubic well.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::damping::DampingModel;
use crate::error::{QbmError, Result};
use crate::numerics::{bisect, integrate, QuadOptions};
use crate::units::ThermalParams;

/// Default agreement required between the Fourier and quadrature actions.
pub const ROUTE_TOL: f64 = 1e-6;

/// Direct terms per unit of ω_D/ν₁ in the Drude remainder sum.
const DRUDE_TERMS_PER_RATIO: f64 = 200.0;
const MIN_KERNEL_TERMS: u64 = 4096;

/// Periodic path sampled at τ_j = jħβ/J.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub beta_hbar: f64,
    pub samples: Vec<f64>,
}

impl PathGrid {
    pub fn new(beta_hbar: f64, samples: Vec<f64>) -> Result<Self> {
        if !(beta_hbar > 0.0) || !beta_hbar.is_finite() {
            return Err(QbmError::Domain(format!("period must be positive and finite, got {beta_hbar}")));
        }
        if samples.len() < 2 || samples.len() % 2 != 0 {
            return Err(QbmError::Domain(format!("path needs an even number of samples, got {}", samples.len())));
        }
        if samples.iter().any(|q| !q.is_finite()) {
            return Err(QbmError::Domain("path samples must be finite".into()));
        }
        Ok(Self { beta_hbar, samples })
    }

    /// Samples f(τ_j) of a function on [0, ħβ).
    pub fn from_fn(beta_hbar: f64, j: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(beta_hbar, (0..j).map(|k| f(k as f64 * beta_hbar / j as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.beta_hbar / self.len() as f64;
        (0..self.len()).map(|k| k as f64 * h).collect()
    }

    /// q_n = (1/J) Σ_j q(τ_j) e^{−iν_nτ_j} for n = 0 … J−1 (indices above J/2 are negative modes).
    pub fn fourier_coefficients(&self) -> Vec<Complex<f64>> {
        let j = self.len();
        let mut buf: Vec<Complex<f64>> = self.samples.iter().map(|&q| Complex::new(q, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(j).process(&mut buf);
        buf.iter().map(|c| c / j as f64).collect()
    }
}

fn check_tau(tau: f64, beta_hbar: f64) -> Result<()> {
    if !(tau > 0.0 && tau < beta_hbar) {
        return Err(QbmError::Pole { function: "influence_kernel", z: format!("tau = {tau} outside (0, {beta_hbar})") });
    }
    Ok(())
}

/// k(τ) = (M/ħβ) Σ_n |ν_n| γ̂(|ν_n|) e^{iν_nτ} for τ in (0, ħβ).
///
/// The ohmic comb Σ n cos nθ and its lower companions are summed in closed
/// form; a discrete bath is summed exactly per oscillator. For Drude damping
/// the O(n⁻³) remainder is summed directly over `n_max` terms, defaulting to
/// max(4096, 200 ω_D/ν₁).
pub fn influence_kernel(damp: &DampingModel, mass: f64, thermal: &ThermalParams, tau: f64, n_max: Option<u64>) -> Result<f64> {
    thermal.require_finite("influence kernel")?;
    let hb = thermal.hbar_beta();
    check_tau(tau, hb)?;
    let theta = 2.0 * PI * tau / hb;
    let nu1 = thermal.matsubara(1);
    let pref = 2.0 * mass / hb;
    Ok(match damp {
        DampingModel::Ohmic { gamma } => -pref * gamma * nu1 / (4.0 * (0.5 * theta).sin().powi(2)),
        DampingModel::Drude { gamma, cutoff } => {
            let a = cutoff / nu1;
            let n = n_max.unwrap_or_else(|| MIN_KERNEL_TERMS.max((DRUDE_TERMS_PER_RATIO * a).ceil() as u64));
            let mut rem = 0.0;
            for k in (1..=n).rev() {
                let k = k as f64;
                rem += (k * theta).cos() / (k * k * (k + a));
            }
            let clausen2 = PI * PI / 6.0 - 0.5 * PI * theta + 0.25 * theta * theta;
            let s = -0.5 + a * (2.0 * (0.5 * theta).sin()).ln() + a * a * clausen2 - a * a * a * rem;
            pref * gamma * cutoff * s
        }
        DampingModel::FromBath { bath, system_mass } => {
            // Σ_{n≥1} cos(nθ) a²/(n²+a²) = (πa/2) cosh(a(π−θ))/sinh(πa) − 1/2
            let mut s = 0.0;
            for o in bath.oscillators() {
                let a = o.frequency / nu1;
                let ratio = ((-a * theta).exp() + (-a * (2.0 * PI - theta)).exp()) / (1.0 - (-2.0 * PI * a).exp());
                s += o.strength() / system_mass * 0.5 * PI * a * ratio;
            }
            -pref * s
        }
    })
}

fn nyquist_free_modes(j: usize) -> impl Iterator<Item = (usize, f64)> {
    // (index, signed mode number) for |n| < J/2
    (1..j).filter(move |&k| 2 * k != j).map(move |k| (k, if 2 * k < j { k as f64 } else { k as f64 - j as f64 }))
}

/// Fourier route: S_eff = (Mħβ/2) Σ_n |ν_n| γ̂(|ν_n|) |q_n|², Nyquist mode dropped.
pub fn effective_action_fourier(path: &PathGrid, damp: &DampingModel, mass: f64) -> f64 {
    let coeffs = path.fourier_coefficients();
    let nu1 = 2.0 * PI / path.beta_hbar;
    let sum: f64 = nyquist_free_modes(path.len()).map(|(k, n)| damp.matsubara_weight(n * nu1) * coeffs[k].norm_sqr()).sum();
    0.5 * mass * path.beta_hbar * sum
}

/// Quadrature route: −(1/4)∬ k(τ−σ)[q(τ)−q(σ)]² dτdσ for the trigonometric
/// interpolant of the samples. The σ integral is a trapezoid rule on 2J
/// points (exact for the interpolant); the lag integral is adaptive and
/// never touches the coincident points.
pub fn effective_action_quadrature(path: &PathGrid, damp: &DampingModel, mass: f64, thermal: &ThermalParams) -> Result<f64> {
    let hb = path.beta_hbar;
    let j = path.len();
    let coeffs = path.fourier_coefficients();
    let modes: Vec<(f64, Complex<f64>)> =
        nyquist_free_modes(j).map(|(k, n)| (n * 2.0 * PI / hb, coeffs[k])).collect();
    let q0 = coeffs[0].re;
    let interp = |t: f64| q0 + modes.iter().map(|(nu, c)| (c * Complex::new(0.0, nu * t).exp()).re).sum::<f64>();
    let m = 2 * j;
    let h = hb / m as f64;
    let base: Vec<f64> = (0..m).map(|k| interp(k as f64 * h)).collect();
    let lag_profile = |s: f64| -> f64 {
        (0..m).map(|k| (interp(k as f64 * h + s) - base[k]).powi(2)).sum::<f64>() * h
    };
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| match influence_kernel(damp, mass, thermal, s, None) {
        Ok(k) => k * lag_profile(s),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let half = integrate(integrand, 0.0, 0.5 * hb, &[], QuadOptions::with_tol(1e-14, 1e-11))?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // symmetric about ħβ/2
    Ok(-0.25 * 2.0 * half.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveAction {
    pub fourier: f64,
    /// Independent quadrature value, when computed.
    pub quadrature: Option<f64>,
}

impl EffectiveAction {
    pub fn value(&self) -> f64 {
        self.fourier
    }
}

/// S_eff with the quadrature cross-check when `tol` is given.
pub fn effective_action(
    path: &PathGrid,
    damp: &DampingModel,
    mass: f64,
    thermal: &ThermalParams,
    tol: Option<f64>,
) -> Result<EffectiveAction> {
    if path.len() < 8 {
        return Err(QbmError::Domain(format!("effective action needs at least 8 samples, got {}", path.len())));
    }
    if ((thermal.hbar_beta() - path.beta_hbar) / path.beta_hbar).abs() > 1e-12 {
        return Err(QbmError::Domain(format!(
            "path period {} does not match hbar*beta = {}",
            path.beta_hbar,
            thermal.hbar_beta()
        )));
    }
    let fourier = effective_action_fourier(path, damp, mass);
    let Some(tol) = tol else {
        return Ok(EffectiveAction { fourier, quadrature: None });
    };
    let quad = effective_action_quadrature(path, damp, mass, thermal)?;
    let scale = fourier.abs().max(quad.abs());
    if (fourier - quad).abs() > tol * scale && scale > 0.0 {
        return Err(QbmError::RouteDisagreement { what: "effective action", a: fourier, b: quad, tol });
    }
    Ok(EffectiveAction { fourier, quadrature: Some(quad) })
}

/// V(q) = (M/2) ω₀² q² (1 − q/q₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPotentialSpec {
    pub mass: f64,
    pub omega0: f64,
    pub q0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialLandmarks {
    pub barrier_position: f64,
    pub barrier_height: f64,
    pub well_curvature: f64,
    pub barrier_curvature: f64,
    pub omega_b: f64,
}

impl CubicPotentialSpec {
    pub fn new(mass: f64, omega0: f64, q0: f64) -> Result<Self> {
        if !(mass > 0.0) || !(omega0 > 0.0) || !(q0 > 0.0) {
            return Err(QbmError::Domain(format!("cubic potential needs M, omega0, q0 > 0 (got {mass}, {omega0}, {q0})")));
        }
        Ok(Self { mass, omega0, q0 })
    }

    pub fn omega_b(&self) -> f64 {
        self.omega0
    }

    /// (V, V′, V″) at q.
    pub fn potential(&self, q: f64) -> (f64, f64, f64) {
        let k = self.mass * self.omega0 * self.omega0;
        let v = 0.5 * k * q * q * (1.0 - q / self.q0);
        let dv = k * (q - 1.5 * q * q / self.q0);
        let d2v = k * (1.0 - 3.0 * q / self.q0);
        (v, dv, d2v)
    }

    pub fn landmarks(&self) -> PotentialLandmarks {
        let k = self.mass * self.omega0 * self.omega0;
        PotentialLandmarks {
            barrier_position: 2.0 * self.q0 / 3.0,
            barrier_height: 2.0 / 27.0 * k * self.q0 * self.q0,
            well_curvature: k,
            barrier_curvature: -k,
            omega_b: self.omega_b(),
        }
    }
}

pub fn potential_report(pot: &CubicPotentialSpec, q: f64) -> ((f64, f64, f64), PotentialLandmarks) {
    (pot.potential(q), pot.landmarks())
}

fn lambda_at(pot: &CubicPotentialSpec, damp: &DampingModel, nu: f64) -> f64 {
    let wb = pot.omega_b();
    nu * nu + damp.matsubara_weight(nu) - wb * wb
}

/// Λ_n = ν_n² + ν_n γ̂(ν_n) − ω_b² for the constant barrier path.
pub fn fluctuation_eigenvalue(pot: &CubicPotentialSpec, damp: &DampingModel, thermal: &ThermalParams, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(QbmError::Domain("fluctuation mode index must be >= 1".into()));
    }
    Ok(lambda_at(pot, damp, thermal.matsubara(n)))
}

/// T₀ where Λ₁ changes sign, by bisection in T.
pub fn crossover_temperature(pot: &CubicPotentialSpec, damp: &DampingModel, hbar: f64, kb: f64) -> Result<f64> {
    let nu_of = |t: f64| 2.0 * PI * kb * t / hbar;
    // ν₁ = ω_b already makes Λ₁ ≥ 0
    let t_hi = hbar * pot.omega_b() / (2.0 * PI * kb);
    bisect(|t| lambda_at(pot, damp, nu_of(t)), 0.0, t_hi)
        .map_err(|e| QbmError::NoRoot(format!("crossover temperature: {e}")))
}

/// (ħ/2πk)[(γ²/4 + ω_b²)^{1/2} − γ/2] for ohmic friction γ.
pub fn crossover_temperature_ohmic(pot: &CubicPotentialSpec, gamma: f64, hbar: f64, kb: f64) -> f64 {
    let wb = pot.omega_b();
    // rationalized to avoid cancellation at large γ
    let root = wb * wb / ((0.25 * gamma * gamma + wb * wb).sqrt() + 0.5 * gamma);
    hbar * root / (2.0 * PI * kb)
}

/// (T, Λ₁(T)) over a temperature list.
pub fn lambda1_sweep(pot: &CubicPotentialSpec, damp: &DampingModel, hbar: f64, kb: f64, temps: &[f64]) -> Vec<(f64, f64)> {
    temps.iter().map(|&t| (t, lambda_at(pot, damp, 2.0 * PI * kb * t / hbar))).collect()
}
