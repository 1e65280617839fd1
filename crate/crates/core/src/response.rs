//! Fluctuation–dissipation theorem: symmetrized equilibrium spectra from
//! the dissipative part of a linear response, and Johnson–Nyquist noise.

use std::fmt;

use num_complex::Complex64;

use crate::error::{QbmError, Result};
use crate::numerics::{bose_energy, coth_weight};
use crate::units::ThermalParams;

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Step used for the ω → 0 limit of χ̃ᵈ(ω)/ω.
const ZERO_FREQ_STEP: f64 = 1e-6;

/// Dissipative part χ̃ᵈ(ω) of an auto-response; real and odd in ω.
pub struct DissipativeResponse {
    chi_d: RealFn,
    pub label: String,
}

impl fmt::Debug for DissipativeResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DissipativeResponse").field("label", &self.label).finish_non_exhaustive()
    }
}

impl DissipativeResponse {
    pub fn new(label: impl Into<String>, chi_d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { chi_d: Box::new(chi_d), label: label.into() }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        (self.chi_d)(omega)
    }

    /// χ̃ᵈ(ω)/ω, with the symmetric-difference slope at ω = 0.
    pub fn over_omega(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            let h = ZERO_FREQ_STEP;
            return (self.eval(h) - self.eval(-h)) / (2.0 * h);
        }
        self.eval(omega) / omega
    }

    /// Checks χ̃ᵈ(−ω) = −χ̃ᵈ(ω) on the given frequencies.
    pub fn check_odd(&self, grid: &[f64], rel_tol: f64) -> Result<()> {
        for &w in grid {
            let (a, b) = (self.eval(w), self.eval(-w));
            if (a + b).abs() > rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                return Err(QbmError::Domain(format!("{}: response not odd at omega = {w}: {a} vs {b}", self.label)));
            }
        }
        Ok(())
    }
}

/// S(ω) = ħ coth(ħω/2kT) χ̃ᵈ(ω).
pub fn fdt_spectrum(resp: &DissipativeResponse, thermal: &ThermalParams, omega: f64) -> f64 {
    // ħ coth(ħω/2kT) = coth_weight(ω)/ω, with the 1/ω moved onto χ̃ᵈ
    coth_weight(omega, thermal) * resp.over_omega(omega)
}

pub fn fdt_series(resp: &DissipativeResponse, thermal: &ThermalParams, omegas: &[f64]) -> Vec<(f64, f64)> {
    omegas.iter().map(|&w| (w, fdt_spectrum(resp, thermal, w))).collect()
}

/// Circuit admittance Y(ω).
pub struct Admittance {
    y: ComplexFn,
}

impl fmt::Debug for Admittance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Admittance").finish_non_exhaustive()
    }
}

impl Admittance {
    pub fn new(y: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { y: Box::new(y) }
    }

    /// Ohmic resistor, Y = 1/R.
    pub fn resistor(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(QbmError::Domain(format!("resistance must be positive, got {r}")));
        }
        Ok(Self::new(move |_| Complex64::new(1.0 / r, 0.0)))
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        (self.y)(omega)
    }

    /// Passivity, Re Y ≥ 0, on the given frequencies.
    pub fn check_passive(&self, grid: &[f64]) -> Result<()> {
        for &w in grid {
            let re = self.eval(w).re;
            if re < 0.0 {
                return Err(QbmError::Domain(format!("admittance not passive at omega = {w}: Re Y = {re}")));
            }
        }
        Ok(())
    }
}

/// The two forms of the current-noise spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentNoise {
    /// ħω coth(ħω/2kT) Re Y.
    pub total: f64,
    /// 2 · (ħω/2) Re Y, the zero-point part.
    pub vacuum: f64,
    /// 2 · ħω/(e^{βħω} − 1) Re Y, the thermal part.
    pub thermal: f64,
}

impl CurrentNoise {
    pub fn decomposed_total(&self) -> f64 {
        self.vacuum + self.thermal
    }
}

/// Symmetrized current-noise spectrum S_II(ω).
pub fn current_noise(adm: &Admittance, thermal: &ThermalParams, omega: f64) -> CurrentNoise {
    let re_y = adm.eval(omega).re;
    CurrentNoise {
        total: coth_weight(omega, thermal) * re_y,
        vacuum: thermal.hbar * omega * re_y,
        thermal: 2.0 * bose_energy(omega, thermal) * re_y,
    }
}
