//! Temperature and physical constants.
//!
//! Everything inside the library runs in natural units with ħ = k_B = 1
//! unless a caller supplies other values; formulas carry ħ and k_B
//! explicitly so rescaled inputs need no further conversion.

use serde::{Deserialize, Serialize};

use crate::error::{QbmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Temperature; zero is allowed and means the ground-state limit.
    pub temperature: f64,
    pub hbar: f64,
    pub kb: f64,
}

impl ThermalParams {
    pub fn new(temperature: f64) -> Result<Self> {
        Self::with_constants(temperature, 1.0, 1.0)
    }

    pub fn with_constants(temperature: f64, hbar: f64, kb: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(QbmError::Domain(format!("temperature must be finite and >= 0, got {temperature}")));
        }
        if !(hbar > 0.0) || !(kb > 0.0) {
            return Err(QbmError::Domain("hbar and k_B must be positive".into()));
        }
        Ok(Self { temperature, hbar, kb })
    }

    /// Builds parameters from an inverse temperature β = 1/kT.
    pub fn from_beta(beta: f64, hbar: f64, kb: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(QbmError::Domain(format!("beta must be positive, got {beta}")));
        }
        Self::with_constants(1.0 / (kb * beta), hbar, kb)
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.temperature == 0.0
    }

    /// β = 1/kT, infinite at T = 0.
    pub fn beta(&self) -> f64 {
        1.0 / (self.kb * self.temperature)
    }

    pub fn kt(&self) -> f64 {
        self.kb * self.temperature
    }

    pub fn hbar_beta(&self) -> f64 {
        self.hbar * self.beta()
    }

    /// ν_n = 2πn/ħβ.
    pub fn matsubara(&self, n: u64) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 * self.kt() / self.hbar
    }

    pub fn require_finite(&self, what: &str) -> Result<()> {
        if self.is_zero_temperature() {
            Err(QbmError::Domain(format!("{what} requires T > 0")))
        } else {
            Ok(())
        }
    }
}

/// Truncated set of positive Matsubara frequencies ν_1 … ν_nmax.
#[derive(Debug, Clone, PartialEq)]
pub struct MatsubaraSet {
    pub beta: f64,
    pub hbar: f64,
    pub n_max: usize,
    frequencies: Vec<f64>,
}

impl MatsubaraSet {
    pub fn new(thermal: &ThermalParams, n_max: usize) -> Result<Self> {
        thermal.require_finite("a Matsubara set")?;
        if n_max < 1 {
            return Err(QbmError::Domain("n_max must be >= 1".into()));
        }
        let nu1 = thermal.matsubara(1);
        // n * nu1 keeps nu_n = n nu_1 exact in floating point
        let frequencies = (1..=n_max).map(|n| n as f64 * nu1).collect();
        Ok(Self { beta: thermal.beta(), hbar: thermal.hbar, n_max, frequencies })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn nu(&self, n: usize) -> f64 {
        self.frequencies[n - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matsubara_set_is_exact_multiple_of_first() {
        let th = ThermalParams::new(0.37).unwrap();
        let set = MatsubaraSet::new(&th, 500).unwrap();
        let nu1 = set.nu(1);
        assert!((nu1 - 2.0 * std::f64::consts::PI * 0.37).abs() < 1e-15);
        for (i, w) in set.frequencies().windows(2).enumerate() {
            assert!(w[1] > w[0]);
            assert_eq!(w[1], (i + 2) as f64 * nu1);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ThermalParams::new(-1.0).is_err());
        assert!(ThermalParams::new(f64::NAN).is_err());
        let zero = ThermalParams::new(0.0).unwrap();
        assert!(MatsubaraSet::new(&zero, 4).is_err());
        let th = ThermalParams::new(1.0).unwrap();
        assert!(MatsubaraSet::new(&th, 0).is_err());
    }
}
