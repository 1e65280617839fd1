//! Friction models: the damping kernel γ(t), its Laplace transform γ̂(z)
//! and the spectral density Re γ̂(−iω + 0⁺).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{QbmError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DampingModel {
    /// Memoryless friction γ(t) = 2γδ(t).
    Ohmic { gamma: f64 },
    /// γ̂(z) = γ ω_D / (z + ω_D), kernel γ ω_D e^{−ω_D|t|}.
    Drude { gamma: f64, cutoff: f64 },
    /// Explicit oscillator bath acting on a system of the given mass.
    FromBath { bath: BathSpec, system_mass: f64 },
}

impl DampingModel {
    pub fn ohmic(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::Ohmic { gamma })
    }

    pub fn drude(gamma: f64, cutoff: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(QbmError::Domain(format!("Drude cutoff must be positive, got {cutoff}")));
        }
        Ok(Self::Drude { gamma, cutoff })
    }

    pub fn from_bath(bath: BathSpec, system_mass: f64) -> Result<Self> {
        if !(system_mass > 0.0) {
            return Err(QbmError::Domain("system mass must be positive".into()));
        }
        Ok(Self::FromBath { bath, system_mass })
    }

    pub fn undamped() -> Self {
        Self::Ohmic { gamma: 0.0 }
    }

    pub fn is_strictly_ohmic(&self) -> bool {
        matches!(self, Self::Ohmic { gamma } if *gamma > 0.0)
    }

    pub fn is_undamped(&self) -> bool {
        match self {
            Self::Ohmic { gamma } | Self::Drude { gamma, .. } => *gamma == 0.0,
            Self::FromBath { bath, .. } => bath.oscillators().is_empty(),
        }
    }

    /// Friction strength γ̂(0); zero for a finite bath, whose Laplace
    /// transform vanishes at the origin.
    pub fn static_friction(&self) -> f64 {
        match self {
            Self::Ohmic { gamma } | Self::Drude { gamma, .. } => *gamma,
            Self::FromBath { .. } => 0.0,
        }
    }

    /// Frequency beyond which γ̂ has reached its asymptotic form.
    pub fn high_frequency_scale(&self) -> f64 {
        match self {
            Self::Ohmic { gamma } => *gamma,
            Self::Drude { gamma, cutoff } => gamma.max(*cutoff),
            Self::FromBath { bath, .. } => bath.max_frequency(),
        }
    }

    /// γ(t); undefined (a delta function) for ohmic friction.
    pub fn kernel(&self, t: f64) -> Result<f64> {
        match self {
            Self::Ohmic { gamma } if *gamma == 0.0 => Ok(0.0),
            Self::Ohmic { .. } => Err(QbmError::Domain("ohmic kernel is 2γδ(t), not a function".into())),
            Self::Drude { gamma, cutoff } => Ok(gamma * cutoff * (-cutoff * t.abs()).exp()),
            Self::FromBath { bath, system_mass } => Ok(bath.damping_kernel(*system_mass, t)),
        }
    }

    /// γ̂(ν) for real ν ≥ 0.
    pub fn laplace_real(&self, nu: f64) -> f64 {
        match self {
            Self::Ohmic { gamma } => *gamma,
            Self::Drude { gamma, cutoff } => gamma * cutoff / (nu + cutoff),
            Self::FromBath { bath, system_mass } => bath
                .oscillators()
                .iter()
                .map(|o| {
                    let w = o.frequency;
                    o.coupling * o.coupling / (system_mass * o.mass * w * w) * nu / (nu * nu + w * w)
                })
                .sum(),
        }
    }

    /// |ν| γ̂(|ν|), the Matsubara weight.
    pub fn matsubara_weight(&self, nu: f64) -> f64 {
        let nu = nu.abs();
        if nu == 0.0 {
            return 0.0;
        }
        nu * self.laplace_real(nu)
    }

    /// γ̂(z) for Re z > 0.
    pub fn laplace(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re > 0.0) {
            return Err(QbmError::Domain(format!("Laplace transform needs Re z > 0, got {z}")));
        }
        Ok(match self {
            Self::Ohmic { gamma } => Complex64::new(*gamma, 0.0),
            Self::Drude { gamma, cutoff } => gamma * cutoff / (z + cutoff),
            Self::FromBath { bath, system_mass } => bath.gamma_laplace_unchecked(*system_mass, z),
        })
    }

    /// γ̃(ω) = γ̂(−iω + 0⁺). For an explicit bath this is the principal
    /// value off the bath frequencies.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        match self {
            Self::Ohmic { gamma } => Complex64::new(*gamma, 0.0),
            Self::Drude { gamma, cutoff } => gamma * cutoff / Complex64::new(*cutoff, -omega),
            Self::FromBath { bath, system_mass } => {
                let s: f64 = bath
                    .oscillators()
                    .iter()
                    .map(|o| {
                        let w = o.frequency;
                        o.coupling * o.coupling / (system_mass * o.mass * w * w) * omega / (omega * omega - w * w)
                    })
                    .sum();
                Complex64::new(0.0, s)
            }
        }
    }

    /// Re γ̂(−iω + 0⁺); only continuum models have one.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        match self {
            Self::Ohmic { gamma } => Ok(*gamma),
            Self::Drude { gamma, cutoff } => Ok(gamma * cutoff * cutoff / (omega * omega + cutoff * cutoff)),
            Self::FromBath { .. } => Err(QbmError::Domain(
                "an explicit bath has a delta-comb spectral density; use the bath-sum routes".into(),
            )),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(QbmError::Domain(format!("friction gamma must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drude_kernel_is_even_and_laplace_positive() {
        let d = DampingModel::drude(0.3, 7.0).unwrap();
        for t in [0.0, 0.01, 0.5, 3.0] {
            assert_eq!(d.kernel(t).unwrap(), d.kernel(-t).unwrap());
        }
        for z in [1e-6, 0.1, 10.0, 1e6] {
            assert!(d.laplace_real(z) > 0.0);
            let c = d.laplace(Complex64::new(z, 0.0)).unwrap();
            assert!((c.re - d.laplace_real(z)).abs() < 1e-15 && c.im == 0.0);
        }
        assert!(d.laplace(Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn drude_fourier_real_part_is_spectral_density() {
        let d = DampingModel::drude(0.3, 7.0).unwrap();
        for w in [0.0, 1.0, 7.0, 50.0] {
            assert!((d.fourier(w).re - d.spectral_density(w).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn ohmic_kernel_is_not_a_function() {
        assert!(DampingModel::ohmic(0.1).unwrap().kernel(0.2).is_err());
        assert_eq!(DampingModel::undamped().kernel(0.2).unwrap(), 0.0);
        assert!(DampingModel::ohmic(-1.0).is_err());
        assert!(DampingModel::drude(0.1, 0.0).is_err());
    }
}
