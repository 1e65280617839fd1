//! Explicit Caldeira–Leggett oscillator baths and the statistics of the
//! quantum noise they exert on the system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::damping::DampingModel;
use crate::error::{QbmError, Result};
use crate::numerics::{coth_weight, fourier_cos_integral, integrate, integrate_to_infinity, QuadOptions};
use crate::units::ThermalParams;

/// Allowed deviation of the reconstructed γ(0) from its target.
pub const COVERAGE_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathOscillator {
    pub mass: f64,
    pub frequency: f64,
    pub coupling: f64,
}

impl BathOscillator {
    /// c²/(m ω²), the contribution to M·γ(0).
    pub fn strength(&self) -> f64 {
        self.coupling * self.coupling / (self.mass * self.frequency * self.frequency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BathOscillator>", into = "Vec<BathOscillator>")]
pub struct BathSpec {
    oscillators: Vec<BathOscillator>,
}

impl TryFrom<Vec<BathOscillator>> for BathSpec {
    type Error = QbmError;
    fn try_from(v: Vec<BathOscillator>) -> Result<Self> {
        BathSpec::new(v)
    }
}

impl From<BathSpec> for Vec<BathOscillator> {
    fn from(b: BathSpec) -> Self {
        b.oscillators
    }
}

impl BathSpec {
    /// Validates and sorts by frequency.
    pub fn new(mut oscillators: Vec<BathOscillator>) -> Result<Self> {
        if oscillators.is_empty() {
            return Err(QbmError::Domain("a bath needs at least one oscillator".into()));
        }
        for (i, o) in oscillators.iter().enumerate() {
            let ok = |x: f64| x > 0.0 && x.is_finite();
            if !ok(o.mass) || !ok(o.frequency) || !o.coupling.is_finite() {
                return Err(QbmError::Domain(format!(
                    "bath oscillator {i}: mass and frequency must be positive, got m={}, w={}, c={}",
                    o.mass, o.frequency, o.coupling
                )));
            }
        }
        oscillators.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Ok(Self { oscillators })
    }

    pub fn single(mass: f64, frequency: f64, coupling: f64) -> Result<Self> {
        Self::new(vec![BathOscillator { mass, frequency, coupling }])
    }

    pub fn oscillators(&self) -> &[BathOscillator] {
        &self.oscillators
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.oscillators.last().map_or(0.0, |o| o.frequency)
    }

    /// Σ c²/(m ω²), the potential renormalization curvature.
    pub fn renormalization(&self) -> f64 {
        self.oscillators.iter().map(BathOscillator::strength).sum()
    }

    /// Smallest gap between neighbouring frequencies.
    pub fn min_spacing(&self) -> Option<f64> {
        self.oscillators
            .windows(2)
            .map(|w| w[1].frequency - w[0].frequency)
            .filter(|d| *d > 0.0)
            .min_by(f64::total_cmp)
    }

    /// 2π/Δω, the time after which a finite bath revives.
    pub fn recurrence_time(&self) -> f64 {
        match self.min_spacing() {
            Some(d) => 2.0 * std::f64::consts::PI / d,
            None => f64::INFINITY,
        }
    }

    /// γ(t) = (1/M) Σ c²/(m ω²) cos(ω t).
    pub fn damping_kernel(&self, system_mass: f64, t: f64) -> f64 {
        self.oscillators.iter().map(|o| o.strength() * (o.frequency * t).cos()).sum::<f64>() / system_mass
    }

    pub fn gamma_laplace(&self, system_mass: f64, z: Complex64) -> Result<Complex64> {
        if !(z.re > 0.0) {
            return Err(QbmError::Domain(format!("Laplace transform needs Re z > 0, got {z}")));
        }
        Ok(self.gamma_laplace_unchecked(system_mass, z))
    }

    pub(crate) fn gamma_laplace_unchecked(&self, system_mass: f64, z: Complex64) -> Complex64 {
        let i = Complex64::i();
        let s: Complex64 = self
            .oscillators
            .iter()
            .map(|o| o.strength() * (1.0 / (z - i * o.frequency) + 1.0 / (z + i * o.frequency)))
            .sum();
        s / (2.0 * system_mass)
    }

    /// Symmetrized noise correlation (ħ/2) Σ (c²/mω) coth(ħω/2kT) cos(ωt).
    pub fn noise_correlation(&self, thermal: &ThermalParams, t: f64) -> f64 {
        // (ħ/2)(c²/mω)coth = (1/2)(c²/mω²)·ħω coth
        0.5 * self
            .oscillators
            .iter()
            .map(|o| o.strength() * coth_weight(o.frequency, thermal) * (o.frequency * t).cos())
            .sum::<f64>()
    }

    /// −ħ Σ (c²/mω) sin(ωt); the commutator [η(t), η(0)] is i times this.
    pub fn noise_commutator(&self, hbar: f64, t: f64) -> f64 {
        -hbar
            * self
                .oscillators
                .iter()
                .map(|o| o.strength() * o.frequency * (o.frequency * t).sin())
                .sum::<f64>()
    }

    /// Slope of [`noise_commutator`](Self::noise_commutator) at t = 0: −ħ Σ c²/m.
    pub fn noise_commutator_slope(&self, hbar: f64) -> f64 {
        -hbar * self.oscillators.iter().map(|o| o.coupling * o.coupling / o.mass).sum::<f64>()
    }
}

/// Frequency grid used to discretize a continuum friction model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathGrid {
    /// Midpoint nodes on (0, ω_max] with weights ∝ Re γ̂(ω_i) Δω.
    Linear { omega_max: f64 },
    /// ω = ω_D tan θ with equal weights; Drude only. Reproduces the
    /// Drude spectral density without truncation.
    Tangent,
}

impl BathGrid {
    pub const DEFAULT_CUTOFF_MULTIPLE: f64 = 100.0;

    /// Linear grid out to 100 ω_D for Drude friction.
    pub fn default_for(damping: &DampingModel) -> Result<Self> {
        match damping {
            DampingModel::Drude { cutoff, .. } => Ok(Self::Linear { omega_max: Self::DEFAULT_CUTOFF_MULTIPLE * cutoff }),
            _ => Err(QbmError::Domain("no default bath grid; give omega_max explicitly".into())),
        }
    }
}

/// Builds an N-oscillator bath (unit masses) whose damping kernel
/// approximates that of `damping`.
pub fn discretize_bath(damping: &DampingModel, n: usize, grid: BathGrid, system_mass: f64) -> Result<BathSpec> {
    if n < 10 {
        return Err(QbmError::Domain(format!("bath discretization needs N >= 10, got {n}")));
    }
    if !(system_mass > 0.0) {
        return Err(QbmError::Domain("system mass must be positive".into()));
    }
    let (gamma, cutoff) = match damping {
        DampingModel::Ohmic { gamma } => (*gamma, None),
        DampingModel::Drude { gamma, cutoff } => (*gamma, Some(*cutoff)),
        DampingModel::FromBath { .. } => {
            return Err(QbmError::Domain("damping is already an explicit bath".into()));
        }
    };
    if gamma == 0.0 {
        return Err(QbmError::Domain("cannot discretize zero friction".into()));
    }
    // weight W_i = c_i²/(M m_i ω_i²); with m_i = 1, c_i = ω_i √(M W_i)
    let nodes: Vec<(f64, f64)> = match grid {
        BathGrid::Linear { omega_max } => {
            if !(omega_max > 0.0) || !omega_max.is_finite() {
                return Err(QbmError::Domain(format!("omega_max must be positive, got {omega_max}")));
            }
            let dw = omega_max / n as f64;
            (0..n)
                .map(|i| {
                    let w = (i as f64 + 0.5) * dw;
                    let j = damping.spectral_density(w).expect("continuum model");
                    (w, 2.0 / std::f64::consts::PI * j * dw)
                })
                .collect()
        }
        BathGrid::Tangent => {
            let wd = cutoff.ok_or_else(|| QbmError::Domain("the tangent grid needs a Drude cutoff".into()))?;
            let dtheta = std::f64::consts::FRAC_PI_2 / n as f64;
            (0..n).map(|i| (wd * ((i as f64 + 0.5) * dtheta).tan(), gamma * wd / n as f64)).collect()
        }
    };
    if let Some(wd) = cutoff {
        let target = gamma * wd;
        let reconstructed: f64 = nodes.iter().map(|(_, w)| w).sum();
        if ((reconstructed - target) / target).abs() > COVERAGE_TOL {
            return Err(QbmError::InsufficientCoverage { reconstructed, target });
        }
    }
    BathSpec::new(
        nodes
            .into_iter()
            .map(|(w, weight)| BathOscillator { mass: 1.0, frequency: w, coupling: w * (system_mass * weight).sqrt() })
            .collect(),
    )
}

/// How to evaluate the noise correlation.
#[derive(Debug, Clone, Copy)]
pub enum NoiseRoute<'a> {
    /// Sum over the explicit bath oscillators.
    BathSum(&'a BathSpec),
    /// (M/π) ∫ Re γ̂(−iω+0⁺) ħω coth(ħω/2kT) cos(ωt) dω over (0, ∞), or
    /// over (0, band_limit) to match a bath cut off at that frequency.
    KernelIntegral { damping: &'a DampingModel, system_mass: f64, band_limit: Option<f64> },
}

pub fn noise_correlation(route: NoiseRoute<'_>, thermal: &ThermalParams, t: f64) -> Result<f64> {
    match route {
        NoiseRoute::BathSum(b) => Ok(b.noise_correlation(thermal, t)),
        NoiseRoute::KernelIntegral { damping, system_mass, band_limit } => {
            kernel_integral(damping, system_mass, thermal, t, band_limit)
        }
    }
}

fn kernel_integral(damping: &DampingModel, m: f64, thermal: &ThermalParams, t: f64, band: Option<f64>) -> Result<f64> {
    let cutoff = match damping {
        DampingModel::Drude { cutoff, .. } => *cutoff,
        DampingModel::Ohmic { gamma } if *gamma == 0.0 => return Ok(0.0),
        DampingModel::Ohmic { .. } => {
            return Err(QbmError::NonConvergence {
                what: "noise kernel integral",
                detail: "ohmic spectral density does not decay; integrand grows like omega".into(),
            })
        }
        DampingModel::FromBath { bath, .. } => return Ok(bath.noise_correlation(thermal, t)),
    };
    let f = |w: f64| m / std::f64::consts::PI * damping.spectral_density(w).unwrap_or(0.0) * coth_weight(w, thermal);
    let mut breaks = vec![cutoff];
    if !thermal.is_zero_temperature() {
        breaks.push(thermal.kt() / thermal.hbar);
    }
    breaks.sort_by(f64::total_cmp);
    let opts = QuadOptions::default();
    let t = t.abs();
    if let Some(x) = band {
        if !(x > 0.0) || !x.is_finite() {
            return Err(QbmError::Domain(format!("band limit must be positive, got {x}")));
        }
        // one breakpoint per period keeps the adaptive rule from aliasing
        let periods = if t > 0.0 { (x * t / (2.0 * std::f64::consts::PI)).ceil() as usize } else { 0 };
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b < x).collect();
        pts.extend((1..periods).map(|k| k as f64 * x / periods as f64));
        pts.sort_by(f64::total_cmp);
        return Ok(integrate(|w| f(w) * (w * t).cos(), 0.0, x, &pts, opts)?.value);
    }
    if t == 0.0 {
        let r = integrate_to_infinity(f, 0.0, &breaks, opts)?;
        return Ok(r.value);
    }
    fourier_cos_integral(f, t, 0.0, &breaks, opts)
}

/// Stationary Gaussian operator noise generated by an explicit bath.
#[derive(Debug, Clone)]
pub struct NoiseStatistics {
    pub bath: BathSpec,
    pub thermal: ThermalParams,
}

impl NoiseStatistics {
    pub fn new(bath: BathSpec, thermal: ThermalParams) -> Self {
        Self { bath, thermal }
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn s_eta(&self, t: f64) -> f64 {
        self.bath.noise_correlation(&self.thermal, t)
    }

    pub fn commutator(&self, t: f64, s: f64) -> f64 {
        self.bath.noise_commutator(self.thermal.hbar, t - s)
    }
}
