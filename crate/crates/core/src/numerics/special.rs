//! Trigamma, complex log-gamma and the thermal weight ħω coth(ħω/2kT).

use num_complex::Complex64;

use crate::error::{QbmError, Result};
use crate::units::ThermalParams;

/// Bernoulli numbers B_2 … B_14.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

const ASYMPTOTIC_RADIUS: f64 = 10.0;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn needs_shift(z: Complex64) -> bool {
    z.re < 0.0 || z.norm() < ASYMPTOTIC_RADIUS
}

/// ψ′(z), the derivative of the digamma function.
///
/// Shifts z upward with ψ′(z) = ψ′(z+1) + 1/z² until Re z ≥ 0 and |z| ≥ 10,
/// then sums ψ′(z) ~ 1/z + 1/2z² + Σ B_2k / z^(2k+1) over six Bernoulli terms.
pub fn trigamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(QbmError::Pole { function: "trigamma", z: format!("{z}") });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(QbmError::Domain(format!("trigamma argument not finite: {z}")));
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while needs_shift(z) {
        shift += (z * z).inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv * inv2;
    for b in BERNOULLI.iter().take(6) {
        series += pow * *b;
        pow *= inv2;
    }
    Ok(shift + inv + 0.5 * inv2 + series)
}

/// A branch of ln Γ(z) (exact modulo 2πi), via Stirling's series after an
/// upward shift. Suitable wherever only exp(ln Γ) or its real part matters.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(QbmError::Pole { function: "ln_gamma", z: format!("{z}") });
    }
    let mut z = z;
    let mut log_prod = Complex64::new(0.0, 0.0);
    while needs_shift(z) {
        log_prod += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k + 1) as f64;
        series += pow * (*b / (two_k * (two_k - 1.0)));
        pow *= inv2;
    }
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok((z - 0.5) * z.ln() - z + half_ln_2pi + series - log_prod)
}

/// x coth x, even and equal to 1 at the origin.
pub fn x_coth_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else if ax > 20.0 {
        ax
    } else {
        ax / ax.tanh()
    }
}

/// ħω coth(ħω/2kT): 2kT at ω = 0 and ħ|ω| at T = 0.
pub fn coth_weight(omega: f64, thermal: &ThermalParams) -> f64 {
    if thermal.is_zero_temperature() {
        return thermal.hbar * omega.abs();
    }
    let two_kt = 2.0 * thermal.kt();
    two_kt * x_coth_x(thermal.hbar * omega / two_kt)
}

/// coth(ħω/2kT) for ω ≠ 0; sign(ω) at T = 0.
pub fn thermal_coth(omega: f64, thermal: &ThermalParams) -> f64 {
    if thermal.is_zero_temperature() {
        return omega.signum();
    }
    let x = thermal.hbar * omega / (2.0 * thermal.kt());
    1.0 / x.tanh()
}

/// Bose term ħω/(e^{βħω} − 1) with its ω → 0 limit kT; zero at T = 0 for ω > 0.
pub fn bose_energy(omega: f64, thermal: &ThermalParams) -> f64 {
    if thermal.is_zero_temperature() {
        return if omega >= 0.0 { 0.0 } else { -thermal.hbar * omega };
    }
    let x = thermal.hbar * omega / thermal.kt();
    if x.abs() < 1e-12 {
        return thermal.kt();
    }
    thermal.hbar * omega / x.exp_m1()
}
