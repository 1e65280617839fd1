//! Equilibrium quantum Brownian motion.
//!
//! Fluctuation–dissipation spectra, the damped harmonic oscillator, the
//! Caldeira–Leggett oscillator bath and imaginary-time metastability, with
//! an exact N-oscillator Gaussian simulator that checks the analytic
//! results from first principles.

pub mod bath;
pub mod cli;
pub mod damping;
pub mod dynamics;
pub mod error;
pub mod imaginary_time;
pub mod response;
pub mod thermo;
pub mod numerics;
pub mod oscillator;
pub mod units;

pub use error::{QbmError, Result};
pub use units::{MatsubaraSet, ThermalParams};
pub use bath::{BathGrid, BathOscillator, BathSpec};
pub use damping::DampingModel;
