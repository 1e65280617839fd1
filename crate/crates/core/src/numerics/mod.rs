//! Special functions, summation and quadrature shared by the physics modules.

pub mod quad;
pub mod roots;
pub mod series;
pub mod special;

pub use quad::{fourier_cos_integral, integrate, integrate_to_infinity, QuadOptions, QuadResult};
pub use roots::bisect;
pub use series::{
    adaptive_tail_sum, adaptive_tail_sum_complex, hurwitz_zeta, richardson, smooth_series_sum, tail_corrected_sum,
    tail_corrected_sum_complex,
    wynn_epsilon, AdaptiveSum, SumOutcome,
};
pub use special::{bose_energy, coth_weight, ln_gamma, thermal_coth, trigamma, x_coth_x};
