//! Exact Gaussian dynamics of the oscillator coupled to an explicit bath.
//!
//! Phase-space vectors are ordered (q, p, x₁, p₁, …, x_N, p_N). States are
//! means plus symmetrized covariances ½⟨{zᵢ, zⱼ}⟩ − ⟨zᵢ⟩⟨zⱼ⟩.

mod modes;

pub use modes::{Arrowhead, DenseModes, NormalModes};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{QbmError, Result};
use crate::numerics::coth_weight;
use crate::oscillator::{OscillatorSpec, SecondMoments};
use crate::units::ThermalParams;

/// Largest phase-space dimension handled with dense linear algebra.
pub const DENSE_DIM_CAP: usize = 4002;

/// Dense energy bookkeeping is skipped above this dimension.
pub const ENERGY_DIM_CAP: usize = 1002;

#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    spec: OscillatorSpec,
    bath: Option<BathSpec>,
    arrow: Arrowhead,
}

pub fn build_hamiltonian(spec: &OscillatorSpec, bath: Option<&BathSpec>) -> QuadraticHamiltonian {
    QuadraticHamiltonian::new(spec, bath)
}

impl QuadraticHamiltonian {
    pub fn new(spec: &OscillatorSpec, bath: Option<&BathSpec>) -> Self {
        Self { spec: *spec, bath: bath.cloned(), arrow: Arrowhead::from_system(spec, bath) }
    }

    pub fn spec(&self) -> &OscillatorSpec {
        &self.spec
    }

    pub fn bath(&self) -> Option<&BathSpec> {
        self.bath.as_ref()
    }

    pub fn n_bath(&self) -> usize {
        self.bath.as_ref().map_or(0, BathSpec::len)
    }

    pub fn dim(&self) -> usize {
        2 * self.n_bath() + 2
    }

    fn masses(&self) -> Vec<f64> {
        let mut m = vec![self.spec.mass];
        if let Some(b) = &self.bath {
            m.extend(b.oscillators().iter().map(|o| o.mass));
        }
        m
    }

    /// Symmetric matrix of H = ½ zᵀ·hessian·z.
    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        h[(0, 0)] = self.spec.mass * self.arrow.a;
        h[(1, 1)] = 1.0 / self.spec.mass;
        if let Some(b) = &self.bath {
            for (i, o) in b.oscillators().iter().enumerate() {
                let (x, p) = (2 + 2 * i, 3 + 2 * i);
                h[(x, x)] = o.mass * o.frequency * o.frequency;
                h[(p, p)] = 1.0 / o.mass;
                h[(0, x)] = -o.coupling;
                h[(x, 0)] = -o.coupling;
            }
        }
        h
    }

    pub fn arrowhead(&self) -> &Arrowhead {
        &self.arrow
    }

    pub fn normal_modes(&self) -> Result<NormalModes> {
        NormalModes::arrowhead(&self.arrow)
    }

    pub fn dense_modes(&self) -> Result<DenseModes> {
        self.check_dense()?;
        DenseModes::new(&self.arrow.dense())
    }

    fn check_dense(&self) -> Result<()> {
        if self.dim() > DENSE_DIM_CAP {
            return Err(QbmError::Domain(format!(
                "phase-space dimension {} exceeds the dense cap {DENSE_DIM_CAP}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// 2π/Δω for the bath grid; infinite without a bath.
    pub fn recurrence_time(&self) -> f64 {
        self.bath.as_ref().map_or(f64::INFINITY, BathSpec::recurrence_time)
    }

    /// ⟨H⟩ for a Gaussian state.
    pub fn energy(&self, state: &GaussianState) -> f64 {
        let h = self.hessian();
        0.5 * ((&h * &state.cov).trace() + state.mean.dot(&(&h * &state.mean)))
    }

    /// S(t) = exp(t J H) from the normal modes.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<f64>> {
        let modes = self.dense_modes()?;
        Ok(propagator_from_modes(&modes, &self.masses(), t, None))
    }

    /// S(t) by nalgebra's scaling-and-squaring matrix exponential.
    pub fn propagator_expm(&self, t: f64) -> Result<DMatrix<f64>> {
        self.check_dense()?;
        let a = symplectic_form(self.dim()) * self.hessian() * t;
        let s = a.exp();
        if s.iter().any(|x| !x.is_finite()) {
            return Err(QbmError::MatrixExponential(format!("non-finite entries at t = {t}")));
        }
        Ok(s)
    }
}

/// Rows of S(t) (all rows if `rows` is None) in original coordinates.
fn propagator_from_modes(modes: &DenseModes, masses: &[f64], t: f64, rows: Option<&[usize]>) -> DMatrix<f64> {
    let n1 = masses.len();
    let u = &modes.vectors;
    let w = &modes.frequencies;
    let cos: Vec<f64> = w.iter().map(|w| (w * t).cos()).collect();
    let sin_w: Vec<f64> = w.iter().map(|w| (w * t).sin() / w).collect();
    let w_sin: Vec<f64> = w.iter().map(|w| (w * t).sin() * w).collect();
    let all: Vec<usize> = (0..2 * n1).collect();
    let rows = rows.unwrap_or(&all);
    let coords: Vec<usize> = {
        let mut c: Vec<usize> = rows.iter().map(|r| r / 2).collect();
        c.dedup();
        c
    };
    // U_r diag(f) Uᵀ for the needed coordinate rows
    let block = |f: &[f64]| -> DMatrix<f64> {
        let mut left = DMatrix::zeros(coords.len(), n1);
        for (a, &r) in coords.iter().enumerate() {
            for k in 0..n1 {
                left[(a, k)] = u[(r, k)] * f[k];
            }
        }
        left * u.transpose()
    };
    let (c, sn, sp) = (block(&cos), block(&sin_w), block(&w_sin));
    let sq: Vec<f64> = masses.iter().map(|m| m.sqrt()).collect();
    let mut s = DMatrix::zeros(rows.len(), 2 * n1);
    for (out, &row) in rows.iter().enumerate() {
        let r = row / 2;
        let a = coords.iter().position(|&x| x == r).expect("coordinate present");
        for col in 0..n1 {
            if row % 2 == 0 {
                s[(out, 2 * col)] = c[(a, col)] * sq[col] / sq[r];
                s[(out, 2 * col + 1)] = sn[(a, col)] / (sq[r] * sq[col]);
            } else {
                s[(out, 2 * col)] = -sp[(a, col)] * sq[r] * sq[col];
                s[(out, 2 * col + 1)] = c[(a, col)] * sq[r] / sq[col];
            }
        }
    }
    s
}

/// Interleaved symplectic form, J = ⊕ [[0, 1], [−1, 0]].
pub fn symplectic_form(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..dim / 2 {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// max |SᵀJS − J|.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(s.nrows());
    (s.transpose() * &j * s - j).amax()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Smallest eigenvalue of cov + (iħ/2)J, via its real 2n×2n form.
    /// Non-negative for a physical state.
    pub fn uncertainty_margin(&self, hbar: f64) -> f64 {
        let n = self.dim();
        let j = symplectic_form(n) * (0.5 * hbar);
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        big.view_mut((n, n), (n, n)).copy_from(&self.cov);
        big.view_mut((0, n), (n, n)).copy_from(&(-&j));
        big.view_mut((n, 0), (n, n)).copy_from(&j);
        SymmetricEigen::new(big).eigenvalues.min()
    }

    pub fn check_physical(&self, hbar: f64) -> Result<()> {
        let m = self.uncertainty_margin(hbar);
        let scale = self.cov.amax().max(hbar);
        if m < -1e-9 * scale {
            return Err(QbmError::NotPositiveDefinite(format!("cov + i hbar J/2 has eigenvalue {m}")));
        }
        Ok(())
    }

    /// System block [[⟨δq²⟩, ⟨δqδp⟩], [⟨δqδp⟩, ⟨δp²⟩]].
    pub fn system_block(&self) -> [[f64; 2]; 2] {
        [[self.cov[(0, 0)], self.cov[(0, 1)]], [self.cov[(1, 0)], self.cov[(1, 1)]]]
    }

    pub fn system_determinant(&self) -> f64 {
        let b = self.system_block();
        b[0][0] * b[1][1] - b[0][1] * b[1][0]
    }

    /// p → −p for every momentum.
    pub fn flip_momenta(&self) -> Self {
        let n = self.dim();
        let sign = DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
        let mean = self.mean.component_mul(&sign);
        let cov = DMatrix::from_fn(n, n, |i, j| self.cov[(i, j)] * sign[i] * sign[j]);
        Self { mean, cov }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.mean - &other.mean).amax().max((&self.cov - &other.cov).amax())
    }
}

/// mean ← S·mean, cov ← S·cov·Sᵀ.
pub fn apply_propagator(state: &GaussianState, s: &DMatrix<f64>) -> GaussianState {
    GaussianState { mean: s * &state.mean, cov: s * &state.cov * s.transpose() }
}

pub fn propagate(state: &GaussianState, h: &QuadraticHamiltonian, t: f64) -> Result<GaussianState> {
    Ok(apply_propagator(state, &h.propagator(t)?))
}

fn mode_covariances(w: f64, thermal: &ThermalParams) -> (f64, f64) {
    let cw = coth_weight(w, thermal);
    // (ħ/2Ω) coth(βħΩ/2), (ħΩ/2) coth(βħΩ/2)
    (cw / (2.0 * w * w), 0.5 * cw)
}

/// Canonical equilibrium of the full system plus bath.
pub fn equilibrium_covariance(h: &QuadraticHamiltonian, thermal: &ThermalParams) -> Result<GaussianState> {
    Ok(equilibrium_from_modes(&h.dense_modes()?, &h.masses(), thermal))
}

fn equilibrium_from_modes(modes: &DenseModes, masses: &[f64], thermal: &ThermalParams) -> GaussianState {
    let n1 = masses.len();
    let u = &modes.vectors;
    let (fy, fp): (Vec<f64>, Vec<f64>) = modes.frequencies.iter().map(|&w| mode_covariances(w, thermal)).unzip();
    let sandwich = |f: &[f64]| {
        let mut left = u.clone();
        for k in 0..n1 {
            left.column_mut(k).scale_mut(f[k]);
        }
        left * u.transpose()
    };
    let (syy, spp) = (sandwich(&fy), sandwich(&fp));
    let sq: Vec<f64> = masses.iter().map(|m| m.sqrt()).collect();
    let mut cov = DMatrix::zeros(2 * n1, 2 * n1);
    for r in 0..n1 {
        for c in 0..n1 {
            cov[(2 * r, 2 * c)] = syy[(r, c)] / (sq[r] * sq[c]);
            cov[(2 * r + 1, 2 * c + 1)] = spp[(r, c)] * sq[r] * sq[c];
        }
    }
    GaussianState { mean: DVector::zeros(2 * n1), cov }
}

/// S_qq(t) by propagating the q row of phase space against the dense
/// equilibrium covariance: ½⟨{q(t), q(0)}⟩ = [S(t) Σ_eq]_(q,q).
pub fn simulated_correlation(h: &QuadraticHamiltonian, thermal: &ThermalParams, times: &[f64]) -> Result<Vec<f64>> {
    let modes = h.dense_modes()?;
    let masses = h.masses();
    let eq = equilibrium_from_modes(&modes, &masses, thermal);
    let col = eq.cov.column(0).into_owned();
    Ok(times
        .iter()
        .map(|&t| (propagator_from_modes(&modes, &masses, t, Some(&[0])).row(0) * &col)[(0, 0)])
        .collect())
}

/// ⟨q²⟩ and ⟨p²⟩ of the system in the global equilibrium, O(N²).
pub fn equilibrium_moments(h: &QuadraticHamiltonian, thermal: &ThermalParams) -> Result<SecondMoments> {
    let modes = h.normal_modes()?;
    let m = h.spec.mass;
    let (mut q2, mut p2) = (0.0, 0.0);
    for (&w, &u2) in modes.frequencies.iter().zip(&modes.q_weights) {
        let (fy, fp) = mode_covariances(w, thermal);
        q2 += u2 * fy;
        p2 += u2 * fp;
    }
    Ok(SecondMoments { q2: q2 / m, p2: p2 * m })
}

/// Symmetrized equilibrium S_qq(t) = [S(t) Σ_eq]_(q,q) at each time, O(N²)
/// once plus O(N) per time.
pub fn two_time_correlation(h: &QuadraticHamiltonian, thermal: &ThermalParams, times: &[f64]) -> Result<Vec<f64>> {
    let modes = h.normal_modes()?;
    let m = h.spec.mass;
    let amps: Vec<(f64, f64)> =
        modes.frequencies.iter().zip(&modes.q_weights).map(|(&w, &u2)| (w, u2 * mode_covariances(w, thermal).0 / m)).collect();
    Ok(times.iter().map(|&t| amps.iter().map(|(w, a)| a * (w * t).cos()).sum()).collect())
}

/// ln(Z_total/Z_bath) at inverse temperature β from the normal modes.
pub fn ln_partition_ratio(h: &QuadraticHamiltonian, thermal: &ThermalParams) -> Result<f64> {
    thermal.require_finite("normal-mode partition function")?;
    let modes = h.normal_modes()?;
    let hb = thermal.hbar_beta();
    let occupied = |w: f64| (-(-hb * w).exp()).ln_1p();
    let mut s = -0.5 * hb * modes.frequency_excess;
    s -= modes.frequencies.iter().map(|&w| occupied(w)).sum::<f64>();
    if let Some(b) = &h.bath {
        s += b.oscillators().iter().map(|o| occupied(o.frequency)).sum::<f64>();
    }
    Ok(s)
}

/// Zero-point energy shift (ħ/2)(Σ Ω_k − Σ ω_i).
pub fn ground_state_energy(h: &QuadraticHamiltonian, hbar: f64) -> Result<f64> {
    Ok(0.5 * hbar * h.normal_modes()?.frequency_excess)
}

/// How the bath is prepared in a product initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathPreparation {
    /// Canonical state of the free bath.
    Canonical,
    /// Canonical state of oscillators centred at c_i q/(m_i ω_i²).
    Shifted,
}

/// System state × bath state, with the bath thermal at `thermal`.
pub fn factorized_state(
    h: &QuadraticHamiltonian,
    system_mean: [f64; 2],
    system_cov: [[f64; 2]; 2],
    thermal: &ThermalParams,
    prep: BathPreparation,
) -> GaussianState {
    let n = h.dim();
    let mut mean = DVector::zeros(n);
    let mut cov = DMatrix::zeros(n, n);
    mean[0] = system_mean[0];
    mean[1] = system_mean[1];
    for a in 0..2 {
        for b in 0..2 {
            cov[(a, b)] = system_cov[a][b];
        }
    }
    if let Some(bath) = &h.bath {
        for (i, o) in bath.oscillators().iter().enumerate() {
            let (fy, fp) = mode_covariances(o.frequency, thermal);
            cov[(2 + 2 * i, 2 + 2 * i)] = fy / o.mass;
            cov[(3 + 2 * i, 3 + 2 * i)] = fp * o.mass;
        }
        if prep == BathPreparation::Shifted {
            // x_i = s_i q + ξ_i with ξ independent of the system
            let mut a = DMatrix::identity(n, n);
            for (i, o) in bath.oscillators().iter().enumerate() {
                a[(2 + 2 * i, 0)] = o.coupling / (o.mass * o.frequency * o.frequency);
            }
            mean = &a * mean;
            cov = &a * cov * a.transpose();
        }
    }
    GaussianState { mean, cov }
}

/// Coefficients a(t) with ξ(t) = a(t)·z(0): the free bath force minus the
/// initial slip Mγ(t)q(0).
fn noise_coefficients(h: &QuadraticHamiltonian, t: f64) -> DVector<f64> {
    let mut a = DVector::zeros(h.dim());
    if let Some(bath) = &h.bath {
        a[0] = -h.spec.mass * bath.damping_kernel(h.spec.mass, t);
        for (i, o) in bath.oscillators().iter().enumerate() {
            let w = o.frequency;
            a[2 + 2 * i] = o.coupling * (w * t).cos();
            a[3 + 2 * i] = o.coupling * (w * t).sin() / (o.mass * w);
        }
    }
    a
}

/// Symmetrized ⟨ξ(t)ξ(s)⟩ of the quantum-Langevin noise for a prepared state.
pub fn noise_covariance(h: &QuadraticHamiltonian, initial: &GaussianState, t: f64, s: f64) -> f64 {
    let (a, b) = (noise_coefficients(h, t), noise_coefficients(h, s));
    let mt = &initial.mean;
    a.dot(&(&initial.cov * &b)) + a.dot(mt) * b.dot(mt)
}

/// Symmetrized ⟨q(0)ξ(t)⟩ − ⟨q(0)⟩⟨ξ(t)⟩.
pub fn position_noise_covariance(h: &QuadraticHamiltonian, initial: &GaussianState, t: f64) -> f64 {
    initial.cov.row(0).transpose().dot(&noise_coefficients(h, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSample {
    pub t: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    /// ⟨q²⟩ including the mean.
    pub q2: f64,
    pub p2: f64,
    /// Determinant of the system covariance block.
    pub det_cov: f64,
    /// ⟨H⟩; NaN above [`ENERGY_DIM_CAP`].
    pub energy: f64,
    /// ⟨q(0)ξ(t)⟩.
    pub q_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationRun {
    pub samples: Vec<RelaxationSample>,
    pub recurrence_time: f64,
    pub warning: Option<String>,
}

pub fn relaxation_run(initial: &GaussianState, h: &QuadraticHamiltonian, times: &[f64]) -> Result<RelaxationRun> {
    let modes = h.dense_modes()?;
    let masses = h.masses();
    let with_energy = h.dim() <= ENERGY_DIM_CAP;
    let hess = with_energy.then(|| h.hessian());
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let sample = if let Some(hess) = &hess {
            let s = propagator_from_modes(&modes, &masses, t, None);
            let st = apply_propagator(initial, &s);
            let energy = 0.5 * ((hess * &st.cov).trace() + st.mean.dot(&(hess * &st.mean)));
            sample_from(t, &st.mean.rows(0, 2).into_owned(), &st.cov.view((0, 0), (2, 2)).into_owned(), energy)
        } else {
            let s = propagator_from_modes(&modes, &masses, t, Some(&[0, 1]));
            let mean = &s * &initial.mean;
            let cov = &s * &initial.cov * s.transpose();
            sample_from(t, &mean, &cov, f64::NAN)
        };
        samples.push(RelaxationSample { q_noise: position_noise_covariance(h, initial, t), ..sample });
    }
    let recurrence_time = h.recurrence_time();
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let warning = (horizon > recurrence_time)
        .then(|| format!("horizon {horizon} exceeds the bath recurrence time {recurrence_time:.4}"));
    Ok(RelaxationRun { samples, recurrence_time, warning })
}

fn sample_from(t: f64, mean: &DVector<f64>, cov: &DMatrix<f64>, energy: f64) -> RelaxationSample {
    RelaxationSample {
        t,
        mean_q: mean[0],
        mean_p: mean[1],
        q2: cov[(0, 0)] + mean[0] * mean[0],
        p2: cov[(1, 1)] + mean[1] * mean[1],
        det_cov: cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(1, 0)],
        energy,
        q_noise: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    /// Distance to the initial state after propagate, flip, propagate, flip.
    pub round_trip_error: f64,
    /// Same without the momentum flips.
    pub unflipped_error: f64,
}

pub fn time_reversal_check(h: &QuadraticHamiltonian, initial: &GaussianState, t: f64) -> Result<ReversalReport> {
    let s = h.propagator(t)?;
    let end = apply_propagator(initial, &s);
    let back = apply_propagator(&end.flip_momenta(), &s).flip_momenta();
    let wrong = apply_propagator(&end, &s);
    Ok(ReversalReport { round_trip_error: back.distance(initial), unflipped_error: wrong.distance(initial) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize_bath, BathGrid};
    use crate::damping::DampingModel;
    use crate::oscillator::second_moments;

    fn th(t: f64) -> ThermalParams {
        ThermalParams::new(t).unwrap()
    }

    fn system(n: usize) -> QuadraticHamiltonian {
        let spec = OscillatorSpec::new(1.0, 1.0).unwrap();
        let bath = discretize_bath(&DampingModel::drude(0.3, 5.0).unwrap(), n, BathGrid::Linear { omega_max: 100.0 }, 1.0)
            .unwrap();
        QuadraticHamiltonian::new(&spec, Some(&bath))
    }

    #[test]
    fn hessian_structure() {
        let spec = OscillatorSpec::new(2.0, 1.5).unwrap();
        let h = QuadraticHamiltonian::new(&spec, None).hessian();
        assert_eq!(h.shape(), (2, 2));
        assert!((h[(0, 0)] - 4.5).abs() < 1e-15 && (h[(1, 1)] - 0.5).abs() < 1e-15);
        let bath = BathSpec::single(1.5, 2.0, 0.7).unwrap();
        let h = QuadraticHamiltonian::new(&spec, Some(&bath)).hessian();
        assert_eq!(h.shape(), (4, 4));
        assert_eq!(h[(0, 2)], -0.7);
        assert!((h[(0, 0)] - (4.5 + 0.49 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn propagator_routes_agree_and_are_symplectic() {
        let h = system(20);
        let a = h.propagator(3.7).unwrap();
        let b = h.propagator_expm(3.7).unwrap();
        assert!((&a - &b).amax() < 1e-9 * a.amax(), "{}", (&a - &b).amax());
        assert!(symplectic_defect(&a) < 1e-10);
        let rows = propagator_from_modes(&h.dense_modes().unwrap(), &h.masses(), 3.7, Some(&[0, 1, 5]));
        for (k, r) in [0usize, 1, 5].iter().enumerate() {
            assert!((rows.row(k) - a.row(*r)).amax() < 1e-13);
        }
    }

    #[test]
    fn isolated_oscillator_is_periodic() {
        let spec = OscillatorSpec::new(1.0, 2.0).unwrap();
        let h = QuadraticHamiltonian::new(&spec, None);
        let st = GaussianState { mean: DVector::from_vec(vec![1.0, 0.0]), cov: DMatrix::from_row_slice(2, 2, &[0.7, 0.1, 0.1, 0.9]) };
        let period = PI_F / 2.0;
        let back = propagate(&st, &h, 2.0 * period).unwrap();
        assert!(back.distance(&st) < 1e-9);
        let half = propagate(&st, &h, period).unwrap();
        assert!((half.cov - &st.cov).amax() < 1e-9);
    }

    const PI_F: f64 = std::f64::consts::PI;

    #[test]
    fn equilibrium_is_stationary_and_matches_matsubara() {
        let h = system(60);
        let eq = equilibrium_covariance(&h, &th(0.5)).unwrap();
        eq.check_physical(1.0).unwrap();
        let later = propagate(&eq, &h, 4.2).unwrap();
        assert!(later.distance(&eq) < 1e-9);
        let m = equilibrium_moments(&h, &th(0.5)).unwrap();
        assert!((m.q2 - eq.cov[(0, 0)]).abs() < 1e-12 && (m.p2 - eq.cov[(1, 1)]).abs() < 1e-10);
        // exact identity with the Matsubara sum over the same bath
        let damp = DampingModel::from_bath(h.bath().unwrap().clone(), 1.0).unwrap();
        let s = second_moments(h.spec(), &damp, &th(0.5), None).unwrap();
        assert!(((s.q2 - m.q2) / m.q2).abs() < 1e-9 && ((s.p2 - m.p2) / m.p2).abs() < 1e-9);
    }

    #[test]
    fn correlation_is_propagated_covariance() {
        let h = system(30);
        let eq = equilibrium_covariance(&h, &th(0.3)).unwrap();
        let times = [0.0, 0.8, 2.5];
        let c = two_time_correlation(&h, &th(0.3), &times).unwrap();
        for (t, v) in times.iter().zip(&c) {
            let s = h.propagator(*t).unwrap();
            let direct = (&s * &eq.cov)[(0, 0)];
            assert!((direct - v).abs() < 1e-12);
        }
        let sim = simulated_correlation(&h, &th(0.3), &times).unwrap();
        for (a, b) in sim.iter().zip(&c) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_undamped_moments() {
        let spec = OscillatorSpec::new(1.0, 1.0).unwrap();
        let h = QuadraticHamiltonian::new(&spec, None);
        let m = equilibrium_moments(&h, &th(1.0)).unwrap();
        assert!((m.q2 - 0.5 / 0.5f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn time_reversal() {
        let h = system(20);
        let st = factorized_state(&h, [1.0, -0.5], [[0.6, 0.0], [0.0, 0.6]], &th(0.2), BathPreparation::Canonical);
        let r = time_reversal_check(&h, &st, 7.0).unwrap();
        assert!(r.round_trip_error < 1e-8 && r.unflipped_error > 1e-2);
    }

    #[test]
    fn shifted_preparation_gives_stationary_noise() {
        let h = system(40);
        let thermal = th(0.4);
        let sys = [[0.8, 0.0], [0.0, 0.7]];
        let shifted = factorized_state(&h, [0.0, 0.0], sys, &thermal, BathPreparation::Shifted);
        let plain = factorized_state(&h, [0.0, 0.0], sys, &thermal, BathPreparation::Canonical);
        let bath = h.bath().unwrap();
        for (t, s) in [(0.3, 0.1), (0.6, 0.2)] {
            let expected = bath.noise_correlation(&thermal, t - s);
            assert!((noise_covariance(&h, &shifted, t, s) - expected).abs() < 1e-10 * expected.abs().max(1.0));
            assert!((noise_covariance(&h, &plain, t, s) - expected).abs() > 1e-3);
        }
        assert!(position_noise_covariance(&h, &shifted, 0.5).abs() < 1e-12);
        assert!(position_noise_covariance(&h, &plain, 0.5).abs() > 1e-3);
    }

    #[test]
    fn relaxation_conserves_energy() {
        let h = system(30);
        let st = factorized_state(&h, [1.0, 0.0], [[0.5, 0.0], [0.0, 0.5]], &th(0.1), BathPreparation::Shifted);
        let run = relaxation_run(&st, &h, &[0.0, 0.7, 1.5]).unwrap();
        let e0 = run.samples[0].energy;
        for s in &run.samples {
            assert!(((s.energy - e0) / e0).abs() < 1e-9);
            assert!(s.det_cov >= 0.25 * (1.0 - 1e-9));
        }
        assert!(run.warning.is_none());
        let long = relaxation_run(&st, &h, &[0.0, 2.0 * h.recurrence_time()]).unwrap();
        assert!(long.warning.is_some());
    }
}
