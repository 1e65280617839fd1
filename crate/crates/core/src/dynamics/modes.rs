//! Normal modes of the system–bath potential in mass-weighted coordinates.
//!
//! The potential matrix is an arrowhead: the system coordinate couples to
//! every bath coordinate and the bath block is diagonal.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bath::BathSpec;
use crate::error::{QbmError, Result};
use crate::oscillator::OscillatorSpec;

/// Arrowhead data [[a, bᵀ], [b, diag(d)]].
#[derive(Debug, Clone)]
pub struct Arrowhead {
    pub a: f64,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
}

impl Arrowhead {
    pub fn from_system(spec: &OscillatorSpec, bath: Option<&BathSpec>) -> Self {
        let m = spec.mass;
        let mut a = spec.omega0 * spec.omega0;
        let (mut b, mut d) = (Vec::new(), Vec::new());
        if let Some(bath) = bath {
            for o in bath.oscillators() {
                a += o.strength() / m;
                b.push(-o.coupling / (m * o.mass).sqrt());
                d.push(o.frequency * o.frequency);
            }
        }
        Self { a, b, d }
    }

    pub fn dim(&self) -> usize {
        self.d.len() + 1
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut k = DMatrix::zeros(n, n);
        k[(0, 0)] = self.a;
        for (i, (&b, &d)) in self.b.iter().zip(&self.d).enumerate() {
            k[(0, i + 1)] = b;
            k[(i + 1, 0)] = b;
            k[(i + 1, i + 1)] = d;
        }
        k
    }

    /// Secular function with λ = anchor + τ, anchor being d[j] or 0.
    fn secular(&self, anchor: Option<usize>, tau: f64) -> f64 {
        let base = anchor.map_or(0.0, |j| self.d[j]);
        let mut s = self.a - base - tau;
        for (i, (&b, &d)) in self.b.iter().zip(&self.d).enumerate() {
            let gap = match anchor {
                Some(j) if j == i => -tau,
                _ => (d - base) - tau,
            };
            s -= b * b / gap;
        }
        s
    }

    fn weight(&self, anchor: Option<usize>, tau: f64) -> f64 {
        let base = anchor.map_or(0.0, |j| self.d[j]);
        let mut s = 1.0;
        for (i, (&b, &d)) in self.b.iter().zip(&self.d).enumerate() {
            let gap = match anchor {
                Some(j) if j == i => -tau,
                _ => (d - base) - tau,
            };
            s += (b / gap).powi(2);
        }
        1.0 / s
    }
}

/// Root of a decreasing function on (lo, hi) by bisection to full precision.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Normal-mode frequencies and the weight of the system coordinate in
/// each mode, |⟨q|k⟩|² in mass-weighted coordinates.
#[derive(Debug, Clone)]
pub struct NormalModes {
    pub frequencies: Vec<f64>,
    pub q_weights: Vec<f64>,
    /// Σ_k Ω_k − Σ_i ω_i, computed without cancellation.
    pub frequency_excess: f64,
}

impl NormalModes {
    /// Solves the arrowhead secular equation, one root per interval
    /// between consecutive bath frequencies. O(N²).
    pub fn arrowhead(ah: &Arrowhead) -> Result<Self> {
        let n = ah.d.len();
        for i in 0..n {
            if ah.b[i] == 0.0 || (i > 0 && ah.d[i] <= ah.d[i - 1]) {
                return Err(QbmError::Domain(
                    "arrowhead modes need distinct bath frequencies and nonzero couplings; use the dense route".into(),
                ));
            }
        }
        if n == 0 {
            let w = ah.a.sqrt();
            return Ok(Self { frequencies: vec![w], q_weights: vec![1.0], frequency_excess: w });
        }
        if ah.secular(None, 0.0) <= 0.0 {
            return Err(QbmError::NotPositiveDefinite("potential matrix has a non-positive eigenvalue".into()));
        }
        let mut freqs = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        let mut excess = 0.0;
        // lowest root in (0, d_0)
        {
            let mid = 0.5 * ah.d[0];
            let (anchor, lo, hi) =
                if ah.secular(None, mid) > 0.0 { (Some(0), mid - ah.d[0], 0.0) } else { (None, 0.0, mid) };
            let tau = bisect_decreasing(|t| ah.secular(anchor, t), lo, hi);
            let lam = anchor.map_or(0.0, |j| ah.d[j]) + tau;
            freqs.push(lam.sqrt());
            weights.push(ah.weight(anchor, tau));
            excess += lam.sqrt();
        }
        for k in 0..n {
            let (anchor, lo, hi) = if k + 1 < n {
                let gap = ah.d[k + 1] - ah.d[k];
                if ah.secular(Some(k), 0.5 * gap) > 0.0 {
                    (k + 1, -0.5 * gap, 0.0)
                } else {
                    (k, 0.0, 0.5 * gap)
                }
            } else {
                let norm_b = ah.b.iter().map(|b| b * b).sum::<f64>().sqrt();
                (k, 0.0, (ah.a - ah.d[k]).max(0.0) + norm_b + f64::MIN_POSITIVE)
            };
            let tau = bisect_decreasing(|t| ah.secular(Some(anchor), t), lo, hi);
            let lam = ah.d[anchor] + tau;
            // λ_k − d_k without cancellation
            let above = if anchor == k { tau } else { (ah.d[k + 1] - ah.d[k]) + tau };
            let w = lam.sqrt();
            freqs.push(w);
            weights.push(ah.weight(Some(anchor), tau));
            excess += above / (w + ah.d[k].sqrt());
        }
        Ok(Self { frequencies: freqs, q_weights: weights, frequency_excess: excess })
    }
}

/// Full eigendecomposition K = U Ω² Uᵀ for moderate sizes.
#[derive(Debug, Clone)]
pub struct DenseModes {
    pub frequencies: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl DenseModes {
    pub fn new(potential: &DMatrix<f64>) -> Result<Self> {
        let eig = SymmetricEigen::new(potential.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        if let Some(&i) = order.first() {
            if !(eig.eigenvalues[i] > 0.0) {
                return Err(QbmError::NotPositiveDefinite(format!(
                    "potential matrix eigenvalue {} is not positive",
                    eig.eigenvalues[i]
                )));
            }
        }
        let frequencies = order.iter().map(|&i| eig.eigenvalues[i].sqrt()).collect();
        let vectors = DMatrix::from_fn(potential.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { frequencies, vectors })
    }
}
