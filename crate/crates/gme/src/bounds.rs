//! Closed-form quantities around the geometric measure: the σ↔GME maps, the
//! dimension-only upper bound, and an exact bipartite oracle.
//!
//! For a normalized state with maximal product-state overlap σ, the geometric
//! measure is `d = √(2 − 2σ)`. The bound depends only on the mode dimensions:
//! sort them ascending, drop the largest, and σ can never fall below the
//! reciprocal square root of the remaining product, which caps the measure at
//! `√(2 − 2/√(d₁⋯d_{n−1}))`. In the two-mode case σ is the largest singular
//! value, giving an independent check on the iterative solver.

use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::{ProductState, StateTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("sigma {0} is outside [0, 1]")]
    SigmaRange(f64),
    #[error("gme {0} is outside [0, sqrt(2)]")]
    GmeRange(f64),
    #[error("dims list is empty")]
    NoDims,
    #[error("mode {0} has non-positive dimension")]
    BadDim(usize),
    #[error("expected a two-mode tensor, got {0} modes")]
    NotBipartite(usize),
    #[error("need 2 <= d1 <= d2, got ({0}, {1})")]
    BadPair(usize, usize),
    #[error("tensor has zero norm")]
    ZeroTensor,
}

pub type BoundsResult<T> = Result<T, BoundsError>;

const RANGE_SLACK: f64 = 1e-9;

/// `d = √(2 − 2σ)`. Values outside `[0, 1]` by at most 1e-9 are clamped;
/// anything further out is an error.
pub fn gme_from_sigma(sigma: f64) -> BoundsResult<f64> {
    if !sigma.is_finite() || !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&sigma) {
        return Err(BoundsError::SigmaRange(sigma));
    }
    let s = sigma.clamp(0.0, 1.0);
    Ok((2.0 - 2.0 * s).sqrt())
}

/// Inverse of [`gme_from_sigma`]: `σ = (2 − d²)/2`, with the same clamping
/// convention on `[0, √2]`.
pub fn sigma_from_gme(gme: f64) -> BoundsResult<f64> {
    let top = std::f64::consts::SQRT_2;
    if !gme.is_finite() || !(-RANGE_SLACK..=top + RANGE_SLACK).contains(&gme) {
        return Err(BoundsError::GmeRange(gme));
    }
    let d = gme.clamp(0.0, top);
    Ok((2.0 - d * d) / 2.0)
}

/// Smallest possible maximal overlap for the given mode dimensions:
/// `1/√(∏ dims with one largest removed)`. One for a single mode.
pub fn sigma_floor(dims: &[usize]) -> BoundsResult<f64> {
    if dims.is_empty() {
        return Err(BoundsError::NoDims);
    }
    if let Some(mode) = dims.iter().position(|&d| d == 0) {
        return Err(BoundsError::BadDim(mode));
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    sorted.pop();
    let product: f64 = sorted.iter().map(|&d| d as f64).product();
    Ok(1.0 / product.sqrt())
}

/// Dimension-only cap on the geometric measure: `√(2 − 2·sigma_floor(dims))`.
/// Zero for a single mode.
pub fn upper_bound(dims: &[usize]) -> BoundsResult<f64> {
    gme_from_sigma(sigma_floor(dims)?)
}

/// Everything the solver learns about one state, in closed form.
#[derive(Debug, Clone)]
pub struct GmeReport {
    pub sigma: f64,
    pub gme: f64,
    pub bound: f64,
    pub slack: f64,
    pub closest: ProductState,
}

impl GmeReport {
    pub fn new(dims: &[usize], sigma: f64, closest: ProductState) -> BoundsResult<Self> {
        let gme = gme_from_sigma(sigma)?;
        let bound = upper_bound(dims)?;
        Ok(GmeReport {
            sigma,
            gme,
            bound,
            slack: bound - gme,
            closest,
        })
    }
}

/// Exact two-mode oracle: σ is the largest singular value of the d₁×d₂
/// matrix. Returns σ and a product state whose contraction with the tensor
/// is σ (real, non-negative).
///
/// Only the top singular triple is needed, so instead of a full SVD this
/// runs Hermitian power iteration on the Gram matrix of the smaller side,
/// restarted from three fixed vectors (no deflation); the largest Rayleigh
/// quotient wins. Tolerance 1e-12 on the quotient, 10000 iterations cap.
pub fn bipartite_sigma(t: &StateTensor) -> BoundsResult<(f64, ProductState)> {
    if t.ndim() != 2 {
        return Err(BoundsError::NotBipartite(t.ndim()));
    }
    if t.frobenius_norm() == 0.0 {
        return Err(BoundsError::ZeroTensor);
    }
    let (d1, d2) = (t.dims()[0], t.dims()[1]);
    let b = t.entries();
    let at = |j: usize, k: usize| b[j * d2 + k];

    // Gram matrix of the smaller side, m×m Hermitian PSD.
    let m = d1.min(d2);
    let mut gram = vec![Complex64::new(0.0, 0.0); m * m];
    for p in 0..m {
        for q in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            if d1 <= d2 {
                // (B B^H)_{pq} = Σ_k B_{pk} conj(B_{qk})
                for k in 0..d2 {
                    acc += at(p, k) * at(q, k).conj();
                }
            } else {
                // (B^H B)_{pq} = Σ_j conj(B_{jp}) B_{jq}
                for j in 0..d1 {
                    acc += at(j, p).conj() * at(j, q);
                }
            }
            gram[p * m + q] = acc;
        }
    }

    let (rho, u) = top_eigenpair(&gram, m);
    let sigma = rho.max(0.0).sqrt();
    if sigma == 0.0 {
        return Err(BoundsError::ZeroTensor);
    }

    // Recover the other side through the matrix, then pick the factor pair
    // whose contraction with the tensor is σ itself: conjugate the left
    // singular vector, keep the right one.
    let (left, right) = if d1 <= d2 {
        let mut v = vec![Complex64::new(0.0, 0.0); d2];
        for (k, vk) in v.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, uj) in u.iter().enumerate() {
                acc += at(j, k).conj() * uj;
            }
            *vk = acc / sigma;
        }
        (u.iter().map(Complex64::conj).collect::<Vec<_>>(), v)
    } else {
        let mut w = vec![Complex64::new(0.0, 0.0); d1];
        for (j, wj) in w.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, uk) in u.iter().enumerate() {
                acc += at(j, k) * uk;
            }
            *wj = acc / sigma;
        }
        (w.iter().map(Complex64::conj).collect::<Vec<_>>(), u)
    };
    let closest = ProductState::new(vec![left, right]).map_err(|_| BoundsError::ZeroTensor)?;
    Ok((sigma, closest))
}

/// Largest eigenvalue and eigenvector of an m×m Hermitian PSD matrix by
/// power iteration from three deterministic starts.
fn top_eigenpair(gram: &[Complex64], m: usize) -> (f64, Vec<Complex64>) {
    let mut starts: Vec<Vec<Complex64>> = Vec::with_capacity(3);
    let peak = (0..m)
        .max_by(|&p, &q| gram[p * m + p].re.total_cmp(&gram[q * m + q].re))
        .unwrap_or(0);
    let mut e = vec![Complex64::new(0.0, 0.0); m];
    e[peak] = Complex64::new(1.0, 0.0);
    starts.push(e);
    let a = 1.0 / (m as f64).sqrt();
    starts.push(vec![Complex64::new(a, 0.0); m]);
    starts.push(
        (0..m)
            .map(|j| Complex64::new(0.0, 1.0).powu(j as u32) * a)
            .collect(),
    );

    let mat_vec = |x: &[Complex64]| -> Vec<Complex64> {
        (0..m)
            .map(|p| (0..m).map(|q| gram[p * m + q] * x[q]).sum())
            .collect()
    };
    let rayleigh = |x: &[Complex64]| -> f64 {
        mat_vec(x)
            .iter()
            .zip(x)
            .map(|(gx, xi)| (xi.conj() * gx).re)
            .sum()
    };

    let mut best = (-1.0, Vec::new());
    for mut u in starts {
        let mut rho_prev = rayleigh(&u);
        let mut rho = rho_prev;
        for _ in 0..10_000 {
            let w = mat_vec(&u);
            let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            for (ui, wi) in u.iter_mut().zip(&w) {
                *ui = wi / norm;
            }
            rho = rayleigh(&u);
            if (rho - rho_prev).abs() <= 1e-12 * rho.abs().max(1.0) {
                break;
            }
            rho_prev = rho;
        }
        if rho > best.0 {
            best = (rho, u);
        }
    }
    best
}

/// The diagonal state with amplitudes `1/√d1` on `|jj⟩`, `j < d1`. Its
/// maximal overlap is exactly `sigma_floor((d1, d2))`, so its measure meets
/// [`upper_bound`] with zero slack.
pub fn maximally_entangled_bipartite(d1: usize, d2: usize) -> BoundsResult<StateTensor> {
    if d1 < 2 || d1 > d2 {
        return Err(BoundsError::BadPair(d1, d2));
    }
    let amp = Complex64::new(1.0 / (d1 as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d1 * d2];
    for j in 0..d1 {
        amps[j * d2 + j] = amp;
    }
    Ok(StateTensor::from_state_amplitudes(vec![d1, d2], amps).expect("consistent dims"))
}
