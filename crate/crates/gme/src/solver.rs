//! Best rank-one approximation of a state tensor by shifted power iteration.
//!
//! The maximal overlap σ = max |⟨Ψ|φ⟩| over unit product states φ is found
//! by a multiplicative fixed-point scheme: hold a scalar estimate λ and one
//! unit vector per mode, then sweep the modes Gauss–Seidel style, replacing
//! each vector by the normalized combination
//!
//! ```text
//! x̂⁽ⁱ⁾ = λ · conj(env_i) + α·x⁽ⁱ⁾,      env_i = tensor contracted with
//!                                               every factor except mode i
//! ```
//!
//! and refreshing λ as the full contraction after the sweep. The positive
//! shift α keeps the map's fixed points attracting; the iteration is run
//! from many independent random starts and the best stationary value wins.
//! λ converges to a complex number of modulus σ; a final phase correction
//! distributes arg(λ) across the factors so the returned product state
//! overlaps the input with a real, non-negative value.
//!
//! Everything is deterministic for a fixed seed: each start draws from its
//! own counter-mode RNG stream, so thread scheduling cannot change results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::tensor::{ProductState, StateTensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("tensor has zero norm")]
    ZeroTensor,
    #[error("tensor is not symmetric; symmetric mode needs equal dims and invariant entries")]
    NotSymmetric,
    #[error("iteration produced a non-finite value")]
    NonFinite,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type SolverResult<T> = Result<T, SolverError>;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Positive shift added to each mode update; any positive value works,
    /// larger values damp (and slow) the iteration.
    pub alpha: f64,
    /// Convergence tolerance, applied to both the λ increment and the
    /// phase-aligned factor change.
    pub tol: f64,
    /// Sweep cap per start.
    pub max_iters: usize,
    /// Number of independent random starts.
    pub restarts: usize,
    /// RNG seed; fixed seed means bit-identical results.
    pub seed: u64,
    /// Force all factors equal (single shared vector per sweep).
    pub symmetric_mode: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 1.0,
            tol: 1e-10,
            max_iters: 5000,
            restarts: 64,
            seed: 0,
            symmetric_mode: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> SolverResult<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "alpha must be a positive real, got {}",
                self.alpha
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "tol must be a positive real, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(SolverError::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Best overlap modulus found, |λ| at the final sweep of the best start.
    pub sigma: f64,
    /// Product state achieving `sigma`; contraction with the input tensor is
    /// real and non-negative after gauge fixing.
    pub closest: ProductState,
    /// Sweep count per start.
    pub iterations: Vec<usize>,
    /// Whether each start met the dual stopping rule before the sweep cap.
    pub converged: Vec<bool>,
    /// Index of the winning start.
    pub best_start: usize,
    /// λ after every sweep of the winning start (λ₀ first), for diagnostics.
    pub lambda_trace: Option<Vec<Complex64>>,
}

impl SolveResult {
    /// Did the winning start converge?
    pub fn is_converged(&self) -> bool {
        self.converged.get(self.best_start).copied().unwrap_or(false)
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const RESAMPLE_CAP: usize = 64;

struct StartRun {
    sigma: f64,
    factors: Vec<Vec<Complex64>>,
    iterations: usize,
    converged: bool,
    trace: Vec<Complex64>,
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let norm = vec_norm(&v);
        if norm > 0.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn random_factors(dims: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    dims.iter().map(|&d| random_unit(d, rng)).collect()
}

/// Factor distance modulo the phase gauge: rotate `new` onto `old` by the
/// phase of their inner product, then take the Euclidean distance. λ can
/// stabilize while factors still drift along the phase orbit, so the
/// stopping rule needs this as a second condition.
fn aligned_change(old: &[Complex64], new: &[Complex64]) -> f64 {
    let ip: Complex64 = old.iter().zip(new).map(|(o, n)| o.conj() * n).sum();
    let rot = if ip == ZERO {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -ip.arg())
    };
    old.iter()
        .zip(new)
        .map(|(o, n)| (n * rot - o).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Distributes the phase of λ across the factors (one n-th of the angle
/// each) so the full contraction becomes |λ| exactly.
fn correct_phase(factors: &mut [Vec<Complex64>], lambda: Complex64) {
    if lambda == ZERO {
        return;
    }
    let rot = Complex64::from_polar(1.0, -lambda.arg() / factors.len() as f64);
    for f in factors.iter_mut() {
        for c in f.iter_mut() {
            *c *= rot;
        }
    }
}

fn check_finite(lambda: Complex64) -> SolverResult<()> {
    if lambda.re.is_finite() && lambda.im.is_finite() {
        Ok(())
    } else {
        Err(SolverError::NonFinite)
    }
}

/// One start of the general (independent-factor) iteration. `rng` is only
/// touched when the current factors contract to exactly zero, which stalls
/// the multiplicative update and forces a fresh random start.
fn run_single(
    t: &StateTensor,
    mut factors: Vec<Vec<Complex64>>,
    cfg: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> SolverResult<StartRun> {
    let n = factors.len();
    let mut resamples = 0usize;
    let mut lambda = t.contract_full_raw(&factors);
    check_finite(lambda)?;
    while lambda == ZERO && resamples < RESAMPLE_CAP {
        factors = random_factors(t.dims(), rng);
        lambda = t.contract_full_raw(&factors);
        resamples += 1;
    }
    let mut trace = vec![lambda];
    let mut iterations = 0usize;
    let mut converged = false;
    for k in 1..=cfg.max_iters {
        iterations = k;
        let prev = factors.clone();
        for i in 0..n {
            let env = t.contract_all_but_raw(&factors, i);
            let mut xhat: Vec<Complex64> = env
                .iter()
                .zip(&factors[i])
                .map(|(e, x)| lambda * e.conj() + cfg.alpha * x)
                .collect();
            let norm = vec_norm(&xhat);
            if norm == 0.0 {
                continue; // keep the previous factor for this mode
            }
            for c in &mut xhat {
                *c /= norm;
            }
            factors[i] = xhat;
        }
        let next = t.contract_full_raw(&factors);
        check_finite(next)?;
        trace.push(next);
        if next == ZERO && resamples < RESAMPLE_CAP {
            factors = random_factors(t.dims(), rng);
            lambda = t.contract_full_raw(&factors);
            resamples += 1;
            continue;
        }
        let lambda_ok = (next - lambda).norm() <= cfg.tol * next.norm().max(1.0);
        let factors_ok = prev
            .iter()
            .zip(&factors)
            .map(|(o, f)| aligned_change(o, f))
            .fold(0.0f64, f64::max)
            <= cfg.tol;
        lambda = next;
        if lambda_ok && factors_ok {
            converged = true;
            break;
        }
    }
    correct_phase(&mut factors, lambda);
    Ok(StartRun {
        sigma: lambda.norm(),
        factors,
        iterations,
        converged,
        trace,
    })
}

/// One start of the symmetric iteration: a single shared vector, updated
/// once per sweep from the mode-averaged environment.
fn run_single_symmetric(
    t: &StateTensor,
    mut x: Vec<Complex64>,
    cfg: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> SolverResult<StartRun> {
    let n = t.ndim();
    let d = t.dims()[0];
    let copies = |x: &Vec<Complex64>| vec![x.clone(); n];
    let mut resamples = 0usize;
    let mut lambda = t.contract_full_raw(&copies(&x));
    check_finite(lambda)?;
    while lambda == ZERO && resamples < RESAMPLE_CAP {
        x = random_unit(d, rng);
        lambda = t.contract_full_raw(&copies(&x));
        resamples += 1;
    }
    let mut trace = vec![lambda];
    let mut iterations = 0usize;
    let mut converged = false;
    for k in 1..=cfg.max_iters {
        iterations = k;
        let all = copies(&x);
        let mut env = vec![ZERO; d];
        for i in 0..n {
            for (acc, e) in env.iter_mut().zip(t.contract_all_but_raw(&all, i)) {
                *acc += e;
            }
        }
        let scale = 1.0 / n as f64;
        let mut xhat: Vec<Complex64> = env
            .iter()
            .zip(&x)
            .map(|(e, xi)| lambda * (e * scale).conj() + cfg.alpha * xi)
            .collect();
        let norm = vec_norm(&xhat);
        let prev = x.clone();
        if norm > 0.0 {
            for c in &mut xhat {
                *c /= norm;
            }
            x = xhat;
        }
        let next = t.contract_full_raw(&copies(&x));
        check_finite(next)?;
        trace.push(next);
        if next == ZERO && resamples < RESAMPLE_CAP {
            x = random_unit(d, rng);
            lambda = t.contract_full_raw(&copies(&x));
            resamples += 1;
            continue;
        }
        let lambda_ok = (next - lambda).norm() <= cfg.tol * next.norm().max(1.0);
        let factors_ok = aligned_change(&prev, &x) <= cfg.tol;
        lambda = next;
        if lambda_ok && factors_ok {
            converged = true;
            break;
        }
    }
    let mut factors = copies(&x);
    correct_phase(&mut factors, lambda);
    Ok(StartRun {
        sigma: lambda.norm(),
        factors,
        iterations,
        converged,
        trace,
    })
}

/// Single-start iteration from an explicit starting product state. No gauge
/// canonicalization beyond the final phase correction, so the returned
/// factors stay comparable to the start.
pub fn power_iterate(
    t: &StateTensor,
    start: &ProductState,
    cfg: &SolverConfig,
) -> SolverResult<SolveResult> {
    cfg.validate()?;
    let t = prepared(t)?;
    t.contract_full(start)?; // shape check
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let factors: Vec<Vec<Complex64>> = start.factors().to_vec();
    let run = run_single(&t, factors, cfg, &mut rng)?;
    Ok(SolveResult {
        sigma: run.sigma,
        closest: ProductState::new(run.factors)?,
        iterations: vec![run.iterations],
        converged: vec![run.converged],
        best_start: 0,
        lambda_trace: Some(run.trace),
    })
}

fn prepared(t: &StateTensor) -> SolverResult<StateTensor> {
    if t.frobenius_norm() == 0.0 {
        return Err(SolverError::ZeroTensor);
    }
    if t.is_normalized(1e-12) {
        Ok(t.clone())
    } else {
        Ok(t.normalized()?)
    }
}

/// Multi-start solve: `cfg.restarts` independent random starts (complex
/// Gaussian factors, normalized), evaluated in parallel, reduced to the best
/// by larger σ then fewer sweeps then lower start index. The winner's
/// factors are gauge-canonicalized: every factor except the last has its
/// largest-magnitude component rotated to the non-negative real axis, the
/// last factor absorbs the remaining phase so the overlap is real ≥ 0.
pub fn solve(t: &StateTensor, cfg: &SolverConfig) -> SolverResult<SolveResult> {
    cfg.validate()?;
    if cfg.symmetric_mode {
        return solve_symmetric(t, cfg);
    }
    let t = prepared(t)?;
    let runs: Vec<StartRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(cfg.seed, s);
            let factors = random_factors(t.dims(), &mut rng);
            run_single(&t, factors, cfg, &mut rng)
        })
        .collect::<SolverResult<Vec<_>>>()?;
    finish(&t, runs, false)
}

/// Multi-start solve constrained to equal factors. The input must be
/// symmetric (equal dims, entries invariant under mode transpositions).
pub fn solve_symmetric(t: &StateTensor, cfg: &SolverConfig) -> SolverResult<SolveResult> {
    cfg.validate()?;
    let t = prepared(t)?;
    if !t.is_symmetric(1e-9) {
        return Err(SolverError::NotSymmetric);
    }
    let d = t.dims()[0];
    let runs: Vec<StartRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(cfg.seed, s);
            let x = random_unit(d, &mut rng);
            run_single_symmetric(&t, x, cfg, &mut rng)
        })
        .collect::<SolverResult<Vec<_>>>()?;
    finish(&t, runs, true)
}

fn stream_rng(seed: u64, start: usize) -> ChaCha8Rng {
    // stream 0 belongs to power_iterate's internal resampling
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64 + 1);
    rng
}

fn finish(t: &StateTensor, runs: Vec<StartRun>, symmetric: bool) -> SolverResult<SolveResult> {
    let mut best = 0usize;
    for i in 1..runs.len() {
        let better = runs[i].sigma > runs[best].sigma
            || (runs[i].sigma == runs[best].sigma && runs[i].iterations < runs[best].iterations);
        if better {
            best = i;
        }
    }
    let iterations = runs.iter().map(|r| r.iterations).collect();
    let converged = runs.iter().map(|r| r.converged).collect();
    let winner = &runs[best];
    let closest = if symmetric {
        canonicalize_symmetric(winner.factors.clone())?
    } else {
        canonicalize(t, winner.factors.clone())?
    };
    Ok(SolveResult {
        sigma: winner.sigma,
        closest,
        iterations,
        converged,
        best_start: best,
        lambda_trace: Some(winner.trace.clone()),
    })
}

fn argmax_abs(v: &[Complex64]) -> usize {
    let mut best = 0usize;
    for (j, c) in v.iter().enumerate() {
        if c.norm_sqr() > v[best].norm_sqr() {
            best = j;
        }
    }
    best
}

/// Phase gauge for the general solve: the optimum only fixes the product of
/// the per-mode phases, so pin each leading factor's largest component to
/// the non-negative real axis and let the last factor carry the rest.
fn canonicalize(t: &StateTensor, mut factors: Vec<Vec<Complex64>>) -> SolverResult<ProductState> {
    let n = factors.len();
    for f in factors.iter_mut().take(n.saturating_sub(1)) {
        let c = f[argmax_abs(f)];
        if c != ZERO {
            let rot = Complex64::from_polar(1.0, -c.arg());
            for x in f.iter_mut() {
                *x *= rot;
            }
        }
    }
    let overlap = t.contract_full_raw(&factors);
    if overlap != ZERO {
        let rot = Complex64::from_polar(1.0, -overlap.arg());
        for x in factors[n - 1].iter_mut() {
            *x *= rot;
        }
    }
    Ok(ProductState::new(factors)?)
}

/// Phase gauge for the symmetric solve: the shared factor is only free up
/// to n-th roots of unity (anything else breaks the real overlap), so pick
/// the root that puts the largest component closest to the positive real
/// axis; ties go to the smallest rotation.
fn canonicalize_symmetric(factors: Vec<Vec<Complex64>>) -> SolverResult<ProductState> {
    let n = factors.len();
    let x = &factors[0];
    let top = x[argmax_abs(x)];
    let mut best_rot = Complex64::new(1.0, 0.0);
    let mut best_re = top.re;
    for m in 1..n {
        let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64);
        let re = (top * rot).re;
        if re > best_re {
            best_re = re;
            best_rot = rot;
        }
    }
    let shared: Vec<Complex64> = x.iter().map(|c| c * best_rot).collect();
    Ok(ProductState::new(vec![shared; n])?)
}
