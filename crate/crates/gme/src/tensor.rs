//! Dense complex tensors for multipartite pure states.
//!
//! A pure state on subsystems of dimensions `d1 x d2 x ... x dn` is stored as
//! a dense, row-major array (the last mode varies fastest). The stored
//! entries are the complex *conjugates* of the state amplitudes, so that
//! contracting the tensor against the factor vectors of a product state
//! yields the physical inner product `<state|product>` directly. That
//! conjugation happens in exactly one place, [`StateTensor::from_state_amplitudes`];
//! everything downstream contracts with vectors as given.
//!
//! Modes are zero-indexed throughout.

use num_complex::Complex64;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("tensor must have at least one mode")]
    NoModes,
    #[error("mode {mode} has zero dimension")]
    ZeroDim { mode: usize },
    #[error("{got} entries for dimensions with product {expected}")]
    EntryCount { expected: usize, got: usize },
    #[error("product state has {got} factors, tensor has {expected} modes")]
    FactorCount { expected: usize, got: usize },
    #[error("mode {mode}: factor length {got} does not match dimension {expected}")]
    FactorLength {
        mode: usize,
        expected: usize,
        got: usize,
    },
    #[error("mode {mode} out of range for {ndim} modes")]
    ModeOutOfRange { mode: usize, ndim: usize },
    #[error("matrix slices need at least two modes")]
    NotAMatrix,
    #[error("slice prefix has length {got}, expected {expected}")]
    PrefixLength { expected: usize, got: usize },
    #[error("slice prefix index {index} out of range at mode {mode} (dimension {dim})")]
    PrefixIndex {
        mode: usize,
        index: usize,
        dim: usize,
    },
    #[error("{perm:?} is not a permutation of {ndim} modes")]
    NotAPermutation { perm: Vec<usize>, ndim: usize },
    #[error("cannot normalize a zero tensor")]
    ZeroNorm,
    #[error("factor {mode} has zero norm")]
    ZeroFactor { mode: usize },
    #[error("factor {mode} is empty")]
    EmptyFactor { mode: usize },
}

pub type TensorResult<T> = Result<T, TensorError>;

/// Visits every flat index of a row-major array together with its
/// multi-index. `f(flat, idx)` is called in increasing flat order.
fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let len: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    for flat in 0..len {
        f(flat, &idx);
        for m in (0..dims.len()).rev() {
            idx[m] += 1;
            if idx[m] < dims[m] {
                break;
            }
            idx[m] = 0;
        }
    }
}

fn validate_dims(dims: &[usize]) -> TensorResult<()> {
    if dims.is_empty() {
        return Err(TensorError::NoModes);
    }
    for (mode, &d) in dims.iter().enumerate() {
        if d == 0 {
            return Err(TensorError::ZeroDim { mode });
        }
    }
    Ok(())
}

/// Dense state tensor. Entries are conjugated amplitudes; see the module doc.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTensor {
    dims: Vec<usize>,
    entries: Vec<Complex64>,
}

impl StateTensor {
    /// Builds a tensor from raw stored entries (already in contraction
    /// convention). Most callers want [`StateTensor::from_state_amplitudes`].
    pub fn from_entries(dims: Vec<usize>, entries: Vec<Complex64>) -> TensorResult<Self> {
        validate_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if entries.len() != expected {
            return Err(TensorError::EntryCount {
                expected,
                got: entries.len(),
            });
        }
        Ok(StateTensor { dims, entries })
    }

    /// Builds a tensor from physical state amplitudes. This is the single
    /// conjugation site: stored entries are `conj(amplitude)`, which makes
    /// [`StateTensor::contract_full`] compute `<state|product>`.
    pub fn from_state_amplitudes(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> TensorResult<Self> {
        let conj = amplitudes.into_iter().map(|a| a.conj()).collect();
        Self::from_entries(dims, conj)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raw stored entries (conjugated amplitudes), row-major.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Physical state amplitudes, row-major (conjugates the storage back).
    pub fn state_amplitudes(&self) -> Vec<Complex64> {
        self.entries.iter().map(|a| a.conj()).collect()
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> StateTensor {
        StateTensor {
            dims: self.dims.clone(),
            entries: self.entries.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Frobenius norm. Squared moduli are summed in sorted order, so the
    /// result is bit-for-bit invariant under mode permutations.
    pub fn frobenius_norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.entries.iter().map(|a| a.norm_sqr()).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.frobenius_norm() - 1.0).abs() <= tol
    }

    /// Returns a unit-norm copy. Errors on the zero tensor.
    pub fn normalized(&self) -> TensorResult<Self> {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return Err(TensorError::ZeroNorm);
        }
        let inv = 1.0 / norm;
        Ok(StateTensor {
            dims: self.dims.clone(),
            entries: self.entries.iter().map(|a| a * inv).collect(),
        })
    }

    fn check_factors(&self, factors: &[Vec<Complex64>], skip: Option<usize>) -> TensorResult<()> {
        if factors.len() != self.ndim() {
            return Err(TensorError::FactorCount {
                expected: self.ndim(),
                got: factors.len(),
            });
        }
        for (mode, f) in factors.iter().enumerate() {
            if Some(mode) == skip {
                continue;
            }
            if f.len() != self.dims[mode] {
                return Err(TensorError::FactorLength {
                    mode,
                    expected: self.dims[mode],
                    got: f.len(),
                });
            }
        }
        Ok(())
    }

    /// Full contraction against one vector per mode, with the vectors taken
    /// as given (no conjugation here). For a normalized state tensor and a
    /// unit product state this is `<state|product>`.
    pub fn contract_full(&self, product: &ProductState) -> TensorResult<Complex64> {
        self.check_factors(product.factors(), None)?;
        Ok(self.contract_full_raw(product.factors()))
    }

    pub(crate) fn contract_full_raw(&self, factors: &[Vec<Complex64>]) -> Complex64 {
        let mut acc = ZERO;
        for_each_index(&self.dims, |flat, idx| {
            let a = self.entries[flat];
            if a != ZERO {
                let mut term = a;
                for (m, &i) in idx.iter().enumerate() {
                    term *= factors[m][i];
                }
                acc += term;
            }
        });
        acc
    }

    /// Contracts every mode except `mode`, returning the resulting vector of
    /// length `dims[mode]`. The factor supplied at `mode` is ignored; the
    /// others are used as given (callers conjugate when they need to).
    pub fn contract_all_but(&self, product: &ProductState, mode: usize) -> TensorResult<Vec<Complex64>> {
        if mode >= self.ndim() {
            return Err(TensorError::ModeOutOfRange {
                mode,
                ndim: self.ndim(),
            });
        }
        self.check_factors(product.factors(), Some(mode))?;
        Ok(self.contract_all_but_raw(product.factors(), mode))
    }

    pub(crate) fn contract_all_but_raw(&self, factors: &[Vec<Complex64>], mode: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dims[mode]];
        for_each_index(&self.dims, |flat, idx| {
            let a = self.entries[flat];
            if a != ZERO {
                let mut term = a;
                for (m, &i) in idx.iter().enumerate() {
                    if m != mode {
                        term *= factors[m][i];
                    }
                }
                out[idx[mode]] += term;
            }
        });
        out
    }

    /// The `d_{n-1} x d_n` matrix obtained by fixing the leading `n-2` modes
    /// to `prefix`. For a matrix (`n == 2`) the prefix is empty and the slice
    /// is the whole tensor.
    pub fn matrix_slice(&self, prefix: &[usize]) -> TensorResult<StateTensor> {
        let n = self.ndim();
        if n < 2 {
            return Err(TensorError::NotAMatrix);
        }
        if prefix.len() != n - 2 {
            return Err(TensorError::PrefixLength {
                expected: n - 2,
                got: prefix.len(),
            });
        }
        for (mode, &i) in prefix.iter().enumerate() {
            if i >= self.dims[mode] {
                return Err(TensorError::PrefixIndex {
                    mode,
                    index: i,
                    dim: self.dims[mode],
                });
            }
        }
        let rows = self.dims[n - 2];
        let cols = self.dims[n - 1];
        // Row-major layout: the block with a fixed leading prefix is contiguous.
        let mut base = 0usize;
        let mut stride: usize = rows * cols;
        for (m, &i) in prefix.iter().enumerate().rev() {
            base += i * stride;
            stride *= self.dims[m];
        }
        let block = self.entries[base..base + rows * cols].to_vec();
        StateTensor::from_entries(vec![rows, cols], block)
    }

    /// Reorders modes: the result satisfies
    /// `out[j_0, ..., j_{n-1}] = self[i]` with `j_k = i[perm[k]]`, i.e. mode
    /// `k` of the output is mode `perm[k]` of the input.
    pub fn permute_modes(&self, perm: &[usize]) -> TensorResult<StateTensor> {
        let n = self.ndim();
        if perm.len() != n || {
            let mut seen = vec![false; n];
            perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        } {
            return Err(TensorError::NotAPermutation {
                perm: perm.to_vec(),
                ndim: n,
            });
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut new_strides = vec![0usize; n];
        {
            let mut s = 1usize;
            for m in (0..n).rev() {
                new_strides[m] = s;
                s *= new_dims[m];
            }
        }
        let mut out = vec![ZERO; self.entries.len()];
        for_each_index(&self.dims, |flat, idx| {
            let mut dst = 0usize;
            for k in 0..n {
                dst += idx[perm[k]] * new_strides[k];
            }
            out[dst] = self.entries[flat];
        });
        StateTensor::from_entries(new_dims, out)
    }

    /// True iff all dimensions are equal and the entries are invariant (up to
    /// `tol`, entrywise) under every transposition of adjacent modes. Those
    /// transpositions generate all mode permutations.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d0 = self.dims[0];
        if !self.dims.iter().all(|&d| d == d0) {
            return false;
        }
        let n = self.ndim();
        for m in 0..n.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(m, m + 1);
            let swapped = self.permute_modes(&perm).expect("adjacent swap is a valid permutation");
            let max_dev = self
                .entries
                .iter()
                .zip(&swapped.entries)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            if max_dev > tol {
                return false;
            }
        }
        true
    }
}

/// A product (rank-one) state: one unit vector per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    factors: Vec<Vec<Complex64>>,
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl ProductState {
    /// Normalizes each factor to unit 2-norm. Errors on an empty factor list,
    /// an empty factor, or a zero factor.
    pub fn new(factors: Vec<Vec<Complex64>>) -> TensorResult<Self> {
        if factors.is_empty() {
            return Err(TensorError::NoModes);
        }
        let mut out = Vec::with_capacity(factors.len());
        for (mode, f) in factors.into_iter().enumerate() {
            if f.is_empty() {
                return Err(TensorError::EmptyFactor { mode });
            }
            let norm = vec_norm(&f);
            if norm == 0.0 {
                return Err(TensorError::ZeroFactor { mode });
            }
            let inv = 1.0 / norm;
            out.push(f.into_iter().map(|c| c * inv).collect());
        }
        Ok(ProductState { factors: out })
    }

    /// The computational basis product `|i_0> ⊗ ... ⊗ |i_{n-1}>`.
    pub fn basis(dims: &[usize], indices: &[usize]) -> TensorResult<Self> {
        validate_dims(dims)?;
        if indices.len() != dims.len() {
            return Err(TensorError::FactorCount {
                expected: dims.len(),
                got: indices.len(),
            });
        }
        let mut factors = Vec::with_capacity(dims.len());
        for (mode, (&d, &i)) in dims.iter().zip(indices).enumerate() {
            if i >= d {
                return Err(TensorError::FactorLength {
                    mode,
                    expected: d,
                    got: i,
                });
            }
            let mut f = vec![ZERO; d];
            f[i] = Complex64::new(1.0, 0.0);
            factors.push(f);
        }
        Ok(ProductState { factors })
    }

    pub fn factors(&self) -> &[Vec<Complex64>] {
        &self.factors
    }

    pub fn factor(&self, mode: usize) -> &[Complex64] {
        &self.factors[mode]
    }

    pub fn ndim(&self) -> usize {
        self.factors.len()
    }
}
