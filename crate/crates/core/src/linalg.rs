//! Dense complex matrix kernels over tensor-factored spaces.
//!
//! Subsystem ordering is big-endian throughout the crate: for dims
//! `[d0, d1, ..., dn]` the flat index of the multi-index `(i0, ..., in)` is
//! `i0 * (d1 * ... * dn) + ... + in`, so the first listed subsystem is the most
//! significant digit.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity tolerance accepted by [`eigh`].
pub const EIGH_HERMITIAN_TOL: f64 = 1e-8;

const EIGH_EPS: f64 = 1e-15;
const EIGH_MAX_ITERS: usize = 10_000;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: DVector<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            scaled.column_mut(j).scale_mut(w);
        }
        let out = &scaled * self.vectors.adjoint();
        hermitize(&out)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Hilbert–Schmidt inner product `Re Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "eigh needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev.is_nan() || dev > EIGH_HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "eigh input is not Hermitian (deviation {dev:.3e})"
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigh {
            values: DVector::zeros(0),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = hermitize(m);
    let decomposed = nalgebra::SymmetricEigen::try_new(sym, EIGH_EPS, EIGH_MAX_ITERS)
        .ok_or_else(|| Error::Numeric(format!("eigh did not converge on a {n}x{n} matrix")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposed.eigenvalues[a].total_cmp(&decomposed.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| decomposed.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomposed.eigenvectors.column(src));
    }
    Ok(Eigh { values, vectors })
}

pub fn eigvalsh(m: &CMatrix) -> Result<DVector<f64>> {
    eigh(m).map(|e| e.values)
}

/// `Tr √(M†M)`, i.e. the sum of absolute eigenvalues for Hermitian `M`.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().map(|x| x.abs()).sum())
}

/// Principal square root of a PSD matrix. Eigenvalues down to `-1e-9` are
/// clamped to zero; anything more negative is rejected.
pub fn matrix_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(m)?;
    let lo = e.min();
    if lo < -1e-9 {
        return Err(Error::invalid(format!(
            "matrix_sqrt needs a PSD input (min eigenvalue {lo:.3e})"
        )));
    }
    Ok(e.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius-nearest unit-trace PSD matrix to a Hermitian input.
pub fn project_spectraplex(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(m)?;
    let projected = project_simplex(e.values.as_slice());
    let mut scaled = e.vectors.clone();
    for (j, w) in projected.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*w);
    }
    Ok(hermitize(&(&scaled * e.vectors.adjoint())))
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Precomputed entry permutation realizing a partial transpose.
///
/// The partial transpose only moves entries around, so it is stored as a flat
/// index map and applied without arithmetic. Applying it twice is the identity.
#[derive(Clone, Debug)]
pub struct PartialTransposeMap {
    dim: usize,
    /// `target[r * dim + c]` is the flat (row-major) destination of entry `(r, c)`.
    target: Vec<usize>,
}

impl PartialTransposeMap {
    pub fn new(dims: &[usize], transposed: &[usize]) -> Self {
        let dim = total_dim(dims);
        let strides = strides(dims);
        let mut target = vec![0; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                let (mut r2, mut c2) = (r, col);
                for &k in transposed {
                    let rk = (r / strides[k]) % dims[k];
                    let ck = (col / strides[k]) % dims[k];
                    r2 = r2 - rk * strides[k] + ck * strides[k];
                    c2 = c2 - ck * strides[k] + rk * strides[k];
                }
                target[r * dim + col] = r2 * dim + c2;
            }
        }
        PartialTransposeMap { dim, target }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.nrows(), self.dim, "partial transpose dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                let t = self.target[r * n + col];
                out[(t / n, t % n)] = m[(r, col)];
            }
        }
        out
    }
}

/// Partial transpose of `m` on the listed subsystems.
pub fn partial_transpose_matrix(m: &CMatrix, dims: &[usize], transposed: &[usize]) -> CMatrix {
    PartialTransposeMap::new(dims, transposed).apply(m)
}

/// Trace out every subsystem not in `keep` (`keep` must be sorted and unique).
pub(crate) fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let dim = total_dim(dims);
    let strides = strides(dims);
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_strides = self::strides(&kept_dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let out_dim = total_dim(&kept_dims);

    let kept_index = |flat: usize| -> usize {
        keep.iter()
            .zip(&kept_strides)
            .map(|(&k, &s)| ((flat / strides[k]) % dims[k]) * s)
            .sum()
    };
    let traced_key = |flat: usize| -> usize {
        traced
            .iter()
            .map(|&k| ((flat / strides[k]) % dims[k]) * strides[k])
            .sum()
    };
    let kept: Vec<usize> = (0..dim).map(kept_index).collect();
    let keys: Vec<usize> = (0..dim).map(traced_key).collect();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..dim {
        for col in 0..dim {
            if keys[r] == keys[col] {
                out[(kept[r], kept[col])] += m[(r, col)];
            }
        }
    }
    out
}
