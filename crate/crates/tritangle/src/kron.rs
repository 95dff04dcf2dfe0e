//! Kronecker-product approximation engine: vec, the Van Loan - Pitsianis
//! rearrangement, SVD-based factorization into a sum of Kronecker products,
//! and the symmetric (Takagi) and Hermitian-PSD specializations used by the
//! mixed-state pipeline.

use crate::linalg::{eigh_hermitian, frobenius, max_abs, svd_embed, takagi};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

/// Default relative truncation threshold for factor spectra.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KronError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("block dims ({0}, {1}) do not multiply to the matrix side {2}")]
    BadBlockDims(usize, usize, usize),
    #[error("matrix is not symmetric (relative deviation {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (relative deviation {0:.3e})")]
    NotPsd(f64),
}

/// Column-stacking vec: [a11, ..., ap1, a12, ..., ap2, ...]^T.
pub fn vec_col(a: &Array2<Complex64>) -> Array1<Complex64> {
    let (p, q) = (a.nrows(), a.ncols());
    let mut v = Array1::<Complex64>::zeros(p * q);
    for j in 0..q {
        for i in 0..p {
            v[j * p + i] = a[[i, j]];
        }
    }
    v
}

/// Inverse of [`vec_col`] for a p x q target.
pub fn unvec(v: &Array1<Complex64>, p: usize, q: usize) -> Array2<Complex64> {
    assert_eq!(v.len(), p * q, "unvec: length mismatch");
    let mut a = Array2::<Complex64>::zeros((p, q));
    for j in 0..q {
        for i in 0..p {
            a[[i, j]] = v[j * p + i];
        }
    }
    a
}

/// Rearrangement of a (d1 d2) x (d1 d2) matrix into the d1^2 x d2^2 matrix
/// with M~[(i,i'), (j,j')] = M[(i,j), (i',j')], composite indices stacked in
/// vec (column-major) order. For M = X (x) Y this gives vec(X) vec(Y)^T; it is
/// an entry permutation, so the Frobenius norm is preserved exactly.
pub fn rearrange(
    m: &Array2<Complex64>,
    d1: usize,
    d2: usize,
) -> Result<Array2<Complex64>, KronError> {
    if m.nrows() != m.ncols() {
        return Err(KronError::NotSquare);
    }
    if d1 * d2 != m.nrows() {
        return Err(KronError::BadBlockDims(d1, d2, m.nrows()));
    }
    let mut out = Array2::<Complex64>::zeros((d1 * d1, d2 * d2));
    for i in 0..d1 {
        for ip in 0..d1 {
            for j in 0..d2 {
                for jp in 0..d2 {
                    out[[ip * d1 + i, jp * d2 + j]] = m[[i * d2 + j, ip * d2 + jp]];
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`rearrange`].
pub fn unrearrange(
    mt: &Array2<Complex64>,
    d1: usize,
    d2: usize,
) -> Result<Array2<Complex64>, KronError> {
    if mt.nrows() != d1 * d1 || mt.ncols() != d2 * d2 {
        return Err(KronError::BadBlockDims(d1, d2, mt.nrows()));
    }
    let mut out = Array2::<Complex64>::zeros((d1 * d2, d1 * d2));
    for i in 0..d1 {
        for ip in 0..d1 {
            for j in 0..d2 {
                for jp in 0..d2 {
                    out[[i * d2 + j, ip * d2 + jp]] = mt[[ip * d1 + i, jp * d2 + j]];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product X (x) Y.
pub fn kron(x: &Array2<Complex64>, y: &Array2<Complex64>) -> Array2<Complex64> {
    let (p, q) = (x.nrows(), x.ncols());
    let (r, s) = (y.nrows(), y.ncols());
    let mut out = Array2::<Complex64>::zeros((p * r, q * s));
    for i in 0..p {
        for j in 0..q {
            for k in 0..r {
                for l in 0..s {
                    out[[i * r + k, j * s + l]] = x[[i, j]] * y[[k, l]];
                }
            }
        }
    }
    out
}

/// Nearest-Kronecker-product factorization M = sum_i X_i (x) Y_i.
#[derive(Debug, Clone)]
pub struct KronFactors {
    pub d1: usize,
    pub d2: usize,
    pub factors: Vec<(Array2<Complex64>, Array2<Complex64>)>,
    pub sigmas: Vec<f64>,
}

impl KronFactors {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn reconstruct(&self) -> Array2<Complex64> {
        let side = self.d1 * self.d2;
        let mut out = Array2::<Complex64>::zeros((side, side));
        for (x, y) in &self.factors {
            out += &kron(x, y);
        }
        out
    }
}

/// Factor M into a sum of Kronecker products by SVD of its rearrangement.
/// Terms with sigma_i <= trunc * sigma_1 are dropped; the truncation error is
/// at most sqrt(sum of dropped sigma^2) in Frobenius norm.
pub fn nearest_kron(
    m: &Array2<Complex64>,
    d1: usize,
    d2: usize,
    trunc: f64,
) -> Result<KronFactors, KronError> {
    let mt = rearrange(m, d1, d2)?;
    let svd = svd_embed(&mt, 0.0);
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let mut factors = Vec::new();
    let mut sigmas = Vec::new();
    for (k, &s) in svd.sigma.iter().enumerate() {
        if s <= trunc * smax {
            continue;
        }
        let rs = s.sqrt();
        let x = unvec(&svd.u[k].mapv(|z| z * rs), d1, d1);
        let y = unvec(&svd.v[k].mapv(|z| z.conj() * rs), d2, d2);
        factors.push((x, y));
        sigmas.push(s);
    }
    Ok(KronFactors { d1, d2, factors, sigmas })
}

/// Takagi factorization S = sum_i sigma_i u_i u_i^T for complex symmetric S.
pub fn takagi_factor(
    s: &Array2<Complex64>,
    trunc: f64,
) -> Result<Vec<(f64, Array1<Complex64>)>, KronError> {
    if s.nrows() != s.ncols() {
        return Err(KronError::NotSquare);
    }
    let st = s.t().to_owned();
    let dev = max_abs(&(s - &st));
    let scale = frobenius(s).max(f64::MIN_POSITIVE);
    if dev > 1e-8 * scale {
        return Err(KronError::NotSymmetric(dev / scale));
    }
    Ok(takagi(s, trunc))
}

/// Hermitian-PSD factorization H = sum_i lambda_i w_i w_i^dagger with
/// lambda descending; eigenvalues below trunc * lambda_1 are dropped.
pub fn hermitian_psd_factor(
    h: &Array2<Complex64>,
    trunc: f64,
) -> Result<Vec<(f64, Array1<Complex64>)>, KronError> {
    if h.nrows() != h.ncols() {
        return Err(KronError::NotSquare);
    }
    let hd = crate::linalg::dagger(h);
    let dev = max_abs(&(h - &hd));
    let scale = frobenius(h).max(f64::MIN_POSITIVE);
    if dev > 1e-8 * scale {
        return Err(KronError::NotHermitian(dev / scale));
    }
    let (vals, vecs) = eigh_hermitian(h);
    if let Some(&min) = vals.last() {
        if min < -1e-8 * scale {
            return Err(KronError::NotPsd(-min / scale));
        }
    }
    let lmax = vals.first().copied().unwrap_or(0.0).max(0.0);
    let mut out = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= trunc * lmax || lam <= 0.0 {
            continue;
        }
        out.push((lam, vecs.column(k).to_owned()));
    }
    Ok(out)
}
