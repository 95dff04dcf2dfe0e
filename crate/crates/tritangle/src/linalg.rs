//! Dense complex linear-algebra kernels.
//!
//! Everything here is hand-rolled on top of `ndarray` so that results are
//! bit-deterministic across platforms and so that eigenvectors of matrices
//! with exactly-zero off-diagonal blocks never mix disjoint supports (cyclic
//! Jacobi skips zero pivots, which downstream code relies on for block-pure
//! spectral decompositions). Sizes in this crate are small (d <= a few
//! hundred), where Jacobi iteration is accurate and fast enough.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Convergence threshold for Jacobi sweeps, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 60;

pub fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

pub fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deterministic pairwise summation; independent of how the values were
/// produced, so parallel cube loops stay bit-stable across thread counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Returns eigenvalues in descending order with matching eigenvector columns.
/// The input is symmetrized as (A + A^dagger)/2 first; exactly-zero
/// off-diagonal entries are never rotated, so disjoint diagonal blocks keep
/// disjoint eigenvector supports.
pub fn eigh_hermitian(a: &Array2<Complex64>) -> (Vec<f64>, Array2<Complex64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh_hermitian: matrix must be square");
    let mut m = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
    }
    let mut v = Array2::<Complex64>::eye(n);
    let fro = frobenius(&m).max(f64::MIN_POSITIVE);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= JACOBI_TOL * fro {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m[[p, q]];
                let absb = beta.norm();
                if absb == 0.0 {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                // annihilate m[p,q]: t solves |b| t^2 - (app-aqq) t - |b| = 0,
                // smaller-magnitude root for stability
                let d = (app - aqq) / (2.0 * absb);
                let t = if d >= 0.0 {
                    -1.0 / (d + (d * d + 1.0).sqrt())
                } else {
                    1.0 / (-d + (d * d + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = (t * c) * (beta / absb);
                // M <- G^dagger M G with G[[p,p]]=c, G[[p,q]]=s, G[[q,p]]=-conj(s), G[[q,q]]=c
                for k in 0..n {
                    let mp = m[[k, p]];
                    let mq = m[[k, q]];
                    m[[k, p]] = c * mp - s.conj() * mq;
                    m[[k, q]] = s * mp + c * mq;
                }
                for k in 0..n {
                    let mp = m[[p, k]];
                    let mq = m[[q, k]];
                    m[[p, k]] = c * mp - s * mq;
                    m[[q, k]] = s.conj() * mp + c * mq;
                }
                m[[p, q]] = Complex64::new(0.0, 0.0);
                m[[q, p]] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let vp = v[[k, p]];
                    let vq = v[[k, q]];
                    v[[k, p]] = c * vp - s.conj() * vq;
                    v[[k, q]] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    for (new_col, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, new_col]] = v[[r, old]];
        }
    }
    (eigenvalues, vectors)
}

/// Takagi factorization of a complex symmetric matrix: S = sum sigma_i u_i u_i^T
/// with sigma_i >= 0 descending and complex-orthonormal u_i.
///
/// Computed through the real symmetric doubling [[X, Y], [Y, -X]] whose
/// +sigma eigenvectors [x; y] give u = x + i y. Terms with
/// sigma <= keep_tol * sigma_max are dropped.
pub fn takagi(s: &Array2<Complex64>, keep_tol: f64) -> Vec<(f64, Array1<Complex64>)> {
    let n = s.nrows();
    assert_eq!(n, s.ncols(), "takagi: matrix must be square");
    let mut m2 = Array2::<Complex64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let sym = 0.5 * (s[[i, j]] + s[[j, i]]);
            let x = Complex64::new(sym.re, 0.0);
            let y = Complex64::new(sym.im, 0.0);
            m2[[i, j]] = x;
            m2[[i + n, j + n]] = -x;
            m2[[i, j + n]] = y;
            m2[[i + n, j]] = y;
        }
    }
    let (vals, vecs) = eigh_hermitian(&m2);
    // The doubled matrix is real and Jacobi rotations on a real matrix stay
    // real, so eigenvector imaginary parts are exactly zero.
    let smax = vals.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= keep_tol * smax || lam <= 0.0 {
            continue;
        }
        let mut u = Array1::<Complex64>::zeros(n);
        for r in 0..n {
            u[r] = Complex64::new(vecs[[r, k]].re, vecs[[r + n, k]].re);
        }
        out.push((lam, u));
    }
    out
}

/// Singular value decomposition through the Hermitian embedding
/// [[0, M], [M^dagger, 0]], which yields singular values without squaring
/// (full eps * sigma_1 accuracy, unlike a Gram-matrix route).
///
/// Returns (sigma, u_i, v_i) with sigma descending and only entries above
/// keep_tol * sigma_1 retained; M = sum sigma_i u_i v_i^dagger on that range.
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Vec<Array1<Complex64>>,
    pub v: Vec<Array1<Complex64>>,
}

pub fn svd_embed(m: &Array2<Complex64>, keep_tol: f64) -> Svd {
    let (p, q) = (m.nrows(), m.ncols());
    let n = p + q;
    let mut h = Array2::<Complex64>::zeros((n, n));
    for i in 0..p {
        for j in 0..q {
            h[[i, p + j]] = m[[i, j]];
            h[[p + j, i]] = m[[i, j]].conj();
        }
    }
    let (vals, vecs) = eigh_hermitian(&h);
    let smax = vals.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = Svd { sigma: Vec::new(), u: Vec::new(), v: Vec::new() };
    let sqrt2 = std::f64::consts::SQRT_2;
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= keep_tol * smax || lam <= 0.0 {
            continue;
        }
        let mut u = Array1::<Complex64>::zeros(p);
        let mut v = Array1::<Complex64>::zeros(q);
        for r in 0..p {
            u[r] = vecs[[r, k]] * sqrt2;
        }
        for r in 0..q {
            v[r] = vecs[[p + r, k]] * sqrt2;
        }
        out.sigma.push(lam);
        out.u.push(u);
        out.v.push(v);
    }
    out
}

/// Singular values only (descending, full set above absolute noise floor).
pub fn singular_values(m: &Array2<Complex64>) -> Vec<f64> {
    svd_embed(m, 0.0).sigma
}

/// Haar-distributed random unitary via QR of a complex Ginibre matrix with
/// the R-diagonal phase fix.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> Array2<Complex64> {
    let mut g = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[[i, j]] = Complex64::new(re, im) / std::f64::consts::SQRT_2;
        }
    }
    let mut q = g.clone();
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for j in 0..n {
        // modified Gram-Schmidt with one reorthogonalization pass
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    proj += q[[r, i]].conj() * q[[r, j]];
                }
                for r in 0..n {
                    let qi = q[[r, i]];
                    q[[r, j]] -= proj * qi;
                }
            }
        }
        let norm: f64 = (0..n).map(|r| q[[r, j]].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            q[[r, j]] /= norm;
        }
        let mut rjj = Complex64::new(0.0, 0.0);
        for r in 0..n {
            rjj += q[[r, j]].conj() * g[[r, j]];
        }
        if rjj.norm() > 0.0 {
            phases[j] = rjj / rjj.norm();
        }
    }
    for j in 0..n {
        for r in 0..n {
            q[[r, j]] *= phases[j];
        }
    }
    q
}

/// Complex standard-normal vector (each component N(0,1) + i N(0,1)).
pub fn gaussian_vector<R: Rng>(len: usize, rng: &mut R) -> Array1<Complex64> {
    let mut v = Array1::<Complex64>::zeros(len);
    for i in 0..len {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        v[i] = Complex64::new(re, im);
    }
    v
}
