//! Analytic quasi-pure approximation: the tau matrix of second-order A-tensor
//! elements around the dominant eigenvector, and F_a from its singular values.
//!
//! The tau entries are the coefficients of the second-order expansion of the
//! cube-sum quartic around the leading eigendirection, normalized so that the
//! rank-1 limit reproduces F exactly:
//!
//!   tau_ab = (3 T_ab - 2 S_a S_b / A0) / A0^(3/4),
//!
//! with T_ab the (1,1,a,b) elements of the symmetric quartic summed over
//! cubes against the conjugated leading coefficient, S its first column and
//! A0 = T_11 the leading diagonal A-tensor entry. The matrix is complex
//! symmetric by construction and tau_11 = A0^(1/4).

use crate::linalg::singular_values;
use crate::state::{enumerate_selectors, extract_cube_from, Spectrum};
use crate::tangle::cube_bilinear;
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

/// Leading-tangle floor below which the approximation is undefined
/// (the normalization divides by A0^(3/4)).
pub const DOMINANT_TANGLE_FLOOR: f64 = 1e-14;

/// Relative eigenvalue window that counts as a degenerate leading eigenvalue.
const LEADING_DEGENERACY_TOL: f64 = 1e-10;

/// Rotations sampled when the leading eigenvalue is degenerate.
const TIE_BREAK_ROTATIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuasiPureError {
    #[error("dominant eigenvector has zero cube-tangle sum; F_a is undefined")]
    DominantTangleZero,
    #[error("tau matrix asymmetry {0:.3e} exceeds tolerance")]
    AsymmetryTooLarge(f64),
}

/// The r x r tau matrix of the quasi-pure approximation.
#[derive(Debug, Clone)]
pub struct TauMatrix {
    pub matrix: Array2<Complex64>,
    /// pre-symmetrization asymmetry, relative to the largest entry
    pub asymmetry: f64,
    pub rank: usize,
    /// leading A-tensor diagonal entry (tau_11 = a0^(1/4))
    pub a0: f64,
    /// set when the leading eigenvalue was degenerate and the dominant
    /// eigenvector was chosen by seeded rotation search
    pub leading_degenerate: bool,
}

struct SecondOrder {
    t: Array2<Complex64>,
    a0: f64,
}

/// T_ab = sum_cubes conj(q0) Qs[1,1,a,b] from the per-cube bilinear matrices,
/// never materializing the full A tensor (r^2 entries per cube).
fn second_order(spec: &Spectrum, vectors: &Array2<Complex64>) -> SecondOrder {
    let r = spec.rank;
    let dims = spec.dims;
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|m| m.sqrt()).collect();
    let sels = enumerate_selectors(dims);
    let partials: Vec<Array2<Complex64>> = sels
        .par_iter()
        .map(|sel| {
            let cubes: Vec<_> = (0..r)
                .map(|i| {
                    extract_cube_from(&vectors.column(i).to_owned(), dims, sel)
                        .expect("enumerated selector is valid")
                })
                .collect();
            // bilinears against the leading vector and the leading 2x2 block
            let bil = |a: usize, b: usize, h: usize, k: usize| {
                weights[a] * weights[b] * cube_bilinear(&cubes[a], &cubes[b], h, k)
            };
            let g00_0: Vec<Complex64> = (0..r).map(|a| bil(0, a, 0, 0)).collect();
            let g11_0: Vec<Complex64> = (0..r).map(|a| bil(0, a, 1, 1)).collect();
            let gx_0: Vec<Complex64> =
                (0..r).map(|a| 0.5 * (bil(0, a, 0, 1) + bil(0, a, 1, 0))).collect();
            let q0 = g00_0[0] * g11_0[0] - gx_0[0] * gx_0[0];
            let mut t = Array2::<Complex64>::zeros((r, r));
            for a in 0..r {
                for b in 0..r {
                    let g00_ab = bil(a, b, 0, 0);
                    let g11_ab = bil(a, b, 1, 1);
                    let gx_ab = 0.5 * (bil(a, b, 0, 1) + bil(a, b, 1, 0));
                    // Qs[1,1,a,b]: average of the three pairings of the
                    // symmetric quartic with two slots pinned to the leader
                    let t00ab =
                        0.5 * (g00_0[0] * g11_ab + g11_0[0] * g00_ab) - gx_0[0] * gx_ab;
                    let t0a0b =
                        0.5 * (g00_0[a] * g11_0[b] + g11_0[a] * g00_0[b]) - gx_0[a] * gx_0[b];
                    let t0b0a =
                        0.5 * (g00_0[b] * g11_0[a] + g11_0[b] * g00_0[a]) - gx_0[b] * gx_0[a];
                    t[[a, b]] = q0.conj() * (t00ab + t0a0b + t0b0a) / 3.0;
                }
            }
            t
        })
        .collect();
    let mut t = Array2::<Complex64>::zeros((r, r));
    for p in partials {
        t += &p;
    }
    let a0 = t[[0, 0]].re;
    SecondOrder { t, a0 }
}

/// Leading-diagonal A entry (cube-tangle sum of the candidate leading vector).
fn leading_a0(spec: &Spectrum, candidate: &Array1<Complex64>) -> f64 {
    let dims = spec.dims;
    let mu1 = spec.eigenvalues[0];
    let sels = enumerate_selectors(dims);
    let vals: Vec<f64> = sels
        .iter()
        .map(|sel| {
            let cube = extract_cube_from(candidate, dims, sel).expect("valid selector");
            let b = |h: usize, k: usize| mu1 * cube_bilinear(&cube, &cube, h, k);
            let q0 = b(0, 0) * b(1, 1) - (0.5 * (b(0, 1) + b(1, 0))).powi(2);
            q0.norm_sqr()
        })
        .collect();
    crate::linalg::pairwise_sum(&vals)
}

/// Build the tau matrix. When the leading eigenvalue is degenerate, the
/// dominant eigenvector is the one maximizing the leading A entry over seeded
/// real-orthogonal rotations of the leading eigenspace.
pub fn build_tau(spec: &Spectrum) -> Result<TauMatrix, QuasiPureError> {
    let r = spec.rank;
    if r == 0 {
        return Err(QuasiPureError::DominantTangleZero);
    }
    let mu1 = spec.eigenvalues[0];
    let cluster = spec
        .eigenvalues
        .iter()
        .take_while(|&&mu| (mu1 - mu).abs() <= LEADING_DEGENERACY_TOL * mu1.max(1e-300))
        .count();
    let mut vectors = spec.eigenvectors.clone();
    let leading_degenerate = cluster > 1;
    if leading_degenerate {
        let d = vectors.nrows();
        let mut best: Option<(f64, Array2<Complex64>)> = None;
        for rot in 0..TIE_BREAK_ROTATIONS {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7157_1e00 + rot as u64);
            let q = real_orthogonal(cluster, &mut rng);
            let mut rotated = vectors.clone();
            for col in 0..cluster {
                for row in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for src in 0..cluster {
                        acc += vectors[[row, src]] * q[[src, col]];
                    }
                    rotated[[row, col]] = acc;
                }
            }
            let a0 = leading_a0(spec, &rotated.column(0).to_owned());
            if best.as_ref().map(|(b, _)| a0 > *b).unwrap_or(true) {
                best = Some((a0, rotated));
            }
        }
        vectors = best.expect("at least one rotation sampled").1;
    }

    let so = second_order(spec, &vectors);
    if so.a0 <= DOMINANT_TANGLE_FLOOR {
        return Err(QuasiPureError::DominantTangleZero);
    }
    let a0 = so.a0;
    let s: Vec<Complex64> = (0..r).map(|a| so.t[[a, 0]]).collect();
    let norm = a0.powf(0.75);
    let mut tau = Array2::<Complex64>::zeros((r, r));
    for a in 0..r {
        for b in 0..r {
            tau[[a, b]] = (3.0 * so.t[[a, b]] - 2.0 * s[a] * s[b] / a0) / norm;
        }
    }
    let taut = tau.t().to_owned();
    let scale = crate::linalg::max_abs(&tau).max(f64::MIN_POSITIVE);
    let asymmetry = crate::linalg::max_abs(&(&tau - &taut)) / scale;
    if asymmetry > 1e-8 {
        return Err(QuasiPureError::AsymmetryTooLarge(asymmetry));
    }
    let sym = (&tau + &taut).mapv(|z| 0.5 * z);
    Ok(TauMatrix { matrix: sym, asymmetry, rank: r, a0, leading_degenerate })
}

/// F_a = max(lambda_1 - sum_{i>1} lambda_i, 0) over the singular values of tau.
pub fn f_a(tau: &TauMatrix) -> f64 {
    let sv = singular_values(&tau.matrix);
    match sv.split_first() {
        Some((first, rest)) => (first - rest.iter().sum::<f64>()).max(0.0),
        None => 0.0,
    }
}

/// Singular values of tau, descending (reported by the CLI).
pub fn tau_singular_values(tau: &TauMatrix) -> Vec<f64> {
    singular_values(&tau.matrix)
}

fn real_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Array2<f64> {
    let mut g = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            g[[i, j]] = rng.sample(StandardNormal);
        }
    }
    // Gram-Schmidt columns
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = (0..n).map(|r| g[[r, i]] * g[[r, j]]).sum();
                for r in 0..n {
                    let gi = g[[r, i]];
                    g[[r, j]] -= proj * gi;
                }
            }
        }
        let norm: f64 = (0..n).map(|r| g[[r, j]] * g[[r, j]]).sum::<f64>().sqrt();
        for r in 0..n {
            g[[r, j]] /= norm;
        }
    }
    g
}
