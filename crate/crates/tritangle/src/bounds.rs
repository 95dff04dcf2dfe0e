//! Mixed-state machinery: the eigenbasis A tensor, its nested Kronecker
//! decompositions, the Wootters-style infimum, three lower-bound indicators
//! and a Monte-Carlo convex-roof upper estimator.
//!
//! The A tensor is assembled per cube from the fully symmetrized quartic form
//! q(v) = (v^T G00 v)(v^T G11 v) - (v^T Gx v)^2 of the eigenvector bilinears:
//! contracted with the columns of M^{1/2} U it reproduces |q|^2 = f of each
//! ensemble member exactly, which pins all conjugation conventions (the
//! rank-1 diagonal reduces to F^4).

mod optim;

pub use optim::OptimConfig;

use crate::kron::{rearrange, unvec};
use crate::linalg::{dagger, max_abs, singular_values};
use crate::state::{enumerate_selectors, extract_cube_from, PureState, Spectrum};
use crate::tangle::{cube_bilinear, f_pure};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Largest density-matrix rank accepted by the full bound pipeline
/// (the A tensor holds rank^8 entries).
pub const DEFAULT_MAX_RANK: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("density matrix rank {rank} exceeds the pipeline limit {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("empty factor family")]
    EmptyFamily,
    #[error("ensemble size {n} is below the state rank {r}")]
    BadEnsembleSize { n: usize, r: usize },
    #[error("matrix is not symmetric (relative deviation {0:.3e})")]
    NotSymmetric(f64),
    #[error("rearranged B factor is neither Hermitian nor anti-Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
}

/// The eigenbasis A tensor, stored as an r^4 x r^4 matrix with row composite
/// (l, m, j, k) and column composite (l', m', j', k'), both lexicographic.
#[derive(Debug, Clone)]
pub struct ATensor {
    pub rank: usize,
    pub matrix: Array2<Complex64>,
}

/// Per-cube symmetric quartic coefficient tensors Q[a,b,c,d] such that the
/// cube tangle square of sum_a v_a |psi_a> is |sum Q v v v v|^2, with the
/// eigenvalue weights sqrt(mu_a mu_b) absorbed into the bilinears.
pub(crate) struct CubeQuartics {
    /// one flat r^4 tensor per cube, index ((a r + b) r + c) r + d
    pub q: Vec<Vec<Complex64>>,
}

pub(crate) fn cube_quartics(spec: &Spectrum) -> CubeQuartics {
    let r = spec.rank;
    let dims = spec.dims;
    let sels = enumerate_selectors(dims);
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|m| m.sqrt()).collect();
    let q: Vec<Vec<Complex64>> = sels
        .par_iter()
        .map(|sel| {
            let cubes: Vec<_> = (0..r)
                .map(|i| {
                    extract_cube_from(&spec.eigenvector(i), dims, sel)
                        .expect("enumerated selector is valid")
                })
                .collect();
            let mut g00 = Array2::<Complex64>::zeros((r, r));
            let mut g11 = Array2::<Complex64>::zeros((r, r));
            let mut gx = Array2::<Complex64>::zeros((r, r));
            for a in 0..r {
                for b in 0..r {
                    let w = weights[a] * weights[b];
                    g00[[a, b]] = w * cube_bilinear(&cubes[a], &cubes[b], 0, 0);
                    g11[[a, b]] = w * cube_bilinear(&cubes[a], &cubes[b], 1, 1);
                    gx[[a, b]] = w
                        * 0.5
                        * (cube_bilinear(&cubes[a], &cubes[b], 0, 1)
                            + cube_bilinear(&cubes[a], &cubes[b], 1, 0));
                }
            }
            // fully symmetric quartic tensor: average the three pairings
            let pair = |x: &Array2<Complex64>, i: usize, j: usize, z: &Array2<Complex64>, k: usize, l: usize| {
                x[[i, j]] * z[[k, l]]
            };
            let mut t = vec![Complex64::new(0.0, 0.0); r * r * r * r];
            for a in 0..r {
                for b in 0..r {
                    for c in 0..r {
                        for d in 0..r {
                            let term = |x: usize, y: usize, z: usize, w2: usize| {
                                0.5 * (pair(&g00, x, y, &g11, z, w2) + pair(&g11, x, y, &g00, z, w2))
                                    - pair(&gx, x, y, &gx, z, w2)
                            };
                            let v = (term(a, b, c, d) + term(a, c, b, d) + term(a, d, c, b))
                                / 3.0;
                            t[((a * r + b) * r + c) * r + d] = v;
                        }
                    }
                }
            }
            t
        })
        .collect();
    CubeQuartics { q }
}

/// Assemble the A tensor from a spectral decomposition.
pub fn build_a(spec: &Spectrum, max_rank: usize) -> Result<ATensor, BoundsError> {
    let r = spec.rank;
    if r > max_rank {
        return Err(BoundsError::RankTooLarge { rank: r, max: max_rank });
    }
    let quartics = cube_quartics(spec);
    let r4 = r * r * r * r;
    let mut matrix = Array2::<Complex64>::zeros((r4, r4));
    let idx4 = |a: usize, b: usize, c: usize, d: usize| ((a * r + b) * r + c) * r + d;
    matrix
        .outer_iter_mut()
        .into_par_iter()
        .enumerate()
        .for_each(|(row, mut out)| {
            let k = row % r;
            let j = (row / r) % r;
            let m = (row / (r * r)) % r;
            let l = row / (r * r * r);
            for col in 0..r4 {
                let kp = col % r;
                let jp = (col / r) % r;
                let mp = (col / (r * r)) % r;
                let lp = col / (r * r * r);
                let mut acc = Complex64::new(0.0, 0.0);
                for q in &quartics.q {
                    acc += q[idx4(l, lp, j, jp)] * q[idx4(m, mp, k, kp)].conj();
                }
                out[col] = acc;
            }
        });
    Ok(ATensor { rank: r, matrix })
}

impl ATensor {
    #[inline]
    fn idx(&self, l: usize, m: usize, j: usize, k: usize) -> usize {
        ((l * self.rank + m) * self.rank + j) * self.rank + k
    }

    pub fn entry(
        &self,
        l: usize,
        m: usize,
        j: usize,
        k: usize,
        lp: usize,
        mp: usize,
        jp: usize,
        kp: usize,
    ) -> Complex64 {
        self.matrix[[self.idx(l, m, j, k), self.idx(lp, mp, jp, kp)]]
    }

    /// Max deviation from the exchange symmetry
    /// A[(lm),(jk); (l'm'),(j'k')] = A[(jk),(lm); (j'k'),(l'm')], relative to
    /// the largest entry.
    pub fn exchange_defect(&self) -> f64 {
        let r = self.rank;
        let scale = max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        let mut dev = 0.0f64;
        for l in 0..r {
            for m in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        for lp in 0..r {
                            for mp in 0..r {
                                for jp in 0..r {
                                    for kp in 0..r {
                                        let a = self.entry(l, m, j, k, lp, mp, jp, kp);
                                        let b = self.entry(j, k, l, m, jp, kp, lp, mp);
                                        dev = dev.max((a - b).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        dev / scale
    }

    /// Max deviation from the conjugation symmetry: exchanging the two
    /// subspaces inside each doubled pair (l <-> m, j <-> k, primes alike)
    /// maps A to its complex conjugate.
    pub fn conjugation_defect(&self) -> f64 {
        let r = self.rank;
        let scale = max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        let mut dev = 0.0f64;
        for l in 0..r {
            for m in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        for lp in 0..r {
                            for mp in 0..r {
                                for jp in 0..r {
                                    for kp in 0..r {
                                        let a = self.entry(l, m, j, k, lp, mp, jp, kp);
                                        let b = self.entry(m, l, k, j, mp, lp, kp, jp);
                                        dev = dev.max((a - b.conj()).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        dev / scale
    }

    /// Diagonal contraction with one ensemble column u (plain slots get u,
    /// conjugated slots get conj(u)); equals F^4 of the corresponding
    /// unnormalized ensemble member.
    pub fn contract_column(&self, u: &Array1<Complex64>) -> f64 {
        let r = self.rank;
        assert_eq!(u.len(), r);
        let r4 = r * r * r * r;
        let mut acc = Complex64::new(0.0, 0.0);
        for row in 0..r4 {
            let k = row % r;
            let j = (row / r) % r;
            let m = (row / (r * r)) % r;
            let l = row / (r * r * r);
            let wrow = u[l] * u[m].conj() * u[j] * u[k].conj();
            if wrow.norm_sqr() == 0.0 {
                continue;
            }
            for col in 0..r4 {
                let kp = col % r;
                let jp = (col / r) % r;
                let mp = (col / (r * r)) % r;
                let lp = col / (r * r * r);
                let wcol = u[lp] * u[mp].conj() * u[jp] * u[kp].conj();
                acc += self.matrix[[row, col]] * wrow * wcol;
            }
        }
        acc.re
    }
}

/// One factor of the first-level decomposition A = sum_j B_j (x) B_j.
#[derive(Debug, Clone)]
pub struct BFactor {
    /// Takagi value of the rearranged A (descending across the list).
    pub sigma: f64,
    /// r^2 x r^2 factor; sum_j B_j (x) B_j reconstructs A exactly.
    pub b: Array2<Complex64>,
}

/// Rearrange the A matrix across the (lm | jk) boundary: row composite
/// (l', m', l, m), column composite (j', k', j, k).
fn rearrange_a(a: &ATensor) -> Array2<Complex64> {
    let r = a.rank;
    let r4 = r * r * r * r;
    let mut out = Array2::<Complex64>::zeros((r4, r4));
    for l in 0..r {
        for m in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for lp in 0..r {
                        for mp in 0..r {
                            for jp in 0..r {
                                for kp in 0..r {
                                    let row = ((lp * r + mp) * r + l) * r + m;
                                    let col = ((jp * r + kp) * r + j) * r + k;
                                    out[[row, col]] = a.entry(l, m, j, k, lp, mp, jp, kp);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Takagi-factor the rearranged A using its antiunitary structure.
///
/// The conjugation symmetry makes H = Pi * A~ Hermitian, where Pi swaps the
/// two subspaces inside each composite index. Eigenvectors of H can be chosen
/// J-real (J v = Pi conj(v)); an eigenpair (lambda, w) then yields the Takagi
/// pair (|lambda|, conj(w)) for positive lambda and (|lambda|, i conj(w)) for
/// negative lambda, which keeps the rearranged B factors exactly Hermitian or
/// exactly anti-Hermitian instead of arbitrary mixtures.
fn takagi_with_conj_structure(
    at: &Array2<Complex64>,
    r: usize,
    keep_tol: f64,
) -> Result<Vec<(f64, Array1<Complex64>)>, BoundsError> {
    let n = at.nrows();
    let sym_dev = {
        let t = at.t().to_owned();
        max_abs(&(at - &t))
    };
    let scale = max_abs(at).max(f64::MIN_POSITIVE);
    if sym_dev > 1e-8 * scale {
        return Err(BoundsError::NotSymmetric(sym_dev / scale));
    }
    // permutation pi: position of (l', m', l, m) -> position of (m', l', m, l)
    let mut perm = vec![0usize; n];
    for lp in 0..r {
        for mp in 0..r {
            for l in 0..r {
                for m in 0..r {
                    perm[((lp * r + mp) * r + l) * r + m] = ((mp * r + lp) * r + m) * r + l;
                }
            }
        }
    }
    let mut h = Array2::<Complex64>::zeros((n, n));
    for row in 0..n {
        for col in 0..n {
            h[[perm[row], col]] = at[[row, col]];
        }
    }
    let (vals, vecs) = crate::linalg::eigh_hermitian(&h);
    let lam_max = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let apply_j = |v: &Array1<Complex64>| -> Array1<Complex64> {
        let mut out = Array1::<Complex64>::zeros(n);
        for i in 0..n {
            out[perm[i]] = v[i].conj();
        }
        out
    };

    // group eigenvalues into clusters and build a J-real basis per cluster
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let lam = vals[order[i]];
        if lam.abs() <= keep_tol * lam_max {
            i += 1;
            continue;
        }
        let mut jend = i;
        while jend < n && (vals[order[jend]] - lam).abs() <= 1e-9 * lam_max {
            jend += 1;
        }
        let mut fixed: Vec<Array1<Complex64>> = Vec::new();
        for &col in &order[i..jend] {
            let v = vecs.column(col).to_owned();
            let jv = apply_j(&v);
            let cands = [&v + &jv, (&v - &jv).mapv(|z| Complex64::new(0.0, 1.0) * z)];
            for cand in cands {
                if fixed.len() >= jend - i {
                    break;
                }
                let mut w = cand;
                for u in &fixed {
                    let proj: Complex64 =
                        u.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                    for idx in 0..n {
                        let ui = u[idx];
                        w[idx] -= proj * ui;
                    }
                }
                let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    fixed.push(w.mapv(|z| z / norm));
                }
            }
        }
        debug_assert_eq!(fixed.len(), jend - i, "J-real basis incomplete");
        for w in fixed {
            let u = if lam > 0.0 {
                w.mapv(|z| z.conj())
            } else {
                w.mapv(|z| Complex64::new(0.0, 1.0) * z.conj())
            };
            out.push((lam.abs(), u));
        }
        i = jend;
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(out)
}

/// First-level split: A = sum_j B_j (x) B_j with B_j = unvec(sqrt(sigma) u_j)
/// from the Takagi factorization of the rearranged A.
pub fn split_a_to_b(a: &ATensor, trunc: f64) -> Result<Vec<BFactor>, BoundsError> {
    let r = a.rank;
    let at = rearrange_a(a);
    let fac = takagi_with_conj_structure(&at, r, trunc)?;
    Ok(fac
        .into_iter()
        .map(|(sigma, u)| {
            let scaled = u.mapv(|z| z * sigma.sqrt());
            BFactor { sigma, b: unvec(&scaled, r * r, r * r) }
        })
        .collect())
}

/// One term of the second-level decomposition of a B factor.
#[derive(Debug, Clone)]
pub struct CTerm {
    /// magnitude of the factor eigenvalue sigma'_{jm}
    pub sigma: f64,
    /// +1 or -1: the sign of the eigenvalue in the Hermitian form
    pub sign: f64,
    /// r x r matrix; phase * sum_m sign_m C_m (x) conj(C_m) reconstructs B_j
    pub c: Array2<Complex64>,
}

/// Second-level factors of one B_j together with the phase of its rearranged
/// Hermitian form.
#[derive(Debug, Clone)]
pub struct CBlock {
    /// Takagi value sigma_j of the parent B factor.
    pub sigma: f64,
    /// 1 or i: rearranged B~ equals phase times a Hermitian matrix.
    pub phase: Complex64,
    pub terms: Vec<CTerm>,
}

/// The complete nested factor family of an A tensor.
#[derive(Debug, Clone)]
pub struct CFamily {
    pub rank: usize,
    pub blocks: Vec<CBlock>,
}

impl CFamily {
    pub fn r_prime(&self) -> usize {
        self.blocks.len()
    }

    pub fn r_second(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.terms.len()).collect()
    }

    pub fn total_terms(&self) -> usize {
        self.blocks.iter().map(|b| b.terms.len()).sum()
    }

    pub fn from_spectrum(spec: &Spectrum, max_rank: usize, trunc: f64) -> Result<Self, BoundsError> {
        let a = build_a(spec, max_rank)?;
        let bs = split_a_to_b(&a, trunc)?;
        let mut blocks = Vec::with_capacity(bs.len());
        for bf in &bs {
            blocks.push(split_b_to_c(bf, trunc)?);
        }
        Ok(CFamily { rank: spec.rank, blocks })
    }
}

/// Second-level split of one B factor: rearrange across the within-pair
/// boundary and eigendecompose the (phase-corrected) Hermitian form.
/// The rearranged B~ of a structurally clean pipeline is exactly Hermitian or
/// exactly i times Hermitian; anything else is an upstream bug.
pub fn split_b_to_c(bf: &BFactor, trunc: f64) -> Result<CBlock, BoundsError> {
    let r2 = bf.b.nrows();
    let r = (r2 as f64).sqrt().round() as usize;
    assert_eq!(r * r, r2, "B factor side must be a perfect square");
    let bt = rearrange(&bf.b, r, r).expect("square by construction");
    let btd = dagger(&bt);
    let herm_dev = max_abs(&(&bt - &btd));
    let anti_dev = max_abs(&(&bt + &btd));
    let scale = max_abs(&bt).max(f64::MIN_POSITIVE);
    let (phase, herm) = if herm_dev <= anti_dev {
        if herm_dev > 1e-7 * scale {
            return Err(BoundsError::NotHermitian(herm_dev / scale));
        }
        (Complex64::new(1.0, 0.0), bt.mapv(|z| z) )
    } else {
        if anti_dev > 1e-7 * scale {
            return Err(BoundsError::NotHermitian(anti_dev / scale));
        }
        // B~ = i H: divide out the phase
        (Complex64::new(0.0, 1.0), bt.mapv(|z| z / Complex64::new(0.0, 1.0)))
    };
    let hs = {
        let hd = dagger(&herm);
        (&herm + &hd).mapv(|z| 0.5 * z)
    };
    let (vals, vecs) = crate::linalg::eigh_hermitian(&hs);
    let lmax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].abs().partial_cmp(&vals[a].abs()).unwrap());
    for &k in &order {
        let lam = vals[k];
        if lam.abs() <= trunc * lmax.max(f64::MIN_POSITIVE) {
            continue;
        }
        let w = vecs.column(k).to_owned().mapv(|z| z * lam.abs().sqrt());
        terms.push(CTerm { sigma: lam.abs(), sign: lam.signum(), c: unvec(&w, r, r) });
    }
    Ok(CBlock { sigma: bf.sigma, phase, terms })
}

/// Reconstruct B_j from its C terms: phase * sum_m sign_m C_m (x) conj(C_m),
/// mapped back through the within-pair rearrangement.
pub fn reconstruct_b(block: &CBlock, r: usize) -> Array2<Complex64> {
    let mut bt = Array2::<Complex64>::zeros((r * r, r * r));
    for term in &block.terms {
        for i in 0..r * r {
            for j in 0..r * r {
                let vi = crate::kron::vec_col(&term.c)[i];
                let vj = crate::kron::vec_col(&term.c)[j];
                bt[[i, j]] += term.sign * vi * vj.conj();
            }
        }
    }
    let bt = bt.mapv(|z| z * block.phase);
    crate::kron::unrearrange(&bt, r, r).expect("shape by construction")
}

/// Wootters-style infimum: max(sigma_1 - sum_{i>1} sigma_i, 0) over singular
/// values of a complex symmetric matrix. Inputs asymmetric beyond 1e-8
/// (relative) are rejected; below that they are symmetrized first.
pub fn wootters_inf(c: &Array2<Complex64>) -> Result<f64, BoundsError> {
    let ct = c.t().to_owned();
    let dev = max_abs(&(c - &ct));
    let scale = max_abs(c).max(f64::MIN_POSITIVE);
    if dev > 1e-8 * scale {
        return Err(BoundsError::NotSymmetric(dev / scale));
    }
    Ok(wootters_value(c))
}

/// The same functional without the symmetry gate. The diagonal of U^T X U
/// equals the diagonal of U^T X^T U for every U, so the infimum of
/// sum_i |(U^T X U)_ii| depends only on the symmetric part of X; evaluating
/// on sym(X) is exact, not an approximation.
pub fn wootters_value(c: &Array2<Complex64>) -> f64 {
    let n = c.nrows();
    let mut sym = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            sym[[i, j]] = 0.5 * (c[[i, j]] + c[[j, i]]);
        }
    }
    let sv = singular_values(&sym);
    match sv.split_first() {
        Some((first, rest)) => (first - rest.iter().sum::<f64>()).max(0.0),
        None => 0.0,
    }
}

/// A feasible point of the two-level bound optimization: z over the factor
/// blocks with sum |z_j|^4 = 1, Z over all terms with sum |Z_jm|^2 = 1.
#[derive(Debug, Clone)]
pub struct SearchPoint {
    pub z: Vec<Complex64>,
    /// flattened over (j, m) in block order
    pub zz: Vec<Complex64>,
}

impl SearchPoint {
    pub fn constraint_defects(&self) -> (f64, f64) {
        let s4: f64 = self.z.iter().map(|z| z.norm().powi(4)).sum();
        let s2: f64 = self.zz.iter().map(|z| z.norm_sqr()).sum();
        ((s4 - 1.0).abs(), (s2 - 1.0).abs())
    }
}

/// Outcome of one bound optimization.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub value: f64,
    pub best_restart: usize,
    pub sweeps: usize,
    pub point: Option<SearchPoint>,
}


/// Lower-bound indicator from the two-level Cauchy-Schwarz form: the best
/// found value of the Wootters functional of sum_{j,m} z_j Z_{jm} (C_j)_m
/// over feasible search points, maximized by seeded derivative-free
/// coordinate ascent. Deterministic given the config seed.
pub fn lower_bound_zz(family: &CFamily, cfg: &OptimConfig) -> f64 {
    lower_bound_zz_report(family, cfg).value
}

pub fn lower_bound_zz_report(family: &CFamily, cfg: &OptimConfig) -> BoundReport {
    if family.total_terms() == 0 {
        return BoundReport { value: 0.0, best_restart: 0, sweeps: 0, point: None };
    }
    optim::maximize_zz(family, cfg, true)
}

/// Single-level variant: optimizes only Z and scales by (1/r')^(1/4).
pub fn lower_bound_z(family: &CFamily, cfg: &OptimConfig) -> f64 {
    lower_bound_z_report(family, cfg).value
}

pub fn lower_bound_z_report(family: &CFamily, cfg: &OptimConfig) -> BoundReport {
    if family.total_terms() == 0 {
        return BoundReport { value: 0.0, best_restart: 0, sweeps: 0, point: None };
    }
    let mut report = optim::maximize_zz(family, cfg, false);
    let scale = (1.0 / family.r_prime() as f64).powf(0.25);
    report.value *= scale;
    report
}

/// Heuristic indicator: the Wootters functional of the single C term with the
/// largest factor value sigma'.
pub fn lower_bound_max_c(family: &CFamily) -> Result<f64, BoundsError> {
    let mut best: Option<&CTerm> = None;
    for block in &family.blocks {
        for term in &block.terms {
            if best.map(|b| term.sigma > b.sigma).unwrap_or(true) {
                best = Some(term);
            }
        }
    }
    match best {
        Some(term) => Ok(wootters_value(&term.c)),
        None => Err(BoundsError::EmptyFamily),
    }
}

/// Monte-Carlo convex-roof upper estimator: minimum over sampled ensemble
/// decompositions of sum_i p_i F(psi_i). The canonical eigendecomposition is
/// always sample zero; the rest draw right-unitary matrices from the first r
/// rows of Haar-random N x N unitaries with per-sample seeded streams.
/// The result is an upper bound of the convex roof by construction.
pub fn roof_upper(
    spec: &Spectrum,
    samples: usize,
    ensemble_size: usize,
    seed: u64,
) -> Result<f64, BoundsError> {
    let r = spec.rank;
    let n = ensemble_size;
    if n < r {
        return Err(BoundsError::BadEnsembleSize { n, r });
    }
    let root = spec.weighted_vectors(); // d x r
    let dims = spec.dims;
    let eval_u = |u: &Array2<Complex64>| -> f64 {
        let psi = root.dot(u); // d x n
        let mut total = 0.0;
        for i in 0..n {
            let col = psi.column(i).to_owned();
            let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            if p <= 1e-300 {
                continue;
            }
            let normalized = col.mapv(|z| z / p.sqrt());
            let member = PureState { dims, amplitudes: normalized, normalized: true };
            total += p * f_pure(&member);
        }
        total
    };
    // canonical sample: U = [I_r | 0]
    let mut canonical = Array2::<Complex64>::zeros((r, n));
    for i in 0..r {
        canonical[[i, i]] = Complex64::new(1.0, 0.0);
    }
    let canonical_value = eval_u(&canonical);
    let sampled = (1..=samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let full = crate::linalg::haar_unitary(n, &mut rng);
            let mut u = Array2::<Complex64>::zeros((r, n));
            for i in 0..r {
                for j in 0..n {
                    u[[i, j]] = full[[i, j]];
                }
            }
            eval_u(&u)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(canonical_value.min(sampled))
}

/// Convenience: the full bound pipeline from a density matrix spectrum.
pub fn bounds_from_spectrum(
    spec: &Spectrum,
    cfg: &OptimConfig,
    max_rank: usize,
    trunc: f64,
) -> Result<(f64, f64, f64), BoundsError> {
    let family = CFamily::from_spectrum(spec, max_rank, trunc)?;
    let zz = lower_bound_zz(&family, cfg);
    let z = lower_bound_z(&family, cfg);
    let maxc = match lower_bound_max_c(&family) {
        Ok(v) => v,
        Err(BoundsError::EmptyFamily) => 0.0,
        Err(e) => return Err(e),
    };
    Ok((zz, z, maxc))
}
