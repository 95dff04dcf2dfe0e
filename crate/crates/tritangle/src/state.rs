//! Domain types for tripartite states: pure amplitude tensors, density
//! matrices with cached spectra, and the cube selectors that carve a state
//! into 2x2x2 subtensors.

use crate::linalg::{eigh_hermitian, max_abs};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

/// Eigenvalues at or below this are treated as numerical zeros of a density
/// matrix (absolute scale; traces are 1).
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-12;

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude count {got} does not match dims product {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("party dimension {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix has a negative eigenvalue ({0:.3e})")]
    NotPositive(f64),
    #[error("trace deviates from 1 by {0:.3e}")]
    NotUnitTrace(f64),
    #[error("cube selector index out of range for the state dimensions")]
    SelectorOutOfRange,
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator dimension does not match the party dimension")]
    DimMismatch,
}

/// Local dimensions (n1, n2, n3) of the three parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims(pub usize, pub usize, pub usize);

impl Dims {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self, StateError> {
        for n in [n1, n2, n3] {
            if n < 2 {
                return Err(StateError::DimensionTooSmall(n));
            }
        }
        Ok(Dims(n1, n2, n3))
    }

    pub fn product(&self) -> usize {
        self.0 * self.1 * self.2
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.0, self.1, self.2]
    }

    /// Flat index of (i, j, k) with k fastest (row-major).
    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.1 + j) * self.2 + k
    }
}

/// A tripartite pure state: amplitudes a_{ijk} stored row-major, k fastest.
/// Unnormalized states are allowed (cubes are unnormalized substates).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub dims: Dims,
    pub amplitudes: Array1<Complex64>,
    pub normalized: bool,
}

impl PureState {
    #[inline]
    pub fn amp(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.amplitudes[self.dims.flat(i, j, k)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Validate raw amplitudes against dims; flags normalization, never rescales.
pub fn validate_pure(dims: Dims, amplitudes: Array1<Complex64>) -> Result<PureState, StateError> {
    for n in dims.as_array() {
        if n < 2 {
            return Err(StateError::DimensionTooSmall(n));
        }
    }
    if amplitudes.len() != dims.product() {
        return Err(StateError::LengthMismatch {
            expected: dims.product(),
            got: amplitudes.len(),
        });
    }
    let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let normalized = (norm_sqr - 1.0).abs() <= NORMALIZATION_TOL;
    Ok(PureState { dims, amplitudes, normalized })
}

/// A tripartite density matrix (Hermitian, PSD, unit trace), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub dims: Dims,
    pub matrix: Array2<Complex64>,
}

impl MixedState {
    /// Validates Hermiticity and trace; positivity is checked when the
    /// spectrum is computed.
    pub fn new(dims: Dims, matrix: Array2<Complex64>) -> Result<Self, StateError> {
        let d = dims.product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(StateError::LengthMismatch { expected: d * d, got: matrix.len() });
        }
        let mut herm_dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                herm_dev = herm_dev.max((matrix[[i, j]] - matrix[[j, i]].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(herm_dev));
        }
        let trace: Complex64 = (0..d).map(|i| matrix[[i, i]]).sum();
        let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > TRACE_TOL {
            return Err(StateError::NotUnitTrace(trace_dev));
        }
        Ok(MixedState { dims, matrix })
    }

    /// Rank-1 projector onto a normalized pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        let d = psi.dims.product();
        let mut m = Array2::<Complex64>::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = psi.amplitudes[i] * psi.amplitudes[j].conj();
            }
        }
        MixedState { dims: psi.dims, matrix: m }
    }
}

/// Spectral decomposition of a density matrix: eigenvalues descending, all
/// above the rank cutoff, with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub dims: Dims,
    pub eigenvalues: Vec<f64>,
    /// d x r matrix whose columns are the retained eigenvectors.
    pub eigenvectors: Array2<Complex64>,
    pub rank: usize,
}

impl Spectrum {
    pub fn eigenvector(&self, i: usize) -> Array1<Complex64> {
        self.eigenvectors.column(i).to_owned()
    }

    /// Phi M^{1/2}: columns scaled by sqrt(mu_i); its columns are the
    /// subnormalized members of the eigendecomposition ensemble.
    pub fn weighted_vectors(&self) -> Array2<Complex64> {
        let mut w = self.eigenvectors.clone();
        for (i, &mu) in self.eigenvalues.iter().enumerate() {
            let s = mu.sqrt();
            for r in 0..w.nrows() {
                w[[r, i]] *= s;
            }
        }
        w
    }
}

/// Eigendecompose a density matrix, dropping eigenvalues at or below `cutoff`.
pub fn spectral_decompose(rho: &MixedState, cutoff: f64) -> Result<Spectrum, StateError> {
    let (vals, vecs) = eigh_hermitian(&rho.matrix);
    if let Some(&min) = vals.last() {
        if min < -POSITIVITY_TOL {
            return Err(StateError::NotPositive(min));
        }
    }
    let rank = vals.iter().take_while(|&&v| v > cutoff).count();
    let d = rho.dims.product();
    let mut kept = Array2::<Complex64>::zeros((d, rank));
    for c in 0..rank {
        for r in 0..d {
            kept[[r, c]] = vecs[[r, c]];
        }
    }
    Ok(Spectrum {
        dims: rho.dims,
        eigenvalues: vals[..rank].to_vec(),
        eigenvectors: kept,
        rank,
    })
}

/// One index pair per party, selecting a 2x2x2 subtensor of the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubeSelector {
    /// (low, high) retained indices per party, low < high.
    pub pairs: [(usize, usize); 3],
}

/// The 2x2x2 coefficient cube b_{xyz}; index order (x, y, z), z fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    pub amplitudes: [Complex64; 8],
}

impl Cube {
    #[inline]
    pub fn amp(&self, x: usize, y: usize, z: usize) -> Complex64 {
        self.amplitudes[(x << 2) | (y << 1) | z]
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Cube {
        let mut amps = self.amplitudes;
        for a in &mut amps {
            *a *= c;
        }
        Cube { amplitudes: amps }
    }
}

/// All N1*N2*N3 selectors for `dims`, N_p = n_p (n_p - 1)/2, in lexicographic
/// order with the party-1 pair varying slowest.
pub fn enumerate_selectors(dims: Dims) -> Vec<CubeSelector> {
    let pairs_of = |n: usize| -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(n * (n - 1) / 2);
        for p in 0..n {
            for q in (p + 1)..n {
                v.push((p, q));
            }
        }
        v
    };
    let (p1, p2, p3) = (pairs_of(dims.0), pairs_of(dims.1), pairs_of(dims.2));
    let mut out = Vec::with_capacity(p1.len() * p2.len() * p3.len());
    for &a in &p1 {
        for &b in &p2 {
            for &c in &p3 {
                out.push(CubeSelector { pairs: [a, b, c] });
            }
        }
    }
    out
}

/// Extract the cube b_{xyz} = a_{sel1[x], sel2[y], sel3[z]} from a flat
/// amplitude vector. Pure index selection, no scaling.
pub fn extract_cube_from(
    amplitudes: &Array1<Complex64>,
    dims: Dims,
    sel: &CubeSelector,
) -> Result<Cube, StateError> {
    let ns = dims.as_array();
    for (p, &(lo, hi)) in sel.pairs.iter().enumerate() {
        if lo >= hi || hi >= ns[p] {
            return Err(StateError::SelectorOutOfRange);
        }
    }
    if amplitudes.len() != dims.product() {
        return Err(StateError::LengthMismatch {
            expected: dims.product(),
            got: amplitudes.len(),
        });
    }
    let idx = |pair: (usize, usize), bit: usize| if bit == 0 { pair.0 } else { pair.1 };
    let mut amps = [Complex64::new(0.0, 0.0); 8];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let i = idx(sel.pairs[0], x);
                let j = idx(sel.pairs[1], y);
                let k = idx(sel.pairs[2], z);
                amps[(x << 2) | (y << 1) | z] = amplitudes[dims.flat(i, j, k)];
            }
        }
    }
    Ok(Cube { amplitudes: amps })
}

pub fn extract_cube(state: &PureState, sel: &CubeSelector) -> Result<Cube, StateError> {
    extract_cube_from(&state.amplitudes, state.dims, sel)
}

/// Relabel parties: the new index tuple is `perm` applied to (i, j, k), so
/// a'_{perm(i,j,k)} = a_{ijk} and the dims permute accordingly.
pub fn permute_parties(state: &PureState, perm: [usize; 3]) -> PureState {
    let mut seen = [false; 3];
    for &p in &perm {
        seen[p] = true;
    }
    assert!(seen.iter().all(|&s| s), "permute_parties: not a permutation of 0..3");
    let old = state.dims.as_array();
    // party that lands in slot s of the new tuple
    let mut source = [0usize; 3];
    for (p, &slot) in perm.iter().enumerate() {
        source[slot] = p;
    }
    let new_dims = Dims(old[source[0]], old[source[1]], old[source[2]]);
    let mut amps = Array1::<Complex64>::zeros(state.dims.product());
    for i in 0..old[0] {
        for j in 0..old[1] {
            for k in 0..old[2] {
                let t = [i, j, k];
                let dst = new_dims.flat(t[source[0]], t[source[1]], t[source[2]]);
                amps[dst] = state.amp(i, j, k);
            }
        }
    }
    PureState { dims: new_dims, amplitudes: amps, normalized: state.normalized }
}

/// Apply the permutation to a selector so that extraction commutes with
/// `permute_parties`.
pub fn permute_selector(sel: &CubeSelector, perm: [usize; 3]) -> CubeSelector {
    let mut source = [0usize; 3];
    for (p, &slot) in perm.iter().enumerate() {
        source[slot] = p;
    }
    CubeSelector {
        pairs: [sel.pairs[source[0]], sel.pairs[source[1]], sel.pairs[source[2]]],
    }
}

/// (u1 (x) u2 (x) u3) |psi>; each u_p must be unitary on its party.
pub fn apply_local_unitary(
    state: &PureState,
    u1: &Array2<Complex64>,
    u2: &Array2<Complex64>,
    u3: &Array2<Complex64>,
) -> Result<PureState, StateError> {
    let dims = state.dims;
    for (u, n) in [(u1, dims.0), (u2, dims.1), (u3, dims.2)] {
        if u.nrows() != n || u.ncols() != n {
            return Err(StateError::DimMismatch);
        }
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    dot += u[[k, i]].conj() * u[[k, j]];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - want).norm());
            }
        }
        if dev > UNITARITY_TOL {
            return Err(StateError::NotUnitary(dev));
        }
    }
    let (n1, n2, n3) = (dims.0, dims.1, dims.2);
    let mut out = Array1::<Complex64>::zeros(dims.product());
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for ip in 0..n1 {
                    for jp in 0..n2 {
                        for kp in 0..n3 {
                            acc += u1[[i, ip]] * u2[[j, jp]] * u3[[k, kp]] * state.amp(ip, jp, kp);
                        }
                    }
                }
                out[dims.flat(i, j, k)] = acc;
            }
        }
    }
    Ok(PureState { dims, amplitudes: out, normalized: state.normalized })
}

/// Max-entry deviation of Phi^dagger Phi from the identity (test helper).
pub fn orthonormality_defect(spec: &Spectrum) -> f64 {
    let r = spec.rank;
    let mut dev = 0.0f64;
    for i in 0..r {
        for j in 0..r {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..spec.eigenvectors.nrows() {
                dot += spec.eigenvectors[[k, i]].conj() * spec.eigenvectors[[k, j]];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - want).norm());
        }
    }
    dev
}

/// Max-entry deviation of sum mu_i v_i v_i^dagger from rho (test helper).
pub fn reconstruction_defect(spec: &Spectrum, rho: &MixedState) -> f64 {
    let d = rho.dims.product();
    let mut rec = Array2::<Complex64>::zeros((d, d));
    for (c, &mu) in spec.eigenvalues.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                rec[[i, j]] += mu * spec.eigenvectors[[i, c]] * spec.eigenvectors[[j, c]].conj();
            }
        }
    }
    max_abs(&(&rec - &rho.matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{make_ghz, make_ghzw_mix, make_random_density, make_w, make_wtilde};
    use num_complex::Complex64 as C;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn validate_accepts_basis_state() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let mut amps = Array1::<C>::zeros(8);
        amps[0] = c(1.0);
        let s = validate_pure(dims, amps).unwrap();
        assert!(s.normalized);
    }

    #[test]
    fn validate_accepts_223() {
        let dims = Dims::new(2, 2, 3).unwrap();
        let amps = Array1::<C>::from_elem(12, c(1.0 / (12f64).sqrt()));
        let s = validate_pure(dims, amps).unwrap();
        assert!(s.normalized);
    }

    #[test]
    fn validate_rejects_bad_length_and_dims() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let amps = Array1::<C>::zeros(7);
        assert!(matches!(
            validate_pure(dims, amps),
            Err(StateError::LengthMismatch { expected: 8, got: 7 })
        ));
        assert!(matches!(Dims::new(1, 2, 2), Err(StateError::DimensionTooSmall(1))));
    }

    #[test]
    fn selector_counts() {
        assert_eq!(enumerate_selectors(Dims(2, 2, 3)).len(), 3);
        assert_eq!(enumerate_selectors(Dims(2, 2, 2)).len(), 1);
        assert_eq!(enumerate_selectors(Dims(3, 3, 3)).len(), 27);
        // cardinality formula over 2 <= n_p <= 5
        for n1 in 2..=5usize {
            for n2 in 2..=5usize {
                for n3 in 2..=5usize {
                    let want = n1 * (n1 - 1) / 2 * (n2 * (n2 - 1) / 2) * (n3 * (n3 - 1) / 2);
                    let sels = enumerate_selectors(Dims(n1, n2, n3));
                    assert_eq!(sels.len(), want);
                    let mut dedup = sels.clone();
                    dedup.sort_by_key(|s| s.pairs);
                    dedup.dedup();
                    assert_eq!(dedup.len(), want, "duplicates for ({n1},{n2},{n3})");
                }
            }
        }
    }

    #[test]
    fn extract_ghz2_sole_cube() {
        let ghz = make_ghz(2).unwrap();
        let sels = enumerate_selectors(ghz.dims);
        assert_eq!(sels.len(), 1);
        let cube = extract_cube(&ghz, &sels[0]).unwrap();
        let r = 0.5f64.sqrt();
        assert!((cube.amp(0, 0, 0) - c(r)).norm() < 1e-15);
        assert!((cube.amp(1, 1, 1) - c(r)).norm() < 1e-15);
        for (x, y, z) in [(0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0)] {
            assert_eq!(cube.amp(x, y, z), c(0.0));
        }
    }

    #[test]
    fn extract_ghz3_cubes() {
        let ghz3 = make_ghz(3).unwrap();
        let r = (1.0f64 / 3.0).sqrt();
        let diag = CubeSelector { pairs: [(0, 1), (0, 1), (0, 1)] };
        let cube = extract_cube(&ghz3, &diag).unwrap();
        assert!((cube.amp(0, 0, 0) - c(r)).norm() < 1e-15);
        assert!((cube.amp(1, 1, 1) - c(r)).norm() < 1e-15);
        let mixed = CubeSelector { pairs: [(0, 1), (0, 1), (1, 2)] };
        let cube = extract_cube(&ghz3, &mixed).unwrap();
        // only a_{1,1,1} survives, at cube position (1,1,0)
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let want = if (x, y, z) == (1, 1, 0) { c(r) } else { c(0.0) };
                    assert!((cube.amp(x, y, z) - want).norm() < 1e-15);
                }
            }
        }
        let bad = CubeSelector { pairs: [(0, 3), (0, 1), (0, 1)] };
        assert!(matches!(extract_cube(&ghz3, &bad), Err(StateError::SelectorOutOfRange)));
    }

    #[test]
    fn permute_basis_state() {
        let dims = Dims(2, 2, 2);
        let mut amps = Array1::<C>::zeros(8);
        amps[dims.flat(0, 1, 0)] = c(1.0); // |010>
        let s = PureState { dims, amplitudes: amps, normalized: true };
        // swap parties 2 and 3: (i,j,k) -> (i,k,j), so |010> -> |001>
        let p = permute_parties(&s, [0, 2, 1]);
        assert!((p.amp(0, 0, 1) - c(1.0)).norm() < 1e-15);
        // identity permutation
        let id = permute_parties(&s, [0, 1, 2]);
        assert_eq!(id.amplitudes, s.amplitudes);
        // GHZ is symmetric under any permutation
        let ghz = make_ghz(2).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let g = permute_parties(&ghz, perm);
            assert_eq!(g.amplitudes, ghz.amplitudes);
        }
    }

    #[test]
    fn permutation_commutes_with_extraction() {
        use rand::SeedableRng;
        let dims = Dims(2, 3, 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let amps = crate::linalg::gaussian_vector(dims.product(), &mut rng);
        let s = validate_pure(dims, amps).unwrap();
        let perm = [1usize, 2, 0];
        let ps = permute_parties(&s, perm);
        for sel in enumerate_selectors(dims) {
            let cube = extract_cube(&s, &sel).unwrap();
            let psel = permute_selector(&sel, perm);
            let pcube = extract_cube(&ps, &psel).unwrap();
            // permuted cube axes must match the straight extraction
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let t = [x, y, z];
                        assert_eq!(pcube.amp(t[0], t[1], t[2]), {
                            // cube axis that feeds new slot s comes from old party source[s]
                            let mut source = [0usize; 3];
                            for (p, &slot) in perm.iter().enumerate() {
                                source[slot] = p;
                            }
                            let old = [t[0], t[1], t[2]];
                            let _ = old;
                            let mut back = [0usize; 3];
                            for slot in 0..3 {
                                back[source[slot]] = t[slot];
                            }
                            cube.amp(back[0], back[1], back[2])
                        });
                    }
                }
            }
        }
    }

    #[test]
    fn local_unitary_pauli_x() {
        let dims = Dims(2, 2, 2);
        let mut amps = Array1::<C>::zeros(8);
        amps[0] = c(1.0);
        let s = PureState { dims, amplitudes: amps, normalized: true };
        let mut x = Array2::<C>::zeros((2, 2));
        x[[0, 1]] = c(1.0);
        x[[1, 0]] = c(1.0);
        let eye = Array2::<C>::eye(2);
        let t = apply_local_unitary(&s, &x, &eye, &eye).unwrap();
        assert!((t.amp(1, 0, 0) - c(1.0)).norm() < 1e-15);
        // identity on all parties reproduces the state
        let id = apply_local_unitary(&s, &eye, &eye, &eye).unwrap();
        assert_eq!(id.amplitudes, s.amplitudes);
        // non-unitary rejected
        let mut bad = Array2::<C>::eye(2);
        bad[[0, 0]] = c(2.0);
        assert!(matches!(
            apply_local_unitary(&s, &bad, &eye, &eye),
            Err(StateError::NotUnitary(_))
        ));
    }

    #[test]
    fn spectral_decompose_projector_and_mix() {
        let ghz = make_ghz(2).unwrap();
        let rho = MixedState::from_pure(&ghz);
        let spec = spectral_decompose(&rho, DEFAULT_RANK_CUTOFF).unwrap();
        assert_eq!(spec.rank, 1);
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-12);

        let mix = make_ghzw_mix(0.5).unwrap();
        let spec = spectral_decompose(&mix, DEFAULT_RANK_CUTOFF).unwrap();
        assert_eq!(spec.rank, 3);
        assert!((spec.eigenvalues[0] - 0.5).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 0.25).abs() < 1e-12);
        assert!((spec.eigenvalues[2] - 0.25).abs() < 1e-12);

        let maximally_mixed = MixedState::new(
            Dims(2, 2, 2),
            Array2::<C>::eye(8).mapv(|z| z / 8.0),
        )
        .unwrap();
        let spec = spectral_decompose(&maximally_mixed, DEFAULT_RANK_CUTOFF).unwrap();
        assert_eq!(spec.rank, 8);
        for &mu in &spec.eigenvalues {
            assert!((mu - 0.125).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_decompose_block_purity_of_ghzw_family() {
        // the degenerate W/W~ eigenvalue pair must come out with the exact
        // disjoint-support eigenvectors, not a rotated mixture
        let mix = make_ghzw_mix(0.6).unwrap();
        let spec = spectral_decompose(&mix, DEFAULT_RANK_CUTOFF).unwrap();
        let ghz = make_ghz(2).unwrap();
        let w = make_w();
        let wt = make_wtilde();
        let overlap = |v: &Array1<C>, s: &PureState| -> f64 {
            v.iter()
                .zip(s.amplitudes.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<C>()
                .norm()
        };
        assert!(overlap(&spec.eigenvector(0), &ghz) > 1.0 - 1e-10);
        let o1w = overlap(&spec.eigenvector(1), &w);
        let o1t = overlap(&spec.eigenvector(1), &wt);
        let o2w = overlap(&spec.eigenvector(2), &w);
        let o2t = overlap(&spec.eigenvector(2), &wt);
        assert!(
            (o1w > 1.0 - 1e-10 && o2t > 1.0 - 1e-10) || (o1t > 1.0 - 1e-10 && o2w > 1.0 - 1e-10),
            "degenerate subspace mixed: overlaps {o1w} {o1t} {o2w} {o2t}"
        );
    }

    #[test]
    fn spectral_decompose_random_density_invariants() {
        for seed in 0..100u64 {
            let rho = make_random_density(Dims(2, 2, 2), 3, seed).unwrap();
            let spec = spectral_decompose(&rho, DEFAULT_RANK_CUTOFF).unwrap();
            assert!(orthonormality_defect(&spec) <= 1e-10, "seed {seed}");
            assert!(reconstruction_defect(&spec, &rho) <= 1e-9, "seed {seed}");
            for w in spec.eigenvalues.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn rejects_invalid_density() {
        let d = Dims(2, 2, 2);
        let mut m = Array2::<C>::eye(8).mapv(|z| z / 8.0);
        m[[0, 1]] = c(0.5);
        assert!(matches!(MixedState::new(d, m), Err(StateError::NotHermitian(_))));
        let m = Array2::<C>::eye(8);
        assert!(matches!(MixedState::new(d, m), Err(StateError::NotUnitTrace(_))));
        // negative eigenvalue: diag(1.5, -0.5, 0, ...)/1
        let mut m = Array2::<C>::zeros((8, 8));
        m[[0, 0]] = c(1.5);
        m[[1, 1]] = c(-0.5);
        let rho = MixedState::new(d, m).unwrap();
        assert!(matches!(
            spectral_decompose(&rho, DEFAULT_RANK_CUTOFF),
            Err(StateError::NotPositive(_))
        ));
        let _ = make_w();
    }
}
