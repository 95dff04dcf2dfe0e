//! Canonical states and seeded random generators used by the examples and
//! the test suites.

use crate::linalg::gaussian_vector;
use crate::state::{validate_pure, Dims, MixedState, PureState};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactoryError {
    #[error("local dimension {0} is below 2")]
    BadDimension(usize),
    #[error("parameter {0} is outside [0, 1]")]
    BadParameter(f64),
    #[error("state is not normalized")]
    NotNormalized,
    #[error("requested rank {rank} exceeds the total dimension {dim}")]
    BadRank { rank: usize, dim: usize },
}

/// Which party factors out of a biseparable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bipartition {
    AVsBc,
    BVsAc,
    CVsAb,
}

/// Diagonal GHZ state of local dimension d: sum_i |iii> / sqrt(d).
pub fn make_ghz(d: usize) -> Result<PureState, FactoryError> {
    if d < 2 {
        return Err(FactoryError::BadDimension(d));
    }
    let dims = Dims(d, d, d);
    let mut amps = Array1::<Complex64>::zeros(dims.product());
    let w = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[dims.flat(i, i, i)] = Complex64::new(w, 0.0);
    }
    Ok(validate_pure(dims, amps).expect("constructed amplitudes are valid"))
}

/// |W> = (|001> + |010> + |100>)/sqrt(3); defined on (2,2,2) only.
pub fn make_w() -> PureState {
    let dims = Dims(2, 2, 2);
    let mut amps = Array1::<Complex64>::zeros(8);
    let w = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    amps[dims.flat(0, 0, 1)] = w;
    amps[dims.flat(0, 1, 0)] = w;
    amps[dims.flat(1, 0, 0)] = w;
    validate_pure(dims, amps).expect("constructed amplitudes are valid")
}

/// |W~> = (|110> + |011> + |101>)/sqrt(3); defined on (2,2,2) only.
pub fn make_wtilde() -> PureState {
    let dims = Dims(2, 2, 2);
    let mut amps = Array1::<Complex64>::zeros(8);
    let w = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    amps[dims.flat(1, 1, 0)] = w;
    amps[dims.flat(0, 1, 1)] = w;
    amps[dims.flat(1, 0, 1)] = w;
    validate_pure(dims, amps).expect("constructed amplitudes are valid")
}

/// rho(x) = x |GHZ><GHZ| + (1-x)/2 (|W><W| + |W~><W~|).
pub fn make_ghzw_mix(x: f64) -> Result<MixedState, FactoryError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(FactoryError::BadParameter(x));
    }
    let ghz = make_ghz(2)?;
    let w = make_w();
    let wt = make_wtilde();
    let mut m = Array2::<Complex64>::zeros((8, 8));
    let mut add = |psi: &PureState, weight: f64| {
        for i in 0..8 {
            for j in 0..8 {
                m[[i, j]] += weight * psi.amplitudes[i] * psi.amplitudes[j].conj();
            }
        }
    };
    add(&ghz, x);
    add(&w, (1.0 - x) / 2.0);
    add(&wt, (1.0 - x) / 2.0);
    MixedState::new(Dims(2, 2, 2), m).map_err(|_| FactoryError::BadParameter(x))
}

/// (1 - eps) |psi><psi| + eps I/d.
pub fn make_white_noise(psi: &PureState, eps: f64) -> Result<MixedState, FactoryError> {
    if !psi.normalized {
        return Err(FactoryError::NotNormalized);
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(FactoryError::BadParameter(eps));
    }
    let d = psi.dims.product();
    let mut m = Array2::<Complex64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            m[[i, j]] = (1.0 - eps) * psi.amplitudes[i] * psi.amplitudes[j].conj();
        }
        m[[i, i]] += eps / d as f64;
    }
    MixedState::new(psi.dims, m).map_err(|_| FactoryError::BadParameter(eps))
}

/// Complex-Gaussian pure state, normalized; deterministic given the seed.
pub fn make_random_pure(dims: Dims, seed: u64) -> Result<PureState, FactoryError> {
    for n in dims.as_array() {
        if n < 2 {
            return Err(FactoryError::BadDimension(n));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = gaussian_vector(dims.product(), &mut rng);
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.mapv_inplace(|z| z / norm);
    Ok(validate_pure(dims, amps).expect("normalized amplitudes are valid"))
}

/// Wishart-style random density matrix: G G^dagger / tr with G a d x rank
/// complex-Gaussian matrix; deterministic given the seed.
pub fn make_random_density(dims: Dims, rank: usize, seed: u64) -> Result<MixedState, FactoryError> {
    let d = dims.product();
    if rank == 0 || rank > d {
        return Err(FactoryError::BadRank { rank, dim: d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_vector(d * rank, &mut rng);
    let mut m = Array2::<Complex64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rank {
                acc += g[i * rank + k] * g[j * rank + k].conj();
            }
            m[[i, j]] = acc;
        }
    }
    let trace: f64 = (0..d).map(|i| m[[i, i]].re).sum();
    m.mapv_inplace(|z| z / trace);
    // exactly hermitize the diagonal against rounding
    for i in 0..d {
        m[[i, i]] = Complex64::new(m[[i, i]].re, 0.0);
    }
    MixedState::new(dims, m).map_err(|_| FactoryError::BadRank { rank, dim: d })
}

/// Random biseparable pure state: one party in a random single-party state,
/// the other two in a random joint state, reshaped to `dims`.
pub fn make_biseparable(dims: Dims, split: Bipartition, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n1, n2, n3) = (dims.0, dims.1, dims.2);
    let (single_dim, pair_dim) = match split {
        Bipartition::AVsBc => (n1, n2 * n3),
        Bipartition::BVsAc => (n2, n1 * n3),
        Bipartition::CVsAb => (n3, n1 * n2),
    };
    let mut single = gaussian_vector(single_dim, &mut rng);
    let snorm: f64 = single.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    single.mapv_inplace(|z| z / snorm);
    let mut pair = gaussian_vector(pair_dim, &mut rng);
    let pnorm: f64 = pair.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    pair.mapv_inplace(|z| z / pnorm);
    let mut amps = Array1::<Complex64>::zeros(dims.product());
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                let v = match split {
                    Bipartition::AVsBc => single[i] * pair[j * n3 + k],
                    Bipartition::BVsAc => single[j] * pair[i * n3 + k],
                    Bipartition::CVsAb => single[k] * pair[i * n2 + j],
                };
                amps[dims.flat(i, j, k)] = v;
            }
        }
    }
    validate_pure(dims, amps).expect("constructed amplitudes are valid")
}

/// Declarative description of a canonical family member.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Ghz { d: usize },
    W,
    WTilde,
    GhzwMix { x: f64 },
    WhiteNoise { d: usize, eps: f64 },
    RandomPure { dims: Dims, seed: u64 },
    RandomDensity { dims: Dims, rank: usize, seed: u64 },
    Product { dims: Dims },
    Biseparable { dims: Dims, split: Bipartition, seed: u64 },
}

/// A built family member.
#[derive(Debug, Clone)]
pub enum FamilyState {
    Pure(PureState),
    Density(MixedState),
}

impl FamilySpec {
    pub fn build(&self) -> Result<FamilyState, FactoryError> {
        Ok(match self {
            FamilySpec::Ghz { d } => FamilyState::Pure(make_ghz(*d)?),
            FamilySpec::W => FamilyState::Pure(make_w()),
            FamilySpec::WTilde => FamilyState::Pure(make_wtilde()),
            FamilySpec::GhzwMix { x } => FamilyState::Density(make_ghzw_mix(*x)?),
            FamilySpec::WhiteNoise { d, eps } => {
                FamilyState::Density(make_white_noise(&make_ghz(*d)?, *eps)?)
            }
            FamilySpec::RandomPure { dims, seed } => {
                FamilyState::Pure(make_random_pure(*dims, *seed)?)
            }
            FamilySpec::RandomDensity { dims, rank, seed } => {
                FamilyState::Density(make_random_density(*dims, *rank, *seed)?)
            }
            FamilySpec::Product { dims } => {
                let mut amps = Array1::<Complex64>::zeros(dims.product());
                amps[0] = Complex64::new(1.0, 0.0);
                FamilyState::Pure(validate_pure(*dims, amps).expect("basis state is valid"))
            }
            FamilySpec::Biseparable { dims, split, seed } => {
                FamilyState::Pure(make_biseparable(*dims, *split, *seed))
            }
        })
    }
}
