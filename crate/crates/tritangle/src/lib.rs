//! Existence tests for genuine tripartite entanglement.
//!
//! A tripartite pure state of local dimensions (n1, n2, n3) is viewed as a
//! tensor grid of 2x2x2 coefficient cubes, one per choice of an index pair in
//! each party. Every cube carries a residual tangle; the quartic-root
//! aggregate `F` over all cubes vanishes exactly when the state carries no
//! genuine tripartite entanglement. For mixed states the library provides
//! computable lower-bound indicators from a nested Kronecker-product
//! decomposition of the associated A tensor, a Monte-Carlo convex-roof upper
//! estimator, and the analytic quasi-pure approximation `F_a`.
//!
//! Modules map one-to-one onto the processing stages:
//!
//! * [`state`] - domain types (pure/mixed states, spectra, cube selectors).
//! * [`tangle`] - per-cube residual tangle and the pure-state aggregate `F`.
//! * [`kron`] - Kronecker-product approximation engine (vec, rearrangement,
//!   SVD factorization, Takagi and Hermitian specializations).
//! * [`bounds`] - mixed-state A tensor, nested decompositions, Wootters-style
//!   infimum, three lower bounds and the convex-roof estimator.
//! * [`quasipure`] - the tau matrix and `F_a` for quasi-pure states.
//! * [`factory`] - canonical states (GHZ, W, mixtures) and seeded generators.
//! * [`linalg`] - dense complex eigen/SVD kernels used throughout.

pub mod bounds;
pub mod factory;
pub mod kron;
pub mod linalg;
pub mod quasipure;
pub mod state;
pub mod tangle;

pub use bounds::{
    build_a, lower_bound_max_c, lower_bound_z, lower_bound_zz, roof_upper, split_a_to_b,
    split_b_to_c, wootters_inf, ATensor, BFactor, BoundsError, CFamily, CTerm, OptimConfig,
    SearchPoint,
};
pub use factory::{
    make_biseparable, make_ghz, make_ghzw_mix, make_random_density, make_random_pure, make_w,
    make_white_noise, make_wtilde, Bipartition, FactoryError, FamilySpec, FamilyState,
};
pub use kron::{
    hermitian_psd_factor, nearest_kron, rearrange, takagi_factor, unrearrange, unvec, vec_col,
    KronError, KronFactors,
};
pub use quasipure::{build_tau, f_a, QuasiPureError, TauMatrix};
pub use state::{
    apply_local_unitary, enumerate_selectors, extract_cube, permute_parties, spectral_decompose,
    validate_pure, Cube, CubeSelector, Dims, MixedState, PureState, Spectrum, StateError,
    DEFAULT_RANK_CUTOFF,
};
pub use tangle::{cube_bilinear, cube_f, cube_r, cube_tangle, f_pure, SIGMA_YY};
