//! Per-cube residual tangle and the pure-state aggregate F.
//!
//! Two independent formulas are implemented for the cube tangle: the d-term
//! polynomial and the Gram-matrix determinant det R assembled in the standard
//! basis. They agree to rounding and are cross-checked in the test suite.

use crate::linalg::pairwise_sum;
use crate::state::{enumerate_selectors, extract_cube, Cube, PureState};
use num_complex::Complex64;
use rayon::prelude::*;

/// sigma_y (x) sigma_y, the contraction kernel of the cube bilinear form.
pub const SIGMA_YY: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
];

/// Residual tangle |d1 - 2 d2 + 4 d3| of a coefficient cube (constant factor
/// dropped).
pub fn cube_tangle(c: &Cube) -> f64 {
    let a = |x: usize, y: usize, z: usize| c.amp(x, y, z);
    let d1 = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1)
        + a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0)
        + a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1)
        + a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    (d1 - 2.0 * d2 + 4.0 * d3).norm()
}

/// w(j, r) = b_{00j} b_{11r} + b_{11j} b_{00r} - b_{01j} b_{10r} - b_{10j} b_{01r},
/// generalized to a pair of cubes (first argument supplies the j slot).
fn w_pair(ca: &Cube, cb: &Cube, j: usize, r: usize) -> Complex64 {
    ca.amp(0, 0, j) * cb.amp(1, 1, r) + ca.amp(1, 1, j) * cb.amp(0, 0, r)
        - ca.amp(0, 1, j) * cb.amp(1, 0, r)
        - ca.amp(1, 0, j) * cb.amp(0, 1, r)
}

/// The 2x2 matrix R_ij = sum_r w(j, r) conj(w(i, r)); Hermitian PSD Gram form.
pub fn cube_r(c: &Cube) -> [[Complex64; 2]; 2] {
    let w = [
        [w_pair(c, c, 0, 0), w_pair(c, c, 0, 1)],
        [w_pair(c, c, 1, 0), w_pair(c, c, 1, 1)],
    ];
    let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += w[j][k] * w[i][k].conj();
            }
            r[i][j] = acc;
        }
    }
    r
}

/// f = det R, clamped to zero when rounding drives it slightly negative.
/// Equals cube_tangle^2 up to rounding at scale (max |b|)^8.
pub fn cube_f(c: &Cube) -> f64 {
    let r = cube_r(c);
    let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re;
    let scale8 = c.max_abs().powi(8);
    if det < 0.0 {
        debug_assert!(det >= -1e-11 * scale8.max(f64::MIN_POSITIVE), "det R too negative: {det}");
        0.0
    } else {
        let _ = scale8;
        det
    }
}

/// Elementary bilinear m_{hk}(ca, cb) = vec(block_h(ca))^T (sigma_y (x) sigma_y)
/// vec(block_k(cb)); blocks are the 2x2 slices at third-party index h and k,
/// vec is column stacking. Bilinear in both cubes (no conjugation).
pub fn cube_bilinear(ca: &Cube, cb: &Cube, h: usize, k: usize) -> Complex64 {
    // column-stacked block: [b_{00h}, b_{10h}, b_{01h}, b_{11h}]
    let va = [ca.amp(0, 0, h), ca.amp(1, 0, h), ca.amp(0, 1, h), ca.amp(1, 1, h)];
    let vb = [cb.amp(0, 0, k), cb.amp(1, 0, k), cb.amp(0, 1, k), cb.amp(1, 1, k)];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            let s = SIGMA_YY[i][j];
            if s != 0.0 {
                acc += s * va[i] * vb[j];
            }
        }
    }
    acc
}

/// Per-cube f values in selector order.
pub fn cube_f_values(state: &PureState) -> Vec<f64> {
    let sels = enumerate_selectors(state.dims);
    sels.par_iter()
        .map(|sel| cube_f(&extract_cube(state, sel).expect("enumerated selector is valid")))
        .collect()
}

/// Grid aggregate F = (sum over all cubes of f)^(1/4). Zero exactly when every
/// cube tangle vanishes; homogeneous of degree 2 in the amplitudes.
pub fn f_pure(state: &PureState) -> f64 {
    pairwise_sum(&cube_f_values(state)).max(0.0).powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{make_biseparable, make_ghz, make_random_pure, make_w, Bipartition};
    use crate::linalg::haar_unitary;
    use crate::state::{enumerate_selectors, permute_parties, validate_pure, Cube, Dims};
    use ndarray::Array1;
    use num_complex::Complex64 as C;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ghz_cube() -> Cube {
        let mut amps = [C::new(0.0, 0.0); 8];
        amps[0] = C::new(0.5f64.sqrt(), 0.0);
        amps[7] = C::new(0.5f64.sqrt(), 0.0);
        Cube { amplitudes: amps }
    }

    fn w_cube() -> Cube {
        let t = (1.0f64 / 3.0).sqrt();
        let mut amps = [C::new(0.0, 0.0); 8];
        amps[0b001] = C::new(t, 0.0);
        amps[0b010] = C::new(t, 0.0);
        amps[0b100] = C::new(t, 0.0);
        Cube { amplitudes: amps }
    }

    fn random_cube(rng: &mut ChaCha8Rng) -> Cube {
        let v = crate::linalg::gaussian_vector(8, rng);
        let mut amps = [C::new(0.0, 0.0); 8];
        for i in 0..8 {
            amps[i] = v[i];
        }
        Cube { amplitudes: amps }
    }

    #[test]
    fn ghz_cube_values() {
        let c = ghz_cube();
        assert!((cube_tangle(&c) - 0.25).abs() < 1e-15);
        assert!((cube_f(&c) - 1.0 / 16.0).abs() < 1e-15);
        let r = cube_r(&c);
        let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re;
        assert!((det - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn w_and_basis_cubes_vanish() {
        assert_eq!(cube_tangle(&w_cube()), 0.0);
        assert_eq!(cube_f(&w_cube()), 0.0);
        let mut amps = [C::new(0.0, 0.0); 8];
        amps[0] = C::new(1.0, 0.0);
        let c = Cube { amplitudes: amps };
        assert_eq!(cube_tangle(&c), 0.0);
        assert_eq!(cube_f(&c), 0.0);
    }

    #[test]
    fn zero_cube_r_is_zero() {
        let c = Cube { amplitudes: [C::new(0.0, 0.0); 8] };
        let r = cube_r(&c);
        for row in &r {
            for z in row {
                assert_eq!(*z, C::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn r_is_hermitian_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let c = random_cube(&mut rng);
            let r = cube_r(&c);
            assert!((r[0][1] - r[1][0].conj()).norm() < 1e-12 * c.max_abs().powi(4));
            assert!(r[0][0].re >= 0.0 && r[1][1].re >= 0.0);
            let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re;
            assert!(det >= -1e-12 * c.max_abs().powi(8));
        }
    }

    #[test]
    fn formula_equivalence_on_random_cubes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let c = random_cube(&mut rng);
            let t = cube_tangle(&c);
            let f = cube_f(&c);
            let scale8 = c.max_abs().powi(8);
            assert!((f - t * t).abs() <= 1e-10 * scale8, "f={f} t^2={}", t * t);
        }
    }

    #[test]
    fn bilinear_matches_w_up_to_global_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let c = random_cube(&mut rng);
            for h in 0..2 {
                for k in 0..2 {
                    let m = cube_bilinear(&c, &c, h, k);
                    let w = super::w_pair(&c, &c, h, k);
                    assert!((m + w).norm() < 1e-12 * c.max_abs().powi(2), "m != -w");
                }
            }
        }
    }

    #[test]
    fn bilinear_det_identity_reproduces_cube_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let c = random_cube(&mut rng);
            let m = |h: usize, k: usize| cube_bilinear(&c, &c, h, k);
            let s00: f64 = (0..2).map(|r| m(0, r).norm_sqr()).sum();
            let s11: f64 = (0..2).map(|r| m(1, r).norm_sqr()).sum();
            let cross: C = (0..2).map(|r| m(0, r) * m(1, r).conj()).sum();
            let f = s00 * s11 - cross.norm_sqr();
            assert!((f - cube_f(&c)).abs() <= 1e-10 * c.max_abs().powi(8));
        }
    }

    #[test]
    fn bilinear_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_cube(&mut rng);
        let zero = Cube { amplitudes: [C::new(0.0, 0.0); 8] };
        for h in 0..2 {
            for k in 0..2 {
                assert_eq!(cube_bilinear(&a, &zero, h, k), C::new(0.0, 0.0));
            }
        }
        // real cubes give real output
        let mut amps = [C::new(0.0, 0.0); 8];
        for (i, slot) in amps.iter_mut().enumerate() {
            *slot = C::new(0.1 * (i as f64 + 1.0), 0.0);
        }
        let r1 = Cube { amplitudes: amps };
        for h in 0..2 {
            for k in 0..2 {
                assert_eq!(cube_bilinear(&r1, &r1, h, k).im, 0.0);
            }
        }
    }

    #[test]
    fn f_pure_closed_forms() {
        assert!((f_pure(&make_ghz(2).unwrap()) - 0.5).abs() < 1e-12);
        assert!(f_pure(&make_w()) < 1e-12);
        let want = (1.0f64 / 27.0).powf(0.25);
        assert!((f_pure(&make_ghz(3).unwrap()) - want).abs() < 1e-12);
    }

    #[test]
    fn f_pure_ghz3_cube_breakdown() {
        // exactly 3 diagonal-pair cubes carry f = 1/81 each, the rest vanish
        let ghz3 = make_ghz(3).unwrap();
        let fs = cube_f_values(&ghz3);
        assert_eq!(fs.len(), 27);
        let nonzero: Vec<f64> = fs.iter().cloned().filter(|&f| f > 1e-15).collect();
        assert_eq!(nonzero.len(), 3);
        for f in nonzero {
            assert!((f - 1.0 / 81.0).abs() < 1e-15);
        }
    }

    #[test]
    fn permutation_invariance() {
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let dims_list = [Dims(2, 2, 2), Dims(2, 2, 3), Dims(2, 3, 3), Dims(3, 3, 3)];
        for (di, dims) in dims_list.iter().enumerate() {
            for seed in 0..100u64 {
                let s = make_random_pure(*dims, seed + 1000 * di as u64).unwrap();
                let f0 = f_pure(&s);
                for perm in perms {
                    let fp = f_pure(&permute_parties(&s, perm));
                    assert!(
                        (fp - f0).abs() <= 1e-10,
                        "dims {dims:?} seed {seed} perm {perm:?}: {fp} vs {f0}"
                    );
                }
            }
        }
    }

    #[test]
    fn homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let s = make_random_pure(Dims(2, 3, 3), rng.next_u64()).unwrap();
            let c = C::new(0.7, -1.3);
            let scaled = validate_pure(s.dims, s.amplitudes.mapv(|a| a * c)).unwrap();
            let want = c.norm_sqr() * f_pure(&s);
            let got = f_pure(&scaled);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0));
        }
    }

    #[test]
    fn local_unitary_invariance_in_222_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..100 {
            let s = make_random_pure(Dims(2, 2, 2), trial).unwrap();
            let u1 = haar_unitary(2, &mut rng);
            let u2 = haar_unitary(2, &mut rng);
            let u3 = haar_unitary(2, &mut rng);
            let t = crate::state::apply_local_unitary(&s, &u1, &u2, &u3).unwrap();
            assert!((f_pure(&t) - f_pure(&s)).abs() <= 1e-9, "trial {trial}");
        }
        // higher dims: record (not assert) the deviation
        let mut max_dev = 0.0f64;
        for trial in 0..20 {
            let s = make_random_pure(Dims(2, 2, 3), 500 + trial).unwrap();
            let u1 = haar_unitary(2, &mut rng);
            let u2 = haar_unitary(2, &mut rng);
            let u3 = haar_unitary(3, &mut rng);
            let t = crate::state::apply_local_unitary(&s, &u1, &u2, &u3).unwrap();
            max_dev = max_dev.max((f_pure(&t) - f_pure(&s)).abs());
        }
        eprintln!("LU deviation of F in (2,2,3) over 20 trials: {max_dev:.3e}");
    }

    #[test]
    fn biseparable_states_have_zero_f() {
        // Exact zero is unreachable in f64 (the quartic root amplifies the
        // eps-level cancellation residue of the tangle polynomial), so assert
        // the per-cube tangle at rounding scale and F at the induced scale.
        for split in [Bipartition::AVsBc, Bipartition::BVsAc, Bipartition::CVsAb] {
            for dims in [Dims(2, 2, 2), Dims(2, 3, 3), Dims(3, 3, 3)] {
                for seed in 0..100u64 {
                    let s = make_biseparable(dims, split, seed);
                    for sel in enumerate_selectors(dims) {
                        let cube = extract_cube(&s, &sel).unwrap();
                        assert!(
                            cube_tangle(&cube) <= 1e-12 * cube.max_abs().powi(4).max(1e-30),
                            "split {split:?} dims {dims:?} seed {seed}"
                        );
                    }
                    assert!(f_pure(&s) <= 1e-7, "split {split:?} dims {dims:?} seed {seed}");
                }
            }
        }
        // a literal product basis state is exactly zero
        let dims = Dims(2, 2, 2);
        let mut amps = Array1::<C>::zeros(8);
        amps[0] = C::new(1.0, 0.0);
        let s = validate_pure(dims, amps).unwrap();
        assert_eq!(f_pure(&s), 0.0);
    }
}
