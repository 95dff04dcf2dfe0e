//! Derivative-free coordinate ascent over the constrained search points of
//! the bound functionals: phases are unconstrained, magnitudes live on the
//! constraint manifolds through normalized power maps, each coordinate is
//! refined by golden-section line search, and seeded restarts make the result
//! deterministic.

use super::{BoundReport, CFamily, SearchPoint};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct OptimConfig {
    /// seeded restarts of the coordinate ascent
    pub restarts: usize,
    /// cap on full coordinate sweeps per restart
    pub max_sweeps: usize,
    /// stop a restart when one sweep improves the value by less than this
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig { restarts: 32, max_sweeps: 200, tol: 1e-9, seed: 0 }
    }
}

const GOLDEN_ITERS: usize = 28;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization on [a, b]; returns (arg, value).
fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

struct Parameters {
    /// per-block magnitudes (only when the z level is active)
    g: Vec<f64>,
    phi: Vec<f64>,
    /// per-term magnitudes
    h: Vec<f64>,
    psi: Vec<f64>,
    use_z: bool,
}

impl Parameters {
    fn point(&self) -> SearchPoint {
        let z = if self.use_z {
            let quart: f64 = self.g.iter().map(|g| g.powi(4)).sum::<f64>().powf(0.25);
            self.g
                .iter()
                .zip(&self.phi)
                .map(|(&g, &p)| Complex64::from_polar(g / quart, p))
                .collect()
        } else {
            vec![Complex64::new(1.0, 0.0); self.g.len()]
        };
        let norm: f64 = self.h.iter().map(|h| h * h).sum::<f64>().sqrt();
        let zz = self
            .h
            .iter()
            .zip(&self.psi)
            .map(|(&h, &p)| Complex64::from_polar(h / norm, p))
            .collect();
        SearchPoint { z, zz }
    }
}

fn objective(family: &CFamily, params: &Parameters) -> f64 {
    let point = params.point();
    let r = family.rank;
    let mut t = Array2::<Complex64>::zeros((r, r));
    let mut flat = 0usize;
    for (j, block) in family.blocks.iter().enumerate() {
        let zj = if params.use_z { point.z[j] } else { Complex64::new(1.0, 0.0) };
        for term in &block.terms {
            let coeff = zj * point.zz[flat];
            flat += 1;
            t.zip_mut_with(&term.c, |acc, &cv| *acc += coeff * cv);
        }
    }
    super::wootters_value(&t)
}

pub(super) fn maximize_zz(family: &CFamily, cfg: &OptimConfig, use_z: bool) -> BoundReport {
    let rp = family.r_prime();
    let terms = family.total_terms();
    let restarts = cfg.restarts.max(1);
    let results: Vec<(f64, usize, usize, Parameters)> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(restart as u64);
            let mut params = Parameters {
                g: (0..rp)
                    .map(|_| rng.sample::<f64, _>(StandardNormal).abs() + 0.1)
                    .collect(),
                phi: (0..rp).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect(),
                h: (0..terms)
                    .map(|_| rng.sample::<f64, _>(StandardNormal).abs() + 0.1)
                    .collect(),
                psi: (0..terms).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect(),
                use_z,
            };
            let mut best = objective(family, &params);
            let mut sweeps = 0;
            for _ in 0..cfg.max_sweeps {
                sweeps += 1;
                let before = best;
                if use_z {
                    for j in 0..rp {
                        let base = params.g[j];
                        let (arg, val) = golden_max(
                            |s| {
                                params_with(&params, |p| p.g[j] = base * s.exp(), family)
                            },
                            -1.0,
                            1.0,
                        );
                        if val > best {
                            params.g[j] = base * arg.exp();
                            best = val;
                        }
                    }
                    for j in 0..rp {
                        let base = params.phi[j];
                        let (arg, val) = golden_max(
                            |d| params_with(&params, |p| p.phi[j] = base + d, family),
                            -std::f64::consts::FRAC_PI_2,
                            std::f64::consts::FRAC_PI_2,
                        );
                        if val > best {
                            params.phi[j] = base + arg;
                            best = val;
                        }
                    }
                }
                for t in 0..terms {
                    let base = params.h[t];
                    let (arg, val) = golden_max(
                        |s| params_with(&params, |p| p.h[t] = base * s.exp(), family),
                        -1.0,
                        1.0,
                    );
                    if val > best {
                        params.h[t] = base * arg.exp();
                        best = val;
                    }
                }
                for t in 0..terms {
                    let base = params.psi[t];
                    let (arg, val) = golden_max(
                        |d| params_with(&params, |p| p.psi[t] = base + d, family),
                        -std::f64::consts::FRAC_PI_2,
                        std::f64::consts::FRAC_PI_2,
                    );
                    if val > best {
                        params.psi[t] = base + arg;
                        best = val;
                    }
                }
                if best - before < cfg.tol {
                    break;
                }
            }
            (best, restart, sweeps, params)
        })
        .collect();

    let mut best = &results[0];
    for r in &results[1..] {
        if r.0 > best.0 || (r.0 == best.0 && r.1 < best.1) {
            best = r;
        }
    }
    BoundReport {
        value: best.0,
        best_restart: best.1,
        sweeps: best.2,
        point: Some(best.3.point()),
    }
}

/// Evaluate the objective with one parameter temporarily modified.
fn params_with(
    params: &Parameters,
    modify: impl Fn(&mut Parameters),
    family: &CFamily,
) -> f64 {
    let mut trial = Parameters {
        g: params.g.clone(),
        phi: params.phi.clone(),
        h: params.h.clone(),
        psi: params.psi.clone(),
        use_z: params.use_z,
    };
    modify(&mut trial);
    objective(family, &trial)
}
