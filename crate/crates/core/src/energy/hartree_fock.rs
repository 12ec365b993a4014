//! Minimization of `γ ↦ 𝓔(γ, (1 − Ex)(γ⊗γ))` over `0 ≤ γ ≤ 1`, `tr γ = N`
//! by projected gradient descent with backtracking.

use rand::Rng;

use super::{energy_functional, ModelHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{self, pair, CMat};
use crate::rdm::{hartree_fock_two_pdm, OneBodyRdm};
use crate::rng::{self, Purpose};
use crate::scalar::{lit, real, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartreeFockConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Threshold on `‖γ − Proj(γ − F(γ))‖_F`.
    pub stationarity_tol: f64,
}

impl Default for HartreeFockConfig {
    fn default() -> Self {
        HartreeFockConfig {
            restarts: 8,
            max_iter: 20_000,
            stationarity_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HartreeFockResult<T: Real> {
    pub energy: T,
    pub gamma: OneBodyRdm<T>,
    /// Projected gradient norm at `gamma`.
    pub stationarity: f64,
    /// Iterations summed over restarts.
    pub iterations: usize,
    /// Whether the best run met the stationarity threshold.
    pub converged: bool,
}

pub fn hf_energy<T: Real>(model: &ModelHamiltonian<T>, gamma: &OneBodyRdm<T>) -> Result<T> {
    energy_functional(gamma, &hartree_fock_two_pdm(gamma), model)
}

/// Gradient `F` with `d𝓔 = tr(F dγ)`; the usual Fock operator.
fn fock_matrix<T: Real>(model: &ModelHamiltonian<T>, gamma: &CMat<T>) -> CMat<T> {
    let n = model.n();
    let w = linalg::antisymmetrize_left(n, &model.v);
    let mut f = model.h.clone();
    let half = real(lit::<T>(0.5));
    for p in 0..n {
        for r in 0..n {
            let mut acc = real(T::zero());
            for q in 0..n {
                for s in 0..n {
                    // derivative of the first and of the second tensor factor
                    acc += w[(pair(n, p, q), pair(n, r, s))] * gamma[(s, q)];
                    acc += w[(pair(n, q, p), pair(n, s, r))] * gamma[(s, q)];
                }
            }
            f[(p, r)] += acc * half;
        }
    }
    linalg::hermitian_part(&f)
}

/// Projection of `values` onto `{0 ≤ μ ≤ 1, Σμ = N}`: `μ = clamp(λ − τ, 0, 1)`.
fn capped_simplex<T: Real>(values: &[T], particles: usize) -> Vec<T> {
    let target = lit::<T>(particles as f64);
    let clamp = |x: T| x.max(T::zero()).min(T::one());
    let sum = |tau: T| values.iter().fold(T::zero(), |a, &v| a + clamp(v - tau));
    let lo0 = values.iter().copied().fold(T::max_value().unwrap(), T::min) - T::one();
    let hi0 = values.iter().copied().fold(T::min_value().unwrap(), T::max);
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if sum(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = (lo + hi) * lit(0.5);
    values.iter().map(|&v| clamp(v - tau)).collect()
}

/// Frobenius projection of a Hermitian matrix onto `{0 ≤ γ ≤ 1, tr γ = N}`.
pub fn project_occupations<T: Real>(m: &CMat<T>, particles: usize) -> CMat<T> {
    let (values, vectors) = linalg::eigh(m);
    let occ = capped_simplex(&values, particles);
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (i, &o) in occ.iter().enumerate() {
        if o > T::zero() {
            let v = vectors.column(i);
            out += &v * v.adjoint() * real(o);
        }
    }
    linalg::hermitian_part(&out)
}

fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

fn stationarity<T: Real>(model: &ModelHamiltonian<T>, gamma: &CMat<T>, particles: usize) -> T {
    let f = fock_matrix(model, gamma);
    frobenius(&(gamma - project_occupations(&(gamma - f), particles)))
}

struct Run<T: Real> {
    energy: T,
    gamma: CMat<T>,
    stationarity: T,
    iterations: usize,
}

fn descend<T: Real>(model: &ModelHamiltonian<T>, start: CMat<T>, particles: usize, cfg: &HartreeFockConfig) -> Result<Run<T>> {
    let energy = |g: &CMat<T>| hf_energy(model, &OneBodyRdm { matrix: g.clone() });
    let mut gamma = project_occupations(&start, particles);
    let mut e = energy(&gamma)?;
    let scale = to_f64(linalg::max_abs(&model.h)).max(to_f64(linalg::max_abs(&model.v))).max(1e-300);
    let mut step = lit::<T>(1.0 / scale);
    let tol = lit::<T>(cfg.stationarity_tol);
    let mut it = 0;
    while it < cfg.max_iter {
        it += 1;
        if stationarity(model, &gamma, particles) < tol {
            break;
        }
        let f = fock_matrix(model, &gamma);
        let mut accepted = false;
        for _ in 0..60 {
            let trial = project_occupations(&(&gamma - &f * real(step)), particles);
            let d = &trial - &gamma;
            let et = energy(&trial)?;
            let lin = (&f * &d).trace().re;
            let dn = frobenius(&d);
            // allowance for roundoff once the predicted decrease nears machine precision
            let slack = lit::<T>(64.0) * T::default_epsilon() * e.abs().max(T::one());
            if et <= e + lin + dn * dn / (lit::<T>(2.0) * step) + slack {
                gamma = trial;
                e = et;
                step *= lit(1.5);
                accepted = true;
                break;
            }
            step *= lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Ok(Run {
        stationarity: stationarity(model, &gamma, particles),
        energy: e,
        gamma,
        iterations: it,
    })
}

/// Best of `cfg.restarts` descents: the first starts from the lowest `N`
/// eigenvectors of `h`, the others from random points of the constraint set.
/// Non-convergence is reported in the result, not as an error.
pub fn hartree_fock<T: Real>(
    model: &ModelHamiltonian<T>,
    particles: usize,
    cfg: &HartreeFockConfig,
    seed: u64,
) -> Result<HartreeFockResult<T>> {
    let n = model.n();
    if particles > n {
        return Err(Error::ParticleNumber { particles, n_modes: n });
    }
    let mut best: Option<Run<T>> = None;
    let mut total = 0;
    for restart in 0..cfg.restarts.max(1) {
        let start = if restart == 0 {
            let (_, vectors) = linalg::eigh(&model.h);
            let mut p = CMat::zeros(n, n);
            for i in 0..particles {
                let v = vectors.column(i);
                p += &v * v.adjoint();
            }
            p
        } else {
            let mut r = rng::stream(rng::child_seed(seed, restart as u64), Purpose::HartreeFockStart);
            let u = rng::haar_isometry::<T, _>(n, n, &mut r);
            let d = CMat::from_fn(n, n, |i, j| if i == j { real(lit::<T>(r.random::<f64>())) } else { real(T::zero()) });
            &u * d * u.adjoint()
        };
        let run = descend(model, start, particles, cfg)?;
        total += run.iterations;
        if best.as_ref().is_none_or(|b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    let b = best.expect("at least one restart");
    let stationarity = to_f64(b.stationarity);
    Ok(HartreeFockResult {
        energy: b.energy,
        gamma: OneBodyRdm { matrix: b.gamma },
        stationarity,
        iterations: total,
        converged: stationarity < cfg.stationarity_tol,
    })
}
