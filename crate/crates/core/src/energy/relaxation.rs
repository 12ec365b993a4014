//! Lower bound on the ground state energy from minimizing `𝓔(γ, Γ)` over
//! pairs satisfying the P, G and Q conditions instead of over
//! representable pairs.
//!
//! `Γ = U X U*` with `U` the isometry onto the antisymmetric subspace and
//! `X` Hermitian, so antisymmetry and `P ⪰ 0` (as `X ⪰ 0`) are built in and
//! `γ = contraction(Γ)/(N − 1)`. The remaining constraints are affine maps
//! `A_i x + b_i` of the real coordinates `x` of `X` into PSD cones, solved
//! by ADMM:
//! - `X ⪰ 0`,
//! - `[[1, u*], [u, G_lin]] ⪰ 0`, the Schur form of `G_lin − uu* ⪰ 0`,
//! - the Q matrix on the antisymmetric subspace,
//! - `γ ⪰ 0` and `1 − γ ⪰ 0`,
//!
//! with `tr X = N(N − 1)` as the only equality constraint.

use nalgebra::{DMatrix, DVector};

use super::{energy_functional, ModelHamiltonian};
use crate::conditions::{antisymmetric_block, g_linear_part, g_rank_one_vector, q_condition_matrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rdm::{contract_two_pdm, OneBodyRdm, TwoBodyRdm};
use crate::scalar::{lit, real, to_f64, Cx, Real};

/// Largest mode count accepted by the relaxation.
pub const MAX_RELAX_MODES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationConfig {
    pub max_iter: usize,
    /// Stop once primal and dual residuals are both below this.
    pub tol: f64,
    /// Initial penalty parameter.
    pub rho: f64,
    /// Certificate cone violation accepted as feasible.
    pub feasibility_tol: f64,
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        RelaxationConfig {
            max_iter: 50_000,
            tol: 1e-10,
            rho: 1.0,
            feasibility_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationResult<T: Real> {
    /// `𝓔` at the certificate pair.
    pub energy: T,
    pub gamma: OneBodyRdm<T>,
    pub gamma2: TwoBodyRdm<T>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `max(0, −λ_min)` over all constraint matrices at the certificate.
    pub cone_violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Orthonormal real coordinates of a Hermitian `d × d` matrix: diagonal
/// entries, then `√2 Re` and `√2 Im` of the strict upper triangle.
fn herm_to_vec<T: Real>(m: &CMat<T>) -> DVector<T> {
    let d = m.nrows();
    let s2 = lit::<T>(2f64.sqrt());
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            v.push(m[(i, j)].re * s2);
            v.push(m[(i, j)].im * s2);
        }
    }
    DVector::from_vec(v)
}

fn vec_to_herm<T: Real>(v: &[T], d: usize) -> CMat<T> {
    let s = lit::<T>(0.5f64.sqrt());
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = real(v[i]);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = Cx::new(v[k] * s, v[k + 1] * s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn psd_projection<T: Real>(m: &CMat<T>) -> CMat<T> {
    let (values, vectors) = linalg::eigh(m);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (i, &l) in values.iter().enumerate() {
        if l > T::zero() {
            let v = vectors.column(i);
            out += &v * v.adjoint() * real(l);
        }
    }
    out
}

struct Problem<T: Real> {
    n: usize,
    particles: usize,
    u: CMat<T>,
    m: usize,
}

impl<T: Real> Problem<T> {
    fn pair(&self, x: &[T]) -> Result<(OneBodyRdm<T>, TwoBodyRdm<T>)> {
        let xm = vec_to_herm(x, self.m);
        let g2 = TwoBodyRdm {
            matrix: linalg::hermitian_part(&(&self.u * xm * self.u.adjoint())),
        };
        let g = contract_two_pdm(&g2, self.particles)?;
        Ok((g, g2))
    }

    /// Constraint matrices that must be PSD.
    fn cones(&self, x: &[T]) -> Result<Vec<CMat<T>>> {
        let (g, g2) = self.pair(x)?;
        let nn = self.n * self.n;
        let w = g_rank_one_vector(&g);
        let lin = g_linear_part(&g, &g2);
        let mut schur = CMat::zeros(nn + 1, nn + 1);
        schur[(0, 0)] = real(T::one());
        for i in 0..nn {
            schur[(i + 1, 0)] = w[i];
            schur[(0, i + 1)] = w[i].conj();
            for j in 0..nn {
                schur[(i + 1, j + 1)] = lin[(i, j)];
            }
        }
        let q = antisymmetric_block(self.n, &q_condition_matrix(&g, &g2));
        let id = linalg::identity::<T>(self.n);
        Ok(vec![
            vec_to_herm(x, self.m),
            linalg::hermitian_part(&schur),
            linalg::hermitian_part(&q),
            g.matrix.clone(),
            &id - &g.matrix,
        ])
    }
}

/// Approximate minimizer of `𝓔` over pairs satisfying the P, G and Q
/// conditions with `0 ≤ γ ≤ 1`; needs `n ≤ 6`. Residuals above the
/// configured tolerances are flagged in the result.
pub fn relaxed_lower_bound<T: Real>(
    model: &ModelHamiltonian<T>,
    particles: usize,
    cfg: &RelaxationConfig,
) -> Result<RelaxationResult<T>> {
    let n = model.n();
    if n > MAX_RELAX_MODES {
        return Err(Error::Invalid(format!("relaxation supports at most {MAX_RELAX_MODES} modes, got {n}")));
    }
    if particles > n {
        return Err(Error::ParticleNumber { particles, n_modes: n });
    }
    if particles < 2 {
        return one_body_bound(model, particles);
    }
    let u = linalg::antisymmetric_basis::<T>(n);
    let m = u.ncols();
    let dim = m * m;
    let prob = Problem { n, particles, u, m };

    // affine maps by evaluation on the coordinate basis
    let zero = vec![T::zero(); dim];
    let b_parts: Vec<DVector<T>> = prob.cones(&zero)?.iter().map(herm_to_vec).collect();
    let sizes: Vec<usize> = prob.cones(&zero)?.iter().map(|c| c.nrows()).collect();
    let rows: usize = b_parts.iter().map(|b| b.len()).sum();
    let mut b = DVector::zeros(rows);
    let mut off = 0;
    for bp in &b_parts {
        b.rows_mut(off, bp.len()).copy_from(bp);
        off += bp.len();
    }
    let mut a = DMatrix::<T>::zeros(rows, dim);
    let mut c = DVector::<T>::zeros(dim);
    let mut trace_row = DVector::<T>::zeros(dim);
    let mut e = zero.clone();
    for j in 0..dim {
        e[j] = T::one();
        let mut off = 0;
        for cone in prob.cones(&e)? {
            let v = herm_to_vec(&cone);
            let len = v.len();
            a.view_mut((off, j), (len, 1)).copy_from(&(v - b.rows(off, len)));
            off += len;
        }
        let (g, g2) = prob.pair(&e)?;
        c[j] = energy_functional(&g, &g2, model)?;
        trace_row[j] = vec_to_herm(&e, m).trace().re;
        e[j] = T::zero();
    }
    let target = lit::<T>((particles * (particles - 1)) as f64);
    let normal = a.transpose() * &a;

    let factor = |rho: T| {
        let mut kkt = DMatrix::<T>::zeros(dim + 1, dim + 1);
        kkt.view_mut((0, 0), (dim, dim)).copy_from(&(&normal * rho));
        for j in 0..dim {
            kkt[(j, dim)] = trace_row[j];
            kkt[(dim, j)] = trace_row[j];
        }
        kkt.lu()
    };

    let mut rho = lit::<T>(cfg.rho);
    let mut lu = factor(rho);
    let mut z = b.clone();
    let mut w = DVector::<T>::zeros(rows);
    let mut x = DVector::<T>::zeros(dim);
    let (mut r_norm, mut s_norm) = (f64::INFINITY, f64::INFINITY);
    let mut it = 0;
    while it < cfg.max_iter {
        it += 1;
        let rhs_top = -&c - a.transpose() * ((&b - &z + &w) * rho);
        let mut rhs = DVector::<T>::zeros(dim + 1);
        rhs.rows_mut(0, dim).copy_from(&rhs_top);
        rhs[dim] = target;
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Invalid("singular relaxation system".into()))?;
        x.copy_from(&sol.rows(0, dim));
        let ax = &a * &x + &b;
        let z_old = z.clone();
        let shifted = &ax + &w;
        let mut off = 0;
        for &d in &sizes {
            let len = d * d;
            let block = vec_to_herm(shifted.rows(off, len).as_slice(), d);
            z.rows_mut(off, len).copy_from(&herm_to_vec(&psd_projection(&block)));
            off += len;
        }
        let r = &ax - &z;
        w += &r;
        r_norm = to_f64(r.norm());
        s_norm = to_f64((a.transpose() * (&z - &z_old)).norm() * rho);
        if r_norm < cfg.tol && s_norm < cfg.tol {
            break;
        }
        if it % 50 == 0 {
            let scale = if r_norm > 10.0 * s_norm {
                Some(lit::<T>(2.0))
            } else if s_norm > 10.0 * r_norm {
                Some(lit::<T>(0.5))
            } else {
                None
            };
            if let Some(f) = scale {
                rho *= f;
                w /= f;
                lu = factor(rho);
            }
        }
    }

    let xs = x.as_slice();
    let (g, g2) = prob.pair(xs)?;
    let violation = prob
        .cones(xs)?
        .iter()
        .map(|cone| (-to_f64(linalg::min_eigenvalue(cone))).max(0.0))
        .fold(0.0, f64::max);
    let energy = energy_functional(&g, &g2, model)?;
    Ok(RelaxationResult {
        energy,
        gamma: g,
        gamma2: g2,
        primal_residual: r_norm,
        dual_residual: s_norm,
        cone_violation: violation,
        iterations: it,
        converged: violation < cfg.feasibility_tol,
    })
}

/// `N ≤ 1`: `Γ = 0` and the minimum of `tr(hγ)` over `0 ≤ γ ≤ 1`, `tr γ = N`.
fn one_body_bound<T: Real>(model: &ModelHamiltonian<T>, particles: usize) -> Result<RelaxationResult<T>> {
    let n = model.n();
    let mut g = CMat::zeros(n, n);
    if particles == 1 {
        let (_, vectors) = linalg::eigh(&model.h);
        let v = vectors.column(0);
        g = &v * v.adjoint();
    }
    let gamma = OneBodyRdm { matrix: g };
    let gamma2 = TwoBodyRdm::zeros(n);
    let energy = energy_functional(&gamma, &gamma2, model)?;
    Ok(RelaxationResult {
        energy,
        gamma,
        gamma2,
        primal_residual: 0.0,
        dual_residual: 0.0,
        cone_violation: 0.0,
        iterations: 0,
        converged: true,
    })
}
