//! Admissibility and the P-, G- and Q-conditions as finite matrix tests,
//! plus degree-two polynomial positivity, its sector decomposition and the
//! equivalence check between the two.
//!
//! On `n` modes the quantifier "for all A ∈ B(h)" of the G-condition ranges
//! over `n × n` matrices, so the condition is positivity of one `n² × n²`
//! Hermitian form matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockOperator, Ladder};
use crate::linalg::{self, pair, CMat, CVec};
use crate::rdm::{self, OneBodyRdm, TwoBodyRdm};
use crate::rng::{self, Purpose};
use crate::scalar::{lit, modulus, real, to_f64, Cx, Real};
use crate::states::{self, DensityMatrix};

/// Default verdict tolerance for eigenvalue tests.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Random polynomials drawn per state by [`representability_check`].
pub const RANDOM_POLYNOMIALS: usize = 200;

/// Per-clause slacks of the admissibility preconditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub gamma_min_eig: f64,
    pub gamma_max_eig: f64,
    pub trace_defect: f64,
    pub antisymmetry_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `0 ≤ γ ≤ 1`, `tr γ = N`, `ExΓ = ΓEx = −Γ`, each up to `tol`.
pub fn check_admissible<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>, particles: usize, tol: f64) -> Admissibility {
    let ev = gamma.eigenvalues();
    let lo = ev.first().copied().map(to_f64).unwrap_or(0.0);
    let hi = ev.last().copied().map(to_f64).unwrap_or(0.0);
    let trace_defect = (to_f64(gamma.trace()) - particles as f64).abs();
    let antisymmetry_defect = to_f64(gamma2.antisymmetry_defect());
    let pass = lo >= -tol && hi <= 1.0 + tol && trace_defect <= tol && antisymmetry_defect <= tol;
    Admissibility {
        gamma_min_eig: lo,
        gamma_max_eig: hi,
        trace_defect,
        antisymmetry_defect,
        tol,
        pass,
    }
}

/// Smallest eigenvalue of `Γ`.
pub fn p_condition<T: Real>(gamma2: &TwoBodyRdm<T>) -> T {
    linalg::min_eigenvalue(&gamma2.matrix)
}

/// `tr{(A*⊗A)(Γ + Ex(γ⊗1))} − |tr(Aγ)|²`, evaluated directly.
pub fn g_form<T: Real>(a: &CMat<T>, gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> T {
    let adj = a.adjoint();
    let n = gamma.n();
    let quad = linalg::pair_trace(&adj, a, &gamma2.matrix)
        + linalg::pair_trace_exchange(&adj, a, &gamma.matrix, &linalg::identity(n));
    quad.re - (a * &gamma.matrix).trace().norm_sqr()
}

/// Form matrix `M_G` with `g_form(A) = a* M_G a`, where `a_{(k,l)} = A_{kl}`.
pub fn g_condition_matrix<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> CMat<T> {
    let u = g_rank_one_vector(gamma);
    g_linear_part(gamma, gamma2) - &u * u.adjoint()
}

/// Part of `M_G` that is linear in `(γ, Γ)`:
/// `Γ_{(r,s),(p,q)} + δ_{rq} γ_{sp}` at row `(r,p)`, column `(q,s)`.
pub fn g_linear_part<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> CMat<T> {
    let n = gamma.n();
    let g = &gamma.matrix;
    let big = &gamma2.matrix;
    CMat::from_fn(n * n, n * n, |i, j| {
        let (r, p) = (i / n, i % n);
        let (q, s) = (j / n, j % n);
        let mut v = big[(pair(n, r, s), pair(n, p, q))];
        if r == q {
            v += g[(s, p)];
        }
        v
    })
}

/// `u` with `M_G = g_linear_part − u u*`; `u_{(k,l)} = conj(γ_{lk})`, so
/// `tr(Aγ) = u* a`.
pub fn g_rank_one_vector<T: Real>(gamma: &OneBodyRdm<T>) -> CVec<T> {
    let n = gamma.n();
    CVec::from_fn(n * n, |i, _| gamma.matrix[(i % n, i / n)].conj())
}

/// `Γ + (1 − Ex)(1⊗1 − γ⊗1 − 1⊗γ)`.
pub fn q_condition_matrix<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> CMat<T> {
    let n = gamma.n();
    let id = linalg::identity::<T>(n);
    let inner = linalg::identity::<T>(n * n) - linalg::kron(&gamma.matrix, &id) - linalg::kron(&id, &gamma.matrix);
    &gamma2.matrix + linalg::antisymmetrize_left(n, &inner)
}

/// Restriction of a two-particle operator to `Ran (1 − Ex)/2`.
pub fn antisymmetric_block<T: Real>(n: usize, m: &CMat<T>) -> CMat<T> {
    let u = linalg::antisymmetric_basis::<T>(n);
    u.adjoint() * m * u
}

/// Minimum eigenvalues of the Q matrix on the antisymmetric subspace and on
/// all of `h ⊗ h`.
pub fn q_condition<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> (T, T) {
    let q = q_condition_matrix(gamma, gamma2);
    let anti = linalg::min_eigenvalue(&antisymmetric_block(gamma.n(), &q));
    (anti, linalg::min_eigenvalue(&q))
}

/// `tr{(A*⊗A)(Γ + ½Ex(1⊗γ + γ⊗1))} − |tr(Aγ)|²`.
pub fn symmetrized_g_form<T: Real>(a: &CMat<T>, gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> T {
    let adj = a.adjoint();
    let id = linalg::identity::<T>(gamma.n());
    let ex = linalg::pair_trace_exchange(&adj, a, &id, &gamma.matrix)
        + linalg::pair_trace_exchange(&adj, a, &gamma.matrix, &id);
    let quad = linalg::pair_trace(&adj, a, &gamma2.matrix) + ex * real(lit::<T>(0.5));
    quad.re - (a * &gamma.matrix).trace().norm_sqr()
}

/// Worst symmetrized-G value over the matrix units `E_{kl}` and `samples`,
/// each scaled to unit Frobenius norm.
pub fn symmetrized_g_check<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>, samples: &[CMat<T>]) -> T {
    let n = gamma.n();
    let mut worst: Option<T> = None;
    let mut visit = |a: &CMat<T>| {
        let nrm = a.norm();
        if nrm == T::zero() {
            return;
        }
        let v = symmetrized_g_form(&(a / real(nrm)), gamma, gamma2);
        worst = Some(worst.map_or(v, |w: T| w.min(v)));
    };
    for k in 0..n {
        for l in 0..n {
            let mut e = CMat::zeros(n, n);
            e[(k, l)] = real(T::one());
            visit(&e);
        }
    }
    for s in samples {
        visit(s);
    }
    worst.unwrap_or_else(T::zero)
}

/// Condition summary with the fields of the report wire format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub admissible: bool,
    pub p_min_eig: f64,
    pub g_min_eig: f64,
    pub q_min_eig: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Full condition evaluation, keeping the admissibility details and the
/// informational full-space Q eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionDetails {
    pub report: ConditionReport,
    pub admissibility: Admissibility,
    pub q_full_min_eig: f64,
}

pub fn evaluate_conditions<T: Real>(
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
    particles: usize,
    tol: f64,
) -> ConditionDetails {
    let admissibility = check_admissible(gamma, gamma2, particles, tol);
    let p = to_f64(p_condition(gamma2));
    let g = to_f64(linalg::min_eigenvalue(&g_condition_matrix(gamma, gamma2)));
    let (q, q_full) = q_condition(gamma, gamma2);
    let q = to_f64(q);
    let pass = admissibility.pass && p >= -tol && g >= -tol && q >= -tol;
    ConditionDetails {
        report: ConditionReport {
            admissible: admissibility.pass,
            p_min_eig: p,
            g_min_eig: g,
            q_min_eig: q,
            tol,
            pass,
        },
        admissibility,
        q_full_min_eig: to_f64(q_full),
    }
}

/// Degree-two polynomial in the ladder operators:
/// `ν + Σ(α_k c*_k + β_k c_k) + Σ α_{kl} c*_k c*_l + Σ β_{kl} c_k c_l
///  + Σ κ_{kl} c*_k c_l + Σ η_{kl} c_k c*_l`,
/// with all mode indices below the cutoff `modes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial2<T: Real> {
    pub nu: Cx<T>,
    pub alpha1: CVec<T>,
    pub beta1: CVec<T>,
    pub alpha2: CMat<T>,
    pub beta2: CMat<T>,
    pub kappa: CMat<T>,
    pub eta: CMat<T>,
}

/// `tr(ρ P_a* P_b)` for the four sectors of [`Polynomial2::sectors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorDecomposition {
    pub total: f64,
    pub linear: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    /// Largest `|tr(ρ P_a* P_b)|` over `a ≠ b`.
    pub cross_max: f64,
}

impl SectorDecomposition {
    pub fn residual(&self) -> f64 {
        (self.total - (self.linear + self.alpha + self.beta + self.theta)).abs()
    }
}

impl<T: Real> Polynomial2<T> {
    pub fn zero(modes: usize) -> Self {
        Self {
            nu: Cx::new(T::zero(), T::zero()),
            alpha1: CVec::zeros(modes),
            beta1: CVec::zeros(modes),
            alpha2: CMat::zeros(modes, modes),
            beta2: CMat::zeros(modes, modes),
            kappa: CMat::zeros(modes, modes),
            eta: CMat::zeros(modes, modes),
        }
    }

    pub fn constant(modes: usize, nu: Cx<T>) -> Self {
        Self { nu, ..Self::zero(modes) }
    }

    /// All coefficients i.i.d. complex normal, then scaled to unit norm.
    pub fn random(modes: usize, seed: u64) -> Self {
        let mut r = rng::stream(seed, Purpose::Polynomial);
        let mut p = Self {
            nu: rng::complex_normal(&mut r),
            alpha1: CVec::from_fn(modes, |_, _| rng::complex_normal(&mut r)),
            beta1: CVec::from_fn(modes, |_, _| rng::complex_normal(&mut r)),
            alpha2: rng::complex_matrix(modes, modes, &mut r),
            beta2: rng::complex_matrix(modes, modes, &mut r),
            kappa: rng::complex_matrix(modes, modes, &mut r),
            eta: rng::complex_matrix(modes, modes, &mut r),
        };
        let nrm = p.coefficient_norm();
        p.scale(T::one() / nrm);
        p
    }

    pub fn modes(&self) -> usize {
        self.alpha1.len()
    }

    pub fn coefficient_norm(&self) -> T {
        let s = self.nu.norm_sqr()
            + self.alpha1.norm_squared()
            + self.beta1.norm_squared()
            + self.alpha2.norm_squared()
            + self.beta2.norm_squared()
            + self.kappa.norm_squared()
            + self.eta.norm_squared();
        s.sqrt()
    }

    fn scale(&mut self, s: T) {
        let z = real(s);
        self.nu *= z;
        self.alpha1 *= z;
        self.beta1 *= z;
        self.alpha2 *= z;
        self.beta2 *= z;
        self.kappa *= z;
        self.eta *= z;
    }

    fn check(&self, basis: &FockBasis) -> Result<()> {
        let m = self.modes();
        let shapes_ok = self.beta1.len() == m
            && [&self.alpha2, &self.beta2, &self.kappa, &self.eta]
                .iter()
                .all(|x| x.nrows() == m && x.ncols() == m);
        if !shapes_ok {
            return Err(Error::Invalid("polynomial coefficient shapes disagree".into()));
        }
        if m > basis.n_modes() {
            return Err(Error::ModeIndex {
                index: m - 1,
                n_modes: basis.n_modes(),
            });
        }
        Ok(())
    }

    fn terms(&self) -> Vec<(Cx<T>, Vec<Ladder>)> {
        use Ladder::{Annihilate as A, Create as C};
        let m = self.modes();
        let mut t = vec![(self.nu, vec![])];
        for k in 0..m {
            t.push((self.alpha1[k], vec![C(k)]));
            t.push((self.beta1[k], vec![A(k)]));
        }
        for k in 0..m {
            for l in 0..m {
                t.push((self.alpha2[(k, l)], vec![C(k), C(l)]));
                t.push((self.beta2[(k, l)], vec![A(k), A(l)]));
                t.push((self.kappa[(k, l)], vec![C(k), A(l)]));
                t.push((self.eta[(k, l)], vec![A(k), C(l)]));
            }
        }
        t
    }

    pub fn to_operator(&self, basis: &FockBasis) -> Result<FockOperator<T>> {
        self.check(basis)?;
        Ok(FockOperator::from_words(basis, &self.terms()))
    }

    /// CAR rewrite into particle-number sectors: linear (`±1`), `c*c*` (`+2`),
    /// `cc` (`−2`) and the number-conserving part
    /// `μ + Σ θ_{kl}(c*_k c_l − c_l c*_k)` with
    /// `μ = ν + ½Σ(κ_kk + η_kk)` and `θ_{kl} = ½(κ_{kl} − η_{lk})`.
    /// The constant `μ` is grouped with the `θ` part because both conserve
    /// particle number; grouped with the linear part it would leave the
    /// cross term `2 Re μ̄ tr(ρ P_θ)`.
    pub fn sectors(&self, basis: &FockBasis) -> Result<[FockOperator<T>; 4]> {
        use Ladder::{Annihilate as A, Create as C};
        self.check(basis)?;
        let m = self.modes();
        let half = real(lit::<T>(0.5));
        let mut linear = Vec::new();
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut mu = self.nu;
        for k in 0..m {
            linear.push((self.alpha1[k], vec![C(k)]));
            linear.push((self.beta1[k], vec![A(k)]));
            mu += (self.kappa[(k, k)] + self.eta[(k, k)]) * half;
        }
        let mut theta = vec![(mu, vec![])];
        for k in 0..m {
            for l in 0..m {
                alpha.push((self.alpha2[(k, l)], vec![C(k), C(l)]));
                beta.push((self.beta2[(k, l)], vec![A(k), A(l)]));
                let th = (self.kappa[(k, l)] - self.eta[(l, k)]) * half;
                theta.push((th, vec![C(k), A(l)]));
                theta.push((-th, vec![A(l), C(k)]));
            }
        }
        Ok([
            FockOperator::from_words(basis, &linear),
            FockOperator::from_words(basis, &alpha),
            FockOperator::from_words(basis, &beta),
            FockOperator::from_words(basis, &theta),
        ])
    }
}

/// `tr(ρ A* B)`.
fn sandwich<T: Real>(rho: &DensityMatrix<T>, a: &FockOperator<T>, b: &FockOperator<T>) -> Result<Cx<T>> {
    states::expectation(rho, &a.adjoint().mul(b))
}

/// `tr(ρ P*P)`, real part.
pub fn polynomial_expectation<T: Real>(rho: &DensityMatrix<T>, p: &Polynomial2<T>) -> Result<T> {
    let op = p.to_operator(rho.basis())?;
    Ok(sandwich(rho, &op, &op)?.re)
}

pub fn polynomial_sector_decomposition<T: Real>(
    rho: &DensityMatrix<T>,
    p: &Polynomial2<T>,
) -> Result<SectorDecomposition> {
    let total = to_f64(polynomial_expectation(rho, p)?);
    let parts = p.sectors(rho.basis())?;
    let mut diag = [0.0f64; 4];
    let mut cross_max = 0.0f64;
    for (a, pa) in parts.iter().enumerate() {
        for (b, pb) in parts.iter().enumerate() {
            let v = sandwich(rho, pa, pb)?;
            if a == b {
                diag[a] = to_f64(v.re);
            } else {
                cross_max = cross_max.max(to_f64(modulus(v)));
            }
        }
    }
    Ok(SectorDecomposition {
        total,
        linear: diag[0],
        alpha: diag[1],
        beta: diag[2],
        theta: diag[3],
        cross_max,
    })
}

/// Polynomials whose positivity is equivalent to each clause of the
/// conditions, built from the extremal eigenvectors of `γ`, `Γ`, `M_G` and
/// the antisymmetric Q block. In order: `γ ≥ 0`, `γ ≤ 1`, G, P, Q.
pub fn witness_polynomials<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> Vec<Polynomial2<T>> {
    let n = gamma.n();
    let mut out = Vec::with_capacity(5);

    let (_, vecs) = linalg::eigh(&gamma.matrix);
    // Σ ᾱ_i c_i gives ⟨φ|γφ⟩ with φ = Σ α_i e_i
    let mut low = Polynomial2::zero(n);
    low.beta1 = vecs.column(0).map(|z| z.conj());
    out.push(low);
    // Σ α_i c*_i gives ⟨φ|(1 − γ)φ⟩
    let mut high = Polynomial2::zero(n);
    high.alpha1 = vecs.column(n - 1).into_owned();
    out.push(high);

    // μ + ½Σ α_{kl}(c*_k c_l − c_l c*_k) reproduces the G form of A = (α_{kl})
    let (_, gv) = linalg::eigh(&g_condition_matrix(gamma, gamma2));
    let a = linalg::unpair(n, &gv.column(0).into_owned());
    out.push(g_witness(&a, gamma));

    // Σ ᾱ_{kl} c_k c_l gives ⟨Ψ|ΓΨ⟩ with Ψ_{(k,l)} = α_{kl}
    let (_, pv) = linalg::eigh(&gamma2.matrix);
    let mut pp = Polynomial2::zero(n);
    pp.beta2 = linalg::unpair(n, &pv.column(0).into_owned()).map(|z| z.conj());
    out.push(pp);

    // Σ α_{kl} c*_k c*_l gives ⟨Ψ|QΨ⟩ with Ψ_{(l,k)} = α_{kl}
    if n >= 2 {
        let q = q_condition_matrix(gamma, gamma2);
        let u = linalg::antisymmetric_basis::<T>(n);
        let (_, qv) = linalg::eigh(&(u.adjoint() * &q * &u));
        let psi = &u * qv.column(0);
        let mut qp = Polynomial2::zero(n);
        qp.alpha2 = linalg::unpair(n, &psi).transpose();
        out.push(qp);
    }
    out
}

/// The G witness for a given `A`: `μ = (s + ½) tr A` with
/// `s = −tr(Aγ)/tr A`, or `μ = −tr(Aγ)` when `tr A = 0`.
pub fn g_witness<T: Real>(a: &CMat<T>, gamma: &OneBodyRdm<T>) -> Polynomial2<T> {
    let n = gamma.n();
    let half = real(lit::<T>(0.5));
    let tr_a = a.trace();
    let tr_ag = (a * &gamma.matrix).trace();
    let mu = if modulus(tr_a) > lit::<T>(1e-12) {
        (-tr_ag / tr_a + half) * tr_a
    } else {
        -tr_ag
    };
    let mut p = Polynomial2::constant(n, mu);
    p.kappa = a * half;
    // −½ α_{kl} c_l c*_k  ⇒  η_{lk} = −½ α_{kl}
    p.eta = a.transpose() * (-half);
    p
}

/// Outcome of comparing polynomial positivity against the condition matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentabilityCheck {
    pub conditions: ConditionReport,
    pub witness_min: f64,
    pub random_min: f64,
    pub polynomial_pass: bool,
    pub condition_pass: bool,
}

impl RepresentabilityCheck {
    pub fn agree(&self) -> bool {
        self.polynomial_pass == self.condition_pass
    }

    /// A sampled polynomial failure while every condition holds contradicts
    /// the equivalence outright.
    pub fn contradiction(&self) -> bool {
        self.random_min < -self.conditions.tol && self.condition_pass
    }
}

/// Evaluates both sides of the equivalence for a trace-one,
/// particle-number-conserving `ρ` supported on one sector (positivity not
/// required).
pub fn representability_check<T: Real>(
    rho: &DensityMatrix<T>,
    random_polynomials: usize,
    seed: u64,
    tol: f64,
) -> Result<RepresentabilityCheck> {
    let particles = rho
        .particle_number()
        .ok_or_else(|| Error::Invalid("state must be supported on a single sector".into()))?;
    let gamma = rdm::one_pdm(rho);
    let gamma2 = rdm::two_pdm(rho);
    let n = gamma.n();
    let details = evaluate_conditions(&gamma, &gamma2, particles, tol);

    let mut witness_min = f64::INFINITY;
    for p in witness_polynomials(&gamma, &gamma2) {
        witness_min = witness_min.min(to_f64(polynomial_expectation(rho, &p)?));
    }
    let mut random_min = f64::INFINITY;
    for i in 0..random_polynomials {
        let p = Polynomial2::random(n, rng::child_seed(seed, i as u64));
        random_min = random_min.min(to_f64(polynomial_expectation(rho, &p)?));
    }
    let polynomial_pass = witness_min.min(random_min) >= -tol;
    Ok(RepresentabilityCheck {
        conditions: details.report,
        witness_min,
        random_min,
        polynomial_pass,
        condition_pass: details.report.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockBasis;
    use crate::states::{pure_state, random_mixed, signed_trace_one, StateVector};

    fn pair_of(rho: &DensityMatrix<f64>) -> (OneBodyRdm<f64>, TwoBodyRdm<f64>) {
        (rdm::one_pdm(rho), rdm::two_pdm(rho))
    }

    #[test]
    fn vacuum_conditions() {
        let b = FockBasis::new(3).unwrap();
        let rho = pure_state(&StateVector::<f64>::vacuum(&b)).unwrap();
        let (g, gg) = pair_of(&rho);
        assert_eq!(linalg::max_abs(&g_condition_matrix(&g, &gg)), 0.0);
        let (anti, full) = q_condition(&g, &gg);
        assert!((anti - 2.0).abs() < 1e-12);
        assert!(full.abs() < 1e-12);
        assert_eq!(symmetrized_g_check(&g, &gg, &[]), 0.0);
    }

    #[test]
    fn fully_occupied_g_matrix_vanishes() {
        let n = 3;
        let g = OneBodyRdm::<f64>::new(linalg::identity(n)).unwrap();
        let gg = rdm::hartree_fock_two_pdm(&g);
        assert!(linalg::max_abs(&g_condition_matrix(&g, &gg)) < 1e-14);
        let (anti, _) = q_condition(&g, &gg);
        assert!(anti >= -1e-12);
    }

    #[test]
    fn g_matrix_matches_direct_form() {
        let b = FockBasis::new(4).unwrap();
        let rho = random_mixed::<f64>(&b, 2, 3, 5).unwrap();
        let (g, gg) = pair_of(&rho);
        let m = g_condition_matrix(&g, &gg);
        let mut r = rng::stream(1, Purpose::Operator);
        for _ in 0..50 {
            let a = rng::complex_matrix::<f64, _>(4, 4, &mut r);
            let v = CVec::from_fn(16, |i, _| a[(i / 4, i % 4)]);
            let quad = v.dotc(&(&m * &v)).re;
            let direct = g_form(&a, &g, &gg);
            assert!((quad - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn constructed_violations() {
        let b = FockBasis::new(4).unwrap();
        let rho = random_mixed::<f64>(&b, 2, 2, 2).unwrap();
        let (g, gg) = pair_of(&rho);
        assert!(check_admissible(&g, &gg, 2, 1e-9).pass);
        // symmetric counterpart (1 + Ex)(γ⊗γ) of the Hartree–Fock 2-pdm
        let gg_kron = linalg::kron(&g.matrix, &g.matrix);
        let sym = TwoBodyRdm::new(&gg_kron + linalg::exchange_left(4, &gg_kron)).unwrap();
        let bad = check_admissible(&g, &sym, 2, 1e-9);
        assert!(!bad.pass && bad.antisymmetry_defect > 1e-6);
        let scaled = OneBodyRdm::new(&g.matrix * real(1.5)).unwrap();
        assert!(!check_admissible(&scaled, &gg, 2, 1e-9).pass);

        let ex = linalg::exchange::<f64>(3);
        let neg = TwoBodyRdm::new((linalg::identity::<f64>(9) - ex) * real(-0.5)).unwrap();
        assert!((p_condition(&neg) + 1.0).abs() < 1e-12);
        assert_eq!(p_condition(&TwoBodyRdm::<f64>::zeros(3)), 0.0);
    }

    #[test]
    fn symmetrized_identity_operator_is_zero() {
        let b = FockBasis::new(4).unwrap();
        let rho = random_mixed::<f64>(&b, 3, 2, 8).unwrap();
        let (g, gg) = pair_of(&rho);
        let v = symmetrized_g_form(&linalg::identity(4), &g, &gg);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn witnesses_reproduce_condition_values() {
        let b = FockBasis::new(4).unwrap();
        let rho = signed_trace_one::<f64>(&b, 2, 13).unwrap();
        let (g, gg) = pair_of(&rho);
        let w = witness_polynomials(&g, &gg);
        let vals: Vec<f64> = w.iter().map(|p| polynomial_expectation(&rho, p).unwrap()).collect();
        let ev = g.eigenvalues();
        let d = evaluate_conditions(&g, &gg, 2, 1e-9);
        assert!((vals[0] - ev[0]).abs() < 1e-10);
        assert!((vals[1] - (1.0 - ev[3])).abs() < 1e-10);
        assert!((vals[2] - d.report.g_min_eig).abs() < 1e-10);
        assert!((vals[3] - d.report.p_min_eig).abs() < 1e-10);
        assert!((vals[4] - d.report.q_min_eig).abs() < 1e-10);
    }

    #[test]
    fn g_witness_with_traceless_operator() {
        let b = FockBasis::new(3).unwrap();
        let rho = random_mixed::<f64>(&b, 1, 2, 3).unwrap();
        let (g, gg) = pair_of(&rho);
        let mut a = CMat::<f64>::zeros(3, 3);
        a[(0, 0)] = real(1.0);
        a[(1, 1)] = real(-1.0);
        a[(0, 2)] = Cx::new(0.3, 0.7);
        let v = polynomial_expectation(&rho, &g_witness(&a, &g)).unwrap();
        assert!((v - g_form(&a, &g, &gg)).abs() < 1e-12);
    }

    #[test]
    fn polynomial_examples() {
        let b = FockBasis::new(3).unwrap();
        let vac = pure_state(&StateVector::<f64>::vacuum(&b)).unwrap();
        let mut p = Polynomial2::zero(3);
        p.beta1[0] = real(1.0);
        assert_eq!(polynomial_expectation(&vac, &p).unwrap(), 0.0);
        let rho = random_mixed::<f64>(&b, 2, 2, 1).unwrap();
        let one = Polynomial2::constant(3, real(1.0));
        assert!((polynomial_expectation(&rho, &one).unwrap() - 1.0).abs() < 1e-12);
        let mut big = Polynomial2::<f64>::zero(4);
        big.nu = real(1.0);
        assert!(polynomial_expectation(&rho, &big).is_err());
    }

    #[test]
    fn sector_terms_isolate() {
        let b = FockBasis::new(3).unwrap();
        let rho = random_mixed::<f64>(&b, 1, 2, 6).unwrap();
        let mut p = Polynomial2::zero(3);
        p.alpha2[(0, 1)] = real(1.0);
        let d = polynomial_sector_decomposition(&rho, &p).unwrap();
        assert!(d.alpha > 0.0);
        assert_eq!((d.linear, d.beta), (0.0, 0.0));
        assert!(d.theta.abs() < 1e-15);

        let mut k = Polynomial2::zero(3);
        k.kappa = rng::complex_matrix(3, 3, &mut rng::stream(2, Purpose::Polynomial));
        let d = polynomial_sector_decomposition(&rho, &k).unwrap();
        assert!((d.theta - d.total).abs() < 1e-12);
        assert!(d.linear.abs() + d.alpha.abs() + d.beta.abs() < 1e-15);

        let r = Polynomial2::random(3, 44);
        let d = polynomial_sector_decomposition(&rho, &r).unwrap();
        assert!(d.residual() < 1e-12 && d.cross_max < 1e-12);
    }

    #[test]
    fn equivalence_on_positive_and_signed_states() {
        let b = FockBasis::new(4).unwrap();
        let rho = random_mixed::<f64>(&b, 2, 2, 3).unwrap();
        let c = representability_check(&rho, 20, 3, 1e-9).unwrap();
        assert!(c.condition_pass && c.polynomial_pass);
        let s = signed_trace_one::<f64>(&b, 2, 3).unwrap();
        let c = representability_check(&s, 20, 3, 1e-9).unwrap();
        assert!(c.agree() && !c.contradiction());
        assert!(!c.condition_pass);
    }
}
