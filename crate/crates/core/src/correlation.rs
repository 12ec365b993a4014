//! Spectral split of `γ` at ½, the Main Part / Remainder / Main Error Term
//! regrouping of `tr{(X⊗X)Γ}`, and every bound of the chain ending in
//! `tr{(X⊗X)Γ^(T)} ≥ −b·min{1, 10a}` with `b = tr(Xγ)` and
//! `a = (tr X(γ − γ²))^{1/2}`.
//!
//! Every `slack_*` is "left side minus right side" of an inequality of the
//! form `lhs ≥ rhs`, so a valid bound has nonnegative slack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{slater_state, FockBasis};
use crate::linalg::{self, CMat};
use crate::rdm::{self, OneBodyRdm, TwoBodyRdm};
use crate::rng::{self, Purpose};
use crate::scalar::{lit, real, to_f64, Cx, Real};
use crate::states::{self, DensityMatrix, StateVector};

/// Eigenvalues within this distance of the threshold count as equal to it
/// and go to `P⊥`.
pub const TIE_TOL: f64 = 1e-12;
/// Uniform slack tolerance of the verification suites.
pub const SLACK_TOL: f64 = 1e-9;
/// Tolerance of the exact regrouping identities.
pub const IDENTITY_TOL: f64 = 1e-10;

/// [`IDENTITY_TOL`], widened for scalars coarser than `f64`.
pub fn identity_tol<T: Real>() -> f64 {
    IDENTITY_TOL.max(1e4 * to_f64(T::default_epsilon()))
}

/// `P = 1[γ > t]` and `P⊥ = 1 − P` together with the spectrum of `γ`.
#[derive(Debug, Clone)]
pub struct ProjectionSplit<T: Real> {
    pub p: CMat<T>,
    pub p_perp: CMat<T>,
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMat<T>,
    pub threshold: T,
}

/// Defects of the split invariants; all should be ≈ 0 except the two
/// operator bounds, which should be ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitInvariants {
    pub completeness: f64,
    pub orthogonality: f64,
    pub commutator: f64,
    /// `λ_min(2γ − P)`.
    pub p_bound: f64,
    /// `λ_min(2(1 − γ) − P⊥)`.
    pub p_perp_bound: f64,
}

impl<T: Real> ProjectionSplit<T> {
    pub fn rank(&self) -> usize {
        let t = self.threshold + lit(TIE_TOL);
        self.eigenvalues.iter().filter(|&&l| l > t).count()
    }

    pub fn invariants(&self, gamma: &OneBodyRdm<T>) -> SplitInvariants {
        let n = gamma.n();
        let id = linalg::identity::<T>(n);
        let g = &gamma.matrix;
        let two = real(lit::<T>(2.0));
        SplitInvariants {
            completeness: to_f64(linalg::max_abs_diff(&(&self.p + &self.p_perp), &id)),
            orthogonality: to_f64(linalg::max_abs(&(&self.p * &self.p_perp))),
            commutator: to_f64(linalg::max_abs(&(&self.p * g - g * &self.p))),
            p_bound: to_f64(linalg::min_eigenvalue(&(g * two - &self.p))),
            p_perp_bound: to_f64(linalg::min_eigenvalue(&((&id - g) * two - &self.p_perp))),
        }
    }
}

/// Split at ½.
pub fn split_projections<T: Real>(gamma: &OneBodyRdm<T>) -> ProjectionSplit<T> {
    split_at(gamma, lit(0.5))
}

/// Split at an arbitrary threshold `t`: eigenvalues `> t` go to `P`.
pub fn split_at<T: Real>(gamma: &OneBodyRdm<T>, threshold: T) -> ProjectionSplit<T> {
    let n = gamma.n();
    let (values, vectors) = linalg::eigh(&gamma.matrix);
    let cut = threshold + lit(TIE_TOL);
    let mut p = CMat::zeros(n, n);
    for (i, &l) in values.iter().enumerate() {
        if l > cut {
            let v = vectors.column(i);
            p += &v * v.adjoint();
        }
    }
    let p = linalg::hermitian_part(&p);
    let p_perp = linalg::identity::<T>(n) - &p;
    ProjectionSplit {
        p,
        p_perp,
        eigenvalues: values,
        eigenvectors: vectors,
        threshold,
    }
}

/// Orthogonal projection onto a Haar-random `d`-dimensional subspace of `Cⁿ`.
pub fn random_projection<T: Real>(n: usize, d: usize, seed: u64) -> Result<CMat<T>> {
    if d > n {
        return Err(Error::Rank { rank: d, dim: n });
    }
    if d == 0 {
        return Ok(CMat::zeros(n, n));
    }
    if d == n {
        return Ok(linalg::identity(n));
    }
    let mut r = rng::stream(seed, Purpose::Projection);
    let q = rng::haar_isometry::<T, _>(n, d, &mut r);
    Ok(linalg::hermitian_part(&(&q * q.adjoint())))
}

/// Haar-random `n × n` unitary.
pub fn random_unitary<T: Real>(n: usize, seed: u64) -> CMat<T> {
    let mut r = rng::stream(seed, Purpose::Orbitals);
    rng::haar_isometry(n, n, &mut r)
}

fn checked_real<T: Real>(z: Cx<T>, what: &'static str) -> Result<T> {
    let im = to_f64(z.im).abs();
    if im > identity_tol::<T>() * to_f64(z.re).abs().max(1.0) {
        return Err(Error::Consistency { what, residue: im });
    }
    Ok(z.re)
}

/// `tr{(X⊗X)Γ^(T)}` with `Γ^(T) = Γ − (1 − Ex)(γ⊗γ)`.
pub fn correlation_lhs<T: Real>(x: &CMat<T>, gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> Result<T> {
    let t = rdm::transposed_gamma_term(gamma, gamma2)?;
    checked_real(linalg::pair_trace(x, x, &t.matrix), "correlation trace has an imaginary part")
}

/// `b = tr(Xγ)` and `a² = tr X(γ − γ²)`, the latter clamped at zero when
/// roundoff makes it slightly negative.
pub fn ab_parameters<T: Real>(x: &CMat<T>, gamma: &OneBodyRdm<T>) -> (T, T) {
    let g = &gamma.matrix;
    let b = (x * g).trace().re;
    let mut a2 = (x * (g - g * g)).trace().re;
    if a2 < T::zero() && a2 > -lit::<T>(1e-12) {
        a2 = T::zero();
    }
    (a2.max(T::zero()).sqrt(), b)
}

/// The seven traces of the split expansion and their regrouping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T: Real> {
    /// `tr{(X⊗X)Γ}` computed directly.
    pub total: T,
    /// `tr{(PXP⊗PXP)Γ}`.
    pub pp_pp: T,
    /// `tr{(PXP⊗P⊥XP)Γ}`.
    pub pp_qp: Cx<T>,
    /// `tr{(PXP⊥⊗P⊥XP)Γ}`.
    pub pq_qp: T,
    /// `tr{(P⊥XP⊥⊗P⊥XP⊥)Γ}`.
    pub qq_qq: T,
    /// `tr{(P⊥XP⊗P⊥XP⊥)Γ}`.
    pub qp_qq: Cx<T>,
    /// `tr{(P⊥XP⊥⊗PXP)Γ}`.
    pub qq_pp: T,
    /// `tr{(PXP⊥⊗PXP⊥)Γ}`.
    pub pq_pq: Cx<T>,
    pub t_mp: T,
    pub t_r1: T,
    pub t_r2: T,
    pub t_met: T,
}

impl<T: Real> Decomposition<T> {
    pub fn t_r(&self) -> T {
        self.t_r1 + self.t_r2
    }

    /// Sum of the seven expansion terms with their multiplicities.
    pub fn expansion_sum(&self) -> T {
        let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
        self.pp_pp + four * self.pp_qp.re + two * self.pq_qp + self.qq_qq + four * self.qp_qq.re + two * self.qq_pp
            + two * self.pq_pq.re
    }

    pub fn regrouped_sum(&self) -> T {
        self.t_mp + self.t_r() + self.t_met
    }
}

/// Blocks `PXP`, `PXP⊥`, `P⊥XP`, `P⊥XP⊥`.
fn blocks<T: Real>(x: &CMat<T>, split: &ProjectionSplit<T>) -> [CMat<T>; 4] {
    let (p, q) = (&split.p, &split.p_perp);
    [p * x * p, p * x * q, q * x * p, q * x * q]
}

/// Expands `tr{(X⊗X)Γ}` over `P + P⊥` and regroups it into
/// `T_MP + T_R1 + T_R2 + T_MET`; fails if either the expansion or the
/// regrouping misses the directly computed total by more than `1e-10`.
pub fn decompose<T: Real>(x: &CMat<T>, split: &ProjectionSplit<T>, gamma2: &TwoBodyRdm<T>) -> Result<Decomposition<T>> {
    let g2 = &gamma2.matrix;
    let [pxp, pxq, qxp, qxq] = blocks(x, split);
    let tr = |a: &CMat<T>, b: &CMat<T>| linalg::pair_trace(a, b, g2);
    let total = checked_real(tr(x, x), "tr{(X⊗X)Γ} has an imaginary part")?;
    let pp_pp = checked_real(tr(&pxp, &pxp), "tr{(PXP⊗PXP)Γ} has an imaginary part")?;
    let pp_qp = tr(&pxp, &qxp);
    let pq_qp = checked_real(tr(&pxq, &qxp), "tr{(PXP⊥⊗P⊥XP)Γ} has an imaginary part")?;
    let qq_qq = checked_real(tr(&qxq, &qxq), "tr{(P⊥XP⊥⊗P⊥XP⊥)Γ} has an imaginary part")?;
    let qp_qq = tr(&qxp, &qxq);
    let qq_pp = checked_real(tr(&qxq, &pxp), "tr{(P⊥XP⊥⊗PXP)Γ} has an imaginary part")?;
    let pq_pq = tr(&pxq, &pxq);
    let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
    let d = Decomposition {
        total,
        pp_pp,
        pp_qp,
        pq_qp,
        qq_qq,
        qp_qq,
        qq_pp,
        pq_pq,
        t_mp: pp_pp + four * pp_qp.re + four * pq_qp,
        t_r1: qq_qq + two * qq_pp + four * qp_qq.re,
        t_r2: -two * pq_qp,
        t_met: two * pq_pq.re,
    };
    let scale = to_f64(total).abs().max(1.0);
    let expansion = to_f64((d.expansion_sum() - total).abs());
    if expansion > identity_tol::<T>() * scale {
        return Err(Error::Decomposition {
            what: "split expansion of tr{(X⊗X)Γ}",
            mismatch: expansion,
        });
    }
    let regroup = to_f64((d.regrouped_sum() - total).abs());
    if regroup > identity_tol::<T>() * scale {
        return Err(Error::Decomposition {
            what: "T_MP + T_R + T_MET regrouping",
            mismatch: regroup,
        });
    }
    Ok(d)
}

/// Both sides of
/// `Σ_{r,s} tr{(B*⊗B)(Γ + Ex(γ⊗1))} = tr{(QYQ ⊗ Q⊥YQ⊥)(−Γ + 1⊗γ)}`
/// with `B(r,s) = |QYψ_r⟩⟨Q⊥Yψ_s|` over the standard basis `ψ`. Both
/// sides agree when `Y` and `Q` are orthogonal projections.
pub fn b_operator_identity<T: Real>(
    y: &CMat<T>,
    q: &CMat<T>,
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
) -> (T, T) {
    let n = gamma.n();
    let id = linalg::identity::<T>(n);
    let q_perp = &id - q;
    let qy = q * y;
    let qpy = &q_perp * y;
    let mut lhs = Cx::new(T::zero(), T::zero());
    for r in 0..n {
        for s in 0..n {
            let b = qy.column(r) * qpy.column(s).adjoint();
            let bs = b.adjoint();
            lhs += linalg::pair_trace(&bs, &b, &gamma2.matrix)
                + linalg::pair_trace_exchange(&bs, &b, &gamma.matrix, &id);
        }
    }
    let qyq = q * y * q;
    let qpyqp = &q_perp * y * &q_perp;
    let rhs = -linalg::pair_trace(&qyq, &qpyqp, &gamma2.matrix) + qyq.trace() * (&qpyqp * &gamma.matrix).trace();
    (lhs.re, rhs.re)
}

/// Slacks of `tr{(PXP⊗P⊥XP⊥)Γ} ≤ 4ba²` and of its swapped form.
pub fn fundsatz_check<T: Real>(
    x: &CMat<T>,
    split: &ProjectionSplit<T>,
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
) -> (T, T) {
    let [pxp, _, _, qxq] = blocks(x, split);
    let (a, b) = ab_parameters(x, gamma);
    let bound = lit::<T>(4.0) * b * a * a;
    (
        bound - linalg::pair_trace(&pxp, &qxq, &gamma2.matrix).re,
        bound - linalg::pair_trace(&qxq, &pxp, &gamma2.matrix).re,
    )
}

/// Slacks `T_R1 + 8ba²`, `T_R2 + 8ba²`, `T_R + 16ba²`.
pub fn bound_remainder<T: Real>(d: &Decomposition<T>, a: T, b: T) -> [T; 3] {
    let ba2 = b * a * a;
    let eight = lit::<T>(8.0);
    [d.t_r1 + eight * ba2, d.t_r2 + eight * ba2, d.t_r() + lit::<T>(16.0) * ba2]
}

/// Checks around the Main Error Term bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetCheck<T: Real> {
    /// `T_MET + 2b(8a²(1 + 4a²))^{1/2}`.
    pub slack: T,
    /// `Re tr{(P⊥XP⊗P⊥XP)(Γ + Ex(γ⊗1))} + (F₁F₂)^{1/2}` from the
    /// Cauchy–Schwarz step.
    pub cauchy_schwarz_slack: T,
    /// `|tr{(P⊥XP⊗P⊥XP)Ex(γ⊗1)}|`, zero because `PP⊥ = 0`.
    pub exchange_term: T,
}

pub fn bound_met<T: Real>(
    x: &CMat<T>,
    split: &ProjectionSplit<T>,
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
    d: &Decomposition<T>,
) -> MetCheck<T> {
    let n = gamma.n();
    let id = linalg::identity::<T>(n);
    let [_, pxq, qxp, _] = blocks(x, split);
    let g = &gamma.matrix;
    let form = |a: &CMat<T>, b: &CMat<T>| {
        linalg::pair_trace(a, b, &gamma2.matrix) + linalg::pair_trace_exchange(a, b, g, &id)
    };
    let (a, b) = ab_parameters(x, gamma);
    let a2 = a * a;
    let bound = lit::<T>(2.0) * b * (lit::<T>(8.0) * a2 * (T::one() + lit::<T>(4.0) * a2)).sqrt();
    let f1 = form(&pxq, &qxp).re.max(T::zero());
    let f2 = form(&qxp, &pxq).re.max(T::zero());
    MetCheck {
        slack: d.t_met + bound,
        cauchy_schwarz_slack: form(&qxp, &qxp).re + (f1 * f2).sqrt(),
        exchange_term: crate::scalar::modulus(linalg::pair_trace_exchange(&qxp, &qxp, g, &id)),
    }
}

/// `(identity mismatch, slack)`: the first compares `T_MP` against
/// `tr{(PX(P + 2P⊥) ⊗ (P + 2P⊥)XP)Γ}`, the second is
/// `T_MP − tr{(X⊗X)(1 − Ex)(γ⊗γ)} + 22ba²`.
pub fn bound_main_part<T: Real>(
    x: &CMat<T>,
    split: &ProjectionSplit<T>,
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
    d: &Decomposition<T>,
) -> Result<(T, T)> {
    let two = real(lit::<T>(2.0));
    let m = &split.p + &split.p_perp * two;
    let left = &split.p * x * &m;
    let right = &m * x * &split.p;
    let closed = linalg::pair_trace(&left, &right, &gamma2.matrix).re;
    let mismatch = (d.t_mp - closed).abs();
    if to_f64(mismatch) > identity_tol::<T>() * to_f64(d.t_mp).abs().max(1.0) {
        return Err(Error::Decomposition {
            what: "T_MP closed form",
            mismatch: to_f64(mismatch),
        });
    }
    let (a, b) = ab_parameters(x, gamma);
    Ok((mismatch, d.t_mp - hf_term(x, gamma) + lit::<T>(22.0) * b * a * a))
}

/// `tr{(X⊗X)(1 − Ex)(γ⊗γ)} = (tr Xγ)² − tr(XγXγ)`.
pub fn hf_term<T: Real>(x: &CMat<T>, gamma: &OneBodyRdm<T>) -> T {
    let xg = x * &gamma.matrix;
    let b = xg.trace().re;
    b * b - (&xg * &xg).trace().re
}

/// Slack of the crude bound `tr{(X⊗X)Γ^(T)} ≥ −tr(Xγ)`.
pub fn crude_bound_check<T: Real>(x: &CMat<T>, gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> Result<T> {
    let (_, b) = ab_parameters(x, gamma);
    Ok(correlation_lhs(x, gamma, gamma2)? + b)
}

/// `38a + 2(8 + 32a²)^{1/2}`.
pub fn chain_constant(a: f64) -> f64 {
    38.0 * a + 2.0 * (8.0 + 32.0 * a * a).sqrt()
}

/// Right side of the recombined chain: `b·min{1, a(38a + 2(8 + 32a²)^{1/2})}`.
pub fn rhs_recombined(a: f64, b: f64) -> f64 {
    b * (a * chain_constant(a)).min(1.0)
}

/// `b·min{1, 10a}`.
pub fn rhs_final(a: f64, b: f64) -> f64 {
    b * (10.0 * a).min(1.0)
}

/// `b·min{1, 38a² + 4(a²(2 + 8a⁴))^{1/2}}`: the displayed form of the general
/// bound, whose square-root term carries `a⁴` where the recombination of the
/// individual bounds produces `a²`.
pub fn rhs_displayed(a: f64, b: f64) -> f64 {
    let a2 = a * a;
    b * (38.0 * a2 + 4.0 * (a2 * (2.0 + 8.0 * a2 * a2)).sqrt()).min(1.0)
}

/// Every term and slack for one `(X, γ, Γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub a: f64,
    pub b: f64,
    pub lhs: f64,
    pub t_mp: f64,
    pub t_r1: f64,
    pub t_r2: f64,
    pub t_r: f64,
    pub t_met: f64,
    pub hf_term: f64,
    pub decomposition_residual: f64,
    pub slack_thm44: f64,
    pub slack_fundsatz: f64,
    pub slack_fundsatz_swapped: f64,
    pub slack_tr1: f64,
    pub slack_tr2: f64,
    pub slack_tr: f64,
    pub slack_tmet: f64,
    pub slack_tmet_cauchy_schwarz: f64,
    pub tmet_exchange_term: f64,
    pub tmp_identity_residual: f64,
    pub slack_tmp: f64,
    pub slack_corrugl: f64,
    pub rhs_final_bound: f64,
    pub slack_thm51: f64,
    pub slack_displayed_bound: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CorrelationReport {
    /// Slacks that must be nonnegative, with their names.
    pub fn slacks(&self) -> [(&'static str, f64); 10] {
        [
            ("slack_thm44", self.slack_thm44),
            ("slack_fundsatz", self.slack_fundsatz),
            ("slack_fundsatz_swapped", self.slack_fundsatz_swapped),
            ("slack_tr1", self.slack_tr1),
            ("slack_tr2", self.slack_tr2),
            ("slack_tr", self.slack_tr),
            ("slack_tmet", self.slack_tmet),
            ("slack_tmp", self.slack_tmp),
            ("slack_corrugl", self.slack_corrugl),
            ("slack_thm51", self.slack_thm51),
        ]
    }

    pub fn worst_slack(&self) -> f64 {
        self.slacks().iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }
}

/// Runs the whole chain for one `(X, γ, Γ)`.
pub fn main_theorem_check<T: Real>(
    x: &CMat<T>,
    gamma: &OneBodyRdm<T>,
    gamma2: &TwoBodyRdm<T>,
    tol: f64,
) -> Result<CorrelationReport> {
    let split = split_projections(gamma);
    let d = decompose(x, &split, gamma2)?;
    let (a, b) = ab_parameters(x, gamma);
    let lhs = correlation_lhs(x, gamma, gamma2)?;
    let (f1, f2) = fundsatz_check(x, &split, gamma, gamma2);
    let [r1, r2, r] = bound_remainder(&d, a, b);
    let met = bound_met(x, &split, gamma, gamma2, &d);
    let (tmp_res, tmp) = bound_main_part(x, &split, gamma, gamma2, &d)?;
    let (af, bf, lf) = (to_f64(a), to_f64(b), to_f64(lhs));
    let mut report = CorrelationReport {
        a: af,
        b: bf,
        lhs: lf,
        t_mp: to_f64(d.t_mp),
        t_r1: to_f64(d.t_r1),
        t_r2: to_f64(d.t_r2),
        t_r: to_f64(d.t_r()),
        t_met: to_f64(d.t_met),
        hf_term: to_f64(hf_term(x, gamma)),
        decomposition_residual: to_f64((d.regrouped_sum() - d.total).abs()),
        slack_thm44: lf + bf,
        slack_fundsatz: to_f64(f1),
        slack_fundsatz_swapped: to_f64(f2),
        slack_tr1: to_f64(r1),
        slack_tr2: to_f64(r2),
        slack_tr: to_f64(r),
        slack_tmet: to_f64(met.slack),
        slack_tmet_cauchy_schwarz: to_f64(met.cauchy_schwarz_slack),
        tmet_exchange_term: to_f64(met.exchange_term),
        tmp_identity_residual: to_f64(tmp_res),
        slack_tmp: to_f64(tmp),
        slack_corrugl: lf + rhs_recombined(af, bf),
        rhs_final_bound: -rhs_final(af, bf),
        slack_thm51: lf + rhs_final(af, bf),
        slack_displayed_bound: lf + rhs_displayed(af, bf),
        tol,
        pass: false,
    };
    report.pass = report.worst_slack() >= -tol && report.slack_tmet_cauchy_schwarz >= -tol;
    Ok(report)
}

/// Summary of the numerical constant chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    pub sqrt94: f64,
    pub value_at_crossover: f64,
    pub identity_error: f64,
    pub limit_at_zero: f64,
    pub monotone: bool,
    pub crossover_consistent: bool,
    pub below_ten: bool,
    pub grid: Vec<[f64; 3]>,
}

/// Evaluates `f(a) = 38a + 2(8 + 32a²)^{1/2}` on `grid` (rows `[a, f(a), a·f(a)]`),
/// checks monotonicity, `f(1/√94) = √94`, `√94 < 10` and that
/// `a·f(a) ≤ 1 ⇔ a ≤ 1/√94` on the grid.
pub fn constant_chain(grid: &[f64]) -> ConstantChain {
    let sqrt94 = 94f64.sqrt();
    let crossover = 1.0 / sqrt94;
    let value = chain_constant(crossover);
    let rows: Vec<[f64; 3]> = grid.iter().map(|&a| [a, chain_constant(a), a * chain_constant(a)]).collect();
    let monotone = rows.windows(2).all(|w| w[1][1] > w[0][1]);
    let crossover_consistent = rows
        .iter()
        .all(|r| (r[2] <= 1.0 + 1e-12) == (r[0] <= crossover + 1e-15) || (r[0] - crossover).abs() < 1e-12);
    ConstantChain {
        sqrt94,
        value_at_crossover: value,
        identity_error: (value - sqrt94).abs(),
        limit_at_zero: chain_constant(0.0),
        monotone,
        crossover_consistent,
        below_ten: sqrt94 < 10.0,
        grid: rows,
    }
}

/// `k` evenly spaced points on `(0, 1/√94]`, ending exactly at `1/√94`.
pub fn default_grid(k: usize) -> Vec<f64> {
    let top = 1.0 / 94f64.sqrt();
    (1..=k).map(|i| top * i as f64 / k as f64).collect()
}

/// Constant obtained by rerunning the chain with the split at `t` instead
/// of ½: `P ≤ γ/t` and `P⊥ ≤ (1 − γ)/(1 − t)` replace the factors 2, which
/// gives `c_F = 1/(t(1 − t))` in the key inequality and
/// `a(K₁a + 2(2c_F(1 + c_F a²))^{1/2})` with
/// `K₁ = 2/(1 − t) + 8c_F + 1/t` for the combined bound. Returns the
/// value of the bracket at the crossover where the bound reaches 1.
pub fn threshold_constant(t: f64) -> f64 {
    let cf = 1.0 / (t * (1.0 - t));
    let k1 = 2.0 / (1.0 - t) + 8.0 * cf + 1.0 / t;
    let bracket = |a: f64| k1 * a + 2.0 * (2.0 * cf * (1.0 + cf * a * a)).sqrt();
    // a·bracket(a) is increasing from 0; bisect a·bracket(a) = 1
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi * bracket(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * bracket(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    bracket(0.5 * (lo + hi))
}

/// State whose `γ` has eigenvalue exactly ½ four times: the normalized sum
/// of two Slater determinants sharing `N − 2` orbitals and differing in the
/// remaining two, in a random orbital basis. Needs `2 ≤ N` and `N + 2 ≤ n`.
pub fn boundary_state<T: Real>(basis: &FockBasis, particles: usize, seed: u64) -> Result<StateVector<T>> {
    let n = basis.n_modes();
    if particles < 2 || particles + 2 > n {
        return Err(Error::ParticleNumber { particles, n_modes: n });
    }
    let u = random_unitary::<T>(n, seed);
    let orb = |j: usize| u.column(j).iter().copied().collect::<Vec<_>>();
    let core: Vec<_> = (0..particles - 2).map(orb).collect();
    let mut first = core.clone();
    first.extend([orb(particles - 2), orb(particles - 1)]);
    let mut second = core;
    second.extend([orb(particles), orb(particles + 1)]);
    let s1 = slater_state(&first, basis)?;
    let s2 = slater_state(&second, basis)?;
    let w = real(lit::<T>(std::f64::consts::FRAC_1_SQRT_2));
    StateVector::new(basis, (s1.amplitudes() + s2.amplitudes()) * w)?.normalized()
}

/// Kind of state used in an ensemble trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialState {
    Pure,
    Mixed,
    Boundary,
}

/// Builds the state of one ensemble trial: a random pure state, a random
/// rank-3 mixture (rank capped by the sector dimension) or a
/// [`boundary_state`].
pub fn trial_state<T: Real>(basis: &FockBasis, particles: usize, kind: TrialState, seed: u64) -> Result<DensityMatrix<T>> {
    match kind {
        TrialState::Pure => states::pure_state(&states::random_pure(basis, particles, seed)?),
        TrialState::Mixed => {
            let rank = basis.sector_dim(particles).min(3);
            states::random_mixed(basis, particles, rank, seed)
        }
        TrialState::Boundary => states::pure_state(&boundary_state(basis, particles, seed)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn diag(v: &[f64]) -> OneBodyRdm<f64> {
        let n = v.len();
        OneBodyRdm::new(CMat::from_fn(n, n, |i, j| if i == j { cx(v[i], 0.0) } else { cx(0.0, 0.0) })).unwrap()
    }

    #[test]
    fn split_examples() {
        let s = split_projections(&diag(&[1.0, 1.0, 0.0, 0.0]));
        assert!(linalg::max_abs_diff(&s.p, &diag(&[1.0, 1.0, 0.0, 0.0]).matrix) < 1e-15);
        let s = split_projections(&diag(&[0.5; 3]));
        assert_eq!(linalg::max_abs(&s.p), 0.0);
        assert_eq!(s.p_perp, linalg::identity(3));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn projection_edge_ranks() {
        assert_eq!(random_projection::<f64>(4, 0, 1).unwrap(), CMat::zeros(4, 4));
        assert_eq!(random_projection::<f64>(4, 4, 1).unwrap(), linalg::identity(4));
        let x = random_projection::<f64>(5, 1, 9).unwrap();
        assert!((x.trace().re - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&(&x * &x), &x) < 1e-12);
        assert!(random_projection::<f64>(3, 4, 1).is_err());
    }

    #[test]
    fn constant_chain_values() {
        let c = constant_chain(&default_grid(1000));
        assert!(c.identity_error < 1e-12);
        assert!((c.value_at_crossover - 9.695359714832659).abs() < 1e-12);
        assert!((c.limit_at_zero - 2.0 * 8f64.sqrt()).abs() < 1e-15);
        assert!(c.monotone && c.crossover_consistent && c.below_ten);
    }

    #[test]
    fn threshold_constant_at_half_is_sqrt94() {
        assert!((threshold_constant(0.5) - 94f64.sqrt()).abs() < 1e-9);
        assert!(threshold_constant(0.3) > threshold_constant(0.5));
    }

    #[test]
    fn boundary_state_has_half_eigenvalues() {
        let b = FockBasis::new(5).unwrap();
        let rho = states::pure_state(&boundary_state::<f64>(&b, 3, 3).unwrap()).unwrap();
        let ev = rdm::one_pdm(&rho).eigenvalues();
        let want = [0.5, 0.5, 0.5, 0.5, 1.0];
        for (e, w) in ev.iter().zip(want) {
            assert!((e - w).abs() < 1e-12);
        }
    }

    #[test]
    fn x_zero_gives_zero_terms() {
        let b = FockBasis::new(4).unwrap();
        let rho = states::random_mixed::<f64>(&b, 2, 2, 1).unwrap();
        let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
        let x = CMat::zeros(4, 4);
        let r = main_theorem_check(&x, &g, &gg, SLACK_TOL).unwrap();
        assert_eq!((r.lhs, r.t_mp, r.t_r, r.t_met, r.slack_thm51), (0.0, 0.0, 0.0, 0.0, 0.0));
        let (l, rr) = b_operator_identity(&x, &split_projections(&g).p, &g, &gg);
        assert_eq!((l, rr), (0.0, 0.0));
    }

    #[test]
    fn chain_holds_on_random_trials() {
        let b = FockBasis::new(6).unwrap();
        let mut worst = f64::INFINITY;
        for seed in 0..30u64 {
            for kind in [TrialState::Pure, TrialState::Mixed, TrialState::Boundary] {
                let rho = trial_state::<f64>(&b, 3, kind, seed).unwrap();
                let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
                let x = random_projection::<f64>(6, 1 + (seed as usize % 5), seed).unwrap();
                let r = main_theorem_check(&x, &g, &gg, SLACK_TOL).unwrap();
                assert!(r.pass, "{kind:?} {seed} {r:?}");
                assert!(r.tmet_exchange_term < 1e-12);
                worst = worst.min(r.worst_slack());
                let q = split_projections(&g).p;
                let (l, rr) = b_operator_identity(&x, &q, &g, &gg);
                assert!((l - rr).abs() < 1e-10, "{l} {rr}");
            }
        }
        assert!(worst >= -SLACK_TOL);
    }

    #[test]
    fn b_operator_identity_random_projections() {
        let b = FockBasis::new(5).unwrap();
        for seed in 0..10u64 {
            let rho = trial_state::<f64>(&b, 2, TrialState::Mixed, seed).unwrap();
            let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
            let y = random_projection::<f64>(5, 1 + (seed as usize * 7) % 5, seed + 200).unwrap();
            let q = random_projection::<f64>(5, 1 + seed as usize % 4, seed + 100).unwrap();
            let (l, r) = b_operator_identity(&y, &q, &g, &gg);
            assert!((l - r).abs() < 1e-10, "{l} {r}");
        }
    }
}
