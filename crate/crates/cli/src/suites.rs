//! The verification suites behind each subcommand. Rows are built in trial
//! order regardless of how the worker pool schedules them, so a given
//! `(command, config)` always produces the same bytes.

use rayon::prelude::*;
use serde::Serialize;

use rdmlab::conditions::{self, ConditionReport};
use rdmlab::correlation::{self, CorrelationReport, TrialState};
use rdmlab::energy::{self, EnergyReport, HartreeFockConfig, ModelHamiltonian, RelaxationConfig};
use rdmlab::fdl::{self, FdlQuadrature};
use rdmlab::fock::{self, FockBasis, FockOperator};
use rdmlab::rng::child_seed;
use rdmlab::{rdm, states, DensityMatrix64, FockOperator64};

use crate::{CliError, SweepConfig};

pub const CAR_TOL: f64 = 1e-14;
pub const FDL_TOL: f64 = 1e-6;
pub const HIL_TOL: f64 = 1e-9;
/// Tolerance at which relaxation certificates must pass the conditions.
pub const CERTIFICATE_TOL: f64 = 1e-7;

/// Rendered report plus the names of failed checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOutput {
    /// One JSON object per entry.
    pub rows: Vec<String>,
    /// Header and rows, for commands with a CSV form.
    pub csv: Option<Vec<String>>,
    pub failures: Vec<String>,
    pub summary: String,
}

impl SuiteOutput {
    fn push<R: Serialize>(&mut self, row: &R) {
        self.rows.push(serde_json::to_string(row).expect("report rows serialize"));
    }
}

#[derive(Debug, Serialize)]
struct CarRow {
    check: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    max_abs_err: f64,
    tol: f64,
    ok: bool,
}


fn creation_operators(basis: &FockBasis) -> Result<Vec<FockOperator64>, CliError> {
    #[allow(unused_mut)]
    let mut ops = (0..basis.n_modes())
        .map(|k| fock::creation::<f64>(k, basis))
        .collect::<Result<Vec<_>, _>>()?;
    #[cfg(test)]
    if fault::SIGN_FLIP.with(|f| f.get()) {
        let k = basis.n_modes() - 1;
        ops[k] = FockOperator::from_column_fn(basis, |j, out| {
            let mask = basis.mask(j);
            if mask >> k & 1 == 0 {
                out.push((basis.index_of(mask | 1 << k), rdmlab::Cx::new(1.0, 0.0)));
            }
        });
    }
    Ok(ops)
}

/// Anticommutation relations, adjointness and number operator identities,
/// one row per identity.
pub fn car_suite(cfg: &SweepConfig) -> Result<SuiteOutput, CliError> {
    let basis = FockBasis::new(cfg.modes)?;
    let n = cfg.modes;
    let create = creation_operators(&basis)?;
    let annihilate = (0..n)
        .map(|k| fock::annihilation::<f64>(k, &basis))
        .collect::<Result<Vec<_>, _>>()?;
    let id = FockOperator::identity(&basis);
    let zero = FockOperator::zeros(&basis);
    let tol = cfg.tol;
    let mut rows = Vec::new();
    let mut row = |check, i, j, err: f64| {
        rows.push(CarRow {
            check,
            i,
            j,
            max_abs_err: err,
            tol,
            ok: err < tol,
        })
    };
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { &id } else { &zero };
            let err = annihilate[i].anticommutator(&create[j]).max_abs_diff(want);
            row("anticommutator_annihilate_create", Some(i), Some(j), err);
        }
    }
    for i in 0..n {
        for j in i..n {
            row("anticommutator_create_create", Some(i), Some(j), create[i].anticommutator(&create[j]).max_abs());
            row(
                "anticommutator_annihilate_annihilate",
                Some(i),
                Some(j),
                annihilate[i].anticommutator(&annihilate[j]).max_abs(),
            );
        }
    }
    for k in 0..n {
        row("annihilation_is_adjoint", Some(k), None, create[k].adjoint().max_abs_diff(&annihilate[k]));
    }
    let mut number = zero.clone();
    for k in 0..n {
        number = number.add(&create[k].mul(&annihilate[k]));
    }
    row("number_operator_spectrum", None, None, number.max_abs_diff(&fock::number_operator(&basis)));
    for k in 0..n {
        row("number_commutator_create", Some(k), None, number.commutator(&create[k]).max_abs_diff(&create[k]));
    }
    let mut out = SuiteOutput::default();
    for r in &rows {
        out.push(r);
        if !r.ok {
            let ij = match (r.i, r.j) {
                (Some(i), Some(j)) => format!(" ({i}, {j})"),
                (Some(i), None) => format!(" ({i})"),
                _ => String::new(),
            };
            out.failures.push(format!("{}{} error {:e}", r.check, ij, r.max_abs_err));
        }
    }
    out.summary = format!("verify-car: {} identities, {} failed", rows.len(), out.failures.len());
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
enum ConditionKind {
    Pure,
    Mixed,
    Signed,
}

#[derive(Debug, Serialize)]
struct PolynomialVerdict {
    witness_min: f64,
    random_min: f64,
    random_polynomials: usize,
    polynomial_pass: bool,
    condition_pass: bool,
    agree: bool,
    dual_failure: bool,
}

#[derive(Debug, Serialize)]
struct ConditionRow {
    check: &'static str,
    trial: usize,
    kind: ConditionKind,
    seed: u64,
    #[serde(flatten)]
    report: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    polynomial: Option<PolynomialVerdict>,
    ok: bool,
}

fn condition_trial(cfg: &SweepConfig, basis: &FockBasis, trial: usize) -> rdmlab::Result<ConditionRow> {
    let seed = child_seed(cfg.seed, trial as u64);
    let dim = basis.sector_dim(cfg.particles);
    let kind = match trial % 4 {
        2 => ConditionKind::Mixed,
        3 if dim >= 2 => ConditionKind::Signed,
        _ => ConditionKind::Pure,
    };
    let rho: DensityMatrix64 = match kind {
        ConditionKind::Pure => states::pure_state(&states::random_pure(basis, cfg.particles, seed)?)?,
        ConditionKind::Mixed => states::random_mixed(basis, cfg.particles, dim.min(3), seed)?,
        ConditionKind::Signed => states::signed_trace_one(basis, cfg.particles, seed)?,
    };
    if let ConditionKind::Signed = kind {
        let chk = conditions::representability_check(&rho, conditions::RANDOM_POLYNOMIALS, seed, cfg.tol)?;
        let agree = chk.agree();
        return Ok(ConditionRow {
            check: "condition_polynomial_agreement",
            trial,
            kind,
            seed,
            report: chk.conditions,
            polynomial: Some(PolynomialVerdict {
                witness_min: chk.witness_min,
                random_min: chk.random_min,
                random_polynomials: conditions::RANDOM_POLYNOMIALS,
                polynomial_pass: chk.polynomial_pass,
                condition_pass: chk.condition_pass,
                agree,
                dual_failure: !chk.polynomial_pass && !chk.condition_pass,
            }),
            ok: agree && !chk.contradiction(),
        });
    }
    let details = conditions::evaluate_conditions(&rdm::one_pdm(&rho), &rdm::two_pdm(&rho), cfg.particles, cfg.tol);
    Ok(ConditionRow {
        check: "representable_state_conditions",
        trial,
        kind,
        seed,
        report: details.report,
        polynomial: None,
        ok: details.report.pass,
    })
}

#[derive(Debug, Serialize)]
struct ConditionSummary {
    check: &'static str,
    trials: usize,
    failures: usize,
    signed_trials: usize,
    dual_failures: usize,
    worst_p_min_eig: f64,
    worst_g_min_eig: f64,
    worst_q_min_eig: f64,
    ok: bool,
}

/// Conditions on random pure and mixed states (every fourth trial is a
/// signed trace-one operator checked for agreement between the condition
/// matrices and polynomial positivity).
pub fn conditions_suite(cfg: &SweepConfig) -> Result<SuiteOutput, CliError> {
    let basis = FockBasis::new(cfg.modes)?;
    basis.check_particles(cfg.particles)?;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| condition_trial(cfg, &basis, t))
        .collect::<rdmlab::Result<Vec<_>>>()?;
    let mut out = SuiteOutput::default();
    let mut worst = [f64::INFINITY; 3];
    let (mut signed, mut dual) = (0, 0);
    for r in &rows {
        out.push(r);
        match &r.polynomial {
            Some(p) => {
                signed += 1;
                dual += usize::from(p.dual_failure);
            }
            None => {
                worst[0] = worst[0].min(r.report.p_min_eig);
                worst[1] = worst[1].min(r.report.g_min_eig);
                worst[2] = worst[2].min(r.report.q_min_eig);
            }
        }
        if !r.ok {
            out.failures.push(format!("{} trial {} ({:?})", r.check, r.trial, r.kind));
        }
    }
    let summary = ConditionSummary {
        check: "summary",
        trials: rows.len(),
        failures: out.failures.len(),
        signed_trials: signed,
        dual_failures: dual,
        worst_p_min_eig: worst[0],
        worst_g_min_eig: worst[1],
        worst_q_min_eig: worst[2],
        ok: out.failures.is_empty(),
    };
    out.push(&summary);
    out.summary = format!(
        "verify-conditions: {} trials, {} failed, {} signed with {} dual failures",
        rows.len(),
        out.failures.len(),
        signed,
        dual
    );
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    pub check: &'static str,
    pub trial: usize,
    pub kind: TrialState,
    pub n: usize,
    pub particles: usize,
    pub rank: usize,
    pub seed: u64,
    /// Eigenvalues of `γ` within `1e-9` of ½.
    pub half_eigenvalues: usize,
    pub hil_lhs: f64,
    pub hil_rhs: f64,
    pub hil_residual: f64,
    #[serde(flatten)]
    pub report: CorrelationReport,
    pub ok: bool,
}

/// One ensemble member: state of the requested kind (boundary states fall
/// back to pure ones when `N + 2 > n`), a Haar projection `X` of the given
/// rank, and an independent `(Y, Q)` projection pair for the `B` identity.
pub fn correlation_trial(
    basis: &FockBasis,
    particles: usize,
    kind: TrialState,
    rank: usize,
    seed: u64,
    tol: f64,
) -> rdmlab::Result<CorrelationRow> {
    let n = basis.n_modes();
    let kind = match kind {
        TrialState::Boundary if particles < 2 || particles + 2 > n => TrialState::Pure,
        k => k,
    };
    let rho = correlation::trial_state::<f64>(basis, particles, kind, seed)?;
    let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
    let x = correlation::random_projection::<f64>(n, rank, child_seed(seed, 1))?;
    let y = correlation::random_projection::<f64>(n, 1 + (seed % n as u64) as usize, child_seed(seed, 2))?;
    let q = correlation::random_projection::<f64>(n, (seed / 7 % (n as u64 + 1)) as usize, child_seed(seed, 3))?;
    let (hil_lhs, hil_rhs) = correlation::b_operator_identity(&y, &q, &g, &gg);
    let hil_residual = (hil_lhs - hil_rhs).abs();
    let report = correlation::main_theorem_check(&x, &g, &gg, tol)?;
    let half_eigenvalues = g.eigenvalues().iter().filter(|l| (*l - 0.5).abs() < 1e-9).count();
    Ok(CorrelationRow {
        check: "correlation_chain",
        trial: 0,
        kind,
        n,
        particles,
        rank,
        seed,
        half_eigenvalues,
        hil_lhs,
        hil_rhs,
        hil_residual,
        ok: report.pass && hil_residual < HIL_TOL && report.decomposition_residual < correlation::IDENTITY_TOL,
        report,
    })
}

#[derive(Debug, Serialize)]
struct WorstSlackRow {
    check: &'static str,
    bound: &'static str,
    value: f64,
    trial: usize,
    ok: bool,
}

#[derive(Debug, Serialize)]
struct ChainRow {
    check: &'static str,
    a: f64,
    constant: f64,
    a_times_constant: f64,
}

#[derive(Debug, Serialize)]
struct ChainSummary {
    check: &'static str,
    sqrt94: f64,
    value_at_crossover: f64,
    identity_error: f64,
    limit_at_zero: f64,
    grid_points: usize,
    monotone: bool,
    crossover_consistent: bool,
    sqrt94_below_ten: bool,
    ok: bool,
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    check: &'static str,
    t: f64,
    constant: f64,
}

#[derive(Debug, Serialize)]
struct DisplayedBoundRow {
    check: &'static str,
    /// Smallest `lhs + b·min{1, 38a² + 4(a²(2 + 8a⁴))^{1/2}}` over the trials.
    min_slack: f64,
    violations: usize,
    implied_by_ensemble: bool,
    min_recombined_slack: f64,
}

/// The correlation chain on `cfg.trials` members cycling through pure,
/// mixed and boundary states, followed by worst slacks, the constant table
/// and the threshold sweep.
pub fn correlation_suite(cfg: &SweepConfig) -> Result<SuiteOutput, CliError> {
    let basis = FockBasis::new(cfg.modes)?;
    basis.check_particles(cfg.particles)?;
    let kinds = [TrialState::Pure, TrialState::Mixed, TrialState::Boundary];
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let rank = cfg.rank.unwrap_or(1 + t % cfg.modes);
            let mut row = correlation_trial(
                &basis,
                cfg.particles,
                kinds[t % 3],
                rank,
                child_seed(cfg.seed, t as u64),
                cfg.tol,
            )?;
            row.trial = t;
            Ok(row)
        })
        .collect::<rdmlab::Result<Vec<_>>>()?;
    let mut out = SuiteOutput::default();
    for r in &rows {
        out.push(r);
        if !r.ok {
            let (name, v) = r
                .report
                .slacks()
                .into_iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("slack list is not empty");
            out.failures.push(format!(
                "correlation trial {} ({:?}): worst {name} = {v:e}, B identity residual {:e}",
                r.trial, r.kind, r.hil_residual
            ));
        }
    }
    let extra = summary_rows(&mut out, &rows, cfg.tol);
    out.failures.extend(extra);
    let boundary = rows.iter().filter(|r| r.half_eigenvalues > 0).count();
    out.summary = format!(
        "verify-correlation: {} trials ({} with eigenvalue ½), {} failed",
        rows.len(),
        boundary,
        out.failures.len()
    );
    Ok(out)
}

/// Worst-slack, constant-chain, threshold and displayed-bound rows; returns
/// failure messages.
fn summary_rows(out: &mut SuiteOutput, rows: &[CorrelationRow], tol: f64) -> Vec<String> {
    let mut failures = Vec::new();
    if let Some(first) = rows.first() {
        for (idx, (name, _)) in first.report.slacks().iter().enumerate() {
            let (trial, value) = rows
                .iter()
                .map(|r| (r.trial, r.report.slacks()[idx].1))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("rows are not empty");
            out.push(&WorstSlackRow {
                check: "worst_slack",
                bound: name,
                value,
                trial,
                ok: value >= -tol,
            });
        }
        let min_slack = rows.iter().map(|r| r.report.slack_displayed_bound).fold(f64::INFINITY, f64::min);
        let violations = rows.iter().filter(|r| r.report.slack_displayed_bound < -tol).count();
        out.push(&DisplayedBoundRow {
            check: "displayed_bound_reading",
            min_slack,
            violations,
            implied_by_ensemble: violations == 0,
            min_recombined_slack: rows.iter().map(|r| r.report.slack_corrugl).fold(f64::INFINITY, f64::min),
        });
    }
    let chain = correlation::constant_chain(&correlation::default_grid(1000));
    for k in 1..=10 {
        let a = correlation::default_grid(10)[k - 1];
        let c = correlation::chain_constant(a);
        out.push(&ChainRow {
            check: "constant_chain",
            a,
            constant: c,
            a_times_constant: a * c,
        });
    }
    let chain_ok = chain.identity_error < 1e-12 && chain.monotone && chain.crossover_consistent && chain.below_ten;
    out.push(&ChainSummary {
        check: "constant_chain_summary",
        sqrt94: chain.sqrt94,
        value_at_crossover: chain.value_at_crossover,
        identity_error: chain.identity_error,
        limit_at_zero: chain.limit_at_zero,
        grid_points: chain.grid.len(),
        monotone: chain.monotone,
        crossover_consistent: chain.crossover_consistent,
        sqrt94_below_ten: chain.below_ten,
        ok: chain_ok,
    });
    if !chain_ok {
        failures.push("constant chain".to_string());
    }
    for k in 1..20 {
        let t = k as f64 * 0.05;
        out.push(&ThresholdRow {
            check: "threshold_sweep",
            t,
            constant: correlation::threshold_constant(t),
        });
    }
    failures
}

#[derive(Debug, Serialize)]
struct FdlJsonRow {
    check: &'static str,
    #[serde(flatten)]
    row: fdl::FdlRow,
    tol: f64,
    ok: bool,
}

/// `(d, computed, expected, abs_err)` for each separation.
pub fn fdl_suite(ds: &[f64], quad: &FdlQuadrature, tol: f64) -> Result<SuiteOutput, CliError> {
    let mut out = SuiteOutput::default();
    let mut csv = vec!["d,computed,expected,abs_err".to_string()];
    for &d in ds {
        let row = fdl::fdl_row(d, quad).map_err(|e| CliError::Usage(e.to_string()))?;
        let ok = row.abs_err < tol;
        csv.push(format!("{},{},{},{}", row.d, row.computed, row.expected, row.abs_err));
        out.push(&FdlJsonRow {
            check: "fdl_radial_integral",
            row,
            tol,
            ok,
        });
        if !ok {
            out.failures.push(format!("fdl d = {d}: error {:e}", row.abs_err));
        }
    }
    out.csv = Some(csv);
    out.summary = format!("fdl: {} separations, {} failed", ds.len(), out.failures.len());
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct EnergyRow {
    pub check: &'static str,
    #[serde(flatten)]
    pub report: EnergyReport,
    /// Conditions at [`CERTIFICATE_TOL`] for the relaxation minimizer.
    pub certificate: ConditionReport,
    pub ok: bool,
}

pub fn energy_row(
    model: &ModelHamiltonian<f64>,
    particles: usize,
    hf: &HartreeFockConfig,
    seed: u64,
    tol: f64,
) -> rdmlab::Result<EnergyRow> {
    let run = energy::energy_report(model, particles, hf, &RelaxationConfig::default(), seed, tol)?;
    let certificate = if particles >= 2 {
        conditions::evaluate_conditions(&run.relaxation.gamma, &run.relaxation.gamma2, particles, CERTIFICATE_TOL).report
    } else {
        let a = conditions::check_admissible(&run.relaxation.gamma, &run.relaxation.gamma2, particles, CERTIFICATE_TOL);
        ConditionReport {
            admissible: a.pass,
            p_min_eig: 0.0,
            g_min_eig: 0.0,
            q_min_eig: 0.0,
            tol: CERTIFICATE_TOL,
            pass: a.pass,
        }
    };
    let ok = run.report.ordering_holds && run.report.relax_converged && certificate.pass;
    Ok(EnergyRow {
        check: "energy_ordering",
        report: run.report,
        certificate,
        ok,
    })
}

pub fn energy_suite(
    model: &ModelHamiltonian<f64>,
    particles: usize,
    hf: &HartreeFockConfig,
    seed: u64,
    tol: f64,
) -> Result<SuiteOutput, CliError> {
    let row = energy_row(model, particles, hf, seed, tol)?;
    let mut out = SuiteOutput::default();
    out.push(&row);
    let r = &row.report;
    if !r.ordering_holds {
        out.failures.push(format!(
            "energy ordering: e_relax {} e_gs {} e_hf {}",
            r.e_relax, r.e_gs, r.e_hf
        ));
    }
    if !r.relax_converged {
        out.failures.push(format!("relaxation cone violation {:e}", r.residuals.relax_cone_violation));
    }
    if !row.certificate.pass {
        out.failures.push("relaxation certificate fails the conditions".into());
    }
    if !r.hf_converged {
        eprintln!("note: Hartree–Fock stationarity {:e} above threshold", r.residuals.hf_stationarity);
    }
    out.summary = format!("energy: e_relax {:.9} ≤ e_gs {:.9} ≤ e_hf {:.9}", r.e_relax, r.e_gs, r.e_hf);
    Ok(out)
}
