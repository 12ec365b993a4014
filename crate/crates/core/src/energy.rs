//! Model Hamiltonians on a finite mode set and three energies for them:
//! the exact ground state energy, a Hartree–Fock upper bound and a lower
//! bound from relaxing representability to the P, G and Q conditions.

mod hartree_fock;
mod relaxation;

pub use hartree_fock::{hartree_fock, hf_energy, project_occupations, HartreeFockConfig, HartreeFockResult};
pub use relaxation::{relaxed_lower_bound, RelaxationConfig, RelaxationResult};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockOperator, Ladder};
use crate::linalg::{self, pair, CMat};
use crate::rdm::{OneBodyRdm, TwoBodyRdm};
use crate::rng::{self, Purpose};
use crate::scalar::{lit, real, to_f64, Cx, Real};
use crate::states::StateVector;

/// Largest sector handled by the dense eigensolver.
pub const SECTOR_CAP: usize = 4000;
/// Hermiticity tolerance for model input.
pub const MODEL_TOL: f64 = 1e-12;
/// Tolerance of the ordering `E_relax ≤ E_gs ≤ E_hf`.
pub const ORDERING_TOL: f64 = 1e-6;

/// `Ĥ = Σ h_{kl} c*_k c_l + ½ Σ V_{kl;mn} c*_l c*_k c_m c_n` with `V` stored
/// as an `n² × n²` matrix indexed by pairs `(k,l)`, `(m,n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelHamiltonian<T: Real> {
    pub h: CMat<T>,
    pub v: CMat<T>,
}

impl<T: Real> ModelHamiltonian<T> {
    pub fn new(h: CMat<T>, v: CMat<T>) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: h.ncols(),
            });
        }
        if v.nrows() != n * n || v.ncols() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: v.nrows(),
            });
        }
        for (what, m) in [("h is not Hermitian", &h), ("V is not Hermitian on h⊗h", &v)] {
            let defect = to_f64(linalg::max_abs_diff(m, &m.adjoint()));
            if defect > MODEL_TOL {
                return Err(Error::Consistency { what, residue: defect });
            }
        }
        Ok(ModelHamiltonian { h, v })
    }

    pub fn non_interacting(h: CMat<T>) -> Result<Self> {
        let n = h.nrows();
        Self::new(h, CMat::zeros(n * n, n * n))
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn is_interacting(&self) -> bool {
        linalg::max_abs(&self.v) > T::zero()
    }

    /// Open chain with hopping `−t`, on-site energies `onsite` and
    /// nearest-neighbour repulsion `u·n_k n_{k+1}`.
    pub fn chain(onsite: &[f64], t: f64, u: f64) -> Result<Self> {
        let n = onsite.len();
        let mut h = CMat::zeros(n, n);
        let mut v = CMat::zeros(n * n, n * n);
        for k in 0..n {
            h[(k, k)] = real(lit(onsite[k]));
            if k + 1 < n {
                h[(k, k + 1)] = real(lit(-t));
                h[(k + 1, k)] = real(lit(-t));
                v[(pair(n, k, k + 1), pair(n, k, k + 1))] = real(lit(u));
                v[(pair(n, k + 1, k), pair(n, k + 1, k))] = real(lit(u));
            }
        }
        Self::new(h, v)
    }

    /// Density-density repulsion `½ Σ_{k≠l} U_{kl} n_k n_l` with
    /// `U_{kl} = U_{lk}` uniform in `[0, strength]`, on top of a random
    /// Hermitian `h` with entries of unit scale.
    pub fn random_repulsive(n: usize, strength: f64, seed: u64) -> Result<Self> {
        let mut r = rng::stream(seed, Purpose::Model);
        let a = rng::complex_matrix::<T, _>(n, n, &mut r);
        let h = linalg::hermitian_part(&a);
        let mut v = CMat::zeros(n * n, n * n);
        for k in 0..n {
            for l in k + 1..n {
                let u = real(lit::<T>(strength * r.random::<f64>()));
                v[(pair(n, k, l), pair(n, k, l))] = u;
                v[(pair(n, l, k), pair(n, l, k))] = u;
            }
        }
        Self::new(h, v)
    }

    /// Random Hermitian `h` and `V = strength·BB*/n²` with Gaussian `B`.
    pub fn random_positive(n: usize, strength: f64, seed: u64) -> Result<Self> {
        let mut r = rng::stream(seed, Purpose::Model);
        let a = rng::complex_matrix::<T, _>(n, n, &mut r);
        let b = rng::complex_matrix::<T, _>(n * n, n * n, &mut r);
        let v = &b * b.adjoint() * real(lit::<T>(strength / (n * n) as f64));
        Self::new(linalg::hermitian_part(&a), linalg::hermitian_part(&v))
    }
}

/// Entry of the model file; real numbers or `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(f64),
    Complex([f64; 2]),
}

impl JsonScalar {
    fn value(self) -> (f64, f64) {
        match self {
            JsonScalar::Real(x) => (x, 0.0),
            JsonScalar::Complex([re, im]) => (re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VEntry {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Model file `{n, h, V: [{k, l, m, n, re, im}]}`; repeated `V` entries add up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub n: usize,
    pub h: Vec<Vec<JsonScalar>>,
    #[serde(rename = "V", default)]
    pub v: Vec<VEntry>,
}

impl ModelJson {
    pub fn from_model<T: Real>(model: &ModelHamiltonian<T>) -> Self {
        let n = model.n();
        let entry = |z: Cx<T>| {
            let (re, im) = (to_f64(z.re), to_f64(z.im));
            if im == 0.0 {
                JsonScalar::Real(re)
            } else {
                JsonScalar::Complex([re, im])
            }
        };
        let h = (0..n).map(|i| (0..n).map(|j| entry(model.h[(i, j)])).collect()).collect();
        let mut v = Vec::new();
        for i in 0..n * n {
            for j in 0..n * n {
                let z = model.v[(i, j)];
                if z.re != T::zero() || z.im != T::zero() {
                    v.push(VEntry {
                        k: i / n,
                        l: i % n,
                        m: j / n,
                        n: j % n,
                        re: to_f64(z.re),
                        im: to_f64(z.im),
                    });
                }
            }
        }
        ModelJson { n, h, v }
    }

    pub fn to_model<T: Real>(&self) -> Result<ModelHamiltonian<T>> {
        let n = self.n;
        if n == 0 || n > crate::fock::MAX_MODES {
            return Err(Error::ModeCount(n));
        }
        if self.h.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.h.len(),
            });
        }
        let mut h = CMat::zeros(n, n);
        for (i, row) in self.h.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                let (re, im) = z.value();
                h[(i, j)] = Cx::new(lit(re), lit(im));
            }
        }
        let mut v = CMat::zeros(n * n, n * n);
        for e in &self.v {
            for idx in [e.k, e.l, e.m, e.n] {
                if idx >= n {
                    return Err(Error::ModeIndex { index: idx, n_modes: n });
                }
            }
            v[(pair(n, e.k, e.l), pair(n, e.m, e.n))] += Cx::new(lit(e.re), lit(e.im));
        }
        ModelHamiltonian::new(h, v)
    }
}

/// Fock-space matrix of `Ĥ`.
pub fn assemble_hamiltonian<T: Real>(model: &ModelHamiltonian<T>, basis: &FockBasis) -> Result<FockOperator<T>> {
    let n = model.n();
    if n != basis.n_modes() {
        return Err(Error::Dimension {
            expected: basis.n_modes(),
            got: n,
        });
    }
    use Ladder::{Annihilate as A, Create as C};
    let half = real(lit::<T>(0.5));
    let mut words = Vec::new();
    for k in 0..n {
        for l in 0..n {
            let z = model.h[(k, l)];
            if z.re != T::zero() || z.im != T::zero() {
                words.push((z, vec![C(k), A(l)]));
            }
        }
    }
    for i in 0..n * n {
        for j in 0..n * n {
            let z = model.v[(i, j)];
            if z.re != T::zero() || z.im != T::zero() {
                let (k, l, m, nn) = (i / n, i % n, j / n, j % n);
                words.push((z * half, vec![C(l), C(k), A(m), A(nn)]));
            }
        }
    }
    Ok(FockOperator::from_words(basis, &words))
}

/// `tr(hγ) + ½ tr(VΓ)`.
pub fn energy_functional<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>, model: &ModelHamiltonian<T>) -> Result<T> {
    let n = model.n();
    if gamma.n() != n || gamma2.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: gamma.n(),
        });
    }
    let e = (&model.h * &gamma.matrix).trace() + (&model.v * &gamma2.matrix).trace() * real(lit::<T>(0.5));
    let im = to_f64(e.im).abs();
    if im > 1e-10 * to_f64(e.re).abs().max(1.0) {
        return Err(Error::Consistency {
            what: "energy functional has an imaginary part",
            residue: im,
        });
    }
    Ok(e.re)
}

/// Lowest eigenpair of `Ĥ` in the `N`-particle sector.
pub fn exact_ground_state<T: Real>(model: &ModelHamiltonian<T>, particles: usize) -> Result<(T, StateVector<T>)> {
    let basis = FockBasis::new(model.n())?;
    basis.check_particles(particles)?;
    let dim = basis.sector_dim(particles);
    if dim > SECTOR_CAP {
        return Err(Error::SectorTooLarge { dim, cap: SECTOR_CAP });
    }
    let hamiltonian = assemble_hamiltonian(model, &basis)?;
    let (values, vectors) = linalg::eigh(&hamiltonian.sector_block(particles));
    let psi = StateVector::from_sector(&basis, particles, &vectors.column(0).into_owned())?;
    Ok((values[0], psi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGaps {
    /// `E_gs − E_relax`, nonnegative up to solver tolerance.
    pub gs_minus_relax: f64,
    /// `E_hf − E_gs`, nonnegative up to solver tolerance.
    pub hf_minus_gs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResiduals {
    pub relax_primal: f64,
    pub relax_dual: f64,
    /// Largest negative part of a constraint eigenvalue at the certificate.
    pub relax_cone_violation: f64,
    pub hf_stationarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyIterations {
    pub hf: usize,
    pub relax: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: usize,
    pub particles: usize,
    pub e_gs: f64,
    pub e_hf: f64,
    pub e_relax: f64,
    pub gaps: EnergyGaps,
    pub residuals: EnergyResiduals,
    pub iterations: EnergyIterations,
    pub hf_converged: bool,
    pub relax_converged: bool,
    pub tol: f64,
    /// `E_relax ≤ E_gs + tol ≤ E_hf + tol`.
    pub ordering_holds: bool,
}

/// Output of [`energy_report`] with the minimizers.
#[derive(Debug, Clone)]
pub struct EnergyRun<T: Real> {
    pub report: EnergyReport,
    pub ground_state: StateVector<T>,
    pub hartree_fock: HartreeFockResult<T>,
    pub relaxation: RelaxationResult<T>,
}

pub fn energy_report<T: Real>(
    model: &ModelHamiltonian<T>,
    particles: usize,
    hf: &HartreeFockConfig,
    relax: &RelaxationConfig,
    seed: u64,
    tol: f64,
) -> Result<EnergyRun<T>> {
    let (e_gs, psi) = exact_ground_state(model, particles)?;
    let hf_run = hartree_fock(model, particles, hf, seed)?;
    let relax_run = relaxed_lower_bound(model, particles, relax)?;
    let (e_gs, e_hf, e_relax) = (to_f64(e_gs), to_f64(hf_run.energy), to_f64(relax_run.energy));
    let report = EnergyReport {
        n: model.n(),
        particles,
        e_gs,
        e_hf,
        e_relax,
        gaps: EnergyGaps {
            gs_minus_relax: e_gs - e_relax,
            hf_minus_gs: e_hf - e_gs,
        },
        residuals: EnergyResiduals {
            relax_primal: relax_run.primal_residual,
            relax_dual: relax_run.dual_residual,
            relax_cone_violation: relax_run.cone_violation,
            hf_stationarity: hf_run.stationarity,
        },
        iterations: EnergyIterations {
            hf: hf_run.iterations,
            relax: relax_run.iterations,
        },
        hf_converged: hf_run.converged,
        relax_converged: relax_run.converged,
        tol,
        ordering_holds: e_relax <= e_gs + tol && e_gs <= e_hf + tol,
    };
    Ok(EnergyRun {
        report,
        ground_state: psi,
        hartree_fock: hf_run,
        relaxation: relax_run,
    })
}
