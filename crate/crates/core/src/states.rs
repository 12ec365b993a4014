//! Particle-number conserving states on Fock space.
//!
//! Every generator here produces states supported on a single sector `N`, so
//! `[N̂, ρ] = 0` holds exactly by construction. A [`DensityMatrix`] is stored
//! as its diagonal sector blocks; the blocks coupling different sectors are
//! identically zero and never materialized.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockOperator};
use crate::linalg::{self, CMat, CVec};
use crate::rng::{self, Purpose};
use crate::scalar::{lit, real, to_f64, tol, Cx, Real};

/// Mixing weight of the negative part in [`signed_trace_one`].
pub const SIGNED_EPSILON: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct StateVector<T: Real> {
    basis: FockBasis,
    amplitudes: CVec<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(basis: &FockBasis, amplitudes: CVec<T>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Dimension {
                expected: basis.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            basis: basis.clone(),
            amplitudes,
        })
    }

    /// Embeds a vector over sector `N` into the full Fock space.
    pub fn from_sector(basis: &FockBasis, particles: usize, sector: &CVec<T>) -> Result<Self> {
        basis.check_particles(particles)?;
        let range = basis.sector(particles);
        if sector.len() != range.len() {
            return Err(Error::Dimension {
                expected: range.len(),
                got: sector.len(),
            });
        }
        let mut v = CVec::zeros(basis.dim());
        v.rows_mut(range.start, range.len()).copy_from(sector);
        Self::new(basis, v)
    }

    /// The vacuum `Ω`.
    pub fn vacuum(basis: &FockBasis) -> Self {
        let mut v = CVec::zeros(basis.dim());
        v[0] = real(T::one());
        Self {
            basis: basis.clone(),
            amplitudes: v,
        }
    }

    /// The occupation-number basis state for `mask`.
    pub fn basis_state(basis: &FockBasis, mask: u32) -> Self {
        let mut v = CVec::zeros(basis.dim());
        v[basis.index_of(mask)] = real(T::one());
        Self {
            basis: basis.clone(),
            amplitudes: v,
        }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVec<T> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm();
        if nrm == T::zero() {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(Self {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.map(|z| z / nrm),
        })
    }

    /// Particle numbers carrying nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.basis.n_modes())
            .filter(|&n| {
                self.basis
                    .sector(n)
                    .any(|i| self.amplitudes[i].norm_sqr() > T::zero())
            })
            .collect()
    }

    /// Restriction to sector `N`.
    pub fn sector_amplitudes(&self, particles: usize) -> CVec<T> {
        let r = self.basis.sector(particles);
        self.amplitudes.rows(r.start, r.len()).into_owned()
    }

    pub fn apply(&self, op: &FockOperator<T>) -> Result<Self> {
        if op.dim() != self.basis.dim() {
            return Err(Error::Dimension {
                expected: self.basis.dim(),
                got: op.dim(),
            });
        }
        Ok(Self {
            basis: self.basis.clone(),
            amplitudes: op.apply(&self.amplitudes),
        })
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &FockOperator<T>) -> Result<Cx<T>> {
        let v = self.apply(op)?;
        Ok(self.amplitudes.dotc(&v.amplitudes))
    }
}

/// Trace-one Hermitian operator commuting with `N̂`, stored by sector.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    basis: FockBasis,
    blocks: Vec<Option<CMat<T>>>,
    positive: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Assembles a state from sector blocks `(N, ρ_N)`. Validates Hermiticity
    /// and unit trace; when `positive` is set also positivity.
    pub fn from_blocks(basis: &FockBasis, blocks: Vec<(usize, CMat<T>)>, positive: bool) -> Result<Self> {
        let mut slots: Vec<Option<CMat<T>>> = vec![None; basis.n_modes() + 1];
        let mut trace = T::zero();
        for (n, block) in blocks {
            basis.check_particles(n)?;
            let d = basis.sector_dim(n);
            if block.nrows() != d || block.ncols() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: block.nrows(),
                });
            }
            let herm = linalg::max_abs_diff(&block, &block.adjoint());
            if herm > tol::<T>(1e-13) {
                return Err(Error::Consistency {
                    what: "density matrix block is not Hermitian",
                    residue: to_f64(herm),
                });
            }
            trace += block.trace().re;
            let block = linalg::hermitian_part(&block);
            if positive {
                let low = linalg::min_eigenvalue(&block);
                if low < -tol::<T>(1e-12) {
                    return Err(Error::Consistency {
                        what: "density matrix flagged positive has a negative eigenvalue",
                        residue: to_f64(low),
                    });
                }
            }
            slots[n] = Some(match slots[n].take() {
                Some(prev) => prev + block,
                None => block,
            });
        }
        if (trace - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::Consistency {
                what: "density matrix trace differs from one",
                residue: to_f64((trace - T::one()).abs()),
            });
        }
        Ok(Self {
            basis: basis.clone(),
            blocks: slots,
            positive,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn block(&self, particles: usize) -> Option<&CMat<T>> {
        self.blocks.get(particles).and_then(Option::as_ref)
    }

    /// Nonzero sector blocks in ascending particle number.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, &CMat<T>)> {
        self.blocks
            .iter()
            .enumerate()
            .filter_map(|(n, b)| b.as_ref().map(|b| (n, b)))
    }

    /// The single supported particle number, if there is exactly one.
    pub fn particle_number(&self) -> Option<usize> {
        let mut it = self.blocks().map(|(n, _)| n);
        match (it.next(), it.next()) {
            (Some(n), None) => Some(n),
            _ => None,
        }
    }

    pub fn trace(&self) -> Cx<T> {
        self.blocks().map(|(_, b)| b.trace()).sum()
    }

    pub fn min_eigenvalue(&self) -> T {
        let mut low: Option<T> = None;
        for (_, b) in self.blocks() {
            let e = linalg::min_eigenvalue(b);
            low = Some(low.map_or(e, |l: T| l.min(e)));
        }
        // sectors without a block contribute zero eigenvalues
        let all = self.blocks().map(|(n, _)| self.basis.sector_dim(n)).sum::<usize>() == self.basis.dim();
        let low = low.unwrap_or_else(T::zero);
        if all {
            low
        } else {
            low.min(T::zero())
        }
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        let mut all: Vec<T> = Vec::with_capacity(self.basis.dim());
        let mut covered = 0;
        for (_, b) in self.blocks() {
            all.extend(linalg::eigvalsh(b));
            covered += b.nrows();
        }
        all.extend(std::iter::repeat_n(T::zero(), self.basis.dim() - covered));
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        all
    }

    /// Full `2ⁿ × 2ⁿ` matrix.
    pub fn to_dense(&self) -> CMat<T> {
        let mut m = CMat::zeros(self.basis.dim(), self.basis.dim());
        for (n, b) in self.blocks() {
            let s = self.basis.sector(n).start;
            m.view_mut((s, s), (b.nrows(), b.ncols())).copy_from(b);
        }
        m
    }
}

fn single_sector<T: Real>(psi: &StateVector<T>) -> Result<usize> {
    match psi.support().as_slice() {
        [n] => Ok(*n),
        [] => Err(Error::NotNormalized { norm: 0.0 }),
        _ => Err(Error::MultiSector),
    }
}

/// `|ψ⟩⟨ψ|` for a normalized single-sector `ψ`.
pub fn pure_state<T: Real>(psi: &StateVector<T>) -> Result<DensityMatrix<T>> {
    let nrm = psi.norm();
    if (nrm - T::one()).abs() > tol::<T>(1e-12) {
        return Err(Error::NotNormalized { norm: to_f64(nrm) });
    }
    let n = single_sector(psi)?;
    let v = psi.sector_amplitudes(n);
    let block = &v * v.adjoint();
    DensityMatrix::from_blocks(psi.basis(), vec![(n, block)], true)
}

/// Haar-random unit vector on sector `N`.
pub fn random_pure<T: Real>(basis: &FockBasis, particles: usize, seed: u64) -> Result<StateVector<T>> {
    basis.check_particles(particles)?;
    let mut rng = rng::stream(seed, Purpose::PureState);
    let d = basis.sector_dim(particles);
    let v = CVec::from_fn(d, |_, _| rng::complex_normal::<T, _>(&mut rng));
    StateVector::from_sector(basis, particles, &v)?.normalized()
}

/// Dirichlet(1, …, 1) weights of length `k`.
pub fn dirichlet_weights(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, Purpose::MixtureWeights);
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Convex combination of `rank` independent [`random_pure`] states.
/// Component `i` uses seed `child_seed(seed, i)`, so `rank = 1` reproduces
/// `pure_state(random_pure(basis, N, seed))`.
pub fn random_mixed<T: Real>(
    basis: &FockBasis,
    particles: usize,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix<T>> {
    basis.check_particles(particles)?;
    let d = basis.sector_dim(particles);
    if rank == 0 || rank > d {
        return Err(Error::Rank { rank, dim: d });
    }
    let weights = if rank == 1 {
        vec![1.0]
    } else {
        dirichlet_weights(rank, seed)
    };
    let mut block = CMat::zeros(d, d);
    for (i, w) in weights.iter().enumerate() {
        let psi = random_pure::<T>(basis, particles, rng::child_seed(seed, i as u64))?;
        let v = psi.sector_amplitudes(particles);
        block += (&v * v.adjoint()) * real(lit::<T>(*w));
    }
    let tr = block.trace().re;
    block /= real(tr);
    DensityMatrix::from_blocks(basis, vec![(particles, block)], true)
}

/// Trace-one but indefinite `ρ = (1 + ε)ρ₁ − ερ₂` on sector `N`, with `ρ₁`
/// pure and `ρ₂` a full-rank random mixture (`ε = 0.25`). Any vector
/// orthogonal to `ρ₁`'s range has negative expectation, so the sector must
/// have dimension at least two.
pub fn signed_trace_one<T: Real>(basis: &FockBasis, particles: usize, seed: u64) -> Result<DensityMatrix<T>> {
    basis.check_particles(particles)?;
    let d = basis.sector_dim(particles);
    if d < 2 {
        return Err(Error::Rank { rank: 2, dim: d });
    }
    let rho1 = random_mixed::<T>(basis, particles, 1, rng::child_seed(seed, 1))?;
    let rho2 = random_mixed::<T>(basis, particles, d, rng::child_seed(seed, 2))?;
    let eps: T = lit(SIGNED_EPSILON);
    let (b1, b2) = (rho1.block(particles).unwrap(), rho2.block(particles).unwrap());
    let block = b1 * real(T::one() + eps) - b2 * real(eps);
    DensityMatrix::from_blocks(basis, vec![(particles, block)], false)
}

/// `tr(ρ A)`. Only the diagonal sector blocks of `A` contribute.
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, op: &FockOperator<T>) -> Result<Cx<T>> {
    if op.dim() != rho.basis().dim() {
        return Err(Error::Dimension {
            expected: rho.basis().dim(),
            got: op.dim(),
        });
    }
    let basis = rho.basis();
    let mut acc = Cx::new(T::zero(), T::zero());
    for (n, block) in rho.blocks() {
        let range = basis.sector(n);
        for j in range.clone() {
            for &(i, a) in op.column(j) {
                if range.contains(&i) {
                    // tr(ρA) = Σ ρ_ji A_ij
                    acc += block[(j - range.start, i - range.start)] * a;
                }
            }
        }
    }
    Ok(acc)
}
