//! One- and two-particle reduced density matrices.
//!
//! `γ_{kl} = tr(ρ c*_l c_k)` and `Γ_{(k,l),(m,n)} = tr(ρ c*_n c*_m c_k c_l)`,
//! with the pair layout of [`crate::linalg::pair`]. Both are extracted
//! directly from the sector blocks of `ρ` by walking occupation bitmasks,
//! which costs `O(dim_N · N² · n²)` per sector instead of `n⁴` Fock traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{annihilate, create};
use crate::linalg::{self, pair, CMat};
use crate::scalar::{lit, real, Cx, Real};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyRdm<T: Real> {
    pub matrix: CMat<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyRdm<T: Real> {
    pub matrix: CMat<T>,
}

impl<T: Real> OneBodyRdm<T> {
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: CMat::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::eigvalsh(&self.matrix)
    }

    /// `max |γ² − γ|`, zero exactly for orthogonal projections.
    pub fn idempotency_defect(&self) -> T {
        linalg::max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix)
    }
}

impl<T: Real> TwoBodyRdm<T> {
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        let dim = matrix.nrows();
        let n = (dim as f64).sqrt().round() as usize;
        if n * n != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                expected: n * n,
                got: dim,
            });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: CMat::zeros(n * n, n * n),
        }
    }

    /// Number of modes `n` (the matrix is `n² × n²`).
    pub fn n(&self) -> usize {
        (self.matrix.nrows() as f64).sqrt().round() as usize
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `max(|ExΓ + Γ|, |ΓEx + Γ|)`.
    pub fn antisymmetry_defect(&self) -> T {
        let n = self.n();
        let left = linalg::max_abs_diff(&linalg::exchange_left(n, &self.matrix), &(-&self.matrix));
        let right = linalg::max_abs_diff(&linalg::exchange_right(n, &self.matrix), &(-&self.matrix));
        left.max(right)
    }
}

/// `γ_ρ`.
pub fn one_pdm<T: Real>(rho: &DensityMatrix<T>) -> OneBodyRdm<T> {
    let basis = rho.basis();
    let n = basis.n_modes();
    let mut g = CMat::<T>::zeros(n, n);
    for (np, block) in rho.blocks() {
        let start = basis.sector(np).start;
        for (a, &mask) in basis.sector_states(np).iter().enumerate() {
            for k in 0..n {
                let Some((m1, s1)) = annihilate(mask, k) else { continue };
                for l in 0..n {
                    let Some((m2, s2)) = create(m1, l) else { continue };
                    // c*_l c_k |mask⟩ = ±|m2⟩, so tr picks ρ[mask, m2]
                    let v = block[(a, basis.index_of(m2) - start)];
                    g[(k, l)] += if s1 ^ s2 { -v } else { v };
                }
            }
        }
    }
    OneBodyRdm { matrix: g }
}

/// `Γ_ρ`.
pub fn two_pdm<T: Real>(rho: &DensityMatrix<T>) -> TwoBodyRdm<T> {
    let basis = rho.basis();
    let n = basis.n_modes();
    let mut g = CMat::<T>::zeros(n * n, n * n);
    for (np, block) in rho.blocks() {
        if np < 2 {
            continue;
        }
        let start = basis.sector(np).start;
        for (a, &mask) in basis.sector_states(np).iter().enumerate() {
            for l in 0..n {
                let Some((m1, s1)) = annihilate(mask, l) else { continue };
                for k in 0..n {
                    let Some((m2, s2)) = annihilate(m1, k) else { continue };
                    for m in 0..n {
                        let Some((m3, s3)) = create(m2, m) else { continue };
                        for nn in 0..n {
                            let Some((m4, s4)) = create(m3, nn) else { continue };
                            let v = block[(a, basis.index_of(m4) - start)];
                            let neg = s1 ^ s2 ^ s3 ^ s4;
                            g[(pair(n, k, l), pair(n, m, nn))] += if neg { -v } else { v };
                        }
                    }
                }
            }
        }
    }
    TwoBodyRdm { matrix: g }
}

pub fn exchange_operator<T: Real>(n: usize) -> CMat<T> {
    linalg::exchange(n)
}

/// `γ_{kl} = (N−1)⁻¹ Σ_j Γ_{(k,j),(l,j)}`.
pub fn contract_two_pdm<T: Real>(gamma2: &TwoBodyRdm<T>, particles: usize) -> Result<OneBodyRdm<T>> {
    if particles < 2 {
        return Err(Error::Contraction(particles));
    }
    let n = gamma2.n();
    let scale: T = T::one() / lit::<T>((particles - 1) as f64);
    let m = CMat::from_fn(n, n, |k, l| {
        let s: Cx<T> = (0..n)
            .map(|j| gamma2.matrix[(pair(n, k, j), pair(n, l, j))])
            .sum();
        s * real(scale)
    });
    Ok(OneBodyRdm { matrix: m })
}

/// `(1 − Ex)(γ ⊗ γ)`.
pub fn hartree_fock_two_pdm<T: Real>(gamma: &OneBodyRdm<T>) -> TwoBodyRdm<T> {
    let n = gamma.n();
    let gg = linalg::kron(&gamma.matrix, &gamma.matrix);
    TwoBodyRdm {
        matrix: linalg::antisymmetrize_left(n, &gg),
    }
}

/// `Γ^(T) = Γ − (1 − Ex)(γ ⊗ γ)`.
pub fn transposed_gamma_term<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>) -> Result<TwoBodyRdm<T>> {
    let n = gamma.n();
    if gamma2.matrix.nrows() != n * n {
        return Err(Error::Dimension {
            expected: n * n,
            got: gamma2.matrix.nrows(),
        });
    }
    Ok(TwoBodyRdm {
        matrix: &gamma2.matrix - hartree_fock_two_pdm(gamma).matrix,
    })
}

/// Wire format of an RDM pair. Matrices are flattened row-major into
/// `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RdmJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub particles: usize,
    pub gamma: Vec<[f64; 2]>,
    #[serde(rename = "Gamma")]
    pub gamma2: Vec<[f64; 2]>,
}

fn flatten<T: Real>(m: &CMat<T>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([crate::scalar::to_f64(z.re), crate::scalar::to_f64(z.im)]);
        }
    }
    out
}

fn unflatten<T: Real>(dim: usize, data: &[[f64; 2]]) -> Result<CMat<T>> {
    if data.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            got: data.len(),
        });
    }
    Ok(CMat::from_fn(dim, dim, |i, j| {
        let [re, im] = data[i * dim + j];
        Cx::new(lit(re), lit(im))
    }))
}

impl RdmJson {
    pub fn from_pair<T: Real>(gamma: &OneBodyRdm<T>, gamma2: &TwoBodyRdm<T>, particles: usize) -> Self {
        Self {
            n: gamma.n(),
            particles,
            gamma: flatten(&gamma.matrix),
            gamma2: flatten(&gamma2.matrix),
        }
    }

    pub fn to_pair<T: Real>(&self) -> Result<(OneBodyRdm<T>, TwoBodyRdm<T>)> {
        Ok((
            OneBodyRdm {
                matrix: unflatten(self.n, &self.gamma)?,
            },
            TwoBodyRdm {
                matrix: unflatten(self.n * self.n, &self.gamma2)?,
            },
        ))
    }
}
