//! Fermionic Fock space on `n` modes and the CAR algebra in the Fock
//! representation.
//!
//! Modes are 0-based. Basis states are occupation bitmasks (bit `k` set when
//! mode `k` is occupied), identified with `c*_{s₁}⋯c*_{s_N} Ω` for
//! `s₁ < ⋯ < s_N`. They are ordered by particle number first and bitmask
//! second, so every particle-number sector is a contiguous index range and
//! the vacuum `Ω` sits at index 0.
//!
//! Creation prepends: `c*_k` acting on occupation set `S ∌ k` gives
//! `(−1)^{|{s ∈ S : s < k}|}` times `S ∪ {k}`.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::scalar::{lit, modulus, Cx, Real};
use crate::states::StateVector;

pub const MAX_MODES: usize = 14;

#[derive(Debug)]
struct BasisData {
    n_modes: usize,
    states: Vec<u32>,
    index: Vec<usize>,
    offsets: Vec<usize>,
}

/// Ordered occupation-number basis. Cheap to clone (shared storage).
#[derive(Debug, Clone)]
pub struct FockBasis {
    inner: Arc<BasisData>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n_modes == other.inner.n_modes
    }
}

impl FockBasis {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::ModeCount(n_modes));
        }
        let dim = 1usize << n_modes;
        let mut masks: Vec<u32> = (0..dim as u32).collect();
        masks.sort_by_key(|&m| (m.count_ones(), m));
        let mut index = vec![0usize; dim];
        for (i, &m) in masks.iter().enumerate() {
            index[m as usize] = i;
        }
        let mut offsets = vec![0usize; n_modes + 2];
        for &m in &masks {
            offsets[m.count_ones() as usize + 1] += 1;
        }
        for k in 1..offsets.len() {
            offsets[k] += offsets[k - 1];
        }
        Ok(Self {
            inner: Arc::new(BasisData {
                n_modes,
                states: masks,
                index,
                offsets,
            }),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.inner.n_modes
    }

    pub fn dim(&self) -> usize {
        self.inner.states.len()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.inner.states[i]
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.inner.index[mask as usize]
    }

    pub fn particle_number(&self, i: usize) -> usize {
        self.inner.states[i].count_ones() as usize
    }

    /// Index range of sector `N`; empty when `N > n_modes`.
    pub fn sector(&self, particles: usize) -> Range<usize> {
        if particles > self.n_modes() {
            return 0..0;
        }
        self.inner.offsets[particles]..self.inner.offsets[particles + 1]
    }

    pub fn sector_dim(&self, particles: usize) -> usize {
        self.sector(particles).len()
    }

    pub fn sector_states(&self, particles: usize) -> &[u32] {
        &self.inner.states[self.sector(particles)]
    }

    pub fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.n_modes() {
            return Err(Error::ModeIndex {
                index: k,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    pub fn check_particles(&self, particles: usize) -> Result<()> {
        if particles > self.n_modes() {
            return Err(Error::ParticleNumber {
                particles,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }
}

#[inline]
fn parity_below(mask: u32, k: usize) -> bool {
    (mask & ((1u32 << k) - 1)).count_ones() % 2 == 1
}

/// `c_k` on a basis state: `Some((new_mask, negative))` or `None` if it vanishes.
#[inline]
pub fn annihilate(mask: u32, k: usize) -> Option<(u32, bool)> {
    if mask & (1 << k) == 0 {
        None
    } else {
        Some((mask & !(1 << k), parity_below(mask, k)))
    }
}

/// `c*_k` on a basis state.
#[inline]
pub fn create(mask: u32, k: usize) -> Option<(u32, bool)> {
    if mask & (1 << k) != 0 {
        None
    } else {
        Some((mask | (1 << k), parity_below(mask, k)))
    }
}

/// Elementary ladder operator in a product word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Applies a word of ladder operators (rightmost acts first) to a basis state.
#[inline]
pub fn apply_word(mask: u32, word: &[Ladder]) -> Option<(u32, bool)> {
    let mut m = mask;
    let mut neg = false;
    for op in word.iter().rev() {
        let (next, s) = match *op {
            Ladder::Create(k) => create(m, k)?,
            Ladder::Annihilate(k) => annihilate(m, k)?,
        };
        m = next;
        neg ^= s;
    }
    Some((m, neg))
}

/// Column-sparse complex operator on Fock space.
#[derive(Debug, Clone)]
pub struct FockOperator<T: Real> {
    basis: FockBasis,
    cols: Vec<Vec<(usize, Cx<T>)>>,
}

impl<T: Real> PartialEq for FockOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.cols == other.cols
    }
}

fn signed<T: Real>(neg: bool) -> Cx<T> {
    if neg {
        Cx::new(-T::one(), T::zero())
    } else {
        Cx::new(T::one(), T::zero())
    }
}

fn is_zero<T: Real>(z: &Cx<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}

impl<T: Real> FockOperator<T> {
    pub fn zeros(basis: &FockBasis) -> Self {
        Self {
            basis: basis.clone(),
            cols: vec![Vec::new(); basis.dim()],
        }
    }

    pub fn identity(basis: &FockBasis) -> Self {
        Self::diagonal(basis, |_| Cx::new(T::one(), T::zero()))
    }

    pub fn diagonal(basis: &FockBasis, f: impl Fn(usize) -> Cx<T>) -> Self {
        let cols = (0..basis.dim())
            .map(|j| {
                let v = f(j);
                if is_zero(&v) {
                    Vec::new()
                } else {
                    vec![(j, v)]
                }
            })
            .collect();
        Self {
            basis: basis.clone(),
            cols,
        }
    }

    /// Builds an operator column by column; `column(j)` lists `(row, value)`
    /// pairs, duplicates are summed.
    pub fn from_column_fn(
        basis: &FockBasis,
        mut column: impl FnMut(usize, &mut Vec<(usize, Cx<T>)>),
    ) -> Self {
        let mut cols = Vec::with_capacity(basis.dim());
        let mut scratch = Vec::new();
        for j in 0..basis.dim() {
            scratch.clear();
            column(j, &mut scratch);
            cols.push(compress(&mut scratch));
        }
        Self {
            basis: basis.clone(),
            cols,
        }
    }

    /// Linear combination `Σ coeff · word` of ladder words.
    pub fn from_words(basis: &FockBasis, terms: &[(Cx<T>, Vec<Ladder>)]) -> Self {
        Self::from_column_fn(basis, |j, out| {
            let mask = basis.mask(j);
            for (coeff, word) in terms {
                if is_zero(coeff) {
                    continue;
                }
                if let Some((m, neg)) = apply_word(mask, word) {
                    out.push((basis.index_of(m), *coeff * signed::<T>(neg)));
                }
            }
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, Cx<T>)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> Cx<T> {
        self.cols[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map(|p| self.cols[j][p].1)
            .unwrap_or_else(|_| Cx::new(T::zero(), T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Cx<T>)>> = vec![Vec::new(); self.dim()];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                rows[i].push((j, v.conj()));
            }
        }
        Self {
            basis: self.basis.clone(),
            cols: rows,
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            basis: self.basis.clone(),
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|&(i, v)| (i, v * s)).filter(|(_, v)| !is_zero(v)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(Cx::new(T::one(), T::zero()), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(Cx::new(-T::one(), T::zero()), other)
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: Cx<T>, other: &Self) -> Self {
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut merged: Vec<(usize, Cx<T>)> =
                    a.iter().copied().chain(b.iter().map(|&(i, v)| (i, v * s))).collect();
                compress(&mut merged)
            })
            .collect();
        Self {
            basis: self.basis.clone(),
            cols,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut acc: BTreeMap<usize, Cx<T>> = BTreeMap::new();
        let cols = rhs
            .cols
            .iter()
            .map(|bcol| {
                acc.clear();
                for &(k, b) in bcol {
                    for &(i, a) in &self.cols[k] {
                        *acc.entry(i).or_insert_with(|| Cx::new(T::zero(), T::zero())) += a * b;
                    }
                }
                acc.iter().filter(|(_, v)| !is_zero(v)).map(|(&i, &v)| (i, v)).collect()
            })
            .collect();
        Self {
            basis: self.basis.clone(),
            cols,
        }
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        let mut out = CVec::zeros(self.dim());
        for (j, col) in self.cols.iter().enumerate() {
            let x = v[j];
            if is_zero(&x) {
                continue;
            }
            for &(i, a) in col {
                out[i] += a * x;
            }
        }
        out
    }

    pub fn to_dense(&self) -> CMat<T> {
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Block of the operator between sector `N` and itself.
    pub fn sector_block(&self, particles: usize) -> CMat<T> {
        let range = self.basis.sector(particles);
        let d = range.len();
        let mut m = CMat::zeros(d, d);
        for (jl, j) in range.clone().enumerate() {
            for &(i, v) in &self.cols[j] {
                if range.contains(&i) {
                    m[(i - range.start, jl)] = v;
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.cols
            .iter()
            .flatten()
            .fold(T::zero(), |acc, (_, v)| acc.max(modulus(*v)))
    }

    /// Largest entrywise deviation `max |A − B|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    /// Largest entry coupling different particle-number sectors.
    pub fn off_sector_max(&self) -> T {
        let mut worst = T::zero();
        for (j, col) in self.cols.iter().enumerate() {
            let nj = self.basis.particle_number(j);
            for &(i, v) in col {
                if self.basis.particle_number(i) != nj {
                    worst = worst.max(modulus(v));
                }
            }
        }
        worst
    }
}

fn compress<T: Real>(entries: &mut Vec<(usize, Cx<T>)>) -> Vec<(usize, Cx<T>)> {
    entries.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, Cx<T>)> = Vec::with_capacity(entries.len());
    for &(i, v) in entries.iter() {
        match out.last_mut() {
            Some((li, lv)) if *li == i => *lv += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !is_zero(v));
    out
}

/// `c*_k`.
pub fn creation<T: Real>(k: usize, basis: &FockBasis) -> Result<FockOperator<T>> {
    basis.check_mode(k)?;
    Ok(FockOperator::from_words(
        basis,
        &[(Cx::new(T::one(), T::zero()), vec![Ladder::Create(k)])],
    ))
}

/// `c_k`, the adjoint of [`creation`].
pub fn annihilation<T: Real>(k: usize, basis: &FockBasis) -> Result<FockOperator<T>> {
    basis.check_mode(k)?;
    Ok(FockOperator::from_words(
        basis,
        &[(Cx::new(T::one(), T::zero()), vec![Ladder::Annihilate(k)])],
    ))
}

/// `c*(f) = Σ_k f_k c*_k` (linear in `f`).
pub fn creation_general<T: Real>(f: &[Cx<T>], basis: &FockBasis) -> Result<FockOperator<T>> {
    if f.len() != basis.n_modes() {
        return Err(Error::Dimension {
            expected: basis.n_modes(),
            got: f.len(),
        });
    }
    let terms: Vec<_> = f
        .iter()
        .enumerate()
        .map(|(k, &c)| (c, vec![Ladder::Create(k)]))
        .collect();
    Ok(FockOperator::from_words(basis, &terms))
}

/// `c(f) = Σ_k conj(f_k) c_k` (antilinear in `f`).
pub fn annihilation_general<T: Real>(f: &[Cx<T>], basis: &FockBasis) -> Result<FockOperator<T>> {
    if f.len() != basis.n_modes() {
        return Err(Error::Dimension {
            expected: basis.n_modes(),
            got: f.len(),
        });
    }
    let terms: Vec<_> = f
        .iter()
        .enumerate()
        .map(|(k, &c)| (c.conj(), vec![Ladder::Annihilate(k)]))
        .collect();
    Ok(FockOperator::from_words(basis, &terms))
}

/// `N̂`, diagonal with the popcount of each basis state.
pub fn number_operator<T: Real>(basis: &FockBasis) -> FockOperator<T> {
    FockOperator::diagonal(basis, |j| Cx::new(lit(basis.particle_number(j) as f64), T::zero()))
}

/// `c*(φ₁)⋯c*(φ_N) Ω` for orthonormal orbitals (each of length `n_modes`).
pub fn slater_state<T: Real>(orbitals: &[Vec<Cx<T>>], basis: &FockBasis) -> Result<StateVector<T>> {
    let n = basis.n_modes();
    basis.check_particles(orbitals.len())?;
    for phi in orbitals {
        if phi.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: phi.len(),
            });
        }
    }
    let mut deviation = 0.0f64;
    for (a, fa) in orbitals.iter().enumerate() {
        for (b, fb) in orbitals.iter().enumerate() {
            let dot: Cx<T> = fa.iter().zip(fb).map(|(x, y)| x.conj() * *y).sum();
            let target = if a == b { T::one() } else { T::zero() };
            let dev = modulus(dot - Cx::new(target, T::zero()));
            deviation = deviation.max(crate::scalar::to_f64(dev));
        }
    }
    if deviation > 1e-12 {
        return Err(Error::NotOrthonormal { deviation });
    }
    let mut v = CVec::zeros(basis.dim());
    v[0] = Cx::new(T::one(), T::zero());
    // rightmost orbital acts first on the vacuum
    for phi in orbitals.iter().rev() {
        v = creation_general(phi, basis)?.apply(&v);
    }
    StateVector::new(basis, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn unit(n: usize, k: usize) -> Vec<Cx<f64>> {
        (0..n).map(|i| cx(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn basis_sizes() {
        let b = FockBasis::new(2).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!((0..=2).map(|n| b.sector_dim(n)).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(FockBasis::new(4).unwrap().sector_dim(2), 6);
        let b1 = FockBasis::new(1).unwrap();
        assert_eq!(b1.dim(), 2);
        assert_eq!(b1.mask(0), 0);
        assert_eq!(b1.mask(1), 1);
    }

    #[test]
    fn basis_rejects_bad_mode_counts() {
        assert!(matches!(FockBasis::new(0), Err(Error::ModeCount(0))));
        assert!(matches!(FockBasis::new(15), Err(Error::ModeCount(15))));
        assert_eq!(FockBasis::new(14).unwrap().dim(), 16384);
    }

    #[test]
    fn ordering_is_number_major_then_mask() {
        let b = FockBasis::new(4).unwrap();
        let masks: Vec<u32> = (0..b.dim()).map(|i| b.mask(i)).collect();
        let mut sorted = masks.clone();
        sorted.sort_by_key(|&m| (m.count_ones(), m));
        assert_eq!(masks, sorted);
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.mask(i)), i);
        }
    }

    #[test]
    fn creation_signs() {
        let b = FockBasis::new(2).unwrap();
        let c0 = creation::<f64>(0, &b).unwrap();
        let c1 = creation::<f64>(1, &b).unwrap();
        let one = b.index_of(0b01);
        let both = b.index_of(0b11);
        // c*_0 Ω = |{0}⟩
        assert_eq!(c0.get(one, 0), cx(1.0, 0.0));
        // c*_1 |{0}⟩ = −|{0,1}⟩
        assert_eq!(c1.get(both, one), cx(-1.0, 0.0));
        // Pauli exclusion
        assert!(c0.column(one).is_empty());
    }

    #[test]
    fn annihilation_examples() {
        let b = FockBasis::new(2).unwrap();
        let a0 = annihilation::<f64>(0, &b).unwrap();
        let a1 = annihilation::<f64>(1, &b).unwrap();
        let one = b.index_of(0b01);
        let both = b.index_of(0b11);
        assert_eq!(a0.get(0, one), cx(1.0, 0.0));
        assert!(a0.column(0).is_empty());
        assert_eq!(a1.get(one, both), cx(-1.0, 0.0));
        assert_eq!(a1, creation::<f64>(1, &b).unwrap().adjoint());
    }

    #[test]
    fn index_errors() {
        let b = FockBasis::new(3).unwrap();
        assert!(matches!(creation::<f64>(3, &b), Err(Error::ModeIndex { index: 3, .. })));
        assert!(annihilation::<f64>(7, &b).is_err());
        assert!(creation_general::<f64>(&[cx(1.0, 0.0)], &b).is_err());
    }

    #[test]
    fn general_creation_is_linear() {
        let b = FockBasis::new(3).unwrap();
        assert_eq!(creation_general(&unit(3, 0), &b).unwrap(), creation::<f64>(0, &b).unwrap());
        let f = vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)];
        let mut vac = CVec::<f64>::zeros(b.dim());
        vac[0] = cx(1.0, 0.0);
        let out = creation_general(&f, &b).unwrap().apply(&vac);
        assert_eq!(out[b.index_of(0b001)], cx(1.0, 0.0));
        assert_eq!(out[b.index_of(0b010)], cx(1.0, 0.0));
        assert_eq!(out.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn number_operator_examples() {
        let b = FockBasis::new(3).unwrap();
        let n = number_operator::<f64>(&b);
        assert_eq!(n.get(0, 0), cx(0.0, 0.0));
        let i = b.index_of(0b101);
        assert_eq!(n.get(i, i), cx(2.0, 0.0));
        let mut sum = FockOperator::<f64>::zeros(&b);
        for k in 0..3 {
            let c = creation::<f64>(k, &b).unwrap();
            sum = sum.add(&c.mul(&c.adjoint()));
        }
        assert_eq!(sum.max_abs_diff(&n), 0.0);
    }

    #[test]
    fn slater_examples() {
        let b = FockBasis::new(4).unwrap();
        let s = slater_state(&[unit(4, 0), unit(4, 1)], &b).unwrap();
        assert_eq!(s.amplitudes()[b.index_of(0b0011)], cx(1.0, 0.0));
        let s = slater_state(&[unit(4, 1), unit(4, 0)], &b).unwrap();
        assert_eq!(s.amplitudes()[b.index_of(0b0011)], cx(-1.0, 0.0));
        let bad = vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)];
        assert!(matches!(
            slater_state(&[bad, unit(4, 2)], &b),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let b = FockBasis::new(4).unwrap();
        let id = FockOperator::<f32>::identity(&b);
        for i in 0..4 {
            let ci = annihilation::<f32>(i, &b).unwrap();
            for j in 0..4 {
                let cj = creation::<f32>(j, &b).unwrap();
                let target = if i == j { id.clone() } else { FockOperator::zeros(&b) };
                assert!(ci.anticommutator(&cj).max_abs_diff(&target) < 1e-6);
            }
        }
    }
}
