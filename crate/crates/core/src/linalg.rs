//! Dense complex linear algebra on the one- and two-particle spaces.
//!
//! Two-particle operators act on `h ⊗ h` with the pair layout
//! `(k, l) ↦ k·n + l` (row-major, 0-based modes).

use nalgebra::{DMatrix, DVector};

use crate::scalar::{lit, modulus, real, Cx, Real};

pub type CMat<T> = DMatrix<Cx<T>>;
pub type CVec<T> = DVector<Cx<T>>;

#[inline]
pub fn pair(n: usize, k: usize, l: usize) -> usize {
    k * n + l
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * real(lit::<T>(0.5))
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<T> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Smallest eigenvalue of the Hermitian part; `+∞`-free: empty matrices give 0.
pub fn min_eigenvalue<T: Real>(m: &CMat<T>) -> T {
    eigvalsh(m).first().copied().unwrap_or_else(T::zero)
}

pub fn max_eigenvalue<T: Real>(m: &CMat<T>) -> T {
    eigvalsh(m).last().copied().unwrap_or_else(T::zero)
}

pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

pub fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max(modulus(*x - *y)))
}

pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// The swap `Ex(f ⊗ g) = g ⊗ f` on `h ⊗ h`.
pub fn exchange<T: Real>(n: usize) -> CMat<T> {
    let mut ex = CMat::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            ex[(pair(n, k, l), pair(n, l, k))] = Cx::new(T::one(), T::zero());
        }
    }
    ex
}

/// `Ex · m` without forming `Ex` (row permutation).
pub fn exchange_left<T: Real>(n: usize, m: &CMat<T>) -> CMat<T> {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| {
        let (k, l) = (r / n, r % n);
        m[(pair(n, l, k), c)]
    })
}

/// `m · Ex` (column permutation).
pub fn exchange_right<T: Real>(n: usize, m: &CMat<T>) -> CMat<T> {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| {
        let (k, l) = (c / n, c % n);
        m[(r, pair(n, l, k))]
    })
}

/// `(1 − Ex) m`.
pub fn antisymmetrize_left<T: Real>(n: usize, m: &CMat<T>) -> CMat<T> {
    m - exchange_left(n, m)
}

/// `tr{(A ⊗ B) Γ}` in `O(n⁴)` without building the Kronecker product.
pub fn pair_trace<T: Real>(a: &CMat<T>, b: &CMat<T>, gamma2: &CMat<T>) -> Cx<T> {
    let n = a.nrows();
    let mut acc = Cx::new(T::zero(), T::zero());
    for p in 0..n {
        for r in 0..n {
            let apr = a[(p, r)];
            if apr.re == T::zero() && apr.im == T::zero() {
                continue;
            }
            for q in 0..n {
                for s in 0..n {
                    acc += apr * b[(q, s)] * gamma2[(pair(n, r, s), pair(n, p, q))];
                }
            }
        }
    }
    acc
}

/// `tr{(A ⊗ B) Ex (C ⊗ D)} = tr(A D B C)`.
pub fn pair_trace_exchange<T: Real>(a: &CMat<T>, b: &CMat<T>, c: &CMat<T>, d: &CMat<T>) -> Cx<T> {
    (a * d * b * c).trace()
}

/// Orthonormal basis of the antisymmetric subspace `Ran (1 − Ex)/2` as an
/// `n² × n(n−1)/2` isometry; column order follows `k < l` lexicographically.
pub fn antisymmetric_basis<T: Real>(n: usize) -> CMat<T> {
    let dim = n * n.saturating_sub(1) / 2;
    let mut u = CMat::zeros(n * n, dim);
    let w: T = lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut col = 0;
    for k in 0..n {
        for l in (k + 1)..n {
            u[(pair(n, k, l), col)] = real(w);
            u[(pair(n, l, k), col)] = real(-w);
            col += 1;
        }
    }
    u
}

/// Matrix of `Σ_k f_k ψ_k` style conversion: reshapes a pair-indexed vector
/// into the `n × n` matrix `A_{kl} = v_{(k,l)}`.
pub fn unpair<T: Real>(n: usize, v: &CVec<T>) -> CMat<T> {
    CMat::from_fn(n, n, |k, l| v[pair(n, k, l)])
}

pub fn trace_re<T: Real>(m: &CMat<T>) -> T {
    m.trace().re
}
