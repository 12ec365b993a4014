//! Deterministic random streams.
//!
//! Every generator is a ChaCha8 stream keyed by `(seed, purpose)`: the seed
//! selects the key and the purpose tag selects the stream, so two consumers
//! with different purposes never share randomness even under the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{lit, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    PureState = 1,
    MixtureWeights = 2,
    Projection = 3,
    Polynomial = 4,
    Orbitals = 5,
    HartreeFockStart = 6,
    Model = 7,
    Operator = 8,
    Trial = 9,
}

pub fn stream(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` of `seed`; index 0 returns `seed` itself.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    if index == 0 {
        seed
    } else {
        mix64(seed ^ mix64(index))
    }
}

/// Complex standard normal: real and imaginary parts have variance 1/2.
pub fn complex_normal<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Cx::new(lit(re * s), lit(im * s))
}

pub fn normal<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    lit(x)
}

/// Matrix with i.i.d. complex standard normal entries.
pub fn complex_matrix<T: Real, R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> crate::linalg::CMat<T> {
    crate::linalg::CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `n × d` matrix with Haar-distributed orthonormal columns (QR of a complex
/// Gaussian matrix with the phases of `R`'s diagonal divided out).
pub fn haar_isometry<T: Real, R: rand::Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> crate::linalg::CMat<T> {
    let g = complex_matrix::<T, R>(n, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d.min(n) {
        let z = r[(j, j)];
        let m = crate::scalar::modulus(z);
        if m > T::zero() {
            let phase = z / Cx::new(m, T::zero());
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}
