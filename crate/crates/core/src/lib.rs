//! Finite-dimensional fermionic Fock space laboratory.
//!
//! Builds creation/annihilation operators on `n` modes, particle-number
//! conserving density matrices, their one- and two-particle reduced density
//! matrices, and checks the P-, G- and Q-representability conditions together
//! with the chain of correlation inequalities they imply. Also computes exact,
//! Hartree–Fock and semidefinite-relaxation energies for small model
//! Hamiltonians.
//!
//! All numerical code is generic over the real scalar type (see [`Real`]);
//! the `*64` aliases below fix it to `f64`, which is what the tolerances in
//! the verification suites are calibrated for.

pub mod conditions;
pub mod correlation;
pub mod energy;
pub mod error;
pub mod fdl;
pub mod fock;
pub mod linalg;
pub mod rdm;
pub mod rng;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use fock::{FockBasis, FockOperator};
pub use scalar::{Cx, Real};
pub use states::{DensityMatrix, StateVector};

pub type FockOperator64 = fock::FockOperator<f64>;
pub type StateVector64 = states::StateVector<f64>;
pub type DensityMatrix64 = states::DensityMatrix<f64>;
pub type OneBodyRdm64 = rdm::OneBodyRdm<f64>;
pub type TwoBodyRdm64 = rdm::TwoBodyRdm<f64>;
pub type ModelHamiltonian64 = energy::ModelHamiltonian<f64>;
pub type Polynomial2_64 = conditions::Polynomial2<f64>;
pub type ProjectionSplit64 = correlation::ProjectionSplit<f64>;
