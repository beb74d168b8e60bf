//! Differentiable quantum chemistry at desk scale: Gaussian-basis
//! restricted Hartree-Fock, Jordan-Wigner qubit Hamiltonians, statevector
//! simulation of particle-conserving circuits, and exact derivatives of
//! energies with respect to circuit parameters, nuclear coordinates, and
//! basis-set parameters.
//!
//! The numeric kernels are generic over [`autodiff::Scalar`], so the same
//! Hartree-Fock code runs on `f64` or on forward-mode dual numbers. That is
//! what makes molecular Hamiltonian coefficients differentiable all the way
//! down to the integrals.

pub mod autodiff;
pub mod circuits;
pub mod error;
pub mod hamiltonian;
pub mod integrals;
pub mod linalg;
pub mod molecule;
pub mod scf;
pub mod workflows;

pub use error::{Error, Result};
