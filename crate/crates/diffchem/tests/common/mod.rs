//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each suite uses its own subset

use diffchem::molecule::{build_molecule, DiffFlags, Molecule};
use diffchem_oracles::GaussianShell;

pub fn h2(bond: f64, flags: DiffFlags) -> Molecule<f64> {
    build_molecule(
        &["H", "H"],
        &[[0.0, 0.0, 0.0], [0.0, 0.0, bond]],
        0,
        "sto-3g",
        flags,
    )
    .unwrap()
}

pub fn heh_plus(bond: f64) -> Molecule<f64> {
    build_molecule(
        &["He", "H"],
        &[[0.0, 0.0, 0.0], [0.0, 0.0, bond]],
        1,
        "sto-3g",
        DiffFlags::default(),
    )
    .unwrap()
}

/// Equilateral cation in the xy plane with the given side length.
pub fn h3_plus(side: f64, flags: DiffFlags) -> Molecule<f64> {
    build_molecule(
        &["H", "H", "H"],
        &[
            [0.0, 0.0, 0.0],
            [side, 0.0, 0.0],
            [side / 2.0, side * 3f64.sqrt() / 2.0, 0.0],
        ],
        1,
        "sto-3g",
        flags,
    )
    .unwrap()
}

pub fn lih(bond: f64) -> Molecule<f64> {
    build_molecule(
        &["Li", "H"],
        &[[0.0, 0.0, 0.0], [0.0, 0.0, bond]],
        0,
        "sto-3g",
        DiffFlags::default(),
    )
    .unwrap()
}

/// Converts one basis function of a molecule into the oracle's plain-data
/// shell, with normalization folded into effective coefficients. The
/// quadrature then checks the function exactly as the library defines it.
pub fn oracle_shell(mol: &Molecule<f64>, index: usize) -> GaussianShell {
    let cg = &mol.basis_functions[index];
    let center = *mol.center_of(cg);
    GaussianShell {
        center,
        angular: [cg.angular.0, cg.angular.1, cg.angular.2],
        primitives: cg.effective_primitives(),
    }
}

/// Deterministic pseudo-random stream for test inputs (splitmix64).
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
