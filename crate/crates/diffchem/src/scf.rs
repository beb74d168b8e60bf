//! Restricted Hartree-Fock: Fock matrices, symmetric orthogonalization,
//! the self-consistent field loop, and the total energy, all generic over
//! the differentiable scalar.
//!
//! The iteration is the plain fixed-point scheme: start from a zero
//! coefficient matrix (so the first Fock matrix is the core Hamiltonian),
//! solve the Roothaan-Hall equation in the orthogonalized basis, rebuild
//! the density, and repeat until both the density and the energy stop
//! moving. No DIIS, no damping by default; an optional linear mixing
//! factor is exposed for stubborn cases.

use ndarray::Array2;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};
use crate::integrals::{integral_tables, EriTensor, IntegralTables};
use crate::linalg::{jacobi_eigh, matmul, matmul_tn, max_abs_diff};
use crate::molecule::{Atom, Molecule};

/// Orbital-energy gap under which derivative output is flagged as
/// unreliable (eigenvector tangents are not defined at degeneracy).
const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ScfConfig {
    pub max_iterations: usize,
    /// Convergence threshold on max|delta P|.
    pub tol_p: f64,
    /// Convergence threshold on |delta E| in hartree.
    pub tol_e: f64,
    /// Linear mixing factor in [0, 1): fraction of the previous density
    /// kept at each step. Zero (the default) is the plain fixed point.
    pub mixing: f64,
}

impl Default for ScfConfig {
    fn default() -> Self {
        ScfConfig {
            max_iterations: 200,
            tol_p: 1e-10,
            tol_e: 1e-12,
            mixing: 0.0,
        }
    }
}

pub type DensityMatrix<S> = Array2<S>;

#[derive(Clone, Debug)]
pub struct ScfState<S> {
    /// Orbital coefficients, S-orthonormal columns sorted by energy.
    pub coefficients: Array2<S>,
    pub density: DensityMatrix<S>,
    pub fock: Array2<S>,
    /// Ascending orbital energies in hartree.
    pub orbital_energies: Vec<S>,
    pub iteration: usize,
    pub delta_p: f64,
    pub delta_e: f64,
}

#[derive(Clone, Debug)]
pub struct ScfResult<S> {
    pub state: ScfState<S>,
    pub electronic_energy: S,
    pub nuclear_repulsion: S,
    pub total_energy: S,
    pub iterations_used: usize,
    /// Set when the converged spectrum has a gap below 1e-10; derivative
    /// output through the eigensolver is not trustworthy in that case.
    pub degenerate: bool,
}

/// One-electron core Hamiltonian `H = T + V`.
pub fn core_hamiltonian<S: Scalar>(tables: &IntegralTables<S>) -> Array2<S> {
    let (n, m) = tables.kinetic.dim();
    Array2::from_shape_fn((n, m), |(i, j)| {
        tables.kinetic[(i, j)].clone() + tables.attraction[(i, j)].clone()
    })
}

/// Coulomb and exchange matrices for a density matrix:
/// `J_uv = sum_hg P_hg (uv|hg)`, `K_uv = sum_hg P_hg (uh|vg)`.
pub fn coulomb_exchange<S: Scalar>(
    density: &DensityMatrix<S>,
    eri: &EriTensor<S>,
) -> (Array2<S>, Array2<S>) {
    let m = eri.n_basis();
    let mut j = Array2::from_shape_fn((m, m), |_| S::zero());
    let mut k = Array2::from_shape_fn((m, m), |_| S::zero());
    for u in 0..m {
        for v in 0..m {
            let mut jc = S::zero();
            let mut kc = S::zero();
            for h in 0..m {
                for g in 0..m {
                    let p = density[(h, g)].clone();
                    jc = jc + p.clone() * eri.get(u, v, h, g).clone();
                    kc = kc + p * eri.get(u, h, v, g).clone();
                }
            }
            j[(u, v)] = jc;
            k[(u, v)] = kc;
        }
    }
    (j, k)
}

/// Fock matrix `F = H_core + 2J - K`.
pub fn fock_matrix<S: Scalar>(
    h_core: &Array2<S>,
    j: &Array2<S>,
    k: &Array2<S>,
) -> Array2<S> {
    let (n, m) = h_core.dim();
    Array2::from_shape_fn((n, m), |(r, c)| {
        h_core[(r, c)].clone() + j[(r, c)].scale(2.0) - k[(r, c)].clone()
    })
}

/// Symmetric orthogonalizer `X = V D^{-1/2} V^T` from `S = V D V^T`.
/// Errors on an overlap eigenvalue below 1e-8 (linearly dependent basis).
pub fn orthogonalizer<S: Scalar>(overlap: &Array2<S>) -> Result<Array2<S>> {
    let (evals, vecs) = jacobi_eigh(overlap)?;
    let n = evals.len();
    for (i, e) in evals.iter().enumerate() {
        if e.value() < 1e-8 {
            return Err(Error::LinearDependence(format!(
                "overlap eigenvalue {i} is {:.3e}",
                e.value()
            )));
        }
    }
    let inv_sqrt: Vec<S> = evals.iter().map(|e| e.sqrt().recip()).collect();
    Ok(Array2::from_shape_fn((n, n), |(r, c)| {
        let mut acc = S::zero();
        for k in 0..n {
            acc = acc + vecs[(r, k)].clone() * inv_sqrt[k].clone() * vecs[(c, k)].clone();
        }
        acc
    }))
}

/// Closed-shell density `P_uv = sum_{i in occ} C_ui C_vi` over the
/// `n_occupied` lowest orbitals.
pub fn density_from_coefficients<S: Scalar>(
    coefficients: &Array2<S>,
    n_occupied: usize,
) -> DensityMatrix<S> {
    let (m, _) = coefficients.dim();
    Array2::from_shape_fn((m, m), |(u, v)| {
        let mut acc = S::zero();
        for i in 0..n_occupied {
            acc = acc + coefficients[(u, i)].clone() * coefficients[(v, i)].clone();
        }
        acc
    })
}

fn electronic_energy<S: Scalar>(
    density: &DensityMatrix<S>,
    h_core: &Array2<S>,
    fock: &Array2<S>,
) -> S {
    // E = sum_uv P_uv (H_uv + F_uv) = 2 tr(PH) + tr(P (2J - K))
    let (m, _) = density.dim();
    let mut acc = S::zero();
    for u in 0..m {
        for v in 0..m {
            acc = acc + density[(u, v)].clone() * (h_core[(u, v)].clone() + fock[(u, v)].clone());
        }
    }
    acc
}

/// `sum_{i<j} Z_i Z_j / |R_i - R_j|`.
pub fn nuclear_repulsion<S: Scalar>(atoms: &[Atom<S>]) -> Result<S> {
    let mut acc = S::zero();
    for i in 0..atoms.len() {
        for j in (i + 1)..atoms.len() {
            let mut r2 = S::zero();
            for k in 0..3 {
                let d = atoms[i].position[k].clone() - atoms[j].position[k].clone();
                r2 = r2 + d.clone() * d;
            }
            if r2.value() <= 1e-20 {
                return Err(Error::SingularGeometry(format!(
                    "atoms {i} and {j} are coincident"
                )));
            }
            let zz = (atoms[i].atomic_number * atoms[j].atomic_number) as f64;
            acc = acc + r2.sqrt().recip().scale(zz);
        }
    }
    Ok(acc)
}

/// Runs the SCF loop on precomputed integral tables.
pub fn scf_solve_with_tables<S: Scalar>(
    mol: &Molecule<S>,
    tables: &IntegralTables<S>,
    config: &ScfConfig,
) -> Result<ScfResult<S>> {
    let m = mol.n_basis();
    let n_occ = mol.n_occupied();
    if n_occ > m {
        return Err(Error::Input(format!(
            "{} occupied orbitals exceed {} basis functions",
            n_occ, m
        )));
    }
    let h_core = core_hamiltonian(tables);
    let x = orthogonalizer(&tables.overlap)?;

    // Zero initial coefficients: the first Fock matrix is the bare core
    // Hamiltonian.
    let mut density: DensityMatrix<S> = Array2::from_shape_fn((m, m), |_| S::zero());
    let mut previous_energy = f64::INFINITY;
    let mut result: Option<ScfState<S>> = None;

    for iteration in 0..config.max_iterations {
        let (j, k) = coulomb_exchange(&density, &tables.repulsion);
        let fock = fock_matrix(&h_core, &j, &k);
        let energy = electronic_energy(&density, &h_core, &fock);

        let fock_prime = matmul_tn(&x, &matmul(&fock, &x));
        let (orbital_energies, c_prime) = jacobi_eigh(&fock_prime)?;
        let coefficients = matmul(&x, &c_prime);
        let mut new_density = density_from_coefficients(&coefficients, n_occ);
        if config.mixing > 0.0 {
            let lambda = config.mixing;
            new_density = Array2::from_shape_fn((m, m), |(u, v)| {
                new_density[(u, v)].scale(1.0 - lambda) + density[(u, v)].scale(lambda)
            });
        }

        let delta_p = max_abs_diff(&new_density, &density);
        let delta_e = (energy.value() - previous_energy).abs();
        previous_energy = energy.value();
        density = new_density;

        if delta_p < config.tol_p && delta_e < config.tol_e {
            result = Some(ScfState {
                coefficients,
                density: density.clone(),
                fock,
                orbital_energies,
                iteration,
                delta_p,
                delta_e,
            });
            break;
        }
        if iteration == config.max_iterations - 1 {
            return Err(Error::ScfNonConvergence {
                iterations: config.max_iterations,
                delta_p,
                delta_e,
            });
        }
    }

    let state = result.expect("loop either converged or returned an error");
    // Energy at the converged density, with J/K rebuilt so the reported
    // value is self-consistent.
    let (j, k) = coulomb_exchange(&state.density, &tables.repulsion);
    let fock = fock_matrix(&h_core, &j, &k);
    let electronic = electronic_energy(&state.density, &h_core, &fock);
    let nuclear = nuclear_repulsion(&mol.atoms)?;
    let total = electronic.clone() + nuclear.clone();

    let mut degenerate = false;
    for w in state.orbital_energies.windows(2) {
        if (w[1].value() - w[0].value()).abs() < DEGENERACY_GAP {
            degenerate = true;
        }
    }
    let iterations_used = state.iteration + 1;
    Ok(ScfResult {
        state: ScfState { fock, ..state },
        electronic_energy: electronic,
        nuclear_repulsion: nuclear,
        total_energy: total,
        iterations_used,
        degenerate,
    })
}

/// Builds the integral tables and runs the SCF loop.
pub fn scf_solve<S: Scalar>(mol: &Molecule<S>, config: &ScfConfig) -> Result<ScfResult<S>> {
    let tables = integral_tables(mol)?;
    scf_solve_with_tables(mol, &tables, config)
}

/// Total Hartree-Fock energy as a differentiable scalar.
pub fn hf_energy<S: Scalar>(mol: &Molecule<S>) -> Result<S> {
    Ok(scf_solve(mol, &ScfConfig::default())?.total_energy)
}
