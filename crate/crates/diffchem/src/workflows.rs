//! End-to-end algorithms: VQE ground states, penalty-method excited
//! states, potential-energy-surface scans, nuclear forces, joint
//! circuit/geometry/basis optimization, energy Hessians via response
//! equations, and normal modes.
//!
//! Everything uses plain fixed-step gradient descent. Derivatives with
//! respect to Hamiltonian parameters come from forward-mode duals flowing
//! through the Hamiltonian coefficients with the circuit state held fixed;
//! derivatives with respect to circuit parameters come from parameter-shift
//! rules. Nothing here draws random numbers.

use ndarray::Array2;

use crate::autodiff::{Dual, Scalar};
use crate::circuits::{
    expectation, parameter_shift_gradient, parameter_shift_gradient_of, parameter_shift_hessian,
    pauli_expectation, prepare_hf_state, run, Circuit, StateVector,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{molecular_hamiltonian, MolecularHamiltonian, SparseHamiltonian};
use crate::linalg::{jacobi_eigh, pseudo_solve_symmetric, solve_dense};
use crate::molecule::{pack_parameters, unpack_parameters, DiffFlags, Molecule, ParamKey};
use crate::scf::ScfConfig;

/// Energy rise above the starting point that counts as divergence.
const DIVERGENCE_MARGIN: f64 = 10.0;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// VQE

#[derive(Clone, Debug)]
pub struct VqeConfig {
    /// Fixed gradient-descent step size.
    pub step: f64,
    /// Convergence threshold on the gradient infinity norm.
    pub grad_tol: f64,
    pub max_steps: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            step: 0.1,
            grad_tol: 1e-7,
            max_steps: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VqeResult {
    pub parameters: Vec<f64>,
    /// `<H>` at the final parameters (penalty terms excluded).
    pub energy: f64,
    pub iterations: usize,
    /// Cost value at every visited parameter vector; length iterations + 1.
    pub energy_history: Vec<f64>,
    pub gradient_norm: f64,
    /// Full penalized cost at the final parameters, when penalties were used.
    pub penalized_cost: Option<f64>,
}

fn descend(
    circuit: &Circuit,
    theta0: &[f64],
    initial: &StateVector,
    config: &VqeConfig,
    cost: &(dyn Fn(&StateVector) -> Result<f64> + Sync),
) -> Result<(Vec<f64>, Vec<f64>, usize, f64)> {
    if theta0.len() != circuit.n_parameters {
        return Err(Error::Input(format!(
            "{} initial parameters for a circuit with {}",
            theta0.len(),
            circuit.n_parameters
        )));
    }
    let mut theta = theta0.to_vec();
    let mut history = Vec::with_capacity(config.max_steps + 1);
    let mut gradient_norm;
    let mut iterations = 0;
    let e0 = cost(&run(circuit, &theta, initial)?)?;
    history.push(e0);
    loop {
        let grad = parameter_shift_gradient_of(circuit, &theta, initial, cost)?;
        gradient_norm = max_abs(&grad);
        if gradient_norm < config.grad_tol || iterations >= config.max_steps {
            break;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= config.step * g;
        }
        iterations += 1;
        let e = cost(&run(circuit, &theta, initial)?)?;
        history.push(e);
        if e > e0 + DIVERGENCE_MARGIN {
            return Err(Error::Divergence {
                energy: e,
                initial: e0,
                allowed: DIVERGENCE_MARGIN,
            });
        }
    }
    Ok((theta, history, iterations, gradient_norm))
}

/// Minimizes `<psi(theta)|H|psi(theta)>` by fixed-step gradient descent
/// with parameter-shift gradients.
pub fn vqe_minimize(
    hamiltonian: &SparseHamiltonian,
    circuit: &Circuit,
    theta0: &[f64],
    initial: &StateVector,
    config: &VqeConfig,
) -> Result<VqeResult> {
    let cost = |state: &StateVector| expectation(state, hamiltonian);
    let (parameters, energy_history, iterations, gradient_norm) =
        descend(circuit, theta0, initial, config, &cost)?;
    let energy = cost(&run(circuit, &parameters, initial)?)?;
    Ok(VqeResult {
        parameters,
        energy,
        iterations,
        energy_history,
        gradient_norm,
        penalized_cost: None,
    })
}

// ---------------------------------------------------------------------------
// Excited states

/// Penalized lower states and their weights for excited-state searches.
#[derive(Clone, Debug)]
pub struct PenaltySpec {
    pub lower_states: Vec<StateVector>,
    pub betas: Vec<f64>,
}

impl PenaltySpec {
    pub fn new(lower_states: Vec<StateVector>, betas: Vec<f64>) -> Result<PenaltySpec> {
        if lower_states.len() != betas.len() {
            return Err(Error::Input(format!(
                "{} penalized states but {} betas",
                lower_states.len(),
                betas.len()
            )));
        }
        for beta in &betas {
            if *beta <= 0.0 {
                return Err(Error::Input(format!(
                    "penalty beta must be positive, got {beta}"
                )));
            }
        }
        for (i, s) in lower_states.iter().enumerate() {
            if (s.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::Input(format!(
                    "penalized state {i} is not normalized (norm {})",
                    s.norm()
                )));
            }
        }
        Ok(PenaltySpec {
            lower_states,
            betas,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.lower_states.is_empty()
    }
}

/// Twice the Gershgorin bound on the spectral radius: a penalty weight
/// guaranteed to exceed any gap of `h` without knowing the spectrum.
pub fn default_penalty_beta(h: &SparseHamiltonian) -> f64 {
    let mut row_sums = vec![0.0; h.dim];
    for (r, _, v) in h.entries() {
        row_sums[r] += v.norm();
    }
    2.0 * row_sums.iter().fold(0.0f64, |m, x| m.max(*x))
}

/// Minimizes `<H> + sum_i beta_i |<psi|psi_i>|^2`. The reported energy is
/// the bare `<H>`; the penalized cost is reported alongside.
pub fn excited_state_minimize(
    hamiltonian: &SparseHamiltonian,
    circuit: &Circuit,
    theta0: &[f64],
    initial: &StateVector,
    penalty: &PenaltySpec,
    config: &VqeConfig,
) -> Result<VqeResult> {
    if penalty.is_empty() {
        return vqe_minimize(hamiltonian, circuit, theta0, initial, config);
    }
    for s in &penalty.lower_states {
        if s.dim() != hamiltonian.dim {
            return Err(Error::Input(
                "penalized state dimension does not match the Hamiltonian".into(),
            ));
        }
    }
    let cost = |state: &StateVector| -> Result<f64> {
        let mut value = expectation(state, hamiltonian)?;
        for (lower, beta) in penalty.lower_states.iter().zip(&penalty.betas) {
            value += beta * crate::circuits::state_overlap(state, lower)?;
        }
        Ok(value)
    };
    let (parameters, energy_history, iterations, gradient_norm) =
        descend(circuit, theta0, initial, config, &cost)?;
    let final_state = run(circuit, &parameters, initial)?;
    let energy = expectation(&final_state, hamiltonian)?;
    let penalized = cost(&final_state)?;
    Ok(VqeResult {
        parameters,
        energy,
        iterations,
        energy_history,
        gradient_norm,
        penalized_cost: Some(penalized),
    })
}

// ---------------------------------------------------------------------------
// Differentiable Hamiltonian expectation helpers

/// `<psi|H(x)|psi>` with the state held fixed, as a scalar carrying the
/// Hamiltonian-parameter derivatives: `sum_j h_j(x) <P_j> + const(x)`.
fn fixed_state_energy<S: Scalar>(ham: &MolecularHamiltonian<S>, state: &StateVector) -> S {
    let mut acc = ham.core_constant.clone();
    for (c, w) in &ham.pauli.terms {
        acc = acc + c.scale(pauli_expectation(state, w));
    }
    acc
}

/// Builds the molecular Hamiltonian over first-order duals seeded on the
/// flagged parameters of `template`.
fn dual_hamiltonian(
    template: &Molecule<f64>,
    scf: &ScfConfig,
) -> Result<(Vec<f64>, MolecularHamiltonian<Dual<f64>>)> {
    let packed = pack_parameters(template);
    let seeds = crate::autodiff::seed(&packed.values);
    let mol = unpack_parameters(template, &seeds)?;
    let ham = molecular_hamiltonian(&mol, scf)?;
    Ok((packed.values, ham))
}

/// Primal sparse matrix of a dual-valued Hamiltonian.
fn sparse_of_dual(ham: &MolecularHamiltonian<Dual<f64>>) -> Result<SparseHamiltonian> {
    let mut total = ham.pauli.values();
    total.terms.push((
        ham.core_constant.value(),
        crate::hamiltonian::PauliWord::identity(),
    ));
    crate::hamiltonian::simplify(&total, 0.0).to_sparse()
}

// ---------------------------------------------------------------------------
// Forces

#[derive(Clone, Debug)]
pub struct ForcesResult {
    /// `-dE/dR` in hartree/bohr, atom-major (x, y, z per atom).
    pub forces: Vec<f64>,
    /// `dE/dR`, the raw energy gradient.
    pub energy_gradient: Vec<f64>,
    pub energy: f64,
    /// Set when the circuit gradient norm exceeds 1e-6 at `theta`, in which
    /// case the fixed-state gradient is not the full energy derivative.
    pub warning: Option<String>,
}

/// Nuclear forces at fixed optimal circuit parameters: the expectation of
/// the Hamiltonian gradient, which equals the full energy gradient at a
/// variational stationary point.
pub fn nuclear_forces(
    mol: &Molecule<f64>,
    circuit: &Circuit,
    theta: &[f64],
    scf: &ScfConfig,
) -> Result<ForcesResult> {
    let template = mol.with_diff_flags(DiffFlags::coordinates_only());
    let (_, ham) = dual_hamiltonian(&template, scf)?;
    let hf = prepare_hf_state(mol.n_electrons, 2 * mol.n_basis())?;
    let state = run(circuit, theta, &hf)?;

    let sparse = sparse_of_dual(&ham)?;
    let circuit_grad = parameter_shift_gradient(circuit, theta, &sparse, &hf)?;
    let circuit_norm = max_abs(&circuit_grad);
    let warning = if circuit_norm > 1e-6 {
        Some(format!(
            "circuit gradient norm {circuit_norm:.3e} exceeds 1e-6; \
             Hellmann-Feynman forces assume a stationary state"
        ))
    } else {
        None
    };

    let energy_dual = fixed_state_energy(&ham, &state);
    let n = 3 * mol.n_atoms();
    let mut gradient = Vec::with_capacity(n);
    for i in 0..n {
        let g = energy_dual.tangent(i);
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("force component {i}")));
        }
        gradient.push(g);
    }
    Ok(ForcesResult {
        forces: gradient.iter().map(|g| -g).collect(),
        energy_gradient: gradient,
        energy: energy_dual.value(),
        warning,
    })
}

// ---------------------------------------------------------------------------
// Potential energy surface scans

#[derive(Clone, Debug)]
pub struct PesPoint {
    pub coordinates: Vec<[f64; 3]>,
    pub energy: Option<f64>,
    pub vqe: Option<VqeResult>,
    pub error: Option<String>,
}

/// Ground-state energies over a grid of geometries, warm-starting each VQE
/// from the previous converged parameters. Per-point failures are recorded
/// and the scan continues; a fully failed scan is an error.
pub fn pes_scan(
    template: &Molecule<f64>,
    geometries: &[Vec<[f64; 3]>],
    circuit: &Circuit,
    vqe: &VqeConfig,
    scf: &ScfConfig,
) -> Result<Vec<PesPoint>> {
    let mut points = Vec::with_capacity(geometries.len());
    let mut theta = vec![0.0; circuit.n_parameters];
    let hf = prepare_hf_state(template.n_electrons, 2 * template.n_basis())?;
    let mut any_ok = false;
    for geometry in geometries {
        let attempt = (|| -> Result<VqeResult> {
            let mol = template.with_coordinates(geometry)?;
            let ham = molecular_hamiltonian(&mol, scf)?;
            vqe_minimize(&ham.to_sparse()?, circuit, &theta, &hf, vqe)
        })();
        match attempt {
            Ok(result) => {
                theta = result.parameters.clone();
                any_ok = true;
                points.push(PesPoint {
                    coordinates: geometry.clone(),
                    energy: Some(result.energy),
                    vqe: Some(result),
                    error: None,
                });
            }
            Err(err) => points.push(PesPoint {
                coordinates: geometry.clone(),
                energy: None,
                vqe: None,
                error: Some(err.to_string()),
            }),
        }
    }
    if !any_ok && !geometries.is_empty() {
        return Err(Error::Input("every scan point failed".into()));
    }
    Ok(points)
}

// ---------------------------------------------------------------------------
// Joint optimization

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JointSelection {
    pub circuit: bool,
    pub coordinates: bool,
    pub exponents: bool,
    pub coefficients: bool,
}

impl JointSelection {
    fn any_hamiltonian(&self) -> bool {
        self.coordinates || self.exponents || self.coefficients
    }

    fn diff_flags(&self) -> DiffFlags {
        DiffFlags {
            coordinates: self.coordinates,
            exponents: self.exponents,
            coefficients: self.coefficients,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JointConfig {
    /// Circuit gradient-descent steps per outer round.
    pub circuit_steps_per_round: usize,
    pub max_rounds: usize,
    /// Convergence threshold on every selected gradient class.
    pub grad_tol: f64,
    pub circuit_step: f64,
    pub coordinate_step: f64,
    pub basis_step: f64,
    pub scf: ScfConfig,
}

impl Default for JointConfig {
    fn default() -> Self {
        JointConfig {
            circuit_steps_per_round: 20,
            max_rounds: 500,
            grad_tol: 1e-5,
            circuit_step: 0.1,
            coordinate_step: 0.05,
            basis_step: 0.01,
            scf: ScfConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JointResult {
    pub parameters: Vec<f64>,
    pub molecule: Molecule<f64>,
    pub energy: f64,
    pub rounds: usize,
    /// Energy after each outer round.
    pub energy_trace: Vec<f64>,
    pub converged: bool,
    pub circuit_gradient_norm: f64,
    pub hamiltonian_gradient_norm: f64,
}

/// Alternating gradient descent over circuit parameters and the selected
/// Hamiltonian parameter classes.
pub fn joint_optimize(
    mol: &Molecule<f64>,
    circuit: &Circuit,
    theta0: &[f64],
    what: JointSelection,
    config: &JointConfig,
) -> Result<JointResult> {
    if !what.circuit && !what.any_hamiltonian() {
        return Err(Error::Input(
            "joint optimization needs at least one selected parameter class".into(),
        ));
    }
    let mut molecule = mol.clone();
    let mut theta = theta0.to_vec();
    let hf = prepare_hf_state(mol.n_electrons, 2 * mol.n_basis())?;
    let mut trace = Vec::new();
    let mut initial_energy: Option<f64> = None;
    let mut circuit_norm = 0.0;
    let mut ham_norm = 0.0;
    let mut converged = false;
    let mut rounds = 0;

    for round in 0..config.max_rounds {
        rounds = round + 1;
        let template = molecule.with_diff_flags(what.diff_flags());
        let (ham_dual, sparse) = if what.any_hamiltonian() {
            let (_, h) = dual_hamiltonian(&template, &config.scf)?;
            let sp = sparse_of_dual(&h)?;
            (Some(h), sp)
        } else {
            let h = molecular_hamiltonian(&molecule, &config.scf)?;
            (None, h.to_sparse()?)
        };

        if what.circuit {
            for _ in 0..config.circuit_steps_per_round {
                let grad = parameter_shift_gradient(circuit, &theta, &sparse, &hf)?;
                circuit_norm = max_abs(&grad);
                if circuit_norm < config.grad_tol {
                    break;
                }
                for (t, g) in theta.iter_mut().zip(&grad) {
                    *t -= config.circuit_step * g;
                }
            }
            let grad = parameter_shift_gradient(circuit, &theta, &sparse, &hf)?;
            circuit_norm = max_abs(&grad);
        }

        let state = run(circuit, &theta, &hf)?;
        let energy = expectation(&state, &sparse)?;
        let e0 = *initial_energy.get_or_insert(energy);
        if energy > e0 + DIVERGENCE_MARGIN {
            return Err(Error::Divergence {
                energy,
                initial: e0,
                allowed: DIVERGENCE_MARGIN,
            });
        }
        trace.push(energy);

        if let Some(ham) = &ham_dual {
            let packed = pack_parameters(&template);
            let energy_dual = fixed_state_energy(ham, &state);
            let mut gradient = Vec::with_capacity(packed.values.len());
            for i in 0..packed.values.len() {
                let g = energy_dual.tangent(i);
                if !g.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "Hamiltonian-parameter gradient component {i}"
                    )));
                }
                gradient.push(g);
            }
            ham_norm = max_abs(&gradient);
            let mut new_values = packed.values.clone();
            for ((value, key), g) in new_values
                .iter_mut()
                .zip(&packed.layout.keys)
                .zip(&gradient)
            {
                let step = match key {
                    ParamKey::Coordinate { .. } => config.coordinate_step,
                    ParamKey::Exponent { .. } | ParamKey::Coefficient { .. } => config.basis_step,
                };
                let mut next = *value - step * g;
                // keep exponents positive: halve instead of crossing zero
                if matches!(key, ParamKey::Exponent { .. }) && next <= 0.0 {
                    next = *value / 2.0;
                }
                *value = next;
            }
            molecule = unpack_parameters(&template, &new_values)?;
        }

        let circuit_ok = !what.circuit || circuit_norm < config.grad_tol;
        let ham_ok = !what.any_hamiltonian() || ham_norm < config.grad_tol;
        if circuit_ok && ham_ok {
            converged = true;
            break;
        }
    }

    let final_ham = molecular_hamiltonian(&molecule, &config.scf)?;
    let sparse = final_ham.to_sparse()?;
    let state = run(circuit, &theta, &hf)?;
    let energy = expectation(&state, &sparse)?;
    Ok(JointResult {
        parameters: theta,
        molecule,
        energy,
        rounds,
        energy_trace: trace,
        converged,
        circuit_gradient_norm: circuit_norm,
        hamiltonian_gradient_norm: ham_norm,
    })
}

// ---------------------------------------------------------------------------
// Hessians and normal modes

#[derive(Clone, Debug)]
pub struct HessianResult {
    /// Symmetrized 3N x 3N energy Hessian in hartree/bohr^2.
    pub hessian: Array2<f64>,
    /// Response solutions: row a, column i holds d(theta*_a)/d(R_i).
    pub response: Array2<f64>,
    /// Eigenvalues of the (optionally mass-weighted) Hessian.
    pub frequencies_squared: Vec<f64>,
    /// Matching eigenvector columns.
    pub modes: Array2<f64>,
    /// Max asymmetry of the assembled Hessian before symmetrization.
    pub asymmetry: f64,
    /// Relative residual of the response linear systems.
    pub response_residual: f64,
    /// Set when the circuit-parameter Hessian was singular and a
    /// least-squares pseudo-solve was used.
    pub singular_response: bool,
}

/// Energy second derivatives with respect to nuclear coordinates at fixed
/// optimal circuit parameters, assembled from the Hamiltonian-coefficient
/// Hessian, the mixed circuit/coordinate derivatives, and the response of
/// the optimal parameters from the linear response equations.
pub fn energy_hessian(
    mol: &Molecule<f64>,
    circuit: &Circuit,
    theta: &[f64],
    scf: &ScfConfig,
) -> Result<HessianResult> {
    let template = mol.with_diff_flags(DiffFlags::coordinates_only());
    let packed = pack_parameters(&template);
    let n = packed.values.len();
    let hf = prepare_hf_state(mol.n_electrons, 2 * mol.n_basis())?;

    // Second-order duals through the Hamiltonian coefficients.
    let vars: Vec<Dual<Dual<f64>>> = packed
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| Dual::variable(Dual::variable(x, i, n), i, n))
        .collect();
    let mol_dd = unpack_parameters(&template, &vars)?;
    let ham_dd = molecular_hamiltonian(&mol_dd, scf)?;

    let state = run(circuit, theta, &hf)?;
    let sparse = {
        let mut total = ham_dd.pauli.values();
        total.terms.push((
            ham_dd.core_constant.value(),
            crate::hamiltonian::PauliWord::identity(),
        ));
        crate::hamiltonian::simplify(&total, 0.0).to_sparse()?
    };
    let circuit_grad = parameter_shift_gradient(circuit, theta, &sparse, &hf)?;
    if max_abs(&circuit_grad) > 1e-6 {
        return Err(Error::Contract(format!(
            "energy_hessian requires converged circuit parameters (gradient norm {:.3e})",
            max_abs(&circuit_grad)
        )));
    }

    // <d2H/dRi dRj> with the state fixed.
    let energy_dd = fixed_state_energy(&ham_dd, &state);
    let mut expectation_hessian = Array2::zeros((n, n));
    for i in 0..n {
        let ti = energy_dd.tangent(i);
        for j in 0..n {
            expectation_hessian[(i, j)] = ti.tangent(j).value();
        }
    }

    // Mixed derivatives: B[a][i] = d/d(theta_a) <dH/dR_i>.
    let n_params = circuit.n_parameters;
    let mut mixed = Array2::zeros((n_params, n));
    for i in 0..n {
        // observable dH/dR_i with the word structure held fixed
        let terms: Vec<(f64, crate::hamiltonian::PauliWord)> = ham_dd
            .pauli
            .terms
            .iter()
            .map(|(c, w)| (c.tangent(i).value(), w.clone()))
            .collect();
        let observable = crate::hamiltonian::PauliSum::new(ham_dd.n_qubits, terms)?.to_sparse()?;
        let grad = parameter_shift_gradient(circuit, theta, &observable, &hf)?;
        for a in 0..n_params {
            mixed[(a, i)] = grad[a];
        }
    }

    // Circuit-parameter Hessian and the response equations.
    let theta_hessian = parameter_shift_hessian(circuit, theta, &sparse, &hf)?;
    let mut response = Array2::zeros((n_params, n));
    let mut singular = false;
    let mut residual_num: f64 = 0.0;
    let mut residual_den: f64 = 0.0;
    for i in 0..n {
        let rhs: Vec<f64> = (0..n_params).map(|a| -mixed[(a, i)]).collect();
        let solution = match solve_dense(&theta_hessian, &rhs, 1e-10) {
            Some(x) => x,
            None => {
                singular = true;
                pseudo_solve_symmetric(&theta_hessian, &rhs, 1e-10)?
            }
        };
        for a in 0..n_params {
            response[(a, i)] = solution[a];
            let mut lhs = 0.0;
            for b in 0..n_params {
                lhs += theta_hessian[(a, b)] * solution[b];
            }
            residual_num += (lhs - rhs[a]) * (lhs - rhs[a]);
            residual_den += rhs[a] * rhs[a];
        }
    }
    let response_residual = if residual_den > 0.0 {
        (residual_num / residual_den).sqrt()
    } else {
        0.0
    };

    // Assemble, check asymmetry, symmetrize.
    let mut hessian = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = expectation_hessian[(i, j)];
            for a in 0..n_params {
                acc += response[(a, i)] * mixed[(a, j)];
            }
            hessian[(i, j)] = acc;
        }
    }
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asymmetry = asymmetry.max((hessian[(i, j)] - hessian[(j, i)]).abs());
        }
    }
    let hessian =
        Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (hessian[(i, j)] + hessian[(j, i)]));

    let (frequencies_squared, modes) = normal_modes(&hessian, None)?;
    Ok(HessianResult {
        hessian,
        response,
        frequencies_squared,
        modes,
        asymmetry,
        response_residual,
        singular_response: singular,
    })
}

/// Eigen-decomposition of the (optionally mass-weighted) Hessian.
///
/// Without masses this is the plain energy Hessian; with masses (one per
/// atom, in electron-mass units) entries are divided by `sqrt(m_i m_j)`.
/// Eigenvalues are squared angular frequencies in atomic units; negative
/// values indicate imaginary modes.
pub fn normal_modes(
    hessian: &Array2<f64>,
    masses: Option<&[f64]>,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let (n, m) = hessian.dim();
    if n != m {
        return Err(Error::Input("Hessian must be square".into()));
    }
    let weighted = match masses {
        None => hessian.clone(),
        Some(masses) => {
            if masses.len() * 3 != n {
                return Err(Error::Input(format!(
                    "{} masses for {} coordinates",
                    masses.len(),
                    n
                )));
            }
            Array2::from_shape_fn((n, n), |(i, j)| {
                hessian[(i, j)] / (masses[i / 3] * masses[j / 3]).sqrt()
            })
        }
    };
    let (evals, vecs) = jacobi_eigh(&weighted)?;
    Ok((evals, vecs))
}
