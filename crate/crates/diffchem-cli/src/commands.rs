//! Command execution: each subcommand builds its inputs, runs the library,
//! and emits one JSON report.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use diffchem::autodiff::{grad, hessian_with_asymmetry, Scalar};
use diffchem::circuits::{all_singles_doubles, prepare_hf_state, Circuit};
use diffchem::hamiltonian::{group_commuting, molecular_hamiltonian, write_pauli_text};
use diffchem::molecule::{pack_parameters, unpack_parameters, DiffFlags, Molecule, ParamKey};
use diffchem::scf::{scf_solve, ScfConfig};
use diffchem::workflows::{
    energy_hessian, joint_optimize, nuclear_forces, pes_scan, vqe_minimize, JointConfig,
    JointSelection, VqeConfig, VqeResult,
};
use diffchem::{Error, Result};

use crate::input::MoleculeInput;
use crate::{
    Axis, Command, GradClass, HamiltonianArgs, HessianArgs, HfArgs, OptClass, OptimizeArgs,
    ScanArgs, Theta0, VqeArgs,
};

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::UnsupportedElement { .. } => "unsupported-element",
        Error::ClosedShellViolation { .. } => "closed-shell-violation",
        Error::Input(_) => "input",
        Error::Layout { .. } => "layout",
        Error::Domain(_) => "domain",
        Error::LinearDependence(_) => "linear-dependence",
        Error::ScfNonConvergence { .. } => "scf-non-convergence",
        Error::EigenNonConvergence(_) => "eigen-non-convergence",
        Error::SingularGeometry(_) => "singular-geometry",
        Error::ResourceLimit(_) => "resource-limit",
        Error::NonHermitian { .. } => "non-hermitian",
        Error::UnsupportedGradient(_) => "unsupported-gradient",
        Error::Divergence { .. } => "divergence",
        Error::Contract(_) => "contract",
        Error::NonFinite(_) => "non-finite",
        Error::Internal(_) => "internal",
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    version: &'static str,
    inputs_echo: Value,
    #[serde(flatten)]
    body: T,
    timing_ms: f64,
}

fn emit<T: Serialize>(
    command: &'static str,
    inputs_echo: Value,
    body: T,
    started: Instant,
    output: &Option<std::path::PathBuf>,
) -> Result<()> {
    let report = Report {
        command,
        version: env!("CARGO_PKG_VERSION"),
        inputs_echo,
        body,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let text = crate::report::to_json_string(&report)
        .map_err(|e| Error::Internal(format!("report serialization: {e}")))?;
    match output {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn scf_config(args: &crate::ScfArgs) -> ScfConfig {
    ScfConfig {
        max_iterations: args.max_iterations,
        tol_p: args.tol_p,
        tol_e: args.tol_e,
        mixing: args.mixing,
    }
}

fn param_key_label(key: &ParamKey) -> String {
    match key {
        ParamKey::Coordinate { atom, axis } => {
            format!("coordinate:{atom}:{}", ["x", "y", "z"][*axis])
        }
        ParamKey::Exponent { shell, primitive } => format!("exponent:{shell}:{primitive}"),
        ParamKey::Coefficient { shell, primitive } => {
            format!("coefficient:{shell}:{primitive}")
        }
    }
}

/// Deterministic uniform values in [-pi, pi) from a splitmix64 stream.
fn random_theta(seed: u64, n: usize) -> Vec<f64> {
    let mut state = seed;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            let unit = (z >> 11) as f64 / (1u64 << 53) as f64;
            (2.0 * unit - 1.0) * std::f64::consts::PI
        })
        .collect()
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Hf(args) => run_hf(args),
        Command::Hamiltonian(args) => run_hamiltonian(args),
        Command::Vqe(args) => run_vqe_command(args),
        Command::Forces(args) => run_forces(args),
        Command::Hessian(args) => run_hessian(args),
        Command::Optimize(args) => run_optimize(args),
        Command::Scan(args) => run_scan(args),
    }
}

// ---------------------------------------------------------------------------
// hf

#[derive(Serialize)]
struct GradientBody {
    layout: Vec<String>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct IntegralsBody {
    /// Row-major matrix dumps.
    overlap: Vec<Vec<f64>>,
    kinetic: Vec<Vec<f64>>,
    attraction: Vec<Vec<f64>>,
    /// Canonical-index/value pairs of the repulsion tensor.
    repulsion: Vec<([usize; 4], f64)>,
}

#[derive(Serialize)]
struct HfBody {
    total_energy: f64,
    electronic_energy: f64,
    nuclear_repulsion: f64,
    orbital_energies: Vec<f64>,
    iterations: usize,
    degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    gradient: Option<GradientBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integrals: Option<IntegralsBody>,
}

fn run_hf(args: HfArgs) -> Result<()> {
    let started = Instant::now();
    let input = MoleculeInput::load(&args.common.molecule)?;
    let mol = input.to_molecule()?;
    let config = scf_config(&args.scf);
    let result = scf_solve(&mol, &config)?;

    let gradient = if args.grad.is_empty() {
        None
    } else {
        let flags = DiffFlags {
            coordinates: args.grad.contains(&GradClass::Coordinates),
            exponents: args.grad.contains(&GradClass::Exponents),
            coefficients: args.grad.contains(&GradClass::Coefficients),
        };
        let template = mol.with_diff_flags(flags);
        let packed = pack_parameters(&template);
        let values = grad(
            |x| {
                let m = unpack_parameters(&template, x).expect("matching layout");
                scf_solve(&m, &config)
                    .expect("SCF converged at the base point")
                    .total_energy
            },
            &packed.values,
        )?;
        Some(GradientBody {
            layout: packed.layout.keys.iter().map(param_key_label).collect(),
            values,
        })
    };

    let hessian = if args.hessian {
        let template = mol.with_diff_flags(DiffFlags::coordinates_only());
        let packed = pack_parameters(&template);
        let (h, _) = hessian_with_asymmetry(
            |x| {
                let m = unpack_parameters(&template, x).expect("matching layout");
                scf_solve(&m, &config)
                    .expect("SCF converged at the base point")
                    .total_energy
            },
            &packed.values,
        )?;
        let n = packed.values.len();
        Some(
            (0..n)
                .map(|i| (0..n).map(|j| h[(i, j)]).collect())
                .collect(),
        )
    } else {
        None
    };

    let integrals = if args.dump_integrals {
        let tables = diffchem::integrals::integral_tables(&mol)?;
        let m = mol.n_basis();
        let rows = |a: &ndarray::Array2<f64>| -> Vec<Vec<f64>> {
            (0..m).map(|i| (0..m).map(|j| a[(i, j)]).collect()).collect()
        };
        Some(IntegralsBody {
            overlap: rows(&tables.overlap),
            kinetic: rows(&tables.kinetic),
            attraction: rows(&tables.attraction),
            repulsion: tables
                .repulsion
                .canonical_entries()
                .map(|((i, j, k, l), v)| ([i, j, k, l], *v))
                .collect(),
        })
    } else {
        None
    };

    let body = HfBody {
        total_energy: result.total_energy,
        electronic_energy: result.electronic_energy,
        nuclear_repulsion: result.nuclear_repulsion,
        orbital_energies: result.state.orbital_energies.clone(),
        iterations: result.iterations_used,
        degenerate: result.degenerate,
        gradient,
        hessian,
        integrals,
    };
    let echo = json!({
        "molecule": input,
        "options": {
            "grad": args.grad.iter().map(|g| format!("{g:?}").to_lowercase()).collect::<Vec<_>>(),
            "hessian": args.hessian,
            "dump_integrals": args.dump_integrals,
            "max_iterations": args.scf.max_iterations,
            "tol_p": args.scf.tol_p,
            "tol_e": args.scf.tol_e,
            "mixing": args.scf.mixing,
        }
    });
    emit("hf", echo, body, started, &args.common.output)
}

// ---------------------------------------------------------------------------
// hamiltonian

#[derive(Serialize)]
struct HamiltonianBody {
    n_qubits: usize,
    constant: f64,
    n_terms: usize,
    n_groups: usize,
    scf_total_energy: f64,
    pauli_text: String,
    /// Sparse matrix of the total Hamiltonian as [row, col, re, im] rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    sparse_matrix: Option<Vec<(usize, usize, f64, f64)>>,
}

fn run_hamiltonian(args: HamiltonianArgs) -> Result<()> {
    let started = Instant::now();
    let input = MoleculeInput::load(&args.common.molecule)?;
    let mol = input.to_molecule()?;
    let config = scf_config(&args.scf);
    let ham = molecular_hamiltonian(&mol, &config)?;
    let text = write_pauli_text(ham.n_qubits, ham.core_constant, &ham.pauli);
    if let Some(path) = &args.text_output {
        std::fs::write(path, &text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let sparse_matrix = if args.sparse {
        let sp = ham.to_sparse()?;
        Some(sp.entries().map(|(r, c, v)| (r, c, v.re, v.im)).collect())
    } else {
        None
    };
    let body = HamiltonianBody {
        n_qubits: ham.n_qubits,
        constant: ham.core_constant,
        n_terms: ham.pauli.n_terms(),
        n_groups: group_commuting(&ham.pauli).len(),
        scf_total_energy: ham.scf.total_energy,
        pauli_text: text,
        sparse_matrix,
    };
    let echo = json!({ "molecule": input, "options": { "sparse": args.sparse } });
    emit("hamiltonian", echo, body, started, &args.common.output)
}

// ---------------------------------------------------------------------------
// vqe and friends

#[derive(Serialize)]
struct VqeBody {
    energy: f64,
    scf_total_energy: f64,
    n_qubits: usize,
    ansatz: String,
    parameters: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
    energy_history: Vec<f64>,
}

struct VqeRun {
    molecule: Molecule<f64>,
    circuit: Circuit,
    result: VqeResult,
    scf_total_energy: f64,
    ansatz_name: String,
    input: MoleculeInput,
}

fn run_vqe(args: &VqeArgs) -> Result<VqeRun> {
    let input = MoleculeInput::load(&args.common.molecule)?;
    let mol = input.to_molecule()?;
    let config = scf_config(&args.scf);
    let ham = molecular_hamiltonian(&mol, &config)?;
    let (circuit, ansatz_name) = match &args.circuit {
        Some(path) => (crate::input::load_circuit(path)?, format!("file:{}", path.display())),
        None => {
            if !args.ansatz.eq_ignore_ascii_case("all-singles-doubles") {
                return Err(Error::Input(format!(
                    "unknown ansatz {:?}; available: all-singles-doubles",
                    args.ansatz
                )));
            }
            (
                all_singles_doubles(mol.n_electrons, ham.n_qubits)?,
                args.ansatz.clone(),
            )
        }
    };
    let theta0 = match args.theta0 {
        Theta0::Zeros => vec![0.0; circuit.n_parameters],
        Theta0::Random => random_theta(args.seed, circuit.n_parameters),
    };
    let hf = prepare_hf_state(mol.n_electrons, ham.n_qubits)?;
    let vqe_config = VqeConfig {
        step: args.step,
        grad_tol: args.tol,
        max_steps: args.max_steps,
    };
    let sparse = ham.to_sparse()?;
    let result = vqe_minimize(&sparse, &circuit, &theta0, &hf, &vqe_config)?;
    Ok(VqeRun {
        molecule: mol,
        circuit,
        result,
        scf_total_energy: ham.scf.total_energy,
        ansatz_name,
        input,
    })
}

fn vqe_echo(args: &VqeArgs, input: &MoleculeInput) -> Value {
    json!({
        "molecule": input,
        "options": {
            "ansatz": args.ansatz,
            "circuit": args.circuit.as_ref().map(|p| p.display().to_string()),
            "step": args.step,
            "tol": args.tol,
            "max_steps": args.max_steps,
            "theta0": format!("{:?}", args.theta0).to_lowercase(),
            "seed": args.seed,
        }
    })
}

fn vqe_body(run: &VqeRun) -> VqeBody {
    VqeBody {
        energy: run.result.energy,
        scf_total_energy: run.scf_total_energy,
        n_qubits: run.circuit.n_qubits,
        ansatz: run.ansatz_name.clone(),
        parameters: run.result.parameters.clone(),
        iterations: run.result.iterations,
        gradient_norm: run.result.gradient_norm,
        energy_history: run.result.energy_history.clone(),
    }
}

fn run_vqe_command(args: VqeArgs) -> Result<()> {
    let started = Instant::now();
    let run = run_vqe(&args)?;
    let echo = vqe_echo(&args, &run.input);
    let body = vqe_body(&run);
    emit("vqe", echo, body, started, &args.common.output)
}

// ---------------------------------------------------------------------------
// forces

#[derive(Serialize)]
struct ForcesBody {
    #[serde(flatten)]
    vqe: VqeBody,
    forces: Vec<f64>,
    energy_gradient: Vec<f64>,
    force_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn run_forces(args: VqeArgs) -> Result<()> {
    let started = Instant::now();
    let run = run_vqe(&args)?;
    let forces = nuclear_forces(
        &run.molecule,
        &run.circuit,
        &run.result.parameters,
        &scf_config(&args.scf),
    )?;
    let body = ForcesBody {
        vqe: vqe_body(&run),
        force_norm: forces.forces.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        forces: forces.forces,
        energy_gradient: forces.energy_gradient,
        warning: forces.warning,
    };
    let echo = vqe_echo(&args, &run.input);
    emit("forces", echo, body, started, &args.common.output)
}

// ---------------------------------------------------------------------------
// hessian

/// Hartree to wavenumber conversion for reporting mass-weighted modes.
const HARTREE_TO_CM1: f64 = 219474.6313632;

#[derive(Serialize)]
struct HessianBody {
    #[serde(flatten)]
    vqe: VqeBody,
    hessian: Vec<Vec<f64>>,
    frequencies_squared: Vec<f64>,
    modes: Vec<Vec<f64>>,
    asymmetry: f64,
    response_residual: f64,
    singular_response: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequencies_cm1: Option<Vec<f64>>,
}

fn run_hessian(args: HessianArgs) -> Result<()> {
    let started = Instant::now();
    let run = run_vqe(&args.vqe)?;
    let scf = scf_config(&args.vqe.scf);
    let result = energy_hessian(&run.molecule, &run.circuit, &run.result.parameters, &scf)?;
    let n = 3 * run.molecule.n_atoms();
    let to_rows = |m: &ndarray::Array2<f64>| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
    };

    let (frequencies_squared, modes, frequencies_cm1) = if args.masses.is_empty() {
        (result.frequencies_squared.clone(), to_rows(&result.modes), None)
    } else {
        let (freqs, modes) =
            diffchem::workflows::normal_modes(&result.hessian, Some(&args.masses))?;
        // negative eigenvalues reported as negative wavenumbers (imaginary)
        let cm1 = freqs
            .iter()
            .map(|l| l.abs().sqrt() * HARTREE_TO_CM1 * l.signum())
            .collect();
        (freqs, to_rows(&modes), Some(cm1))
    };

    let body = HessianBody {
        vqe: vqe_body(&run),
        hessian: to_rows(&result.hessian),
        frequencies_squared,
        modes,
        asymmetry: result.asymmetry,
        response_residual: result.response_residual,
        singular_response: result.singular_response,
        frequencies_cm1,
    };
    let mut echo = vqe_echo(&args.vqe, &run.input);
    echo["options"]["masses"] = json!(args.masses);
    emit("hessian", echo, body, started, &args.vqe.common.output)
}

// ---------------------------------------------------------------------------
// optimize

#[derive(Serialize)]
struct OptimizeBody {
    energy: f64,
    parameters: Vec<f64>,
    rounds: usize,
    converged: bool,
    circuit_gradient_norm: f64,
    hamiltonian_gradient_norm: f64,
    energy_trace: Vec<f64>,
    final_coordinates_bohr: Vec<[f64; 3]>,
    final_exponents: Vec<Vec<f64>>,
    final_coefficients: Vec<Vec<f64>>,
}

fn run_optimize(args: OptimizeArgs) -> Result<()> {
    let started = Instant::now();
    let input = MoleculeInput::load(&args.vqe.common.molecule)?;
    let mol = input.to_molecule()?;
    let selection = JointSelection {
        circuit: args.what.contains(&OptClass::Circuit),
        coordinates: args.what.contains(&OptClass::Coordinates),
        exponents: args.what.contains(&OptClass::Exponents),
        coefficients: args.what.contains(&OptClass::Coefficients),
    };
    let ham = molecular_hamiltonian(&mol, &scf_config(&args.vqe.scf))?;
    let (circuit, _) = match &args.vqe.circuit {
        Some(path) => (crate::input::load_circuit(path)?, String::new()),
        None => (
            all_singles_doubles(mol.n_electrons, ham.n_qubits)?,
            String::new(),
        ),
    };
    let theta0 = match args.vqe.theta0 {
        Theta0::Zeros => vec![0.0; circuit.n_parameters],
        Theta0::Random => random_theta(args.vqe.seed, circuit.n_parameters),
    };
    let config = JointConfig {
        circuit_steps_per_round: args.circuit_steps,
        max_rounds: args.rounds,
        grad_tol: args.vqe.tol,
        circuit_step: args.vqe.step,
        coordinate_step: args.coordinate_step,
        basis_step: args.basis_step,
        scf: scf_config(&args.vqe.scf),
    };
    let result = joint_optimize(&mol, &circuit, &theta0, selection, &config)?;

    let body = OptimizeBody {
        energy: result.energy,
        parameters: result.parameters.clone(),
        rounds: result.rounds,
        converged: result.converged,
        circuit_gradient_norm: result.circuit_gradient_norm,
        hamiltonian_gradient_norm: result.hamiltonian_gradient_norm,
        energy_trace: result.energy_trace.clone(),
        final_coordinates_bohr: result
            .molecule
            .atoms
            .iter()
            .map(|a| a.position)
            .collect(),
        final_exponents: result
            .molecule
            .basis_functions
            .iter()
            .map(|f| f.primitives.iter().map(|p| p.exponent).collect())
            .collect(),
        final_coefficients: result
            .molecule
            .basis_functions
            .iter()
            .map(|f| f.primitives.iter().map(|p| p.coefficient).collect())
            .collect(),
    };
    let mut echo = vqe_echo(&args.vqe, &input);
    echo["options"]["what"] = json!(args
        .what
        .iter()
        .map(|w| format!("{w:?}").to_lowercase())
        .collect::<Vec<_>>());
    echo["options"]["rounds"] = json!(args.rounds);
    echo["options"]["circuit_steps"] = json!(args.circuit_steps);
    emit("optimize", echo, body, started, &args.vqe.common.output)
}

// ---------------------------------------------------------------------------
// scan

#[derive(Serialize)]
struct ScanPointBody {
    coordinate: f64,
    coordinates_bohr: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ScanBody {
    scan_atom: usize,
    scan_axis: &'static str,
    points: Vec<ScanPointBody>,
}

fn run_scan(args: ScanArgs) -> Result<()> {
    let started = Instant::now();
    let input = MoleculeInput::load(&args.vqe.common.molecule)?;
    let mol = input.to_molecule()?;
    if args.scan_atom >= mol.n_atoms() {
        return Err(Error::Input(format!(
            "scan atom {} out of range for {} atoms",
            args.scan_atom,
            mol.n_atoms()
        )));
    }
    if args.scan_points < 1 {
        return Err(Error::Input("scan needs at least one point".into()));
    }
    let axis = match args.scan_axis {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    };
    let axis_name = ["x", "y", "z"][axis];
    let values: Vec<f64> = (0..args.scan_points)
        .map(|k| {
            if args.scan_points == 1 {
                args.scan_from
            } else {
                args.scan_from
                    + (args.scan_to - args.scan_from) * k as f64
                        / (args.scan_points - 1) as f64
            }
        })
        .collect();
    let geometries: Vec<Vec<[f64; 3]>> = values
        .iter()
        .map(|v| {
            let mut coords: Vec<[f64; 3]> = mol.atoms.iter().map(|a| a.position).collect();
            coords[args.scan_atom][axis] = *v;
            coords
        })
        .collect();

    let ham = molecular_hamiltonian(&mol, &scf_config(&args.vqe.scf))?;
    let circuit = match &args.vqe.circuit {
        Some(path) => crate::input::load_circuit(path)?,
        None => all_singles_doubles(mol.n_electrons, ham.n_qubits)?,
    };
    let vqe_config = VqeConfig {
        step: args.vqe.step,
        grad_tol: args.vqe.tol,
        max_steps: args.vqe.max_steps,
    };
    let points = pes_scan(
        &mol,
        &geometries,
        &circuit,
        &vqe_config,
        &scf_config(&args.vqe.scf),
    )?;

    let body = ScanBody {
        scan_atom: args.scan_atom,
        scan_axis: axis_name,
        points: points
            .into_iter()
            .zip(values)
            .map(|(p, v)| ScanPointBody {
                coordinate: v,
                coordinates_bohr: p.coordinates,
                energy: p.energy,
                iterations: p.vqe.as_ref().map(|r| r.iterations),
                error: p.error,
            })
            .collect(),
    };
    let mut echo = vqe_echo(&args.vqe, &input);
    echo["options"]["scan_atom"] = json!(args.scan_atom);
    echo["options"]["scan_axis"] = json!(axis_name);
    echo["options"]["scan_from"] = json!(args.scan_from);
    echo["options"]["scan_to"] = json!(args.scan_to);
    echo["options"]["scan_points"] = json!(args.scan_points);
    emit("scan", echo, body, started, &args.vqe.common.output)
}
