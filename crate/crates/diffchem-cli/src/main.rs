//! Batch command-line interface: file-based molecule input, JSON reports,
//! deterministic numerics.

mod commands;
mod input;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "diffchem",
    version,
    about = "Differentiable Gaussian-basis quantum chemistry and variational circuit simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Molecule description file (JSON)
    molecule: PathBuf,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ScfArgs {
    /// SCF iteration cap
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Density convergence threshold (max-abs change)
    #[arg(long, default_value_t = 1e-10)]
    tol_p: f64,
    /// Energy convergence threshold in hartree
    #[arg(long, default_value_t = 1e-12)]
    tol_e: f64,
    /// Linear density mixing factor in [0, 1); 0 is the plain fixed point
    #[arg(long, default_value_t = 0.0)]
    mixing: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GradClass {
    Coordinates,
    Exponents,
    Coefficients,
}

#[derive(Args, Clone)]
struct HfArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    scf: ScfArgs,
    /// Parameter classes to differentiate the energy against
    #[arg(long, value_delimiter = ',')]
    grad: Vec<GradClass>,
    /// Also compute the nuclear-coordinate Hessian of the energy
    #[arg(long)]
    hessian: bool,
    /// Include the AO integral tables in the report
    #[arg(long)]
    dump_integrals: bool,
}

#[derive(Args, Clone)]
struct HamiltonianArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    scf: ScfArgs,
    /// Also write the raw Pauli text format to this file
    #[arg(long)]
    text_output: Option<PathBuf>,
    /// Include the sparse matrix entries in the report
    #[arg(long)]
    sparse: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theta0 {
    Zeros,
    Random,
}

#[derive(Args, Clone)]
struct VqeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    scf: ScfArgs,
    /// Built-in ansatz name
    #[arg(long, default_value = "all-singles-doubles")]
    ansatz: String,
    /// Circuit file (JSON) overriding the built-in ansatz
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Gradient-descent step size
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Convergence threshold on the gradient infinity norm
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Optimizer step cap
    #[arg(long, default_value_t = 500)]
    max_steps: usize,
    /// Initial circuit parameters
    #[arg(long, value_enum, default_value_t = Theta0::Zeros)]
    theta0: Theta0,
    /// Seed for randomized initial parameters
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct HessianArgs {
    #[command(flatten)]
    vqe: VqeArgs,
    /// Atomic masses in electron-mass units (one per atom) for
    /// mass-weighted normal modes; omitted = plain energy Hessian
    #[arg(long, value_delimiter = ',')]
    masses: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OptClass {
    Circuit,
    Coordinates,
    Exponents,
    Coefficients,
}

#[derive(Args, Clone)]
struct OptimizeArgs {
    #[command(flatten)]
    vqe: VqeArgs,
    /// Parameter classes to optimize jointly
    #[arg(long, value_delimiter = ',', required = true)]
    what: Vec<OptClass>,
    /// Outer round cap
    #[arg(long, default_value_t = 500)]
    rounds: usize,
    /// Circuit gradient-descent steps per round
    #[arg(long, default_value_t = 20)]
    circuit_steps: usize,
    /// Step size for nuclear coordinates
    #[arg(long, default_value_t = 0.05)]
    coordinate_step: f64,
    /// Step size for basis exponents and contraction coefficients
    #[arg(long, default_value_t = 0.01)]
    basis_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(Args, Clone)]
struct ScanArgs {
    #[command(flatten)]
    vqe: VqeArgs,
    /// Atom whose coordinate is scanned
    #[arg(long)]
    scan_atom: usize,
    /// Scanned Cartesian axis
    #[arg(long, value_enum)]
    scan_axis: Axis,
    #[arg(long)]
    scan_from: f64,
    #[arg(long)]
    scan_to: f64,
    #[arg(long, default_value_t = 9)]
    scan_points: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Restricted Hartree-Fock energy, optionally with exact derivatives
    Hf(HfArgs),
    /// Qubit Hamiltonian via Jordan-Wigner, in Pauli text form
    Hamiltonian(HamiltonianArgs),
    /// Variational ground-state energy
    Vqe(VqeArgs),
    /// VQE followed by Hellmann-Feynman nuclear forces
    Forces(VqeArgs),
    /// VQE followed by the energy Hessian and normal modes
    Hessian(HessianArgs),
    /// Joint optimization of circuit, geometry, and basis parameters
    Optimize(OptimizeArgs),
    /// Ground-state energy scan over one nuclear coordinate
    Scan(ScanArgs),
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DIFFCHEM_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match commands::execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": {
                    "kind": commands::error_kind(&err),
                    "message": err.to_string(),
                }
            });
            match report::to_json_string(&payload) {
                Ok(s) => print!("{s}"),
                Err(_) => eprintln!("{err}"),
            }
            ExitCode::FAILURE
        }
    }
}
