//! Statevector simulation of particle-conserving circuits: basis-state
//! preparation, single/double excitation Givens rotations, expectation
//! values against sparse Hamiltonians, overlaps, parameter-shift
//! gradients, and adaptive gate selection.
//!
//! Bit convention: qubit 0 is the most significant bit of the amplitude
//! index, so basis index bit k encodes the occupation of spin-orbital k.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{PauliAxis, PauliWord, SparseHamiltonian};

/// Four-term parameter-shift coefficients for generators with eigenvalues
/// {-1, 0, +1} under the theta/2 convention.
const SHIFT_C_PLUS: f64 = (std::f64::consts::SQRT_2 + 1.0) / (4.0 * std::f64::consts::SQRT_2);
const SHIFT_C_MINUS: f64 = (std::f64::consts::SQRT_2 - 1.0) / (4.0 * std::f64::consts::SQRT_2);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_qubits`.
    pub fn zero_state(n_qubits: usize) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state with the given index.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Input(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<StateVector> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Input(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Occupation of spin-orbital `qubit` in basis index `index`.
    #[inline]
    pub fn bit(&self, index: usize, qubit: usize) -> bool {
        index & self.mask(qubit) != 0
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// `<N>`: expected total particle number.
    pub fn number_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * b.count_ones() as f64)
            .sum()
    }
}

/// Hartree-Fock reference: the first `n_electrons` spin-orbitals occupied.
pub fn prepare_hf_state(n_electrons: usize, n_qubits: usize) -> Result<StateVector> {
    if n_electrons > n_qubits {
        return Err(Error::Input(format!(
            "{n_electrons} electrons do not fit in {n_qubits} spin-orbitals"
        )));
    }
    let mut index = 0usize;
    for k in 0..n_electrons {
        index |= 1 << (n_qubits - 1 - k);
    }
    StateVector::basis_state(n_qubits, index)
}

fn check_wire(state: &StateVector, wire: usize) -> Result<()> {
    if wire >= state.n_qubits {
        return Err(Error::Input(format!(
            "wire {wire} out of range for {} qubits",
            state.n_qubits
        )));
    }
    Ok(())
}

/// Flips one qubit.
pub fn apply_pauli_x(state: &mut StateVector, wire: usize) -> Result<()> {
    check_wire(state, wire)?;
    let mask = state.mask(wire);
    for b in 0..state.dim() {
        if b & mask == 0 {
            state.amplitudes.swap(b, b | mask);
        }
    }
    Ok(())
}

/// Single-excitation Givens rotation on wires (p, q): in the two-qubit
/// subspace, |01> -> cos(t/2)|01> + sin(t/2)|10> and
/// |10> -> cos(t/2)|10> - sin(t/2)|01>; |00> and |11> are untouched.
pub fn apply_single_excitation(
    state: &mut StateVector,
    theta: f64,
    wires: (usize, usize),
) -> Result<()> {
    let (p, q) = wires;
    if p == q {
        return Err(Error::Input("single excitation needs distinct wires".into()));
    }
    check_wire(state, p)?;
    check_wire(state, q)?;
    let (mp, mq) = (state.mask(p), state.mask(q));
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    for b in 0..state.dim() {
        // b is the |01> member of the coupled pair: p empty, q occupied
        if b & mp == 0 && b & mq != 0 {
            let b10 = b ^ mp ^ mq;
            let a01 = state.amplitudes[b];
            let a10 = state.amplitudes[b10];
            state.amplitudes[b] = c * a01 - s * a10;
            state.amplitudes[b10] = s * a01 + c * a10;
        }
    }
    Ok(())
}

/// Double-excitation Givens rotation on wires (p, q, r, s):
/// |0011> -> cos(t/2)|0011> + sin(t/2)|1100>,
/// |1100> -> cos(t/2)|1100> - sin(t/2)|0011>, identity on the other
/// fourteen four-wire basis states.
pub fn apply_double_excitation(
    state: &mut StateVector,
    theta: f64,
    wires: (usize, usize, usize, usize),
) -> Result<()> {
    let ws = [wires.0, wires.1, wires.2, wires.3];
    for (i, w) in ws.iter().enumerate() {
        check_wire(state, *w)?;
        if ws[..i].contains(w) {
            return Err(Error::Input("double excitation needs distinct wires".into()));
        }
    }
    let (mp, mq) = (state.mask(ws[0]), state.mask(ws[1]));
    let (mr, ms) = (state.mask(ws[2]), state.mask(ws[3]));
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let flip = mp | mq | mr | ms;
    for b in 0..state.dim() {
        // b is the |0011> member: p, q empty and r, s occupied
        if b & mp == 0 && b & mq == 0 && b & mr != 0 && b & ms != 0 {
            let b1100 = b ^ flip;
            let a0011 = state.amplitudes[b];
            let a1100 = state.amplitudes[b1100];
            state.amplitudes[b] = c * a0011 - s * a1100;
            state.amplitudes[b1100] = s * a0011 + c * a1100;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    /// Sets the computational basis state whose occupied qubits are the
    /// gate's wires. Only valid as a circuit's first gate.
    BasisState,
    PauliX,
    SingleExcitation,
    DoubleExcitation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    /// Index into the circuit parameter vector; None for fixed gates.
    pub param: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
    pub n_parameters: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<GateOp>, n_parameters: usize) -> Result<Circuit> {
        for (i, gate) in gates.iter().enumerate() {
            let expected_wires = match gate.kind {
                GateKind::BasisState => gate.wires.len(), // any subset of qubits
                GateKind::PauliX => 1,
                GateKind::SingleExcitation => 2,
                GateKind::DoubleExcitation => 4,
            };
            if gate.wires.len() != expected_wires {
                return Err(Error::Input(format!(
                    "gate {i} ({:?}) has {} wires, expected {expected_wires}",
                    gate.kind,
                    gate.wires.len()
                )));
            }
            for (k, w) in gate.wires.iter().enumerate() {
                if *w >= n_qubits {
                    return Err(Error::Input(format!("gate {i} wire {w} out of range")));
                }
                if gate.wires[..k].contains(w) {
                    return Err(Error::Input(format!("gate {i} repeats wire {w}")));
                }
            }
            let parametrized = matches!(
                gate.kind,
                GateKind::SingleExcitation | GateKind::DoubleExcitation
            );
            match (parametrized, gate.param) {
                (true, Some(slot)) if slot < n_parameters => {}
                (true, _) => {
                    return Err(Error::Input(format!(
                        "gate {i} needs a parameter slot below {n_parameters}"
                    )))
                }
                (false, None) => {}
                (false, Some(_)) => {
                    return Err(Error::Input(format!(
                        "gate {i} ({:?}) cannot take a parameter",
                        gate.kind
                    )))
                }
            }
            if gate.kind == GateKind::BasisState && i != 0 {
                return Err(Error::Input(
                    "BasisState preparation must be the first gate".into(),
                ));
            }
        }
        Ok(Circuit {
            n_qubits,
            gates,
            n_parameters,
        })
    }

    pub fn empty(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            n_parameters: 0,
        }
    }
}

/// Applies the circuit to an initial state; gates run in list order.
pub fn run(circuit: &Circuit, parameters: &[f64], initial: &StateVector) -> Result<StateVector> {
    if parameters.len() != circuit.n_parameters {
        return Err(Error::Input(format!(
            "{} parameters supplied, circuit declares {}",
            parameters.len(),
            circuit.n_parameters
        )));
    }
    if initial.n_qubits != circuit.n_qubits {
        return Err(Error::Input(format!(
            "initial state has {} qubits, circuit {}",
            initial.n_qubits, circuit.n_qubits
        )));
    }
    let mut state = initial.clone();
    for gate in &circuit.gates {
        let theta = gate.param.map(|k| parameters[k]);
        match gate.kind {
            GateKind::BasisState => {
                let mut index = 0usize;
                for w in &gate.wires {
                    index |= 1 << (circuit.n_qubits - 1 - w);
                }
                state = StateVector::basis_state(circuit.n_qubits, index)?;
            }
            GateKind::PauliX => apply_pauli_x(&mut state, gate.wires[0])?,
            GateKind::SingleExcitation => apply_single_excitation(
                &mut state,
                theta.expect("validated parametrized gate"),
                (gate.wires[0], gate.wires[1]),
            )?,
            GateKind::DoubleExcitation => apply_double_excitation(
                &mut state,
                theta.expect("validated parametrized gate"),
                (gate.wires[0], gate.wires[1], gate.wires[2], gate.wires[3]),
            )?,
        }
    }
    Ok(state)
}

/// `<psi|H|psi>` by sparse matrix-vector product. The imaginary residue
/// must be negligible; a larger one means the operator is not Hermitian.
pub fn expectation(state: &StateVector, hamiltonian: &SparseHamiltonian) -> Result<f64> {
    if state.dim() != hamiltonian.dim {
        return Err(Error::Input(format!(
            "state dimension {} does not match Hamiltonian dimension {}",
            state.dim(),
            hamiltonian.dim
        )));
    }
    let hx = hamiltonian.matvec(state.amplitudes());
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in state.amplitudes().iter().zip(&hx) {
        acc += a.conj() * b;
    }
    if acc.im.abs() >= 1e-10 {
        return Err(Error::NonHermitian { residue: acc.im.abs() });
    }
    Ok(acc.re)
}

/// `|<a|b>|^2`.
pub fn state_overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Input("overlap of states of different size".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
        acc += x.conj() * y;
    }
    Ok(acc.norm_sqr())
}

/// `<psi|W|psi>` for a single Pauli word, without building a matrix.
pub fn pauli_expectation(state: &StateVector, word: &PauliWord) -> f64 {
    let n = state.n_qubits;
    let mut flip = 0usize;
    let mut letters: Vec<(usize, PauliAxis)> = Vec::new();
    for (&q, &axis) in word.iter() {
        let bit = 1usize << (n - 1 - q);
        if axis != PauliAxis::Z {
            flip |= bit;
        }
        letters.push((bit, axis));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..state.dim() {
        let a_col = state.amplitudes[col];
        if a_col == Complex64::new(0.0, 0.0) {
            continue;
        }
        let row = col ^ flip;
        let mut k: u8 = 0;
        for &(bit, axis) in &letters {
            let set = col & bit != 0;
            k = (k + match (axis, set) {
                (PauliAxis::X, _) => 0,
                (PauliAxis::Z, false) => 0,
                (PauliAxis::Z, true) => 2,
                (PauliAxis::Y, false) => 1,
                (PauliAxis::Y, true) => 3,
            }) % 4;
        }
        let phase = match k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        acc += state.amplitudes[row].conj() * phase * a_col;
    }
    acc.re
}

/// Spin-conserving excitations out of the Hartree-Fock reference in the
/// interleaved spin-orbital convention (alpha even, beta odd).
///
/// Doubles come first, ascending in (i, j, a, b), then singles ascending
/// in (i, a); each gate owns one parameter slot.
pub fn all_singles_doubles(n_electrons: usize, n_qubits: usize) -> Result<Circuit> {
    if n_electrons % 2 != 0 {
        return Err(Error::Input(
            "interleaved spin convention needs an even electron count".into(),
        ));
    }
    if n_electrons > n_qubits {
        return Err(Error::Input(format!(
            "{n_electrons} electrons do not fit in {n_qubits} spin-orbitals"
        )));
    }
    let occupied: Vec<usize> = (0..n_electrons).collect();
    let virtuals: Vec<usize> = (n_electrons..n_qubits).collect();
    let spin = |orbital: usize| orbital % 2;
    let mut gates = Vec::new();
    let mut slot = 0;

    for (ii, &i) in occupied.iter().enumerate() {
        for &j in &occupied[ii + 1..] {
            for (ai, &a) in virtuals.iter().enumerate() {
                for &b in &virtuals[ai + 1..] {
                    if spin(i) + spin(j) == spin(a) + spin(b) {
                        gates.push(GateOp {
                            kind: GateKind::DoubleExcitation,
                            wires: vec![i, j, a, b],
                            param: Some(slot),
                        });
                        slot += 1;
                    }
                }
            }
        }
    }
    for &i in &occupied {
        for &a in &virtuals {
            if spin(i) == spin(a) {
                gates.push(GateOp {
                    kind: GateKind::SingleExcitation,
                    wires: vec![i, a],
                    param: Some(slot),
                });
                slot += 1;
            }
        }
    }
    Circuit::new(n_qubits, gates, slot)
}

/// Exact gradient of `<H>` with respect to each circuit parameter via the
/// four-term shift rule for excitation generators:
/// `d<H>/dt = c+[f(t+pi/2) - f(t-pi/2)] - c-[f(t+3pi/2) - f(t-3pi/2)]`
/// with `c+- = (sqrt(2) +- 1) / (4 sqrt(2))`.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    parameters: &[f64],
    hamiltonian: &SparseHamiltonian,
    initial: &StateVector,
) -> Result<Vec<f64>> {
    parameter_shift_gradient_of(circuit, parameters, initial, &|state| {
        expectation(state, hamiltonian)
    })
}

/// Parameter-shift gradient of an arbitrary expectation-like functional of
/// the prepared state. The functional must be an expectation value of a
/// fixed Hermitian observable for the shift rule to be exact.
pub fn parameter_shift_gradient_of(
    circuit: &Circuit,
    parameters: &[f64],
    initial: &StateVector,
    cost: &(dyn Fn(&StateVector) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    if parameters.len() != circuit.n_parameters {
        return Err(Error::Input(format!(
            "{} parameters supplied, circuit declares {}",
            parameters.len(),
            circuit.n_parameters
        )));
    }
    for gate in &circuit.gates {
        if gate.param.is_some()
            && !matches!(
                gate.kind,
                GateKind::SingleExcitation | GateKind::DoubleExcitation
            )
        {
            return Err(Error::UnsupportedGradient(format!(
                "gate kind {:?} has no shift rule",
                gate.kind
            )));
        }
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let shifts = [half_pi, -half_pi, 3.0 * half_pi, -3.0 * half_pi];
    (0..circuit.n_parameters)
        .into_par_iter()
        .map(|k| {
            let mut f = [0.0; 4];
            for (slot, shift) in shifts.iter().enumerate() {
                let mut shifted = parameters.to_vec();
                shifted[k] += shift;
                f[slot] = cost(&run(circuit, &shifted, initial)?)?;
            }
            Ok(SHIFT_C_PLUS * (f[0] - f[1]) - SHIFT_C_MINUS * (f[2] - f[3]))
        })
        .collect()
}

/// Second derivatives of `<H>` in the circuit parameters by applying the
/// four-term shift rule twice (16 evaluations per parameter pair).
pub fn parameter_shift_hessian(
    circuit: &Circuit,
    parameters: &[f64],
    hamiltonian: &SparseHamiltonian,
    initial: &StateVector,
) -> Result<ndarray::Array2<f64>> {
    let n = circuit.n_parameters;
    if parameters.len() != n {
        return Err(Error::Input(format!(
            "{} parameters supplied, circuit declares {}",
            parameters.len(),
            n
        )));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let rule = [
        (half_pi, SHIFT_C_PLUS),
        (-half_pi, -SHIFT_C_PLUS),
        (3.0 * half_pi, -SHIFT_C_MINUS),
        (-3.0 * half_pi, SHIFT_C_MINUS),
    ];
    let mut hess = ndarray::Array2::zeros((n, n));
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for (da, wa) in rule {
                for (db, wb) in rule {
                    let mut shifted = parameters.to_vec();
                    shifted[a] += da;
                    shifted[b] += db;
                    let f = expectation(&run(circuit, &shifted, initial)?, hamiltonian)?;
                    acc += wa * wb * f;
                }
            }
            hess[(a, b)] = acc;
            hess[(b, a)] = acc;
        }
    }
    Ok(hess)
}

/// Gate selection strategies for adaptive circuit construction.
#[derive(Clone, Copy, Debug)]
pub enum AdaptiveStrategy {
    /// Iteratively append the pool gate with the largest gradient, optimize
    /// its parameter, and freeze it; stop when the largest pool gradient
    /// falls below `threshold` or after `max_rounds` gates.
    LargestGradient { threshold: f64, max_rounds: usize },
    /// One pass: evaluate all pool gradients at zero parameters on the
    /// initial state and keep gates with |gradient| above `threshold`.
    GradientThreshold { threshold: f64 },
}

/// Adaptively selected circuit and the parameter values frozen during
/// selection (zeros under the threshold strategy).
#[derive(Clone, Debug)]
pub struct SelectedCircuit {
    pub circuit: Circuit,
    pub parameters: Vec<f64>,
}

fn single_gate_circuit(n_qubits: usize, gate: &GateOp) -> Result<Circuit> {
    let mut g = gate.clone();
    g.param = Some(0);
    Circuit::new(n_qubits, vec![g], 1)
}

/// Builds a circuit from a pool of particle-conserving gates.
pub fn select_gates_adaptive(
    pool: &Circuit,
    hamiltonian: &SparseHamiltonian,
    initial: &StateVector,
    strategy: AdaptiveStrategy,
) -> Result<SelectedCircuit> {
    if pool.gates.is_empty() {
        return Err(Error::Input("adaptive selection needs a non-empty pool".into()));
    }
    match strategy {
        AdaptiveStrategy::GradientThreshold { threshold } => {
            let zeros = vec![0.0; pool.n_parameters];
            let grad = parameter_shift_gradient(pool, &zeros, hamiltonian, initial)?;
            let mut gates = Vec::new();
            let mut slot = 0;
            for gate in &pool.gates {
                let keep = match gate.param {
                    Some(k) => grad[k].abs() > threshold,
                    None => true,
                };
                if keep {
                    let mut g = gate.clone();
                    if g.param.is_some() {
                        g.param = Some(slot);
                        slot += 1;
                    }
                    gates.push(g);
                }
            }
            Ok(SelectedCircuit {
                circuit: Circuit::new(pool.n_qubits, gates, slot)?,
                parameters: vec![0.0; slot],
            })
        }
        AdaptiveStrategy::LargestGradient {
            threshold,
            max_rounds,
        } => {
            let mut state = initial.clone();
            let mut gates: Vec<GateOp> = Vec::new();
            let mut frozen: Vec<f64> = Vec::new();
            for _ in 0..max_rounds {
                // gradient of appending each pool gate at theta = 0
                let mut best: Option<(usize, f64)> = None;
                for (idx, gate) in pool.gates.iter().enumerate() {
                    if gate.param.is_none() {
                        continue;
                    }
                    let single = single_gate_circuit(pool.n_qubits, gate)?;
                    let g = parameter_shift_gradient(&single, &[0.0], hamiltonian, &state)?[0];
                    let better = match best {
                        Some((_, b)) => g.abs() > b.abs(),
                        None => true,
                    };
                    if better {
                        best = Some((idx, g));
                    }
                }
                let (idx, g) = best.ok_or_else(|| {
                    Error::Input("pool has no parametrized gates".into())
                })?;
                if g.abs() < threshold {
                    break;
                }
                // optimize the appended parameter by plain gradient descent
                let single = single_gate_circuit(pool.n_qubits, &pool.gates[idx])?;
                let mut theta = 0.0;
                for _ in 0..50 {
                    let grad =
                        parameter_shift_gradient(&single, &[theta], hamiltonian, &state)?[0];
                    theta -= 0.1 * grad;
                }
                state = run(&single, &[theta], &state)?;
                let mut gate = pool.gates[idx].clone();
                gate.param = Some(frozen.len());
                gates.push(gate);
                frozen.push(theta);
            }
            let n = frozen.len();
            Ok(SelectedCircuit {
                circuit: Circuit::new(pool.n_qubits, gates, n)?,
                parameters: frozen,
            })
        }
    }
}
