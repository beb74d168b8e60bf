//! From converged orbitals to qubit Hamiltonians: molecular-orbital
//! integrals, second-quantized operators, the Jordan-Wigner mapping,
//! Pauli-sum algebra, sparse matrices, and measurement grouping.
//!
//! Spin-orbitals are interleaved: spatial orbital `i` maps to spin-orbitals
//! `2i` (alpha) and `2i + 1` (beta), and spin-orbital `k` is qubit `k`.
//! Basis-state indices put qubit 0 in the most significant bit.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};
use crate::integrals::IntegralTables;
use crate::linalg::{matmul, matmul_tn};
use crate::molecule::Molecule;
use crate::scf::{core_hamiltonian, ScfConfig, ScfResult};

/// Default threshold below which Pauli coefficients are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Imaginary residue above this in a molecular Hamiltonian is a bug.
const IMAG_RESIDUE_LIMIT: f64 = 1e-10;
/// Largest qubit count `to_sparse` accepts by default.
pub const DEFAULT_QUBIT_CAP: usize = 20;

// ---------------------------------------------------------------------------
// Molecular-orbital integrals

/// Two-electron integrals over spatial molecular orbitals, stored in the
/// index order of the second-quantized Hamiltonian: `h[p][q][r][s]` pairs
/// p with s on electron 1 and q with r on electron 2, i.e. the chemist
/// tensor entry `(ps|qr)`.
#[derive(Clone, Debug)]
pub struct MoEri<S> {
    m: usize,
    data: Vec<S>,
}

impl<S: Scalar> MoEri<S> {
    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> &S {
        &self.data[((p * self.m + q) * self.m + r) * self.m + s]
    }

    pub fn n_orbitals(&self) -> usize {
        self.m
    }
}

#[derive(Clone, Debug)]
pub struct MoIntegrals<S> {
    /// `h_pq` in hartree, symmetric.
    pub one_body: Array2<S>,
    /// `h_pqrs`; see [`MoEri`] for the index convention.
    pub two_body: MoEri<S>,
    /// Nuclear repulsion energy carried along as the constant shift.
    pub core_constant: S,
}

/// Transforms AO integral tables into the molecular-orbital basis of a
/// converged SCF result.
pub fn mo_integrals<S: Scalar>(
    scf: &ScfResult<S>,
    tables: &IntegralTables<S>,
    mol: &Molecule<S>,
) -> Result<MoIntegrals<S>> {
    if !(scf.state.delta_p.is_finite() && scf.state.delta_p < 1e-6) {
        return Err(Error::Contract(
            "mo_integrals requires a converged SCF result".into(),
        ));
    }
    let m = mol.n_basis();
    let c = &scf.state.coefficients;
    let h_core = core_hamiltonian(tables);
    let one_body = matmul_tn(c, &matmul(&h_core, c));

    // Quarter transforms of the chemist-ordered AO tensor.
    let idx = |a: usize, b: usize, d: usize, e: usize| ((a * m + b) * m + d) * m + e;
    let mut cur: Vec<S> = vec![S::zero(); m * m * m * m];
    for mu in 0..m {
        for nu in 0..m {
            for eta in 0..m {
                for ga in 0..m {
                    cur[idx(mu, nu, eta, ga)] = tables.repulsion.get(mu, nu, eta, ga).clone();
                }
            }
        }
    }
    for pos in 0..4 {
        let mut next: Vec<S> = vec![S::zero(); m * m * m * m];
        for p in 0..m {
            for b in 0..m {
                for d in 0..m {
                    for e in 0..m {
                        let mut acc = S::zero();
                        for mu in 0..m {
                            // rotate the transformed index to the back so the
                            // same contraction code serves all four positions
                            let ao = match pos {
                                0 => &cur[idx(mu, b, d, e)],
                                1 => &cur[idx(b, mu, d, e)],
                                2 => &cur[idx(b, d, mu, e)],
                                _ => &cur[idx(b, d, e, mu)],
                            };
                            acc = acc + c[(mu, p)].clone() * ao.clone();
                        }
                        match pos {
                            0 => next[idx(p, b, d, e)] = acc,
                            1 => next[idx(b, p, d, e)] = acc,
                            2 => next[idx(b, d, p, e)] = acc,
                            _ => next[idx(b, d, e, p)] = acc,
                        }
                    }
                }
            }
        }
        cur = next;
    }

    // Reorder the chemist MO tensor (pq|rs) into h_pqrs = (ps|qr).
    let mut data = vec![S::zero(); m * m * m * m];
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    data[idx(p, q, r, s)] = cur[idx(p, s, q, r)].clone();
                }
            }
        }
    }

    Ok(MoIntegrals {
        one_body,
        two_body: MoEri { m, data },
        core_constant: scf.nuclear_repulsion.clone(),
    })
}

// ---------------------------------------------------------------------------
// Fermionic operators

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Clone, Debug)]
pub struct FermionTerm<S> {
    pub coefficient: S,
    /// Ordered product of ladder operators, applied right to left.
    pub factors: Vec<(usize, Ladder)>,
}

#[derive(Clone, Debug)]
pub struct FermionicOperator<S> {
    pub n_spin_orbitals: usize,
    pub terms: Vec<FermionTerm<S>>,
}

/// Second-quantized molecular Hamiltonian over interleaved spin-orbitals:
/// `H = sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s`, with spin
/// expansion pairing p with s and q with r (spin-forbidden terms dropped).
pub fn fermionic_hamiltonian<S: Scalar>(mo: &MoIntegrals<S>) -> FermionicOperator<S> {
    let m = mo.one_body.dim().0;
    let mut terms = Vec::new();
    for p in 0..m {
        for q in 0..m {
            let c = mo.one_body[(p, q)].clone();
            if c.value() == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                terms.push(FermionTerm {
                    coefficient: c.clone(),
                    factors: vec![(2 * p + sigma, Ladder::Create), (2 * q + sigma, Ladder::Annihilate)],
                });
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let c = mo.two_body.get(p, q, r, s).scale(0.5);
                    if c.value() == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            terms.push(FermionTerm {
                                coefficient: c.clone(),
                                factors: vec![
                                    (2 * p + sigma, Ladder::Create),
                                    (2 * q + tau, Ladder::Create),
                                    (2 * r + tau, Ladder::Annihilate),
                                    (2 * s + sigma, Ladder::Annihilate),
                                ],
                            });
                        }
                    }
                }
            }
        }
    }
    FermionicOperator {
        n_spin_orbitals: 2 * m,
        terms,
    }
}

// ---------------------------------------------------------------------------
// Pauli words and sums

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn letter(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// Tensor product of Pauli letters over qubits; identity on every qubit
/// that is absent from the map. The derived ordering is lexicographic in
/// (qubit index, letter), which is the canonical term order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord {
    ops: BTreeMap<usize, PauliAxis>,
}

impl PauliWord {
    pub fn identity() -> Self {
        PauliWord::default()
    }

    pub fn single(qubit: usize, axis: PauliAxis) -> Self {
        let mut ops = BTreeMap::new();
        ops.insert(qubit, axis);
        PauliWord { ops }
    }

    pub fn from_ops(ops: impl IntoIterator<Item = (usize, PauliAxis)>) -> Self {
        PauliWord {
            ops: ops.into_iter().collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &PauliAxis)> {
        self.ops.iter()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.keys().next_back().copied()
    }

    /// Pauli product `self * other` as `(word, k)` with phase `i^k`.
    pub fn multiply(&self, other: &PauliWord) -> (PauliWord, u8) {
        let mut ops = BTreeMap::new();
        let mut phase: u8 = 0;
        let mut keys: Vec<usize> = self.ops.keys().copied().collect();
        for k in other.ops.keys() {
            if !self.ops.contains_key(k) {
                keys.push(*k);
            }
        }
        keys.sort_unstable();
        for q in keys {
            let a = self.ops.get(&q);
            let b = other.ops.get(&q);
            let (axis, k) = match (a, b) {
                (None, None) => (None, 0),
                (Some(&x), None) | (None, Some(&x)) => (Some(x), 0),
                (Some(&x), Some(&y)) => pauli_mul(x, y),
            };
            phase = (phase + k) % 4;
            if let Some(axis) = axis {
                ops.insert(q, axis);
            }
        }
        (PauliWord { ops }, phase)
    }

    /// Qubit-wise commutation: on every qubit the letters are equal or at
    /// least one side is the identity.
    pub fn qubitwise_commutes(&self, other: &PauliWord) -> bool {
        for (q, a) in &self.ops {
            if let Some(b) = other.ops.get(q) {
                if a != b {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, axis) in &self.ops {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", axis.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Single-qubit product `a * b = i^k * result` (None = identity).
fn pauli_mul(a: PauliAxis, b: PauliAxis) -> (Option<PauliAxis>, u8) {
    use PauliAxis::*;
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (None, 0),
        (X, Y) => (Some(Z), 1),
        (Y, X) => (Some(Z), 3),
        (Y, Z) => (Some(X), 1),
        (Z, Y) => (Some(X), 3),
        (Z, X) => (Some(Y), 1),
        (X, Z) => (Some(Y), 3),
    }
}

/// Complex coefficient over a generic scalar.
#[derive(Clone, Debug)]
pub struct Cplx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cplx<S> {
    pub fn real(re: S) -> Self {
        Cplx { re, im: S::zero() }
    }

    fn add(&self, other: &Cplx<S>) -> Cplx<S> {
        Cplx {
            re: self.re.clone() + other.re.clone(),
            im: self.im.clone() + other.im.clone(),
        }
    }

    fn mul(&self, other: &Cplx<S>) -> Cplx<S> {
        Cplx {
            re: self.re.clone() * other.re.clone() - self.im.clone() * other.im.clone(),
            im: self.re.clone() * other.im.clone() + self.im.clone() * other.re.clone(),
        }
    }

    /// Multiplication by `i^k`.
    fn mul_i_pow(&self, k: u8) -> Cplx<S> {
        match k % 4 {
            0 => self.clone(),
            1 => Cplx {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => Cplx {
                re: -self.re.clone(),
                im: -self.im.clone(),
            },
            _ => Cplx {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }

    /// Largest absolute component over both parts, tangents included.
    fn mag(&self) -> f64 {
        self.re.mag().max(self.im.mag())
    }
}

/// Linear combination of Pauli words with complex coefficients: the
/// general algebra the Jordan-Wigner expansion works in.
#[derive(Clone, Debug)]
pub struct QubitOperator<S> {
    pub n_qubits: usize,
    pub terms: Vec<(Cplx<S>, PauliWord)>,
}

impl<S: Scalar> QubitOperator<S> {
    pub fn zero(n_qubits: usize) -> Self {
        QubitOperator {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        QubitOperator {
            n_qubits,
            terms: vec![(Cplx::real(S::one()), PauliWord::identity())],
        }
    }

    pub fn add(&self, other: &QubitOperator<S>) -> QubitOperator<S> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        QubitOperator {
            n_qubits: self.n_qubits.max(other.n_qubits),
            terms,
        }
        .merged()
    }

    pub fn mul(&self, other: &QubitOperator<S>) -> QubitOperator<S> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, wa) in &self.terms {
            for (cb, wb) in &other.terms {
                let (word, k) = wa.multiply(wb);
                terms.push((ca.mul(cb).mul_i_pow(k), word));
            }
        }
        QubitOperator {
            n_qubits: self.n_qubits.max(other.n_qubits),
            terms,
        }
        .merged()
    }

    pub fn scale(&self, factor: f64) -> QubitOperator<S> {
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(c, w)| {
                    (
                        Cplx {
                            re: c.re.scale(factor),
                            im: c.im.scale(factor),
                        },
                        w.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Merges like words in canonical order; keeps exact zeros out.
    fn merged(self) -> QubitOperator<S> {
        let mut map: BTreeMap<PauliWord, Cplx<S>> = BTreeMap::new();
        for (c, w) in self.terms {
            match map.get_mut(&w) {
                Some(acc) => *acc = acc.add(&c),
                None => {
                    map.insert(w, c);
                }
            }
        }
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: map
                .into_iter()
                .filter(|(_, c)| c.mag() > 0.0)
                .map(|(w, c)| (c, w))
                .collect(),
        }
    }

    pub fn pruned(&self, threshold: f64) -> QubitOperator<S> {
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| c.mag() >= threshold)
                .cloned()
                .collect(),
        }
    }

    pub fn to_sparse(&self) -> Result<SparseHamiltonian> {
        let terms: Vec<(Complex64, PauliWord)> = self
            .terms
            .iter()
            .map(|(c, w)| (Complex64::new(c.re.value(), c.im.value()), w.clone()))
            .collect();
        SparseHamiltonian::from_terms(self.n_qubits, &terms, DEFAULT_QUBIT_CAP)
    }
}

/// Jordan-Wigner image of one ladder operator:
/// `a_p -> 1/2 Z_0..Z_{p-1} (X_p + i Y_p)`, `a+_p` with `-i`.
pub fn jw_ladder<S: Scalar>(orbital: usize, ladder: Ladder, n_qubits: usize) -> QubitOperator<S> {
    let z_chain: Vec<(usize, PauliAxis)> = (0..orbital).map(|q| (q, PauliAxis::Z)).collect();
    let mut x_word = z_chain.clone();
    x_word.push((orbital, PauliAxis::X));
    let mut y_word = z_chain;
    y_word.push((orbital, PauliAxis::Y));
    let y_sign = match ladder {
        Ladder::Annihilate => 0.5,
        Ladder::Create => -0.5,
    };
    QubitOperator {
        n_qubits,
        terms: vec![
            (Cplx::real(S::constant(0.5)), PauliWord::from_ops(x_word)),
            (
                Cplx {
                    re: S::zero(),
                    im: S::constant(y_sign),
                },
                PauliWord::from_ops(y_word),
            ),
        ],
    }
}

/// Jordan-Wigner transform into the general complex Pauli algebra.
pub fn jordan_wigner_operator<S: Scalar>(op: &FermionicOperator<S>) -> QubitOperator<S> {
    let n = op.n_spin_orbitals;
    let mut total = QubitOperator::zero(n);
    let mut accumulated: Vec<(Cplx<S>, PauliWord)> = Vec::new();
    for term in &op.terms {
        let mut acc = QubitOperator {
            n_qubits: n,
            terms: vec![(Cplx::real(term.coefficient.clone()), PauliWord::identity())],
        };
        for &(orbital, ladder) in &term.factors {
            acc = acc.mul(&jw_ladder(orbital, ladder, n));
        }
        accumulated.extend(acc.terms);
        // merge in batches to keep the intermediate list short
        if accumulated.len() > 4096 {
            total = total.add(&QubitOperator {
                n_qubits: n,
                terms: std::mem::take(&mut accumulated),
            });
        }
    }
    total.add(&QubitOperator {
        n_qubits: n,
        terms: accumulated,
    })
}

/// Hermitian Pauli sum with real coefficients: the natural form of
/// molecular Hamiltonians. Terms are deduplicated and kept in canonical
/// lexicographic word order.
#[derive(Clone, Debug)]
pub struct PauliSum<S> {
    pub n_qubits: usize,
    pub terms: Vec<(S, PauliWord)>,
}

impl<S: Scalar> PauliSum<S> {
    pub fn new(n_qubits: usize, terms: Vec<(S, PauliWord)>) -> Result<PauliSum<S>> {
        for (_, w) in &terms {
            if let Some(q) = w.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::Input(format!(
                        "word {w} uses qubit {q} but the sum has {n_qubits} qubits"
                    )));
                }
            }
        }
        Ok(simplify(
            &PauliSum { n_qubits, terms },
            0.0,
        ))
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a word, zero when absent.
    pub fn coefficient(&self, word: &PauliWord) -> S {
        match self
            .terms
            .binary_search_by(|(_, w)| w.cmp(word))
        {
            Ok(i) => self.terms[i].0.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Primal snapshot of the coefficients (same word order).
    pub fn values(&self) -> PauliSum<f64> {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(c, w)| (c.value(), w.clone()))
                .collect(),
        }
    }

    pub fn to_sparse(&self) -> Result<SparseHamiltonian> {
        self.to_sparse_capped(DEFAULT_QUBIT_CAP)
    }

    pub fn to_sparse_capped(&self, cap: usize) -> Result<SparseHamiltonian> {
        let terms: Vec<(Complex64, PauliWord)> = self
            .terms
            .iter()
            .map(|(c, w)| (Complex64::new(c.value(), 0.0), w.clone()))
            .collect();
        SparseHamiltonian::from_terms(self.n_qubits, &terms, cap)
    }
}

/// Merges like terms, prunes |coefficient| < threshold, sorts canonically.
pub fn simplify<S: Scalar>(sum: &PauliSum<S>, threshold: f64) -> PauliSum<S> {
    let mut map: BTreeMap<PauliWord, S> = BTreeMap::new();
    for (c, w) in &sum.terms {
        match map.get_mut(w) {
            Some(acc) => *acc = acc.clone() + c.clone(),
            None => {
                map.insert(w.clone(), c.clone());
            }
        }
    }
    PauliSum {
        n_qubits: sum.n_qubits,
        terms: map
            .into_iter()
            .filter(|(_, c)| {
                let m = c.mag();
                m != 0.0 && m >= threshold
            })
            .map(|(w, c)| (c, w))
            .collect(),
    }
}

/// Jordan-Wigner transform of a fermionic operator with real-coefficient
/// result; errors if the simplified expansion has an imaginary residue
/// above 1e-10 (molecular Hamiltonians never do).
pub fn jordan_wigner<S: Scalar>(op: &FermionicOperator<S>) -> Result<PauliSum<S>> {
    let qop = jordan_wigner_operator(op);
    let mut residue: f64 = 0.0;
    let mut terms = Vec::with_capacity(qop.terms.len());
    for (c, w) in qop.terms {
        residue = residue.max(c.im.value().abs());
        terms.push((c.re, w));
    }
    if residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::Internal(format!(
            "Jordan-Wigner expansion left imaginary residue {residue:.3e}"
        )));
    }
    Ok(simplify(
        &PauliSum {
            n_qubits: qop.n_qubits,
            terms,
        },
        PRUNE_THRESHOLD,
    ))
}

/// Qubit-wise commuting groups by greedy first-fit over the canonical
/// term order. Groups partition the terms.
pub fn group_commuting<S: Scalar>(sum: &PauliSum<S>) -> Vec<PauliSum<S>> {
    let mut groups: Vec<Vec<(S, PauliWord)>> = Vec::new();
    for (c, w) in &sum.terms {
        let slot = groups
            .iter()
            .position(|g| g.iter().all(|(_, gw)| gw.qubitwise_commutes(w)));
        match slot {
            Some(i) => groups[i].push((c.clone(), w.clone())),
            None => groups.push(vec![(c.clone(), w.clone())]),
        }
    }
    groups
        .into_iter()
        .map(|terms| PauliSum {
            n_qubits: sum.n_qubits,
            terms,
        })
        .collect()
}

/// Total particle number under Jordan-Wigner: `sum_p (I - Z_p) / 2`.
pub fn number_operator(n_qubits: usize) -> PauliSum<f64> {
    let mut terms = vec![(n_qubits as f64 / 2.0, PauliWord::identity())];
    for q in 0..n_qubits {
        terms.push((-0.5, PauliWord::single(q, PauliAxis::Z)));
    }
    simplify(&PauliSum { n_qubits, terms }, 0.0)
}

// ---------------------------------------------------------------------------
// Sparse matrices

/// Hermitian sparse matrix over 2^n basis states in compressed row form.
/// Qubit 0 is the most significant bit of the basis index.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    pub n_qubits: usize,
    pub dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseHamiltonian {
    pub fn from_terms(
        n_qubits: usize,
        terms: &[(Complex64, PauliWord)],
        cap: usize,
    ) -> Result<SparseHamiltonian> {
        if n_qubits > cap {
            return Err(Error::ResourceLimit(format!(
                "{n_qubits} qubits exceed the sparse-matrix cap of {cap}"
            )));
        }
        let dim = 1usize << n_qubits;
        // Precompute per-term masks: which basis bit each letter touches.
        struct TermMask {
            coeff: Complex64,
            flip: usize,
            // (bit mask, axis) per non-identity letter
            letters: Vec<(usize, PauliAxis)>,
        }
        let masks: Vec<TermMask> = terms
            .iter()
            .map(|(coeff, word)| {
                let mut flip = 0usize;
                let mut letters = Vec::new();
                for (&q, &axis) in word.iter() {
                    let bit = 1usize << (n_qubits - 1 - q);
                    if axis != PauliAxis::Z {
                        flip |= bit;
                    }
                    letters.push((bit, axis));
                }
                TermMask {
                    coeff: *coeff,
                    flip,
                    letters,
                }
            })
            .collect();

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut row_acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for row in 0..dim {
            row_acc.clear();
            for t in &masks {
                let col = row ^ t.flip;
                // phase of applying the word to |col>
                let mut k: u8 = 0;
                for &(bit, axis) in &t.letters {
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
                *row_acc.entry(col).or_insert(Complex64::new(0.0, 0.0)) += t.coeff * phase;
            }
            for (&col, &val) in &row_acc {
                if val != Complex64::new(0.0, 0.0) {
                    col_idx.push(col);
                    values.push(val);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseHamiltonian {
            n_qubits,
            dim,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn n_nonzero(&self) -> usize {
        self.values.len()
    }

    /// Nonzero entries as `(row, col, value)`, sorted by row then column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |row| {
            (self.row_ptr[row]..self.row_ptr[row + 1])
                .map(move |k| (row, self.col_idx[k], self.values[k]))
        })
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for row in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[row] = acc;
        }
        y
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut dense = Array2::from_elem((self.dim, self.dim), Complex64::new(0.0, 0.0));
        for (r, c, v) in self.entries() {
            dense[(r, c)] += v;
        }
        dense
    }

    /// Largest deviation from Hermiticity, as a diagnostic.
    pub fn hermiticity_residue(&self) -> f64 {
        let dense = self.to_dense();
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((dense[(r, c)] - dense[(c, r)].conj()).norm());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Full pipeline

/// Qubit Hamiltonian of a molecule together with the SCF result it came
/// from. `pauli` is the electronic part; `core_constant` (the nuclear
/// repulsion) is kept separate and folded in by [`Self::total_pauli`].
#[derive(Clone, Debug)]
pub struct MolecularHamiltonian<S> {
    pub n_qubits: usize,
    pub core_constant: S,
    pub pauli: PauliSum<S>,
    pub scf: ScfResult<S>,
}

impl<S: Scalar> MolecularHamiltonian<S> {
    /// Electronic sum with the constant added to the identity word, so
    /// expectation values are total energies.
    pub fn total_pauli(&self) -> PauliSum<S> {
        let mut terms = self.pauli.terms.clone();
        terms.push((self.core_constant.clone(), PauliWord::identity()));
        simplify(
            &PauliSum {
                n_qubits: self.n_qubits,
                terms,
            },
            0.0,
        )
    }
}

impl MolecularHamiltonian<f64> {
    pub fn to_sparse(&self) -> Result<SparseHamiltonian> {
        self.total_pauli().to_sparse()
    }
}

/// The full differentiable pipeline: integrals, SCF, MO transform,
/// second quantization, Jordan-Wigner.
pub fn molecular_hamiltonian<S: Scalar>(
    mol: &Molecule<S>,
    config: &ScfConfig,
) -> Result<MolecularHamiltonian<S>> {
    let tables = crate::integrals::integral_tables(mol)?;
    let scf = crate::scf::scf_solve_with_tables(mol, &tables, config)?;
    let mo = mo_integrals(&scf, &tables, mol)?;
    let ferm = fermionic_hamiltonian(&mo);
    let pauli = jordan_wigner(&ferm)?;
    Ok(MolecularHamiltonian {
        n_qubits: 2 * mol.n_basis(),
        core_constant: mo.core_constant,
        pauli,
        scf,
    })
}

// ---------------------------------------------------------------------------
// Text format

/// Writes the Pauli text format: `n_qubits` and `constant` headers, then
/// one `<coefficient> <word>` line per term in canonical order.
pub fn write_pauli_text(n_qubits: usize, constant: f64, sum: &PauliSum<f64>) -> String {
    let mut out = String::new();
    out.push_str(&format!("n_qubits {n_qubits}\n"));
    out.push_str(&format!("constant {constant:.16e}\n"));
    for (c, w) in &sum.terms {
        out.push_str(&format!("{c:.16e} {w}\n"));
    }
    out
}

/// Parses the Pauli text format back into `(n_qubits, constant, sum)`.
pub fn parse_pauli_text(text: &str) -> Result<(usize, f64, PauliSum<f64>)> {
    let mut n_qubits: Option<usize> = None;
    let mut constant: Option<f64> = None;
    let mut terms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        let bad = |what: &str| Error::Input(format!("pauli text line {}: {what}", lineno + 1));
        match head {
            "n_qubits" => {
                n_qubits = Some(
                    tok.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad n_qubits"))?,
                );
            }
            "constant" => {
                constant = Some(
                    tok.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad constant"))?,
                );
            }
            _ => {
                let coeff: f64 = head.parse().map_err(|_| bad("bad coefficient"))?;
                let mut ops = Vec::new();
                let mut identity = false;
                for t in tok {
                    if t == "I" {
                        identity = true;
                        continue;
                    }
                    let (axis, index) = if let Some(r) = t.strip_prefix('X') {
                        (PauliAxis::X, r)
                    } else if let Some(r) = t.strip_prefix('Y') {
                        (PauliAxis::Y, r)
                    } else if let Some(r) = t.strip_prefix('Z') {
                        (PauliAxis::Z, r)
                    } else {
                        return Err(bad(&format!("bad letter {t:?}")));
                    };
                    let q: usize = index.parse().map_err(|_| bad("bad qubit index"))?;
                    ops.push((q, axis));
                }
                if ops.is_empty() && !identity {
                    return Err(bad("term without a word"));
                }
                terms.push((coeff, PauliWord::from_ops(ops)));
            }
        }
    }
    let n_qubits = n_qubits.ok_or_else(|| Error::Input("pauli text misses n_qubits".into()))?;
    let constant = constant.ok_or_else(|| Error::Input("pauli text misses constant".into()))?;
    let sum = PauliSum::new(n_qubits, terms)?;
    Ok((n_qubits, constant, sum))
}
