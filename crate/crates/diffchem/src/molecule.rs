//! Atoms, contracted Gaussian basis sets, and the flattened vector of
//! differentiable parameters.
//!
//! All coordinates are in bohr and all derived quantities in hartree-based
//! atomic units. Basis functions use Cartesian angular factors
//! `x^l y^m z^n`. The STO-3G table for H through Ne ships with the crate;
//! the same text format can be extended with further elements.

use std::sync::OnceLock;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};

const STO3G_DATA: &str = include_str!("../data/sto-3g.txt");

/// Cartesian angular momentum triple (l, m, n).
pub type Angular = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct Atom<S> {
    pub symbol: String,
    pub atomic_number: u32,
    pub position: [S; 3],
}

/// One primitive of a contraction: shares center and angular momentum with
/// its siblings, so only the exponent and contraction weight are stored.
#[derive(Clone, Debug)]
pub struct GaussianPrimitive<S> {
    pub exponent: S,
    pub coefficient: S,
}

/// Fixed linear combination of Gaussian primitives on one atomic center.
#[derive(Clone, Debug)]
pub struct ContractedGaussian<S> {
    /// Index of the owning atom; the function is centered on its position.
    pub atom: usize,
    pub angular: Angular,
    pub primitives: Vec<GaussianPrimitive<S>>,
    /// Overall factor making the contracted self-overlap equal one.
    pub normalization: S,
}

/// Which parameter classes enter the differentiable parameter vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiffFlags {
    pub coordinates: bool,
    pub exponents: bool,
    pub coefficients: bool,
}

impl DiffFlags {
    pub fn all() -> Self {
        DiffFlags {
            coordinates: true,
            exponents: true,
            coefficients: true,
        }
    }

    pub fn coordinates_only() -> Self {
        DiffFlags {
            coordinates: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Molecule<S> {
    pub atoms: Vec<Atom<S>>,
    pub charge: i64,
    pub n_electrons: usize,
    pub basis_functions: Vec<ContractedGaussian<S>>,
    pub diff_flags: DiffFlags,
}

/// Shell type as it appears in the basis data file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellKind {
    S,
    P,
    Sp,
}

/// Per-element shell template read from the basis data table.
#[derive(Clone, Debug)]
pub struct BasisShell {
    pub kind: ShellKind,
    pub exponents: Vec<f64>,
    pub coefficients_s: Vec<f64>,
    pub coefficients_p: Vec<f64>,
}

fn atomic_number(symbol: &str) -> Option<u32> {
    let z = match symbol {
        "H" => 1,
        "He" => 2,
        "Li" => 3,
        "Be" => 4,
        "B" => 5,
        "C" => 6,
        "N" => 7,
        "O" => 8,
        "F" => 9,
        "Ne" => 10,
        _ => return None,
    };
    Some(z)
}

fn parse_sto3g(data: &str) -> Result<Vec<(String, Vec<BasisShell>)>> {
    let mut elements: Vec<(String, Vec<BasisShell>)> = Vec::new();
    for (lineno, raw) in data.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "element" => {
                let sym = tokens
                    .next()
                    .ok_or_else(|| Error::Input(format!("basis data line {}: missing element symbol", lineno + 1)))?;
                elements.push((sym.to_string(), Vec::new()));
            }
            "shell" => {
                let kind = match tokens.next() {
                    Some("s") => ShellKind::S,
                    Some("p") => ShellKind::P,
                    Some("sp") => ShellKind::Sp,
                    other => {
                        return Err(Error::Input(format!(
                            "basis data line {}: unknown shell type {:?}",
                            lineno + 1,
                            other
                        )))
                    }
                };
                let (_, shells) = elements.last_mut().ok_or_else(|| {
                    Error::Input(format!("basis data line {}: shell before element", lineno + 1))
                })?;
                shells.push(BasisShell {
                    kind,
                    exponents: Vec::new(),
                    coefficients_s: Vec::new(),
                    coefficients_p: Vec::new(),
                });
            }
            _ => {
                let row: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>().map_err(|_| {
                            Error::Input(format!("basis data line {}: bad number {t:?}", lineno + 1))
                        })
                    })
                    .collect::<Result<_>>()?;
                let shell = elements
                    .last_mut()
                    .and_then(|(_, shells)| shells.last_mut())
                    .ok_or_else(|| {
                        Error::Input(format!(
                            "basis data line {}: primitive row outside a shell block",
                            lineno + 1
                        ))
                    })?;
                match (shell.kind, row.len()) {
                    (ShellKind::S, 2) => {
                        shell.exponents.push(row[0]);
                        shell.coefficients_s.push(row[1]);
                    }
                    (ShellKind::P, 2) => {
                        shell.exponents.push(row[0]);
                        shell.coefficients_p.push(row[1]);
                    }
                    (ShellKind::Sp, 3) => {
                        shell.exponents.push(row[0]);
                        shell.coefficients_s.push(row[1]);
                        shell.coefficients_p.push(row[2]);
                    }
                    _ => {
                        return Err(Error::Input(format!(
                            "basis data line {}: wrong column count for shell",
                            lineno + 1
                        )))
                    }
                }
            }
        }
    }
    Ok(elements)
}

fn sto3g_table() -> &'static Vec<(String, Vec<BasisShell>)> {
    static TABLE: OnceLock<Vec<(String, Vec<BasisShell>)>> = OnceLock::new();
    TABLE.get_or_init(|| parse_sto3g(STO3G_DATA).expect("embedded STO-3G table is well-formed"))
}

/// Looks up the STO-3G shell templates for an element.
pub fn load_sto3g(symbol: &str) -> Result<Vec<BasisShell>> {
    sto3g_table()
        .iter()
        .find(|(sym, _)| sym == symbol)
        .map(|(_, shells)| shells.clone())
        .ok_or_else(|| Error::UnsupportedElement {
            symbol: symbol.to_string(),
        })
}

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        return 1.0;
    }
    let mut acc = 1.0;
    let mut k = n;
    while k > 0 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// Normalization constant of a single Cartesian Gaussian primitive:
/// the factor making its self-overlap equal one.
pub fn primitive_norm<S: Scalar>(exponent: &S, angular: Angular) -> Result<S> {
    if exponent.value() <= 0.0 {
        return Err(Error::Domain(format!(
            "primitive exponent must be positive, got {}",
            exponent.value()
        )));
    }
    let (l, m, n) = angular;
    let total = (l + m + n) as f64;
    let df = double_factorial(2 * l as i64 - 1)
        * double_factorial(2 * m as i64 - 1)
        * double_factorial(2 * n as i64 - 1);
    // (2a/pi)^(3/4) * (4a)^((l+m+n)/2) / sqrt((2l-1)!!(2m-1)!!(2n-1)!!)
    let s_part = exponent.scale(2.0 / std::f64::consts::PI).powf(0.75);
    let ang_part = exponent.scale(4.0).powf(total / 2.0);
    Ok(s_part * ang_part.scale(1.0 / df.sqrt()))
}

/// Self-overlap of two same-center primitives with common angular momentum,
/// both carrying unit normalization.
fn same_center_primitive_overlap<S: Scalar>(a: &S, b: &S, angular: Angular) -> S {
    let (l, m, n) = angular;
    let p = a.clone() + b.clone();
    let df = double_factorial(2 * l as i64 - 1)
        * double_factorial(2 * m as i64 - 1)
        * double_factorial(2 * n as i64 - 1);
    let radial = S::constant(std::f64::consts::PI) / p.clone();
    let poly = p.scale(2.0).powi(-((l + m + n) as i32));
    radial.powf(1.5) * poly.scale(df)
}

impl<S: Scalar> ContractedGaussian<S> {
    /// Builds a contraction and computes its normalization so that the
    /// contracted self-overlap is one.
    pub fn new(
        atom: usize,
        angular: Angular,
        exponents: Vec<S>,
        coefficients: Vec<S>,
    ) -> Result<Self> {
        if exponents.len() != coefficients.len() || exponents.is_empty() {
            return Err(Error::Input(
                "contraction needs matching, non-empty exponent and coefficient lists".into(),
            ));
        }
        let primitives: Vec<GaussianPrimitive<S>> = exponents
            .into_iter()
            .zip(coefficients)
            .map(|(exponent, coefficient)| GaussianPrimitive {
                exponent,
                coefficient,
            })
            .collect();
        let mut cg = ContractedGaussian {
            atom,
            angular,
            primitives,
            normalization: S::one(),
        };
        let mut self_overlap = S::zero();
        for pi in &cg.primitives {
            let ni = primitive_norm(&pi.exponent, angular)?;
            for pj in &cg.primitives {
                let nj = primitive_norm(&pj.exponent, angular)?;
                let s = same_center_primitive_overlap(&pi.exponent, &pj.exponent, angular);
                self_overlap = self_overlap
                    + pi.coefficient.clone() * pj.coefficient.clone() * ni.clone() * nj * s;
            }
        }
        if self_overlap.value() <= 0.0 {
            return Err(Error::Domain(
                "contraction has non-positive self-overlap".into(),
            ));
        }
        cg.normalization = self_overlap.sqrt().recip();
        Ok(cg)
    }

    /// Effective primitive expansion with normalization folded in:
    /// `(alpha_i, N * a_i * N_prim(alpha_i))` pairs.
    pub fn effective_primitives(&self) -> Vec<(S, S)> {
        self.primitives
            .iter()
            .map(|p| {
                let np = primitive_norm(&p.exponent, self.angular)
                    .expect("constructed contraction has positive exponents");
                (
                    p.exponent.clone(),
                    self.normalization.clone() * p.coefficient.clone() * np,
                )
            })
            .collect()
    }
}

/// Expands element shell templates into contracted Gaussians on `atom`.
/// An s shell yields one function, a p shell three, an sp shell four.
pub fn expand_shells<S: Scalar>(
    shells: &[BasisShell],
    atom: usize,
) -> Result<Vec<ContractedGaussian<S>>> {
    let mut out = Vec::new();
    let lift = |v: &[f64]| v.iter().map(|&x| S::constant(x)).collect::<Vec<S>>();
    for shell in shells {
        let exps = lift(&shell.exponents);
        if matches!(shell.kind, ShellKind::S | ShellKind::Sp) {
            out.push(ContractedGaussian::new(
                atom,
                (0, 0, 0),
                exps.clone(),
                lift(&shell.coefficients_s),
            )?);
        }
        if matches!(shell.kind, ShellKind::P | ShellKind::Sp) {
            for angular in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
                out.push(ContractedGaussian::new(
                    atom,
                    angular,
                    exps.clone(),
                    lift(&shell.coefficients_p),
                )?);
            }
        }
    }
    Ok(out)
}

/// Builds a molecule with STO-3G basis functions centered on its atoms.
pub fn build_molecule(
    symbols: &[&str],
    coordinates: &[[f64; 3]],
    charge: i64,
    basis_name: &str,
    diff_flags: DiffFlags,
) -> Result<Molecule<f64>> {
    if symbols.len() != coordinates.len() {
        return Err(Error::Input(format!(
            "{} symbols but {} coordinate triples",
            symbols.len(),
            coordinates.len()
        )));
    }
    if symbols.is_empty() {
        return Err(Error::Input("molecule needs at least one atom".into()));
    }
    if !basis_name.eq_ignore_ascii_case("sto-3g") {
        return Err(Error::Input(format!(
            "unknown basis {basis_name:?}; available: sto-3g"
        )));
    }
    let mut atoms = Vec::with_capacity(symbols.len());
    let mut basis_functions = Vec::new();
    for (i, (&symbol, pos)) in symbols.iter().zip(coordinates).enumerate() {
        if !pos.iter().all(|c| c.is_finite()) {
            return Err(Error::Input(format!("atom {i} has non-finite coordinates")));
        }
        let z = atomic_number(symbol).ok_or_else(|| Error::UnsupportedElement {
            symbol: symbol.to_string(),
        })?;
        atoms.push(Atom {
            symbol: symbol.to_string(),
            atomic_number: z,
            position: *pos,
        });
        basis_functions.extend(expand_shells::<f64>(&load_sto3g(symbol)?, i)?);
    }
    let total_z: i64 = atoms.iter().map(|a| a.atomic_number as i64).sum();
    let n_electrons = total_z - charge;
    if n_electrons < 0 {
        return Err(Error::Input(format!(
            "charge {charge} strips more than all {total_z} electrons"
        )));
    }
    if n_electrons % 2 != 0 {
        return Err(Error::ClosedShellViolation {
            n_electrons,
            charge,
        });
    }
    Ok(Molecule {
        atoms,
        charge,
        n_electrons: n_electrons as usize,
        basis_functions,
        diff_flags,
    })
}

impl<S: Scalar> Molecule<S> {
    pub fn n_basis(&self) -> usize {
        self.basis_functions.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Number of doubly occupied spatial orbitals.
    pub fn n_occupied(&self) -> usize {
        self.n_electrons / 2
    }

    pub fn center_of(&self, shell: &ContractedGaussian<S>) -> &[S; 3] {
        &self.atoms[shell.atom].position
    }
}

impl Molecule<f64> {
    /// Same molecule with replaced nuclear coordinates. Basis functions
    /// follow their atoms; normalization is unaffected.
    pub fn with_coordinates(&self, coordinates: &[[f64; 3]]) -> Result<Molecule<f64>> {
        if coordinates.len() != self.atoms.len() {
            return Err(Error::Input(format!(
                "{} coordinate triples for {} atoms",
                coordinates.len(),
                self.atoms.len()
            )));
        }
        let mut out = self.clone();
        for (atom, pos) in out.atoms.iter_mut().zip(coordinates) {
            atom.position = *pos;
        }
        Ok(out)
    }

    pub fn with_diff_flags(&self, diff_flags: DiffFlags) -> Molecule<f64> {
        let mut out = self.clone();
        out.diff_flags = diff_flags;
        out
    }
}

/// Identifies one entry of the flattened parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKey {
    /// (atom index, axis 0..3)
    Coordinate { atom: usize, axis: usize },
    /// (basis function index, primitive index)
    Exponent { shell: usize, primitive: usize },
    /// (basis function index, primitive index)
    Coefficient { shell: usize, primitive: usize },
}

/// Deterministic map between flagged molecule parameters and a flat vector:
/// coordinates first (atom-major, x/y/z), then exponents, then contraction
/// coefficients (shell-major, primitive-minor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterLayout {
    pub keys: Vec<ParamKey>,
}

impl ParameterLayout {
    pub fn for_molecule<S: Scalar>(mol: &Molecule<S>) -> Self {
        let mut keys = Vec::new();
        if mol.diff_flags.coordinates {
            for atom in 0..mol.atoms.len() {
                for axis in 0..3 {
                    keys.push(ParamKey::Coordinate { atom, axis });
                }
            }
        }
        if mol.diff_flags.exponents {
            for (shell, cg) in mol.basis_functions.iter().enumerate() {
                for primitive in 0..cg.primitives.len() {
                    keys.push(ParamKey::Exponent { shell, primitive });
                }
            }
        }
        if mol.diff_flags.coefficients {
            for (shell, cg) in mol.basis_functions.iter().enumerate() {
                for primitive in 0..cg.primitives.len() {
                    keys.push(ParamKey::Coefficient { shell, primitive });
                }
            }
        }
        ParameterLayout { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ParameterVector {
    pub values: Vec<f64>,
    pub layout: ParameterLayout,
}

/// Flattens the flagged parameters of a molecule.
pub fn pack_parameters(mol: &Molecule<f64>) -> ParameterVector {
    let layout = ParameterLayout::for_molecule(mol);
    let values = layout
        .keys
        .iter()
        .map(|key| match *key {
            ParamKey::Coordinate { atom, axis } => mol.atoms[atom].position[axis],
            ParamKey::Exponent { shell, primitive } => {
                mol.basis_functions[shell].primitives[primitive].exponent
            }
            ParamKey::Coefficient { shell, primitive } => {
                mol.basis_functions[shell].primitives[primitive].coefficient
            }
        })
        .collect();
    ParameterVector { values, layout }
}

/// Rebuilds a molecule over any scalar type from a template and a flat
/// parameter slice matching the template's layout. Unflagged parameters are
/// lifted as constants; contraction normalizations are recomputed so they
/// stay consistent with perturbed exponents and coefficients.
pub fn unpack_parameters<S: Scalar>(template: &Molecule<f64>, values: &[S]) -> Result<Molecule<S>> {
    let layout = ParameterLayout::for_molecule(template);
    if values.len() != layout.len() {
        return Err(Error::Layout {
            expected: layout.len(),
            got: values.len(),
        });
    }

    let mut positions: Vec<[S; 3]> = template
        .atoms
        .iter()
        .map(|a| a.position.map(S::constant))
        .collect();
    let mut exponents: Vec<Vec<S>> = template
        .basis_functions
        .iter()
        .map(|cg| cg.primitives.iter().map(|p| S::constant(p.exponent)).collect())
        .collect();
    let mut coefficients: Vec<Vec<S>> = template
        .basis_functions
        .iter()
        .map(|cg| {
            cg.primitives
                .iter()
                .map(|p| S::constant(p.coefficient))
                .collect()
        })
        .collect();

    for (key, value) in layout.keys.iter().zip(values) {
        match *key {
            ParamKey::Coordinate { atom, axis } => positions[atom][axis] = value.clone(),
            ParamKey::Exponent { shell, primitive } => {
                exponents[shell][primitive] = value.clone()
            }
            ParamKey::Coefficient { shell, primitive } => {
                coefficients[shell][primitive] = value.clone()
            }
        }
    }

    let atoms: Vec<Atom<S>> = template
        .atoms
        .iter()
        .zip(positions)
        .map(|(a, position)| Atom {
            symbol: a.symbol.clone(),
            atomic_number: a.atomic_number,
            position,
        })
        .collect();
    let basis_functions = template
        .basis_functions
        .iter()
        .zip(exponents.into_iter().zip(coefficients))
        .map(|(cg, (exps, coeffs))| ContractedGaussian::new(cg.atom, cg.angular, exps, coeffs))
        .collect::<Result<Vec<_>>>()?;

    Ok(Molecule {
        atoms,
        charge: template.charge,
        n_electrons: template.n_electrons,
        basis_functions,
        diff_flags: template.diff_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h2(flags: DiffFlags) -> Molecule<f64> {
        build_molecule(
            &["H", "H"],
            &[[0.0, 0.0, 0.0], [0.0, 0.0, 1.4]],
            0,
            "sto-3g",
            flags,
        )
        .unwrap()
    }

    #[test]
    fn hydrogen_is_one_s_shell_of_three_primitives() {
        let shells = load_sto3g("H").unwrap();
        assert_eq!(shells.len(), 1);
        assert_eq!(shells[0].kind, ShellKind::S);
        assert_eq!(shells[0].exponents.len(), 3);
        let fns = expand_shells::<f64>(&shells, 0).unwrap();
        assert_eq!(fns.len(), 1);
        assert_eq!(fns[0].angular, (0, 0, 0));
    }

    #[test]
    fn carbon_expands_to_five_basis_functions() {
        let fns = expand_shells::<f64>(&load_sto3g("C").unwrap(), 0).unwrap();
        assert_eq!(fns.len(), 5);
        let p_count = fns.iter().filter(|f| f.angular != (0, 0, 0)).count();
        assert_eq!(p_count, 3);
        for f in &fns {
            assert_eq!(f.primitives.len(), 3);
        }
    }

    #[test]
    fn unknown_element_is_rejected_by_name() {
        let err = load_sto3g("Xx").unwrap_err();
        match err {
            Error::UnsupportedElement { symbol } => assert_eq!(symbol, "Xx"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn h2_has_two_electrons_and_two_basis_functions() {
        let mol = h2(DiffFlags::default());
        assert_eq!(mol.n_electrons, 2);
        assert_eq!(mol.n_basis(), 2);
        assert_eq!(mol.n_occupied(), 1);
    }

    #[test]
    fn h3_plus_has_two_electrons_three_basis_functions() {
        let d = 1.8;
        let mol = build_molecule(
            &["H", "H", "H"],
            &[
                [0.0, 0.0, 0.0],
                [d, 0.0, 0.0],
                [d / 2.0, d * 3f64.sqrt() / 2.0, 0.0],
            ],
            1,
            "sto-3g",
            DiffFlags::default(),
        )
        .unwrap();
        assert_eq!(mol.n_electrons, 2);
        assert_eq!(mol.n_basis(), 3);
    }

    #[test]
    fn odd_electron_count_is_a_closed_shell_violation() {
        let err = build_molecule(
            &["H", "H"],
            &[[0.0; 3], [0.0, 0.0, 1.4]],
            1,
            "sto-3g",
            DiffFlags::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ClosedShellViolation { .. }));
    }

    #[test]
    fn electron_count_follows_charge() {
        for (symbols, charge, expected) in [
            (vec!["He"], 0i64, 2usize),
            (vec!["Li", "H"], 0, 4),
            (vec!["O"], 2, 6),
        ] {
            let coords: Vec<[f64; 3]> = (0..symbols.len())
                .map(|i| [0.0, 0.0, 2.0 * i as f64])
                .collect();
            let mol =
                build_molecule(&symbols, &coords, charge, "sto-3g", DiffFlags::default()).unwrap();
            let z: i64 = mol.atoms.iter().map(|a| a.atomic_number as i64).sum();
            assert_eq!(mol.n_electrons as i64, z - charge);
            assert_eq!(mol.n_electrons, expected);
        }
    }

    #[test]
    fn mismatched_lengths_are_an_input_error() {
        let err = build_molecule(&["H", "H"], &[[0.0; 3]], 0, "sto-3g", DiffFlags::default())
            .unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn primitive_norm_closed_forms() {
        let n = primitive_norm(&1.0f64, (0, 0, 0)).unwrap();
        assert!((n - (2.0 / std::f64::consts::PI).powf(0.75)).abs() < 1e-14);
        for alpha in [0.3, 1.7, 42.0] {
            let n = primitive_norm(&alpha, (0, 0, 0)).unwrap();
            assert!((n - (2.0 * alpha / std::f64::consts::PI).powf(0.75)).abs() < 1e-12);
        }
        assert!(primitive_norm(&-1.0f64, (0, 0, 0)).is_err());
        assert!(primitive_norm(&0.0f64, (0, 0, 0)).is_err());
    }

    #[test]
    fn pack_length_counts_flagged_classes() {
        let mol = h2(DiffFlags::coordinates_only());
        assert_eq!(pack_parameters(&mol).values.len(), 6);
        let mol = h2(DiffFlags::all());
        assert_eq!(pack_parameters(&mol).values.len(), 6 + 6 + 6);
        let mol = h2(DiffFlags::default());
        assert_eq!(pack_parameters(&mol).values.len(), 0);
    }

    #[test]
    fn unpack_rejects_wrong_length() {
        let mol = h2(DiffFlags::coordinates_only());
        let err = unpack_parameters(&mol, &[0.0f64; 5]).unwrap_err();
        assert!(matches!(err, Error::Layout { expected: 6, got: 5 }));
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip_is_exact(
            coords in prop::bool::ANY,
            exps in prop::bool::ANY,
            coeffs in prop::bool::ANY,
            bond in 0.7f64..4.0,
        ) {
            let flags = DiffFlags { coordinates: coords, exponents: exps, coefficients: coeffs };
            let mol = build_molecule(
                &["H", "H"],
                &[[0.0, 0.0, 0.0], [0.0, 0.0, bond]],
                0,
                "sto-3g",
                flags,
            ).unwrap();
            let packed = pack_parameters(&mol);
            let rebuilt = unpack_parameters(&mol, &packed.values).unwrap();
            for (a, b) in mol.atoms.iter().zip(&rebuilt.atoms) {
                prop_assert_eq!(a.position, b.position);
            }
            for (f, g) in mol.basis_functions.iter().zip(&rebuilt.basis_functions) {
                prop_assert_eq!(f.normalization, g.normalization);
                for (p, q) in f.primitives.iter().zip(&g.primitives) {
                    prop_assert_eq!(p.exponent, q.exponent);
                    prop_assert_eq!(p.coefficient, q.coefficient);
                }
            }
            let repacked = pack_parameters(&rebuilt);
            prop_assert_eq!(packed.values, repacked.values);
        }
    }
}
