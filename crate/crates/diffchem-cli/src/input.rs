//! File formats consumed by the CLI: the molecule description and
//! serialized circuits.

use diffchem::circuits::Circuit;
use diffchem::molecule::{build_molecule, DiffFlags, Molecule};
use diffchem::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DifferentiateInput {
    #[serde(default)]
    pub coordinates: bool,
    #[serde(default)]
    pub exponents: bool,
    #[serde(default)]
    pub coefficients: bool,
}

fn default_basis() -> String {
    "sto-3g".to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MoleculeInput {
    pub symbols: Vec<String>,
    pub coordinates_bohr: Vec<[f64; 3]>,
    #[serde(default)]
    pub charge: i64,
    #[serde(default = "default_basis")]
    pub basis: String,
    #[serde(default)]
    pub differentiate: DifferentiateInput,
}

impl MoleculeInput {
    pub fn load(path: &Path) -> Result<MoleculeInput> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn to_molecule(&self) -> Result<Molecule<f64>> {
        let symbols: Vec<&str> = self.symbols.iter().map(|s| s.as_str()).collect();
        build_molecule(
            &symbols,
            &self.coordinates_bohr,
            self.charge,
            &self.basis,
            DiffFlags {
                coordinates: self.differentiate.coordinates,
                exponents: self.differentiate.exponents,
                coefficients: self.differentiate.coefficients,
            },
        )
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let raw: Circuit = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("cannot parse {}: {e}", path.display())))?;
    // re-validate wires and parameter slots
    Circuit::new(raw.n_qubits, raw.gates, raw.n_parameters)
}
