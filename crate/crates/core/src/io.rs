//! JSON molecule specification files.
//!
//! ```json
//! {
//!   "species": [{"label": "X", "charge": 1, "mass": 1, "count": 3}],
//!   "units": "reduced",
//!   "coefficients": [{"pair": ["X", "X"], "value": 0.5}],
//!   "initial_configuration": [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, MoleculeSpec, Species};
use crate::potential::{ModelCoefficients, PotentialModel};
use crate::units::{UnitMode, UnitSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesEntry {
    pub label: String,
    pub charge: f64,
    pub mass: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub pair: [String; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub species: Vec<SpeciesEntry>,
    pub units: UnitMode,
    #[serde(default)]
    pub coefficients: Vec<CoefficientEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_configuration: Option<Vec<[f64; 3]>>,
}

impl SpecFile {
    /// Parse and validate. Syntax errors carry the line and column,
    /// schema errors the offending field.
    pub fn from_json(text: &str) -> Result<SpecFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files serialize")
    }

    pub fn from_model(model: &PotentialModel, initial: Option<&Configuration>) -> SpecFile {
        SpecFile {
            name: None,
            species: model
                .spec()
                .species()
                .iter()
                .map(|s| SpeciesEntry {
                    label: s.label.clone(),
                    charge: s.charge,
                    mass: s.mass,
                    count: s.count,
                })
                .collect(),
            units: model.units().mode(),
            coefficients: model
                .coefficients()
                .iter()
                .map(|((a, b), v)| CoefficientEntry {
                    pair: [a.clone(), b.clone()],
                    value: *v,
                })
                .collect(),
            initial_configuration: initial.map(Configuration::to_arrays),
        }
    }

    pub fn unit_system(&self) -> UnitSystem {
        match self.units {
            UnitMode::Si => UnitSystem::si(),
            UnitMode::Reduced => UnitSystem::reduced(),
        }
    }

    pub fn molecule_spec(&self) -> Result<MoleculeSpec> {
        let species = self
            .species
            .iter()
            .map(|s| Species::new(s.label.clone(), s.charge, s.mass, s.count))
            .collect::<Result<Vec<_>>>()?;
        MoleculeSpec::new(species)
    }

    /// Build the model with the file's own unit system.
    pub fn model(&self) -> Result<PotentialModel> {
        self.model_with_units(self.unit_system())
    }

    /// Build the model with an explicit unit system, e.g. one with
    /// modified constants.
    pub fn model_with_units(&self, units: UnitSystem) -> Result<PotentialModel> {
        let mut coeffs = ModelCoefficients::new();
        for c in &self.coefficients {
            coeffs.set(&c.pair[0], &c.pair[1], c.value);
        }
        PotentialModel::new(self.molecule_spec()?, coeffs, units)
    }

    pub fn initial_configuration(&self) -> Result<Option<Configuration>> {
        match &self.initial_configuration {
            None => Ok(None),
            Some(points) => {
                let spec = self.molecule_spec()?;
                let c = Configuration::from_arrays(points)?;
                if c.len() != spec.n_nuclei() {
                    return Err(Error::Dimension {
                        expected: spec.n_nuclei(),
                        found: c.len(),
                    });
                }
                Ok(Some(c))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigurationFile {
    Bare(Vec<[f64; 3]>),
    Wrapped { configuration: Vec<[f64; 3]> },
}

/// A configuration file: either `[[x, y, z], ...]` or
/// `{"configuration": [[x, y, z], ...]}`.
pub fn parse_configuration(text: &str) -> Result<Configuration> {
    let f: ConfigurationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let points = match f {
        ConfigurationFile::Bare(p) | ConfigurationFile::Wrapped { configuration: p } => p,
    };
    Configuration::from_arrays(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X3: &str = r#"{
        "species": [{"label": "X", "charge": 1, "mass": 1, "count": 3}],
        "units": "reduced",
        "coefficients": [{"pair": ["X", "X"], "value": 0.5}]
    }"#;

    #[test]
    fn parses_and_builds() {
        let f = SpecFile::from_json(X3).unwrap();
        let m = f.model().unwrap();
        assert_eq!(m.spec().n_nuclei(), 3);
        assert_eq!(m.coefficients().get("X", "X"), Some(0.5));
        let again = SpecFile::from_json(&SpecFile::from_model(&m, None).to_json()).unwrap();
        assert_eq!(again.species, f.species);
        assert_eq!(again.coefficients, f.coefficients);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let e = SpecFile::from_json("{\"species\": [}").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let e = SpecFile::from_json(r#"{"species": [{"label": "X", "mass": 1, "count": 1}], "units": "SI"}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("charge"), "{e}");
        let e = SpecFile::from_json(r#"{"species": [], "units": "cgs"}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("cgs"), "{e}");
    }

    #[test]
    fn missing_coefficient_is_reported() {
        let f = SpecFile::from_json(
            r#"{"species": [{"label": "X", "charge": 1, "mass": 1, "count": 1},
                            {"label": "Y", "charge": 1, "mass": 1, "count": 2}],
                "units": "reduced",
                "coefficients": [{"pair": ["X", "Y"], "value": 0.5}]}"#,
        )
        .unwrap();
        assert!(matches!(f.model(), Err(Error::MissingCoefficient(..))));
    }

    #[test]
    fn configurations() {
        let c = parse_configuration("[[0,0,1],[0,0,-1]]").unwrap();
        assert_eq!(c.len(), 2);
        let c = parse_configuration(r#"{"configuration": [[0,0,1],[0,0,-1]]}"#).unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_configuration("[[0,0]]").is_err());
    }
}
