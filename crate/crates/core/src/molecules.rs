//! The small molecule types that have closed-form treatment, and builders
//! for their model potentials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MoleculeSpec, Species};
use crate::potential::{ModelCoefficients, PotentialModel};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoleculeType {
    #[serde(rename = "XY")]
    Xy,
    #[serde(rename = "X2")]
    X2,
    #[serde(rename = "XY2")]
    Xy2,
    #[serde(rename = "X3")]
    X3,
    #[serde(rename = "XY3")]
    Xy3,
    #[serde(rename = "X4")]
    X4,
}

impl MoleculeType {
    pub const ALL: [MoleculeType; 6] = [
        MoleculeType::Xy,
        MoleculeType::X2,
        MoleculeType::Xy2,
        MoleculeType::X3,
        MoleculeType::Xy3,
        MoleculeType::X4,
    ];

    /// Recognize the type from the species block structure. The lone `X`
    /// nucleus must come first for the mixed types.
    pub fn of(spec: &MoleculeSpec) -> Option<MoleculeType> {
        match spec.counts().as_slice() {
            [1, 1] => Some(MoleculeType::Xy),
            [2] => Some(MoleculeType::X2),
            [1, 2] => Some(MoleculeType::Xy2),
            [3] => Some(MoleculeType::X3),
            [1, 3] => Some(MoleculeType::Xy3),
            [4] => Some(MoleculeType::X4),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MoleculeType::Xy => "XY",
            MoleculeType::X2 => "X2",
            MoleculeType::Xy2 => "XY2",
            MoleculeType::X3 => "X3",
            MoleculeType::Xy3 => "XY3",
            MoleculeType::X4 => "X4",
        }
    }
}

impl fmt::Display for MoleculeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MoleculeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MoleculeType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("molecule type {s}")))
    }
}

fn unit_mass_species(label: &str, charge: f64, count: usize) -> Result<Species> {
    Species::new(label, charge, 1.0, count)
}

/// Heteronuclear diatomic with coefficient `a`.
pub fn xy_model(q1: f64, q2: f64, a: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q1, 1)?, unit_mass_species("Y", q2, 1)?])?;
    PotentialModel::new(spec, ModelCoefficients::new().with("X", "Y", a), units)
}

pub fn x2_model(q: f64, a: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q, 2)?])?;
    PotentialModel::new(spec, ModelCoefficients::new().with("X", "X", a), units)
}

/// `X` (charge q) bonded to two `Y` (charge Q); `a1` couples X-Y, `c1` Y-Y.
pub fn xy2_model(q: f64, big_q: f64, a1: f64, c1: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q, 1)?, unit_mass_species("Y", big_q, 2)?])?;
    PotentialModel::new(
        spec,
        ModelCoefficients::new().with("X", "Y", a1).with("Y", "Y", c1),
        units,
    )
}

pub fn x3_model(q: f64, a2: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q, 3)?])?;
    PotentialModel::new(spec, ModelCoefficients::new().with("X", "X", a2), units)
}

pub fn xy3_model(q: f64, big_q: f64, a3: f64, c3: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q, 1)?, unit_mass_species("Y", big_q, 3)?])?;
    PotentialModel::new(
        spec,
        ModelCoefficients::new().with("X", "Y", a3).with("Y", "Y", c3),
        units,
    )
}

pub fn x4_model(q: f64, a4: f64, units: UnitSystem) -> Result<PotentialModel> {
    let spec = MoleculeSpec::new(vec![unit_mass_species("X", q, 4)?])?;
    PotentialModel::new(spec, ModelCoefficients::new().with("X", "X", a4), units)
}
