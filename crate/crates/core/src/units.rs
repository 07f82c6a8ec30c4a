//! Unit systems and physical constants.
//!
//! Two modes are supported. In SI mode lengths are metres, energies joules,
//! charges are counts of the elementary charge and masses are unified atomic
//! mass units; conversion to base units happens here and nowhere else. In
//! reduced mode the Coulomb constant is 1 and every quantity is dimensionless.

use serde::{Deserialize, Serialize};

/// CODATA-style constant set carried by a [`UnitSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Elementary charge, C.
    pub elementary_charge: f64,
    /// Vacuum permittivity, F/m.
    pub vacuum_permittivity: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Unified atomic mass unit, kg.
    pub atomic_mass_unit: f64,
    /// Speed of light, m/s.
    pub speed_of_light: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        elementary_charge: 1.602176634e-19,
        vacuum_permittivity: 8.8541878128e-12,
        hbar: 1.054571817e-34,
        atomic_mass_unit: 1.66053906660e-27,
        speed_of_light: 2.99792458e8,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitMode {
    #[serde(rename = "SI")]
    Si,
    #[serde(rename = "reduced")]
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    mode: UnitMode,
    constants: PhysicalConstants,
}

impl UnitSystem {
    pub fn si() -> Self {
        Self::si_with(PhysicalConstants::CODATA_2018)
    }

    /// SI mode with a custom constant set (used for negative controls).
    pub fn si_with(constants: PhysicalConstants) -> Self {
        UnitSystem {
            mode: UnitMode::Si,
            constants,
        }
    }

    pub fn reduced() -> Self {
        UnitSystem {
            mode: UnitMode::Reduced,
            constants: PhysicalConstants::CODATA_2018,
        }
    }

    pub fn mode(&self) -> UnitMode {
        self.mode
    }

    pub fn is_si(&self) -> bool {
        self.mode == UnitMode::Si
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// k_C = 1/(4 pi eps0) in SI, 1 in reduced units.
    pub fn coulomb_constant(&self) -> f64 {
        match self.mode {
            UnitMode::Si => 1.0 / (4.0 * std::f64::consts::PI * self.constants.vacuum_permittivity),
            UnitMode::Reduced => 1.0,
        }
    }

    /// Multiplier turning a charge count into the working charge unit.
    pub fn charge_scale(&self) -> f64 {
        match self.mode {
            UnitMode::Si => self.constants.elementary_charge,
            UnitMode::Reduced => 1.0,
        }
    }

    /// Multiplier turning a mass in u into the working mass unit.
    pub fn mass_scale(&self) -> f64 {
        match self.mode {
            UnitMode::Si => self.constants.atomic_mass_unit,
            UnitMode::Reduced => 1.0,
        }
    }

    /// k_C q1 q2 for two charges given as counts.
    pub fn coulomb_strength(&self, q1: f64, q2: f64) -> f64 {
        let e = self.charge_scale();
        self.coulomb_constant() * q1 * e * q2 * e
    }

    /// Speed of light in cm/s, SI only.
    pub fn speed_of_light_cm(&self) -> Option<f64> {
        self.is_si().then_some(self.constants.speed_of_light * 100.0)
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::reduced()
    }
}
