//! Symmetry analysis of molecular shape for a model nuclear potential.

pub mod equilibria;
pub mod error;
pub mod io;
pub mod model;
pub mod molecules;
pub mod optimizer;
pub mod potential;
pub mod strata;
pub mod symmetry;
pub mod units;
pub mod vibrations;

pub use error::{Error, Result};
pub use model::{
    apply_group_element, apply_translation, pair_distance_signature, Configuration, GroupElement, MoleculeSpec,
    OrthogonalMatrix3, PairSignature, Species, SpeciesPermutation, Vec3,
};
pub use molecules::MoleculeType;
pub use potential::{
    inverse_norm_correction, inverse_norm_difference, inverse_norm_quadratic, ModelCoefficients, PotentialModel,
};
pub use units::{PhysicalConstants, UnitMode, UnitSystem};
