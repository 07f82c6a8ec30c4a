#![allow(dead_code)]

use molshape::molecules::*;
use molshape::{Configuration, MoleculeType, PotentialModel, UnitSystem, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A reduced-units model of the given type with random positive parameters.
pub fn random_model(t: MoleculeType, rng: &mut impl Rng) -> PotentialModel {
    let red = UnitSystem::reduced();
    let mut p = || rng.random_range(0.3..3.0);
    match t {
        MoleculeType::Xy => xy_model(p(), p(), p(), red),
        MoleculeType::X2 => x2_model(p(), p(), red),
        MoleculeType::Xy2 => xy2_model(p(), p(), p(), p(), red),
        MoleculeType::X3 => x3_model(p(), p(), red),
        MoleculeType::Xy3 => xy3_model(p(), p(), p(), p(), red),
        MoleculeType::X4 => x4_model(p(), p(), red),
    }
    .unwrap()
}

/// Nuclei uniform in a ball of radius `2 * scale`, no two closer than
/// `0.2 * scale`.
pub fn random_configuration(n: usize, scale: f64, rng: &mut impl Rng) -> Configuration {
    loop {
        let pts: Vec<Vec3> = (0..n)
            .map(|_| loop {
                let v = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() <= 1.0 {
                    break v * 2.0 * scale;
                }
            })
            .collect();
        let c = Configuration::new(pts).unwrap();
        if n < 2 || c.min_pair_distance() >= 0.2 * scale {
            return c;
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
