//! The model nuclear potential: Coulomb repulsion plus the lowest-order
//! invariant expansion of the electronic energy,
//!
//! ```text
//! V(R) = sum_{j<l} [ c_{jl} |R_j - R_l|^2 + k_C q_j q_l / |R_j - R_l| ]
//! ```
//!
//! where `c_{jl}` depends only on the species of the two nuclei. Every term is
//! a function `f(r) = c r^2 + k / r` of one pair distance, which makes the
//! analytic gradient and Hessian straightforward.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Configuration, Mat3, MoleculeSpec, Vec3};
use crate::units::UnitSystem;

/// Pair distances below this fraction of the largest one are treated as a
/// collision.
pub const DIVERGENCE_GUARD: f64 = 1e-9;

/// Species-pair coefficients of the quadratic electronic energy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelCoefficients {
    values: BTreeMap<(String, String), f64>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl ModelCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, a: &str, b: &str, value: f64) -> Self {
        self.set(a, b, value);
        self
    }

    pub fn set(&mut self, a: &str, b: &str, value: f64) {
        self.values.insert(pair_key(a, b), value);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        self.values.get(&pair_key(a, b)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &f64)> {
        self.values.iter()
    }
}

#[derive(Debug, Clone, Copy)]
struct PairTerm {
    j: usize,
    l: usize,
    quad: f64,
    coulomb: f64,
}

impl PairTerm {
    fn value(&self, r: f64) -> (f64, f64) {
        (self.quad * r * r, self.coulomb / r)
    }

    /// f'(r)
    fn d1(&self, r: f64) -> f64 {
        2.0 * self.quad * r - self.coulomb / (r * r)
    }

    /// f''(r)
    fn d2(&self, r: f64) -> f64 {
        2.0 * self.quad + 2.0 * self.coulomb / (r * r * r)
    }
}

#[derive(Debug, Clone)]
pub struct PotentialModel {
    spec: MoleculeSpec,
    coeffs: ModelCoefficients,
    units: UnitSystem,
    pairs: Vec<PairTerm>,
}

/// Value, gradient and Hessian at one configuration.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl PotentialModel {
    pub fn new(spec: MoleculeSpec, coeffs: ModelCoefficients, units: UnitSystem) -> Result<Self> {
        for (i, j) in spec.present_pairs() {
            let (a, b) = (&spec.species()[i].label, &spec.species()[j].label);
            match coeffs.get(a, b) {
                None => return Err(Error::MissingCoefficient(a.clone(), b.clone())),
                Some(v) if !v.is_finite() || v == 0.0 => {
                    return Err(Error::InvalidCoefficient(format!(
                        "{a}-{b} = {v} (must be finite and nonzero)"
                    )))
                }
                Some(_) => {}
            }
        }
        let mut pairs = Vec::new();
        let n = spec.n_nuclei();
        for j in 0..n {
            for l in j + 1..n {
                let (sj, sl) = (&spec.species()[spec.species_of(j)], &spec.species()[spec.species_of(l)]);
                pairs.push(PairTerm {
                    j,
                    l,
                    quad: coeffs.get(&sj.label, &sl.label).unwrap(),
                    coulomb: units.coulomb_strength(sj.charge, sl.charge),
                });
            }
        }
        Ok(PotentialModel {
            spec,
            coeffs,
            units,
            pairs,
        })
    }

    pub fn spec(&self) -> &MoleculeSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &ModelCoefficients {
        &self.coeffs
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    /// Largest of the per-pair equilibrium lengths `[k / (2|c|)]^(1/3)`.
    pub fn length_scale(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| (p.coulomb / (2.0 * p.quad.abs())).cbrt())
            .fold(0.0, f64::max)
    }

    /// Typical force magnitude `max k / L^2`, used to scale tolerances.
    pub fn force_scale(&self) -> f64 {
        let l = self.length_scale();
        self.pairs.iter().map(|p| p.coulomb).fold(0.0, f64::max) / (l * l)
    }

    fn check(&self, config: &Configuration) -> Result<()> {
        self.spec.check_len(config.len())
    }

    fn guarded_distances(&self, config: &Configuration) -> Result<Vec<(Vec3, f64)>> {
        self.check(config)?;
        let pos = config.positions();
        let out: Vec<(Vec3, f64)> = self
            .pairs
            .iter()
            .map(|p| {
                let d = pos[p.j] - pos[p.l];
                let r = d.norm();
                (d, r)
            })
            .collect();
        let scale = out.iter().map(|x| x.1).fold(0.0, f64::max);
        for (p, (_, r)) in self.pairs.iter().zip(&out) {
            if *r == 0.0 || *r < DIVERGENCE_GUARD * scale {
                return Err(Error::Degenerate(p.j, p.l));
            }
        }
        Ok(out)
    }

    pub fn coulomb_energy(&self, config: &Configuration) -> Result<f64> {
        let d = self.guarded_distances(config)?;
        Ok(self.pairs.iter().zip(&d).map(|(p, (_, r))| p.value(*r).1).sum())
    }

    pub fn model_electronic_energy(&self, config: &Configuration) -> Result<f64> {
        self.check(config)?;
        let pos = config.positions();
        Ok(self
            .pairs
            .iter()
            .map(|p| p.quad * (pos[p.j] - pos[p.l]).norm_squared())
            .sum())
    }

    pub fn total_potential(&self, config: &Configuration) -> Result<f64> {
        let d = self.guarded_distances(config)?;
        Ok(self
            .pairs
            .iter()
            .zip(&d)
            .map(|(p, (_, r))| {
                let (e, c) = p.value(*r);
                e + c
            })
            .sum())
    }

    pub fn gradient(&self, config: &Configuration) -> Result<DVector<f64>> {
        let d = self.guarded_distances(config)?;
        let mut g = DVector::zeros(3 * config.len());
        for (p, (v, r)) in self.pairs.iter().zip(&d) {
            let f = v * (p.d1(*r) / r);
            for k in 0..3 {
                g[3 * p.j + k] += f[k];
                g[3 * p.l + k] -= f[k];
            }
        }
        Ok(g)
    }

    pub fn hessian(&self, config: &Configuration) -> Result<DMatrix<f64>> {
        let d = self.guarded_distances(config)?;
        let n = config.len();
        let mut h = DMatrix::zeros(3 * n, 3 * n);
        for (p, (v, r)) in self.pairs.iter().zip(&d) {
            let u = v / *r;
            let radial = p.d2(*r);
            let transverse = p.d1(*r) / r;
            let uu = u * u.transpose();
            let block: Mat3 = uu * radial + (Mat3::identity() - uu) * transverse;
            add_block(&mut h, p.j, p.j, &block);
            add_block(&mut h, p.l, p.l, &block);
            add_block(&mut h, p.j, p.l, &-block);
            add_block(&mut h, p.l, p.j, &-block);
        }
        Ok(h)
    }

    pub fn evaluate(&self, config: &Configuration) -> Result<Evaluation> {
        Ok(Evaluation {
            value: self.total_potential(config)?,
            gradient: self.gradient(config)?,
            hessian: self.hessian(config)?,
        })
    }
}

fn add_block(h: &mut DMatrix<f64>, a: usize, b: usize, block: &Mat3) {
    let mut view = h.fixed_view_mut::<3, 3>(3 * a, 3 * b);
    view += block;
}

/// Second-order expansion of `1/|rho + delta|`:
///
/// ```text
/// 1/|rho| - rho.delta/|rho|^3 - delta^2/(2|rho|^3) + 3 (rho.delta)^2 / (2|rho|^5)
/// ```
pub fn inverse_norm_quadratic(rho: &Vec3, delta: &Vec3) -> Result<f64> {
    Ok(1.0 / rho.norm() + inverse_norm_correction(rho, delta)?)
}

/// The part of [`inverse_norm_quadratic`] beyond `1/|rho|`, kept separate so
/// small corrections can be compared without cancellation against the
/// leading term.
pub fn inverse_norm_correction(rho: &Vec3, delta: &Vec3) -> Result<f64> {
    let r = rho.norm();
    if r == 0.0 {
        return Err(Error::Domain("expansion point rho must be nonzero".into()));
    }
    let r3 = r * r * r;
    let dot = rho.dot(delta);
    Ok(-dot / r3 - 0.5 * delta.norm_squared() / r3 + 1.5 * dot * dot / (r3 * r * r))
}

/// `1/|rho + delta| - 1/|rho|` evaluated without cancellation.
pub fn inverse_norm_difference(rho: &Vec3, delta: &Vec3) -> f64 {
    let r = rho.norm();
    let s = (rho + delta).norm();
    let u = 2.0 * rho.dot(delta) + delta.norm_squared();
    -u / (r * s * (r + s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Species;

    pub(crate) fn reduced_model(blocks: &[(&str, f64, usize)], coeffs: &[(&str, &str, f64)]) -> PotentialModel {
        let spec = MoleculeSpec::new(
            blocks
                .iter()
                .map(|(l, q, n)| Species::new(*l, *q, 1.0, *n).unwrap())
                .collect(),
        )
        .unwrap();
        let mut c = ModelCoefficients::new();
        for (a, b, v) in coeffs {
            c.set(a, b, *v);
        }
        PotentialModel::new(spec, c, UnitSystem::reduced()).unwrap()
    }

    fn cfg(p: &[[f64; 3]]) -> Configuration {
        Configuration::from_arrays(p).unwrap()
    }

    #[test]
    fn coulomb_examples() {
        let m = reduced_model(&[("X", 1.0, 2)], &[("X", "X", 0.5)]);
        assert_eq!(m.coulomb_energy(&cfg(&[[0.0; 3], [0.0, 0.0, 1.0]])).unwrap(), 1.0);
        assert_eq!(m.coulomb_energy(&cfg(&[[0.0; 3], [0.0, 0.0, 2.0]])).unwrap(), 0.5);
        let m3 = reduced_model(&[("X", 1.0, 3)], &[("X", "X", 0.5)]);
        let s3 = 3f64.sqrt();
        let tri = cfg(&[[0.0; 3], [1.0, 0.0, 0.0], [0.5, s3 / 2.0, 0.0]]);
        assert!((m3.coulomb_energy(&tri).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn electronic_examples() {
        let m = reduced_model(&[("X", 1.0, 1), ("Y", 1.0, 1)], &[("X", "Y", 0.5)]);
        assert_eq!(
            m.model_electronic_energy(&cfg(&[[0.0; 3], [0.0, 0.0, 1.0]])).unwrap(),
            0.5
        );
        let m = reduced_model(&[("X", 1.0, 1), ("Y", 1.0, 2)], &[("X", "Y", 1.0), ("Y", "Y", 2.0)]);
        let r = cfg(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert_eq!(m.model_electronic_energy(&r).unwrap(), 6.0);
    }

    #[test]
    fn total_xy() {
        let m = reduced_model(&[("X", 1.0, 1), ("Y", 1.0, 1)], &[("X", "Y", 0.5)]);
        assert_eq!(m.total_potential(&cfg(&[[0.0; 3], [0.0, 0.0, 1.0]])).unwrap(), 1.5);
    }

    #[test]
    fn radial_scan_minimum() {
        // grid oracle over d in (0, 5]
        let m = reduced_model(&[("X", 1.0, 1), ("Y", 1.0, 1)], &[("X", "Y", 0.5)]);
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..=50_000 {
            let d = 5.0 * i as f64 / 50_000.0;
            let v = m.total_potential(&cfg(&[[0.0; 3], [0.0, 0.0, d]])).unwrap();
            if v < best.0 {
                best = (v, d);
            }
        }
        assert!((best.1 - 1.0).abs() <= 1e-4);
        assert!((best.0 - 1.5).abs() < 1e-8);
    }

    #[test]
    fn missing_and_zero_coefficients() {
        let spec = MoleculeSpec::new(vec![
            Species::new("X", 1.0, 1.0, 1).unwrap(),
            Species::new("Y", 1.0, 1.0, 2).unwrap(),
        ])
        .unwrap();
        let c = ModelCoefficients::new().with("X", "Y", 1.0);
        assert!(matches!(
            PotentialModel::new(spec.clone(), c, UnitSystem::reduced()),
            Err(Error::MissingCoefficient(..))
        ));
        let c = ModelCoefficients::new().with("X", "Y", 1.0).with("Y", "Y", 0.0);
        assert!(matches!(
            PotentialModel::new(spec, c, UnitSystem::reduced()),
            Err(Error::InvalidCoefficient(_))
        ));
    }

    #[test]
    fn coincident_nuclei_diverge() {
        let m = reduced_model(&[("X", 1.0, 2)], &[("X", "X", 0.5)]);
        let r = cfg(&[[1.0; 3], [1.0; 3]]);
        assert!(matches!(m.total_potential(&r), Err(Error::Degenerate(0, 1))));
        assert!(m.gradient(&r).is_err());
        assert!(m.hessian(&r).is_err());
        let m3 = reduced_model(&[("X", 1.0, 3)], &[("X", "X", 0.5)]);
        let r = cfg(&[[0.0; 3], [1.0, 0.0, 0.0], [1.0 + 1e-12, 0.0, 0.0]]);
        assert!(matches!(m3.coulomb_energy(&r), Err(Error::Degenerate(1, 2))));
    }

    #[test]
    fn xy_minimum_is_stationary_with_axial_constant_6a() {
        let m = reduced_model(&[("X", 1.0, 1), ("Y", 1.0, 1)], &[("X", "Y", 0.5)]);
        let r = cfg(&[[0.0; 3], [0.0, 0.0, 1.0]]);
        assert!(m.gradient(&r).unwrap().norm() <= 1e-10);
        let h = m.hessian(&r).unwrap();
        // d^2 V / dz2^2 is the axial force constant 6a; the Cartesian
        // eigenvalue of the [[k,-k],[-k,k]] block is 2k.
        assert!((h[(5, 5)] - 3.0).abs() < 1e-12);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[5] - 6.0).abs() < 1e-12);
        assert!(ev[..5].iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn inverse_norm_examples() {
        let rho = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(inverse_norm_quadratic(&rho, &Vec3::zeros()).unwrap(), 1.0);
        let eps = 0.01;
        let v = inverse_norm_quadratic(&rho, &Vec3::new(eps, 0.0, 0.0)).unwrap();
        assert!((v - (1.0 - eps * eps / 2.0)).abs() < 1e-15);
        assert!(inverse_norm_quadratic(&Vec3::zeros(), &rho).is_err());

        let err = |e: f64| {
            let exact = 1.0 / (rho + Vec3::new(0.0, 0.0, e)).norm();
            (inverse_norm_quadratic(&rho, &Vec3::new(0.0, 0.0, e)).unwrap() - exact).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((7.0..=9.0).contains(&ratio), "ratio {ratio}");
    }
}
