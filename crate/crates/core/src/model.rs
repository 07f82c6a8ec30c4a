//! Molecules, configurations and the symmetry group acting on them.
//!
//! Nuclei are ordered in contiguous species blocks: the first `p_1` positions
//! belong to the first species, the next `p_2` to the second, and so on. Every
//! permutation in the group is species-local, so a group element is a block
//! diagonal permutation tensored with a 3x3 orthogonal matrix.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub label: String,
    /// Nuclear charge as a multiple of the elementary charge.
    pub charge: f64,
    /// Mass in unified atomic mass units.
    pub mass: f64,
    pub count: usize,
}

impl Species {
    pub fn new(label: impl Into<String>, charge: f64, mass: f64, count: usize) -> Result<Self> {
        let s = Species {
            label: label.into(),
            charge,
            mass,
            count,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(Error::InvalidSpec("species label is empty".into()));
        }
        if !(self.charge.is_finite() && self.charge > 0.0) {
            return Err(Error::InvalidSpec(format!("charge of {} must be positive", self.label)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidSpec(format!("mass of {} must be positive", self.label)));
        }
        if self.count == 0 {
            return Err(Error::InvalidSpec(format!(
                "count of {} must be at least 1",
                self.label
            )));
        }
        Ok(())
    }
}

/// Ordered species blocks. Nucleus indices of species `s` form the range
/// [`MoleculeSpec::block`]`(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec {
    species: Vec<Species>,
    offsets: Vec<usize>,
}

impl MoleculeSpec {
    pub fn new(species: Vec<Species>) -> Result<Self> {
        if species.is_empty() {
            return Err(Error::InvalidSpec("no species".into()));
        }
        for (i, s) in species.iter().enumerate() {
            s.validate()?;
            if species[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::InvalidSpec(format!("duplicate species label {}", s.label)));
            }
        }
        let mut offsets = Vec::with_capacity(species.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for s in &species {
            acc += s.count;
            offsets.push(acc);
        }
        Ok(MoleculeSpec { species, offsets })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    /// Total number of nuclei.
    pub fn n_nuclei(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block(&self, species: usize) -> std::ops::Range<usize> {
        self.offsets[species]..self.offsets[species + 1]
    }

    pub fn species_of(&self, nucleus: usize) -> usize {
        self.offsets[1..]
            .iter()
            .position(|&end| nucleus < end)
            .expect("nucleus index out of range")
    }

    pub fn charge(&self, nucleus: usize) -> f64 {
        self.species[self.species_of(nucleus)].charge
    }

    pub fn mass(&self, nucleus: usize) -> f64 {
        self.species[self.species_of(nucleus)].mass
    }

    pub fn species_index(&self, label: &str) -> Option<usize> {
        self.species.iter().position(|s| s.label == label)
    }

    /// Counts per species block, e.g. `[1, 2]` for XY2.
    pub fn counts(&self) -> Vec<usize> {
        self.species.iter().map(|s| s.count).collect()
    }

    /// Species pairs (i <= j) that occur between two distinct nuclei.
    pub fn present_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.species.len() {
            for j in i..self.species.len() {
                if i != j || self.species[i].count >= 2 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn pair_label(&self, i: usize, j: usize) -> String {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        format!("{}-{}", self.species[i].label, self.species[j].label)
    }

    /// `Dimension` error unless `n` is the number of nuclei.
    pub fn check_len(&self, n: usize) -> Result<()> {
        if n != self.n_nuclei() {
            return Err(Error::Dimension {
                expected: self.n_nuclei(),
                found: n,
            });
        }
        Ok(())
    }
}

/// A point of R^(3N): N nuclear positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    positions: Vec<Vec3>,
}

impl Configuration {
    pub fn new(positions: Vec<Vec3>) -> Result<Self> {
        if positions.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        Ok(Configuration { positions })
    }

    pub fn from_arrays(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
    }

    pub fn from_stacked(v: &DVector<f64>) -> Result<Self> {
        if !v.len().is_multiple_of(3) {
            return Err(Error::Dimension {
                expected: 3 * (v.len() / 3 + 1),
                found: v.len(),
            });
        }
        Self::new(v.as_slice().chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect())
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn to_arrays(&self) -> Vec<[f64; 3]> {
        self.positions.iter().map(|p| [p.x, p.y, p.z]).collect()
    }

    /// The stacked 3N-vector (x1, y1, z1, x2, ...).
    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(3 * self.len(), self.positions.iter().flat_map(|p| p.iter().copied()))
    }

    pub fn centroid(&self) -> Vec3 {
        self.positions.iter().sum::<Vec3>() / self.len().max(1) as f64
    }

    pub fn center_of_mass(&self, spec: &MoleculeSpec) -> Vec3 {
        let mut total = 0.0;
        let mut acc = Vec3::zeros();
        for (j, p) in self.positions.iter().enumerate() {
            let m = spec.mass(j);
            total += m;
            acc += m * p;
        }
        acc / total
    }

    /// Copy translated so that the center of mass sits at the origin.
    pub fn centered(&self, spec: &MoleculeSpec) -> Configuration {
        let com = self.center_of_mass(spec);
        apply_translation(&-com, self)
    }

    /// Largest distance of a nucleus from the centroid; 0 for a single point.
    pub fn radius(&self) -> f64 {
        let c = self.centroid();
        self.positions.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
    }

    pub fn max_pair_distance(&self) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..self.len() {
            for l in j + 1..self.len() {
                best = best.max((self.positions[j] - self.positions[l]).norm());
            }
        }
        best
    }

    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.len() {
            for l in j + 1..self.len() {
                best = best.min((self.positions[j] - self.positions[l]).norm());
            }
        }
        best
    }

    /// Unweighted second-moment tensor about the centroid.
    pub fn second_moment(&self) -> Mat3 {
        let c = self.centroid();
        self.positions.iter().map(|p| (p - c) * (p - c).transpose()).sum()
    }

    /// True when all nuclei lie on one line (second moment of rank <= 1).
    pub fn is_collinear(&self, rel_tol: f64) -> bool {
        let eig = self.second_moment().symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev[0] <= 0.0 || ev[1] <= rel_tol * ev[0]
    }

    /// Squared norm of the stacked vector.
    pub fn norm_squared(&self) -> f64 {
        self.positions.iter().map(|p| p.norm_squared()).sum()
    }

    pub fn scaled(&self, s: f64) -> Configuration {
        Configuration {
            positions: self.positions.iter().map(|p| p * s).collect(),
        }
    }
}

/// An element of O(3), validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalMatrix3(Mat3);

impl OrthogonalMatrix3 {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: Mat3) -> Result<Self> {
        Self::with_tolerance(m, Self::TOLERANCE)
    }

    pub fn with_tolerance(m: Mat3, tol: f64) -> Result<Self> {
        let residual = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        if residual.is_nan() || residual > tol || (det.abs() - 1.0).abs() > tol {
            return Err(Error::NotOrthogonal { residual });
        }
        Ok(OrthogonalMatrix3(m))
    }

    pub fn identity() -> Self {
        OrthogonalMatrix3(Mat3::identity())
    }

    pub fn inversion() -> Self {
        OrthogonalMatrix3(-Mat3::identity())
    }

    /// Proper rotation by `angle` about `axis` (Rodrigues).
    pub fn rotation(axis: &Vec3, angle: f64) -> Self {
        let k = axis.normalize();
        let kx = Mat3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
        let m = Mat3::identity() + angle.sin() * kx + (1.0 - angle.cos()) * kx * kx;
        OrthogonalMatrix3(m)
    }

    /// Reflection through the plane with the given normal.
    pub fn reflection(normal: &Vec3) -> Self {
        let n = normal.normalize();
        OrthogonalMatrix3(Mat3::identity() - 2.0 * n * n.transpose())
    }

    /// Rotation by `angle` about `axis` followed by reflection through the
    /// plane perpendicular to it.
    pub fn improper_rotation(axis: &Vec3, angle: f64) -> Self {
        Self::reflection(axis).compose(&Self::rotation(axis, angle))
    }

    /// Haar-uniform element of O(3).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q: nalgebra::Vector4<f64> = loop {
            let v = nalgebra::Vector4::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
        let m = Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        );
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        OrthogonalMatrix3(m * sign)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn is_proper(&self) -> bool {
        self.determinant() > 0.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn compose(&self, other: &OrthogonalMatrix3) -> OrthogonalMatrix3 {
        OrthogonalMatrix3(self.0 * other.0)
    }

    pub fn inverse(&self) -> OrthogonalMatrix3 {
        OrthogonalMatrix3(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn distance(&self, other: &OrthogonalMatrix3) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// A species-local permutation, stored as the global map `j -> pi(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpeciesPermutation {
    map: Vec<usize>,
}

impl SpeciesPermutation {
    pub fn identity(n: usize) -> Self {
        SpeciesPermutation { map: (0..n).collect() }
    }

    /// Build from one local permutation per species block (0-based images
    /// within the block).
    pub fn from_blocks(spec: &MoleculeSpec, blocks: &[Vec<usize>]) -> Result<Self> {
        if blocks.len() != spec.species().len() {
            return Err(Error::InvalidPermutation(format!(
                "{} blocks given for {} species",
                blocks.len(),
                spec.species().len()
            )));
        }
        let mut map = Vec::with_capacity(spec.n_nuclei());
        for (s, local) in blocks.iter().enumerate() {
            let range = spec.block(s);
            if local.len() != range.len() {
                return Err(Error::InvalidPermutation(format!(
                    "block {} has length {}, expected {}",
                    s,
                    local.len(),
                    range.len()
                )));
            }
            map.extend(local.iter().map(|&i| range.start + i));
        }
        Self::from_map(spec, map)
    }

    /// Build from a global map, checking bijectivity and species locality.
    pub fn from_map(spec: &MoleculeSpec, map: Vec<usize>) -> Result<Self> {
        spec.check_len(map.len())?;
        let mut seen = vec![false; map.len()];
        for (j, &img) in map.iter().enumerate() {
            if img >= map.len() || seen[img] {
                return Err(Error::InvalidPermutation(format!("not a bijection at {j}")));
            }
            seen[img] = true;
            if spec.species_of(img) != spec.species_of(j) {
                return Err(Error::InvalidPermutation(format!(
                    "nucleus {j} mapped across species blocks"
                )));
            }
        }
        Ok(SpeciesPermutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// `(self . other)(j) = self(other(j))`.
    pub fn compose(&self, other: &SpeciesPermutation) -> SpeciesPermutation {
        SpeciesPermutation {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    pub fn inverse(&self) -> SpeciesPermutation {
        let mut inv = vec![0; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i] = j;
        }
        SpeciesPermutation { map: inv }
    }

    /// Number of nuclei mapped to themselves.
    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|(j, &i)| *j == i).count()
    }
}

/// `P_N (x) h`: acts on a configuration as `(gR)_{pi(j)} = h R_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub perm: SpeciesPermutation,
    pub rotation: OrthogonalMatrix3,
}

impl GroupElement {
    pub fn new(perm: SpeciesPermutation, rotation: OrthogonalMatrix3) -> Self {
        GroupElement { perm, rotation }
    }

    pub fn identity(n: usize) -> Self {
        GroupElement::new(SpeciesPermutation::identity(n), OrthogonalMatrix3::identity())
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            perm: self.perm.compose(&other.perm),
            rotation: self.rotation.compose(&other.rotation),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            perm: self.perm.inverse(),
            rotation: self.rotation.inverse(),
        }
    }

    /// The 3N x 3N matrix with block `(pi(j), j)` equal to `h`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.perm.len();
        let mut m = DMatrix::zeros(3 * n, 3 * n);
        for j in 0..n {
            let i = self.perm.image(j);
            m.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(self.rotation.matrix());
        }
        m
    }

    /// Uniformly random species-local permutation tensored with a random
    /// orthogonal matrix.
    pub fn random<R: Rng + ?Sized>(spec: &MoleculeSpec, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let blocks: Vec<Vec<usize>> = spec
            .species()
            .iter()
            .map(|s| {
                let mut local: Vec<usize> = (0..s.count).collect();
                local.shuffle(rng);
                local
            })
            .collect();
        let perm = SpeciesPermutation::from_blocks(spec, &blocks).expect("shuffled blocks are valid");
        GroupElement::new(perm, OrthogonalMatrix3::random(rng))
    }
}

pub fn apply_group_element(g: &GroupElement, config: &Configuration) -> Result<Configuration> {
    if g.perm.len() != config.len() {
        return Err(Error::Dimension {
            expected: g.perm.len(),
            found: config.len(),
        });
    }
    let mut out = vec![Vec3::zeros(); config.len()];
    for (j, p) in config.positions().iter().enumerate() {
        out[g.perm.image(j)] = g.rotation.apply(p);
    }
    Ok(Configuration { positions: out })
}

pub fn apply_translation(t: &Vec3, config: &Configuration) -> Configuration {
    Configuration {
        positions: config.positions().iter().map(|p| p + t).collect(),
    }
}

/// Sorted (species-pair label, distance) list. Constant on group orbits and
/// under translations, so it serves as an orbit fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSignature(pub Vec<(String, f64)>);

impl PairSignature {
    /// Componentwise comparison, relative to the largest distance.
    pub fn matches(&self, other: &PairSignature, rel_tol: f64) -> bool {
        if self.0.len() != other.0.len() {
            return false;
        }
        let scale = self
            .0
            .iter()
            .chain(&other.0)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.0
            .iter()
            .zip(&other.0)
            .all(|((la, da), (lb, db))| la == lb && (da - db).abs() <= rel_tol * scale)
    }

    pub fn max_deviation(&self, other: &PairSignature) -> Option<f64> {
        if self.0.len() != other.0.len() || self.0.iter().zip(&other.0).any(|(a, b)| a.0 != b.0) {
            return None;
        }
        Some(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a.1 - b.1).abs())
                .fold(0.0, f64::max),
        )
    }
}

pub fn pair_distance_signature(spec: &MoleculeSpec, config: &Configuration) -> Result<PairSignature> {
    spec.check_len(config.len())?;
    let scale = config.max_pair_distance();
    let mut entries = Vec::new();
    for j in 0..config.len() {
        for l in j + 1..config.len() {
            let d = (config.positions()[j] - config.positions()[l]).norm();
            if d <= 1e-12 * scale || d == 0.0 {
                return Err(Error::Degenerate(j, l));
            }
            entries.push((spec.pair_label(spec.species_of(j), spec.species_of(l)), d));
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
    Ok(PairSignature(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xy() -> MoleculeSpec {
        MoleculeSpec::new(vec![
            Species::new("X", 1.0, 1.0, 1).unwrap(),
            Species::new("Y", 1.0, 1.0, 1).unwrap(),
        ])
        .unwrap()
    }

    fn x(n: usize) -> MoleculeSpec {
        MoleculeSpec::new(vec![Species::new("X", 1.0, 1.0, n).unwrap()]).unwrap()
    }

    fn cfg(p: &[[f64; 3]]) -> Configuration {
        Configuration::from_arrays(p).unwrap()
    }

    #[test]
    fn species_invariants() {
        assert!(Species::new("X", 0.0, 1.0, 1).is_err());
        assert!(Species::new("X", 1.0, -1.0, 1).is_err());
        assert!(Species::new("X", 1.0, 1.0, 0).is_err());
        let spec = MoleculeSpec::new(vec![
            Species::new("X", 1.0, 1.0, 1).unwrap(),
            Species::new("Y", 1.0, 1.0, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(spec.n_nuclei(), 3);
        assert_eq!(spec.block(1), 1..3);
        assert_eq!(spec.species_of(2), 1);
    }

    #[test]
    fn identity_action() {
        let r = cfg(&[[0.3, -1.0, 2.0], [1.0, 1.0, 1.0]]);
        let g = GroupElement::identity(2);
        assert_eq!(apply_group_element(&g, &r).unwrap(), r);
    }

    #[test]
    fn reflection_of_xy() {
        let spec = xy();
        let h = OrthogonalMatrix3::new(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))).unwrap();
        let g = GroupElement::new(SpeciesPermutation::identity(spec.n_nuclei()), h);
        let r = cfg(&[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]]);
        let out = apply_group_element(&g, &r).unwrap();
        assert_eq!(out, cfg(&[[0.0, 0.0, -1.0], [0.0, 0.0, -2.0]]));
    }

    #[test]
    fn swap_of_x2() {
        let spec = x(2);
        let swap = SpeciesPermutation::from_blocks(&spec, &[vec![1, 0]]).unwrap();
        let g = GroupElement::new(swap, OrthogonalMatrix3::identity());
        let r = cfg(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert_eq!(
            apply_group_element(&g, &r).unwrap(),
            cfg(&[[4.0, 5.0, 6.0], [1.0, 2.0, 3.0]])
        );
    }

    #[test]
    fn cross_species_permutation_rejected() {
        let spec = xy();
        assert!(SpeciesPermutation::from_map(&spec, vec![1, 0]).is_err());
        assert!(SpeciesPermutation::from_map(&spec, vec![0, 0]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let g = GroupElement::identity(3);
        let r = cfg(&[[0.0, 0.0, 0.0]]);
        assert!(matches!(apply_group_element(&g, &r), Err(Error::Dimension { .. })));
    }

    #[test]
    fn translations() {
        let r = cfg(&[[0.0, 0.0, 0.0]]);
        assert_eq!(apply_translation(&Vec3::zeros(), &r), r);
        assert_eq!(
            apply_translation(&Vec3::new(1.0, 0.0, 0.0), &r),
            cfg(&[[1.0, 0.0, 0.0]])
        );
        let r = cfg(&[[0.1, 0.2, 0.3], [-4.0, 5.5, 1e-3]]);
        let t = Vec3::new(0.7, -1.3, 2.9);
        let back = apply_translation(&-t, &apply_translation(&t, &r));
        for (a, b) in back.positions().iter().zip(r.positions()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn signatures() {
        let spec = x(2);
        let sig = pair_distance_signature(&spec, &cfg(&[[0.0, 0.0, 0.0], [0.0, 0.0, 2.0]])).unwrap();
        assert_eq!(sig.0, vec![("X-X".to_string(), 2.0)]);

        let s3 = 3f64.sqrt();
        let tri = cfg(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, s3 / 2.0, 0.0]]);
        let sig = pair_distance_signature(&x(3), &tri).unwrap();
        assert_eq!(sig.0.len(), 3);
        for (l, d) in &sig.0 {
            assert_eq!(l, "X-X");
            assert!((d - 1.0).abs() < 1e-15);
        }

        let err = pair_distance_signature(&spec, &cfg(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]));
        assert!(matches!(err, Err(Error::Degenerate(0, 1))));
    }

    #[test]
    fn signature_rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = x(2);
        let r = cfg(&[[0.0, 0.0, 0.0], [0.0, 0.0, 2.0]]);
        let sig = pair_distance_signature(&spec, &r).unwrap();
        for _ in 0..20 {
            let g = GroupElement::new(SpeciesPermutation::identity(2), OrthogonalMatrix3::random(&mut rng));
            let s2 = pair_distance_signature(&spec, &apply_group_element(&g, &r).unwrap()).unwrap();
            assert!(sig.matches(&s2, 1e-14));
        }
    }

    #[test]
    fn orthogonal_validation() {
        assert!(OrthogonalMatrix3::new(Mat3::identity() * 1.01).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let h = OrthogonalMatrix3::random(&mut rng);
            assert!(OrthogonalMatrix3::new(*h.matrix()).is_ok());
        }
        let s = OrthogonalMatrix3::improper_rotation(&Vec3::z(), std::f64::consts::PI);
        assert!((s.matrix() + Mat3::identity()).norm() < 1e-15);
    }

    #[test]
    fn matrix_matches_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = MoleculeSpec::new(vec![
            Species::new("X", 2.0, 1.0, 1).unwrap(),
            Species::new("Y", 1.0, 1.0, 3).unwrap(),
        ])
        .unwrap();
        let r = cfg(&[[0.1, 0.2, 0.3], [1.0, -1.0, 0.5], [0.0, 2.0, -0.3], [-1.2, 0.4, 0.9]]);
        for _ in 0..10 {
            let g = GroupElement::random(&spec, &mut rng);
            let a = apply_group_element(&g, &r).unwrap().stacked();
            let b = g.matrix() * r.stacked();
            assert!((a - b).norm() < 1e-13);
        }
    }
}
