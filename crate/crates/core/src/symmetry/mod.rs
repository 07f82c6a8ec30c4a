//! Point groups of configurations and the dynamical representation.
//!
//! The point group of a configuration `R` is the set of `h` in O(3) for which
//! some species-local permutation `pi` satisfies `h R_j = R_{pi(j)}` for all
//! `j`. Each such pair `(pi, h)` gives the 3N x 3N matrix `P_N(h) (x) h`, and
//! those matrices form the dynamical representation.

mod decompose;
mod tables;

pub use decompose::{
    gauss_legendre, invariant_projector, irrep_decomposition, irrep_projector, project_mode,
    totally_symmetric_multiplicity, IrrepDecomposition, QUADRATURE_ANGLES,
};
pub use tables::{character_table, character_tables, parse_character_tables, CharacterTable, ClassInfo, Irrep};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, GroupElement, MoleculeSpec, OrthogonalMatrix3, SpeciesPermutation, Vec3};
use tables::{op_axis, op_kind, OpKind};

/// Default matching tolerance, relative to the configuration radius.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// A symmetry operation of a fixed configuration: the orthogonal matrix and
/// the permutation it induces on the nuclei.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryElement {
    pub rotation: OrthogonalMatrix3,
    pub perm: SpeciesPermutation,
}

impl SymmetryElement {
    pub fn as_group_element(&self) -> GroupElement {
        GroupElement::new(self.perm.clone(), self.rotation)
    }

    pub fn dynamical_matrix(&self) -> DMatrix<f64> {
        dynamical_rep_matrix(&self.perm, &self.rotation, self.perm.len())
    }

    /// Character in the dynamical representation: fixed nuclei times tr(h).
    pub fn character(&self) -> f64 {
        self.perm.fixed_points() as f64 * self.rotation.trace()
    }
}

impl Serialize for SymmetryElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let m = self.rotation.matrix();
        let rows: Vec<[f64; 3]> = (0..3).map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]).collect();
        let mut st = s.serialize_struct("SymmetryElement", 2)?;
        st.serialize_field("matrix", &rows)?;
        st.serialize_field("permutation", self.perm.as_slice())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointGroupReport {
    pub name: String,
    /// Every operation, identity first. Empty for the linear groups.
    pub elements: Vec<SymmetryElement>,
    /// `None` for the continuous groups C∞v and D∞h.
    pub order: Option<usize>,
    /// Class index (into the character table) per element, when the group
    /// has a stored table.
    pub classes: Option<Vec<usize>>,
    /// Molecular axis of a linear configuration, or principal axis.
    pub axis: Option<[f64; 3]>,
    /// D∞h carries a mirror perpendicular to the axis.
    pub horizontal_mirror: bool,
    /// Discrete operations that generate the linear group together with the
    /// rotations about the axis (vertical mirror, and for D∞h a
    /// perpendicular C2).
    pub generators: Vec<SymmetryElement>,
    /// Rotation angles about the axis used to average over the continuous
    /// part, with quadrature weights normalised to sum to 1.
    pub sampled_rotations: Vec<(f64, f64)>,
}

impl PointGroupReport {
    pub fn is_continuous(&self) -> bool {
        self.order.is_none()
    }

    pub fn character_table(&self) -> Option<&'static CharacterTable> {
        character_table(&self.name)
    }

    /// The elements of a finite group. For the linear groups, the
    /// generators followed by the sampled rotations about the axis.
    pub fn representative_elements(&self) -> Vec<SymmetryElement> {
        if !self.is_continuous() {
            return self.elements.clone();
        }
        let mut out = self.generators.clone();
        if let (Some(axis), Some(g)) = (self.axis, self.generators.first()) {
            let axis = Vec3::from(axis);
            let perm = SpeciesPermutation::identity(g.perm.len());
            out.extend(self.sampled_rotations.iter().map(|(angle, _)| SymmetryElement {
                rotation: OrthogonalMatrix3::rotation(&axis, *angle),
                perm: perm.clone(),
            }));
        }
        out
    }

    /// Every product of two elements is again an element (finite groups).
    pub fn is_closed(&self, tol: f64) -> bool {
        self.elements.iter().all(|a| {
            self.elements.iter().all(|b| {
                let c = a.as_group_element().compose(&b.as_group_element());
                self.elements
                    .iter()
                    .any(|e| e.rotation.distance(&c.rotation) <= tol && e.perm == c.perm)
            })
        })
    }
}

/// Absolute tolerance from a relative one.
fn absolute_tol(config: &Configuration, rel: f64) -> f64 {
    let r = config.positions().iter().map(|p| p.norm()).fold(0.0, f64::max);
    rel * r.max(f64::MIN_POSITIVE)
}

/// The species-local permutation with `|h R_j - R_pi(j)| <= tol` for every
/// `j`, if one exists. `tol` is absolute. Two candidate images within `tol`
/// of one transformed nucleus is an error.
pub fn induced_permutation(
    spec: &MoleculeSpec,
    config: &Configuration,
    h: &OrthogonalMatrix3,
    tol: f64,
) -> Result<Option<SpeciesPermutation>> {
    spec.check_len(config.len())?;
    let pos = config.positions();
    let mut map = Vec::with_capacity(pos.len());
    let mut used = vec![false; pos.len()];
    for (j, p) in pos.iter().enumerate() {
        let img = h.apply(p);
        let block = spec.block(spec.species_of(j));
        let mut hit = None;
        for l in block {
            if (img - pos[l]).norm() <= tol {
                if hit.is_some() {
                    return Err(Error::AmbiguousMatch(j));
                }
                hit = Some(l);
            }
        }
        match hit {
            Some(l) if !used[l] => {
                used[l] = true;
                map.push(l);
            }
            _ => return Ok(None),
        }
    }
    SpeciesPermutation::from_map(spec, map).map(Some)
}

/// `P_N(h) (x) h`: block `(pi(j), j)` equals `h`.
pub fn dynamical_rep_matrix(perm: &SpeciesPermutation, h: &OrthogonalMatrix3, n: usize) -> DMatrix<f64> {
    assert_eq!(perm.len(), n, "permutation length must equal the nucleus count");
    GroupElement::new(perm.clone(), *h).matrix()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationReport {
    /// `|g H - H g|_F / |H|_F` per element.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_hessian_commutation(hessian: &DMatrix<f64>, elements: &[SymmetryElement], tol: f64) -> CommutationReport {
    let hn = hessian.norm().max(f64::MIN_POSITIVE);
    let residuals: Vec<f64> = elements
        .iter()
        .map(|e| {
            let g = e.dynamical_matrix();
            (&g * hessian - hessian * &g).norm() / hn
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    CommutationReport {
        pass: max_residual <= tol,
        residuals,
        max_residual,
    }
}

fn push_direction(dirs: &mut Vec<Vec3>, v: Vec3, floor: f64) {
    let n = v.norm();
    if n <= floor {
        return;
    }
    let u = v / n;
    if !dirs.iter().any(|d| d.cross(&u).norm() < 1e-7) {
        dirs.push(u);
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn symmetric_eigenvectors(m: &crate::model::Mat3) -> Vec<Vec3> {
    let eig = m.symmetric_eigen();
    (0..3).map(|i| eig.eigenvectors.column(i).into_owned()).collect()
}

/// Detect the point group of a configuration whose center of mass is at
/// the origin. `tol` is relative to the configuration radius.
pub fn detect_point_group(spec: &MoleculeSpec, config: &Configuration, tol: f64) -> Result<PointGroupReport> {
    spec.check_len(config.len())?;
    let abs_tol = absolute_tol(config, tol);
    let com = config.center_of_mass(spec);
    if com.norm() > abs_tol.max(tol) {
        return Err(Error::NotCentered(com.norm()));
    }
    if config.min_pair_distance() <= abs_tol {
        return Err(Error::Degenerate(0, 1));
    }

    // second moment about the origin
    let moment: crate::model::Mat3 = config.positions().iter().map(|p| p * p.transpose()).sum();
    let eig = moment.symmetric_eigen();
    let imax = eig.eigenvalues.imax();
    let main_axis: Vec3 = eig.eigenvectors.column(imax).into_owned();
    let off_line = config
        .positions()
        .iter()
        .map(|p| (p - main_axis * main_axis.dot(p)).norm())
        .fold(0.0, f64::max);
    if config.len() >= 2 && off_line <= abs_tol {
        return linear_group(spec, config, main_axis, abs_tol);
    }

    let pos = config.positions();
    let floor = abs_tol * 10.0;
    let mut axes: Vec<Vec3> = Vec::new();
    for p in pos {
        push_direction(&mut axes, *p, floor);
    }
    for j in 0..pos.len() {
        for l in j + 1..pos.len() {
            push_direction(&mut axes, (pos[j] + pos[l]) / 2.0, floor);
            push_direction(&mut axes, pos[j].cross(&pos[l]), floor * floor.max(1e-300).sqrt());
        }
    }
    for v in symmetric_eigenvectors(&moment) {
        push_direction(&mut axes, v, 0.0);
    }
    let mut normals = axes.clone();
    for j in 0..pos.len() {
        for l in j + 1..pos.len() {
            if spec.species_of(j) == spec.species_of(l) {
                push_direction(&mut normals, pos[j] - pos[l], floor);
            }
        }
    }

    let mut candidates = vec![OrthogonalMatrix3::identity(), OrthogonalMatrix3::inversion()];
    let tau = 2.0 * std::f64::consts::PI;
    for a in &axes {
        for n in [2u32, 3, 4, 6] {
            for k in 1..n {
                if gcd(n, k) != 1 {
                    continue;
                }
                let angle = tau * k as f64 / n as f64;
                candidates.push(OrthogonalMatrix3::rotation(a, angle));
                candidates.push(OrthogonalMatrix3::improper_rotation(a, angle));
            }
        }
    }
    for n in &normals {
        candidates.push(OrthogonalMatrix3::reflection(n));
    }

    let mut found: Vec<SymmetryElement> = Vec::new();
    let accept = |h: OrthogonalMatrix3, found: &mut Vec<SymmetryElement>| -> Result<bool> {
        if found.iter().any(|e| e.rotation.distance(&h) < 1e-6) {
            return Ok(false);
        }
        match induced_permutation(spec, config, &h, abs_tol)? {
            Some(perm) => {
                found.push(SymmetryElement { rotation: h, perm });
                Ok(true)
            }
            None => Ok(false),
        }
    };
    for h in candidates {
        accept(h, &mut found)?;
    }
    // close under composition
    loop {
        let mut added = false;
        let snapshot = found.clone();
        for a in &snapshot {
            for b in &snapshot {
                let h = a.rotation.compose(&b.rotation);
                if accept(h, &mut found)? {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
        if found.len() > 120 {
            return Err(Error::Unsupported(
                "point group larger than the supported catalog".into(),
            ));
        }
    }

    let (name, principal) = identify(&found);
    let table = character_table(&name);
    let classes = match table {
        Some(t) => Some(tables::assign_classes(
            t,
            &found.iter().map(|e| e.rotation).collect::<Vec<_>>(),
            principal,
            config,
            abs_tol.max(1e-9 * absolute_tol(config, 1.0)),
        )?),
        None => None,
    };
    Ok(PointGroupReport {
        name,
        order: Some(found.len()),
        elements: found,
        classes,
        axis: principal.map(|a| [a.x, a.y, a.z]),
        horizontal_mirror: false,
        generators: Vec::new(),
        sampled_rotations: Vec::new(),
    })
}

fn linear_group(spec: &MoleculeSpec, config: &Configuration, axis: Vec3, abs_tol: f64) -> Result<PointGroupReport> {
    let axis = axis.normalize();
    let perp = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let perp = (perp - axis * axis.dot(&perp)).normalize();
    let n = config.len();
    let sigma_v = SymmetryElement {
        rotation: OrthogonalMatrix3::reflection(&perp),
        perm: SpeciesPermutation::identity(n),
    };
    let c2 = OrthogonalMatrix3::rotation(&perp, std::f64::consts::PI);
    let mut generators = vec![sigma_v];
    let horizontal = match induced_permutation(spec, config, &c2, abs_tol)? {
        Some(perm) => {
            generators.push(SymmetryElement { rotation: c2, perm });
            true
        }
        None => false,
    };
    let (nodes, weights) = gauss_legendre(QUADRATURE_ANGLES);
    let sampled = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| (std::f64::consts::PI * (x + 1.0), w / 2.0))
        .collect();
    Ok(PointGroupReport {
        name: if horizontal { "D∞h" } else { "C∞v" }.to_string(),
        elements: Vec::new(),
        order: None,
        classes: None,
        axis: Some([axis.x, axis.y, axis.z]),
        horizontal_mirror: horizontal,
        generators,
        sampled_rotations: sampled,
    })
}

/// Schoenflies name and principal axis from a closed set of operations.
fn identify(elements: &[SymmetryElement]) -> (String, Option<Vec3>) {
    let kinds: Vec<(OpKind, Option<Vec3>)> = elements
        .iter()
        .map(|e| (op_kind(&e.rotation), op_axis(&e.rotation)))
        .collect();
    let order = elements.len();
    let has_inversion = kinds.iter().any(|k| k.0 == OpKind::Inversion);
    let mirrors: Vec<Vec3> = kinds
        .iter()
        .filter(|k| k.0 == OpKind::Reflection)
        .filter_map(|k| k.1)
        .collect();
    let mut c3_axes: Vec<Vec3> = Vec::new();
    for k in &kinds {
        if k.0 == OpKind::Rotation(3) {
            push_direction(&mut c3_axes, k.1.unwrap(), 0.0);
        }
    }
    if c3_axes.len() > 1 {
        let name = match (order, has_inversion, mirrors.is_empty()) {
            (12, _, _) => "T",
            (24, false, false) => "Td",
            (24, true, _) => "Th",
            (24, false, true) => "O",
            (48, _, _) => "Oh",
            (60, _, _) => "I",
            (120, _, _) => "Ih",
            _ => "unknown",
        };
        return (name.to_string(), None);
    }
    let (n, principal) = kinds
        .iter()
        .filter_map(|k| match k.0 {
            OpKind::Rotation(m) => Some((m, k.1.unwrap())),
            _ => None,
        })
        .max_by_key(|(m, _)| *m)
        .map(|(m, a)| (m, Some(a)))
        .unwrap_or((1, None));

    if n == 1 {
        let name = if !mirrors.is_empty() {
            "Cs"
        } else if has_inversion {
            "Ci"
        } else {
            "C1"
        };
        return (name.to_string(), None);
    }
    let p = principal.unwrap();
    // with several C2 axes and no higher order, prefer the one that is
    // parallel to the most mirrors
    let p = if n == 2 {
        kinds
            .iter()
            .filter(|k| k.0 == OpKind::Rotation(2))
            .filter_map(|k| k.1)
            .max_by_key(|a| mirrors.iter().filter(|m| m.dot(a).abs() < 1e-6).count())
            .unwrap_or(p)
    } else {
        p
    };
    let perp_c2 = kinds
        .iter()
        .filter(|k| k.0 == OpKind::Rotation(2))
        .filter_map(|k| k.1)
        .filter(|a| a.dot(&p).abs() < 1e-6)
        .count();
    let sigma_h = mirrors.iter().any(|m| m.cross(&p).norm() < 1e-6);
    let sigma_v = mirrors.iter().filter(|m| m.dot(&p).abs() < 1e-6).count();
    let name = if perp_c2 > 0 {
        if sigma_h {
            format!("D{n}h")
        } else if sigma_v > 0 {
            format!("D{n}d")
        } else {
            format!("D{n}")
        }
    } else if sigma_h {
        format!("C{n}h")
    } else if sigma_v > 0 {
        format!("C{n}v")
    } else if kinds.iter().any(|k| matches!(k.0, OpKind::Improper(m) if m == 2 * n)) {
        format!("S{}", 2 * n)
    } else {
        format!("C{n}")
    };
    (name, Some(p))
}
