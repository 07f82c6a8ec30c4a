use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{PointGroupReport, SymmetryElement};
use crate::error::{Error, Result};
use crate::model::{OrthogonalMatrix3, SpeciesPermutation, Vec3};

/// Number of quadrature angles used to average over rotations about the
/// axis of a linear configuration.
pub const QUADRATURE_ANGLES: usize = 32;

/// Multiplicities of the irreducible representations in the dynamical
/// representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrepDecomposition {
    pub group: String,
    /// Irrep label and multiplicity, in character-table order.
    pub multiplicities: Vec<(String, usize)>,
    pub totally_symmetric: usize,
}

impl IrrepDecomposition {
    pub fn multiplicity(&self, label: &str) -> Option<usize> {
        self.multiplicities.iter().find(|(l, _)| l == label).map(|(_, m)| *m)
    }

    pub fn as_map(&self) -> BTreeMap<String, usize> {
        self.multiplicities.iter().cloned().collect()
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn table_for(group: &PointGroupReport) -> Result<(&'static super::CharacterTable, &Vec<usize>)> {
    if group.is_continuous() {
        return Err(Error::Unsupported(format!(
            "irrep decomposition of the continuous group {}",
            group.name
        )));
    }
    let table = group
        .character_table()
        .ok_or_else(|| Error::Unsupported(format!("no character table for {}", group.name)))?;
    let classes = group
        .classes
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("no class assignment for {}", group.name)))?;
    Ok((table, classes))
}

/// Decompose the dynamical representation of a finite group.
pub fn irrep_decomposition(group: &PointGroupReport) -> Result<IrrepDecomposition> {
    let (table, classes) = table_for(group)?;
    let order = group.elements.len() as f64;
    let mut multiplicities = Vec::with_capacity(table.irreps.len());
    for irrep in &table.irreps {
        let s: f64 = group
            .elements
            .iter()
            .zip(classes)
            .map(|(e, &c)| irrep.characters[c] * e.character())
            .sum::<f64>()
            / order;
        let m = s.round();
        if (s - m).abs() > 1e-6 || m < 0.0 {
            return Err(Error::Domain(format!(
                "non-integral multiplicity {s} for {} in {}",
                irrep.label, table.group
            )));
        }
        multiplicities.push((irrep.label.clone(), m as usize));
    }
    let trivial = &table.totally_symmetric().label;
    let totally_symmetric = multiplicities
        .iter()
        .find(|(l, _)| l == trivial)
        .map(|x| x.1)
        .unwrap_or(0);
    Ok(IrrepDecomposition {
        group: table.group.clone(),
        multiplicities,
        totally_symmetric,
    })
}

/// Projector onto the subspace of displacements carried by the irrep with
/// index `irrep` of the group's character table.
pub fn irrep_projector(group: &PointGroupReport, irrep: usize) -> Result<DMatrix<f64>> {
    let (table, classes) = table_for(group)?;
    let ir = table
        .irreps
        .get(irrep)
        .ok_or_else(|| Error::Domain(format!("irrep index {irrep} out of range")))?;
    let n3 = 3 * group.elements[0].perm.len();
    let mut p = DMatrix::zeros(n3, n3);
    for (e, &c) in group.elements.iter().zip(classes) {
        p += e.dynamical_matrix() * ir.characters[c];
    }
    Ok(p * (ir.dim as f64 / group.elements.len() as f64))
}

/// Apply the irrep projector to a displacement vector.
pub fn project_mode(group: &PointGroupReport, irrep: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(irrep_projector(group, irrep)? * v)
}

/// Projector onto displacements invariant under every operation.
pub fn invariant_projector(group: &PointGroupReport, n: usize) -> DMatrix<f64> {
    let n3 = 3 * n;
    if !group.is_continuous() {
        let mut p = DMatrix::zeros(n3, n3);
        for e in &group.elements {
            p += e.dynamical_matrix();
        }
        return p / group.elements.len() as f64;
    }
    let axis = group.axis.map(|a| Vec3::new(a[0], a[1], a[2])).unwrap_or_else(Vec3::z);
    let id = SpeciesPermutation::identity(n);
    let mut avg = DMatrix::zeros(n3, n3);
    for &(angle, w) in &group.sampled_rotations {
        let h = OrthogonalMatrix3::rotation(&axis, angle);
        avg += super::dynamical_rep_matrix(&id, &h, n) * w;
    }
    // the discrete generators and the rotations together generate the
    // group, so averaging over the finite set they form with the axial
    // average gives the group average
    let mut p = avg;
    for g in &group.generators {
        let d = g.dynamical_matrix();
        p = (&p + &d * &p) * 0.5;
    }
    p
}

/// Multiplicity of the totally symmetric irrep in the dynamical
/// representation, i.e. the dimension of the invariant subspace.
pub fn totally_symmetric_multiplicity(group: &PointGroupReport, n: usize) -> Result<usize> {
    if !group.is_continuous() {
        if group.classes.is_some() {
            return Ok(irrep_decomposition(group)?.totally_symmetric);
        }
        let s: f64 = group.elements.iter().map(SymmetryElement::character).sum::<f64>() / group.elements.len() as f64;
        return Ok(s.round().max(0.0) as usize);
    }
    let p = invariant_projector(group, n);
    Ok(p.trace().round().max(0.0) as usize)
}
