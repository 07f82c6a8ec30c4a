//! Harmonic normal modes in mass-weighted coordinates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, MoleculeSpec};
use crate::potential::PotentialModel;
use crate::symmetry::{irrep_projector, PointGroupReport};
use crate::units::UnitSystem;

/// Eigenvalues closer than this (relative) are treated as one degenerate
/// level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// `M^{-1/2} H M^{-1/2}` with masses converted to the working unit.
pub fn mass_weighted_hessian(spec: &MoleculeSpec, units: &UnitSystem, hessian: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = spec.n_nuclei();
    if hessian.nrows() != 3 * n || hessian.ncols() != 3 * n {
        return Err(Error::Dimension {
            expected: 3 * n,
            found: hessian.nrows(),
        });
    }
    let inv_sqrt: Vec<f64> = (0..3 * n)
        .map(|i| {
            let m = spec.mass(i / 3) * units.mass_scale();
            if m > 0.0 && m.is_finite() {
                Ok(1.0 / m.sqrt())
            } else {
                Err(Error::Domain(format!("nonpositive mass for nucleus {}", i / 3)))
            }
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(3 * n, 3 * n, |i, j| {
        hessian[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalModeReport {
    /// Angular frequencies, ascending (rad/s in SI).
    pub frequencies: Vec<f64>,
    /// Wavenumbers in cm^-1, SI only.
    pub wavenumbers: Option<Vec<f64>>,
    /// Orthonormal mode vectors in mass-weighted coordinates.
    pub modes: Vec<Vec<f64>>,
    pub zero_modes: usize,
    /// Irrep label per mode, or "unassigned" when the group has no table.
    pub labels: Vec<String>,
    pub group: Option<String>,
}

/// Orthonormal basis of the column space of a projector, built greedily
/// from its columns so the result depends only on the subspace.
fn canonical_basis(projector: &DMatrix<f64>, rank: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut best: Option<DVector<f64>> = None;
        for c in 0..projector.ncols() {
            let mut v = projector.column(c).into_owned();
            for b in &basis {
                v -= b * b.dot(&v);
            }
            if best.as_ref().is_none_or(|b| v.norm() > b.norm() * (1.0 + 1e-9)) {
                best = Some(v);
            }
        }
        let v = best.expect("projector has columns");
        if v.norm() < 1e-8 {
            break;
        }
        let mut v = v.normalize();
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v = -v;
        }
        basis.push(v);
    }
    basis
}

/// Orthonormal basis of the part of span(U) selected by `p`, via the
/// eigenvectors of `U^T p U` with eigenvalue near one.
fn restricted_projector(u: &DMatrix<f64>, p: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let m = u.transpose() * p * u;
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .collect();
    let mut q = DMatrix::zeros(u.nrows(), u.nrows());
    for &i in &keep {
        let v = u * eig.eigenvectors.column(i);
        q += &v * v.transpose();
    }
    (q, keep.len())
}

/// Normal modes at a minimum.
///
/// Eigenvalues of the mass-weighted Hessian whose magnitude is below
/// `zero_tol` times the largest one are rigid motions and dropped. Each
/// degenerate level is split by the irrep projectors of `group` (when it has
/// a character table) and given a basis that does not depend on the
/// eigensolver.
pub fn normal_modes(
    model: &PotentialModel,
    config: &Configuration,
    group: Option<&PointGroupReport>,
    zero_tol: f64,
) -> Result<NormalModeReport> {
    let spec = model.spec();
    let units = model.units();
    let w = mass_weighted_hessian(spec, units, &model.hessian(config)?)?;
    let w = (&w + w.transpose()) * 0.5;
    let eig = w.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut zero = 0;
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let l = eig.eigenvalues[i];
        if l.abs() <= zero_tol * scale {
            zero += 1;
        } else if l < 0.0 {
            return Err(Error::NotAMinimum(format!("mass-weighted Hessian eigenvalue {l:.6e}")));
        } else {
            kept.push(i);
        }
    }

    let projectors: Option<Vec<(String, DMatrix<f64>)>> = match group {
        Some(g) if !g.is_continuous() && g.classes.is_some() => {
            let table = g.character_table().expect("classified groups have tables");
            Some(
                table
                    .irreps
                    .iter()
                    .enumerate()
                    .map(|(k, ir)| Ok((ir.label.clone(), irrep_projector(g, k)?)))
                    .collect::<Result<_>>()?,
            )
        }
        _ => None,
    };

    let mut frequencies = Vec::new();
    let mut modes = Vec::new();
    let mut labels = Vec::new();
    let mut start = 0;
    while start < kept.len() {
        let l0 = eig.eigenvalues[kept[start]];
        let mut end = start + 1;
        while end < kept.len() && (eig.eigenvalues[kept[end]] - l0).abs() <= DEGENERACY_TOLERANCE * l0 {
            end += 1;
        }
        let cluster = &kept[start..end];
        let u = DMatrix::from_columns(
            &cluster
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        let mut pieces: Vec<(String, Vec<DVector<f64>>)> = Vec::new();
        match &projectors {
            Some(ps) => {
                let mut assigned = 0;
                for (label, p) in ps {
                    let (q, rank) = restricted_projector(&u, p);
                    if rank > 0 {
                        assigned += rank;
                        pieces.push((label.clone(), canonical_basis(&q, rank)));
                    }
                }
                if assigned != cluster.len() {
                    return Err(Error::Domain(format!(
                        "modes near eigenvalue {l0:.6e} do not split into irreps ({assigned} of {})",
                        cluster.len()
                    )));
                }
            }
            None => {
                let q = &u * u.transpose();
                pieces.push(("unassigned".to_string(), canonical_basis(&q, cluster.len())));
            }
        }
        for (label, vectors) in pieces {
            for v in vectors {
                let lambda = v.dot(&(&w * &v));
                frequencies.push(lambda.max(0.0).sqrt());
                modes.push(v.iter().copied().collect());
                labels.push(label.clone());
            }
        }
        start = end;
    }

    let wavenumbers = if units.is_si() {
        Some(
            frequencies
                .iter()
                .map(|&f| angular_frequency_to_wavenumber(f, units))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(NormalModeReport {
        frequencies,
        wavenumbers,
        modes,
        zero_modes: zero,
        labels,
        group: group.map(|g| g.name.clone()),
    })
}

/// Charges as counts of e, masses in u, bond length in m (SI) or the
/// reduced length unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiatomicInput {
    pub q1: f64,
    pub q2: f64,
    pub m1: f64,
    pub m2: f64,
    pub bond_length: f64,
}

impl DiatomicInput {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("q1", self.q1),
            ("q2", self.q2),
            ("M1", self.m1),
            ("M2", self.m2),
            ("bond length", self.bond_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `omega = sqrt(3 k_C q1 q2 / rho^3 * (1/M1 + 1/M2))`.
pub fn diatomic_frequency(input: &DiatomicInput, units: &UnitSystem) -> Result<f64> {
    input.validate()?;
    let p = 3.0 * units.coulomb_strength(input.q1, input.q2) / input.bond_length.powi(3);
    let ms = units.mass_scale();
    Ok((p * (1.0 / (input.m1 * ms) + 1.0 / (input.m2 * ms))).sqrt())
}

/// `omega / (2 pi c)` in cm^-1.
pub fn angular_frequency_to_wavenumber(omega: f64, units: &UnitSystem) -> Result<f64> {
    let c = units
        .speed_of_light_cm()
        .ok_or_else(|| Error::Units("wavenumbers need SI units".into()))?;
    Ok(omega / (2.0 * std::f64::consts::PI * c))
}
