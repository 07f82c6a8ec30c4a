//! Closed-form equilibria of the model potential.
//!
//! Each pair term `c r^2 + k/r` has its own minimum at `r* = [k/(2c)]^(1/3)`
//! when `c > 0`. Whenever a geometry exists in which every pair sits at its
//! own `r*`, that geometry is a global minimum of the sum. The linear and
//! planar families instead balance the pair terms along a single scale
//! parameter. Distances are returned in the length unit of `units`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, Vec3};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquilibriumKind {
    Xy,
    X2,
    Xy2Bent,
    Xy2Linear,
    X3Triangle,
    X3Linear,
    Xy3Pyramid,
    Xy3Planar,
    X4Tetrahedron,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticEquilibrium {
    pub kind: EquilibriumKind,
    pub distances: BTreeMap<String, f64>,
    pub symmetry: &'static str,
    /// The pairwise distances can be realized by an actual geometry.
    pub feasible: bool,
    /// Predicted to be a local minimum of V.
    pub stable: bool,
}

impl AnalyticEquilibrium {
    fn new(
        kind: EquilibriumKind,
        symmetry: &'static str,
        distances: &[(&str, f64)],
        feasible: bool,
        stable: bool,
    ) -> Self {
        AnalyticEquilibrium {
            kind,
            distances: distances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            symmetry,
            feasible,
            stable,
        }
    }

    pub fn distance(&self, name: &str) -> f64 {
        self.distances[name]
    }

    /// Nuclear positions in species-block order (lone X first), or `None`
    /// when the geometry is infeasible.
    pub fn configuration(&self) -> Option<Configuration> {
        if !self.feasible {
            return None;
        }
        let d = |k: &str| self.distances[k];
        let pts: Vec<Vec3> = match self.kind {
            EquilibriumKind::Xy | EquilibriumKind::X2 => {
                let r = d("bond");
                vec![Vec3::new(0.0, 0.0, -r / 2.0), Vec3::new(0.0, 0.0, r / 2.0)]
            }
            EquilibriumKind::Xy2Bent => {
                // C2 along z, molecular plane yz
                let (xy, yy) = (d("XY"), d("YY"));
                let h = (xy * xy - yy * yy / 4.0).sqrt();
                vec![
                    Vec3::new(0.0, 0.0, h),
                    Vec3::new(0.0, yy / 2.0, 0.0),
                    Vec3::new(0.0, -yy / 2.0, 0.0),
                ]
            }
            EquilibriumKind::Xy2Linear => {
                let r = d("XY");
                vec![Vec3::zeros(), Vec3::new(0.0, 0.0, r), Vec3::new(0.0, 0.0, -r)]
            }
            EquilibriumKind::X3Triangle => triangle(d("side") / 3f64.sqrt(), 0.0),
            EquilibriumKind::X3Linear => {
                let r = d("half_spacing");
                vec![Vec3::new(0.0, 0.0, -r), Vec3::zeros(), Vec3::new(0.0, 0.0, r)]
            }
            EquilibriumKind::Xy3Pyramid => {
                let (xy, yy) = (d("XY"), d("YY"));
                let rc = yy / 3f64.sqrt();
                let h = (xy * xy - rc * rc).sqrt();
                let mut p = vec![Vec3::new(0.0, 0.0, h)];
                p.extend(triangle(rc, 0.0));
                p
            }
            EquilibriumKind::Xy3Planar => {
                let mut p = vec![Vec3::zeros()];
                p.extend(triangle(d("XY"), 0.0));
                p
            }
            EquilibriumKind::X4Tetrahedron => {
                let s = d("edge") / (2.0 * 2f64.sqrt());
                [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
                    .iter()
                    .map(|v| Vec3::new(v[0], v[1], v[2]) * s)
                    .collect()
            }
        };
        Some(Configuration::new(pts).expect("finite geometry"))
    }
}

/// Equilateral triangle of circumradius `r` in the plane `z = z0`.
fn triangle(r: f64, z0: f64) -> Vec<Vec3> {
    (0..3)
        .map(|k| {
            let t = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
            Vec3::new(r * t.cos(), r * t.sin(), z0)
        })
        .collect()
}

fn pair_minimum(k: f64, c: f64) -> f64 {
    (k / (2.0 * c)).cbrt()
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::NoEquilibrium(format!("{name} = {v} must be positive")))
    }
}

/// `[k_C q1 q2 / (2a)]^(1/3)`.
pub fn diatomic_bond_length(q1: f64, q2: f64, a: f64, units: &UnitSystem) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::NoEquilibrium(format!("a = {a}: V has no minimum for a <= 0")));
    }
    Ok(pair_minimum(units.coulomb_strength(q1, q2), a))
}

pub fn diatomic_equilibrium(
    q1: f64,
    q2: f64,
    a: f64,
    homonuclear: bool,
    units: &UnitSystem,
) -> Result<AnalyticEquilibrium> {
    let r = diatomic_bond_length(q1, q2, a, units)?;
    Ok(if homonuclear {
        AnalyticEquilibrium::new(EquilibriumKind::X2, "D∞h", &[("bond", r)], true, true)
    } else {
        AnalyticEquilibrium::new(EquilibriumKind::Xy, "C∞v", &[("bond", r)], true, true)
    })
}

pub fn xy2_bent_geometry(q: f64, big_q: f64, a1: f64, c1: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    require_positive("a1", a1)?;
    require_positive("c1", c1)?;
    let xy = pair_minimum(units.coulomb_strength(q, big_q), a1);
    let yy = pair_minimum(units.coulomb_strength(big_q, big_q), c1);
    let feasible = yy < 2.0 * xy;
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::Xy2Bent,
        "C2v",
        &[("XY", xy), ("YY", yy)],
        feasible,
        feasible,
    ))
}

pub fn xy2_linear_geometry(q: f64, big_q: f64, a1: f64, c1: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    if a1 + 2.0 * c1 <= 0.0 {
        return Err(Error::NoEquilibrium(format!(
            "a1 + 2 c1 = {} must be positive",
            a1 + 2.0 * c1
        )));
    }
    let k = units.coulomb_constant() * units.charge_scale().powi(2);
    let xy = (k * (q * big_q + big_q * big_q / 4.0) / (2.0 * (a1 + 2.0 * c1))).cbrt();
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::Xy2Linear,
        "D∞h",
        &[("XY", xy)],
        true,
        xy2_linear_stable(q, big_q, a1, c1),
    ))
}

/// `a1 > 0` and `a1 Q / (8q) > c1 > -a1/2`.
pub fn xy2_linear_stable(q: f64, big_q: f64, a1: f64, c1: f64) -> bool {
    a1 > 0.0 && a1 * big_q / (8.0 * q) > c1 && c1 > -a1 / 2.0
}

pub fn x3_triangle_side(q: f64, a2: f64, units: &UnitSystem) -> Result<f64> {
    if a2 <= 0.0 {
        return Err(Error::NoEquilibrium(format!("a2 = {a2}: no minimum for a2 <= 0")));
    }
    Ok(pair_minimum(units.coulomb_strength(q, q), a2))
}

pub fn x3_triangle_geometry(q: f64, a2: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    let s = x3_triangle_side(q, a2, units)?;
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::X3Triangle,
        "D3h",
        &[("side", s)],
        true,
        true,
    ))
}

/// Symmetric linear X3 stationary point, nearest-neighbour spacing
/// `[5 k_C q^2 / (24 a2)]^(1/3)`. Never stable (see [`x3_linear_is_unstable`]).
pub fn x3_linear_geometry(q: f64, a2: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    require_positive("a2", a2)?;
    let d = (5.0 * units.coulomb_strength(q, q) / (24.0 * a2)).cbrt();
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::X3Linear,
        "D∞h",
        &[("half_spacing", d)],
        true,
        false,
    ))
}

/// The XY2 linear-stability window specialised to X3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearX3Record {
    pub inequalities: Vec<String>,
    pub satisfiable: bool,
    pub reason: String,
}

/// With `q = Q` and `a1 = c1 = a2` the window `a1 Q/(8q) > c1 > -a1/2` reads
/// `a2/8 > a2 > -a2/2`, which needs `a2 < 0`, while `a1 > 0` needs `a2 > 0`.
pub fn x3_linear_is_unstable() -> LinearX3Record {
    // probe both signs of a2 against the general criterion
    let satisfiable = [-2.0, -0.5, -1e-3, 1e-3, 0.5, 2.0]
        .iter()
        .any(|&a2| xy2_linear_stable(1.0, 1.0, a2, a2));
    LinearX3Record {
        inequalities: vec!["a2 > 0".into(), "a2/8 > a2".into(), "a2 > -a2/2".into()],
        satisfiable,
        reason: "a2/8 > a2 requires a2 < 0, contradicting a2 > 0".into(),
    }
}

pub fn xy3_pyramidal_geometry(q: f64, big_q: f64, a3: f64, c3: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    require_positive("a3", a3)?;
    require_positive("c3", c3)?;
    let xy = pair_minimum(units.coulomb_strength(q, big_q), a3);
    let yy = pair_minimum(units.coulomb_strength(big_q, big_q), c3);
    // the Y triangle's circumradius must be strictly shorter than X-Y
    let feasible = yy < 3f64.sqrt() * xy;
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::Xy3Pyramid,
        "C3v",
        &[("XY", xy), ("YY", yy)],
        feasible,
        feasible,
    ))
}

/// `a3 > 0` and `a3 Q / (3 sqrt(3) q) > c3 > -a3/3`.
pub fn xy3_planar_stable(q: f64, big_q: f64, a3: f64, c3: f64) -> bool {
    a3 > 0.0 && a3 * big_q / (3.0 * 3f64.sqrt() * q) > c3 && c3 > -a3 / 3.0
}

pub fn xy3_planar_geometry(q: f64, big_q: f64, a3: f64, c3: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    if a3 + 3.0 * c3 <= 0.0 {
        return Err(Error::NoEquilibrium(format!(
            "a3 + 3 c3 = {} must be positive",
            a3 + 3.0 * c3
        )));
    }
    let k = units.coulomb_constant() * units.charge_scale().powi(2);
    let xy = (k * (q * big_q + big_q * big_q / 3f64.sqrt()) / (2.0 * (a3 + 3.0 * c3))).cbrt();
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::Xy3Planar,
        "D3h",
        &[("XY", xy)],
        true,
        xy3_planar_stable(q, big_q, a3, c3),
    ))
}

pub fn x4_tetrahedron_edge(q: f64, a4: f64, units: &UnitSystem) -> Result<f64> {
    if a4 <= 0.0 {
        return Err(Error::NoEquilibrium(format!("a4 = {a4}: no minimum for a4 <= 0")));
    }
    Ok(pair_minimum(units.coulomb_strength(q, q), a4))
}

pub fn x4_tetrahedron_geometry(q: f64, a4: f64, units: &UnitSystem) -> Result<AnalyticEquilibrium> {
    let e = x4_tetrahedron_edge(q, a4, units)?;
    Ok(AnalyticEquilibrium::new(
        EquilibriumKind::X4Tetrahedron,
        "Td",
        &[("edge", e)],
        true,
        true,
    ))
}
