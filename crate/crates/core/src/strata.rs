//! Orbit invariants, the strata catalog, and stationary points on the
//! maximally peripheral strata.
//!
//! For the two diatomic types a minimal integrity basis is known and gives
//! orbit coordinates directly. For the larger types a stratum is identified
//! by the name of the isotropy group alone.

use std::sync::LazyLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pair_distance_signature, Configuration, Mat3, MoleculeSpec, OrthogonalMatrix3, Vec3};
use crate::molecules::MoleculeType;
use crate::optimizer::{classify_spectrum, OptimizerOptions, StationaryPoint};
use crate::potential::PotentialModel;
use crate::symmetry::{detect_point_group, DEFAULT_TOLERANCE};

static CATALOG_DATA: &str = include_str!("../data/strata.json");

static CATALOG: LazyLock<Vec<StratumEntry>> =
    LazyLock::new(|| parse_strata_catalog(CATALOG_DATA).expect("bundled strata catalog is valid"));

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MibValuesXY {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl MibValuesXY {
    /// `theta3^2 <= theta1 * theta2` with a relative slack.
    pub fn satisfies_schwartz(&self, rel_tol: f64) -> bool {
        let bound = (self.theta1 * self.theta2).sqrt();
        self.theta1 >= 0.0
            && self.theta2 >= 0.0
            && self.theta3.abs() <= bound * (1.0 + rel_tol) + rel_tol * f64::MIN_POSITIVE
    }

    pub fn max_deviation(&self, other: &MibValuesXY) -> f64 {
        (self.theta1 - other.theta1)
            .abs()
            .max((self.theta2 - other.theta2).abs())
            .max((self.theta3 - other.theta3).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MibValuesX2 {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl MibValuesX2 {
    pub fn max_deviation(&self, other: &MibValuesX2) -> f64 {
        (self.theta1 - other.theta1)
            .abs()
            .max((self.theta2 - other.theta2).abs())
            .max((self.theta3 - other.theta3).abs())
    }
}

fn two_points(config: &Configuration) -> Result<(Vec3, Vec3)> {
    match config.positions() {
        [a, b] => Ok((*a, *b)),
        p => Err(Error::Dimension {
            expected: 2,
            found: p.len(),
        }),
    }
}

pub fn mib_xy(config: &Configuration) -> Result<MibValuesXY> {
    let (r1, r2) = two_points(config)?;
    Ok(MibValuesXY {
        theta1: r1.norm_squared(),
        theta2: r2.norm_squared(),
        theta3: r1.dot(&r2),
    })
}

pub fn mib_x2(config: &Configuration) -> Result<MibValuesX2> {
    let (r1, r2) = two_points(config)?;
    Ok(MibValuesX2 {
        theta1: r1.norm_squared() + r2.norm_squared(),
        theta2: r1.dot(&r2),
        theta3: r1.norm_squared() * r2.norm_squared(),
    })
}

/// Lengths `a = |R1|`, `b = |R2|` and the angle between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitParamsXY {
    pub a: f64,
    pub b: f64,
    /// `None` when either vector vanishes.
    pub alpha: Option<f64>,
}

pub fn orbit_params_xy(config: &Configuration) -> Result<OrbitParamsXY> {
    let m = mib_xy(config)?;
    let a = m.theta1.sqrt();
    let b = m.theta2.sqrt();
    let alpha = (a * b > 0.0).then(|| (m.theta3 / (a * b)).clamp(-1.0, 1.0).acos());
    Ok(OrbitParamsXY { a, b, alpha })
}

/// Stratum label of an XY configuration: `Σ3` at the origin, `Σ2` when the
/// two vectors are parallel or one vanishes, `Σ1` otherwise. `tol` is
/// relative to the larger length.
pub fn classify_stratum_xy(config: &Configuration, tol: f64) -> Result<&'static str> {
    let p = orbit_params_xy(config)?;
    let scale = p.a.max(p.b);
    if scale == 0.0 {
        return Ok("Σ3");
    }
    let small = tol * scale;
    if p.a <= small || p.b <= small {
        return Ok("Σ2");
    }
    let (r1, r2) = two_points(config)?;
    // the cross product is better conditioned than the angle near 0 and pi
    if r1.cross(&r2).norm() <= tol * p.a * p.b {
        Ok("Σ2")
    } else {
        Ok("Σ1")
    }
}

fn frame(r1: &Vec3, r2: &Vec3) -> Mat3 {
    let mut cols: Vec<Vec3> = Vec::with_capacity(3);
    for v in [*r1, *r2, Vec3::x(), Vec3::y(), Vec3::z()] {
        let mut w = v;
        for c in &cols {
            w -= c * c.dot(&w);
        }
        if w.norm() > 1e-9 * v.norm().max(1e-300) && w.norm() > 0.0 {
            cols.push(w.normalize());
        }
        if cols.len() == 2 {
            break;
        }
    }
    let e3 = cols[0].cross(&cols[1]);
    Mat3::from_columns(&[cols[0], cols[1], e3])
}

/// An orthogonal `g` with `g R_j = R'_j` whenever the two XY configurations
/// have equal invariants.
pub fn align_xy(from: &Configuration, to: &Configuration) -> Result<OrthogonalMatrix3> {
    let (a1, a2) = two_points(from)?;
    let (b1, b2) = two_points(to)?;
    let fa = frame(&a1, &a2);
    let fb = frame(&b1, &b2);
    OrthogonalMatrix3::with_tolerance(fb * fa.transpose(), 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumEntry {
    pub molecule: MoleculeType,
    pub label: String,
    pub symmetry: String,
    pub maximally_peripheral: bool,
    pub description: String,
}

#[derive(Deserialize)]
struct CatalogFile {
    version: u32,
    strata: Vec<StratumEntry>,
}

pub fn parse_strata_catalog(json: &str) -> Result<Vec<StratumEntry>> {
    let file: CatalogFile = serde_json::from_str(json).map_err(|e| Error::Parse(format!("strata catalog: {e}")))?;
    if file.version != 1 {
        return Err(Error::Parse(format!(
            "unsupported strata catalog version {}",
            file.version
        )));
    }
    for t in MoleculeType::ALL {
        if !file.strata.iter().any(|s| s.molecule == t && s.maximally_peripheral) {
            return Err(Error::Parse(format!(
                "catalog has no maximally peripheral stratum for {t}"
            )));
        }
    }
    Ok(file.strata)
}

pub fn stratum_catalog(molecule: MoleculeType) -> Vec<StratumEntry> {
    CATALOG.iter().filter(|s| s.molecule == molecule).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum StratumClassification {
    Catalogued(StratumEntry),
    Uncatalogued { molecule: MoleculeType, symmetry: String },
}

impl StratumClassification {
    pub fn entry(&self) -> Option<&StratumEntry> {
        match self {
            StratumClassification::Catalogued(e) => Some(e),
            StratumClassification::Uncatalogued { .. } => None,
        }
    }

    pub fn symmetry(&self) -> &str {
        match self {
            StratumClassification::Catalogued(e) => &e.symmetry,
            StratumClassification::Uncatalogued { symmetry, .. } => symmetry,
        }
    }
}

/// Detect the point group of the centered configuration and look it up in
/// the catalog for the molecule type.
pub fn classify_stratum(spec: &MoleculeSpec, config: &Configuration, tol: f64) -> Result<StratumClassification> {
    let molecule = MoleculeType::of(spec)
        .ok_or_else(|| Error::Unsupported("strata are catalogued only for XY, X2, XY2, X3, XY3 and X4".into()))?;
    let centered = config.centered(spec);
    let symmetry = if centered.radius() == 0.0 {
        "O(3)".to_string()
    } else {
        detect_point_group(spec, &centered, tol)?.name
    };
    Ok(CATALOG
        .iter()
        .find(|s| s.molecule == molecule && s.symmetry == symmetry)
        .cloned()
        .map(StratumClassification::Catalogued)
        .unwrap_or(StratumClassification::Uncatalogued { molecule, symmetry }))
}

/// A linear family of configurations `R(p) = sum_i p_i B_i` sharing one
/// isotropy group.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFamily {
    pub molecule: MoleculeType,
    pub symmetry: &'static str,
    basis: DMatrix<f64>,
    /// Starting direction in parameter space.
    start: Vec<f64>,
}

impl SymmetricFamily {
    fn new(molecule: MoleculeType, symmetry: &'static str, basis: &[Vec<[f64; 3]>], start: Vec<f64>) -> Self {
        let n = basis[0].len();
        let mut b = DMatrix::zeros(3 * n, basis.len());
        for (i, pts) in basis.iter().enumerate() {
            for (j, p) in pts.iter().enumerate() {
                for k in 0..3 {
                    b[(3 * j + k, i)] = p[k];
                }
            }
        }
        SymmetricFamily {
            molecule,
            symmetry,
            basis: b,
            start,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn configuration(&self, params: &[f64]) -> Configuration {
        let v = &self.basis * DVector::from_column_slice(params);
        Configuration::from_stacked(&v).expect("family basis has 3N rows")
    }
}

/// The parametrized family for a maximally peripheral stratum, or `None`
/// for strata that are not maximally peripheral.
pub fn symmetric_family(molecule: MoleculeType, symmetry: &str) -> Option<SymmetricFamily> {
    use MoleculeType::*;
    let h = 3f64.sqrt() / 2.0;
    let o = [0.0; 3];
    let z = [0.0, 0.0, 1.0];
    let zm = [0.0, 0.0, -1.0];
    let tri = [[1.0, 0.0, 0.0], [-0.5, h, 0.0], [-0.5, -h, 0.0]];
    let f = match (molecule, symmetry) {
        (Xy, "C∞v") => SymmetricFamily::new(Xy, "C∞v", &[vec![o, z]], vec![1.0]),
        (X2, "D∞h") => SymmetricFamily::new(X2, "D∞h", &[vec![z, zm]], vec![1.0]),
        (Xy2, "D∞h") => SymmetricFamily::new(Xy2, "D∞h", &[vec![o, z, zm]], vec![1.0]),
        (X3, "D∞h") => SymmetricFamily::new(X3, "D∞h", &[vec![o, z, zm]], vec![1.0]),
        (X3, "D3h") => SymmetricFamily::new(X3, "D3h", &[tri.to_vec()], vec![1.0]),
        (Xy3, "D3h") => SymmetricFamily::new(Xy3, "D3h", &[vec![o, tri[0], tri[1], tri[2]]], vec![1.0]),
        (X4, "D∞h") => SymmetricFamily::new(X4, "D∞h", &[vec![z, zm, o, o], vec![o, o, z, zm]], vec![1.0, 3.0]),
        (X4, "Td") => SymmetricFamily::new(
            X4,
            "Td",
            &[vec![
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]],
            vec![1.0],
        ),
        (X4, "D4h") => SymmetricFamily::new(
            X4,
            "D4h",
            &[vec![
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, -1.0, 0.0],
            ]],
            vec![1.0],
        ),
        (X4, "D3h") => SymmetricFamily::new(X4, "D3h", &[vec![o, tri[0], tri[1], tri[2]]], vec![1.0]),
        _ => return None,
    };
    Some(f)
}

/// A stationary point found inside a symmetric family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedStationaryPoint {
    pub molecule: MoleculeType,
    pub stratum: String,
    pub symmetry: String,
    pub detected_symmetry: String,
    pub parameters: Vec<f64>,
    pub point: StationaryPoint,
}

fn family_gradient(model: &PotentialModel, family: &SymmetricFamily, p: &[f64]) -> Result<DVector<f64>> {
    Ok(family.basis.transpose() * model.gradient(&family.configuration(p))?)
}

/// Find a stationary point of V inside `family`.
///
/// The family is first searched along the ray through its starting
/// direction for a sign change of the directional derivative, which is then
/// bisected. For multi-parameter families Newton steps on the restricted
/// gradient follow. Any restricted stationary point is a stationary point of
/// the full potential because the family is the fixed-point set of a group;
/// this is checked on the full gradient.
pub fn restricted_stationary_point(
    model: &PotentialModel,
    family: &SymmetricFamily,
    opts: &OptimizerOptions,
) -> Result<RestrictedStationaryPoint> {
    let spec = model.spec();
    if MoleculeType::of(spec) != Some(family.molecule) {
        return Err(Error::InvalidSpec(format!("model is not of type {}", family.molecule)));
    }
    let dir = DVector::from_vec(family.start.clone());
    let slope = |t: f64| -> Result<f64> {
        let p: Vec<f64> = (&dir * t).iter().copied().collect();
        Ok(family_gradient(model, family, &p)?.dot(&dir))
    };
    let scale = model.length_scale();
    let ts: Vec<f64> = (-40..=40).map(|k| scale * 2f64.powf(k as f64 / 4.0)).collect();
    let mut bracket = None;
    let mut prev = (ts[0], slope(ts[0])?);
    for &t in &ts[1..] {
        let s = slope(t)?;
        if prev.1.signum() != s.signum() {
            bracket = Some((prev.0, t, prev.1));
            break;
        }
        prev = (t, s);
    }
    let (mut lo, mut hi, s_lo) = bracket
        .ok_or_else(|| Error::NoEquilibrium(format!("no stationary point along the {} family", family.symmetry)))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid)?.signum() == s_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut p: Vec<f64> = (&dir * (0.5 * (lo + hi))).iter().copied().collect();

    let grad_tol = opts.absolute_gradient_tolerance(model);
    let mut iterations = 0;
    if family.dimension() > 1 {
        let mut g = family_gradient(model, family, &p)?;
        while g.norm() > grad_tol * 1e-2 && iterations < opts.max_iterations {
            iterations += 1;
            let h = family.basis.transpose() * model.hessian(&family.configuration(&p))? * &family.basis;
            let step = h
                .clone()
                .lu()
                .solve(&(-&g))
                .ok_or_else(|| Error::NoEquilibrium("singular restricted Hessian".into()))?;
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
                if let Ok(gt) = family_gradient(model, family, &trial) {
                    if gt.norm() < g.norm() {
                        p = trial;
                        g = gt;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-12 {
                    return Err(Error::NotConverged {
                        iterations,
                        gradient_norm: g.norm(),
                        last: family.configuration(&p).to_arrays(),
                    });
                }
            }
            if lambda < 1.0 && step.norm() * lambda < 1e-15 * scale {
                break;
            }
        }
    }

    let raw = family.configuration(&p);
    let full_grad = model.gradient(&raw)?.norm();
    if full_grad > grad_tol {
        return Err(Error::NotStationary(full_grad));
    }
    let config = raw.centered(spec);
    let eval = model.evaluate(&config)?;
    let spectrum = classify_spectrum(&eval.hessian, &config, opts.zero_mode_threshold);
    let detected = detect_point_group(spec, &config, DEFAULT_TOLERANCE)?.name;
    let stratum = stratum_catalog(family.molecule)
        .into_iter()
        .find(|s| s.symmetry == family.symmetry)
        .map(|s| s.label)
        .unwrap_or_default();
    Ok(RestrictedStationaryPoint {
        molecule: family.molecule,
        stratum,
        symmetry: family.symmetry.to_string(),
        detected_symmetry: detected,
        parameters: p,
        point: StationaryPoint {
            signature: pair_distance_signature(spec, &config)?,
            value: eval.value,
            gradient_norm: eval.gradient.norm(),
            eigenvalues: spectrum.eigenvalues,
            zero_modes: spectrum.zero_modes,
            classification: spectrum.classification,
            configuration: config,
            iterations,
        },
    })
}

/// Search every maximally peripheral stratum of the model's type.
pub fn peripheral_stationary_points(
    model: &PotentialModel,
    opts: &OptimizerOptions,
) -> Result<Vec<(StratumEntry, Result<RestrictedStationaryPoint>)>> {
    let molecule = MoleculeType::of(model.spec())
        .ok_or_else(|| Error::Unsupported("strata are catalogued only for XY, X2, XY2, X3, XY3 and X4".into()))?;
    Ok(stratum_catalog(molecule)
        .into_iter()
        .filter(|s| s.maximally_peripheral)
        .map(|s| {
            let r = symmetric_family(molecule, &s.symmetry)
                .ok_or_else(|| Error::Unsupported(format!("no family for {}", s.symmetry)))
                .and_then(|f| restricted_stationary_point(model, &f, opts));
            (s, r)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria;
    use crate::molecules::*;
    use crate::optimizer::Classification;
    use crate::units::UnitSystem;

    fn cfg(p: &[[f64; 3]]) -> Configuration {
        Configuration::from_arrays(p).unwrap()
    }

    #[test]
    fn mib_examples() {
        let m = mib_xy(&cfg(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])).unwrap();
        assert_eq!((m.theta1, m.theta2, m.theta3), (1.0, 1.0, 0.0));
        let m = mib_xy(&cfg(&[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])).unwrap();
        assert_eq!((m.theta1, m.theta2, m.theta3), (1.0, 4.0, 2.0));
        assert_eq!(m.theta3, (m.theta1 * m.theta2).sqrt());
        let m = mib_x2(&cfg(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])).unwrap();
        assert_eq!((m.theta1, m.theta2, m.theta3), (2.0, -1.0, 1.0));
        assert!(matches!(
            mib_xy(&cfg(&[[0.0; 3]; 3])),
            Err(Error::Dimension { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn orbit_params_examples() {
        let p = orbit_params_xy(&cfg(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])).unwrap();
        assert_eq!((p.a, p.b), (1.0, 1.0));
        assert!((p.alpha.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let p = orbit_params_xy(&cfg(&[[1.0, 0.0, 0.0], [-2.0, 0.0, 0.0]])).unwrap();
        assert_eq!((p.a, p.b), (1.0, 2.0));
        assert!((p.alpha.unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let p = orbit_params_xy(&cfg(&[[0.0; 3], [0.0; 3]])).unwrap();
        assert_eq!((p.a, p.b, p.alpha), (0.0, 0.0, None));
    }

    #[test]
    fn xy_strata() {
        assert_eq!(
            classify_stratum_xy(&cfg(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]), 1e-9).unwrap(),
            "Σ1"
        );
        assert_eq!(
            classify_stratum_xy(&cfg(&[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), 1e-9).unwrap(),
            "Σ2"
        );
        assert_eq!(
            classify_stratum_xy(&cfg(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), 1e-9).unwrap(),
            "Σ2"
        );
        assert_eq!(classify_stratum_xy(&cfg(&[[0.0; 3], [0.0; 3]]), 1e-9).unwrap(), "Σ3");
    }

    #[test]
    fn alignment_is_constructive() {
        let a = cfg(&[[1.0, 2.0, 0.5], [-0.3, 0.4, 2.0]]);
        let g = OrthogonalMatrix3::rotation(&Vec3::new(0.2, -1.0, 0.7), 1.1).compose(&OrthogonalMatrix3::inversion());
        let b = Configuration::new(a.positions().iter().map(|p| g.apply(p)).collect()).unwrap();
        let h = align_xy(&a, &b).unwrap();
        for (p, q) in a.positions().iter().zip(b.positions()) {
            assert!((h.apply(p) - q).norm() < 1e-12);
        }
        let c = cfg(&[[1.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let d = cfg(&[[0.0, 0.0, -1.0], [0.0, 0.0, -3.0]]);
        let h = align_xy(&c, &d).unwrap();
        assert!((h.apply(&c.positions()[1]) - d.positions()[1]).norm() < 1e-12);
    }

    #[test]
    fn catalog_contents() {
        let x4 = stratum_catalog(MoleculeType::X4);
        assert_eq!(x4.len(), 4);
        assert!(x4.iter().all(|s| s.maximally_peripheral));
        let star = |t| -> Vec<String> {
            stratum_catalog(t)
                .into_iter()
                .filter(|s| s.maximally_peripheral)
                .map(|s| s.symmetry)
                .collect()
        };
        assert_eq!(star(MoleculeType::Xy), ["C∞v"]);
        assert_eq!(star(MoleculeType::X2), ["D∞h"]);
        assert_eq!(star(MoleculeType::Xy2), ["D∞h"]);
        assert_eq!(star(MoleculeType::X3), ["D∞h", "D3h"]);
        assert_eq!(star(MoleculeType::Xy3), ["D3h"]);
        assert_eq!(star(MoleculeType::X4), ["D∞h", "Td", "D4h", "D3h"]);
    }

    #[test]
    fn classify_examples() {
        let red = UnitSystem::reduced();
        let x2 = x2_model(1.0, 0.5, red).unwrap();
        let c = classify_stratum(x2.spec(), &cfg(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), 1e-8).unwrap();
        let e = c.entry().unwrap();
        assert_eq!((e.symmetry.as_str(), e.maximally_peripheral), ("D∞h", true));

        let xy2 = xy2_model(1.0, 1.0, 0.5, 0.5, red).unwrap();
        let bent = equilibria::xy2_bent_geometry(1.0, 1.0, 0.5, 0.5, &red)
            .unwrap()
            .configuration()
            .unwrap();
        let e = classify_stratum(xy2.spec(), &bent, 1e-8).unwrap();
        assert_eq!(e.symmetry(), "C2v");
        assert!(!e.entry().unwrap().maximally_peripheral);

        let x4 = x4_model(1.0, 0.5, red).unwrap();
        let tet = equilibria::x4_tetrahedron_geometry(1.0, 0.5, &red)
            .unwrap()
            .configuration()
            .unwrap();
        let e = classify_stratum(x4.spec(), &tet, 1e-8).unwrap();
        assert_eq!(e.entry().unwrap().symmetry, "Td");

        // an X4 configuration with no catalogued symmetry
        let odd = cfg(&[[0.0; 3], [1.0, 0.0, 0.0], [0.3, 1.7, 0.0], [0.2, 0.1, 1.3]]);
        assert!(matches!(
            classify_stratum(x4.spec(), &odd, 1e-8).unwrap(),
            StratumClassification::Uncatalogued { .. }
        ));
    }

    #[test]
    fn restricted_search_matches_closed_forms() {
        let red = UnitSystem::reduced();
        let opts = OptimizerOptions::default();
        let x3 = x3_model(1.0, 0.5, red).unwrap();
        let tri = restricted_stationary_point(&x3, &symmetric_family(MoleculeType::X3, "D3h").unwrap(), &opts).unwrap();
        let side = equilibria::x3_triangle_side(1.0, 0.5, &red).unwrap();
        assert!((tri.point.signature.0[0].1 - side).abs() < 1e-10 * side);
        assert_eq!(tri.point.classification, Classification::Minimum);
        assert_eq!(tri.detected_symmetry, "D3h");

        let lin = restricted_stationary_point(&x3, &symmetric_family(MoleculeType::X3, "D∞h").unwrap(), &opts).unwrap();
        let d = equilibria::x3_linear_geometry(1.0, 0.5, &red)
            .unwrap()
            .distance("half_spacing");
        assert!((lin.parameters[0] - d).abs() < 1e-10 * d);
        assert_eq!(lin.point.classification, Classification::Saddle);
        assert_eq!(lin.point.zero_modes, 5);

        let x4 = x4_model(1.0, 0.5, red).unwrap();
        let tet = restricted_stationary_point(&x4, &symmetric_family(MoleculeType::X4, "Td").unwrap(), &opts).unwrap();
        let edge = equilibria::x4_tetrahedron_edge(1.0, 0.5, &red).unwrap();
        assert!((tet.point.signature.0[0].1 - edge).abs() < 1e-10 * edge);
    }

    #[test]
    fn x4_square_and_centered_triangle() {
        // side and radius from a scan of V along each family
        let red = UnitSystem::reduced();
        let (q, a) = (1.0, 0.5);
        let x4 = x4_model(q, a, red).unwrap();
        let opts = OptimizerOptions::default();
        let sq = restricted_stationary_point(&x4, &symmetric_family(MoleculeType::X4, "D4h").unwrap(), &opts).unwrap();
        let ct = restricted_stationary_point(&x4, &symmetric_family(MoleculeType::X4, "D3h").unwrap(), &opts).unwrap();
        let scan = |f: &dyn Fn(f64) -> Configuration| {
            let mut best = (f64::INFINITY, 0.0);
            for i in 1..200_000 {
                let t = i as f64 * 1e-5;
                let v = x4.total_potential(&f(t)).unwrap();
                if v < best.0 {
                    best = (v, t);
                }
            }
            best.1
        };
        let fam_sq = symmetric_family(MoleculeType::X4, "D4h").unwrap();
        let fam_ct = symmetric_family(MoleculeType::X4, "D3h").unwrap();
        assert!((scan(&|t| fam_sq.configuration(&[t])) - sq.parameters[0]).abs() < 2e-5);
        assert!((scan(&|t| fam_ct.configuration(&[t])) - ct.parameters[0]).abs() < 2e-5);
        assert_eq!(sq.detected_symmetry, "D4h");
        assert_eq!(ct.detected_symmetry, "D3h");
        assert_eq!(sq.point.classification, Classification::Saddle);
        assert_eq!(ct.point.classification, Classification::Saddle);
    }

    #[test]
    fn every_peripheral_stratum_has_a_stationary_point() {
        let red = UnitSystem::reduced();
        let opts = OptimizerOptions::default();
        let models = [
            xy_model(1.0, 2.0, 0.5, red).unwrap(),
            x2_model(1.0, 0.5, red).unwrap(),
            xy2_model(1.0, 2.0, 0.5, 0.7, red).unwrap(),
            x3_model(1.0, 0.5, red).unwrap(),
            xy3_model(1.0, 2.0, 0.5, 0.3, red).unwrap(),
            x4_model(1.0, 0.5, red).unwrap(),
        ];
        for m in &models {
            for (entry, r) in peripheral_stationary_points(m, &opts).unwrap() {
                let r = r.unwrap_or_else(|e| panic!("{} {}: {e}", entry.molecule, entry.symmetry));
                assert_eq!(r.detected_symmetry, entry.symmetry, "{}", entry.molecule);
            }
        }
    }
}
