//! Character tables for the supported point groups, and the rules that sort
//! detected symmetry operations into conjugacy classes.
//!
//! Axis convention for C2v: the principal C2 axis is z and, for planar
//! molecules, the molecular plane is yz, so `sv'(yz)` is the mirror that
//! contains the most nuclei. With that choice a bent XY2 molecule has
//! vibrations 2A1 + B2.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, OrthogonalMatrix3, Vec3};

static TABLE_DATA: &str = include_str!("../../data/character_tables.json");

static TABLES: LazyLock<Vec<CharacterTable>> =
    LazyLock::new(|| parse_character_tables(TABLE_DATA).expect("bundled character tables are valid"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub size: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub characters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub group: String,
    pub classes: Vec<ClassInfo>,
    pub irreps: Vec<Irrep>,
}

#[derive(Deserialize)]
struct TableFile {
    version: u32,
    tables: Vec<CharacterTable>,
}

impl CharacterTable {
    pub fn order(&self) -> usize {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.label == label)
    }

    /// The irrep whose characters are all +1.
    pub fn totally_symmetric(&self) -> &Irrep {
        self.irreps
            .iter()
            .find(|i| i.characters.iter().all(|&c| c == 1.0))
            .expect("validated tables contain the trivial irrep")
    }

    /// Row orthogonality `sum_c |c| chi_a(c) chi_b(c) = |H| delta_ab`, plus
    /// dimension consistency. Returns the largest violation.
    pub fn orthogonality_residual(&self) -> f64 {
        let order = self.order() as f64;
        let mut worst: f64 = 0.0;
        for (a, ia) in self.irreps.iter().enumerate() {
            for (b, ib) in self.irreps.iter().enumerate() {
                let s: f64 = self
                    .classes
                    .iter()
                    .enumerate()
                    .map(|(c, cls)| cls.size as f64 * ia.characters[c] * ib.characters[c])
                    .sum();
                let want = if a == b { order } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parse(format!("character table {}: {m}", self.group)));
        if self.classes.first().map(|c| c.label.as_str()) != Some("E") {
            return bad("first class must be E".into());
        }
        if self.irreps.len() != self.classes.len() {
            return bad("number of irreps differs from number of classes".into());
        }
        for ir in &self.irreps {
            if ir.characters.len() != self.classes.len() {
                return bad(format!("irrep {} has wrong number of characters", ir.label));
            }
            if ir.characters[0] != ir.dim as f64 {
                return bad(format!("irrep {} character at E differs from its dimension", ir.label));
            }
        }
        let dims: usize = self.irreps.iter().map(|i| i.dim * i.dim).sum();
        if dims != self.order() {
            return bad("sum of squared dimensions differs from group order".into());
        }
        if !self.irreps.iter().any(|i| i.characters.iter().all(|&c| c == 1.0)) {
            return bad("no totally symmetric irrep".into());
        }
        let r = self.orthogonality_residual();
        if r > 1e-9 {
            return bad(format!("orthogonality violated by {r}"));
        }
        Ok(())
    }
}

/// Parse and validate a character-table file.
pub fn parse_character_tables(json: &str) -> Result<Vec<CharacterTable>> {
    let file: TableFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    if file.version != 1 {
        return Err(Error::Parse(format!(
            "unsupported character table version {}",
            file.version
        )));
    }
    for t in &file.tables {
        t.validate()?;
    }
    Ok(file.tables)
}

pub fn character_tables() -> &'static [CharacterTable] {
    &TABLES
}

pub fn character_table(group: &str) -> Option<&'static CharacterTable> {
    TABLES.iter().find(|t| t.group == group)
}

/// Geometric type of an orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum OpKind {
    Identity,
    /// Proper rotation of the given order.
    Rotation(u32),
    Inversion,
    Reflection,
    /// Improper rotation S_n.
    Improper(u32),
}

pub(crate) fn op_kind(h: &OrthogonalMatrix3) -> OpKind {
    let t = h.trace();
    let near = |x: f64| (t - x).abs() < 1e-6;
    if h.is_proper() {
        if near(3.0) {
            OpKind::Identity
        } else if near(-1.0) {
            OpKind::Rotation(2)
        } else if near(0.0) {
            OpKind::Rotation(3)
        } else if near(1.0) {
            OpKind::Rotation(4)
        } else if near(2.0) {
            OpKind::Rotation(6)
        } else {
            OpKind::Rotation(0)
        }
    } else if near(-3.0) {
        OpKind::Inversion
    } else if near(1.0) {
        OpKind::Reflection
    } else if near(-2.0) {
        OpKind::Improper(3)
    } else if near(-1.0) {
        OpKind::Improper(4)
    } else if near(0.0) {
        OpKind::Improper(6)
    } else {
        OpKind::Improper(0)
    }
}

/// Rotation axis (proper), rotation axis of `-h` (improper), i.e. the plane
/// normal for reflections. `None` for E and i.
pub(crate) fn op_axis(h: &OrthogonalMatrix3) -> Option<Vec3> {
    let m = if h.is_proper() { *h.matrix() } else { -h.matrix() };
    if (m.trace() - 3.0).abs() < 1e-9 {
        return None;
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let i = (0..3)
        .min_by(|&a, &b| {
            (eig.eigenvalues[a] - 1.0)
                .abs()
                .partial_cmp(&(eig.eigenvalues[b] - 1.0).abs())
                .unwrap()
        })
        .unwrap();
    Some(eig.eigenvectors.column(i).into_owned().normalize())
}

fn parallel(a: &Vec3, b: &Vec3) -> bool {
    a.cross(b).norm() < 1e-6
}

fn nuclei_in_plane(config: &Configuration, normal: &Vec3, tol: f64) -> usize {
    config.positions().iter().filter(|p| p.dot(normal).abs() <= tol).count()
}

fn nuclei_on_axis(config: &Configuration, axis: &Vec3, tol: f64) -> usize {
    config
        .positions()
        .iter()
        .filter(|p| p.cross(axis).norm() <= tol)
        .count()
}

/// Assign each operation of a detected group to a class of `table`.
/// `principal` is the axis of highest proper order, `tol` an absolute length.
pub(crate) fn assign_classes(
    table: &CharacterTable,
    ops: &[OrthogonalMatrix3],
    principal: Option<Vec3>,
    config: &Configuration,
    tol: f64,
) -> Result<Vec<usize>> {
    let fail = |m: &str| Error::Unsupported(format!("cannot assign classes of {}: {m}", table.group));
    let group = table.group.as_str();
    let mut labels: Vec<Option<String>> = Vec::with_capacity(ops.len());
    // ties between the two perpendicular C2 classes and the two vertical
    // mirror classes are settled by nucleus counts below
    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut pending_planes: Vec<(usize, usize, f64)> = Vec::new();

    for (idx, h) in ops.iter().enumerate() {
        let kind = op_kind(h);
        let axis = op_axis(h);
        let along = |a: &Option<Vec3>| match (a, &principal) {
            (Some(a), Some(p)) => parallel(a, p),
            _ => false,
        };
        let label: Option<String> = match (group, kind) {
            (_, OpKind::Identity) => Some("E".into()),
            (_, OpKind::Inversion) => Some("i".into()),
            ("Cs", OpKind::Reflection) => Some("sh".into()),
            ("C2", OpKind::Rotation(2)) | ("C2v", OpKind::Rotation(2)) => Some("C2".into()),
            ("C2v", OpKind::Reflection) => {
                let n = axis.unwrap();
                pending_planes.push((idx, nuclei_in_plane(config, &n, tol), n.x.abs()));
                None
            }
            ("C3v", OpKind::Rotation(3)) | ("D3h", OpKind::Rotation(3)) | ("Td", OpKind::Rotation(3)) => {
                Some("C3".into())
            }
            ("C3v", OpKind::Reflection) => Some("sv".into()),
            ("D3h", OpKind::Rotation(2)) => Some("C2'".into()),
            ("D3h", OpKind::Improper(3)) => Some("S3".into()),
            ("D3h", OpKind::Reflection) => Some(if along(&axis) { "sh" } else { "sv" }.into()),
            ("D4h", OpKind::Rotation(4)) => Some("C4".into()),
            ("D4h", OpKind::Improper(4)) | ("Td", OpKind::Improper(4)) => Some("S4".into()),
            ("D4h", OpKind::Rotation(2)) => {
                if along(&axis) {
                    Some("C2".into())
                } else {
                    pending.push((idx, nuclei_on_axis(config, &axis.unwrap(), tol)));
                    None
                }
            }
            ("D4h", OpKind::Reflection) => {
                if along(&axis) {
                    Some("sh".into())
                } else {
                    pending_planes.push((idx, nuclei_in_plane(config, &axis.unwrap(), tol), 0.0));
                    None
                }
            }
            ("Td", OpKind::Rotation(2)) => Some("C2".into()),
            ("Td", OpKind::Reflection) => Some("sd".into()),
            _ => return Err(fail(&format!("unexpected operation {kind:?}"))),
        };
        labels.push(label);
    }

    let split = |items: &mut Vec<(usize, usize, f64)>, first: &str, second: &str, labels: &mut Vec<Option<String>>| {
        // more nuclei (then larger tie-break key) goes to `first`
        items.sort_by(|a, b| b.1.cmp(&a.1).then(b.2.partial_cmp(&a.2).unwrap()));
        let half = items.len() / 2;
        for (k, (idx, _, _)) in items.iter().enumerate() {
            labels[*idx] = Some(if k < half { first } else { second }.to_string());
        }
    };
    match group {
        "C2v" => split(&mut pending_planes, "sv'(yz)", "sv(xz)", &mut labels),
        "D4h" => {
            let mut axes: Vec<(usize, usize, f64)> = pending.iter().map(|&(i, c)| (i, c, 0.0)).collect();
            split(&mut axes, "C2'", "C2''", &mut labels);
            split(&mut pending_planes, "sv", "sd", &mut labels);
        }
        _ => {}
    }

    let mut out = Vec::with_capacity(ops.len());
    let mut counts = vec![0usize; table.classes.len()];
    for l in labels {
        let l = l.ok_or_else(|| fail("unlabelled operation"))?;
        let c = table
            .class_index(&l)
            .ok_or_else(|| fail(&format!("class {l} not in table")))?;
        counts[c] += 1;
        out.push(c);
    }
    for (c, cls) in table.classes.iter().enumerate() {
        if counts[c] != cls.size {
            return Err(fail(&format!(
                "class {} has {} operations, expected {}",
                cls.label, counts[c], cls.size
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_are_orthogonal() {
        let names: Vec<&str> = character_tables().iter().map(|t| t.group.as_str()).collect();
        assert_eq!(names, ["C1", "Ci", "Cs", "C2", "C2v", "C3v", "D3h", "D4h", "Td"]);
        for t in character_tables() {
            assert!(t.orthogonality_residual() < 1e-12, "{}", t.group);
        }
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let bad = TABLE_DATA.replacen("\"characters\": [1, 1, -1, -1]", "\"characters\": [1, 1, -1, 1]", 1);
        assert!(parse_character_tables(&bad).is_err());
    }

    #[test]
    fn op_kinds() {
        let z = Vec3::z();
        assert_eq!(
            op_kind(&OrthogonalMatrix3::rotation(&z, 2.0 * std::f64::consts::PI / 3.0)),
            OpKind::Rotation(3)
        );
        assert_eq!(
            op_kind(&OrthogonalMatrix3::improper_rotation(&z, std::f64::consts::PI / 2.0)),
            OpKind::Improper(4)
        );
        assert_eq!(op_kind(&OrthogonalMatrix3::reflection(&z)), OpKind::Reflection);
        assert_eq!(op_kind(&OrthogonalMatrix3::inversion()), OpKind::Inversion);
        let n = op_axis(&OrthogonalMatrix3::reflection(&Vec3::new(1.0, 1.0, 0.0))).unwrap();
        assert!(parallel(&n, &Vec3::new(1.0, 1.0, 0.0).normalize()));
    }
}
