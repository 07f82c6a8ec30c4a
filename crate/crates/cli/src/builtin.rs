//! Specification files compiled into the binary.

use molshape::io::SpecFile;

const SPECS: [(&str, &str); 7] = [
    ("xy", include_str!("../data/specs/xy.json")),
    ("x2", include_str!("../data/specs/x2.json")),
    ("xy2", include_str!("../data/specs/xy2.json")),
    ("x3", include_str!("../data/specs/x3.json")),
    ("xy3", include_str!("../data/specs/xy3.json")),
    ("x4", include_str!("../data/specs/x4.json")),
    ("h2", include_str!("../data/specs/h2.json")),
];

/// Names accepted by [`builtin_spec`].
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    SPECS.iter().map(|(n, _)| *n)
}

/// The raw JSON of a built-in spec, looked up case-insensitively.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    let lower = name.to_ascii_lowercase();
    SPECS.iter().find(|(n, _)| *n == lower).map(|(_, t)| *t)
}

pub fn builtin_spec(name: &str) -> Option<SpecFile> {
    builtin_text(name).map(|t| SpecFile::from_json(t).expect("built-in specs are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use molshape::MoleculeType;

    #[test]
    fn every_builtin_builds() {
        for n in builtin_names() {
            let f = builtin_spec(n).unwrap();
            let m = f.model().unwrap();
            if n != "h2" {
                assert_eq!(MoleculeType::of(m.spec()).unwrap().name().to_ascii_lowercase(), n);
            }
        }
        assert!(builtin_spec("XY3").is_some());
        assert!(builtin_spec("co2").is_none());
    }
}
