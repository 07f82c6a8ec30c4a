use std::process::Command;

use molshape_cli::builtin::builtin_text;
use molshape_cli::report::REPORT_SCHEMA;
use molshape_cli::{cmd_minimize, cmd_modes, cmd_symmetry, cmd_verify_paper, RunOptions, RunReport, SpecInput};
use serde_json::Value;

fn builtin(name: &str) -> SpecInput {
    SpecInput::parse(builtin_text(name).unwrap()).unwrap()
}

fn assert_valid(report: &RunReport) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance = serde_json::to_value(report).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn opts(starts: usize) -> RunOptions {
    RunOptions {
        starts,
        ..RunOptions::default()
    }
}

#[test]
fn x3_catalog_has_triangle_and_line() {
    let r = cmd_minimize(&builtin("x3"), &opts(64)).unwrap();
    assert_valid(&r);
    assert!(r.all_passed(), "{:?}", r.checks);
    let entries = r.results["entries"].as_array().unwrap();
    let kinds: Vec<(&str, &str)> = entries
        .iter()
        .map(|e| {
            (
                e["point"]["classification"].as_str().unwrap(),
                e["point_group"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(kinds, [("minimum", "D3h"), ("saddle", "D∞h")]);
    assert_eq!(entries[0]["stratum"]["status"], "catalogued");
    assert_eq!(entries[0]["stratum"]["symmetry"], "D3h");
}

#[test]
fn xy_single_entry_at_closed_form() {
    let r = cmd_minimize(&builtin("xy"), &opts(16)).unwrap();
    let entries = r.results["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    let c = &entries[0]["point"]["configuration"];
    let d: f64 = (0..3)
        .map(|k| (c[1][k].as_f64().unwrap() - c[0][k].as_f64().unwrap()).powi(2))
        .sum::<f64>()
        .sqrt();
    // q1 = 1, q2 = 2, a = 0.5
    let want = (1.0f64 * 2.0 / (2.0 * 0.5)).cbrt();
    assert!((d - want).abs() / want <= 1e-6, "{d} vs {want}");
}

#[test]
fn every_peripheral_stratum_is_catalogued() {
    for name in ["xy", "x2", "xy2", "x3", "xy3", "x4"] {
        let input = builtin(name);
        let r = cmd_minimize(&input, &opts(32)).unwrap();
        assert!(r.all_passed(), "{name}: {:?}", r.checks);
        let groups: Vec<&str> = r.results["entries"]
            .as_array()
            .unwrap()
            .iter()
            .filter_map(|e| e["point_group"].as_str())
            .collect();
        let t = molshape::MoleculeType::of(input.file.model().unwrap().spec()).unwrap();
        for s in molshape::strata::stratum_catalog(t)
            .into_iter()
            .filter(|s| s.maximally_peripheral)
        {
            assert!(
                groups.contains(&s.symmetry.as_str()),
                "{name}: {} missing from {groups:?}",
                s.symmetry
            );
        }
    }
}

#[test]
fn initial_configuration_is_used() {
    let text = r#"{
        "species": [{"label": "X", "charge": 1, "mass": 1, "count": 2}],
        "units": "reduced",
        "coefficients": [{"pair": ["X", "X"], "value": 0.5}],
        "initial_configuration": [[0, 0, 0], [0, 0, 3]]
    }"#;
    let r = cmd_minimize(&SpecInput::parse(text).unwrap(), &opts(64)).unwrap();
    assert_eq!(r.results["search"]["strategy"], "initial_configuration");
    assert_eq!(r.results["entries"].as_array().unwrap().len(), 1);
    assert_eq!(r.results["entries"][0]["point_group"], "D∞h");
}

#[test]
fn bad_json_names_the_line() {
    let e = SpecInput::parse("{\n  \"species\": [\n}").unwrap_err();
    assert!(e.0.contains("line 3"), "{e}");
    let e = SpecInput::parse(r#"{"species": [], "units": "reduced", "colour": 1}"#).unwrap_err();
    assert!(e.0.contains("colour"), "{e}");
}

#[test]
fn unsupported_type_warns_only() {
    let text = r#"{
        "species": [{"label": "X", "charge": 1, "mass": 1, "count": 1},
                    {"label": "Y", "charge": 1, "mass": 1, "count": 1},
                    {"label": "Z", "charge": 1, "mass": 1, "count": 1}],
        "units": "reduced",
        "coefficients": [{"pair": ["X", "Y"], "value": 0.5}, {"pair": ["X", "Z"], "value": 0.5},
                         {"pair": ["Y", "Z"], "value": 0.5}]
    }"#;
    let r = cmd_minimize(&SpecInput::parse(text).unwrap(), &opts(8)).unwrap();
    assert!(r.all_passed(), "{:?}", r.checks);
    let warnings = r.results["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("catalogued only")));
    assert!(r.results["entries"][0]["stratum"].is_null());
}

#[test]
fn h2_modes_in_wavenumbers() {
    let r = cmd_modes(&builtin("h2"), &opts(8)).unwrap();
    assert_valid(&r);
    assert!(r.all_passed(), "{:?}", r.checks);
    assert_eq!(r.units, "SI");
    let nu = r.results["minima"][0]["normal_modes"]["wavenumbers"][0]
        .as_f64()
        .unwrap();
    assert!((nu - 7566.0).abs() / 7566.0 <= 0.005, "{nu}");
}

#[test]
fn x2_reduced_frequency() {
    let r = cmd_modes(&builtin("x2"), &opts(8)).unwrap();
    let m = &r.results["minima"][0]["normal_modes"];
    assert!(m["wavenumbers"].is_null());
    let w = m["frequencies"][0].as_f64().unwrap();
    assert!((w - 6f64.sqrt()).abs() < 1e-8, "{w}");
    assert_eq!(m["labels"][0], "unassigned");
}

#[test]
fn no_minimum_is_a_failed_report() {
    // with a negative spring constant nothing holds the pair together
    let text = r#"{
        "species": [{"label": "X", "charge": 1, "mass": 1, "count": 2}],
        "units": "reduced",
        "coefficients": [{"pair": ["X", "X"], "value": -0.5}]
    }"#;
    let r = cmd_modes(&SpecInput::parse(text).unwrap(), &opts(4)).unwrap();
    assert_valid(&r);
    assert!(!r.all_passed());
    assert_eq!(r.exit_code(), 1);
}

const TETRAHEDRON: &str = "[[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]]";

#[test]
fn tetrahedron_symmetry() {
    let r = cmd_symmetry(&builtin("x4"), TETRAHEDRON, &RunOptions::default()).unwrap();
    assert_valid(&r);
    assert!(r.all_passed(), "{:?}", r.checks);
    assert_eq!(r.results["point_group"]["name"], "Td");
    assert_eq!(r.results["totally_symmetric_multiplicity"], 1);
    let d = &r.results["decomposition"]["multiplicities"];
    assert!(d.as_array().unwrap().iter().any(|p| p[0] == "A1" && p[1] == 1));
}

#[test]
fn bent_xy2_uses_c2v_table() {
    // X at the origin of the center of mass with unit masses
    let (h, w) = (0.6, 0.8);
    let config = format!(
        "[[0, 0, {}], [{w}, 0, {}], [-{w}, 0, {}]]",
        2.0 * h / 3.0,
        -h / 3.0,
        -h / 3.0
    );
    let r = cmd_symmetry(&builtin("xy2"), &config, &RunOptions::default()).unwrap();
    assert_eq!(r.results["point_group"]["name"], "C2v");
    let labels: Vec<&str> = r.results["decomposition"]["multiplicities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["A1", "A2", "B1", "B2"]);
    assert!(r.all_passed());
}

#[test]
fn uncentered_input_is_rejected() {
    let e = cmd_symmetry(&builtin("x2"), "[[0,0,1],[0,0,2]]", &RunOptions::default()).unwrap_err();
    assert!(e.0.contains("center"), "{e}");
}

#[test]
fn results_are_deterministic() {
    let strip = |mut r: RunReport| {
        r.duration_seconds = 0.0;
        serde_json::to_string(&r).unwrap()
    };
    let o = RunOptions {
        seed: 5,
        starts: 24,
        ..RunOptions::default()
    };
    let a = strip(cmd_minimize(&builtin("xy2"), &o).unwrap());
    let b = strip(cmd_minimize(&builtin("xy2"), &o).unwrap());
    assert_eq!(a, b);
    let v = RunOptions {
        only: Some(vec!["mib".into(), "taylor-remainder".into()]),
        ..RunOptions::default()
    };
    let a = cmd_verify_paper(&v).unwrap();
    let b = cmd_verify_paper(&v).unwrap();
    assert_valid(&a);
    assert_eq!(a.results, b.results);
    assert_eq!(a.checks, b.checks);
}

#[test]
fn perturbed_constants_fail_the_h2_check() {
    let v = RunOptions {
        only: Some(vec!["h2-frequency".into()]),
        perturb_constants: Some(1.05),
        ..RunOptions::default()
    };
    let r = cmd_verify_paper(&v).unwrap();
    assert_eq!(r.checks.len(), 1);
    assert!(!r.checks[0].pass, "{:?}", r.checks);
    let v = RunOptions {
        perturb_constants: None,
        ..v
    };
    assert!(cmd_verify_paper(&v).unwrap().all_passed());
}

fn molshape(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_molshape"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_exit_codes() {
    let ok = molshape(&["verify-paper", "--only", "h2-frequency"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: RunReport = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report.checks[0].name, "h2-frequency");

    let fail = molshape(&["verify-paper", "--only=1", "--perturb-constants", "1.05"]);
    assert_eq!(fail.status.code(), Some(1));

    let dir = std::env::temp_dir().join(format!("molshape-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"species\": [").unwrap();
    let out = molshape(&["minimize", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let unknown = molshape(&["verify-paper", "--only", "eq48"]);
    assert_eq!(unknown.status.code(), Some(2));

    let path = dir.join("report.json");
    let out = molshape(&[
        "minimize",
        "builtin:x2",
        "--starts",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: RunReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written.command, "minimize");
    std::fs::remove_dir_all(&dir).ok();
}
