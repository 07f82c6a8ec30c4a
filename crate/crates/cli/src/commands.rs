//! The `minimize`, `modes` and `symmetry` commands.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use molshape::io::{parse_configuration, SpecFile};
use molshape::optimizer::{
    classify_spectrum, find_stationary_point, multistart_search, OptimizerOptions, SearchMode, StationaryCatalog,
};
use molshape::strata::{classify_stratum, peripheral_stationary_points};
use molshape::symmetry::{
    detect_point_group, irrep_decomposition, totally_symmetric_multiplicity, verify_hessian_commutation,
    DEFAULT_TOLERANCE,
};
use molshape::vibrations::normal_modes;
use molshape::{Configuration, PhysicalConstants, PotentialModel, UnitMode, UnitSystem};
use serde_json::{json, Map, Value};

use crate::builtin::{builtin_names, builtin_text};
use crate::report::{input_digest, Check, RunReport};

/// Commutation tolerance, relative to the Hessian norm.
pub const COMMUTATION_TOLERANCE: f64 = 1e-8;

/// Bad input: unreadable or malformed files, invalid options, or a
/// configuration violating a command precondition. Exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<molshape::Error> for InputError {
    fn from(e: molshape::Error) -> Self {
        InputError(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub starts: usize,
    /// Gradient tolerance override.
    pub tol: Option<f64>,
    /// Unit system override.
    pub units: Option<UnitMode>,
    /// Check names or numbers for `verify-paper`.
    pub only: Option<Vec<String>>,
    /// Scale factor applied to the elementary charge in SI mode.
    pub perturb_constants: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            starts: 64,
            tol: None,
            units: None,
            only: None,
            perturb_constants: None,
        }
    }
}

impl RunOptions {
    pub fn constants(&self) -> PhysicalConstants {
        let mut c = PhysicalConstants::CODATA_2018;
        if let Some(f) = self.perturb_constants {
            c.elementary_charge *= f;
        }
        c
    }

    pub fn optimizer(&self) -> OptimizerOptions {
        let mut o = OptimizerOptions::default();
        if let Some(t) = self.tol {
            o.gradient_tolerance = t;
        }
        o.seed = self.seed;
        o
    }

    fn validate(&self) -> Result<(), InputError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(InputError(format!("--tol must be positive, got {t}")));
            }
        }
        if let Some(f) = self.perturb_constants {
            if !(f > 0.0 && f.is_finite()) {
                return Err(InputError(format!("--perturb-constants must be positive, got {f}")));
            }
        }
        if self.starts == 0 {
            return Err(InputError("--starts must be at least 1".into()));
        }
        Ok(())
    }

    /// Bytes describing the options that influence results.
    fn fingerprint(&self) -> Vec<u8> {
        format!(
            "seed={};starts={};tol={:?};units={:?};perturb={:?}",
            self.seed, self.starts, self.tol, self.units, self.perturb_constants
        )
        .into_bytes()
    }
}

/// A parsed spec together with its source text.
#[derive(Debug, Clone)]
pub struct SpecInput {
    pub text: String,
    pub file: SpecFile,
}

impl SpecInput {
    pub fn parse(text: impl Into<String>) -> Result<SpecInput, InputError> {
        let text = text.into();
        let file = SpecFile::from_json(&text)?;
        Ok(SpecInput { text, file })
    }

    /// `builtin:NAME` or a path to a JSON file.
    pub fn load(arg: &str) -> Result<SpecInput, InputError> {
        if let Some(name) = arg.strip_prefix("builtin:") {
            let text = builtin_text(name).ok_or_else(|| {
                InputError(format!(
                    "unknown built-in spec '{name}'; available: {}",
                    builtin_names().collect::<Vec<_>>().join(", ")
                ))
            })?;
            return SpecInput::parse(text);
        }
        SpecInput::parse(read_file(Path::new(arg))?).map_err(|e| InputError(format!("{arg}: {e}")))
    }

    pub fn units(&self, opts: &RunOptions) -> UnitSystem {
        match opts.units.unwrap_or(self.file.units) {
            UnitMode::Si => UnitSystem::si_with(opts.constants()),
            UnitMode::Reduced => UnitSystem::reduced(),
        }
    }

    pub fn model(&self, opts: &RunOptions) -> Result<PotentialModel, InputError> {
        Ok(self.file.model_with_units(self.units(opts))?)
    }
}

pub fn read_file(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn units_name(u: &UnitSystem) -> &'static str {
    if u.is_si() {
        "SI"
    } else {
        "reduced"
    }
}

fn expected_zero_modes(c: &Configuration) -> usize {
    if c.is_collinear(1e-10) {
        5
    } else {
        6
    }
}

/// A single search from the file's initial configuration, or a seeded
/// multistart otherwise. For catalogued molecule types the multistart is
/// joined by one symmetry-restricted search per maximally peripheral
/// stratum.
fn search(
    model: &PotentialModel,
    input: &SpecInput,
    opts: &RunOptions,
) -> Result<(StationaryCatalog, Value), InputError> {
    let o = opts.optimizer();
    match input.file.initial_configuration()? {
        Some(init) => {
            let o = o.with_mode(SearchMode::Minimum);
            let mut cat = StationaryCatalog::default();
            match find_stationary_point(model, &init, &o) {
                Ok(p) => cat.insert(p),
                Err(e) => cat.failures.push(molshape::optimizer::FailedStart {
                    start: 0,
                    error: e.to_string(),
                }),
            }
            Ok((cat, json!({"strategy": "initial_configuration", "mode": o.mode})))
        }
        None => {
            let o = o.with_mode(SearchMode::Stationary);
            let mut cat = multistart_search(model, opts.starts, opts.seed, &o);
            let mut symmetric = 0;
            if let Ok(points) = peripheral_stationary_points(model, &o) {
                for p in points.into_iter().filter_map(|(_, p)| p.ok()) {
                    cat.insert(p.point);
                    symmetric += 1;
                }
            }
            Ok((
                cat,
                json!({"strategy": "multistart", "starts": opts.starts, "symmetric_starts": symmetric, "mode": o.mode}),
            ))
        }
    }
}

/// Catalog entries as JSON, each with its point group and stratum.
fn annotate(model: &PotentialModel, cat: &StationaryCatalog, warnings: &mut Vec<String>) -> Vec<Value> {
    let spec = model.spec();
    let mut strata_warned = false;
    cat.entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut v = serde_json::to_value(e).expect("entries serialize");
            let obj = v.as_object_mut().expect("entry is an object");
            let c = e.point.configuration.centered(spec);
            let group = match detect_point_group(spec, &c, DEFAULT_TOLERANCE) {
                Ok(g) => Value::String(g.name),
                Err(err) => {
                    warnings.push(format!("entry {i}: point group not detected: {err}"));
                    Value::Null
                }
            };
            let stratum = match classify_stratum(spec, &c, DEFAULT_TOLERANCE) {
                Ok(s) => serde_json::to_value(s).expect("strata serialize"),
                Err(molshape::Error::Unsupported(msg)) => {
                    if !strata_warned {
                        warnings.push(msg);
                        strata_warned = true;
                    }
                    Value::Null
                }
                Err(err) => {
                    warnings.push(format!("entry {i}: stratum not classified: {err}"));
                    Value::Null
                }
            };
            obj.insert("point_group".into(), group);
            obj.insert("stratum".into(), stratum);
            v
        })
        .collect()
}

fn search_checks(model: &PotentialModel, cat: &StationaryCatalog, opts: &RunOptions) -> Result<Vec<Check>, InputError> {
    let tol = opts.optimizer().absolute_gradient_tolerance(model);
    let mut worst: f64 = 0.0;
    let mut zero_ok = true;
    for e in &cat.entries {
        worst = worst.max(model.gradient(&e.point.configuration)?.norm());
        zero_ok &= e.point.zero_modes == expected_zero_modes(&e.point.configuration);
    }
    Ok(vec![
        Check::new(
            "stationary-points-found",
            !cat.entries.is_empty(),
            format!(
                "{} distinct points, {} failed starts",
                cat.entries.len(),
                cat.failures.len()
            ),
        ),
        Check::new(
            "gradients-reverified",
            !cat.entries.is_empty() && worst <= tol,
            format!("largest gradient norm {worst:.3e} (tolerance {tol:.3e})"),
        ),
        Check::new(
            "zero-modes",
            zero_ok,
            "6 zero modes at nonlinear points, 5 at collinear ones".to_string(),
        ),
    ])
}

pub fn cmd_minimize(input: &SpecInput, opts: &RunOptions) -> Result<RunReport, InputError> {
    let t0 = Instant::now();
    opts.validate()?;
    let model = input.model(opts)?;
    let (cat, strategy) = search(&model, input, opts)?;
    let mut warnings = Vec::new();
    let entries = annotate(&model, &cat, &mut warnings);
    let checks = search_checks(&model, &cat, opts)?;
    Ok(RunReport {
        command: "minimize".into(),
        input_digest: input_digest(&[input.text.as_bytes(), &opts.fingerprint()]),
        units: units_name(model.units()).into(),
        seed: opts.seed,
        results: json!({
            "search": strategy,
            "entries": entries,
            "failures": cat.failures,
            "warnings": warnings,
        }),
        checks,
        duration_seconds: t0.elapsed().as_secs_f64(),
    })
}

pub fn cmd_modes(input: &SpecInput, opts: &RunOptions) -> Result<RunReport, InputError> {
    let t0 = Instant::now();
    opts.validate()?;
    let model = input.model(opts)?;
    let spec = model.spec();
    let (cat, strategy) = search(&model, input, opts)?;
    let zero_tol = opts.optimizer().zero_mode_threshold;
    let mut minima = Vec::new();
    let mut errors = Vec::new();
    for e in cat.minima() {
        let c = e.point.configuration.centered(spec);
        let group = detect_point_group(spec, &c, DEFAULT_TOLERANCE).ok();
        match normal_modes(&model, &c, group.as_ref(), zero_tol) {
            Ok(report) => minima.push(json!({
                "value": e.point.value,
                "configuration": c.to_arrays(),
                "point_group": group.as_ref().map(|g| g.name.clone()),
                "normal_modes": report,
            })),
            Err(err) => errors.push(err.to_string()),
        }
    }
    let found = !minima.is_empty();
    let checks = vec![
        Check::new(
            "minimum-found",
            found,
            if found {
                format!("{} minima among {} stationary points", minima.len(), cat.entries.len())
            } else {
                format!("no minimum among {} stationary points", cat.entries.len())
            },
        ),
        Check::new(
            "normal-modes",
            found && errors.is_empty(),
            if errors.is_empty() {
                "normal modes computed at every minimum".to_string()
            } else {
                errors.join("; ")
            },
        ),
    ];
    Ok(RunReport {
        command: "modes".into(),
        input_digest: input_digest(&[input.text.as_bytes(), &opts.fingerprint()]),
        units: units_name(model.units()).into(),
        seed: opts.seed,
        results: json!({"search": strategy, "minima": minima}),
        checks,
        duration_seconds: t0.elapsed().as_secs_f64(),
    })
}

/// Point group, irrep content and Hessian commutation at a given
/// configuration. The configuration must have its center of mass at the
/// origin.
pub fn cmd_symmetry(input: &SpecInput, config_text: &str, opts: &RunOptions) -> Result<RunReport, InputError> {
    let t0 = Instant::now();
    opts.validate()?;
    let model = input.model(opts)?;
    let spec = model.spec();
    let config = parse_configuration(config_text)?;
    spec.check_len(config.len())?;
    let group = detect_point_group(spec, &config, DEFAULT_TOLERANCE)?;
    let n = spec.n_nuclei();
    let decomposition = if group.character_table().is_some() {
        Some(irrep_decomposition(&group)?)
    } else {
        None
    };
    let a1 = totally_symmetric_multiplicity(&group, n)?;
    let hessian = model.hessian(&config)?;
    let commutation = verify_hessian_commutation(&hessian, &group.representative_elements(), COMMUTATION_TOLERANCE);
    let gradient_norm = model.gradient(&config)?.norm();
    let spectrum = classify_spectrum(&hessian, &config, opts.optimizer().zero_mode_threshold);

    let mut results = Map::new();
    results.insert(
        "point_group".into(),
        serde_json::to_value(&group).expect("groups serialize"),
    );
    results.insert(
        "decomposition".into(),
        serde_json::to_value(&decomposition).expect("serializes"),
    );
    results.insert("totally_symmetric_multiplicity".into(), json!(a1));
    results.insert(
        "commutation".into(),
        serde_json::to_value(&commutation).expect("serializes"),
    );
    results.insert("gradient_norm".into(), json!(gradient_norm));
    results.insert("spectrum".into(), serde_json::to_value(&spectrum).expect("serializes"));
    let checks = vec![
        Check::new(
            "hessian-commutation",
            commutation.pass,
            format!(
                "max |gH - Hg|/|H| = {:.3e} over {} elements (tolerance {COMMUTATION_TOLERANCE:e})",
                commutation.max_residual,
                commutation.residuals.len()
            ),
        ),
        Check::new(
            "totally-symmetric",
            a1 >= 1,
            format!("totally symmetric multiplicity {a1} in {}", group.name),
        ),
    ];
    Ok(RunReport {
        command: "symmetry".into(),
        input_digest: input_digest(&[input.text.as_bytes(), config_text.as_bytes(), &opts.fingerprint()]),
        units: units_name(model.units()).into(),
        seed: opts.seed,
        results: Value::Object(results),
        checks,
        duration_seconds: t0.elapsed().as_secs_f64(),
    })
}
