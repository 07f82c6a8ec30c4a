//! The end-to-end verification suite behind `verify-paper`.
//!
//! Every check runs on built-in models with pinned tolerances and a seeded
//! random stream, and reports a one-line detail. Failures are report
//! content, never errors.

use std::time::Instant;

use molshape::equilibria::{self, AnalyticEquilibrium};
use molshape::molecules::*;
use molshape::optimizer::{
    classify_spectrum, find_stationary_point, multistart_search, random_start, Classification, HessianSpectrum,
    OptimizerOptions, SearchMode,
};
use molshape::strata::{
    align_xy, classify_stratum_xy, mib_xy, peripheral_stationary_points, restricted_stationary_point, symmetric_family,
    RestrictedStationaryPoint,
};
use molshape::symmetry::{
    detect_point_group, totally_symmetric_multiplicity, verify_hessian_commutation, DEFAULT_TOLERANCE,
};
use molshape::vibrations::{angular_frequency_to_wavenumber, diatomic_frequency, DiatomicInput};
use molshape::{
    apply_group_element, apply_translation, inverse_norm_correction, inverse_norm_difference, Configuration,
    GroupElement, MoleculeType, OrthogonalMatrix3, PhysicalConstants, PotentialModel, UnitSystem, Vec3,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::{InputError, RunOptions, COMMUTATION_TOLERANCE};
use crate::report::{input_digest, Check, RunReport};

/// Proton mass in u.
pub const PROTON_MASS: f64 = 1.007276466621;
/// H2 equilibrium bond length, m.
pub const H2_BOND_LENGTH: f64 = 0.07414e-9;
/// Reference H2 wavenumber, cm^-1.
pub const H2_WAVENUMBER: f64 = 7566.0;

type Outcome = molshape::Result<(bool, String)>;

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    run: fn(&Context) -> Outcome,
}

/// Inputs shared by every check.
pub struct Context {
    pub seed: u64,
    pub constants: PhysicalConstants,
}

impl Context {
    /// An independent random stream per check.
    fn rng(&self, id: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(id as u64);
        r
    }
}

const fn criterion(id: usize, name: &'static str, run: fn(&Context) -> Outcome) -> Criterion {
    Criterion { id, name, run }
}

pub const CRITERIA: [Criterion; 15] = [
    criterion(1, "h2-frequency", h2_frequency),
    criterion(2, "diatomic-bond-length", diatomic_bond_length),
    criterion(3, "xy2-bent-minimum", xy2_bent_minimum),
    criterion(4, "xy2-linear-boundary", xy2_linear_boundary),
    criterion(5, "xy3-planar-boundary", xy3_planar_boundary),
    criterion(6, "x3-linear-saddle", x3_linear_saddle),
    criterion(7, "x4-tetrahedron", x4_tetrahedron),
    criterion(8, "invariance", invariance),
    criterion(9, "hessian-commutation", hessian_commutation),
    criterion(10, "totally-symmetric", totally_symmetric),
    criterion(11, "zero-modes", zero_modes),
    criterion(12, "finite-differences", finite_differences),
    criterion(13, "mib", mib),
    criterion(14, "peripheral-strata", peripheral_strata),
    criterion(15, "taylor-remainder", taylor_remainder),
];

/// Resolve `--only` selectors (names or numbers) to criteria, in suite
/// order.
pub fn select(only: Option<&[String]>) -> Result<Vec<&'static Criterion>, InputError> {
    let Some(only) = only else {
        return Ok(CRITERIA.iter().collect());
    };
    let mut wanted = Vec::new();
    for sel in only
        .iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let c = CRITERIA
            .iter()
            .find(|c| c.name == sel || sel.parse::<usize>().is_ok_and(|n| n == c.id))
            .ok_or_else(|| {
                InputError(format!(
                    "unknown check '{sel}'; available: {}",
                    CRITERIA.iter().map(|c| c.name).collect::<Vec<_>>().join(", ")
                ))
            })?;
        if !wanted.iter().any(|w: &&Criterion| w.id == c.id) {
            wanted.push(c);
        }
    }
    wanted.sort_by_key(|c| c.id);
    Ok(wanted)
}

pub fn run_criterion(c: &Criterion, ctx: &Context) -> Check {
    let (pass, detail) = match (c.run)(ctx) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check::new(c.name, pass, detail)
}

pub fn cmd_verify_paper(opts: &RunOptions) -> Result<RunReport, InputError> {
    let t0 = Instant::now();
    let selected = select(opts.only.as_deref())?;
    let ctx = Context {
        seed: opts.seed,
        constants: opts.constants(),
    };
    let checks: Vec<Check> = selected.iter().map(|c| run_criterion(c, &ctx)).collect();
    let criteria: Vec<_> = selected
        .iter()
        .zip(&checks)
        .map(|(c, k)| json!({"id": c.id, "name": c.name, "pass": k.pass}))
        .collect();
    let fingerprint = format!(
        "seed={};only={:?};perturb={:?}",
        opts.seed, opts.only, opts.perturb_constants
    );
    Ok(RunReport {
        command: "verify-paper".into(),
        input_digest: input_digest(&[fingerprint.as_bytes()]),
        units: "mixed".into(),
        seed: opts.seed,
        results: json!({"constants": ctx.constants, "criteria": criteria}),
        checks,
        duration_seconds: t0.elapsed().as_secs_f64(),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn red() -> UnitSystem {
    UnitSystem::reduced()
}

fn expected_zero_modes(c: &Configuration) -> usize {
    if c.is_collinear(1e-10) {
        5
    } else {
        6
    }
}

fn spectrum(model: &PotentialModel, c: &Configuration) -> molshape::Result<HessianSpectrum> {
    Ok(classify_spectrum(
        &model.hessian(c)?,
        c,
        OptimizerOptions::default().zero_mode_threshold,
    ))
}

fn restricted(
    model: &PotentialModel,
    molecule: MoleculeType,
    symmetry: &str,
) -> molshape::Result<RestrictedStationaryPoint> {
    let family = symmetric_family(molecule, symmetry)
        .ok_or_else(|| molshape::Error::Unsupported(format!("no {symmetry} family for {molecule}")))?;
    restricted_stationary_point(model, &family, &OptimizerOptions::default())
}

fn h2_frequency(ctx: &Context) -> Outcome {
    let units = UnitSystem::si_with(ctx.constants);
    let input = DiatomicInput {
        q1: 1.0,
        q2: 1.0,
        m1: PROTON_MASS,
        m2: PROTON_MASS,
        bond_length: H2_BOND_LENGTH,
    };
    let t0 = Instant::now();
    let omega = diatomic_frequency(&input, &units)?;
    let nu = angular_frequency_to_wavenumber(omega, &units)?;
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let err = rel(nu, H2_WAVENUMBER);
    Ok((
        err <= 0.005 && ms < 1.0,
        format!("{nu:.1} cm^-1 vs {H2_WAVENUMBER} (relative error {err:.2e}, limit 5e-3); {ms:.4} ms (limit 1 ms)"),
    ))
}

fn diatomic_bond_length(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(2);
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (q1, q2, a) = (
            r.random_range(0.2..5.0),
            r.random_range(0.2..5.0),
            r.random_range(0.05..5.0),
        );
        let m = xy_model(q1, q2, a, red())?;
        let closed = (q1 * q2 / (2.0 * a)).cbrt();
        let start = random_start(2, 2.0 * m.length_scale(), &mut r);
        let p = find_stationary_point(&m, &start, &OptimizerOptions::default())?;
        let d = (p.configuration.positions()[1] - p.configuration.positions()[0]).norm();
        worst = worst.max(rel(d, closed));
    }
    let secs = t0.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-6 && secs < 1.0,
        format!("20 random (q1, q2, a): max relative distance error {worst:.2e} (limit 1e-6); {secs:.3} s (limit 1 s)"),
    ))
}

fn xy2_bent_minimum(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(3);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut n = 0;
    while n < 10 {
        let (q, big_q, a1, c1) = (
            r.random_range(0.3..3.0),
            r.random_range(0.3..3.0),
            r.random_range(0.2..3.0),
            r.random_range(0.05..3.0),
        );
        // feasible when c1 > a1 Q / (8 q)
        if c1 <= 1.05 * a1 * big_q / (8.0 * q) {
            continue;
        }
        n += 1;
        let m = xy2_model(q, big_q, a1, c1, red())?;
        let start = loop {
            let s = random_start(3, 2.0 * m.length_scale(), &mut r);
            if s.min_pair_distance() > 0.3 * m.length_scale() {
                break s;
            }
        };
        let p = find_stationary_point(&m, &start, &OptimizerOptions::default())?;
        let c = p.configuration.centered(m.spec());
        let group = detect_point_group(m.spec(), &c, DEFAULT_TOLERANCE)?.name;
        let pos = c.positions();
        let d_xy = [(pos[1] - pos[0]).norm(), (pos[2] - pos[0]).norm()];
        let d_yy = (pos[2] - pos[1]).norm();
        let want_xy = (q * big_q / (2.0 * a1)).cbrt();
        let want_yy = (big_q * big_q / (2.0 * c1)).cbrt();
        let err = rel(d_xy[0], want_xy).max(rel(d_xy[1], want_xy)).max(rel(d_yy, want_yy));
        worst = worst.max(err);
        let s = spectrum(&m, &c)?;
        let positive = s.negative_modes == 0 && s.classification == Classification::Minimum;
        if group != "C2v" || !positive || err > 1e-6 {
            failures.push(format!(
                "(q={q:.3}, Q={big_q:.3}, a1={a1:.3}, c1={c1:.3}): {group}, {:?}, error {err:.2e}",
                s.classification
            ));
        }
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("10 feasible sets: C2v minima, max relative distance error {worst:.2e} (limit 1e-6)")
        } else {
            failures.join("; ")
        },
    ))
}

/// Sweep a coefficient over `[b/2, 3b/2]` in 100 steps, classify the
/// stationary point of `family` at each, and locate the switch from
/// minimum to saddle.
fn boundary_sweep(
    boundary: f64,
    make: impl Fn(f64) -> molshape::Result<PotentialModel>,
    molecule: MoleculeType,
    symmetry: &str,
) -> Outcome {
    let steps = 100;
    let h = boundary / (steps - 1) as f64;
    let grid: Vec<f64> = (0..steps).map(|i| 0.5 * boundary + i as f64 * h).collect();
    let mut classes = Vec::with_capacity(steps);
    for &c in &grid {
        let m = make(c)?;
        let p = restricted(&m, molecule, symmetry)?;
        classes.push(p.point.classification);
    }
    let first_saddle = classes.iter().position(|k| *k == Classification::Saddle);
    let last_minimum = classes.iter().rposition(|k| *k == Classification::Minimum);
    let (Some(s), Some(mn)) = (first_saddle, last_minimum) else {
        return Ok((
            false,
            format!(
                "no minimum-to-saddle switch over c in [{:.4e}, {:.4e}]",
                grid[0],
                grid[steps - 1]
            ),
        ));
    };
    let ordered = mn < s
        && classes[..=mn].iter().all(|k| *k == Classification::Minimum)
        && classes[s..].iter().all(|k| *k == Classification::Saddle)
        && (mn + 1..s).all(|i| (grid[i] - boundary).abs() <= h);
    let flip = 0.5 * (grid[mn] + grid[s]);
    let offset = (flip - boundary).abs() / h;
    Ok((
        ordered && offset <= 1.0,
        format!(
            "switch between c = {:.6e} and {:.6e}, analytic boundary {boundary:.6e}, offset {offset:.2} grid steps (limit 1)",
            grid[mn], grid[s]
        ),
    ))
}

fn xy2_linear_boundary(_: &Context) -> Outcome {
    let (q, big_q, a1) = (4.0, 1.0, 1.0);
    boundary_sweep(
        a1 * big_q / (8.0 * q),
        |c1| xy2_model(q, big_q, a1, c1, red()),
        MoleculeType::Xy2,
        "D∞h",
    )
}

fn xy3_planar_boundary(_: &Context) -> Outcome {
    let (q, big_q, a3) = (9.0, 1.0, 1.0);
    boundary_sweep(
        a3 * big_q / (3.0 * 3f64.sqrt() * q),
        |c3| xy3_model(q, big_q, a3, c3, red()),
        MoleculeType::Xy3,
        "D3h",
    )
}

fn x3_linear_saddle(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(6);
    let mut lines = Vec::new();
    let mut pass = true;
    for _ in 0..5 {
        let a2 = r.random_range(0.05..5.0);
        let m = x3_model(1.0, a2, red())?;
        let tri = restricted(&m, MoleculeType::X3, "D3h")?;
        let lin = restricted(&m, MoleculeType::X3, "D∞h")?;
        let neg = spectrum(&m, &lin.point.configuration)?.negative_modes;
        let ok = tri.point.classification == Classification::Minimum && neg >= 1;
        pass &= ok;
        lines.push(format!(
            "a2={a2:.3}: triangle {:?}, collinear {neg} negative",
            tri.point.classification
        ));
    }
    Ok((pass, lines.join("; ")))
}

fn x4_tetrahedron(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(7);
    let mut lines = Vec::new();
    let mut pass = true;
    for _ in 0..3 {
        let (q, a4) = (r.random_range(0.3..3.0), r.random_range(0.05..5.0));
        let m = x4_model(q, a4, red())?;
        let td = restricted(&m, MoleculeType::X4, "Td")?.point.classification;
        let sq = restricted(&m, MoleculeType::X4, "D4h")?.point;
        let tri = restricted(&m, MoleculeType::X4, "D3h")?.point;
        let ok = td == Classification::Minimum
            && sq.classification == Classification::Saddle
            && tri.classification == Classification::Saddle;
        pass &= ok;
        let neg = |p: &molshape::optimizer::StationaryPoint| p.eigenvalues.iter().filter(|e| **e < 0.0).count();
        lines.push(format!(
            "(q={q:.3}, a4={a4:.3}): tetrahedron {td:?}, square {:?} ({} negative), triangle {:?} ({} negative)",
            sq.classification,
            neg(&sq),
            tri.classification,
            neg(&tri)
        ));
    }
    Ok((pass, lines.join("; ")))
}

fn random_model(t: MoleculeType, r: &mut impl Rng) -> molshape::Result<PotentialModel> {
    let mut p = || r.random_range(0.3..3.0);
    match t {
        MoleculeType::Xy => xy_model(p(), p(), p(), red()),
        MoleculeType::X2 => x2_model(p(), p(), red()),
        MoleculeType::Xy2 => xy2_model(p(), p(), p(), p(), red()),
        MoleculeType::X3 => x3_model(p(), p(), red()),
        MoleculeType::Xy3 => xy3_model(p(), p(), p(), p(), red()),
        MoleculeType::X4 => x4_model(p(), p(), red()),
    }
}

/// Nuclei in a ball of radius `2 * scale`, no two closer than `0.2 * scale`.
fn random_configuration(n: usize, scale: f64, r: &mut impl Rng) -> Configuration {
    loop {
        let c = random_start(n, 2.0 * scale, r);
        if c.min_pair_distance() >= 0.2 * scale {
            return c;
        }
    }
}

fn invariance(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(8);
    let mut worst: f64 = 0.0;
    for t in MoleculeType::ALL {
        for _ in 0..1000 {
            let m = random_model(t, &mut r)?;
            let c = random_configuration(m.spec().n_nuclei(), m.length_scale(), &mut r);
            let v = m.total_potential(&c)?;
            let g = GroupElement::random(m.spec(), &mut r);
            let vg = m.total_potential(&apply_group_element(&g, &c)?)?;
            let shift = Vec3::new(
                r.random_range(-5.0..5.0),
                r.random_range(-5.0..5.0),
                r.random_range(-5.0..5.0),
            );
            let vt = m.total_potential(&apply_translation(&shift, &c))?;
            let scale = v.abs().max(1.0);
            worst = worst.max((vg - v).abs() / scale).max((vt - v).abs() / scale);
        }
    }
    Ok((
        worst <= 1e-10,
        format!("6000 trials: max relative deviation {worst:.2e} (limit 1e-10)"),
    ))
}

/// The analytic equilibria of the suite for one seeded parameter draw,
/// stable ones flagged.
fn suite_equilibria(r: &mut impl Rng) -> molshape::Result<Vec<(PotentialModel, AnalyticEquilibrium)>> {
    let mut p = || -> f64 { r.random_range(0.3..3.0) };
    let (q1, q2, a) = (p(), p(), p());
    let (q, big_q, a1) = (p(), p(), p());
    let b2 = a1 * big_q / (8.0 * q);
    let (c_bent, c_lin) = (b2 * (1.2 + p()), b2 * 0.3 * p().min(2.5));
    let (q3, big_q3, a3) = (p(), p(), p());
    let b3 = a3 * big_q3 / (3f64.sqrt() * 3.0 * q3);
    let (c_pyr, c_pla) = (b3 * (1.2 + p()), b3 * 0.3 * p().min(2.5));
    let (qx, ax) = (p(), p());
    Ok(vec![
        (
            xy_model(q1, q2, a, red())?,
            equilibria::diatomic_equilibrium(q1, q2, a, false, &red())?,
        ),
        (
            x2_model(q1, a, red())?,
            equilibria::diatomic_equilibrium(q1, q1, a, true, &red())?,
        ),
        (
            xy2_model(q, big_q, a1, c_bent, red())?,
            equilibria::xy2_bent_geometry(q, big_q, a1, c_bent, &red())?,
        ),
        (
            xy2_model(q, big_q, a1, c_lin, red())?,
            equilibria::xy2_linear_geometry(q, big_q, a1, c_lin, &red())?,
        ),
        (
            x3_model(qx, ax, red())?,
            equilibria::x3_triangle_geometry(qx, ax, &red())?,
        ),
        (
            x3_model(qx, ax, red())?,
            equilibria::x3_linear_geometry(qx, ax, &red())?,
        ),
        (
            xy3_model(q3, big_q3, a3, c_pyr, red())?,
            equilibria::xy3_pyramidal_geometry(q3, big_q3, a3, c_pyr, &red())?,
        ),
        (
            xy3_model(q3, big_q3, a3, c_pla, red())?,
            equilibria::xy3_planar_geometry(q3, big_q3, a3, c_pla, &red())?,
        ),
        (
            x4_model(qx, ax, red())?,
            equilibria::x4_tetrahedron_geometry(qx, ax, &red())?,
        ),
    ])
}

fn centered_geometry(m: &PotentialModel, eq: &AnalyticEquilibrium) -> molshape::Result<Configuration> {
    eq.configuration()
        .map(|c| c.centered(m.spec()))
        .ok_or_else(|| molshape::Error::NoEquilibrium(format!("{:?} has no geometry", eq.kind)))
}

fn hessian_commutation(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(9);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..5 {
        for (m, eq) in suite_equilibria(&mut r)? {
            if !eq.stable {
                continue;
            }
            let c = centered_geometry(&m, &eq)?;
            let g = detect_point_group(m.spec(), &c, DEFAULT_TOLERANCE)?;
            let rep = verify_hessian_commutation(&m.hessian(&c)?, &g.representative_elements(), COMMUTATION_TOLERANCE);
            worst = worst.max(rep.max_residual);
            count += rep.residuals.len();
        }
    }
    Ok((
        worst <= COMMUTATION_TOLERANCE,
        format!("{count} elements at 40 minima: max |gH - Hg|/|H| = {worst:.2e} (limit 1e-8)"),
    ))
}

fn totally_symmetric(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(10);
    let mut lines = Vec::new();
    let mut pass = true;
    for (m, eq) in suite_equilibria(&mut r)? {
        if !eq.stable {
            continue;
        }
        let c = centered_geometry(&m, &eq)?;
        let g = detect_point_group(m.spec(), &c, DEFAULT_TOLERANCE)?;
        let k = totally_symmetric_multiplicity(&g, c.len())?;
        pass &= k >= 1;
        lines.push(format!("{:?} {}: {k}", eq.kind, g.name));
    }
    Ok((pass, lines.join(", ")))
}

fn zero_modes(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(11);
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut record = |label: String, m: &PotentialModel, c: &Configuration| -> molshape::Result<()> {
        let s = spectrum(m, c)?;
        checked += 1;
        if s.zero_modes != expected_zero_modes(c) {
            bad.push(format!("{label}: {} zero modes", s.zero_modes));
        }
        Ok(())
    };
    for (m, eq) in suite_equilibria(&mut r)? {
        let c = centered_geometry(&m, &eq)?;
        record(format!("{:?}", eq.kind), &m, &c)?;
    }
    for t in MoleculeType::ALL {
        let m = random_model(t, &mut r)?;
        for (entry, p) in peripheral_stationary_points(&m, &OptimizerOptions::default())? {
            let p = p?;
            record(format!("{t} {}", entry.symmetry), &m, &p.point.configuration)?;
        }
        let opts = OptimizerOptions::default().with_mode(SearchMode::Stationary);
        for e in multistart_search(&m, 16, ctx.seed, &opts).entries {
            record(format!("{t} multistart"), &m, &e.point.configuration)?;
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} stationary points: 6 zero modes when nonlinear, 5 when collinear")
        } else {
            bad.join("; ")
        },
    ))
}

fn finite_differences(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(12);
    let (mut worst_g, mut worst_h): (f64, f64) = (0.0, 0.0);
    for t in MoleculeType::ALL {
        for _ in 0..50 {
            let m = random_model(t, &mut r)?;
            let c = random_configuration(m.spec().n_nuclei(), m.length_scale(), &mut r);
            let x = c.stacked();
            let h = 1e-5 * m.length_scale();
            let n = x.len();
            let mut g_fd = DVector::zeros(n);
            let mut h_fd = DMatrix::zeros(n, n);
            for i in 0..n {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                let (cp, cm) = (Configuration::from_stacked(&xp)?, Configuration::from_stacked(&xm)?);
                g_fd[i] = (m.total_potential(&cp)? - m.total_potential(&cm)?) / (2.0 * h);
                h_fd.set_column(i, &((m.gradient(&cp)? - m.gradient(&cm)?) / (2.0 * h)));
            }
            let g = m.gradient(&c)?;
            let hess = m.hessian(&c)?;
            worst_g = worst_g.max((&g_fd - &g).norm() / g.norm());
            worst_h = worst_h.max((&h_fd - &hess).norm() / hess.norm());
        }
    }
    Ok((
        worst_g <= 1e-6 && worst_h <= 1e-6,
        format!("300 configurations: gradient error {worst_g:.2e}, Hessian error {worst_h:.2e} (limit 1e-6)"),
    ))
}

fn random_vector(r: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    ) * scale
}

fn rotate(h: &OrthogonalMatrix3, c: &Configuration) -> molshape::Result<Configuration> {
    Configuration::new(c.positions().iter().map(|p| h.apply(p)).collect())
}

fn mib(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(13);
    let (mut invariance, mut separation): (f64, f64) = (0.0, 0.0);
    let (mut schwartz_violations, mut class_mismatch, mut false_merges) = (0, 0, 0);
    for _ in 0..500 {
        let c = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)])?;
        let m = mib_xy(&c)?;
        let scale = m.theta1.max(m.theta2).max(1.0);
        if !m.satisfies_schwartz(1e-12) {
            schwartz_violations += 1;
        }
        let h = OrthogonalMatrix3::random(&mut r);
        invariance = invariance.max(m.max_deviation(&mib_xy(&rotate(&h, &c)?)?) / scale);

        // rebuild a pair from the invariants alone in a random frame; it
        // must lie on the same orbit
        let (a, b) = (m.theta1.sqrt(), m.theta2.sqrt());
        let cos = (m.theta3 / (a * b)).clamp(-1.0, 1.0);
        let u = random_vector(&mut r, 1.0).normalize();
        let v = random_vector(&mut r, 1.0);
        let v = (v - u * u.dot(&v)).normalize();
        let other = Configuration::new(vec![u * a, (u * cos + v * (1.0 - cos * cos).sqrt()) * b])?;
        let g = align_xy(&c, &other)?;
        separation = separation.max((rotate(&g, &c)?.stacked() - other.stacked()).norm());
        if classify_stratum_xy(&c, 1e-9)? != classify_stratum_xy(&other, 1e-9)? {
            class_mismatch += 1;
        }

        // distinct invariants: no orthogonal map relates the pairs
        let d = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)])?;
        if m.max_deviation(&mib_xy(&d)?) > 1e-6 {
            let g = align_xy(&c, &d)?;
            if (rotate(&g, &c)?.stacked() - d.stacked()).norm() <= 1e-9 {
                false_merges += 1;
            }
        }
    }
    let pass = invariance <= 1e-10
        && separation <= 1e-6
        && schwartz_violations == 0
        && class_mismatch == 0
        && false_merges == 0;
    Ok((
        pass,
        format!(
            "500 pairs: invariance {invariance:.2e} (limit 1e-10), reconstruction {separation:.2e} (limit 1e-6), \
             {schwartz_violations} range violations, {class_mismatch} stratum mismatches, {false_merges} merged orbits"
        ),
    ))
}

fn peripheral_strata(_: &Context) -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for name in ["xy", "x2", "xy2", "x3", "xy3", "x4"] {
        let m = crate::builtin::builtin_spec(name).expect("built-in").model()?;
        let t = MoleculeType::of(m.spec()).expect("catalogued type");
        for (entry, found) in peripheral_stationary_points(&m, &OptimizerOptions::default())? {
            match found {
                Ok(p) if p.detected_symmetry == entry.symmetry => lines.push(format!(
                    "{t} {} {}: {:?}",
                    entry.label, entry.symmetry, p.point.classification
                )),
                Ok(p) => {
                    pass = false;
                    lines.push(format!(
                        "{t} {} {}: found {}",
                        entry.label, entry.symmetry, p.detected_symmetry
                    ));
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("{t} {} {}: {e}", entry.label, entry.symmetry));
                }
            }
        }
    }
    Ok((pass, lines.join("; ")))
}

fn taylor_remainder(ctx: &Context) -> Outcome {
    let mut r = ctx.rng(15);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100 {
        let unit = |r: &mut ChaCha8Rng| loop {
            let v = random_vector(r, 1.0);
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v / n;
            }
        };
        let rho = unit(&mut r) * r.random_range(0.5..2.0);
        let dir = unit(&mut r);
        let remainder = |eps: f64| -> molshape::Result<f64> {
            let d = dir * eps * rho.norm();
            Ok((inverse_norm_difference(&rho, &d) - inverse_norm_correction(&rho, &d)?).abs())
        };
        let ratio = remainder(2e-5)? / remainder(1e-5)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((
        (7.0..=9.0).contains(&lo) && (7.0..=9.0).contains(&hi),
        format!("100 directions: remainder ratio under halving in [{lo:.4}, {hi:.4}] (limit [7, 9])"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select(None).unwrap().len(), 15);
        let s = select(Some(&["4".to_string(), "h2-frequency".to_string()])).unwrap();
        assert_eq!(s.iter().map(|c| c.id).collect::<Vec<_>>(), vec![1, 4]);
        assert!(select(Some(&["eq99".to_string()])).is_err());
        let s = select(Some(&["mib,taylor-remainder".to_string()])).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn criteria_are_numbered_in_order() {
        for (i, c) in CRITERIA.iter().enumerate() {
            assert_eq!(c.id, i + 1);
        }
    }
}
