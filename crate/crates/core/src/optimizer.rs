//! Stationary-point search on V.
//!
//! V is invariant under rigid translations and rotations, so its Hessian is
//! singular along the instantaneous rigid-motion generators (3 translations,
//! plus `e_k x (R_j - c)` for the rotations). Steps are computed in the
//! orthogonal complement of those generators, where the Hessian is regular
//! at nondegenerate stationary points.
//!
//! Two search modes share that machinery:
//! * [`SearchMode::Minimum`]: eigendecomposition trust-region Newton on V,
//!   which escapes saddles through the hard-case step.
//! * [`SearchMode::Stationary`]: trust-region Gauss-Newton on `|grad V|^2`,
//!   which converges to whatever stationary point is nearby, saddles included.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{pair_distance_signature, Configuration, PairSignature, Vec3};
use crate::potential::PotentialModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    Minimum,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    /// Gradient-norm tolerance. Absolute in reduced units; multiplied by the
    /// model's force scale in SI.
    pub gradient_tolerance: f64,
    /// Initial trust radius in units of the model length scale.
    pub trust_radius: f64,
    /// Eigenvalues below this fraction of the largest |eigenvalue| are zero
    /// modes.
    pub zero_mode_threshold: f64,
    pub seed: u64,
    pub mode: SearchMode,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-10,
            trust_radius: 0.5,
            zero_mode_threshold: 1e-7,
            seed: 0,
            mode: SearchMode::Minimum,
        }
    }
}

impl OptimizerOptions {
    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn absolute_gradient_tolerance(&self, model: &PotentialModel) -> f64 {
        if model.units().is_si() {
            self.gradient_tolerance * model.force_scale()
        } else {
            self.gradient_tolerance
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianSpectrum {
    pub classification: Classification,
    pub zero_modes: usize,
    /// Geometric zero-mode count: 5 for collinear configurations, else 6.
    pub expected_zero_modes: usize,
    pub negative_modes: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPoint {
    /// Center of mass at the origin.
    #[serde(serialize_with = "serialize_config")]
    pub configuration: Configuration,
    pub value: f64,
    pub gradient_norm: f64,
    pub eigenvalues: Vec<f64>,
    pub zero_modes: usize,
    pub classification: Classification,
    pub signature: PairSignature,
    pub iterations: usize,
}

pub(crate) fn serialize_config<S: serde::Serializer>(c: &Configuration, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.to_arrays().serialize(s)
}

/// Orthonormal basis (columns) of the rigid-motion generators at `config`.
/// Rank 5 for collinear configurations, 6 otherwise (N >= 3 or N = 2).
pub fn rigid_motion_basis(config: &Configuration) -> DMatrix<f64> {
    let n = config.len();
    let c = config.centroid();
    let mut gens: Vec<DVector<f64>> = Vec::with_capacity(6);
    for k in 0..3 {
        gens.push(DVector::from_fn(3 * n, |i, _| if i % 3 == k { 1.0 } else { 0.0 }));
    }
    for k in 0..3 {
        let e = Vec3::ith(k, 1.0);
        let mut v = DVector::zeros(3 * n);
        for (j, p) in config.positions().iter().enumerate() {
            let w = e.cross(&(p - c));
            v.fixed_rows_mut::<3>(3 * j).copy_from(&w);
        }
        gens.push(v);
    }
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(6);
    for g in gens {
        let scale = g.norm();
        if scale == 0.0 {
            continue;
        }
        let mut v = g.clone();
        for _ in 0..2 {
            for b in &basis {
                let d = b.dot(&v);
                v -= b * d;
            }
        }
        let r = v.norm();
        if r > 1e-8 * scale {
            basis.push(v / r);
        }
    }
    DMatrix::from_columns(&basis)
}

/// Orthonormal basis of the complement of the rigid motions.
fn internal_basis(config: &Configuration) -> DMatrix<f64> {
    let q = rigid_motion_basis(config);
    let dim = 3 * config.len();
    let p = DMatrix::identity(dim, dim) - &q * q.transpose();
    let eig = p.symmetric_eigen();
    let cols: Vec<DVector<f64>> = (0..dim)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

fn expected_zero_modes(config: &Configuration) -> usize {
    match config.len() {
        0 => 0,
        1 => 3,
        _ if config.is_collinear(1e-10) => 5,
        _ => 6,
    }
}

/// Classify from the Hessian spectrum at an already-verified stationary point.
pub fn classify_spectrum(hessian: &DMatrix<f64>, config: &Configuration, zero_tol: f64) -> HessianSpectrum {
    let mut eigenvalues: Vec<f64> = hessian.clone().symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_abs = eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let cut = zero_tol * max_abs;
    let zero_modes = eigenvalues.iter().filter(|e| e.abs() <= cut).count();
    let negative = eigenvalues.iter().filter(|&&e| e < -cut).count();
    let positive = eigenvalues.iter().filter(|&&e| e > cut).count();
    let expected = expected_zero_modes(config);
    let classification = if zero_modes > expected {
        Classification::Degenerate
    } else if negative == 0 {
        Classification::Minimum
    } else if positive == 0 {
        Classification::Maximum
    } else {
        Classification::Saddle
    };
    HessianSpectrum {
        classification,
        zero_modes,
        expected_zero_modes: expected,
        negative_modes: negative,
        eigenvalues,
    }
}

/// Minimum iff every non-zero-mode eigenvalue is positive, saddle on mixed
/// signs, degenerate when there are more zero modes than rigid motions.
pub fn classify_stationary_point(
    model: &PotentialModel,
    config: &Configuration,
    zero_tol: f64,
    grad_tol: f64,
) -> Result<HessianSpectrum> {
    let g = model.gradient(config)?.norm();
    if g > grad_tol {
        return Err(Error::NotStationary(g));
    }
    Ok(classify_spectrum(&model.hessian(config)?, config, zero_tol))
}

struct Iterate {
    config: Configuration,
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl Iterate {
    fn at(model: &PotentialModel, config: Configuration) -> Result<Self> {
        let e = model.evaluate(&config)?;
        Ok(Iterate {
            config,
            value: e.value,
            gradient: e.gradient,
            hessian: e.hessian,
        })
    }

    fn merit(&self, mode: SearchMode) -> f64 {
        match mode {
            SearchMode::Minimum => self.value,
            SearchMode::Stationary => 0.5 * self.gradient.norm_squared(),
        }
    }
}

/// Step in the reduced eigenbasis and its predicted merit decrease.
fn trust_region_step(lambda: &[f64], gamma: &[f64], radius: f64, mode: SearchMode) -> (Vec<f64>, f64) {
    let m = lambda.len();
    let step_for = |mu: f64| -> Vec<f64> {
        (0..m)
            .map(|i| match mode {
                SearchMode::Minimum => -gamma[i] / (lambda[i] + mu),
                SearchMode::Stationary => -lambda[i] * gamma[i] / (lambda[i] * lambda[i] + mu),
            })
            .collect()
    };
    let norm = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let max_abs = lambda
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tiny = 1e-14 * max_abs;

    let step = match mode {
        SearchMode::Minimum => {
            let lmin = lambda.iter().copied().fold(f64::INFINITY, f64::min);
            let floor = (-lmin).max(0.0);
            if lmin > tiny && norm(&step_for(0.0)) <= radius {
                step_for(0.0)
            } else {
                // hard case: no step on the secular curve reaches the boundary
                let near = step_for(floor + 1e-12 * max_abs);
                if norm(&near) < radius && lmin <= tiny {
                    let mut s: Vec<f64> = (0..m)
                        .map(|i| {
                            let d = lambda[i] - lmin;
                            if d > 1e-10 * max_abs {
                                -gamma[i] / d
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    let imin = (0..m)
                        .min_by(|&a, &b| lambda[a].partial_cmp(&lambda[b]).unwrap())
                        .unwrap();
                    let rest = norm(&s);
                    let tau = (radius * radius - rest * rest).max(0.0).sqrt();
                    let sign = if gamma[imin] > 0.0 { -1.0 } else { 1.0 };
                    s[imin] += sign * tau;
                    s
                } else {
                    let mut lo = floor + 1e-12 * max_abs;
                    let mut hi = floor + max_abs + norm(gamma) / radius;
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if norm(&step_for(mid)) > radius {
                            lo = mid
                        } else {
                            hi = mid
                        }
                    }
                    step_for(hi)
                }
            }
        }
        SearchMode::Stationary => {
            let newton: Vec<f64> = (0..m)
                .map(|i| {
                    if lambda[i].abs() > tiny {
                        -gamma[i] / lambda[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            if norm(&newton) <= radius {
                newton
            } else {
                let mut lo = 0.0;
                let mut hi = max_abs * max_abs + max_abs * norm(gamma) / radius;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if norm(&step_for(mid)) > radius {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                step_for(hi)
            }
        }
    };
    let predicted = match mode {
        SearchMode::Minimum => -(0..m)
            .map(|i| gamma[i] * step[i] + 0.5 * lambda[i] * step[i] * step[i])
            .sum::<f64>(),
        SearchMode::Stationary => (0..m)
            .map(|i| {
                let r = gamma[i] + lambda[i] * step[i];
                0.5 * (gamma[i] * gamma[i] - r * r)
            })
            .sum::<f64>(),
    };
    (step, predicted)
}

fn displaced(config: &Configuration, step: &DVector<f64>) -> Result<Configuration> {
    Configuration::from_stacked(&(config.stacked() + step))
}

/// Steepest descent on the merit with Armijo backtracking.
fn descent_fallback(model: &PotentialModel, it: &Iterate, mode: SearchMode, length: f64) -> Option<Iterate> {
    let dir = match mode {
        SearchMode::Minimum => -it.gradient.clone(),
        SearchMode::Stationary => -(&it.hessian * &it.gradient),
    };
    let slope = match mode {
        SearchMode::Minimum => -it.gradient.norm_squared(),
        SearchMode::Stationary => -dir.norm_squared(),
    };
    let dn = dir.norm();
    if dn == 0.0 {
        return None;
    }
    let f0 = it.merit(mode);
    let mut t = 0.1 * length / dn;
    for _ in 0..60 {
        if let Ok(c) = displaced(&it.config, &(&dir * t)) {
            if let Ok(next) = Iterate::at(model, c) {
                if next.merit(mode) <= f0 + 1e-4 * t * slope && next.merit(mode) < f0 {
                    return Some(next);
                }
            }
        }
        t *= 0.5;
    }
    None
}

fn finish(model: &PotentialModel, it: Iterate, opts: &OptimizerOptions, iterations: usize) -> Result<StationaryPoint> {
    let config = it.config.centered(model.spec());
    let gradient = model.gradient(&config)?;
    let hessian = model.hessian(&config)?;
    let spectrum = classify_spectrum(&hessian, &config, opts.zero_mode_threshold);
    Ok(StationaryPoint {
        signature: pair_distance_signature(model.spec(), &config)?,
        value: model.total_potential(&config)?,
        gradient_norm: gradient.norm(),
        eigenvalues: spectrum.eigenvalues,
        zero_modes: spectrum.zero_modes,
        classification: spectrum.classification,
        configuration: config,
        iterations,
    })
}

pub fn find_stationary_point(
    model: &PotentialModel,
    init: &Configuration,
    opts: &OptimizerOptions,
) -> Result<StationaryPoint> {
    let length = model.length_scale();
    let tol = opts.absolute_gradient_tolerance(model);
    let mode = opts.mode;
    let mut it = Iterate::at(model, init.clone())?;
    let mut radius = opts.trust_radius * length;
    let max_radius = 4.0 * length;
    let min_radius = 1e-14 * length;

    for iter in 0..opts.max_iterations {
        if it.gradient.norm() <= tol {
            return finish(model, it, opts, iter);
        }
        let u = internal_basis(&it.config);
        let hr = u.transpose() * &it.hessian * &u;
        let gr = u.transpose() * &it.gradient;
        let eig = hr.symmetric_eigen();
        let lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let gamma: Vec<f64> = (eig.eigenvectors.transpose() * &gr).iter().copied().collect();

        let (coeffs, predicted) = trust_region_step(&lambda, &gamma, radius, mode);
        let step = &u * (&eig.eigenvectors * DVector::from_vec(coeffs));
        let step_norm = step.norm();

        let candidate = displaced(&it.config, &step).and_then(|c| Iterate::at(model, c));
        let accepted = match candidate {
            Ok(next) => {
                let actual = it.merit(mode) - next.merit(mode);
                let ratio = if predicted > 0.0 { actual / predicted } else { -1.0 };
                // near convergence the merit change drowns in rounding
                let converging = next.gradient.norm() < it.gradient.norm()
                    && predicted.abs() < 1e-12 * it.merit(mode).abs().max(1.0);
                if ratio < 0.25 {
                    radius = 0.25 * step_norm.min(radius);
                } else if ratio > 0.75 && step_norm > 0.99 * radius {
                    radius = (2.0 * radius).min(max_radius);
                }
                if (ratio > 0.1 && actual > 0.0) || converging {
                    it = next;
                    true
                } else {
                    false
                }
            }
            Err(_) => {
                radius = 0.25 * step_norm.min(radius);
                false
            }
        };
        if !accepted && radius < min_radius {
            match descent_fallback(model, &it, mode, length) {
                Some(next) => {
                    it = next;
                    radius = opts.trust_radius * length;
                }
                None => {
                    if it.config.min_pair_distance() < 1e-6 * length {
                        return Err(Error::DegeneratePath);
                    }
                    return Err(Error::NotConverged {
                        iterations: iter + 1,
                        gradient_norm: it.gradient.norm(),
                        last: it.config.to_arrays(),
                    });
                }
            }
        }
    }
    if it.gradient.norm() <= tol {
        let n = opts.max_iterations;
        return finish(model, it, opts, n);
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        gradient_norm: it.gradient.norm(),
        last: it.config.to_arrays(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub point: StationaryPoint,
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedStart {
    pub start: usize,
    pub error: String,
}

/// Distinct stationary points, sorted by V, with the number of starts that
/// reached each.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct StationaryCatalog {
    pub entries: Vec<CatalogEntry>,
    pub failures: Vec<FailedStart>,
}

pub const CATALOG_TOLERANCE: f64 = 1e-5;

impl StationaryCatalog {
    pub fn insert(&mut self, point: StationaryPoint) {
        self.merge_entry(CatalogEntry { point, hits: 1 });
    }

    fn merge_entry(&mut self, entry: CatalogEntry) {
        if let Some(e) = self
            .entries
            .iter_mut()
            .find(|e| e.point.signature.matches(&entry.point.signature, CATALOG_TOLERANCE))
        {
            e.hits += entry.hits;
            // keep the best-converged representative
            if entry.point.gradient_norm < e.point.gradient_norm {
                e.point = entry.point;
            }
        } else {
            self.entries.push(entry);
        }
        self.entries.sort_by(|a, b| {
            a.point
                .value
                .partial_cmp(&b.point.value)
                .unwrap()
                .then_with(|| cmp_signature(&a.point.signature, &b.point.signature))
        });
    }

    /// Order-independent union.
    pub fn merge(mut self, other: StationaryCatalog) -> StationaryCatalog {
        for e in other.entries {
            self.merge_entry(e);
        }
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|f| f.start);
        self
    }

    pub fn minima(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries
            .iter()
            .filter(|e| e.point.classification == Classification::Minimum)
    }
}

fn cmp_signature(a: &PairSignature, b: &PairSignature) -> std::cmp::Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        let o = x.0.cmp(&y.0).then(x.1.partial_cmp(&y.1).unwrap());
        if o.is_ne() {
            return o;
        }
    }
    a.0.len().cmp(&b.0.len())
}

/// Uniform random start: every nucleus independently uniform in a ball of
/// the given radius.
pub fn random_start<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Configuration {
    let pts = (0..n)
        .map(|_| loop {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm_squared() <= 1.0 {
                break v * radius;
            }
        })
        .collect();
    Configuration::new(pts).expect("finite start")
}

/// Independent searches from `n_starts` random starts in a ball of radius
/// 3x the model length scale. Deterministic in `seed`.
pub fn multistart_search(
    model: &PotentialModel,
    n_starts: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> StationaryCatalog {
    let radius = 3.0 * model.length_scale();
    let n = model.spec().n_nuclei();
    let results: Vec<(usize, Result<StationaryPoint>)> = (0..n_starts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let start = random_start(n, radius, &mut rng);
            (i, find_stationary_point(model, &start, opts))
        })
        .collect();
    let mut catalog = StationaryCatalog::default();
    for (i, r) in results {
        match r {
            Ok(p) => catalog.insert(p),
            Err(e) => catalog.failures.push(FailedStart {
                start: i,
                error: e.to_string(),
            }),
        }
    }
    catalog
}
