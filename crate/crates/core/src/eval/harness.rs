//! Synthetic benchmark for the multi-step locator.
//!
//! Samples are class averages plus Gaussian coefficient noise. A fraction of
//! them is first reparameterized by `v(u) = u - d u (1 - u)`, which keeps the
//! shape but slides one annotated extremum along the curve by up to
//! `max_shift`. A single snap from the average's location can then land on
//! a different feature.
//!
//! The expected location of every determining point on a sample is found by
//! following the point on a dense grid along the straight line from the
//! average to the sample in many small steps. This uses only grid
//! comparisons, no Newton iteration or root enumeration. Samples on which a
//! determining point vanishes along that line are redrawn.

use std::fmt::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::project;
use crate::catalog::AnnotatedModel;
use crate::detect::{locate_multistep, DeterminingPointSpec, ExtremumKind, LocatedPoint};
use crate::error::{Error, Result};
use crate::ink::{ParameterizedTrace, TracePoint};
use crate::metrics::y_extent;
use crate::space::{normalize, SymbolVector, Transform};

/// Grid size of the dense-sampling oracle.
pub const ORACLE_GRID: usize = 10_000;
/// Arc-length tolerance of the mis-position rule.
pub const POSITION_TOLERANCE: f64 = 0.05;
/// Height tolerance of the mis-position rule, as a fraction of symbol height.
pub const HEIGHT_TOLERANCE: f64 = 0.05;
/// Steps of the dense continuation that defines expected locations.
pub const FOLLOW_STEPS: usize = 100;
/// Half-width, in grid cells, of the continuation search window.
const FOLLOW_WINDOW: usize = 150;
/// Step counts of the error-rate table.
pub const BENCHMARK_STEPS: [usize; 8] = [1, 2, 3, 4, 6, 8, 10, 20];
/// Samples per class and noise level of the standard benchmark.
pub const BENCHMARK_SAMPLES: usize = 200;
pub const BENCHMARK_NOISE: f64 = 0.03;
/// Points used to resample a warped average.
const WARP_SAMPLES: usize = 401;
/// Largest `|d|` of a warp; `v` stays increasing for `|d| < 1`.
const MAX_WARP: f64 = 0.9;
/// Draws per sample before giving up on a targeted perturbation.
const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// Standard deviation of the noise added to each coefficient.
    pub noise: f64,
    pub seed: u64,
    /// Probability that a sample also gets a targeted shift. Only applied
    /// when `noise > 0`, so noise-free classes are exact copies.
    pub targeted_rate: f64,
    /// Range of the arc-length shift of the targeted extremum.
    pub min_shift: f64,
    pub max_shift: f64,
}

impl PerturbationSpec {
    pub fn new(noise: f64, seed: u64) -> Self {
        Self {
            noise,
            seed,
            targeted_rate: 0.1,
            min_shift: 0.08,
            max_shift: 0.15,
        }
    }
}

/// The warp `v(u) = u - d u (1 - u)` of a targeted sample, chosen so the
/// annotated extremum moves from `s` to `s + shift` before noise is added.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetedWarp {
    /// Index of the annotation that is targeted.
    pub point: usize,
    pub d: f64,
    pub shift: f64,
}

impl TargetedWarp {
    fn apply(&self, u: f64) -> f64 {
        u - self.d * u * (1.0 - u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub vector: SymbolVector,
    /// Where each annotated extremum is expected on this sample.
    pub expected: Vec<f64>,
    pub targeted: Option<TargetedWarp>,
    pub seed: u64,
}

impl SyntheticSample {
    /// Euclidean distance between this sample's normalized coefficients
    /// and those of `average`.
    pub fn distance_to(&self, average: &SymbolVector) -> f64 {
        self.vector
            .coeffs()
            .iter()
            .zip(average.coeffs())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticClass {
    pub base: AnnotatedModel,
    pub samples: Vec<SyntheticSample>,
    pub spec: PerturbationSpec,
}

/// Coefficients of the average resampled along the warp, in normalized
/// coordinates.
fn warped_coeffs(average: &SymbolVector, warp: &TargetedWarp) -> Result<Vec<f64>> {
    let curve = average.curve();
    let points = (0..WARP_SAMPLES)
        .map(|k| {
            let u = if k == WARP_SAMPLES - 1 {
                1.0
            } else {
                k as f64 / (WARP_SAMPLES - 1) as f64
            };
            let (x, y) = curve.point(warp.apply(u));
            TracePoint { s: u, x, y }
        })
        .collect();
    let series = project(&ParameterizedTrace::new(points, 1.0)?, average.basis());
    let mut coeffs = series.x_coeffs().to_vec();
    coeffs.extend_from_slice(series.y_coeffs());
    Ok(coeffs)
}

/// Picks an interior annotation and a warp that moves it.
fn aim_warp<R: Rng>(rng: &mut R, base: &AnnotatedModel, spec: &PerturbationSpec) -> Option<TargetedWarp> {
    let interior: Vec<usize> = (0..base.annotations.len())
        .filter(|&i| {
            let s = base.annotations[i].s;
            s > 0.0 && s < 1.0
        })
        .collect();
    if interior.is_empty() {
        return None;
    }
    let point = interior[rng.random_range(0..interior.len())];
    let s = base.annotations[point].s;
    let magnitude = rng.random_range(spec.min_shift..=spec.max_shift);
    let first = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    [first, -first].into_iter().find_map(|sign| {
        // v(target) = s
        let target = s + sign * magnitude;
        let d = (target - s) / (target * (1.0 - target));
        (target > 0.0 && target < 1.0 && d.abs() < MAX_WARP).then_some(TargetedWarp {
            point,
            d,
            shift: sign * magnitude,
        })
    })
}

/// Page placement of a normalized sample at the average's position.
fn finish(base: &AnnotatedModel, coeffs: Vec<f64>) -> Result<SymbolVector> {
    let avg = &base.average;
    let raw = SymbolVector::from_parts(Arc::clone(avg.basis()), coeffs, Transform::IDENTITY, None)?;
    let mut vector = normalize(&raw.denormalize())?;
    let (t, b) = (vector.transform, avg.transform);
    vector.transform = Transform {
        tx: b.tx + b.scale * t.tx,
        ty: b.ty + b.scale * t.ty,
        scale: b.scale * t.scale,
    };
    vector.class_label = Some(base.class_id.clone());
    Ok(vector)
}

fn make_sample(base: &AnnotatedModel, spec: &PerturbationSpec, seed: u64) -> Result<SyntheticSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let avg = &base.average;
    let normal = Normal::new(0.0, spec.noise.max(f64::MIN_POSITIVE)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let want_target = spec.noise > 0.0 && rng.random_bool(spec.targeted_rate);

    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let targeted = if want_target { aim_warp(&mut rng, base, spec) } else { None };
        let mut coeffs = match &targeted {
            Some(w) => warped_coeffs(avg, w)?,
            None => avg.coeffs().to_vec(),
        };
        if spec.noise > 0.0 {
            for c in &mut coeffs {
                *c += normal.sample(&mut rng);
            }
        }
        let vector = finish(base, coeffs)?;
        match follow_extrema(avg, &vector, &base.annotations, FOLLOW_STEPS) {
            Some(expected) => {
                return Ok(SyntheticSample {
                    vector,
                    expected,
                    targeted,
                    seed,
                });
            }
            None => last = Some(vector),
        }
    }
    Err(Error::InvalidArgument(format!(
        "class {}: no usable sample after {MAX_ATTEMPTS} draws (seed {seed}, last norm {:?})",
        base.class_id,
        last.map(|v| v.transform.scale)
    )))
}

/// Draws `n` samples around `base.average`. Sample seeds come from a
/// generator seeded with `spec.seed`, so the set is reproducible.
pub fn generate_with(base: &AnnotatedModel, n: usize, spec: &PerturbationSpec) -> Result<SyntheticClass> {
    if !(spec.noise >= 0.0) || !(0.0..=1.0).contains(&spec.targeted_rate) {
        return Err(Error::InvalidArgument(format!("invalid perturbation {spec:?}")));
    }
    let mut seeds = ChaCha8Rng::seed_from_u64(spec.seed);
    let seeds: Vec<u64> = (0..n).map(|_| seeds.random()).collect();
    let samples = seeds
        .par_iter()
        .map(|&seed| make_sample(base, spec, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticClass {
        base: base.clone(),
        samples,
        spec: *spec,
    })
}

pub fn generate_synthetic_class(base: &AnnotatedModel, n: usize, noise: f64, seed: u64) -> Result<SyntheticClass> {
    generate_with(base, n, &PerturbationSpec::new(noise, seed))
}

/// One synthetic class per model, with class seeds drawn from `seed`.
pub fn generate_benchmark(models: &[AnnotatedModel], n: usize, noise: f64, seed: u64) -> Result<Vec<SyntheticClass>> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    models
        .iter()
        .map(|m| generate_synthetic_class(m, n, noise, seeds.random()))
        .collect()
}

/// Grid indices of the discrete local extrema of `kind` among `vals`
/// (already multiplied by the kind's sign, so extrema are minima) inside
/// `lo..=hi`. Grid ends count when the values move away from them.
fn grid_minima(vals: &dyn Fn(usize) -> f64, lo: usize, hi: usize, grid: usize) -> Vec<usize> {
    (lo..=hi)
        .filter(|&k| {
            let v = vals(k);
            (k == 0 || v < vals(k - 1)) && (k == grid || v <= vals(k + 1))
        })
        .collect()
}

fn kind_sign(kind: ExtremumKind) -> f64 {
    match kind {
        ExtremumKind::Min => 1.0,
        ExtremumKind::Max => -1.0,
    }
}

/// Follows each annotated extremum from `start` to `end` along
/// `(1 - t) start + t end` in `steps` equal steps, searching a small window
/// of the oracle grid around the previous location. `None` when a point
/// has no extremum of its kind in the window at some step.
pub fn follow_extrema(start: &SymbolVector, end: &SymbolVector, specs: &[DeterminingPointSpec], steps: usize) -> Option<Vec<f64>> {
    let grid = ORACLE_GRID;
    let (y0, y1) = (start.curve().y, end.curve().y);
    let v0: Vec<f64> = (0..=grid).map(|k| y0.value(k as f64 / grid as f64)).collect();
    let v1: Vec<f64> = (0..=grid).map(|k| y1.value(k as f64 / grid as f64)).collect();
    let mut pos: Vec<usize> = specs.iter().map(|a| (a.s * grid as f64).round() as usize).collect();
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        for (p, spec) in pos.iter_mut().zip(specs) {
            let sign = kind_sign(spec.kind);
            let vals = |i: usize| sign * ((1.0 - t) * v0[i] + t * v1[i]);
            let lo = p.saturating_sub(FOLLOW_WINDOW);
            let hi = (*p + FOLLOW_WINDOW).min(grid);
            let found = grid_minima(&vals, lo, hi, grid);
            *p = *found.iter().min_by_key(|&&i| i.abs_diff(*p))?;
        }
    }
    Some(pos.iter().map(|&p| p as f64 / grid as f64).collect())
}

/// A local extremum of the sampled `y` on the oracle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleExtremum {
    pub s: f64,
    pub y: f64,
}

/// Discrete local extrema of `y` of the given kind on an even grid, ends
/// included when `y` moves away from them in the right direction.
pub fn dense_extrema(y: impl Fn(f64) -> f64, kind: ExtremumKind, grid: usize) -> Vec<OracleExtremum> {
    let sign = kind_sign(kind);
    let vals: Vec<f64> = (0..=grid).map(|k| sign * y(k as f64 / grid as f64)).collect();
    grid_minima(&|k| vals[k], 0, grid, grid)
        .into_iter()
        .map(|k| OracleExtremum {
            s: k as f64 / grid as f64,
            y: sign * vals[k],
        })
        .collect()
}

/// The matching-kind grid extremum nearest to `expected`.
pub fn oracle_location(sample: &SymbolVector, expected: f64, kind: ExtremumKind) -> Option<OracleExtremum> {
    let y = sample.curve().y;
    dense_extrema(|s| y.value(s), kind, ORACLE_GRID)
        .into_iter()
        .min_by(|a, b| (a.s - expected).abs().total_cmp(&(b.s - expected).abs()))
}

/// Applies the mis-position rule to one located point against its oracle.
/// Heights are compared in page units.
pub fn is_mispositioned(sample: &SymbolVector, found: &LocatedPoint, oracle: Option<OracleExtremum>) -> bool {
    let Some(o) = oracle else {
        return true;
    };
    if found.failed {
        return true;
    }
    let (lo, hi) = y_extent(sample);
    let oracle_y = sample.transform.ty + sample.transform.scale * o.y;
    (found.s - o.s).abs() > POSITION_TOLERANCE || (found.y - oracle_y).abs() > HEIGHT_TOLERANCE * (hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDiagnostic {
    pub steps: usize,
    pub class_id: String,
    pub sample: usize,
    pub sample_seed: u64,
    pub point: usize,
    pub found: f64,
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub steps: Vec<usize>,
    pub failed_counts: Vec<usize>,
    pub error_rates: Vec<f64>,
    pub sample_total: usize,
    pub failures: Vec<FailureDiagnostic>,
}

impl ErrorTable {
    /// Aligned text table with one column per step count.
    pub fn to_text(&self) -> String {
        let mut rows = [
            vec!["Steps".to_string()],
            vec!["Failed samples".to_string()],
            vec!["Error rate".to_string()],
        ];
        for ((s, f), r) in self.steps.iter().zip(&self.failed_counts).zip(&self.error_rates) {
            rows[0].push(s.to_string());
            rows[1].push(f.to_string());
            rows[2].push(format!("{:.2}%", 100.0 * r));
        }
        let cols = rows[0].len();
        let widths: Vec<usize> = (0..cols).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (v, w))| if c == 0 { format!("{v:<w$}") } else { format!("{v:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  "));
        }
        let _ = writeln!(out, "{} samples", self.sample_total);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("steps,failed,total,rate\n");
        for ((s, f), r) in self.steps.iter().zip(&self.failed_counts).zip(&self.error_rates) {
            let _ = writeln!(out, "{s},{f},{},{r}", self.sample_total);
        }
        out
    }

    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("steps,class,sample,sample_seed,point,found,oracle\n");
        for d in &self.failures {
            let oracle = d.oracle.map(|o| o.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                d.steps, d.class_id, d.sample, d.sample_seed, d.point, d.found, oracle
            );
        }
        out
    }
}

/// Mis-positioned points of one sample for each step count.
fn judge_sample(base: &AnnotatedModel, sample: &SyntheticSample, steps_list: &[usize]) -> Result<Vec<Vec<(usize, f64, Option<f64>)>>> {
    let oracles: Vec<Option<OracleExtremum>> = base
        .annotations
        .iter()
        .zip(&sample.expected)
        .map(|(a, &e)| oracle_location(&sample.vector, e, a.kind))
        .collect();
    steps_list
        .iter()
        .map(|&m| {
            let located = locate_multistep(base, &sample.vector, m)?;
            Ok(located
                .iter()
                .zip(&oracles)
                .enumerate()
                .filter(|(_, (p, o))| is_mispositioned(&sample.vector, p, **o))
                .map(|(i, (p, o))| (i, p.s, o.map(|o| o.s)))
                .collect())
        })
        .collect()
}

/// Runs the multi-step locator on every sample for every step count. A
/// sample fails at a step count if any of its points is mis-positioned.
pub fn run_evaluation(classes: &[SyntheticClass], steps_list: &[usize]) -> Result<ErrorTable> {
    if classes.is_empty() {
        return Err(Error::Empty("class list"));
    }
    if steps_list.contains(&0) {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize)> = classes
        .iter()
        .enumerate()
        .flat_map(|(c, cls)| (0..cls.samples.len()).map(move |i| (c, i)))
        .collect();
    // collect() keeps job order, so the result does not depend on scheduling
    let judged: Vec<Vec<Vec<(usize, f64, Option<f64>)>>> = jobs
        .par_iter()
        .map(|&(c, i)| judge_sample(&classes[c].base, &classes[c].samples[i], steps_list))
        .collect::<Result<_>>()?;

    let total = jobs.len();
    let mut table = ErrorTable {
        steps: steps_list.to_vec(),
        failed_counts: vec![0; steps_list.len()],
        error_rates: Vec::new(),
        sample_total: total,
        failures: Vec::new(),
    };
    for (k, &m) in steps_list.iter().enumerate() {
        for (&(c, i), per_step) in jobs.iter().zip(&judged) {
            let bad = &per_step[k];
            if bad.is_empty() {
                continue;
            }
            table.failed_counts[k] += 1;
            for &(point, found, oracle) in bad {
                table.failures.push(FailureDiagnostic {
                    steps: m,
                    class_id: classes[c].base.class_id.clone(),
                    sample: i,
                    sample_seed: classes[c].samples[i].seed,
                    point,
                    found,
                    oracle,
                });
            }
        }
    }
    table.error_rates = table
        .failed_counts
        .iter()
        .map(|&f| f as f64 / total.max(1) as f64)
        .collect();
    Ok(table)
}
