//! Determining-point detection.
//!
//! An annotated reference symbol carries determining points `(s_i, T_i, K_i)`:
//! an arc-length location, the metric line it defines, and whether it sits at
//! a local minimum or maximum of `y`. On a new sample each point is found as
//! the extremum of the same kind nearest `s_i`, refined by Newton's method on
//! `y'(s) = 0`. The multi-step variant repeats this along the straight line
//! from the class average to the sample in coefficient space.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::SeriesPair;
use crate::catalog::AnnotatedModel;
use crate::error::{Error, Result};
use crate::poly::{sign_changes, LegendreSeries, ROOT_GRID};
use crate::space::{interpolate, SymbolVector};

/// Newton stops when the step falls below this.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_MAX_HALVINGS: usize = 8;
/// Consecutive homotopy locations further apart than this are reported as
/// discontinuities.
pub const JUMP_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineType {
    Baseline,
    #[serde(rename = "xline")]
    XLine,
    Ascender,
    #[serde(rename = "capline")]
    CapLine,
    Descender,
}

impl LineType {
    pub const ALL: [LineType; 5] = [
        LineType::Baseline,
        LineType::XLine,
        LineType::Ascender,
        LineType::CapLine,
        LineType::Descender,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LineType::Baseline => "baseline",
            LineType::XLine => "xline",
            LineType::Ascender => "ascender",
            LineType::CapLine => "capline",
            LineType::Descender => "descender",
        }
    }
}

impl fmt::Display for LineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

impl ExtremumKind {
    /// `+1` for a minimum, `-1` for a maximum: the factor that turns the
    /// search into a minimization.
    fn sign(self) -> f64 {
        match self {
            ExtremumKind::Min => 1.0,
            ExtremumKind::Max => -1.0,
        }
    }
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Min => "min",
            ExtremumKind::Max => "max",
        })
    }
}

/// One annotation on a reference symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminingPointSpec {
    pub s: f64,
    #[serde(rename = "type")]
    pub line_type: LineType,
    pub kind: ExtremumKind,
}

impl DeterminingPointSpec {
    pub fn new(s: f64, line_type: LineType, kind: ExtremumKind) -> Self {
        Self { s, line_type, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub s: f64,
    pub kind: ExtremumKind,
    /// The point is an end of the trace rather than a root of `y'`.
    pub boundary: bool,
}

/// A determining point found on a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocatedPoint {
    pub s: f64,
    #[serde(rename = "type")]
    pub line_type: LineType,
    pub kind: ExtremumKind,
    pub x: f64,
    pub y: f64,
    pub boundary: bool,
    pub failed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub s: f64,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapError {
    #[error("no local {kind} of y on [0, 1]")]
    NotFound {
        kind: ExtremumKind,
        /// Closest critical point of either kind, if any.
        nearest: Option<CriticalPoint>,
    },
    #[error("initial guess {0} outside [0, 1]")]
    Domain(f64),
}

fn is_flat(y: &LegendreSeries) -> bool {
    let scale = 1.0 + y.coeffs().iter().map(|c| c.abs()).sum::<f64>();
    y.coeffs()[1..].iter().all(|c| c.abs() <= 1e-14 * scale)
}

/// Kind of the boundary extremum at `s = 0` (`start`) or `s = 1`.
fn endpoint_kind(y: &LegendreSeries, start: bool) -> Option<ExtremumKind> {
    let jet = y.jet(if start { 0.0 } else { 1.0 });
    // derivatives below rounding level count as zero
    let tol = 1e-10 * y.coeffs().iter().map(|c| c.abs()).sum::<f64>();
    // slope of y when moving from the endpoint into the interval
    let inward = if start { jet.d1 } else { -jet.d1 };
    if inward > tol {
        Some(ExtremumKind::Min)
    } else if inward < -tol {
        Some(ExtremumKind::Max)
    } else if jet.d2 > tol {
        Some(ExtremumKind::Min)
    } else if jet.d2 < -tol {
        Some(ExtremumKind::Max)
    } else {
        None
    }
}

/// Critical points of `y` inside `[lo, hi]`, plus the trace ends when the
/// window reaches them, sorted by `s`.
pub fn critical_points_in(y: &LegendreSeries, lo: f64, hi: f64) -> Vec<CriticalPoint> {
    let lo = lo.clamp(0.0, 1.0);
    let hi = hi.clamp(0.0, 1.0);
    let mut out = Vec::new();
    let flat = is_flat(y);
    let push_end = |s: f64, start: bool, out: &mut Vec<CriticalPoint>| {
        if flat {
            for kind in [ExtremumKind::Min, ExtremumKind::Max] {
                out.push(CriticalPoint { s, kind, boundary: true });
            }
        } else if let Some(kind) = endpoint_kind(y, start) {
            out.push(CriticalPoint { s, kind, boundary: true });
        }
    };
    if lo == 0.0 {
        push_end(0.0, true, &mut out);
    }
    if !flat && hi > lo {
        let cells = (((hi - lo) * ROOT_GRID as f64).ceil() as usize).max(2);
        for root in sign_changes(|s| y.derivative(s), lo, hi, cells) {
            out.push(CriticalPoint {
                s: root.s,
                kind: if root.rising { ExtremumKind::Min } else { ExtremumKind::Max },
                boundary: false,
            });
        }
    }
    if hi == 1.0 && lo < 1.0 {
        push_end(1.0, false, &mut out);
    }
    out.sort_by(|a, b| a.s.total_cmp(&b.s));
    out
}

/// All local extrema of `y(s)` on [0, 1], trace ends included as boundary
/// extrema. A constant `y` yields only the two ends, each of both kinds.
pub fn critical_points(series: &SeriesPair) -> Vec<CriticalPoint> {
    critical_points_in(&series.curve().y, 0.0, 1.0)
}

fn nearest_of_kind(cands: &[CriticalPoint], guess: f64, kind: ExtremumKind) -> Option<CriticalPoint> {
    cands
        .iter()
        .filter(|c| c.kind == kind)
        .min_by(|a, b| {
            let da = (a.s - guess).abs();
            let db = (b.s - guess).abs();
            da.total_cmp(&db).then(a.s.total_cmp(&b.s))
        })
        .copied()
}

fn newton(y: &LegendreSeries, guess: f64, kind: ExtremumKind) -> Option<f64> {
    let sign = kind.sign();
    let slope = |s: f64| sign * y.derivative(s);
    let mut s = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let jet = y.jet(s);
        let (g, h) = (sign * jet.d1, sign * jet.d2);
        if g == 0.0 {
            break;
        }
        if h == 0.0 || !h.is_finite() || !g.is_finite() {
            return None;
        }
        let mut step = -g / h;
        let mut next = (s + step).clamp(0.0, 1.0);
        let mut halvings = 0;
        while slope(next).abs() > g.abs() && halvings < NEWTON_MAX_HALVINGS {
            step *= 0.5;
            next = (s + step).clamp(0.0, 1.0);
            halvings += 1;
        }
        let delta = next - s;
        s = next;
        if delta.abs() < NEWTON_TOL {
            break;
        }
    }
    let jet = y.jet(s);
    let converged = (sign * jet.d1).abs() <= 1e-9 * (1.0 + jet.d2.abs());
    // boundary hits, wrong-kind roots and even-order roots (no sign change
    // of y') go to the enumeration
    let eps = 1e-6;
    let crosses = s - eps > 0.0 && s + eps < 1.0 && slope(s - eps) < 0.0 && slope(s + eps) > 0.0;
    (converged && crosses).then_some(s)
}

/// Snaps `s_guess` to the nearest local extremum of `y` of the given kind.
///
/// Damped Newton from the guess is tried first; its answer is kept when it
/// has the right kind and no matching extremum lies closer to the guess.
/// Otherwise every critical point is enumerated and the nearest matching one
/// wins, ties going to the smaller `s`.
pub fn snap_on(y: &LegendreSeries, s_guess: f64, kind: ExtremumKind) -> std::result::Result<Snap, SnapError> {
    if !(0.0..=1.0).contains(&s_guess) {
        return Err(SnapError::Domain(s_guess));
    }
    if let Some(s) = newton(y, s_guess, kind) {
        let r = (s - s_guess).abs();
        let closer = r > 1e-9
            && critical_points_in(y, s_guess - r, s_guess + r)
                .iter()
                .any(|c| c.kind == kind && (c.s - s_guess).abs() < r - 1e-9);
        if !closer {
            return Ok(Snap { s, boundary: false });
        }
    }
    let all = critical_points_in(y, 0.0, 1.0);
    match nearest_of_kind(&all, s_guess, kind) {
        Some(c) => Ok(Snap {
            s: c.s,
            boundary: c.boundary,
        }),
        None => Err(SnapError::NotFound {
            kind,
            nearest: all
                .iter()
                .min_by(|a, b| (a.s - s_guess).abs().total_cmp(&(b.s - s_guess).abs()))
                .copied(),
        }),
    }
}

pub fn snap_to_extremum(
    series: &SeriesPair,
    s_guess: f64,
    kind: ExtremumKind,
) -> std::result::Result<Snap, SnapError> {
    snap_on(&series.curve().y, s_guess, kind)
}

fn check_reference(reference: &AnnotatedModel, sample: &SymbolVector) -> Result<()> {
    reference.average.ensure_same_basis(sample)?;
    if reference.annotations.iter().any(|a| !(0.0..=1.0).contains(&a.s)) {
        return Err(Error::InvalidModel {
            class_id: reference.class_id.clone(),
            message: "annotation outside [0, 1]".into(),
        });
    }
    Ok(())
}

/// One snap per guess on `vector`; failed snaps keep their guess.
fn snap_all(vector: &SymbolVector, specs: &[DeterminingPointSpec], guesses: &[f64]) -> Vec<Option<Snap>> {
    let y = vector.curve().y;
    specs
        .iter()
        .zip(guesses)
        .map(|(spec, &g)| snap_on(&y, g, spec.kind).ok())
        .collect()
}

fn finish(sample: &SymbolVector, specs: &[DeterminingPointSpec], snaps: &[Option<Snap>], guesses: &[f64]) -> Vec<LocatedPoint> {
    let curve = sample.curve();
    specs
        .iter()
        .zip(snaps.iter().zip(guesses))
        .map(|(spec, (snap, &guess))| {
            let (s, boundary, failed) = match snap {
                Some(sn) => (sn.s, sn.boundary, false),
                None => (guess, false, true),
            };
            let (x, y) = sample.transform.apply(curve.point(s));
            LocatedPoint {
                s,
                line_type: spec.line_type,
                kind: spec.kind,
                x,
                y,
                boundary,
                failed,
            }
        })
        .collect()
}

/// Locates the reference's determining points on `sample` in one step.
pub fn locate_determining_points(reference: &AnnotatedModel, sample: &SymbolVector) -> Result<Vec<LocatedPoint>> {
    check_reference(reference, sample)?;
    let guesses: Vec<f64> = reference.annotations.iter().map(|a| a.s).collect();
    let snaps = snap_all(sample, &reference.annotations, &guesses);
    Ok(finish(sample, &reference.annotations, &snaps, &guesses))
}

/// Follows the determining points along `C(k/m)`, `k = 1..=m`, from the
/// reference average to the sample, each step seeded with the previous
/// step's locations. `steps = 1` is the single-step method.
pub fn locate_multistep(reference: &AnnotatedModel, sample: &SymbolVector, steps: usize) -> Result<Vec<LocatedPoint>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    check_reference(reference, sample)?;
    let specs = &reference.annotations;
    let mut guesses: Vec<f64> = specs.iter().map(|a| a.s).collect();
    let mut snaps = Vec::new();
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let point = if k == steps {
            sample.clone()
        } else {
            interpolate(&reference.average, sample, t)?
        };
        snaps = snap_all(&point, specs, &guesses);
        if k < steps {
            for (g, sn) in guesses.iter_mut().zip(&snaps) {
                if let Some(sn) = sn {
                    *g = sn.s;
                }
            }
        }
    }
    Ok(finish(sample, specs, &snaps, &guesses))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyJump {
    pub point: usize,
    pub t: f64,
    pub from: f64,
    pub to: f64,
}

/// Determining-point locations along a homotopy path.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyTrace {
    pub t: Vec<f64>,
    /// `locations[k][i]`: location of point `i` at `t[k]`.
    pub locations: Vec<Vec<f64>>,
    pub jumps: Vec<HomotopyJump>,
}

/// Tracks every determining point through `steps` equal homotopy steps,
/// recording the path and any discontinuity larger than [`JUMP_THRESHOLD`].
pub fn trace_homotopy(reference: &AnnotatedModel, sample: &SymbolVector, steps: usize) -> Result<HomotopyTrace> {
    if steps == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    check_reference(reference, sample)?;
    let specs = &reference.annotations;
    let mut current: Vec<f64> = specs.iter().map(|a| a.s).collect();
    let mut trace = HomotopyTrace {
        t: vec![0.0],
        locations: vec![current.clone()],
        jumps: Vec::new(),
    };
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let point = interpolate(&reference.average, sample, t)?;
        let snaps = snap_all(&point, specs, &current);
        for (i, sn) in snaps.iter().enumerate() {
            if let Some(sn) = sn {
                if (sn.s - current[i]).abs() > JUMP_THRESHOLD {
                    log::warn!(
                        "class {}: determining point {i} jumps from {:.4} to {:.4} at t = {t:.3}",
                        reference.class_id,
                        current[i],
                        sn.s
                    );
                    trace.jumps.push(HomotopyJump {
                        point: i,
                        t,
                        from: current[i],
                        to: sn.s,
                    });
                }
                current[i] = sn.s;
            }
        }
        trace.t.push(t);
        trace.locations.push(current.clone());
    }
    Ok(trace)
}
