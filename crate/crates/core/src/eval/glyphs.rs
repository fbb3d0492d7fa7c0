//! A small library of synthetic handwritten glyphs with annotated
//! determining points, and random smooth loops.
//!
//! Glyphs are drawn in units where the baseline is at 0, the x line at 1,
//! the cap line at 1.5, the ascender line at 1.7 and the descender line at
//! -0.7. Each stroke is a centripetal Catmull-Rom spline through its control
//! points.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;

use crate::basis::LSBasis;
use crate::catalog::AnnotatedModel;
use crate::detect::{snap_on, DeterminingPointSpec, ExtremumKind, LineType};
use crate::error::{Error, Result};
use crate::ink::{InkSymbol, Point};
use crate::space::vectorize;

use ExtremumKind::{Max, Min};
use LineType::{Ascender, Baseline, CapLine, Descender, XLine};

pub const BASELINE: f64 = 0.0;
pub const X_LINE: f64 = 1.0;
pub const CAP_LINE: f64 = 1.5;
pub const ASCENDER_LINE: f64 = 1.7;
pub const DESCENDER_LINE: f64 = -0.7;

/// Spline samples per control-point interval.
pub const SAMPLES_PER_SEGMENT: usize = 16;

/// An annotation given by a point near the feature on the drawn glyph.
#[derive(Debug, Clone, Copy)]
pub struct Anchor {
    pub near: (f64, f64),
    pub line_type: LineType,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, Copy)]
pub struct Glyph {
    pub name: &'static str,
    pub strokes: &'static [&'static [(f64, f64)]],
    pub anchors: &'static [Anchor],
}

const fn a(x: f64, y: f64, line_type: LineType, kind: ExtremumKind) -> Anchor {
    Anchor {
        near: (x, y),
        line_type,
        kind,
    }
}

pub const GLYPHS: &[Glyph] = &[
    Glyph {
        name: "n",
        strokes: &[&[
            (0.0, 1.0),
            (0.0, 0.5),
            (0.0, 0.0),
            (0.03, 0.5),
            (0.15, 0.88),
            (0.35, 1.0),
            (0.55, 0.85),
            (0.6, 0.4),
            (0.62, 0.0),
        ]],
        anchors: &[a(0.0, 0.0, Baseline, Min), a(0.35, 1.0, XLine, Max), a(0.62, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "m",
        strokes: &[&[
            (0.0, 1.0),
            (0.0, 0.5),
            (0.0, 0.0),
            (0.03, 0.5),
            (0.12, 0.88),
            (0.27, 1.0),
            (0.42, 0.85),
            (0.45, 0.4),
            (0.46, 0.0),
            (0.48, 0.5),
            (0.58, 0.88),
            (0.73, 1.0),
            (0.88, 0.85),
            (0.91, 0.4),
            (0.93, 0.0),
        ]],
        anchors: &[
            a(0.0, 0.0, Baseline, Min),
            a(0.27, 1.0, XLine, Max),
            a(0.46, 0.0, Baseline, Min),
            a(0.73, 1.0, XLine, Max),
            a(0.93, 0.0, Baseline, Min),
        ],
    },
    Glyph {
        name: "u",
        strokes: &[&[
            (0.0, 1.0),
            (0.02, 0.4),
            (0.12, 0.08),
            (0.3, 0.0),
            (0.48, 0.12),
            (0.58, 0.5),
            (0.6, 1.0),
            (0.6, 0.5),
            (0.63, 0.08),
            (0.72, 0.0),
        ]],
        anchors: &[a(0.3, 0.0, Baseline, Min), a(0.6, 1.0, XLine, Max), a(0.72, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "h",
        strokes: &[&[
            (0.0, 1.7),
            (0.0, 0.8),
            (0.0, 0.0),
            (0.03, 0.5),
            (0.15, 0.88),
            (0.35, 1.0),
            (0.55, 0.85),
            (0.6, 0.4),
            (0.62, 0.0),
        ]],
        anchors: &[
            a(0.0, 1.7, Ascender, Max),
            a(0.0, 0.0, Baseline, Min),
            a(0.35, 1.0, XLine, Max),
            a(0.62, 0.0, Baseline, Min),
        ],
    },
    Glyph {
        name: "o",
        strokes: &[&[
            (0.5, 0.92),
            (0.3, 1.0),
            (0.08, 0.82),
            (0.0, 0.5),
            (0.08, 0.16),
            (0.3, 0.0),
            (0.52, 0.16),
            (0.6, 0.5),
            (0.52, 0.84),
            (0.34, 0.98),
        ]],
        anchors: &[a(0.3, 1.0, XLine, Max), a(0.3, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "a",
        strokes: &[&[
            (0.55, 0.82),
            (0.33, 1.0),
            (0.1, 0.82),
            (0.02, 0.45),
            (0.15, 0.06),
            (0.33, 0.0),
            (0.5, 0.22),
            (0.57, 0.62),
            (0.6, 1.0),
            (0.6, 0.5),
            (0.64, 0.1),
            (0.75, 0.0),
        ]],
        anchors: &[
            a(0.33, 1.0, XLine, Max),
            a(0.33, 0.0, Baseline, Min),
            a(0.6, 1.0, XLine, Max),
            a(0.75, 0.0, Baseline, Min),
        ],
    },
    Glyph {
        name: "e",
        strokes: &[&[
            (0.05, 0.5),
            (0.55, 0.58),
            (0.5, 0.86),
            (0.3, 1.0),
            (0.08, 0.85),
            (0.0, 0.45),
            (0.12, 0.1),
            (0.33, 0.0),
            (0.55, 0.14),
        ]],
        anchors: &[a(0.3, 1.0, XLine, Max), a(0.33, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "p",
        strokes: &[&[
            (0.0, 1.0),
            (0.0, 0.2),
            (0.0, -0.7),
            (0.02, 0.2),
            (0.08, 0.78),
            (0.3, 1.0),
            (0.54, 0.82),
            (0.6, 0.45),
            (0.46, 0.08),
            (0.24, 0.0),
            (0.04, 0.2),
        ]],
        anchors: &[
            a(0.0, -0.7, Descender, Min),
            a(0.3, 1.0, XLine, Max),
            a(0.24, 0.0, Baseline, Min),
        ],
    },
    Glyph {
        name: "q",
        strokes: &[&[
            (0.55, 0.8),
            (0.3, 1.0),
            (0.06, 0.82),
            (0.0, 0.45),
            (0.14, 0.06),
            (0.36, 0.0),
            (0.56, 0.3),
            (0.6, 1.0),
            (0.6, 0.2),
            (0.6, -0.7),
        ]],
        anchors: &[
            a(0.3, 1.0, XLine, Max),
            a(0.36, 0.0, Baseline, Min),
            a(0.6, 1.0, XLine, Max),
            a(0.6, -0.7, Descender, Min),
        ],
    },
    Glyph {
        name: "9",
        strokes: &[&[
            (0.55, 1.25),
            (0.3, 1.5),
            (0.05, 1.32),
            (0.04, 0.98),
            (0.28, 0.82),
            (0.52, 0.98),
            (0.6, 1.5),
            (0.56, 0.7),
            (0.46, 0.12),
            (0.26, 0.0),
            (0.06, 0.14),
        ]],
        anchors: &[
            a(0.3, 1.5, CapLine, Max),
            a(0.6, 1.5, CapLine, Max),
            a(0.26, 0.0, Baseline, Min),
        ],
    },
    Glyph {
        name: "P",
        strokes: &[&[
            (0.0, 0.0),
            (0.0, 0.75),
            (0.02, 1.4),
            (0.2, 1.5),
            (0.48, 1.38),
            (0.55, 1.1),
            (0.32, 0.82),
            (0.04, 0.8),
        ]],
        anchors: &[a(0.0, 0.0, Baseline, Min), a(0.2, 1.5, CapLine, Max)],
    },
    Glyph {
        name: "l",
        strokes: &[&[(0.0, 1.7), (0.0, 0.8), (0.03, 0.12), (0.15, 0.0), (0.3, 0.12)]],
        anchors: &[a(0.0, 1.7, Ascender, Max), a(0.15, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "t",
        strokes: &[
            &[(0.12, 1.45), (0.12, 0.7), (0.14, 0.1), (0.26, 0.0), (0.4, 0.12)],
            &[(-0.05, 1.0), (0.15, 1.02), (0.35, 1.0)],
        ],
        anchors: &[a(0.12, 1.45, Ascender, Max), a(0.26, 0.0, Baseline, Min)],
    },
    Glyph {
        name: "w",
        strokes: &[&[
            (0.0, 1.0),
            (0.08, 0.4),
            (0.2, 0.0),
            (0.3, 0.45),
            (0.36, 0.78),
            (0.42, 0.45),
            (0.52, 0.0),
            (0.62, 0.4),
            (0.72, 1.0),
        ]],
        anchors: &[
            a(0.0, 1.0, XLine, Max),
            a(0.2, 0.0, Baseline, Min),
            a(0.52, 0.0, Baseline, Min),
            a(0.72, 1.0, XLine, Max),
        ],
    },
    Glyph {
        name: "2",
        strokes: &[&[
            (0.04, 1.2),
            (0.28, 1.5),
            (0.54, 1.28),
            (0.46, 0.86),
            (0.02, 0.0),
            (0.3, 0.06),
            (0.62, 0.0),
        ]],
        anchors: &[a(0.28, 1.5, CapLine, Max), a(0.02, 0.0, Baseline, Min)],
    },
];

pub fn glyph(name: &str) -> Option<&'static Glyph> {
    GLYPHS.iter().find(|g| g.name == name)
}

/// Centripetal Catmull-Rom spline through `pts`, with the end tangents
/// taken from reflected phantom points.
pub fn catmull_rom(pts: &[(f64, f64)], per_segment: usize) -> Vec<Point> {
    let p: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
    if p.len() < 2 {
        return p;
    }
    let n = p.len();
    let reflect = |a: Point, b: Point| Point::new(2.0 * a.x - b.x, 2.0 * a.y - b.y);
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(reflect(p[0], p[1]));
    ext.extend_from_slice(&p);
    ext.push(reflect(p[n - 1], p[n - 2]));

    let lerp = |a: Point, b: Point, ta: f64, tb: f64, t: f64| {
        if tb == ta {
            return a;
        }
        let w = (t - ta) / (tb - ta);
        Point::new(a.x + w * (b.x - a.x), a.y + w * (b.y - a.y))
    };
    let knot = |a: Point, b: Point| a.distance(&b).sqrt().max(1e-9);

    let mut out = vec![p[0]];
    for i in 0..n - 1 {
        let (p0, p1, p2, p3) = (ext[i], ext[i + 1], ext[i + 2], ext[i + 3]);
        let t0 = 0.0;
        let t1 = t0 + knot(p0, p1);
        let t2 = t1 + knot(p1, p2);
        let t3 = t2 + knot(p2, p3);
        for k in 1..=per_segment {
            let t = t1 + (t2 - t1) * k as f64 / per_segment as f64;
            let a1 = lerp(p0, p1, t0, t1, t);
            let a2 = lerp(p1, p2, t1, t2, t);
            let a3 = lerp(p2, p3, t2, t3, t);
            let b1 = lerp(a1, a2, t0, t2, t);
            let b2 = lerp(a2, a3, t1, t3, t);
            out.push(lerp(b1, b2, t1, t2, t));
        }
    }
    out
}

impl Glyph {
    pub fn ink(&self) -> InkSymbol {
        let strokes = self.strokes.iter().map(|s| catmull_rom(s, SAMPLES_PER_SEGMENT)).collect();
        InkSymbol::new(strokes, Some(self.name.to_string())).expect("library glyphs are valid")
    }

    /// The glyph as a one-sample class model, each anchor snapped to the
    /// extremum nearest to the curve point closest to it.
    pub fn model(&self, basis: &Arc<LSBasis>) -> Result<AnnotatedModel> {
        let average = vectorize(&self.ink(), basis)?;
        let y = average.curve().y;
        let annotations = self
            .anchors
            .iter()
            .map(|an| {
                let guess = average.nearest_parameter(an.near);
                let snap = snap_on(&y, guess, an.kind).map_err(|e| Error::InvalidModel {
                    class_id: self.name.to_string(),
                    message: e.to_string(),
                })?;
                Ok(DeterminingPointSpec::new(snap.s, an.line_type, an.kind))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnnotatedModel::new(self.name, average, 1).with_annotations(annotations))
    }
}

/// Models for every library glyph.
pub fn library_models(basis: &Arc<LSBasis>) -> Result<Vec<AnnotatedModel>> {
    GLYPHS.iter().map(|g| g.model(basis)).collect()
}

/// An "o" written with an entry flick from the upper right. The flick starts
/// almost as high as the top of the bowl, so on this sample the start of the
/// stroke is the maximum of `y` nearest to where the class average has its
/// x-line point. Snapping straight from the average picks the stroke start;
/// following the homotopy keeps the top of the bowl.
pub fn hooked_o() -> InkSymbol {
    let mut ctrl = vec![(0.68, 0.96), (0.6, 0.86)];
    ctrl.extend_from_slice(glyph("o").expect("library has an o").strokes[0]);
    InkSymbol::new(vec![catmull_rom(&ctrl, SAMPLES_PER_SEGMENT)], Some("o".into())).expect("valid stroke")
}

/// A random smooth closed-ish loop sampled at `samples` points: about one
/// turn of a fundamental plus a second harmonic of at most a quarter of its
/// amplitude, with a little drift.
pub fn random_loop<R: Rng>(rng: &mut R, samples: usize) -> Vec<Point> {
    let mut coef = [[0.0f64; 4]; 2];
    loop {
        for (k, c) in coef.iter_mut().enumerate() {
            let amp = if k == 0 { 1.0 } else { 0.25 };
            for v in c.iter_mut() {
                *v = amp * rng.random_range(-1.0..1.0);
            }
        }
        coef[0][0] += 1.0;
        coef[0][3] += 1.0;
        // a flat fundamental ellipse is a back-and-forth stroke, not a loop
        if ellipse_aspect(&coef[0]) >= 0.35 {
            break;
        }
    }
    let drift = (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
    let turns = rng.random_range(0.8..1.2);
    (0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            let mut p = Point::new(drift.0 * t, drift.1 * t);
            for (k, c) in coef.iter().enumerate() {
                let w = TAU * turns * (k + 1) as f64 * t;
                p.x += c[0] * w.cos() + c[1] * w.sin();
                p.y += c[2] * w.cos() + c[3] * w.sin();
            }
            p
        })
        .collect()
}

/// Minor over major axis of the ellipse `(a cos + b sin, c cos + d sin)`.
fn ellipse_aspect(&[a, b, c, d]: &[f64; 4]) -> f64 {
    let det = (a * d - b * c).abs();
    let fro = a * a + b * b + c * c + d * d;
    // singular values satisfy s1 s2 = det and s1^2 + s2^2 = fro
    let gap = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((fro + gap) / 2.0).sqrt();
    let s2 = ((fro - gap) / 2.0).max(0.0).sqrt();
    if s1 == 0.0 {
        0.0
    } else {
        s2 / s1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_passes_through_control_points() {
        let pts = [(0.0, 0.0), (1.0, 2.0), (2.0, 0.5), (3.0, 1.0)];
        let curve = catmull_rom(&pts, 8);
        assert_eq!(curve.len(), 1 + 3 * 8);
        for (k, &(x, y)) in pts.iter().enumerate() {
            let p = curve[k * 8];
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12);
        }
    }

    #[test]
    fn every_glyph_builds_a_model() {
        let basis = LSBasis::shared(12, 0.125).unwrap();
        for g in GLYPHS {
            let m = g.model(&basis).unwrap();
            assert_eq!(m.annotations.len(), g.anchors.len(), "{}", g.name);
        }
    }
}
