//! Library glyphs placed on a page: the juxtaposition pairs and a mixed-size
//! line for neatening.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::glyphs::glyph;
use crate::apps::juxtapose::Relation;
use crate::basis::LSBasis;
use crate::error::{Error, Result};
use crate::ink::{InkSymbol, Point};
use crate::metrics::MetricLines;
use crate::report::detect;
use crate::space::{vectorize, SymbolVector};

/// Homotopy steps used when detecting lines on placed glyphs.
const STEPS: usize = 3;

/// A glyph written with its baseline at `baseline`, left edge at `left` and
/// glyph units scaled by `size`, then vectorized and run through detection
/// against the glyph's own model.
pub fn place(basis: &Arc<LSBasis>, name: &str, left: f64, baseline: f64, size: f64) -> Result<(SymbolVector, MetricLines)> {
    let g = glyph(name).ok_or_else(|| Error::UnknownClass(name.to_string()))?;
    let strokes = g
        .ink()
        .strokes()
        .iter()
        .map(|s| s.iter().map(|p| Point::new(left + size * p.x, baseline + size * p.y)).collect())
        .collect();
    let ink = InkSymbol::new(strokes, Some(name.to_string()))?;
    let v = vectorize(&ink, basis)?;
    let report = detect(&g.model(basis)?, &v, STEPS, 0)?;
    Ok((v, report.lines))
}

pub struct JuxtapositionCase {
    pub name: &'static str,
    pub left: (SymbolVector, MetricLines),
    pub right: (SymbolVector, MetricLines),
    pub expected: Relation,
    /// Lines from bounding boxes alone mislead on this pair.
    pub trap: bool,
}

fn case(
    basis: &Arc<LSBasis>,
    name: &'static str,
    left: (&str, f64, f64),
    right: (&str, f64, f64),
    expected: Relation,
    trap: bool,
) -> Result<JuxtapositionCase> {
    let l = place(basis, left.0, 0.0, left.1, left.2)?;
    let r = place(basis, right.0, 0.9 * left.2, right.1, right.2)?;
    Ok(JuxtapositionCase {
        name,
        left: l,
        right: r,
        expected,
        trap,
    })
}

/// The four inline readings of a P or p next to a q or 9. Each pair is
/// `(glyph, baseline, size)`. The 9 next to the p is written small and a
/// touch high, so comparing bounding boxes sees a shrunken 9 raised above
/// the long descender.
pub fn juxtaposition_cases(basis: &Arc<LSBasis>) -> Result<Vec<JuxtapositionCase>> {
    Ok(vec![
        case(basis, "P9", ("P", 0.0, 1.0), ("9", 0.02, 0.95), Relation::Inline, false)?,
        case(basis, "Pq", ("P", 0.0, 1.0), ("q", -0.03, 1.05), Relation::Inline, false)?,
        case(basis, "pq", ("p", 0.0, 1.0), ("q", 0.04, 0.95), Relation::Inline, false)?,
        case(basis, "p9", ("p", 0.0, 1.0), ("9", 0.1, 0.75), Relation::Inline, true)?,
    ])
}

/// Script readings of the same glyphs, to show the classifier does not
/// simply answer inline.
pub fn script_cases(basis: &Arc<LSBasis>) -> Result<Vec<JuxtapositionCase>> {
    Ok(vec![
        case(basis, "P^9", ("P", 0.0, 1.0), ("9", 0.9, 0.55), Relation::Superscript, false)?,
        case(basis, "P_q", ("P", 0.0, 1.0), ("q", -0.8, 0.6), Relation::Subscript, false)?,
        case(basis, "p^q", ("p", 0.0, 1.0), ("q", 0.7, 0.6), Relation::Superscript, false)?,
        case(basis, "p_9", ("p", 0.0, 1.0), ("9", -0.6, 0.5), Relation::Subscript, false)?,
    ])
}

/// "hello" written with each letter at its own size and height: sizes in
/// `[0.6, 1.5]`, baselines wandering by up to a quarter of the letter size.
pub fn mixed_line(basis: &Arc<LSBasis>, seed: u64) -> Result<Vec<(SymbolVector, MetricLines)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left = 0.0;
    "hello"
        .chars()
        .map(|c| {
            let size = rng.random_range(0.6..1.5);
            let baseline = size * rng.random_range(-0.25..0.25);
            let placed = place(basis, &c.to_string(), left, baseline, size)?;
            left += size * 0.8 + rng.random_range(0.05..0.3);
            Ok(placed)
        })
        .collect()
}
