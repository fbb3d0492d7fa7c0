//! Inline / superscript / subscript judgment for adjacent symbols.

use serde::{Deserialize, Serialize};

use crate::metrics::{y_extent, MetricLines};
use crate::space::SymbolVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Inline,
    Superscript,
    Subscript,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JuxtaposeConfig {
    /// Baseline offset, in left x-heights, beyond which a script is possible.
    pub offset_threshold: f64,
    /// Size ratio below which a script is possible.
    pub ratio_threshold: f64,
    /// Margin at which confidence reaches tanh(1).
    pub confidence_scale: f64,
}

impl Default for JuxtaposeConfig {
    fn default() -> Self {
        Self {
            offset_threshold: 0.4,
            ratio_threshold: 0.85,
            confidence_scale: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementJudgment {
    pub relation: Relation,
    pub confidence: f64,
    /// `(right baseline - left baseline) / left height`
    pub offset: Option<f64>,
    /// `right height / left height`
    pub ratio: Option<f64>,
}

impl PlacementJudgment {
    fn indeterminate() -> Self {
        Self {
            relation: Relation::Inline,
            confidence: 0.0,
            offset: None,
            ratio: None,
        }
    }
}

/// Heights of the two symbols measured on the same line where possible,
/// otherwise each symbol's own reference height.
fn comparable_heights(left: &MetricLines, right: &MetricLines) -> Option<(f64, f64)> {
    let (l, r) = (&left.heights, &right.heights);
    let same = [
        (l.x_height, r.x_height),
        (l.cap_height, r.cap_height),
        (l.ascender_height, r.ascender_height),
    ];
    same.into_iter()
        .find_map(|pair| match pair {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a, b)),
            _ => None,
        })
        .or_else(|| Some((left.reference_height()?.1, right.reference_height()?.1)))
}

/// Judges how `right` sits relative to `left` from baseline offset and size
/// ratio.
pub fn classify_juxtaposition(left: &MetricLines, right: &MetricLines, config: &JuxtaposeConfig) -> PlacementJudgment {
    let (Some(lb), Some(rb)) = (left.baseline, right.baseline) else {
        return PlacementJudgment::indeterminate();
    };
    let Some((lh, rh)) = comparable_heights(left, right) else {
        return PlacementJudgment::indeterminate();
    };
    let offset = (rb - lb) / lh;
    let ratio = rh / lh;
    let (to, tr) = (config.offset_threshold, config.ratio_threshold);

    // signed distance into each script region (positive inside)
    let inside = |dy: f64| (dy).min(tr - ratio);
    let outside = |dy: f64| (dy.min(0.0)).hypot((tr - ratio).min(0.0));
    let sup = offset - to;
    let sub = -offset - to;
    let (relation, margin) = if sup > 0.0 && ratio < tr {
        (Relation::Superscript, inside(sup))
    } else if sub > 0.0 && ratio < tr {
        (Relation::Subscript, inside(sub))
    } else {
        (Relation::Inline, outside(sup).min(outside(sub)))
    };
    PlacementJudgment {
        relation,
        confidence: (margin / config.confidence_scale).tanh(),
        offset: Some(offset),
        ratio: Some(ratio),
    }
}

/// Lines taken from the bounding box alone: baseline at the lowest point and
/// x line at the highest. This is the naive method determining points
/// replace.
pub fn bounding_box_lines(sample: &SymbolVector) -> MetricLines {
    let (lo, hi) = y_extent(sample);
    MetricLines::from_lines(Some(lo), Some(hi), None, None, None)
}
