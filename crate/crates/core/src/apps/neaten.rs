//! Shift-and-scale neatening of a line of symbols.
//!
//! Each symbol is scaled uniformly so its reference height matches the
//! guide, then moved so its baseline sits on the guide baseline. Scripts keep
//! the scale of the symbol they attach to and sit a fixed fraction of the
//! guide x-height above or below it. Gaps between symbols are scaled with the
//! symbol to their right.

use serde::{Deserialize, Serialize};

use super::juxtapose::{classify_juxtaposition, JuxtaposeConfig, Relation};
use crate::detect::LineType;
use crate::error::{Error, Result};
use crate::ink::{InkSymbol, Point};
use crate::metrics::{x_extent, MetricLines};
use crate::space::{SymbolVector, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeatenGuide {
    pub baseline: f64,
    pub x_height: f64,
    /// Target for symbols measured by their cap line. When absent such
    /// symbols are scaled to the x-height.
    pub cap_height: Option<f64>,
    /// Target for symbols measured by their ascender line.
    pub ascender_height: Option<f64>,
}

impl NeatenGuide {
    pub fn new(baseline: f64, x_height: f64) -> Self {
        Self {
            baseline,
            x_height,
            cap_height: None,
            ascender_height: None,
        }
    }

    fn target(&self, line: LineType) -> f64 {
        match line {
            LineType::CapLine => self.cap_height.unwrap_or(self.x_height),
            LineType::Ascender => self.ascender_height.unwrap_or(self.x_height),
            _ => self.x_height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeatenConfig {
    pub juxtapose: JuxtaposeConfig,
    /// Raise (superscript) or drop (subscript) of a script's baseline, in
    /// guide x-heights.
    pub script_offset: f64,
}

impl Default for NeatenConfig {
    fn default() -> Self {
        Self {
            juxtapose: JuxtaposeConfig::default(),
            script_offset: 0.5,
        }
    }
}

/// What neatening did to one symbol: page point `p` maps to
/// `(dx + scale * p.x, dy + scale * p.y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolPlan {
    pub scale: f64,
    pub dx: f64,
    pub dy: f64,
    pub relation: Relation,
    /// No usable height metric: the symbol was translated only.
    pub unscaled: bool,
    /// No baseline: the symbol was not moved vertically.
    pub unaligned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeatenPlan {
    pub guide: NeatenGuide,
    pub symbols: Vec<SymbolPlan>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neatened {
    pub symbols: Vec<SymbolVector>,
    /// Input lines mapped through each symbol's plan.
    pub lines: Vec<MetricLines>,
    pub plan: NeatenPlan,
}

/// Neatens a line given in writing order.
pub fn neaten(symbols: &[(SymbolVector, MetricLines)], guide: &NeatenGuide, config: &NeatenConfig) -> Result<Neatened> {
    if !(guide.x_height > 0.0) || !guide.baseline.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid neatening guide {guide:?}")));
    }
    let mut out = Neatened {
        symbols: Vec::with_capacity(symbols.len()),
        lines: Vec::with_capacity(symbols.len()),
        plan: NeatenPlan {
            guide: *guide,
            symbols: Vec::with_capacity(symbols.len()),
        },
    };
    // the last inline symbol: its input lines, scale and output baseline
    let mut main: Option<(MetricLines, f64, f64)> = None;
    let mut prev_right: Option<(f64, f64)> = None;

    for (v, m) in symbols {
        let relation = match &main {
            Some((ml, _, _)) => classify_juxtaposition(ml, m, &config.juxtapose).relation,
            None => Relation::Inline,
        };
        let reference = m.reference_height();
        let (scale, target) = match (relation, &main) {
            (Relation::Superscript | Relation::Subscript, Some((_, k, base))) => {
                let sign = if relation == Relation::Superscript { 1.0 } else { -1.0 };
                (*k, base + sign * config.script_offset * guide.x_height)
            }
            _ => (
                reference.map_or(1.0, |(line, h)| guide.target(line) / h),
                guide.baseline,
            ),
        };
        let dy = match m.baseline {
            Some(b) => target - scale * b,
            None => 0.0,
        };

        let (left, right) = x_extent(v);
        let new_left = match prev_right {
            Some((old_right, new_right)) => new_right + scale * (left - old_right),
            None => left,
        };
        let dx = new_left - scale * left;
        prev_right = Some((right, new_left + scale * (right - left)));

        if relation == Relation::Inline && m.baseline.is_some() {
            main = Some((*m, scale, target));
        }

        let t = v.transform;
        let mut moved = v.clone();
        moved.transform = Transform {
            tx: dx + scale * t.tx,
            ty: dy + scale * t.ty,
            scale: scale * t.scale,
        };
        out.symbols.push(moved);
        out.lines.push(m.transformed(scale, dy));
        out.plan.symbols.push(SymbolPlan {
            scale,
            dx,
            dy,
            relation,
            unscaled: reference.is_none(),
            unaligned: m.baseline.is_none(),
        });
    }
    Ok(out)
}

/// Median of the available line heights over a line of symbols, used to
/// build a guide from the writing itself.
pub fn guide_from_lines(lines: &[MetricLines]) -> Option<NeatenGuide> {
    fn median(mut v: Vec<f64>) -> Option<f64> {
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
    }
    let collect = |f: &dyn Fn(&MetricLines) -> Option<f64>| median(lines.iter().filter_map(f).collect());
    let baseline = collect(&|m| m.baseline)?;
    let cap_height = collect(&|m| m.heights.cap_height);
    let ascender_height = collect(&|m| m.heights.ascender_height);
    let x_height = collect(&|m| m.heights.x_height).or(cap_height).or(ascender_height)?;
    Some(NeatenGuide {
        baseline,
        x_height,
        cap_height,
        ascender_height,
    })
}

/// Samples a symbol's page-space curve as a one-stroke ink symbol.
pub fn to_ink(v: &SymbolVector, samples: usize) -> InkSymbol {
    let stroke: Vec<Point> = v.sample_page(samples).into_iter().map(|(x, y)| Point::new(x, y)).collect();
    InkSymbol::new(vec![stroke], v.class_label.clone()).expect("at least two finite samples")
}
