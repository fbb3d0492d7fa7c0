//! Metric lines, heights, slant and width of a symbol.

use serde::{Deserialize, Serialize};

use crate::detect::{critical_points_in, LineType, LocatedPoint};
use crate::poly::LegendreSeries;
use crate::space::SymbolVector;

/// Page-space heights measured from the baseline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Heights {
    pub x_height: Option<f64>,
    pub ascender_height: Option<f64>,
    pub cap_height: Option<f64>,
    pub descender_depth: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricLines {
    pub baseline: Option<f64>,
    pub xline: Option<f64>,
    pub ascender: Option<f64>,
    pub capline: Option<f64>,
    pub descender: Option<f64>,
    pub slant_deg: f64,
    pub width: f64,
    pub heights: Heights,
}

impl MetricLines {
    /// Builds lines from explicit y values, deriving the heights.
    pub fn from_lines(
        baseline: Option<f64>,
        xline: Option<f64>,
        ascender: Option<f64>,
        capline: Option<f64>,
        descender: Option<f64>,
    ) -> Self {
        let mut m = MetricLines {
            baseline,
            xline,
            ascender,
            capline,
            descender,
            ..Default::default()
        };
        m.heights = m.derive_heights();
        m
    }

    pub fn line(&self, t: LineType) -> Option<f64> {
        match t {
            LineType::Baseline => self.baseline,
            LineType::XLine => self.xline,
            LineType::Ascender => self.ascender,
            LineType::CapLine => self.capline,
            LineType::Descender => self.descender,
        }
    }

    fn line_mut(&mut self, t: LineType) -> &mut Option<f64> {
        match t {
            LineType::Baseline => &mut self.baseline,
            LineType::XLine => &mut self.xline,
            LineType::Ascender => &mut self.ascender,
            LineType::CapLine => &mut self.capline,
            LineType::Descender => &mut self.descender,
        }
    }

    fn derive_heights(&self) -> Heights {
        let Some(base) = self.baseline else {
            return Heights::default();
        };
        Heights {
            x_height: self.xline.map(|v| v - base),
            ascender_height: self.ascender.map(|v| v - base),
            cap_height: self.capline.map(|v| v - base),
            descender_depth: self.descender.map(|v| base - v),
        }
    }

    /// The height used to compare symbol sizes: x-height, else cap height,
    /// else ascender height.
    pub fn reference_height(&self) -> Option<(LineType, f64)> {
        let h = &self.heights;
        h.x_height
            .map(|v| (LineType::XLine, v))
            .or(h.cap_height.map(|v| (LineType::CapLine, v)))
            .or(h.ascender_height.map(|v| (LineType::Ascender, v)))
            .filter(|(_, v)| *v > 0.0)
    }

    /// True when the present lines are ordered
    /// ascender >= x line >= baseline >= descender.
    pub fn is_ordered(&self) -> bool {
        let seq = [self.ascender, self.xline, self.baseline, self.descender];
        let present: Vec<f64> = seq.iter().flatten().copied().collect();
        present.windows(2).all(|w| w[0] >= w[1])
    }

    /// Maps every line through `y -> scale * y + dy`.
    pub fn transformed(&self, scale: f64, dy: f64) -> MetricLines {
        let f = |v: Option<f64>| v.map(|y| scale * y + dy);
        let mut m = MetricLines::from_lines(
            f(self.baseline),
            f(self.xline),
            f(self.ascender),
            f(self.capline),
            f(self.descender),
        );
        m.slant_deg = self.slant_deg;
        m.width = self.width * scale;
        m
    }
}

/// Averages the located points per line type (failed points excluded) and
/// measures the slanted width.
pub fn metric_lines(sample: &SymbolVector, points: &[LocatedPoint], slant_deg: f64) -> MetricLines {
    let mut m = MetricLines {
        slant_deg,
        width: slanted_width(sample, slant_deg),
        ..Default::default()
    };
    for t in LineType::ALL {
        let ys: Vec<f64> = points
            .iter()
            .filter(|p| p.line_type == t && !p.failed)
            .map(|p| p.y)
            .collect();
        if !ys.is_empty() {
            *m.line_mut(t) = Some(ys.iter().sum::<f64>() / ys.len() as f64);
        }
    }
    m.heights = m.derive_heights();
    m
}

/// Minimum and maximum of a polynomial over [0, 1].
pub(crate) fn range_of(p: &LegendreSeries) -> (f64, f64) {
    let mut lo = p.value(0.0).min(p.value(1.0));
    let mut hi = p.value(0.0).max(p.value(1.0));
    for c in critical_points_in(p, 0.0, 1.0).iter().filter(|c| !c.boundary) {
        let v = p.value(c.s);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Distance between the left and right bounding lines inclined by
/// `slant_deg` from vertical (positive leans right), in page units.
pub fn slanted_width(sample: &SymbolVector, slant_deg: f64) -> f64 {
    let curve = sample.curve();
    let tan = slant_deg.to_radians().tan();
    // sheared abscissa x - y tan(theta); the transform scales it uniformly
    let sheared = curve.x.add_scaled(&curve.y, -tan);
    let (lo, hi) = range_of(&sheared);
    sample.transform.scale * (hi - lo)
}

/// Page-space horizontal extent `(min x, max x)`.
pub fn x_extent(sample: &SymbolVector) -> (f64, f64) {
    let (lo, hi) = range_of(&sample.curve().x);
    let t = sample.transform;
    (t.tx + t.scale * lo, t.tx + t.scale * hi)
}

/// Page-space vertical extent `(min y, max y)`.
pub fn y_extent(sample: &SymbolVector) -> (f64, f64) {
    let (lo, hi) = range_of(&sample.curve().y);
    let t = sample.transform;
    (t.ty + t.scale * lo, t.ty + t.scale * hi)
}
