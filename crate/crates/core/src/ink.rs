//! Raw digital ink: the JSON interchange format, validation, stroke
//! concatenation and arc-length parameterization.
//!
//! Coordinates are held with y increasing upward. Documents that use screen
//! orientation set `"y_down": true` and are flipped on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub type Stroke = Vec<Point>;

/// One handwritten symbol: ordered strokes of at least two points each.
#[derive(Debug, Clone, PartialEq)]
pub struct InkSymbol {
    strokes: Vec<Stroke>,
    pub class_label: Option<String>,
    pub source_id: Option<String>,
}

impl InkSymbol {
    pub fn new(strokes: Vec<Stroke>, class_label: Option<String>) -> Result<Self> {
        validate_strokes(0, &strokes)?;
        Ok(Self {
            strokes,
            class_label,
            source_id: None,
        })
    }

    pub fn strokes(&self) -> &[Stroke] {
        &self.strokes
    }

    /// Joins the strokes in order into one point sequence. The pen-up jump
    /// between strokes becomes an ordinary chord.
    pub fn concatenate_strokes(&self) -> Vec<Point> {
        self.strokes.iter().flatten().copied().collect()
    }

    /// Concatenates and arc-length parameterizes the symbol.
    pub fn trace(&self) -> Result<ParameterizedTrace> {
        parameterize(&self.concatenate_strokes())
    }
}

fn validate_strokes(symbol: usize, strokes: &[Stroke]) -> Result<()> {
    if strokes.is_empty() {
        return Err(Error::EmptySymbol { symbol });
    }
    for (k, stroke) in strokes.iter().enumerate() {
        if stroke.len() < 2 {
            return Err(Error::ShortStroke {
                symbol,
                stroke: k,
                points: stroke.len(),
            });
        }
        if let Some(p) = stroke.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite {
                symbol,
                stroke: k,
                point: p,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct InkDocument {
    symbols: Vec<SymbolRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolRecord {
    label: Option<String>,
    #[serde(default)]
    y_down: bool,
    strokes: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_id: Option<String>,
}

/// Parses an ink interchange document.
pub fn parse_ink(document: &str) -> Result<Vec<InkSymbol>> {
    let doc: InkDocument = serde_json::from_str(document).map_err(|e| Error::parse(&e))?;
    doc.symbols
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let flip = if rec.y_down { -1.0 } else { 1.0 };
            let strokes: Vec<Stroke> = rec
                .strokes
                .iter()
                .map(|st| st.iter().map(|&[x, y]| Point::new(x, flip * y)).collect())
                .collect();
            validate_strokes(i, &strokes)?;
            Ok(InkSymbol {
                strokes,
                class_label: rec.label,
                source_id: rec.source_id,
            })
        })
        .collect()
}

/// Serializes symbols in canonical (y-up) orientation.
pub fn write_ink(symbols: &[InkSymbol]) -> String {
    let doc = InkDocument {
        symbols: symbols
            .iter()
            .map(|s| SymbolRecord {
                label: s.class_label.clone(),
                y_down: false,
                strokes: s
                    .strokes
                    .iter()
                    .map(|st| st.iter().map(|p| [p.x, p.y]).collect())
                    .collect(),
                source_id: s.source_id.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("ink documents always serialize")
}

/// A point of a parameterized trace; `s` is normalized arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

/// A polyline parameterized over [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedTrace {
    points: Vec<TracePoint>,
    total_length: f64,
}

impl ParameterizedTrace {
    /// Builds a trace from explicitly parameterized points. `s` must be
    /// non-decreasing from exactly 0 to exactly 1.
    pub fn new(points: Vec<TracePoint>, total_length: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateTrace);
        }
        let first = points[0].s;
        let last = points[points.len() - 1].s;
        if first != 0.0 || last != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "trace parameter must run from 0 to 1, got {first}..{last}"
            )));
        }
        if points.windows(2).any(|w| w[1].s < w[0].s) {
            return Err(Error::InvalidArgument("trace parameter must be non-decreasing".into()));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidArgument("non-finite trace coordinate".into()));
        }
        Ok(Self { points, total_length })
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn bbox_diagonal(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &self.points {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        (x1 - x0).hypot(y1 - y0)
    }
}

/// Arc-length parameterizes a polyline. Consecutive duplicate points are
/// collapsed; `s` at each point is the cumulative chord length divided by
/// the total.
pub fn parameterize(points: &[Point]) -> Result<ParameterizedTrace> {
    let mut kept: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        if kept.last() != Some(p) {
            kept.push(*p);
        }
    }
    if kept.len() < 2 {
        return Err(Error::DegenerateTrace);
    }
    let mut cumulative = Vec::with_capacity(kept.len());
    let mut total = 0.0;
    cumulative.push(0.0);
    for w in kept.windows(2) {
        total += w[0].distance(&w[1]);
        cumulative.push(total);
    }
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateTrace);
    }
    let n = kept.len();
    let out = kept
        .iter()
        .zip(&cumulative)
        .enumerate()
        .map(|(k, (p, c))| TracePoint {
            s: if k == n - 1 { 1.0 } else { c / total },
            x: p.x,
            y: p.y,
        })
        .collect();
    Ok(ParameterizedTrace {
        points: out,
        total_length: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_stroke_document() {
        let doc = r#"{"symbols": [{"label": "a", "strokes": [[[0, 0], [3, 4]]]}]}"#;
        let syms = parse_ink(doc).unwrap();
        assert_eq!(syms.len(), 1);
        assert_eq!(syms[0].strokes().len(), 1);
        assert_eq!(syms[0].strokes()[0], pts(&[(0.0, 0.0), (3.0, 4.0)]));
        assert_eq!(syms[0].class_label.as_deref(), Some("a"));
    }

    #[test]
    fn strokes_keep_document_order() {
        let doc = r#"{"symbols": [{"label": null, "strokes": [[[5, 5], [6, 6]], [[0, 0], [1, 1]]]}]}"#;
        let syms = parse_ink(doc).unwrap();
        assert_eq!(syms[0].strokes()[0][0], Point::new(5.0, 5.0));
        assert_eq!(syms[0].strokes()[1][0], Point::new(0.0, 0.0));
    }

    #[test]
    fn empty_stroke_names_its_index() {
        let doc = r#"{"symbols": [{"label": "x", "strokes": [[[0, 0], [1, 1]], []]}]}"#;
        match parse_ink(doc) {
            Err(Error::ShortStroke { symbol: 0, stroke: 1, points: 0 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_document_reports_position() {
        let doc = "{\"symbols\": [\n {\"label\": 3, \"strokes\": []}]}";
        match parse_ink(doc) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn y_down_documents_are_flipped() {
        let doc = r#"{"symbols": [{"label": null, "y_down": true, "strokes": [[[0, 2], [1, -3]]]}]}"#;
        let syms = parse_ink(doc).unwrap();
        assert_eq!(syms[0].strokes()[0], pts(&[(0.0, -2.0), (1.0, 3.0)]));
    }

    #[test]
    fn concatenation() {
        let sym = InkSymbol::new(vec![pts(&[(0.0, 0.0), (1.0, 0.0)]), pts(&[(2.0, 0.0), (3.0, 0.0)])], None).unwrap();
        assert_eq!(sym.concatenate_strokes(), pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]));

        let strokes: Vec<Stroke> = [10, 20, 30]
            .iter()
            .map(|&n| (0..n).map(|i| Point::new(i as f64, 0.0)).collect())
            .collect();
        assert_eq!(InkSymbol::new(strokes, None).unwrap().concatenate_strokes().len(), 60);
    }

    #[test]
    fn parameterize_examples() {
        let t = parameterize(&pts(&[(0.0, 0.0), (3.0, 4.0)])).unwrap();
        assert_eq!(t.total_length(), 5.0);
        assert_eq!(t.points().iter().map(|p| p.s).collect::<Vec<_>>(), vec![0.0, 1.0]);

        let t = parameterize(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])).unwrap();
        assert_eq!(t.points().iter().map(|p| p.s).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);

        let t = parameterize(&pts(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(t.points().iter().map(|p| p.s).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        assert!(matches!(
            parameterize(&pts(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)])),
            Err(Error::DegenerateTrace)
        ));
    }

    #[test]
    fn explicit_trace_validation() {
        let tp = |s, x| TracePoint { s, x, y: 0.0 };
        assert!(ParameterizedTrace::new(vec![tp(0.0, 0.0), tp(1.0, 1.0)], 1.0).is_ok());
        assert!(ParameterizedTrace::new(vec![tp(0.0, 0.0), tp(0.9, 1.0)], 1.0).is_err());
        assert!(ParameterizedTrace::new(vec![tp(0.0, 0.0), tp(0.6, 1.0), tp(0.5, 1.0), tp(1.0, 1.0)], 1.0).is_err());
    }
}
