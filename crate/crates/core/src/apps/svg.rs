//! Before/after SVG rendering of a line of symbols.

use std::fmt::Write;

use super::neaten::NeatenGuide;
use crate::space::SymbolVector;

const PANEL_HEIGHT: f64 = 200.0;
const MARGIN: f64 = 20.0;
const SAMPLES: usize = 128;

struct Panel<'a> {
    symbols: &'a [SymbolVector],
    guide: Option<&'a NeatenGuide>,
}

fn bounds(polys: &[Vec<(f64, f64)>]) -> (f64, f64, f64, f64) {
    let mut b = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in polys.iter().flatten() {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    if b.0 > b.2 {
        (0.0, 0.0, 1.0, 1.0)
    } else {
        b
    }
}

fn render_panel(out: &mut String, panel: &Panel, top: f64) -> f64 {
    let polys: Vec<Vec<(f64, f64)>> = panel.symbols.iter().map(|v| v.sample_page(SAMPLES)).collect();
    let (x0, y0, x1, y1) = bounds(&polys);
    let k = (PANEL_HEIGHT - 2.0 * MARGIN) / (y1 - y0).max(1e-12);
    // page y is up, SVG y is down
    let map = |x: f64, y: f64| (MARGIN + k * (x - x0), top + MARGIN + k * (y1 - y));
    let width = 2.0 * MARGIN + k * (x1 - x0);

    if let Some(g) = panel.guide {
        for (y, color) in [(g.baseline, "#2a7"), (g.baseline + g.x_height, "#27a")] {
            let (_, sy) = map(x0, y);
            let _ = writeln!(
                out,
                r#"  <line x1="0" y1="{sy:.2}" x2="{width:.2}" y2="{sy:.2}" stroke="{color}" stroke-dasharray="4 3"/>"#
            );
        }
    }
    for poly in &polys {
        let pts: Vec<String> = poly
            .iter()
            .map(|&(x, y)| {
                let (sx, sy) = map(x, y);
                format!("{sx:.2},{sy:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"  <polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    width
}

/// Renders the original line above the neatened one, with the guide's
/// baseline and x line drawn under the neatened row.
pub fn render_before_after(before: &[SymbolVector], after: &[SymbolVector], guide: Option<&NeatenGuide>) -> String {
    let mut body = String::new();
    let w1 = render_panel(&mut body, &Panel { symbols: before, guide: None }, 0.0);
    let w2 = render_panel(&mut body, &Panel { symbols: after, guide }, PANEL_HEIGHT);
    let width = w1.max(w2);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{:.0}\">\n{body}</svg>\n",
        2.0 * PANEL_HEIGHT
    )
}
