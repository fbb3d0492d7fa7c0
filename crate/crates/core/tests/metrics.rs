use std::f64::consts::TAU;

use inkmetrics::eval::glyph;
use inkmetrics::metrics::x_extent;
use inkmetrics::{detect, metric_lines, slanted_width, vectorize, InkSymbol, LSBasis, LineType, Point};
use proptest::prelude::*;

/// Width of the sheared abscissa over a dense sampling of the page curve.
fn dense_width(points: &[(f64, f64)], slant_deg: f64) -> f64 {
    let tan = slant_deg.to_radians().tan();
    let u: Vec<f64> = points.iter().map(|(x, y)| x - y * tan).collect();
    u.iter().cloned().fold(f64::MIN, f64::max) - u.iter().cloned().fold(f64::MAX, f64::min)
}

fn circle(cx: f64, cy: f64, r: f64) -> InkSymbol {
    let pts = (0..=200)
        .map(|k| {
            let a = TAU * k as f64 / 200.0;
            Point::new(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    InkSymbol::new(vec![pts], None).unwrap()
}

#[test]
fn circle_width_matches_dense_sampling() {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let v = vectorize(&circle(3.0, -1.0, 2.5), &basis).unwrap();
    let dense = v.sample_page(20_001);
    for slant in [-30.0, -10.0, 0.0, 15.0, 40.0] {
        let w = slanted_width(&v, slant);
        let want = dense_width(&dense, slant);
        assert!((w - want).abs() < 1e-6, "slant {slant}: {w} vs {want}");
        // and close to the true circle, 2r / cos(theta)
        let ideal = 5.0 / f64::cos(f64::to_radians(slant));
        assert!((w - ideal).abs() < 0.02 * ideal, "slant {slant}: {w} vs {ideal}");
    }
}

#[test]
fn upright_width_is_bounding_box_width() {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    for name in ["n", "a", "P", "9"] {
        let v = vectorize(&glyph(name).unwrap().ink(), &basis).unwrap();
        let (lo, hi) = x_extent(&v);
        assert!((slanted_width(&v, 0.0) - (hi - lo)).abs() < 1e-12);
        let dense = v.sample_page(20_001);
        assert!((slanted_width(&v, 12.0) - dense_width(&dense, 12.0)).abs() < 1e-6, "{name}");
    }
}

#[test]
fn legs_of_m_share_one_baseline() {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let g = glyph("m").unwrap();
    let model = g.model(&basis).unwrap();
    // the writer's three legs stop at slightly different heights
    let legs = [9.0, 10.0, 11.0];
    let mut stroke: Vec<(f64, f64)> = g.strokes[0].to_vec();
    let mut leg = 0;
    for p in stroke.iter_mut() {
        if p.1 == 0.0 {
            p.1 = (legs[leg] - 10.0) / 10.0;
            leg += 1;
        }
    }
    assert_eq!(leg, 3);
    let pts = inkmetrics::eval::glyphs::catmull_rom(&stroke, 16)
        .into_iter()
        .map(|p| Point::new(10.0 * p.x, 10.0 + 10.0 * p.y))
        .collect();
    let v = vectorize(&InkSymbol::new(vec![pts], None).unwrap(), &basis).unwrap();
    let report = detect(&model, &v, 3, 0).unwrap();
    let base: Vec<_> = report.points.iter().filter(|p| p.line_type == LineType::Baseline).collect();
    assert_eq!(base.len(), 3);
    // each leg sits at a local minimum of the reconstructed page curve;
    // degree 12 rounds the retraced cusps, so not at the written height
    let dense = v.sample_page(10_001);
    for p in &base {
        let k = (p.s * 10_000.0).round() as usize;
        let lo = dense[k.saturating_sub(200)..=(k + 200).min(10_000)].iter().map(|q| q.1).fold(f64::MAX, f64::min);
        assert!((p.y - lo).abs() < 1e-6, "{p:?} vs {lo}");
    }
    let mean = base.iter().map(|p| p.y).sum::<f64>() / 3.0;
    assert!((report.lines.baseline.unwrap() - mean).abs() < 1e-12);

    // the same legs given directly at 9, 10 and 11
    let mut points = report.points.clone();
    let mut it = legs.iter();
    for p in points.iter_mut().filter(|p| p.line_type == LineType::Baseline) {
        p.y = *it.next().unwrap();
    }
    let lines = metric_lines(&v, &points, 0.0);
    assert_eq!(lines.baseline, Some(10.0));
    assert!((lines.heights.x_height.unwrap() - (lines.xline.unwrap() - 10.0)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lines_follow_the_page_transform(
        which in 0usize..6, dx in -100.0..100.0f64, dy in -100.0..100.0f64, k in 0.1..30.0f64, slant in -20.0..20.0f64,
    ) {
        let name = ["n", "h", "p", "q", "P", "w"][which];
        let basis = LSBasis::shared(12, 0.125).unwrap();
        let g = glyph(name).unwrap();
        let model = g.model(&basis).unwrap();
        let ink = g.ink();
        let moved = InkSymbol::new(
            ink.strokes().iter().map(|s| s.iter().map(|p| Point::new(dx + k * p.x, dy + k * p.y)).collect()).collect(),
            None,
        ).unwrap();
        let (a, b) = (vectorize(&ink, &basis).unwrap(), vectorize(&moved, &basis).unwrap());
        let pa = inkmetrics::locate_multistep(&model, &a, 3).unwrap();
        let pb = inkmetrics::locate_multistep(&model, &b, 3).unwrap();
        let (la, lb) = (metric_lines(&a, &pa, slant), metric_lines(&b, &pb, slant));
        for t in LineType::ALL {
            match (la.line(t), lb.line(t)) {
                (Some(ya), Some(yb)) => prop_assert!((yb - (dy + k * ya)).abs() < 1e-8 * (1.0 + k)),
                (None, None) => {}
                other => prop_assert!(false, "{t}: {other:?}"),
            }
        }
        prop_assert!((lb.width - k * la.width).abs() < 1e-9 * (1.0 + k));
    }
}
