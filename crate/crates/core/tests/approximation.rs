use inkmetrics::eval::random_loop;
use inkmetrics::{normalize, parameterize, project, reconstruction_error, vectorize, InkSymbol, LSBasis, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_loops_reconstruct_within_two_percent() {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let pts = random_loop(&mut rng, 256);
        let trace = parameterize(&pts).unwrap();
        let series = project(&trace, &basis);
        let err = reconstruction_error(&trace, &series);

        // recompute the RMS from the points directly
        let curve = series.curve();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        let mut sum = 0.0;
        for p in trace.points() {
            let (x, y) = curve.point(p.s);
            sum += (x - p.x).powi(2) + (y - p.y).powi(2);
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        let rms = (sum / trace.points().len() as f64).sqrt() / (x1 - x0).hypot(y1 - y0);
        assert!((rms - err).abs() < 1e-12);
        worst = worst.max(err);
    }
    assert!(worst < 0.02, "worst normalized RMS {worst}");
}

#[test]
fn straight_segment_is_reproduced_exactly() {
    // x = 3s, y = -s + 1 lies in the span of B_0 and B_1
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let trace = parameterize(&[Point::new(0.0, 1.0), Point::new(1.5, 0.5), Point::new(3.0, 0.0)]).unwrap();
    let curve = project(&trace, &basis).curve();
    for k in 0..=10 {
        let s = k as f64 / 10.0;
        let (x, y) = curve.point(s);
        assert!((x - 3.0 * s).abs() < 1e-12 && (y - 1.0 + s).abs() < 1e-12, "s={s}: ({x}, {y})");
    }
}

#[test]
fn degree_raises_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trace = parameterize(&random_loop(&mut rng, 256)).unwrap();
    let errs: Vec<f64> = [4, 8, 12, 16]
        .iter()
        .map(|&d| reconstruction_error(&trace, &project(&trace, &LSBasis::shared(d, 0.125).unwrap())))
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shape_is_invariant_under_translation_and_scale(
        seed in any::<u64>(),
        dx in -50.0..50.0f64,
        dy in -50.0..50.0f64,
        k in 0.05..20.0f64,
    ) {
        let basis = LSBasis::shared(12, 0.125).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_loop(&mut rng, 128);
        let moved: Vec<Point> = pts.iter().map(|p| Point::new(dx + k * p.x, dy + k * p.y)).collect();
        let a = vectorize(&InkSymbol::new(vec![pts], None).unwrap(), &basis).unwrap();
        let b = vectorize(&InkSymbol::new(vec![moved], None).unwrap(), &basis).unwrap();
        for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((p - q).abs() < 1e-9);
        }
        prop_assert!((b.transform.scale - k * a.transform.scale).abs() < 1e-9 * b.transform.scale);
        prop_assert!((b.transform.tx - (dx + k * a.transform.tx)).abs() < 1e-8);
        prop_assert!((b.transform.ty - (dy + k * a.transform.ty)).abs() < 1e-8);
    }

    #[test]
    fn normalized_vectors_have_unit_norm(seed in any::<u64>()) {
        let basis = LSBasis::shared(12, 0.125).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = parameterize(&random_loop(&mut rng, 64)).unwrap();
        let v = normalize(&project(&trace, &basis)).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        let half = basis.len();
        prop_assert!(v.coeffs()[0] == 0.0 && v.coeffs()[half] == 0.0);
    }
}
