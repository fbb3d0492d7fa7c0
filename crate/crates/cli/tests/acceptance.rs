//! Acceptance gate: one PASS/FAIL line per primary criterion.
//!
//! Every check computes its reference values independently of the library
//! numerics where one exists (exact rational Gram-Schmidt, Gauss-Legendre
//! quadrature, dense sampling of the curve).

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{gauss_legendre, grid_extrema, shifted_legendre, ExactBasis};
use inkmetrics::apps::juxtapose::{bounding_box_lines, classify_juxtaposition, JuxtaposeConfig, Relation};
use inkmetrics::apps::neaten::{neaten, NeatenConfig, NeatenGuide};
use inkmetrics::eval::scenes::{juxtaposition_cases, mixed_line};
use inkmetrics::eval::{
    generate_benchmark, glyph, hooked_o, library_models, random_loop, run_evaluation, BENCHMARK_NOISE,
    BENCHMARK_SAMPLES, BENCHMARK_STEPS,
};
use inkmetrics::{
    detect, locate_multistep, parameterize, project, reconstruction_error, snap_to_extremum, vectorize, ExtremumKind,
    LSBasis, LineType, SeriesPair, SymbolVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn basis_correctness() -> Outcome {
    let nodes = gauss_legendre(40);
    let mut worst: f64 = 0.0;
    for d in [4, 8, 12, 16, 20] {
        for (n, q) in [(0, 1), (1, 8), (1, 1)] {
            let mu = n as f64 / q as f64;
            let basis = LSBasis::build(d, mu).map_err(|e| e.to_string())?;
            let f: Vec<_> = (0..=d).map(|i| basis.function(i)).collect();
            for i in 0..=d {
                for j in 0..=d {
                    let g: f64 = nodes
                        .iter()
                        .map(|&(s, w)| w * (f[i].value(s) * f[j].value(s) + mu * f[i].derivative(s) * f[j].derivative(s)))
                        .sum();
                    worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
        }
    }
    let mut legendre: f64 = 0.0;
    for d in 1..=10 {
        let basis = LSBasis::build(d, 0.0).map_err(|e| e.to_string())?;
        for i in 0..=d {
            let f = basis.function(i);
            for k in 0..=16 {
                legendre = legendre.max((f.value(k as f64 / 16.0) - shifted_legendre(i, (k, 16))).abs());
            }
        }
    }
    check(
        worst < 1e-9 && legendre < 1e-9,
        format!("max Gram deviation {worst:.1e}, max shifted Legendre deviation {legendre:.1e}"),
    )
}

fn approximation_fidelity() -> Outcome {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let trace = parameterize(&random_loop(&mut rng, 256)).map_err(|e| e.to_string())?;
        let series = project(&trace, &basis);
        let curve = series.curve();
        // RMS over the input points, relative to the bounding-box diagonal
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        let mut sum = 0.0;
        for p in trace.points() {
            let (x, y) = curve.point(p.s);
            sum += (x - p.x).powi(2) + (y - p.y).powi(2);
            (x0, x1, y0, y1) = (x0.min(p.x), x1.max(p.x), y0.min(p.y), y1.max(p.y));
        }
        let rms = (sum / trace.points().len() as f64).sqrt() / (x1 - x0).hypot(y1 - y0);
        if (rms - reconstruction_error(&trace, &series)).abs() > 1e-12 {
            return Err(format!("library error {} disagrees with direct RMS {rms}", reconstruction_error(&trace, &series)));
        }
        worst = worst.max(rms);
    }
    check(worst < 0.02, format!("20 loops at degree 12, mu 1/8: worst normalized RMS {worst:.4}"))
}

fn oracle_equivalence() -> Outcome {
    const GRID: usize = 10_000;
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let exact = ExactBasis::new(12, (1, 8));
    let x = basis.from_monomial(&[0.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut unique, mut agree, mut fallback, mut fallback_ok) = (0, 0, 0, 0);
    for _ in 0..200 {
        let mut y = vec![0.0];
        y.extend((1..=12).map(|_| rng.random_range(-1.0..1.0)));
        let f = exact.series(&y);
        let maxima = grid_extrema(&f, true, GRID);
        let minima = grid_extrema(&f, false, GRID);
        let series = SeriesPair::new(basis.clone(), x.clone(), y).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let (kind, pool) = if rng.random_bool(0.5) {
                (ExtremumKind::Max, &maxima)
            } else {
                (ExtremumKind::Min, &minima)
            };
            let at = pool[rng.random_range(0..pool.len())];
            let guess = (at + rng.random_range(-0.05..0.05)).clamp(0.0, 1.0);
            let mut cand = pool.clone();
            cand.sort_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()));
            let got = snap_to_extremum(&series, guess, kind).map_err(|e| e.to_string())?.s;
            let best = cand[0];
            let isolated = cand[1..].iter().all(|o| (o - best).abs() > 0.02);
            let decided = cand.get(1).is_none_or(|o| (o - guess).abs() - (best - guess).abs() > 1e-3);
            if isolated && decided {
                unique += 1;
                agree += usize::from((got - best).abs() <= 1e-3);
            } else {
                fallback += 1;
                let on_extremum = cand.iter().any(|o| (o - got).abs() <= 1e-3);
                fallback_ok += usize::from(on_extremum && (got - guess).abs() <= (best - guess).abs() + 1e-3);
            }
        }
    }
    check(
        unique > 0 && agree * 100 >= unique * 99 && fallback_ok == fallback,
        format!("{agree}/{unique} unique cases within 1e-3, {fallback_ok}/{fallback} crowded cases on a nearest extremum"),
    )
}

fn self_detection() -> Outcome {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for model in library_models(&basis).map_err(|e| e.to_string())? {
        for m in [1, 3, 20] {
            let found = locate_multistep(&model, &model.average, m).map_err(|e| e.to_string())?;
            for (p, a) in found.iter().zip(&model.annotations) {
                worst = worst.max(if p.failed { f64::INFINITY } else { (p.s - a.s).abs() });
                count += 1;
            }
        }
    }
    check(worst < 1e-8, format!("{count} annotations over steps 1, 3, 20: max |ds| {worst:.1e}"))
}

fn table_trend() -> Outcome {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let models = library_models(&basis).map_err(|e| e.to_string())?;
    let classes = generate_benchmark(&models, BENCHMARK_SAMPLES, BENCHMARK_NOISE, 7).map_err(|e| e.to_string())?;
    let targeted: usize = classes.iter().map(|c| c.samples.iter().filter(|s| s.targeted.is_some()).count()).sum();
    let table = run_evaluation(&classes, &BENCHMARK_STEPS).map_err(|e| e.to_string())?;
    let f = &table.failed_counts;
    let m3 = f[BENCHMARK_STEPS.iter().position(|&m| m == 3).unwrap()];
    let ok = models.len() >= 10
        && BENCHMARK_SAMPLES >= 100
        && f[0] > 0
        && f.windows(2).all(|w| w[1] <= w[0])
        && m3 * 4 <= f[0];
    check(
        ok,
        format!(
            "{} classes x {}, {targeted} targeted, failures by step {:?}: {:?}",
            models.len(),
            BENCHMARK_SAMPLES,
            BENCHMARK_STEPS,
            f
        ),
    )
}

fn hooked_o_recovery() -> Outcome {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let model = glyph("o").unwrap().model(&basis).map_err(|e| e.to_string())?;
    let sample = vectorize(&hooked_o(), &basis).map_err(|e| e.to_string())?;
    // the bowl's top and bottom are the global extrema of y on this sample
    let y = ExactBasis::new(12, (1, 8)).series(sample.y_coeffs());
    let arg = |sign: f64| {
        (0..=10_000)
            .map(|k| k as f64 / 10_000.0)
            .max_by(|a, b| (sign * y(*a)).total_cmp(&(sign * y(*b))))
            .unwrap()
    };
    let truth = |t: LineType| if t == LineType::XLine { arg(1.0) } else { arg(-1.0) };
    let wrong = |m: usize| -> Result<usize, String> {
        let pts = locate_multistep(&model, &sample, m).map_err(|e| e.to_string())?;
        Ok(pts.iter().filter(|p| p.failed || (p.s - truth(p.line_type)).abs() > 1e-3).count())
    };
    let (w1, w3) = (wrong(1)?, wrong(3)?);
    check(w1 > 0 && w3 == 0, format!("hooked 'o': {w1} point(s) wrong at m=1, {w3} at m=3"))
}

fn neatening_and_juxtaposition() -> Outcome {
    let basis = LSBasis::shared(12, 0.125).unwrap();
    let guide = NeatenGuide {
        cap_height: Some(1.5),
        ascender_height: Some(1.7),
        ..NeatenGuide::new(0.0, 1.0)
    };
    let redetect = |v: &SymbolVector| {
        let model = glyph(v.class_label.as_deref().unwrap()).unwrap().model(&basis).unwrap();
        detect(&model, v, 3, 0).unwrap().lines
    };
    let spread = |v: Vec<f64>| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    let (mut worst_spread, mut worst_drift): (f64, f64) = (0.0, 0.0);
    for seed in 1..=3 {
        let line = mixed_line(&basis, seed).map_err(|e| e.to_string())?;
        let once = neaten(&line, &guide, &NeatenConfig::default()).map_err(|e| e.to_string())?;
        let lines: Vec<_> = once.symbols.iter().map(redetect).collect();
        worst_spread = worst_spread.max(spread(lines.iter().map(|m| m.baseline.unwrap()).collect()) / guide.x_height);
        let again: Vec<_> = once.symbols.iter().cloned().zip(lines).collect();
        let twice = neaten(&again, &guide, &NeatenConfig::default()).map_err(|e| e.to_string())?;
        for (a, b) in once.symbols.iter().zip(&twice.symbols) {
            let (p, q) = (a.transform, b.transform);
            worst_drift = worst_drift.max((p.tx - q.tx).abs().max((p.ty - q.ty).abs()).max((p.scale - q.scale).abs()));
        }
    }
    let config = JuxtaposeConfig::default();
    let cases = juxtaposition_cases(&basis).map_err(|e| e.to_string())?;
    let right = cases
        .iter()
        .filter(|c| classify_juxtaposition(&c.left.1, &c.right.1, &config).relation == c.expected)
        .count();
    let trap = cases.iter().find(|c| c.trap).ok_or("no trap case")?;
    let naive = classify_juxtaposition(&bounding_box_lines(&trap.left.0), &bounding_box_lines(&trap.right.0), &config);
    check(
        worst_spread < 0.01 && worst_drift < 1e-6 && right == 4 && cases.len() == 4 && naive.relation != Relation::Inline,
        format!(
            "baseline spread {:.2e} x-height, repeat drift {worst_drift:.1e}, juxtaposition {right}/{}, \
             bounding boxes read the {} trap as {:?}",
            worst_spread,
            cases.len(),
            trap.name,
            naive.relation
        ),
    )
}

fn run_twice(args: &[&str]) -> Result<Vec<u8>, String> {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_inkmetrics")).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let (a, b) = (run()?, run()?);
    if a != b {
        return Err(format!("{args:?} differs between runs"));
    }
    Ok(a)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (cat, ink) = (p("catalog.json"), p("ink.json"));
    run_twice(&["library", "--output", &cat, "--ink", &ink])?;
    let file = |path: &str| std::fs::read(Path::new(path)).map_err(|e| e.to_string());
    let catalog = file(&cat)?;
    run_twice(&["library", "--output", &cat, "--ink", &ink])?;
    if file(&cat)? != catalog {
        return Err("library catalog differs between runs".into());
    }
    let eval = run_twice(&["eval", "--seed", "7", "--samples", "40", "--steps", "1,2,3,4,6,8,10,20"])?;
    let detect = run_twice(&["detect", "--catalog", &cat, "--input", &ink, "--steps", "3"])?;
    let other_seed = run_twice(&["eval", "--seed", "8", "--samples", "40", "--steps", "1,2,3,4,6,8,10,20"])?;
    check(
        !eval.is_empty() && !detect.is_empty() && other_seed != eval,
        format!("eval ({} bytes) and detect ({} bytes) byte-identical across runs", eval.len(), detect.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("basis correctness", basis_correctness),
        ("approximation fidelity", approximation_fidelity),
        ("snap oracle equivalence", oracle_equivalence),
        ("self-detection fixed point", self_detection),
        ("step-count error trend", table_trend),
        ("single step fails, three steps recover", hooked_o_recovery),
        ("neatening and juxtaposition", neatening_and_juxtaposition),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
