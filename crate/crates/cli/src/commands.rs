//! Argument parsing and the batch subcommands.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use inkmetrics::apps::neaten::{guide_from_lines, neaten, to_ink, NeatenConfig};
use inkmetrics::apps::svg::render_before_after;
use inkmetrics::basis::{DEFAULT_DEGREE, DEFAULT_MU};
use inkmetrics::eval::{
    generate_benchmark, library_models, run_evaluation, GLYPHS, BENCHMARK_NOISE, BENCHMARK_SAMPLES, BENCHMARK_STEPS,
};
use inkmetrics::{
    average, detect, normalize, parse_ink, project, reconstruction_error, write_ink, AnnotatedModel, Catalog, InkSymbol,
    LSBasis, Point, SymbolVector, Transform,
};

pub const DEFAULT_PORT: u16 = 7117;
pub const DEFAULT_STEPS: usize = 3;
pub const DEFAULT_SEED: u64 = 7;

/// Error rates published for the multi-step method on a 9593-sample review
/// set, printed next to the synthetic table for comparison only.
const REFERENCE_RATES: [(usize, f64); 8] = [
    (1, 2.0),
    (2, 0.72),
    (3, 0.38),
    (4, 0.29),
    (6, 0.26),
    (8, 0.26),
    (10, 0.25),
    (20, 0.25),
];

#[derive(Debug, Parser)]
#[command(name = "inkmetrics", version, about = "Metric lines of handwritten symbols from Legendre-Sobolev series")]
pub struct Cli {
    /// Basis degree (default 12). Commands that read a catalog use its basis
    /// and reject a conflicting value.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Sobolev weight of the basis (default 0.125).
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Input ink has y growing downwards; output ink is written the same way.
    #[arg(long, global = true)]
    pub y_down: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit each symbol of an ink file and report coefficients and error.
    Approximate(IoArgs),
    /// Average the symbols of each class into catalog models.
    Average(AverageArgs),
    /// Locate determining points and metric lines for each symbol.
    Detect(DetectArgs),
    /// Align a line of symbols on common metric lines.
    Neaten(NeatenArgs),
    /// Run the synthetic benchmark and print the error table.
    Eval(EvalArgs),
    /// Serve the annotation HTTP interface for a catalog.
    Serve(ServeArgs),
    /// Write the built-in annotated glyphs as a catalog.
    Library(LibraryArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Existing catalog to merge into. Annotations and slant of classes
    /// already there are kept.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Treat every symbol as this class instead of using its label.
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub catalog: PathBuf,
    /// Homotopy steps from the class average to the sample.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Model to use for every symbol instead of its label.
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Args)]
pub struct NeatenArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Also write a before/after SVG here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Points per symbol in the neatened ink.
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated step counts, ascending.
    #[arg(long, value_delimiter = ',', default_values_t = BENCHMARK_STEPS)]
    pub steps: Vec<usize>,
    /// Samples per class.
    #[arg(long, default_value_t = BENCHMARK_SAMPLES)]
    pub samples: usize,
    /// Standard deviation of the coefficient noise.
    #[arg(long, default_value_t = BENCHMARK_NOISE)]
    pub noise: f64,
    /// Benchmark classes from this catalog instead of the built-in glyphs.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Write the table as CSV here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write one CSV row per mis-positioned point here.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
}

#[derive(Debug, Args)]
pub struct LibraryArgs {
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the glyphs themselves as an ink file.
    #[arg(long)]
    pub ink: Option<PathBuf>,
}

/// Why a command stopped. Validation problems exit with 1, processing
/// failures with 2.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Processing(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Processing(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Processing(m) => f.write_str(m),
        }
    }
}

impl From<inkmetrics::Error> for Failure {
    fn from(e: inkmetrics::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Processing(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    log::info!("resolved configuration: {cli:?}");
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

pub fn dispatch(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::Approximate(a) => approximate(cli, a),
        Command::Average(a) => average_cmd(cli, a),
        Command::Detect(a) => detect_cmd(cli, a),
        Command::Neaten(a) => neaten_cmd(cli, a),
        Command::Eval(a) => eval_cmd(cli, a),
        Command::Serve(a) => serve_cmd(cli, a),
        Command::Library(a) => library_cmd(cli, a),
    }
}

fn basis_from_flags(cli: &Cli) -> Outcome<Arc<LSBasis>> {
    Ok(LSBasis::shared(
        cli.degree.unwrap_or(DEFAULT_DEGREE),
        cli.mu.unwrap_or(DEFAULT_MU),
    )?)
}

/// Loads a catalog and checks it against any basis given on the command line.
fn load_catalog(cli: &Cli, path: &Path) -> Outcome<Catalog> {
    let catalog = Catalog::load(path).map_err(|e| invalid(format!("catalog {}: {e}", path.display())))?;
    let id = catalog.basis().id();
    if cli.degree.is_some_and(|d| d != id.degree) || cli.mu.is_some_and(|m| m != id.mu) {
        return Err(invalid(format!(
            "--degree/--mu conflict with the catalog basis (degree {}, mu {})",
            id.degree, id.mu
        )));
    }
    Ok(catalog)
}

fn flip(symbol: &InkSymbol) -> InkSymbol {
    let strokes = symbol
        .strokes()
        .iter()
        .map(|s| s.iter().map(|p| Point::new(p.x, -p.y)).collect())
        .collect();
    let mut out = InkSymbol::new(strokes, symbol.class_label.clone()).expect("flipping keeps a valid symbol");
    out.source_id = symbol.source_id.clone();
    out
}

fn read_ink(cli: &Cli, path: &Path) -> Outcome<Vec<InkSymbol>> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let symbols = parse_ink(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    if symbols.is_empty() {
        return Err(invalid(format!("{}: no symbols", path.display())));
    }
    Ok(if cli.y_down { symbols.iter().map(flip).collect() } else { symbols })
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Processing(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Coefficients<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

#[derive(Serialize)]
struct Approximation<'a> {
    symbol: usize,
    label: Option<&'a str>,
    degree: usize,
    mu: f64,
    /// Series of the trace in page coordinates.
    series: Coefficients<'a>,
    /// RMS distance to the trace over the bounding-box diagonal.
    error: f64,
    normalized: Coefficients<'a>,
    transform: Transform,
}

fn approximate(cli: &Cli, args: &IoArgs) -> Outcome<()> {
    let basis = basis_from_flags(cli)?;
    let symbols = read_ink(cli, &args.input)?;
    let mut fits = Vec::with_capacity(symbols.len());
    for sym in &symbols {
        let trace = sym.trace()?;
        let series = project(&trace, &basis);
        let error = reconstruction_error(&trace, &series);
        let v = normalize(&series)?;
        fits.push((series, error, v));
    }
    let out: Vec<Approximation> = fits
        .iter()
        .zip(&symbols)
        .enumerate()
        .map(|(i, ((series, error, v), sym))| Approximation {
            symbol: i,
            label: sym.class_label.as_deref(),
            degree: basis.degree(),
            mu: basis.mu(),
            series: Coefficients {
                x: series.x_coeffs(),
                y: series.y_coeffs(),
            },
            error: *error,
            normalized: Coefficients {
                x: v.x_coeffs(),
                y: v.y_coeffs(),
            },
            transform: v.transform,
        })
        .collect();
    write_out(args.output.as_deref(), &to_json(&out))
}

fn average_cmd(cli: &Cli, args: &AverageArgs) -> Outcome<()> {
    let mut catalog = match &args.catalog {
        Some(p) => load_catalog(cli, p)?,
        None => Catalog::new(basis_from_flags(cli)?),
    };
    let basis = catalog.basis().clone();
    let symbols = read_ink(cli, &args.io.input)?;
    // classes in order of first appearance
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<SymbolVector>> = BTreeMap::new();
    for (i, sym) in symbols.iter().enumerate() {
        let label = args
            .class
            .clone()
            .or_else(|| sym.class_label.clone())
            .ok_or_else(|| invalid(format!("symbol {i} has no label; pass --class")))?;
        let v = inkmetrics::vectorize(sym, &basis)?;
        if !groups.contains_key(&label) {
            order.push(label.clone());
        }
        groups.entry(label).or_default().push(v);
    }
    for label in order {
        let samples = &groups[&label];
        let mut avg = average(samples)?;
        avg.class_label = Some(label.clone());
        let mut model = AnnotatedModel::new(label.clone(), avg, samples.len());
        if let Some(old) = catalog.get(&label) {
            log::warn!("class {label}: keeping {} existing annotations with the new average", old.annotations.len());
            model.annotations = old.annotations.clone();
            model.slant_deg = old.slant_deg;
        }
        catalog.upsert(model)?;
    }
    write_out(args.io.output.as_deref(), &catalog.to_json())
}

fn model_for<'a>(catalog: &'a Catalog, class: Option<&str>, sym: &InkSymbol, i: usize) -> Outcome<&'a AnnotatedModel> {
    let id = class
        .or(sym.class_label.as_deref())
        .ok_or_else(|| invalid(format!("symbol {i} has no label; pass --class")))?;
    catalog
        .get(id)
        .ok_or_else(|| Failure::from(inkmetrics::Error::UnknownClass(id.to_string())))
}

fn check_steps(steps: usize) -> Outcome<()> {
    if steps == 0 {
        return Err(invalid("--steps must be at least 1"));
    }
    Ok(())
}

fn detect_all(
    catalog: &Catalog,
    class: Option<&str>,
    symbols: &[InkSymbol],
    steps: usize,
) -> Outcome<Vec<(SymbolVector, inkmetrics::DetectionReport)>> {
    symbols
        .iter()
        .enumerate()
        .map(|(i, sym)| {
            let model = model_for(catalog, class, sym, i)?;
            let v = inkmetrics::vectorize(sym, catalog.basis())?;
            let report = detect(model, &v, steps, i)?;
            if report.failed_points() > 0 {
                log::warn!("symbol {i}: {} determining point(s) not found", report.failed_points());
            }
            Ok((v, report))
        })
        .collect()
}

fn detect_cmd(cli: &Cli, args: &DetectArgs) -> Outcome<()> {
    check_steps(args.steps)?;
    let catalog = load_catalog(cli, &args.catalog)?;
    let symbols = read_ink(cli, &args.io.input)?;
    let mut reports: Vec<_> = detect_all(&catalog, args.class.as_deref(), &symbols, args.steps)?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    if cli.y_down {
        for r in &mut reports {
            *r = flip_report(r);
        }
    }
    write_out(args.io.output.as_deref(), &to_json(&reports))
}

/// Reports page coordinates with y growing downwards.
fn flip_report(r: &inkmetrics::DetectionReport) -> inkmetrics::DetectionReport {
    let mut out = r.clone();
    for p in &mut out.points {
        p.y = -p.y;
    }
    let l = r.lines;
    let neg = |v: Option<f64>| v.map(|y| -y);
    let mut lines =
        inkmetrics::MetricLines::from_lines(neg(l.baseline), neg(l.xline), neg(l.ascender), neg(l.capline), neg(l.descender));
    // heights are distances and keep their sign
    lines.heights = l.heights;
    lines.slant_deg = l.slant_deg;
    lines.width = l.width;
    out.lines = lines;
    out
}

fn neaten_cmd(cli: &Cli, args: &NeatenArgs) -> Outcome<()> {
    check_steps(args.steps)?;
    if args.samples < 2 {
        return Err(invalid("--samples must be at least 2"));
    }
    let catalog = load_catalog(cli, &args.catalog)?;
    let symbols = read_ink(cli, &args.io.input)?;
    let detected = detect_all(&catalog, None, &symbols, args.steps)?;
    let line: Vec<_> = detected.iter().map(|(v, r)| (v.clone(), r.lines)).collect();
    let lines: Vec<_> = line.iter().map(|(_, m)| *m).collect();
    let guide = guide_from_lines(&lines).ok_or_else(|| invalid("no symbol has both a baseline and a height"))?;
    let out = neaten(&line, &guide, &NeatenConfig::default())?;
    log::info!("neatening plan: {:?}", out.plan);
    let mut ink: Vec<InkSymbol> = out.symbols.iter().map(|v| to_ink(v, args.samples)).collect();
    if cli.y_down {
        ink = ink.iter().map(flip).collect();
    }
    if let Some(svg) = &args.svg {
        let before: Vec<SymbolVector> = line.into_iter().map(|(v, _)| v).collect();
        let text = render_before_after(&before, &out.symbols, Some(&guide));
        std::fs::write(svg, text).map_err(|e| Failure::Processing(format!("{}: {e}", svg.display())))?;
    }
    write_out(args.io.output.as_deref(), &write_ink(&ink))
}

fn eval_cmd(cli: &Cli, args: &EvalArgs) -> Outcome<()> {
    if args.steps.is_empty() || args.steps.contains(&0) {
        return Err(invalid("--steps must list step counts of at least 1"));
    }
    if args.steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("--steps must be strictly ascending"));
    }
    if args.samples == 0 {
        return Err(invalid("--samples must be at least 1"));
    }
    if !(args.noise >= 0.0) || !args.noise.is_finite() {
        return Err(invalid("--noise must be a finite non-negative number"));
    }
    let models = match &args.catalog {
        Some(p) => load_catalog(cli, p)?.models().to_vec(),
        None => library_models(&basis_from_flags(cli)?)?,
    };
    let models: Vec<_> = models.into_iter().filter(|m| !m.annotations.is_empty()).collect();
    if models.is_empty() {
        return Err(invalid("no annotated classes to evaluate"));
    }
    let classes = generate_benchmark(&models, args.samples, args.noise, args.seed)?;
    let table = run_evaluation(&classes, &args.steps)?;

    let mut text = format!(
        "{} classes x {} samples, noise {}, seed {}\n",
        models.len(),
        args.samples,
        args.noise,
        args.seed
    );
    text.push_str(&table.to_text());
    let reference: Vec<String> = args
        .steps
        .iter()
        .map(|m| match REFERENCE_RATES.iter().find(|(k, _)| k == m) {
            Some((_, r)) => format!("{m}: {r:.2}%"),
            None => format!("{m}: -"),
        })
        .collect();
    let _ = writeln!(text, "published rates on handwritten data: {}", reference.join(", "));
    print!("{text}");
    if let Some(p) = &args.output {
        write_out(Some(p), &table.to_csv())?;
    }
    if let Some(p) = &args.diagnostics {
        write_out(Some(p), &table.diagnostics_csv())?;
    }
    Ok(())
}

fn serve_cmd(cli: &Cli, args: &ServeArgs) -> Outcome<()> {
    let catalog = load_catalog(cli, &args.catalog)?;
    let state = crate::service::AppState::new(catalog, args.catalog.clone());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Processing(e.to_string()))?;
    runtime
        .block_on(crate::service::serve(state, args.port))
        .map_err(|e| Failure::Processing(e.to_string()))
}

fn library_cmd(cli: &Cli, args: &LibraryArgs) -> Outcome<()> {
    let basis = basis_from_flags(cli)?;
    let catalog = Catalog::from_models(basis.clone(), library_models(&basis)?)?;
    if let Some(p) = &args.ink {
        let mut ink: Vec<InkSymbol> = GLYPHS.iter().map(|g| g.ink()).collect();
        if cli.y_down {
            ink = ink.iter().map(flip).collect();
        }
        write_out(Some(p), &write_ink(&ink))?;
    }
    write_out(args.output.as_deref(), &catalog.to_json())
}
