//! Synthetic glyphs, placed scenes, and the error-rate benchmark of the
//! multi-step locator.

pub mod glyphs;
pub mod harness;
pub mod scenes;

pub use glyphs::{glyph, hooked_o, library_models, random_loop, Glyph, GLYPHS};
pub use harness::{
    dense_extrema, follow_extrema, generate_benchmark, generate_synthetic_class, generate_with, is_mispositioned,
    oracle_location, run_evaluation, ErrorTable, FailureDiagnostic, OracleExtremum, PerturbationSpec, SyntheticClass,
    SyntheticSample, TargetedWarp, BENCHMARK_NOISE, BENCHMARK_SAMPLES, BENCHMARK_STEPS,
};
