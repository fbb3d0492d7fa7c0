//! Handwritten symbols as Legendre-Sobolev series, class averages, and
//! automatic location of the points that define a symbol's metric lines.

pub mod approx;
pub mod apps;
pub mod basis;
pub mod catalog;
pub mod detect;
pub mod error;
pub mod eval;
pub mod ink;
pub mod metrics;
pub mod poly;
pub mod report;
pub mod space;

pub use approx::{project, reconstruction_error, PlaneCurve, SeriesPair};
pub use basis::{BasisId, LSBasis};
pub use catalog::{AnnotatedModel, Catalog};
pub use detect::{
    critical_points, locate_determining_points, locate_multistep, snap_to_extremum, DeterminingPointSpec,
    ExtremumKind, LineType, LocatedPoint,
};
pub use error::{Error, Result};
pub use ink::{parse_ink, parameterize, write_ink, InkSymbol, ParameterizedTrace, Point};
pub use metrics::{metric_lines, slanted_width, MetricLines};
pub use report::{detect, DetectionReport};
pub use space::{average, interpolate, normalize, vectorize, SymbolVector, Transform};
