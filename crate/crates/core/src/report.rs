//! Per-symbol detection reports.

use serde::{Deserialize, Serialize};

use crate::catalog::AnnotatedModel;
use crate::detect::{locate_multistep, LocatedPoint};
use crate::error::Result;
use crate::metrics::{metric_lines, MetricLines};
use crate::space::SymbolVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Index of the symbol in its input document.
    pub symbol: usize,
    pub label: Option<String>,
    pub class_id: String,
    pub steps: usize,
    pub points: Vec<LocatedPoint>,
    pub lines: MetricLines,
}

impl DetectionReport {
    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| p.failed).count()
    }
}

/// Runs the multi-step locator and derives metric lines with the model's slant.
pub fn detect(model: &AnnotatedModel, sample: &SymbolVector, steps: usize, symbol: usize) -> Result<DetectionReport> {
    let points = locate_multistep(model, sample, steps)?;
    let lines = metric_lines(sample, &points, model.slant_deg);
    Ok(DetectionReport {
        symbol,
        label: sample.class_label.clone(),
        class_id: model.class_id.clone(),
        steps,
        points,
        lines,
    })
}
