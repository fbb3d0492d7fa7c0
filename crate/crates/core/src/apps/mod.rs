//! Juxtaposition judgment and handwriting neatening built on metric lines.

pub mod juxtapose;
pub mod neaten;
pub mod svg;

pub use juxtapose::{bounding_box_lines, classify_juxtaposition, JuxtaposeConfig, PlacementJudgment, Relation};
pub use neaten::{guide_from_lines, neaten, to_ink, NeatenConfig, NeatenGuide, NeatenPlan, Neatened, SymbolPlan};
