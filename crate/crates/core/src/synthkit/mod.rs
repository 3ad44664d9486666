//! Deterministic defect fixtures: closed building-like base shapes with
//! injected holes, seams, overlaps, fans and self-intersections.

mod recipe;
pub mod shapes;

pub use recipe::{generate, Axis, BaseShape, Defect, DefectRecipe, GroundTruth, Limitation, Side, SEAM_JITTER};
