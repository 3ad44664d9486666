//! Phase one: make the mesh safe to walk. Self-intersections are split,
//! seams made of duplicated vertices are stitched, and the remaining
//! duplicates and overlapping edges are marked for hole detection.

mod duplicates;
mod overlap;
mod selfintersect;
mod stitch;

use serde::Serialize;

pub use duplicates::{mark_duplicates, DuplicateGroups};
pub use overlap::{mark_overlapping_edges, OverlapMarks};
pub use selfintersect::{find_self_intersections, resolve_self_intersections, SelfIntersectionReport};
pub use stitch::{stitch_pseudo_holes, StitchReport};

use crate::config::RepairConfig;
use crate::meshcore::{OverlapClass, SurfaceMesh};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OverlapCounts {
    pub degenerate: usize,
    pub same_endpoints: usize,
    pub collinear_distinct: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PreprocessReport {
    pub self_intersections: SelfIntersectionReport,
    pub stitched_pairs: usize,
    pub ambiguous_stitches: usize,
    pub duplicate_groups: usize,
    pub overlap_edges: OverlapCounts,
}

/// Runs the whole phase in order: self-intersections, duplicate marking,
/// stitching, then final duplicate and overlap marks.
pub fn preprocess(mesh: &mut SurfaceMesh, cfg: &RepairConfig) -> PreprocessReport {
    let self_intersections = resolve_self_intersections(mesh, cfg);
    mark_duplicates(mesh, cfg);
    let stitch = stitch_pseudo_holes(mesh, cfg);
    let groups = mark_duplicates(mesh, cfg);
    let marks = mark_overlapping_edges(mesh, cfg);
    PreprocessReport {
        self_intersections,
        stitched_pairs: stitch.stitched_pairs,
        ambiguous_stitches: stitch.ambiguous,
        duplicate_groups: groups.nontrivial_count(),
        overlap_edges: OverlapCounts {
            degenerate: marks.count(OverlapClass::Degenerate),
            same_endpoints: marks.count(OverlapClass::SameEndpoints),
            collinear_distinct: marks.count(OverlapClass::CollinearDistinct),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthkit::{generate, DefectRecipe};

    #[test]
    fn preprocess_is_idempotent() {
        let recipe =
            DefectRecipe::parse("base box 2 2 2 cells 2 2 2\nseed 3\nduplicate-seam x 1\nself-intersect 0 0.3 0.3 0.5\nremove-faces 20 21")
                .unwrap();
        let (mut m, _) = generate(&recipe).unwrap();
        let cfg = RepairConfig::default();
        preprocess(&mut m, &cfg);
        let once = (m.vertices().to_vec(), m.faces().to_vec());
        let again = preprocess(&mut m, &cfg);
        assert_eq!(again.stitched_pairs, 0);
        assert_eq!(again.self_intersections.pairs_found, 0);
        assert_eq!((m.vertices().to_vec(), m.faces().to_vec()), once);
    }
}
