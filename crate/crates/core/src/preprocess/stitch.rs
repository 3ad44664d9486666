use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use tracing::debug;

use crate::config::RepairConfig;
use crate::meshcore::{HalfEdgeId, SurfaceMesh, VertexId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StitchReport {
    /// Border half-edge pairs merged into twins.
    pub stitched_pairs: usize,
    /// Places where three or more border half-edges matched each other.
    pub ambiguous: usize,
}

/// Merges border half-edges that run between the same duplicate groups in
/// opposite directions, welding their vertices to the lower id. Repeats
/// until no such pair is left. Duplicate groups must already be marked.
pub fn stitch_pseudo_holes(mesh: &mut SurfaceMesh, _cfg: &RepairConfig) -> StitchReport {
    let mut report = StitchReport::default();
    // Each pass either welds at least one vertex away or stops, so the
    // number of passes is bounded by the vertex count.
    for _ in 0..=mesh.num_vertices() {
        let pairs = matching_pairs(mesh, &mut report.ambiguous);
        if pairs.is_empty() {
            break;
        }
        let mut uf = UnionFind::<usize>::new(mesh.num_vertices());
        for &(h1, h2) in &pairs {
            let (a, b) = (mesh.halfedge(h1), mesh.halfedge(h2));
            uf.union(a.origin, b.target);
            uf.union(a.target, b.origin);
        }
        let labels = uf.into_labeling();
        let mut lowest = vec![usize::MAX; labels.len()];
        for (v, &l) in labels.iter().enumerate() {
            lowest[l] = lowest[l].min(v);
        }
        let map: Vec<VertexId> = labels.iter().map(|&l| lowest[l]).collect();
        debug!(pairs = pairs.len(), "stitching border pairs");
        report.stitched_pairs += pairs.len();
        mesh.remap_vertices(&map);
    }
    report
}

/// Border pairs to stitch in this pass, ascending by the first half-edge id;
/// each half-edge appears at most once.
fn matching_pairs(mesh: &SurfaceMesh, ambiguous: &mut usize) -> Vec<(HalfEdgeId, HalfEdgeId)> {
    let g = |v: VertexId| mesh.duplicate_group(v);
    let mut by_groups: BTreeMap<(VertexId, VertexId), Vec<HalfEdgeId>> = BTreeMap::new();
    for h in mesh.border_halfedges() {
        let he = mesh.halfedge(h);
        if g(he.origin) != g(he.target) {
            by_groups.entry((g(he.origin), g(he.target))).or_default().push(h);
        }
    }
    let mut used = BTreeSet::new();
    let mut pairs = Vec::new();
    for h1 in mesh.border_halfedges() {
        let he = mesh.halfedge(h1);
        if used.contains(&h1) || g(he.origin) == g(he.target) {
            continue;
        }
        let Some(partners) = by_groups.get(&(g(he.target), g(he.origin))) else {
            continue;
        };
        let same_way = by_groups[&(g(he.origin), g(he.target))].len();
        let candidates: Vec<HalfEdgeId> = partners
            .iter()
            .copied()
            .filter(|&h2| !used.contains(&h2) && !would_collapse(mesh, h1, h2))
            .collect();
        let Some(&h2) = candidates.first() else {
            continue;
        };
        if partners.len() + same_way > 2 && h1 < h2 {
            *ambiguous += 1;
        }
        used.insert(h1);
        used.insert(h2);
        pairs.push((h1, h2));
    }
    pairs
}

/// Welding would put two vertices of one face on top of each other.
fn would_collapse(mesh: &SurfaceMesh, h1: HalfEdgeId, h2: HalfEdgeId) -> bool {
    let (a, b) = (mesh.halfedge(h1), mesh.halfedge(h2));
    let share_face = |x: VertexId, y: VertexId| x != y && mesh.vertex_faces(x).iter().any(|f| mesh.face(*f).contains(&y));
    share_face(a.origin, b.target) || share_face(a.target, b.origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::mark_duplicates;
    use crate::synthkit::shapes::grid_box;
    use nalgebra::Point3;

    /// Two unit squares side by side; the right one has its own copies of
    /// the seam vertices, offset by `offset` along x.
    fn seam_fixture(offset: f64) -> SurfaceMesh {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0 + offset, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(2.0, 1.0, 0.0),
            Point3::new(1.0 + offset, 1.0, 0.0),
        ];
        let f = vec![[0, 1, 2], [0, 2, 3], [4, 5, 6], [4, 6, 7]];
        SurfaceMesh::from_triangles(v, f).unwrap()
    }

    fn seam_borders(m: &SurfaceMesh) -> usize {
        m.border_halfedges()
            .filter(|&h| {
                let he = m.halfedge(h);
                (m.vertex(he.origin).x - 1.0).abs() < 0.1 && (m.vertex(he.target).x - 1.0).abs() < 0.1
            })
            .count()
    }

    #[test]
    fn duplicated_seam_is_stitched() {
        let mut m = seam_fixture(2e-4);
        let cfg = RepairConfig::default();
        mark_duplicates(&mut m, &cfg);
        assert_eq!(seam_borders(&m), 2);
        let faces = m.num_faces();
        let r = stitch_pseudo_holes(&mut m, &cfg);
        // One stitch joins the two seam half-edges.
        assert_eq!(r.stitched_pairs, 1);
        assert_eq!(seam_borders(&m), 0);
        assert_eq!(m.num_faces(), faces);
        assert_eq!(m.num_border_halfedges(), 6);
        m.check_invariants().unwrap();
    }

    #[test]
    fn closed_cube_needs_no_stitch() {
        let mut m = grid_box([1.0; 3], [1, 1, 1]);
        let cfg = RepairConfig::default();
        mark_duplicates(&mut m, &cfg);
        assert_eq!(stitch_pseudo_holes(&mut m, &cfg).stitched_pairs, 0);
    }

    #[test]
    fn true_gap_is_left_open() {
        let cfg = RepairConfig::default();
        let mut m = seam_fixture(10.0 * cfg.eps_duplicate);
        mark_duplicates(&mut m, &cfg);
        assert_eq!(stitch_pseudo_holes(&mut m, &cfg).stitched_pairs, 0);
        assert_eq!(seam_borders(&m), 2);
    }

    #[test]
    fn no_matching_pair_survives() {
        let mut m = seam_fixture(5e-4);
        let cfg = RepairConfig::default();
        mark_duplicates(&mut m, &cfg);
        stitch_pseudo_holes(&mut m, &cfg);
        let mut none = 0;
        assert!(matching_pairs(&m, &mut none).is_empty());
    }
}
