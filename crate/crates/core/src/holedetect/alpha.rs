//! Virtual-triangle checks shared by the border walk and ring completion.

use std::collections::BTreeSet;

use crate::config::RepairConfig;
use crate::meshcore::{triangle_area, FaceId, SurfaceMesh, VertexId};

use super::intersect::{intersection_test, VirtualTriangle};

pub(crate) fn virtual_triangle(mesh: &SurfaceMesh, ids: [VertexId; 3]) -> VirtualTriangle {
    VirtualTriangle {
        points: ids.map(|v| mesh.vertex(v)),
        vertices: ids,
        halfedges: None,
    }
}

/// Collinear up to the duplicate radius: the smallest altitude is at most
/// `eps_duplicate`, so jittered straight runs count as straight.
pub(crate) fn is_degenerate(mesh: &SurfaceMesh, ids: [VertexId; 3], cfg: &RepairConfig) -> bool {
    let p = ids.map(|v| mesh.vertex(v));
    let area = triangle_area(&p);
    if area <= cfg.degenerate_area {
        return true;
    }
    let longest = (0..3).map(|k| (p[(k + 1) % 3] - p[k]).norm()).fold(0.0, f64::max);
    2.0 * area / longest <= cfg.eps_duplicate
}

/// Faces incident to any duplicate sibling of the given vertices.
pub(crate) fn incident_faces(mesh: &SurfaceMesh, vertices: &[VertexId]) -> BTreeSet<FaceId> {
    vertices
        .iter()
        .flat_map(|&v| mesh.group_members(v))
        .flat_map(|v| mesh.vertex_faces(v).iter().copied())
        .collect()
}

/// α lies on at least one face incident to its corners (or to `extra`).
pub(crate) fn is_covered(mesh: &SurfaceMesh, alpha: &VirtualTriangle, extra: &[VertexId], cfg: &RepairConfig) -> bool {
    let mut around: Vec<VertexId> = alpha.vertices.to_vec();
    around.extend_from_slice(extra);
    incident_faces(mesh, &around)
        .into_iter()
        .any(|f| intersection_test(alpha, &mesh.face_points(f), cfg))
}

/// Decides whether the corner `back[0] → v1 → fwd[0]` belongs to a hole.
///
/// `back` and `fwd` list the chain's vertices before and after `v1`,
/// nearest first. When the corner is collinear the nearest non-collinear
/// vertex on either side stands in; the corner passes if either stand-in
/// triangle is uncovered. A fully collinear chain passes (it cannot cover
/// any face).
pub(crate) fn corner_passes(mesh: &SurfaceMesh, back: &[VertexId], v1: VertexId, fwd: &[VertexId], cfg: &RepairConfig) -> bool {
    let (Some(&v0), Some(&v2)) = (back.first(), fwd.first()) else {
        return false;
    };
    if !is_degenerate(mesh, [v0, v1, v2], cfg) {
        return !is_covered(mesh, &virtual_triangle(mesh, [v0, v1, v2]), &[], cfg);
    }
    let mut tried = false;
    if let Some(&b) = back[1..].iter().find(|&&b| !is_degenerate(mesh, [b, v1, v2], cfg)) {
        tried = true;
        if !is_covered(mesh, &virtual_triangle(mesh, [b, v1, v2]), &[v0], cfg) {
            return true;
        }
    }
    if let Some(&f) = fwd[1..].iter().find(|&&f| !is_degenerate(mesh, [v0, v1, f], cfg)) {
        tried = true;
        if !is_covered(mesh, &virtual_triangle(mesh, [v0, v1, f]), &[v2], cfg) {
            return true;
        }
    }
    !tried
}
