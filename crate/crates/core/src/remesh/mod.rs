//! Phase three: fill each true hole with a flat patch. The ring is fitted
//! with a plane, projected, triangulated with its edges as constraints and
//! lifted back onto the original ring vertices; no vertex is added or moved.

mod cdt;

use std::collections::BTreeMap;

use nalgebra::Point3;
use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};
use serde::Serialize;
use tracing::{debug, warn};

pub use cdt::{cdt, ConstrainedTriangulation2};

use crate::config::RepairConfig;
use crate::error::MeshError;
use crate::holedetect::{BorderRing, HoleSet};
use crate::meshcore::{faces_conflict, fit_plane, polygon_signed_area, triangle_area, SurfaceMesh, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillFailure {
    /// The ring vertices are collinear.
    Collinear,
    /// The ring folds over itself in the fit plane.
    ProjectionFold,
    /// Every candidate face was rejected.
    AllRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillResult {
    /// Ring vertices in fill order, duplicates collapsed.
    pub ring: Vec<VertexId>,
    pub added: usize,
    pub rejected_degenerate: usize,
    pub rejected_intersecting: usize,
    /// Largest ring-vertex distance from the fit plane (m).
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FillFailure>,
    #[serde(skip)]
    pub faces: Vec<[VertexId; 3]>,
}

impl FillResult {
    fn new(ring: Vec<VertexId>) -> Self {
        Self {
            ring,
            added: 0,
            rejected_degenerate: 0,
            rejected_intersecting: 0,
            residual: 0.0,
            failure: None,
            faces: Vec::new(),
        }
    }

    /// Patch inserted with no face rejected.
    pub fn is_complete(&self) -> bool {
        self.failure.is_none() && self.rejected_degenerate == 0 && self.rejected_intersecting == 0
    }
}

type FaceBox = GeomWithData<Rectangle<[f64; 3]>, usize>;

fn face_box(tri: &[Point3<f64>; 3], tol: f64) -> Rectangle<[f64; 3]> {
    let lo = tri[0].inf(&tri[1]).inf(&tri[2]);
    let hi = tri[0].sup(&tri[1]).sup(&tri[2]);
    Rectangle::from_corners([lo.x - tol, lo.y - tol, lo.z - tol], [hi.x + tol, hi.y + tol, hi.z + tol])
}

/// Ring vertex sequence with each duplicate group collapsed to its lowest
/// vertex id on the ring.
fn collapsed_ring(mesh: &SurfaceMesh, ring: &BorderRing) -> Vec<VertexId> {
    let mut rep: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for e in &ring.edges {
        for v in [e.from, e.to] {
            let slot = rep.entry(mesh.duplicate_group(v)).or_insert(v);
            *slot = (*slot).min(v);
        }
    }
    let mut out: Vec<VertexId> = ring.edges.iter().map(|e| rep[&mesh.duplicate_group(e.from)]).collect();
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// True when patch faces should run along the ring order: existing faces
/// on the ring edges mostly traverse them the other way.
fn follows_ring(mesh: &SurfaceMesh, ring: &[VertexId]) -> bool {
    let g = |v| mesh.duplicate_group(v);
    let mut votes = 0i64;
    for i in 0..ring.len() {
        let (ga, gb) = (g(ring[i]), g(ring[(i + 1) % ring.len()]));
        for u in mesh.group_members(ring[i]) {
            for &f in mesh.vertex_faces(u) {
                let t = mesh.face(f).map(g);
                for k in 0..3 {
                    if t[k] == ga && t[(k + 1) % 3] == gb {
                        votes -= 1;
                    } else if t[k] == gb && t[(k + 1) % 3] == ga {
                        votes += 1;
                    }
                }
            }
        }
    }
    votes >= 0
}

/// Fills one closed, ordered ring. Per-face rejections and unfillable rings
/// are reported in the result; the mesh only gains faces.
pub fn fill_hole(mesh: &mut SurfaceMesh, ring: &BorderRing, cfg: &RepairConfig) -> FillResult {
    let poly = collapsed_ring(mesh, ring);
    let mut result = FillResult::new(poly.clone());
    let points: Vec<Point3<f64>> = poly.iter().map(|&v| mesh.vertex(v)).collect();
    let plane = match fit_plane(&points) {
        Ok(pl) if poly.len() >= 3 => pl,
        _ => {
            result.failure = Some(FillFailure::Collinear);
            return result;
        }
    };
    result.residual = plane.max_residual(&points);
    let flat: Vec<_> = points.iter().map(|p| plane.project(p)).collect();
    let constraints: Vec<[usize; 2]> = (0..poly.len()).map(|i| [i, (i + 1) % poly.len()]).collect();
    let tri = match cdt(&flat, &constraints) {
        Ok(t) => t,
        Err(MeshError::ProjectionFold) => {
            warn!(ring = ?poly, "projected ring folds; hole left open");
            result.failure = Some(FillFailure::ProjectionFold);
            return result;
        }
        Err(e) => {
            warn!(ring = ?poly, error = %e, "triangulation failed");
            result.failure = Some(FillFailure::Collinear);
            return result;
        }
    };

    // Counter-clockwise triangles run along the polygon's own direction
    // when it is counter-clockwise in the plane.
    let ccw_ring = polygon_signed_area(&flat) > 0.0;
    let keep_ccw = ccw_ring == follows_ring(mesh, &poly);

    let tol = cfg.eps_duplicate;
    let tree: RTree<FaceBox> = RTree::bulk_load(
        (0..mesh.num_faces())
            .map(|f| GeomWithData::new(face_box(&mesh.face_points(f), tol), f))
            .collect(),
    );
    let g = |v: VertexId| mesh.duplicate_group(v);
    let shared = |a: &[VertexId; 3], b: &[VertexId; 3]| a.iter().filter(|&&x| b.iter().any(|&y| g(x) == g(y))).count();
    let mut accepted: Vec<[VertexId; 3]> = Vec::new();
    for t in &tri.inside {
        let mut face = t.map(|i| poly[i]);
        if !keep_ccw {
            face.swap(1, 2);
        }
        let pts = face.map(|v| mesh.vertex(v));
        if triangle_area(&pts) <= cfg.degenerate_area {
            debug!(?face, "degenerate fill face rejected");
            result.rejected_degenerate += 1;
            continue;
        }
        let bbox = face_box(&pts, tol);
        let env = AABB::from_corners(bbox.lower(), bbox.upper());
        let hits_mesh = tree.locate_in_envelope_intersecting(&env).any(|item| {
            let other = mesh.face(item.data);
            faces_conflict(&pts, &mesh.face_points(item.data), shared(&face, &other), tol, cfg.degenerate_area)
        });
        let hits_patch = accepted
            .iter()
            .any(|other| faces_conflict(&pts, &other.map(|v| mesh.vertex(v)), shared(&face, other), tol, cfg.degenerate_area));
        if hits_mesh || hits_patch {
            debug!(?face, "intersecting fill face rejected");
            result.rejected_intersecting += 1;
            continue;
        }
        accepted.push(face);
    }
    if accepted.is_empty() {
        result.failure = Some(FillFailure::AllRejected);
        return result;
    }
    mesh.add_faces(&accepted);
    result.added = accepted.len();
    result.faces = accepted;
    result
}

/// Fills every hole in order of the ring's lowest vertex id.
pub fn fill_all(mesh: &mut SurfaceMesh, holes: &HoleSet, cfg: &RepairConfig) -> Vec<FillResult> {
    let mut order: Vec<&BorderRing> = holes.holes.iter().collect();
    order.sort_by_key(|r| r.lowest_vertex());
    order.into_iter().map(|ring| fill_hole(mesh, ring, cfg)).collect()
}
