//! Splits triangles that pierce each other so that the intersection becomes
//! an explicit mesh edge. New vertices stay in the supporting planes.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Point3;
use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};
use serde::Serialize;
use spade::handles::FixedVertexHandle;
use spade::{ConstrainedDelaunayTriangulation, HasPosition, Triangulation};
use tracing::{debug, warn};

use crate::config::RepairConfig;
use crate::meshcore::{
    edge_key, intersect_triangles, segment_on_edge, triangle_area, EdgeKey, FaceId, Plane, SurfaceMesh, TriTriIntersection, VertexId,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SelfIntersectionReport {
    pub pairs_found: usize,
    pub pairs_resolved: usize,
    pub faces_removed: usize,
    pub faces_added: usize,
    pub vertices_added: usize,
    /// Sub-triangles at or below the degenerate area, discarded.
    pub degenerate_dropped: usize,
}

type FaceBox = GeomWithData<Rectangle<[f64; 3]>, FaceId>;

#[derive(Debug, Clone, Copy)]
struct SplitVertex {
    pos: spade::Point2<f64>,
    id: Option<VertexId>,
}

impl HasPosition for SplitVertex {
    type Scalar = f64;
    fn position(&self) -> spade::Point2<f64> {
        self.pos
    }
}

/// Face pairs sharing no vertex whose intersection is a segment longer
/// than the duplicate radius, with the segment endpoints. Segments lying on
/// an edge of both faces are edge contacts (overlapping edges), not
/// crossings, and are skipped.
pub fn find_self_intersections(mesh: &SurfaceMesh, cfg: &RepairConfig) -> Vec<(FaceId, FaceId, Point3<f64>, Point3<f64>)> {
    let tol = cfg.geometric_tolerance;
    let boxes: Vec<FaceBox> = (0..mesh.num_faces())
        .map(|f| {
            let [a, b, c] = mesh.face_points(f);
            let lo = a.inf(&b).inf(&c);
            let hi = a.sup(&b).sup(&c);
            GeomWithData::new(
                Rectangle::from_corners([lo.x - tol, lo.y - tol, lo.z - tol], [hi.x + tol, hi.y + tol, hi.z + tol]),
                f,
            )
        })
        .collect();
    let tree = RTree::bulk_load(boxes.clone());
    let mut found = Vec::new();
    for item in &boxes {
        let i = item.data;
        let env = AABB::from_corners(item.geom().lower(), item.geom().upper());
        let mut others: Vec<FaceId> = tree
            .locate_in_envelope_intersecting(&env)
            .map(|o| o.data)
            .filter(|&j| j > i)
            .collect();
        others.sort_unstable();
        for j in others {
            let (fi, fj) = (mesh.face(i), mesh.face(j));
            if fi.iter().any(|v| fj.contains(v)) {
                continue;
            }
            if let TriTriIntersection::Segment(p, q) = intersect_triangles(&mesh.face_points(i), &mesh.face_points(j), tol) {
                let contact = segment_on_edge(&mesh.face_points(i), &p, &q, tol) && segment_on_edge(&mesh.face_points(j), &p, &q, tol);
                if (q - p).norm() > cfg.eps_duplicate && !contact {
                    found.push((i, j, p, q));
                }
            }
        }
    }
    found
}

/// Re-triangulates every face involved in a self-intersection with the
/// intersection segment as a constraint.
pub fn resolve_self_intersections(mesh: &mut SurfaceMesh, cfg: &RepairConfig) -> SelfIntersectionReport {
    let pairs = find_self_intersections(mesh, cfg);
    let mut report = SelfIntersectionReport {
        pairs_found: pairs.len(),
        ..Default::default()
    };
    if pairs.is_empty() {
        return report;
    }

    let mut new_points: Vec<Point3<f64>> = Vec::new();
    let first_new = mesh.num_vertices();
    let mut edge_points: BTreeMap<EdgeKey, BTreeSet<VertexId>> = BTreeMap::new();
    let mut face_points: BTreeMap<FaceId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut face_segments: BTreeMap<FaceId, Vec<(VertexId, VertexId)>> = BTreeMap::new();

    for &(i, j, p, q) in &pairs {
        let mut ends = [0; 2];
        for (k, x) in [p, q].into_iter().enumerate() {
            let id = snap(mesh, &mut new_points, first_new, [i, j], &x, cfg);
            ends[k] = id;
            if id < first_new {
                continue;
            }
            for f in [i, j] {
                match on_edge(mesh, f, &x, cfg.geometric_tolerance) {
                    Some(e) => {
                        edge_points.entry(e).or_default().insert(id);
                    }
                    None => {
                        face_points.entry(f).or_default().insert(id);
                    }
                }
            }
        }
        if ends[0] != ends[1] {
            face_segments.entry(i).or_default().push((ends[0], ends[1]));
            face_segments.entry(j).or_default().push((ends[0], ends[1]));
        }
    }
    for e in edge_points.keys() {
        for &h in &mesh.edges()[e] {
            face_points.entry(mesh.halfedge(h).face.expect("face half-edge")).or_default();
        }
    }
    for f in face_segments.keys() {
        face_points.entry(*f).or_default();
    }

    let mut vertices: Vec<Point3<f64>> = mesh.vertices().to_vec();
    vertices.extend(&new_points);
    let affected: BTreeSet<FaceId> = face_points.keys().copied().collect();
    let mut added = Vec::new();
    for &f in &affected {
        let tri = mesh.face(f);
        let Some(plane) = Plane::from_triangle(&mesh.face_points(f)) else {
            warn!(face = f, "skipping degenerate face during self-intersection resolution");
            continue;
        };
        let boundary: [Vec<VertexId>; 3] = std::array::from_fn(|k| {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let mut chain: Vec<VertexId> = edge_points.get(&edge_key(a, b)).into_iter().flatten().copied().collect();
            let (pa, dir) = (vertices[a], vertices[b] - vertices[a]);
            chain.sort_by(|&x, &y| {
                let tx = (vertices[x] - pa).dot(&dir);
                let ty = (vertices[y] - pa).dot(&dir);
                tx.total_cmp(&ty)
            });
            chain.insert(0, a);
            chain.push(b);
            chain
        });
        let interior = face_points.get(&f).cloned().unwrap_or_default();
        let segments = face_segments.get(&f).cloned().unwrap_or_default();
        let sub = split_face(&plane, &mut vertices, &boundary, &interior, &segments);
        let before = triangle_area(&mesh.face_points(f));
        let mut kept = 0.0;
        for t in sub {
            let area = triangle_area(&t.map(|v| vertices[v]));
            if area <= cfg.degenerate_area {
                debug!(face = f, ?t, area, "dropping degenerate sub-triangle");
                report.degenerate_dropped += 1;
                continue;
            }
            kept += area;
            added.push(t);
            report.faces_added += 1;
        }
        debug!(face = f, before, kept, "face split");
        report.faces_removed += 1;
    }
    report.pairs_resolved = pairs
        .iter()
        .filter(|(i, j, ..)| affected.contains(i) && affected.contains(j))
        .count();

    let faces: Vec<[VertexId; 3]> = (0..mesh.num_faces())
        .filter(|f| !affected.contains(f))
        .map(|f| mesh.face(f))
        .chain(added)
        .collect();
    for p in &vertices[first_new..] {
        mesh.push_vertex(*p);
    }
    report.vertices_added = vertices.len() - first_new;
    mesh.set_faces(faces);
    report
}

/// Existing corner of either face, or earlier new point, within the
/// duplicate radius; otherwise a new vertex id.
fn snap(
    mesh: &SurfaceMesh,
    new_points: &mut Vec<Point3<f64>>,
    first_new: usize,
    faces: [FaceId; 2],
    x: &Point3<f64>,
    cfg: &RepairConfig,
) -> VertexId {
    let eps = cfg.eps_duplicate;
    let corners = faces.iter().flat_map(|&f| mesh.face(f));
    if let Some(v) = corners
        .filter(|&v| (mesh.vertex(v) - x).norm() <= eps)
        .min_by(|&a, &b| (mesh.vertex(a) - x).norm().total_cmp(&(mesh.vertex(b) - x).norm()).then(a.cmp(&b)))
    {
        return v;
    }
    if let Some(k) = new_points.iter().position(|p| (p - x).norm() <= eps) {
        return first_new + k;
    }
    new_points.push(*x);
    first_new + new_points.len() - 1
}

fn on_edge(mesh: &SurfaceMesh, f: FaceId, x: &Point3<f64>, tol: f64) -> Option<EdgeKey> {
    let tri = mesh.face(f);
    (0..3).find_map(|k| {
        let (a, b) = (mesh.vertex(tri[k]), mesh.vertex(tri[(k + 1) % 3]));
        let d = b - a;
        let t = (x - a).dot(&d) / d.norm_squared();
        let dist = ((x - a) - d * t).norm();
        (dist <= tol && t > 0.0 && t < 1.0).then(|| edge_key(tri[k], tri[(k + 1) % 3]))
    })
}

/// Constrained triangulation of one face in its own plane. Returns
/// counter-clockwise triangles (same winding as the face). Vertices created
/// where constraints cross are appended to `vertices`.
fn split_face(
    plane: &Plane,
    vertices: &mut Vec<Point3<f64>>,
    boundary: &[Vec<VertexId>; 3],
    interior: &BTreeSet<VertexId>,
    segments: &[(VertexId, VertexId)],
) -> Vec<[VertexId; 3]> {
    let mut cdt: ConstrainedDelaunayTriangulation<SplitVertex> = ConstrainedDelaunayTriangulation::new();
    let mut handle: BTreeMap<VertexId, FixedVertexHandle> = BTreeMap::new();
    let ids = boundary
        .iter()
        .flatten()
        .chain(interior)
        .chain(segments.iter().flat_map(|(a, b)| [a, b]));
    for &v in ids {
        if handle.contains_key(&v) {
            continue;
        }
        let q = plane.project(&vertices[v]);
        if let Ok(h) = cdt.insert(SplitVertex {
            pos: spade::Point2::new(q.x, q.y),
            id: Some(v),
        }) {
            handle.insert(v, h);
        }
    }
    let constrain = |cdt: &mut ConstrainedDelaunayTriangulation<SplitVertex>, a: VertexId, b: VertexId| {
        if let (Some(&ha), Some(&hb)) = (handle.get(&a), handle.get(&b)) {
            if ha != hb {
                cdt.add_constraint_and_split(ha, hb, |p| SplitVertex { pos: p, id: None });
            }
        }
    };
    for chain in boundary {
        for w in chain.windows(2) {
            constrain(&mut cdt, w[0], w[1]);
        }
    }
    for &(a, b) in segments {
        constrain(&mut cdt, a, b);
    }

    let mut id_of: BTreeMap<usize, VertexId> = BTreeMap::new();
    for v in cdt.vertices() {
        let id = match v.data().id {
            Some(id) => id,
            None => {
                let p = v.data().pos;
                vertices.push(plane.lift(&nalgebra::Point2::new(p.x, p.y)));
                vertices.len() - 1
            }
        };
        id_of.insert(v.fix().index(), id);
    }
    cdt.inner_faces()
        .map(|face| {
            let vs = face.vertices();
            let t = vs.map(|v| id_of[&v.fix().index()]);
            let p = vs.map(|v| v.position());
            let cross = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x);
            if cross >= 0.0 {
                t
            } else {
                [t[0], t[2], t[1]]
            }
        })
        .collect()
}
