use std::collections::BTreeMap;

use nalgebra::Point3;
use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};
use serde::Serialize;

use crate::config::RepairConfig;
use crate::meshcore::{EdgeKey, OverlapClass, SurfaceMesh};

/// Overlap class of every edge that is not `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OverlapMarks {
    pub marks: BTreeMap<EdgeKey, OverlapClass>,
}

impl OverlapMarks {
    pub fn count(&self, class: OverlapClass) -> usize {
        self.marks.values().filter(|&&c| c == class).count()
    }
}

type EdgeBox = GeomWithData<Rectangle<[f64; 3]>, usize>;

/// Classifies every edge as degenerate, same-endpoints or
/// collinear-distinct (in that priority) and stores the marks on the mesh.
/// Duplicate groups must already be marked.
pub fn mark_overlapping_edges(mesh: &mut SurfaceMesh, cfg: &RepairConfig) -> OverlapMarks {
    let marks = classify(mesh, cfg);
    mesh.set_overlap_marks(marks.marks.clone());
    marks
}

fn classify(mesh: &SurfaceMesh, cfg: &RepairConfig) -> OverlapMarks {
    let eps = cfg.eps_duplicate;
    let edges: Vec<EdgeKey> = mesh.edges().keys().copied().collect();
    let group_key = |&(a, b): &EdgeKey| {
        let (ga, gb) = (mesh.duplicate_group(a), mesh.duplicate_group(b));
        (ga.min(gb), ga.max(gb))
    };
    let mut marks = BTreeMap::new();

    let mut by_groups: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (pa, pb) = (mesh.vertex(e.0), mesh.vertex(e.1));
        if (pa - pb).norm() <= eps || mesh.duplicate_group(e.0) == mesh.duplicate_group(e.1) {
            marks.insert(*e, OverlapClass::Degenerate);
        } else {
            by_groups.entry(group_key(e)).or_default().push(i);
        }
    }
    for members in by_groups.values().filter(|m| m.len() > 1) {
        for &i in members {
            marks.insert(edges[i], OverlapClass::SameEndpoints);
        }
    }

    let boxes: Vec<EdgeBox> = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !marks.contains_key(e))
        .map(|(i, e)| {
            let (a, b) = (mesh.vertex(e.0), mesh.vertex(e.1));
            let lo = a.inf(&b);
            let hi = a.sup(&b);
            let rect = Rectangle::from_corners([lo.x - eps, lo.y - eps, lo.z - eps], [hi.x + eps, hi.y + eps, hi.z + eps]);
            GeomWithData::new(rect, i)
        })
        .collect();
    let tree = RTree::bulk_load(boxes.clone());
    for item in &boxes {
        let i = item.data;
        if marks.contains_key(&edges[i]) {
            continue;
        }
        let env = AABB::from_corners(item.geom().lower(), item.geom().upper());
        for other in tree.locate_in_envelope_intersecting(&env) {
            let j = other.data;
            if j == i || group_key(&edges[i]) == group_key(&edges[j]) {
                continue;
            }
            if collinear_overlap(mesh, edges[i], edges[j], eps) {
                marks.insert(edges[i], OverlapClass::CollinearDistinct);
                marks.entry(edges[j]).or_insert(OverlapClass::CollinearDistinct);
                break;
            }
        }
    }
    OverlapMarks { marks }
}

/// Both edges lie on a common line within `eps` and their extents along
/// it overlap by more than `eps`.
fn collinear_overlap(mesh: &SurfaceMesh, e: EdgeKey, f: EdgeKey, eps: f64) -> bool {
    let (a, b) = (mesh.vertex(e.0), mesh.vertex(e.1));
    let (c, d) = (mesh.vertex(f.0), mesh.vertex(f.1));
    let line_dist = |p: Point3<f64>, q: Point3<f64>, x: Point3<f64>| {
        let dir = q - p;
        let t = (x - p).dot(&dir) / dir.norm_squared();
        ((x - p) - dir * t).norm()
    };
    if line_dist(a, b, c) >= eps || line_dist(a, b, d) >= eps || line_dist(c, d, a) >= eps || line_dist(c, d, b) >= eps {
        return false;
    }
    let dir = (b - a).normalize();
    let (s0, s1) = (0.0f64, (b - a).norm());
    let (t0, t1) = {
        let (x, y) = ((c - a).dot(&dir), (d - a).dot(&dir));
        (x.min(y), x.max(y))
    };
    s1.min(t1) - s0.max(t0) > eps
}
