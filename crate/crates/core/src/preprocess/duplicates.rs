use petgraph::unionfind::UnionFind;
use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::Serialize;

use crate::config::RepairConfig;
use crate::meshcore::{SurfaceMesh, VertexId};

/// Single-linkage clusters of vertices closer than the duplicate radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateGroups {
    /// Lowest vertex id of the group, per vertex.
    pub representative: Vec<VertexId>,
}

impl DuplicateGroups {
    /// Number of groups with more than one member.
    pub fn nontrivial_count(&self) -> usize {
        self.sizes().iter().filter(|&&s| s > 1).count()
    }

    /// Number of vertices that belong to a non-singleton group.
    pub fn grouped_vertices(&self) -> usize {
        let sizes = self.sizes();
        self.representative.iter().filter(|&&r| sizes[r] > 1).count()
    }

    fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.representative.len()];
        for &r in &self.representative {
            sizes[r] += 1;
        }
        sizes
    }
}

pub(crate) type IndexedPoint = GeomWithData<[f64; 3], VertexId>;

/// Groups all vertices within `eps_duplicate` of each other (transitively)
/// and stores the result on the mesh.
pub fn mark_duplicates(mesh: &mut SurfaceMesh, cfg: &RepairConfig) -> DuplicateGroups {
    let groups = compute_groups(mesh.vertices().iter().map(|p| [p.x, p.y, p.z]), cfg.eps_duplicate);
    mesh.set_duplicate_groups(groups.representative.clone());
    groups
}

pub(crate) fn compute_groups(points: impl Iterator<Item = [f64; 3]>, radius: f64) -> DuplicateGroups {
    let items: Vec<IndexedPoint> = points.enumerate().map(|(i, p)| GeomWithData::new(p, i)).collect();
    let n = items.len();
    let tree = RTree::bulk_load(items.clone());
    let mut uf = UnionFind::<usize>::new(n);
    let r2 = radius * radius;
    for item in &items {
        for other in tree.locate_within_distance(*item.geom(), r2) {
            if other.data > item.data {
                uf.union(item.data, other.data);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut lowest = vec![usize::MAX; n];
    for (v, &l) in labels.iter().enumerate() {
        lowest[l] = lowest[l].min(v);
    }
    DuplicateGroups {
        representative: labels.iter().map(|&l| lowest[l]).collect(),
    }
}
