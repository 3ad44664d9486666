//! Indexed half-edge triangle mesh that tolerates non-manifold input.
//!
//! Faces are the source of truth. Every mutation rebuilds the half-edge
//! records from the face list, so connectivity can never drift out of sync
//! with the geometry. Face `f` owns half-edges `3f`, `3f + 1`, `3f + 2`;
//! border half-edges are appended after the face half-edges.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Point3;
use serde::Serialize;
use tracing::warn;

use crate::error::{MeshError, Result};

pub type VertexId = usize;
pub type FaceId = usize;
pub type HalfEdgeId = usize;

/// Undirected edge key with the smaller vertex id first.
pub type EdgeKey = (VertexId, VertexId);

pub fn edge_key(a: VertexId, b: VertexId) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twin {
    Paired(HalfEdgeId),
    /// Extra face half-edge on an edge that already has two paired faces.
    NonManifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: VertexId,
    pub target: VertexId,
    pub twin: Twin,
    /// Always set for face half-edges. Border half-edges may lack a
    /// successor where the boundary is broken by non-manifold geometry.
    pub next: Option<HalfEdgeId>,
    pub prev: Option<HalfEdgeId>,
    /// `None` marks a border half-edge.
    pub face: Option<FaceId>,
}

impl HalfEdge {
    pub fn is_border(&self) -> bool {
        self.face.is_none()
    }
}

/// Classification of an undirected edge against the other edges of the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapClass {
    #[default]
    None,
    Degenerate,
    SameEndpoints,
    CollinearDistinct,
}

#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[VertexId; 3]>,
    halfedges: Vec<HalfEdge>,
    edges: BTreeMap<EdgeKey, Vec<HalfEdgeId>>,
    vertex_faces: Vec<Vec<FaceId>>,
    vertex_borders_out: Vec<Vec<HalfEdgeId>>,
    duplicate_group: Vec<VertexId>,
    group_members: BTreeMap<VertexId, Vec<VertexId>>,
    overlap: BTreeMap<EdgeKey, OverlapClass>,
}

impl SurfaceMesh {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a mesh from vertex positions and triangles. Triangles that
    /// repeat a vertex id are dropped with a warning.
    pub fn from_triangles(vertices: Vec<Point3<f64>>, faces: Vec<[VertexId; 3]>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(MeshError::DegenerateGeometry(format!("non-finite vertex {p:?}")));
        }
        for (f, tri) in faces.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(MeshError::DegenerateGeometry(format!(
                    "face {f} references vertex {v} but only {} exist",
                    vertices.len()
                )));
            }
        }
        let n = vertices.len();
        let mut mesh = Self {
            vertices,
            duplicate_group: (0..n).collect(),
            ..Self::default()
        };
        mesh.set_faces(faces);
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Point3<f64> {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> [VertexId; 3] {
        self.faces[f]
    }

    pub fn face_points(&self, f: FaceId) -> [Point3<f64>; 3] {
        self.faces[f].map(|v| self.vertices[v])
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty() && self.vertices.is_empty()
    }

    pub fn halfedges(&self) -> &[HalfEdge] {
        &self.halfedges
    }

    pub fn halfedge(&self, h: HalfEdgeId) -> &HalfEdge {
        &self.halfedges[h]
    }

    pub fn face_halfedges(&self, f: FaceId) -> [HalfEdgeId; 3] {
        [3 * f, 3 * f + 1, 3 * f + 2]
    }

    pub fn border_halfedges(&self) -> impl Iterator<Item = HalfEdgeId> + '_ {
        (3 * self.faces.len()..self.halfedges.len()).filter(|&h| self.halfedges[h].is_border())
    }

    pub fn num_border_halfedges(&self) -> usize {
        self.halfedges.len() - 3 * self.faces.len()
    }

    /// Border half-edges leaving `v`, ascending by id.
    pub fn border_out(&self, v: VertexId) -> &[HalfEdgeId] {
        &self.vertex_borders_out[v]
    }

    pub fn vertex_faces(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v]
    }

    pub fn is_referenced(&self, v: VertexId) -> bool {
        !self.vertex_faces[v].is_empty()
    }

    /// Undirected edges, each with the face half-edges lying on it.
    pub fn edges(&self) -> &BTreeMap<EdgeKey, Vec<HalfEdgeId>> {
        &self.edges
    }

    pub fn edge_faces(&self, key: EdgeKey) -> usize {
        self.edges.get(&key).map_or(0, Vec::len)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains_key(&edge_key(a, b))
    }

    pub fn is_border_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edge_faces(edge_key(a, b)) == 1
    }

    /// Vertices sharing an edge with `v`, ascending.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self.vertex_faces[v]
            .iter()
            .flat_map(|&f| self.faces[f])
            .filter(|&w| w != v)
            .collect();
        set.into_iter().collect()
    }

    pub fn duplicate_group(&self, v: VertexId) -> VertexId {
        self.duplicate_group[v]
    }

    pub fn duplicate_groups(&self) -> &[VertexId] {
        &self.duplicate_group
    }

    /// Members of the duplicate group containing `v`, ascending.
    pub fn group_members(&self, v: VertexId) -> Vec<VertexId> {
        match self.group_members.get(&self.duplicate_group[v]) {
            Some(members) => members.clone(),
            None => vec![v],
        }
    }

    /// Groups with more than one member, keyed by representative.
    pub fn nontrivial_groups(&self) -> &BTreeMap<VertexId, Vec<VertexId>> {
        &self.group_members
    }

    pub(crate) fn set_duplicate_groups(&mut self, groups: Vec<VertexId>) {
        debug_assert_eq!(groups.len(), self.vertices.len());
        let mut members: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (v, &g) in groups.iter().enumerate() {
            members.entry(g).or_default().push(v);
        }
        members.retain(|_, m| m.len() > 1);
        self.group_members = members;
        self.duplicate_group = groups;
    }

    pub fn overlap_class(&self, a: VertexId, b: VertexId) -> OverlapClass {
        self.overlap.get(&edge_key(a, b)).copied().unwrap_or_default()
    }

    pub fn overlap_marks(&self) -> &BTreeMap<EdgeKey, OverlapClass> {
        &self.overlap
    }

    pub(crate) fn set_overlap_marks(&mut self, marks: BTreeMap<EdgeKey, OverlapClass>) {
        self.overlap = marks;
    }

    pub fn push_vertex(&mut self, p: Point3<f64>) -> VertexId {
        self.vertices.push(p);
        let id = self.vertices.len() - 1;
        self.duplicate_group.push(id);
        self.vertex_faces.push(Vec::new());
        self.vertex_borders_out.push(Vec::new());
        id
    }

    /// Replaces the face list and rebuilds all connectivity. Overlap marks
    /// are cleared since edges may have changed.
    pub fn set_faces(&mut self, faces: Vec<[VertexId; 3]>) {
        let faces: Vec<[VertexId; 3]> = faces
            .into_iter()
            .filter(|t| {
                let ok = t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
                if !ok {
                    warn!(?t, "dropping triangle with repeated vertex");
                }
                ok
            })
            .collect();
        self.faces = faces;
        self.overlap.clear();
        self.rebuild();
    }

    pub fn add_faces(&mut self, new_faces: &[[VertexId; 3]]) {
        let mut faces = std::mem::take(&mut self.faces);
        faces.extend_from_slice(new_faces);
        self.set_faces(faces);
    }

    /// Rewrites every face reference through `map` (vertex welding).
    pub fn remap_vertices(&mut self, map: &[VertexId]) {
        let faces = self.faces.iter().map(|t| t.map(|v| map[v])).collect();
        self.set_faces(faces);
    }

    fn rebuild(&mut self) {
        let nv = self.vertices.len();
        let nf = self.faces.len();
        self.halfedges.clear();
        self.edges.clear();
        self.vertex_faces = vec![Vec::new(); nv];
        self.vertex_borders_out = vec![Vec::new(); nv];

        for (f, tri) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let h = 3 * f + k;
                self.halfedges.push(HalfEdge {
                    origin: tri[k],
                    target: tri[(k + 1) % 3],
                    twin: Twin::NonManifold,
                    next: Some(3 * f + (k + 1) % 3),
                    prev: Some(3 * f + (k + 2) % 3),
                    face: Some(f),
                });
                self.edges.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push(h);
                self.vertex_faces[tri[k]].push(f);
            }
        }

        // Pair twins greedily by opposite orientation, in ascending id.
        let mut needs_border = Vec::new();
        for (&(lo, _), hes) in &self.edges {
            if hes.len() == 2 {
                // Two faces: always twins, even when the winding disagrees.
                let (a, b) = (hes[0], hes[1]);
                self.halfedges[a].twin = Twin::Paired(b);
                self.halfedges[b].twin = Twin::Paired(a);
                continue;
            }
            if hes.len() == 1 {
                needs_border.push(hes[0]);
                continue;
            }
            let (fwd, bwd): (Vec<HalfEdgeId>, Vec<HalfEdgeId>) = hes.iter().partition(|&&h| self.halfedges[h].origin == lo);
            for (&a, &b) in fwd.iter().zip(&bwd) {
                self.halfedges[a].twin = Twin::Paired(b);
                self.halfedges[b].twin = Twin::Paired(a);
            }
        }
        needs_border.sort_unstable();
        for t in needs_border {
            let id = self.halfedges.len();
            let (o, d) = (self.halfedges[t].origin, self.halfedges[t].target);
            self.halfedges.push(HalfEdge {
                origin: d,
                target: o,
                twin: Twin::Paired(t),
                next: None,
                prev: None,
                face: None,
            });
            self.halfedges[t].twin = Twin::Paired(id);
            self.vertex_borders_out[d].push(id);
        }
        for list in &mut self.vertex_faces {
            list.dedup();
        }

        // Link border half-edges into loops. The successor of a border
        // half-edge ending at v is found by rotating through the face fan
        // at v; broken fans fall back to the lowest unclaimed candidate.
        let mut claimed = vec![false; self.halfedges.len()];
        for b in 3 * nf..self.halfedges.len() {
            let v = self.halfedges[b].target;
            let rotated = self.rotate_to_border(b).filter(|&c| !claimed[c]);
            let succ = rotated.or_else(|| self.vertex_borders_out[v].iter().copied().find(|&c| !claimed[c]));
            if let Some(c) = succ {
                claimed[c] = true;
                self.halfedges[b].next = Some(c);
                self.halfedges[c].prev = Some(b);
            }
        }
    }

    fn rotate_to_border(&self, b: HalfEdgeId) -> Option<HalfEdgeId> {
        let v = self.halfedges[b].target;
        let Twin::Paired(mut g) = self.halfedges[b].twin else {
            return None;
        };
        for _ in 0..=self.vertex_faces[v].len() + 1 {
            let x = self.halfedges[g].prev?;
            let Twin::Paired(y) = self.halfedges[x].twin else {
                return None;
            };
            if self.halfedges[y].origin != v {
                return None;
            }
            if self.halfedges[y].is_border() {
                return Some(y);
            }
            g = y;
        }
        None
    }

    /// Checks the structural invariants of the half-edge records.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let nv = self.vertices.len();
        for (h, he) in self.halfedges.iter().enumerate() {
            if he.origin >= nv || he.target >= nv {
                return Err(format!("half-edge {h} references vertex out of range"));
            }
            if let Twin::Paired(t) = he.twin {
                if self.halfedges[t].twin != Twin::Paired(h) {
                    return Err(format!("twin of twin of {h} is not {h}"));
                }
            }
            if let Some(n) = he.next {
                if self.halfedges[n].prev != Some(h) {
                    return Err(format!("prev(next({h})) != {h}"));
                }
            }
            if let Some(p) = he.prev {
                if self.halfedges[p].next != Some(h) {
                    return Err(format!("next(prev({h})) != {h}"));
                }
            }
            match he.face {
                Some(f) => {
                    let mut cur = h;
                    for _ in 0..3 {
                        cur = self.halfedges[cur].next.ok_or_else(|| format!("face half-edge {h} lacks next"))?;
                    }
                    if cur != h || h / 3 != f {
                        return Err(format!("face cycle at {h} is not a triangle"));
                    }
                }
                None => {
                    if h < 3 * self.faces.len() {
                        return Err(format!("border half-edge {h} inside face range"));
                    }
                    let Twin::Paired(t) = he.twin else {
                        return Err(format!("border half-edge {h} without twin"));
                    };
                    if self.halfedges[t].is_border() {
                        return Err(format!("border half-edge {h} twinned with border"));
                    }
                }
            }
        }
        Ok(())
    }
}
