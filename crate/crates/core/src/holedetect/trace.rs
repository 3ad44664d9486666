//! Border walk: every unvisited border half-edge seeds a walk along the
//! boundary; each corner is kept only if its virtual triangle covers no
//! incident face.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config::RepairConfig;
use crate::error::{MeshError, Result};
use crate::meshcore::{HalfEdgeId, OverlapClass, SurfaceMesh, VertexId};

use super::alpha::corner_passes;
use super::ring::{BorderRing, Provenance, RingEdge};

/// Result of one walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TracedCandidate {
    pub seed: HalfEdgeId,
    /// Half-edges in walk order.
    pub walk: Vec<HalfEdgeId>,
    pub cyclic: bool,
    /// Collected edges; empty when every corner was covered.
    pub ring: BorderRing,
}

pub(crate) struct Tracer<'a> {
    mesh: &'a SurfaceMesh,
    cfg: &'a RepairConfig,
    pub visited: Vec<bool>,
    border_in: BTreeMap<VertexId, Vec<HalfEdgeId>>,
}

impl<'a> Tracer<'a> {
    pub fn new(mesh: &'a SurfaceMesh, cfg: &'a RepairConfig) -> Self {
        let mut border_in: BTreeMap<VertexId, Vec<HalfEdgeId>> = BTreeMap::new();
        for h in mesh.border_halfedges() {
            border_in.entry(mesh.halfedge(h).target).or_default().push(h);
        }
        Self {
            mesh,
            cfg,
            visited: vec![false; mesh.halfedges().len()],
            border_in,
        }
    }

    pub fn is_valid(&self, h: HalfEdgeId) -> bool {
        let he = self.mesh.halfedge(h);
        he.is_border() && self.mesh.overlap_class(he.origin, he.target) != OverlapClass::Degenerate
    }

    /// Next border half-edge; across a broken boundary, the lowest-id
    /// unvisited border half-edge leaving the target's duplicate group.
    fn successor(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let he = self.mesh.halfedge(h);
        if let Some(n) = he.next {
            return Some(n);
        }
        self.mesh
            .group_members(he.target)
            .into_iter()
            .flat_map(|v| self.mesh.border_out(v).iter().copied())
            .filter(|&c| c != h && !self.visited[c])
            .min()
    }

    /// Previous border half-edge, or the lowest-id border half-edge
    /// entering the origin's duplicate group.
    fn predecessor(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let he = self.mesh.halfedge(h);
        if let Some(p) = he.prev {
            return Some(p);
        }
        self.mesh
            .group_members(he.origin)
            .into_iter()
            .flat_map(|v| self.border_in.get(&v).into_iter().flatten().copied())
            .filter(|&c| c != h)
            .min()
    }

    pub fn walk(&mut self, seed: HalfEdgeId) -> Result<TracedCandidate> {
        let limit = self.mesh.halfedges().len();
        // Rewind so that broken chains are walked from their beginning.
        // A chain that loops back on itself is a cycle: start at the seed.
        let mut start = seed;
        let mut seen = BTreeSet::from([seed]);
        while let Some(p) = self.predecessor(start).filter(|&p| !self.visited[p]) {
            if !seen.insert(p) {
                start = seed;
                break;
            }
            start = p;
            if seen.len() > limit {
                return Err(MeshError::CycleDetected { limit });
            }
        }

        let mut walk = vec![start];
        self.visited[start] = true;
        let mut cyclic = false;
        let mut cur = start;
        while let Some(n) = self.successor(cur) {
            if n == start {
                cyclic = true;
                break;
            }
            if self.visited[n] {
                break;
            }
            self.visited[n] = true;
            walk.push(n);
            cur = n;
            if walk.len() > limit {
                return Err(MeshError::CycleDetected { limit });
            }
        }
        let ring = self.collect(&walk, cyclic);
        Ok(TracedCandidate { seed, walk, cyclic, ring })
    }

    fn collect(&self, walk: &[HalfEdgeId], cyclic: bool) -> BorderRing {
        let m = self.mesh;
        let n = walk.len();
        let mut verts: Vec<VertexId> = walk.iter().map(|&h| m.halfedge(h).origin).collect();
        let mut kept: BTreeSet<HalfEdgeId> = BTreeSet::new();
        if cyclic {
            let doubled: Vec<VertexId> = verts.iter().chain(&verts).copied().collect();
            let reversed: Vec<VertexId> = doubled.iter().rev().copied().collect();
            for i in 0..n {
                let (hp, h) = (walk[(i + n - 1) % n], walk[i]);
                if !(self.is_valid(hp) && self.is_valid(h)) || n < 2 {
                    continue;
                }
                let fwd = &doubled[i + 1..i + n];
                let back = &reversed[n - i..2 * n - i - 1];
                if corner_passes(m, back, verts[i], fwd, self.cfg) {
                    kept.insert(hp);
                    kept.insert(h);
                }
            }
        } else {
            verts.push(m.halfedge(walk[n - 1]).target);
            let reversed: Vec<VertexId> = verts.iter().rev().copied().collect();
            for i in 0..n {
                let h = walk[i];
                let (hp, back): (HalfEdgeId, Vec<VertexId>) = if i == 0 {
                    match self.predecessor(h) {
                        Some(p) if p != h => (p, vec![m.halfedge(p).origin]),
                        _ => continue,
                    }
                } else {
                    (walk[i - 1], reversed[n - i + 1..].to_vec())
                };
                if !(self.is_valid(hp) && self.is_valid(h)) {
                    continue;
                }
                if corner_passes(m, &back, verts[i], &verts[i + 1..], self.cfg) {
                    kept.insert(hp);
                    kept.insert(h);
                }
            }
        }
        let edges = kept
            .into_iter()
            .map(|h| {
                let he = m.halfedge(h);
                RingEdge {
                    from: he.origin,
                    to: he.target,
                    provenance: Provenance::Traversed,
                }
            })
            .collect();
        BorderRing::new(edges, m)
    }
}

/// Walks every border loop once. Candidates are returned in seed order,
/// including those whose corners were all covered (empty ring).
pub fn trace_border_rings(mesh: &SurfaceMesh, cfg: &RepairConfig) -> Result<Vec<TracedCandidate>> {
    let mut tracer = Tracer::new(mesh, cfg);
    let mut out = Vec::new();
    for h in mesh.border_halfedges() {
        if tracer.visited[h] || !tracer.is_valid(h) {
            continue;
        }
        out.push(tracer.walk(h)?);
    }
    Ok(out)
}
