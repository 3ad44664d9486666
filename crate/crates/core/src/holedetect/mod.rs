//! Phase two: find true holes. Border loops are walked, pseudo-holes are
//! rejected with the virtual-triangle test, broken rings are completed
//! across overlapping and non-manifold edges, and closed rings are put in
//! canonical order.

mod alpha;
mod complete;
mod intersect;
mod ring;
mod trace;

use std::collections::BTreeSet;

use serde::Serialize;
use tracing::debug;

pub use complete::{complete_ring_nonmanifold, complete_ring_overlap, Completion};
pub use intersect::{intersection_measures, intersection_test, VirtualTriangle};
pub use ring::{reorder_ring, BorderRing, Provenance, RingEdge};
pub use trace::{trace_border_rings, TracedCandidate};

use crate::config::RepairConfig;
use crate::error::{MeshError, Result};
use crate::meshcore::{fit_plane, EdgeKey, HalfEdgeId, SurfaceMesh, VertexId};

/// Why a candidate ring is not a true hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Rejection {
    /// Every virtual triangle lay on an existing face.
    PseudoHole,
    /// All ring vertices are collinear; there is no area to fill.
    Degenerate,
    /// Neither completion strategy found an edge to extend the ring.
    NoCandidates,
    /// The ring or its completion candidates do not share a plane.
    NoncoplanarCandidates,
    IterationLimit,
    /// The edges branch instead of forming one cycle.
    Ambiguous {
        vertex: VertexId,
    },
    /// The ring reuses edges of a hole found earlier.
    SharedEdges,
}

impl Rejection {
    /// Rejections that leave a real gap unfilled.
    pub fn is_unclosable(&self) -> bool {
        matches!(
            self,
            Rejection::NoCandidates | Rejection::NoncoplanarCandidates | Rejection::IterationLimit | Rejection::Ambiguous { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub seed: HalfEdgeId,
    pub edges: Vec<RingEdge>,
    pub reason: Rejection,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HoleSet {
    /// Closed, ordered rings, ascending by lowest vertex id.
    pub holes: Vec<BorderRing>,
    pub rejected: Vec<RejectedCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingDiagnostic {
    pub classification: &'static str,
    pub vertices: Vec<VertexId>,
    pub edge_count: usize,
    pub traversed: usize,
    pub overlap_completed: usize,
    pub nonmanifold_completed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Rejection>,
}

impl RingDiagnostic {
    fn new(ring_edges: &[RingEdge], classification: &'static str, reason: Option<Rejection>) -> Self {
        let ring = BorderRing {
            edges: ring_edges.to_vec(),
            closed: false,
        };
        Self {
            classification,
            vertices: ring.edges.iter().map(|e| e.from).collect(),
            edge_count: ring.edges.len(),
            traversed: ring.count(Provenance::Traversed),
            overlap_completed: ring.count(Provenance::OverlapCompleted),
            nonmanifold_completed: ring.count(Provenance::NonmanifoldCompleted),
            reason,
        }
    }
}

impl HoleSet {
    pub fn unclosable(&self) -> impl Iterator<Item = &RejectedCandidate> {
        self.rejected.iter().filter(|r| r.reason.is_unclosable())
    }

    pub fn diagnostics(&self) -> Vec<RingDiagnostic> {
        let holes = self.holes.iter().map(|r| RingDiagnostic::new(&r.edges, "true-hole", None));
        let rejected = self.rejected.iter().map(|r| {
            let class = if r.reason.is_unclosable() { "unclosable" } else { "pseudo-hole" };
            RingDiagnostic::new(&r.edges, class, Some(r.reason))
        });
        holes.chain(rejected).collect()
    }
}

/// Runs completion on an open ring: overlap edges first, then
/// non-manifold edges. Returns the ring and, if still open, the reason.
fn close_ring(ring: BorderRing, mesh: &SurfaceMesh, cfg: &RepairConfig) -> (BorderRing, Option<Rejection>) {
    if ring.closed {
        return (ring, None);
    }
    let first = complete_ring_overlap(&ring, mesh, cfg);
    if first.ring.closed {
        return (first.ring, None);
    }
    let second = complete_ring_nonmanifold(&first.ring, mesh, cfg);
    let reason = second.stalled.or(first.stalled).unwrap_or(Rejection::NoCandidates);
    if second.ring.closed {
        (second.ring, None)
    } else {
        (second.ring, Some(reason))
    }
}

/// Trace, complete and order every candidate ring. Closed rings are true
/// holes; everything else is reported in `rejected`.
pub fn detect_holes(mesh: &SurfaceMesh, cfg: &RepairConfig) -> Result<HoleSet> {
    let mut tracer = trace::Tracer::new(mesh, cfg);
    let mut set = HoleSet::default();
    let mut claimed: BTreeSet<EdgeKey> = BTreeSet::new();
    let seeds: Vec<HalfEdgeId> = mesh.border_halfedges().collect();
    for h in seeds {
        if tracer.visited[h] || !tracer.is_valid(h) {
            continue;
        }
        let cand = tracer.walk(h)?;
        let reject = |set: &mut HoleSet, edges: Vec<RingEdge>, reason| {
            debug!(seed = h, ?reason, "candidate rejected");
            set.rejected.push(RejectedCandidate { seed: h, edges, reason });
        };
        if cand.ring.edges.is_empty() {
            reject(&mut set, Vec::new(), Rejection::PseudoHole);
            continue;
        }
        let (ring, stalled) = close_ring(cand.ring, mesh, cfg);
        // Border half-edges pulled in by completion are not walked again.
        for e in &ring.edges {
            for &b in mesh.border_out(e.from).iter().chain(mesh.border_out(e.to)) {
                let he = mesh.halfedge(b);
                if e.key() == crate::meshcore::edge_key(he.origin, he.target) {
                    tracer.visited[b] = true;
                }
            }
        }
        if let Some(reason) = stalled {
            reject(&mut set, ring.edges, reason);
            continue;
        }
        let ordered = match reorder_ring(&ring, mesh) {
            Ok(r) => r,
            Err(MeshError::AmbiguousRing { vertex }) => {
                reject(&mut set, ring.edges, Rejection::Ambiguous { vertex });
                continue;
            }
            Err(e) => return Err(e),
        };
        let points: Vec<_> = ordered.vertex_ids().iter().map(|&v| mesh.vertex(v)).collect();
        if fit_plane(&points).is_err() {
            reject(&mut set, ordered.edges, Rejection::Degenerate);
            continue;
        }
        if ordered.edges.iter().any(|e| claimed.contains(&e.key())) {
            reject(&mut set, ordered.edges, Rejection::SharedEdges);
            continue;
        }
        claimed.extend(ordered.edges.iter().map(RingEdge::key));
        set.holes.push(ordered);
    }
    set.holes.sort_by_key(|r| r.lowest_vertex());
    Ok(set)
}
