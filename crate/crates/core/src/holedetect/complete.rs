//! Closing rings that the border walk left open.

use std::collections::BTreeSet;

use tracing::debug;

use crate::config::RepairConfig;
use crate::meshcore::{edge_key, fit_plane, point_plane_distance, OverlapClass, SurfaceMesh, VertexId};

use super::alpha::corner_passes;
use super::ring::{BorderRing, Provenance, RingEdge, RingGraph};
use super::Rejection;

/// Ring after a completion strategy, with the reason it stalled if it is
/// still open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub ring: BorderRing,
    pub stalled: Option<Rejection>,
}

/// Ring vertices walking away from endpoint group `g`, nearest first.
fn back_path(ring: &BorderRing, graph: &RingGraph, g: VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut cur = g;
    let mut used = BTreeSet::new();
    while let Some(&e) = graph.incident.get(&cur).and_then(|es| es.iter().find(|e| !used.contains(*e))) {
        used.insert(e);
        let edge = &ring.edges[e];
        out.push(if graph.group(edge.from) == cur { edge.to } else { edge.from });
        cur = graph.other(e, cur);
        if graph.degree(cur) != 2 {
            break;
        }
    }
    out
}

/// Vertex of the ring lying in group `g` (lowest id).
fn ring_vertex(ring: &BorderRing, graph: &RingGraph, g: VertexId) -> VertexId {
    ring.edges
        .iter()
        .flat_map(|e| [e.from, e.to])
        .filter(|&v| graph.group(v) == g)
        .min()
        .expect("group belongs to ring")
}

fn overlaps_ring_edge(mesh: &SurfaceMesh, ring: &BorderRing, a: VertexId, b: VertexId) -> bool {
    let g = |v: VertexId| mesh.duplicate_group(v);
    let key = edge_key(g(a), g(b));
    match mesh.overlap_class(a, b) {
        OverlapClass::SameEndpoints => ring.edges.iter().any(|e| edge_key(g(e.from), g(e.to)) == key),
        OverlapClass::CollinearDistinct => ring.edges.iter().any(|e| {
            let class = mesh.overlap_class(e.from, e.to);
            class == OverlapClass::CollinearDistinct && (g(e.from) == g(a) || g(e.from) == g(b) || g(e.to) == g(a) || g(e.to) == g(b))
        }),
        _ => false,
    }
}

/// Strategy 1: extend each open end along untraversed incident edges of
/// its duplicate group that are border edges or overlap a ring edge.
pub fn complete_ring_overlap(ring: &BorderRing, mesh: &SurfaceMesh, cfg: &RepairConfig) -> Completion {
    let mut ring = ring.clone();
    for _ in 0..cfg.max_completion_iterations {
        if ring.closed {
            break;
        }
        let mut progress = false;
        let endpoints = RingGraph::new(&ring.edges, mesh).endpoints();
        if endpoints.is_empty() {
            break;
        }
        for g in endpoints {
            let graph = RingGraph::new(&ring.edges, mesh);
            if graph.degree(g) != 1 {
                continue;
            }
            let ends: BTreeSet<VertexId> = graph.endpoints().into_iter().filter(|&e| e != g).collect();
            let back = back_path(&ring, &graph, g);
            let mut candidates: Vec<(VertexId, VertexId)> = Vec::new();
            for u in mesh.group_members(g) {
                for w in mesh.neighbors(u) {
                    let gw = mesh.duplicate_group(w);
                    if gw == g || ring.contains_edge(u, w) || graph.incident.get(&gw).map_or(0, Vec::len) > 1 {
                        continue;
                    }
                    if mesh.is_border_edge(u, w) || overlaps_ring_edge(mesh, &ring, u, w) {
                        candidates.push((u, w));
                    }
                }
            }
            candidates.sort_unstable_by_key(|&(u, w)| (edge_key(u, w), u));
            let pick = candidates
                .into_iter()
                .find(|&(u, w)| ends.contains(&mesh.duplicate_group(w)) || corner_passes(mesh, &back, u, &[w], cfg));
            if let Some((u, w)) = pick {
                debug!(u, w, "overlap completion");
                ring.edges.push(oriented_edge(mesh, u, w, Provenance::OverlapCompleted));
                ring.refresh(mesh);
                progress = true;
                if ring.closed {
                    break;
                }
            }
        }
        if !progress {
            return Completion {
                stalled: Some(Rejection::NoCandidates),
                ring,
            };
        }
    }
    let stalled = (!ring.closed).then_some(Rejection::IterationLimit);
    Completion { ring, stalled }
}

/// Keeps the border half-edge direction when the edge has one.
fn oriented_edge(mesh: &SurfaceMesh, u: VertexId, w: VertexId, provenance: Provenance) -> RingEdge {
    let border_from_w = mesh.border_out(w).iter().any(|&h| mesh.halfedge(h).target == u);
    if border_from_w {
        RingEdge {
            from: w,
            to: u,
            provenance,
        }
    } else {
        RingEdge {
            from: u,
            to: w,
            provenance,
        }
    }
}

/// Strategy 2: when the ring and the vertices reachable from its ends over
/// non-border edges share one plane, append the nearest such vertex whose
/// virtual triangle is uncovered.
pub fn complete_ring_nonmanifold(ring: &BorderRing, mesh: &SurfaceMesh, cfg: &RepairConfig) -> Completion {
    let mut ring = ring.clone();
    let tol = cfg.coplanarity_tolerance;
    for _ in 0..cfg.max_completion_iterations {
        if ring.closed {
            break;
        }
        let points: Vec<_> = ring.vertex_ids().iter().map(|&v| mesh.vertex(v)).collect();
        let plane = fit_plane(&points).ok();
        if let Some(pl) = &plane {
            if pl.max_residual(&points) > tol {
                return Completion {
                    ring,
                    stalled: Some(Rejection::NoncoplanarCandidates),
                };
            }
        }
        let endpoints = RingGraph::new(&ring.edges, mesh).endpoints();
        if endpoints.is_empty() {
            break;
        }
        let mut progress = false;
        let mut off_plane = false;
        for g in endpoints {
            let graph = RingGraph::new(&ring.edges, mesh);
            if graph.degree(g) != 1 {
                continue;
            }
            let back = back_path(&ring, &graph, g);
            let anchor = ring_vertex(&ring, &graph, g);
            let mut candidates: Vec<(f64, VertexId, VertexId)> = Vec::new();
            let mut any = false;
            for u in mesh.group_members(g) {
                for w in mesh.neighbors(u) {
                    let gw = mesh.duplicate_group(w);
                    if gw == g || ring.contains_edge(u, w) || mesh.is_border_edge(u, w) || graph.degree(gw) > 1 {
                        continue;
                    }
                    any = true;
                    if plane.as_ref().is_some_and(|pl| point_plane_distance(&mesh.vertex(w), pl) > tol) {
                        continue;
                    }
                    candidates.push(((mesh.vertex(w) - mesh.vertex(anchor)).norm(), w, u));
                }
            }
            if any && candidates.is_empty() {
                off_plane = true;
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let pick = candidates.into_iter().find(|&(_, w, u)| corner_passes(mesh, &back, u, &[w], cfg));
            if let Some((d, w, u)) = pick {
                debug!(u, w, d, "non-manifold completion");
                ring.edges.push(RingEdge {
                    from: u,
                    to: w,
                    provenance: Provenance::NonmanifoldCompleted,
                });
                ring.refresh(mesh);
                progress = true;
                if ring.closed {
                    break;
                }
            }
        }
        if !progress {
            let reason = if off_plane {
                Rejection::NoncoplanarCandidates
            } else {
                Rejection::NoCandidates
            };
            return Completion {
                ring,
                stalled: Some(reason),
            };
        }
    }
    let stalled = (!ring.closed).then_some(Rejection::IterationLimit);
    Completion { ring, stalled }
}
