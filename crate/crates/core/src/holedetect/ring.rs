use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{MeshError, Result};
use crate::meshcore::{edge_key, EdgeKey, SurfaceMesh, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Traversed,
    OverlapCompleted,
    NonmanifoldCompleted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RingEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub provenance: Provenance,
}

impl RingEdge {
    pub fn key(&self) -> EdgeKey {
        edge_key(self.from, self.to)
    }
}

/// Hole boundary candidate. Edges are unordered until [`reorder_ring`]
/// runs; `closed` is evaluated on duplicate groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BorderRing {
    pub edges: Vec<RingEdge>,
    pub closed: bool,
}

impl BorderRing {
    pub fn new(edges: Vec<RingEdge>, mesh: &SurfaceMesh) -> Self {
        let mut ring = Self { edges, closed: false };
        ring.refresh(mesh);
        ring
    }

    pub(crate) fn refresh(&mut self, mesh: &SurfaceMesh) {
        self.closed = RingGraph::new(&self.edges, mesh).is_closed();
    }

    /// Distinct vertex ids, ascending.
    pub fn vertex_ids(&self) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self.edges.iter().flat_map(|e| [e.from, e.to]).collect();
        set.into_iter().collect()
    }

    pub fn lowest_vertex(&self) -> Option<VertexId> {
        self.edges.iter().flat_map(|e| [e.from, e.to]).min()
    }

    pub fn count(&self, provenance: Provenance) -> usize {
        self.edges.iter().filter(|e| e.provenance == provenance).count()
    }

    pub fn contains_edge(&self, a: VertexId, b: VertexId) -> bool {
        let k = edge_key(a, b);
        self.edges.iter().any(|e| e.key() == k)
    }
}

/// Ring edges viewed as a graph on duplicate groups.
pub(crate) struct RingGraph {
    pub incident: BTreeMap<VertexId, Vec<usize>>,
    group_of: BTreeMap<VertexId, VertexId>,
    edge_groups: Vec<(VertexId, VertexId)>,
}

impl RingGraph {
    pub fn new(edges: &[RingEdge], mesh: &SurfaceMesh) -> Self {
        let mut incident: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        let mut group_of = BTreeMap::new();
        let mut edge_groups = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let (ga, gb) = (mesh.duplicate_group(e.from), mesh.duplicate_group(e.to));
            group_of.insert(e.from, ga);
            group_of.insert(e.to, gb);
            edge_groups.push((ga, gb));
            incident.entry(ga).or_default().push(i);
            if gb != ga {
                incident.entry(gb).or_default().push(i);
            }
        }
        Self {
            incident,
            group_of,
            edge_groups,
        }
    }

    pub fn group(&self, v: VertexId) -> VertexId {
        self.group_of[&v]
    }

    pub fn degree(&self, g: VertexId) -> usize {
        self.incident.get(&g).map_or(0, Vec::len)
    }

    /// Group at the other end of edge `e` seen from group `g`.
    pub fn other(&self, e: usize, g: VertexId) -> VertexId {
        let (a, b) = self.edge_groups[e];
        if a == g {
            b
        } else {
            a
        }
    }

    pub fn endpoints(&self) -> Vec<VertexId> {
        self.incident.iter().filter(|(_, es)| es.len() == 1).map(|(&g, _)| g).collect()
    }

    fn connected(&self) -> bool {
        let Some(&start) = self.incident.keys().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(g) = stack.pop() {
            for &e in &self.incident[&g] {
                let o = self.other(e, g);
                if seen.insert(o) {
                    stack.push(o);
                }
            }
        }
        seen.len() == self.incident.len()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_groups.len() >= 3
            && self.edge_groups.iter().all(|(a, b)| a != b)
            && self.incident.values().all(|es| es.len() == 2)
            && self.connected()
    }
}

/// Orders a closed ring into one cycle. The cycle starts at the ring's
/// lowest vertex id and heads toward the neighbor with the lower id; each
/// edge is oriented along the traversal.
pub fn reorder_ring(ring: &BorderRing, mesh: &SurfaceMesh) -> Result<BorderRing> {
    let graph = RingGraph::new(&ring.edges, mesh);
    let lowest_in = |g: VertexId| -> VertexId {
        ring.edges
            .iter()
            .flat_map(|e| [e.from, e.to])
            .filter(|&v| graph.group(v) == g)
            .min()
            .unwrap_or(g)
    };
    for (&g, es) in &graph.incident {
        if es.len() != 2 {
            return Err(MeshError::AmbiguousRing { vertex: lowest_in(g) });
        }
    }
    let Some(start_vertex) = ring.lowest_vertex() else {
        return Err(MeshError::DegenerateGeometry("empty ring".into()));
    };
    let start = graph.group(start_vertex);
    // Vertex on the far side of edge `e` from group `g`.
    let far_vertex = |e: usize, g: VertexId| {
        let edge = &ring.edges[e];
        if graph.group(edge.from) == g {
            edge.to
        } else {
            edge.from
        }
    };
    let near_vertex = |e: usize, g: VertexId| {
        let edge = &ring.edges[e];
        if graph.group(edge.from) == g {
            edge.from
        } else {
            edge.to
        }
    };
    let [e0, e1] = [graph.incident[&start][0], graph.incident[&start][1]];
    let mut cur_edge = if far_vertex(e0, start) <= far_vertex(e1, start) { e0 } else { e1 };
    let mut cur_group = start;
    let mut out = Vec::with_capacity(ring.edges.len());
    let mut used = vec![false; ring.edges.len()];
    loop {
        used[cur_edge] = true;
        out.push(RingEdge {
            from: near_vertex(cur_edge, cur_group),
            to: far_vertex(cur_edge, cur_group),
            provenance: ring.edges[cur_edge].provenance,
        });
        let next_group = graph.other(cur_edge, cur_group);
        if next_group == start {
            break;
        }
        let Some(&next_edge) = graph.incident[&next_group].iter().find(|&&e| !used[e]) else {
            return Err(MeshError::AmbiguousRing {
                vertex: lowest_in(next_group),
            });
        };
        cur_edge = next_edge;
        cur_group = next_group;
    }
    if out.len() != ring.edges.len() {
        // A second cycle that does not touch the first.
        let stray = (0..ring.edges.len()).find(|&e| !used[e]).expect("unused edge");
        return Err(MeshError::AmbiguousRing {
            vertex: ring.edges[stray].from.min(ring.edges[stray].to),
        });
    }
    Ok(BorderRing { edges: out, closed: true })
}
