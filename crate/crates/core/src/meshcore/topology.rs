use std::collections::BTreeSet;

use serde::Serialize;

use super::halfedge::{edge_key, SurfaceMesh, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TopologySummary {
    pub euler_characteristic: i64,
    pub border_halfedges: usize,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub border_halfedges: usize,
}

/// V − E + F over referenced vertices and undirected edges, the number of
/// border half-edges, and the number of vertex-connected components.
pub fn euler_and_borders(mesh: &SurfaceMesh) -> TopologySummary {
    let v = (0..mesh.num_vertices()).filter(|&v| mesh.is_referenced(v)).count() as i64;
    let e = mesh.edges().len() as i64;
    let f = mesh.num_faces() as i64;
    TopologySummary {
        euler_characteristic: v - e + f,
        border_halfedges: mesh.num_border_halfedges(),
        components: component_labels(mesh).1,
    }
}

/// Component label per vertex (unreferenced vertices get `usize::MAX`) and
/// the number of components. Labels follow ascending lowest vertex id.
pub fn component_labels(mesh: &SurfaceMesh) -> (Vec<usize>, usize) {
    let n = mesh.num_vertices();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if label[start] != usize::MAX || !mesh.is_referenced(start) {
            continue;
        }
        let mut stack = vec![start];
        label[start] = count;
        while let Some(v) = stack.pop() {
            for w in mesh.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Euler characteristic and border count of each connected component.
pub fn component_topology(mesh: &SurfaceMesh) -> Vec<ComponentTopology> {
    let (label, count) = component_labels(mesh);
    let mut comps = vec![
        ComponentTopology {
            vertices: 0,
            edges: 0,
            faces: 0,
            euler_characteristic: 0,
            border_halfedges: 0,
        };
        count
    ];
    for &l in &label {
        if l != usize::MAX {
            comps[l].vertices += 1;
        }
    }
    for &(a, _) in mesh.edges().keys() {
        comps[label[a]].edges += 1;
    }
    for f in mesh.faces() {
        comps[label[f[0]]].faces += 1;
    }
    for b in mesh.border_halfedges() {
        comps[label[mesh.halfedge(b).origin]].border_halfedges += 1;
    }
    for c in &mut comps {
        c.euler_characteristic = c.vertices as i64 - c.edges as i64 + c.faces as i64;
    }
    comps
}

/// Undirected edges carried by more than two faces.
pub fn nonmanifold_edges(mesh: &SurfaceMesh) -> BTreeSet<(VertexId, VertexId)> {
    mesh.edges()
        .iter()
        .filter(|(_, hes)| hes.len() > 2)
        .map(|(&(a, b), _)| edge_key(a, b))
        .collect()
}
