use std::collections::BTreeSet;

use serde::Serialize;

use crate::config::RepairConfig;
use crate::holedetect::{HoleSet, RingDiagnostic};
use crate::meshcore::{edge_key, euler_and_borders, nonmanifold_edges, OverlapClass, SurfaceMesh, TopologySummary, VertexId};
use crate::pipeline::{RepairOutcome, Timings};
use crate::preprocess::{DuplicateGroups, OverlapCounts, OverlapMarks, PreprocessReport};
use crate::remesh::FillResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct FaceCounts {
    pub input: usize,
    pub output: usize,
    pub self_intersection_added: usize,
    pub self_intersection_removed: usize,
    pub fill_added: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TopologyChange {
    pub before: TopologySummary,
    pub after: TopologySummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct Unfillable {
    pub lowest_vertex: Option<VertexId>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleSummary {
    pub detected: usize,
    pub filled: usize,
    pub remaining: usize,
    pub unfillable: Vec<Unfillable>,
    pub rings: Vec<RingDiagnostic>,
    pub fills: Vec<FillResult>,
}

/// JSON report of one `repair` run. Field order is fixed so identical runs
/// give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RepairReport {
    pub schema_version: u32,
    pub input: String,
    pub config: RepairConfig,
    pub faces: FaceCounts,
    pub topology: TopologyChange,
    pub preprocess: PreprocessReport,
    pub holes: HoleSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn kebab<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(serde_json::Value::Object(m)) => match (m.get("kind"), m.get("vertex")) {
            (Some(k), Some(v)) => format!("{} at vertex {v}", k.as_str().unwrap_or_default()),
            (Some(k), None) => k.as_str().unwrap_or_default().to_string(),
            _ => String::new(),
        },
        _ => String::new(),
    }
}

impl RepairReport {
    pub fn new(input: &str, cfg: &RepairConfig, out: &RepairOutcome, timings: bool) -> Self {
        let si = &out.preprocess.self_intersections;
        let mut unfillable: Vec<Unfillable> = out
            .fills
            .iter()
            .filter(|f| !f.is_complete())
            .map(|f| Unfillable {
                lowest_vertex: f.ring.iter().min().copied(),
                reason: match f.failure {
                    Some(failure) => kebab(&failure),
                    None => "faces-rejected".into(),
                },
            })
            .collect();
        unfillable.extend(out.holes.unclosable().map(|r| Unfillable {
            lowest_vertex: r.edges.iter().flat_map(|e| [e.from, e.to]).min(),
            reason: kebab(&r.reason),
        }));
        Self {
            schema_version: SCHEMA_VERSION,
            input: input.to_string(),
            config: *cfg,
            faces: FaceCounts {
                input: out.input_faces,
                output: out.mesh.num_faces(),
                self_intersection_added: si.faces_added,
                self_intersection_removed: si.faces_removed,
                fill_added: out.faces_added(),
            },
            topology: TopologyChange {
                before: out.before,
                after: out.after,
            },
            preprocess: out.preprocess,
            holes: HoleSummary {
                detected: out.holes.holes.len(),
                filled: out.holes_filled(),
                remaining: out.holes_remaining(),
                unfillable,
                rings: out.holes.diagnostics(),
                fills: out.fills.clone(),
            },
            timings: timings.then_some(out.timings),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub schema_version: u32,
    pub input: String,
    pub vertices: usize,
    pub faces: usize,
    pub border_halfedges: usize,
    pub border_edges: usize,
    pub nonmanifold_edges: usize,
    pub duplicate_groups: usize,
    pub duplicated_vertices: usize,
    pub overlap_edges: OverlapCounts,
    pub components: usize,
    pub euler_characteristic: i64,
    pub true_holes: usize,
    pub pseudo_holes: usize,
    pub unclosable_rings: usize,
}

impl ValidateReport {
    pub fn new(input: &str, mesh: &SurfaceMesh, groups: &DuplicateGroups, marks: &OverlapMarks, holes: &HoleSet) -> Self {
        let topo = euler_and_borders(mesh);
        let border_edges = mesh
            .border_halfedges()
            .map(|h| {
                let he = mesh.halfedge(h);
                edge_key(he.origin, he.target)
            })
            .collect::<BTreeSet<_>>()
            .len();
        let unclosable = holes.unclosable().count();
        Self {
            schema_version: SCHEMA_VERSION,
            input: input.to_string(),
            vertices: mesh.num_vertices(),
            faces: mesh.num_faces(),
            border_halfedges: topo.border_halfedges,
            border_edges,
            nonmanifold_edges: nonmanifold_edges(mesh).len(),
            duplicate_groups: groups.nontrivial_count(),
            duplicated_vertices: groups.grouped_vertices(),
            overlap_edges: OverlapCounts {
                degenerate: marks.count(OverlapClass::Degenerate),
                same_endpoints: marks.count(OverlapClass::SameEndpoints),
                collinear_distinct: marks.count(OverlapClass::CollinearDistinct),
            },
            components: topo.components,
            euler_characteristic: topo.euler_characteristic,
            true_holes: holes.holes.len(),
            pseudo_holes: holes.rejected.len() - unclosable,
            unclosable_rings: unclosable,
        }
    }
}
