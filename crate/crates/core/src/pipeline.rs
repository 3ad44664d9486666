//! The three phases run back to back on one mesh.

use std::time::Instant;

use serde::Serialize;
use tracing::info;

use crate::config::RepairConfig;
use crate::error::Result;
use crate::holedetect::{detect_holes, HoleSet};
use crate::meshcore::{euler_and_borders, SurfaceMesh, TopologySummary};
use crate::preprocess::{preprocess, PreprocessReport};
use crate::remesh::{fill_all, FillResult};

/// Wall-clock time spent per phase, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub preprocess_ms: f64,
    pub detect_ms: f64,
    pub remesh_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub mesh: SurfaceMesh,
    pub input_faces: usize,
    pub before: TopologySummary,
    pub after: TopologySummary,
    pub preprocess: PreprocessReport,
    pub holes: HoleSet,
    pub fills: Vec<FillResult>,
    pub timings: Timings,
}

impl RepairOutcome {
    pub fn faces_added(&self) -> usize {
        self.fills.iter().map(|f| f.added).sum()
    }

    /// Face count predicted from the phase reports.
    pub fn expected_output_faces(&self) -> usize {
        let si = &self.preprocess.self_intersections;
        self.input_faces + si.faces_added + self.faces_added() - si.faces_removed
    }

    pub fn holes_filled(&self) -> usize {
        self.fills.iter().filter(|f| f.is_complete()).count()
    }

    /// True holes left open or partly filled, plus unclosable rings.
    pub fn holes_remaining(&self) -> usize {
        self.fills.len() - self.holes_filled() + self.holes.unclosable().count()
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Preprocess, detect and fill. Vertex coordinates of the input are never
/// changed; self-intersection splitting only appends vertices.
pub fn repair(mut mesh: SurfaceMesh, cfg: &RepairConfig) -> Result<RepairOutcome> {
    cfg.validate()?;
    let input_faces = mesh.num_faces();
    let before = euler_and_borders(&mesh);

    let t = Instant::now();
    let pre = preprocess(&mut mesh, cfg);
    let preprocess_ms = elapsed_ms(t);

    let t = Instant::now();
    let holes = detect_holes(&mesh, cfg)?;
    let detect_ms = elapsed_ms(t);

    let t = Instant::now();
    let fills = fill_all(&mut mesh, &holes, cfg);
    let remesh_ms = elapsed_ms(t);

    let after = euler_and_borders(&mesh);
    info!(
        holes = holes.holes.len(),
        rejected = holes.rejected.len(),
        borders = after.border_halfedges,
        "repair finished"
    );
    Ok(RepairOutcome {
        mesh,
        input_faces,
        before,
        after,
        preprocess: pre,
        holes,
        fills,
        timings: Timings {
            preprocess_ms,
            detect_ms,
            remesh_ms,
        },
    })
}
