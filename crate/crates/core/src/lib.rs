//! Hole detection and filling for defective LoD2 building meshes.
//!
//! The pipeline has three phases, each usable on its own:
//!
//! 1. [`preprocess`] resolves self-intersections, stitches seams made of
//!    duplicated vertices, and marks duplicates and overlapping edges.
//! 2. [`holedetect`] walks border half-edges, rejects pseudo-holes with a
//!    virtual-triangle test, completes broken rings and orders them.
//! 3. [`remesh`] fills every closed ring with a constrained Delaunay
//!    triangulation over the ring's own vertices.
//!
//! [`pipeline::repair`] runs all three.

pub mod cli;
pub mod config;
pub mod error;
pub mod holedetect;
pub mod meshcore;
pub mod pipeline;
pub mod preprocess;
pub mod remesh;
pub mod synthkit;

pub use config::RepairConfig;
pub use error::{MeshError, Result};
pub use meshcore::SurfaceMesh;
