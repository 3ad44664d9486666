//! Mesh representation, OBJ I/O and the geometric primitives shared by
//! every repair phase.

mod geometry;
mod halfedge;
mod obj;
mod topology;
mod tritri;

pub use geometry::{
    fit_plane, orient2, point_plane_distance, polygon_signed_area, project_to_plane, triangle_area, triangle_overlap_area, Plane, Triangle2,
};
pub use halfedge::{edge_key, EdgeKey, FaceId, HalfEdge, HalfEdgeId, OverlapClass, SurfaceMesh, Twin, VertexId};
pub use obj::{fmt_sig, load_obj, save_obj, save_obj_lines};
pub use topology::{component_labels, component_topology, euler_and_borders, nonmanifold_edges, ComponentTopology, TopologySummary};
pub use tritri::{faces_conflict, intersect_triangles, segment_on_edge, TriTriIntersection};

pub use nalgebra::{Point2, Point3, Vector3};
