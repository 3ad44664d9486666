use nalgebra::Point3;
use tracing::trace;

use crate::config::RepairConfig;
use crate::meshcore::{point_plane_distance, project_to_plane, triangle_overlap_area, HalfEdgeId, Plane, Triangle2, VertexId};

/// Triangle α spanned by a border half-edge and its predecessor
/// (`v0 → v1`, `v1 → v2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualTriangle {
    pub points: [Point3<f64>; 3],
    pub vertices: [VertexId; 3],
    /// Preceding and current half-edge, when α came from a border walk.
    pub halfedges: Option<[HalfEdgeId; 2]>,
}

impl VirtualTriangle {
    pub fn from_points(points: [Point3<f64>; 3]) -> Self {
        Self {
            points,
            vertices: [usize::MAX; 3],
            halfedges: None,
        }
    }
}

/// Distance D (largest distance from α's corners to β's plane) and overlap
/// ratio A (area of projected α ∩ β over the area of β). `None` for a
/// degenerate β.
pub fn intersection_measures(alpha: &[Point3<f64>; 3], beta: &[Point3<f64>; 3], degenerate_area: f64) -> Option<(f64, f64)> {
    let plane = Plane::from_triangle(beta)?;
    let b2 = Triangle2(beta.map(|p| project_to_plane(&p, &plane)));
    let area_beta = b2.area();
    if area_beta <= degenerate_area {
        return None;
    }
    let d = alpha.iter().map(|p| point_plane_distance(p, &plane)).fold(0.0, f64::max);
    let a2 = Triangle2(alpha.map(|p| project_to_plane(&p, &plane)));
    Some((d, triangle_overlap_area(&a2, &b2) / area_beta))
}

/// Whether α lies on β: `D < eps_distance` and `A > eps_area_ratio`.
/// A degenerate β never intersects.
pub fn intersection_test(alpha: &VirtualTriangle, beta: &[Point3<f64>; 3], cfg: &RepairConfig) -> bool {
    match intersection_measures(&alpha.points, beta, cfg.degenerate_area) {
        Some((d, a)) => d < cfg.eps_distance && a > cfg.eps_area_ratio,
        None => {
            trace!("degenerate incident face skipped in intersection test");
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    const BETA: [Point3<f64>; 3] = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];

    #[test]
    fn coplanar_full_overlap() {
        let cfg = RepairConfig::default();
        let (d, a) = intersection_measures(&BETA, &BETA, 1e-12).unwrap();
        assert_eq!(d, 0.0);
        assert!((a - 1.0).abs() < 1e-12);
        assert!(intersection_test(&VirtualTriangle::from_points(BETA), &BETA, &cfg));
    }

    #[test]
    fn parallel_at_twice_the_distance_threshold() {
        let cfg = RepairConfig::default();
        let alpha = BETA.map(|q| q + nalgebra::Vector3::new(0.0, 0.0, 0.2));
        assert!(!intersection_test(&VirtualTriangle::from_points(alpha), &BETA, &cfg));
    }

    #[test]
    fn small_overlap_below_area_threshold() {
        let cfg = RepairConfig::default();
        // Corner triangle with area 0.0025 = 0.5% of β.
        let s = 0.1;
        let alpha = [p(0.0, 0.0, 0.0), p(-s, 0.0, 0.0), p(0.0, -s, 0.0)].map(|q| q + nalgebra::Vector3::new(s / 2.0, s / 2.0, 0.0));
        let (_, a) = intersection_measures(&alpha, &BETA, 1e-12).unwrap();
        assert!((a - 0.005).abs() < 1e-12, "{a}");
        assert!(!intersection_test(&VirtualTriangle::from_points(alpha), &BETA, &cfg));
    }

    #[test]
    fn lifted_corner_sets_the_distance() {
        let d0 = 0.03;
        let alpha = [p(0.2, 0.2, d0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        let (d, _) = intersection_measures(&alpha, &BETA, 1e-12).unwrap();
        assert!((d - d0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_beta_never_intersects() {
        let flat = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(2.0, 0.0, 0.0)];
        let cfg = RepairConfig::default();
        assert!(intersection_measures(&BETA, &flat, 1e-12).is_none());
        assert!(!intersection_test(&VirtualTriangle::from_points(BETA), &flat, &cfg));
    }
}
