//! Constrained Delaunay triangulation of a projected ring.

use std::collections::VecDeque;

use nalgebra::Point2;
use spade::{ConstrainedDelaunayTriangulation, HasPosition, Triangulation};

use crate::error::{MeshError, Result};
use crate::meshcore::orient2;

struct Indexed {
    pos: spade::Point2<f64>,
}

impl HasPosition for Indexed {
    type Scalar = f64;

    fn position(&self) -> spade::Point2<f64> {
        self.pos
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedTriangulation2 {
    pub points: Vec<Point2<f64>>,
    pub constraints: Vec<[usize; 2]>,
    /// Triangles inside the constraint polygon, counter-clockwise.
    pub inside: Vec<[usize; 3]>,
    /// Remaining triangles of the convex hull, counter-clockwise.
    pub outside: Vec<[usize; 3]>,
}

impl ConstrainedTriangulation2 {
    pub fn triangles(&self) -> impl Iterator<Item = &[usize; 3]> {
        self.inside.iter().chain(&self.outside)
    }
}

fn on_segment(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> bool {
    orient2(a, b, p) == 0.0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Whether two constraint segments meet anywhere other than a shared
/// endpoint.
fn segments_clash(points: &[Point2<f64>], s: [usize; 2], t: [usize; 2]) -> bool {
    let [a, b] = s.map(|i| points[i]);
    let [c, d] = t.map(|i| points[i]);
    let shared = s.iter().filter(|i| t.contains(i)).count();
    match shared {
        2 => true,
        1 => {
            // Only a collinear overlap is a clash.
            let (pivot, other_s) = if t.contains(&s[0]) { (a, b) } else { (b, a) };
            let other_t = if s.contains(&t[0]) { d } else { c };
            orient2(&pivot, &other_s, &other_t) == 0.0 && (other_s - pivot).dot(&(other_t - pivot)) > 0.0
        }
        _ => {
            let (o1, o2) = (orient2(&a, &b, &c), orient2(&a, &b, &d));
            let (o3, o4) = (orient2(&c, &d, &a), orient2(&c, &d, &b));
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                return true;
            }
            on_segment(&c, &a, &b) || on_segment(&d, &a, &b) || on_segment(&a, &c, &d) || on_segment(&b, &c, &d)
        }
    }
}

/// Triangulates `points` with `constraints` as fixed edges. Triangles are
/// split into inside and outside by crossing parity from the hull.
///
/// Constraints that cross or touch each other, or points that coincide,
/// mean the projection folded: [`MeshError::ProjectionFold`].
pub fn cdt(points: &[Point2<f64>], constraints: &[[usize; 2]]) -> Result<ConstrainedTriangulation2> {
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(MeshError::DegenerateGeometry("non-finite point".into()));
    }
    if constraints.iter().flatten().any(|&i| i >= points.len()) {
        return Err(MeshError::DegenerateGeometry("constraint index out of range".into()));
    }
    for (i, &s) in constraints.iter().enumerate() {
        if s[0] == s[1] {
            return Err(MeshError::DegenerateGeometry("zero-length constraint".into()));
        }
        if constraints[i + 1..].iter().any(|&t| segments_clash(points, s, t)) {
            return Err(MeshError::ProjectionFold);
        }
    }

    let mut tri: ConstrainedDelaunayTriangulation<Indexed> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(points.len());
    let mut index_of = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let h = tri
            .insert(Indexed {
                pos: spade::Point2::new(p.x, p.y),
            })
            .map_err(|e| MeshError::DegenerateGeometry(format!("cdt insertion: {e:?}")))?;
        if h.index() != index_of.len() {
            // Coincides with an earlier point.
            return Err(MeshError::ProjectionFold);
        }
        index_of.push(i);
        handles.push(h);
    }
    for &[a, b] in constraints {
        if !tri.can_add_constraint(handles[a], handles[b]) {
            return Err(MeshError::ProjectionFold);
        }
        tri.add_constraint(handles[a], handles[b]);
    }

    // Crossing parity, seeded from faces on the hull.
    let nf = tri.num_inner_faces();
    let mut parity: Vec<Option<bool>> = vec![None; nf + 1];
    let mut queue = VecDeque::new();
    for face in tri.inner_faces() {
        for e in face.adjacent_edges() {
            if e.rev().face().is_outer() && parity[face.fix().index()].is_none() {
                let p = tri.is_constraint_edge(e.as_undirected().fix());
                parity[face.fix().index()] = Some(p);
                queue.push_back(face.fix());
            }
        }
    }
    while let Some(f) = queue.pop_front() {
        let p = parity[f.index()].expect("queued faces have parity");
        for e in tri.face(f).adjacent_edges() {
            let Some(n) = e.rev().face().as_inner() else { continue };
            if parity[n.fix().index()].is_none() {
                parity[n.fix().index()] = Some(p ^ tri.is_constraint_edge(e.as_undirected().fix()));
                queue.push_back(n.fix());
            }
        }
    }

    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for face in tri.inner_faces() {
        let mut t = face.vertices().map(|v| index_of[v.fix().index()]);
        if orient2(&points[t[0]], &points[t[1]], &points[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
        if parity[face.fix().index()] == Some(true) {
            inside.push(t);
        } else {
            outside.push(t);
        }
    }
    Ok(ConstrainedTriangulation2 {
        points: points.to_vec(),
        constraints: constraints.to_vec(),
        inside,
        outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Vec<[usize; 2]> {
        (0..n).map(|i| [i, (i + 1) % n]).collect()
    }

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn area(points: &[Point2<f64>], t: &[usize; 3]) -> f64 {
        0.5 * orient2(&points[t[0]], &points[t[1]], &points[t[2]])
    }

    #[test]
    fn convex_square() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let t = cdt(&pts, &ring(4)).unwrap();
        assert_eq!(t.inside.len(), 2);
        assert!(t.outside.is_empty());
    }

    #[test]
    fn l_hexagon_avoids_reflex_corner() {
        let pts = [p(0.0, 0.0), p(2.0, 0.0), p(2.0, 1.0), p(1.0, 1.0), p(1.0, 2.0), p(0.0, 2.0)];
        let t = cdt(&pts, &ring(6)).unwrap();
        assert_eq!(t.inside.len(), 4);
        let total: f64 = t.inside.iter().map(|tr| area(&pts, tr)).sum();
        assert!((total - 3.0).abs() < 1e-12);
        // The only hull triangle outside is the notch at (2,2)-side.
        assert_eq!(t.outside.len(), 1);
        for tr in &t.inside {
            let c = tr.iter().fold(Point2::origin(), |acc, &i| acc + pts[i].coords / 3.0);
            assert!(!(c.x > 1.0 && c.y > 1.0), "triangle {tr:?} crosses the reflex corner");
        }
    }

    #[test]
    fn constraint_edges_are_recovered() {
        // Thin comb: Delaunay alone would connect the teeth.
        let pts = [
            p(0.0, 0.0),
            p(4.0, 0.0),
            p(4.0, 1.0),
            p(3.0, 0.2),
            p(2.0, 1.0),
            p(1.0, 0.2),
            p(0.0, 1.0),
        ];
        let t = cdt(&pts, &ring(7)).unwrap();
        assert_eq!(t.inside.len(), 5);
        let edges: Vec<[usize; 2]> = t
            .inside
            .iter()
            .flat_map(|tr| {
                (0..3).map(move |k| {
                    let (a, b) = (tr[k], tr[(k + 1) % 3]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        for [a, b] in ring(7) {
            assert!(edges.contains(&[a.min(b), a.max(b)]));
        }
    }

    #[test]
    fn crossing_constraints_fold() {
        let pts = [p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert!(matches!(cdt(&pts, &ring(4)), Err(MeshError::ProjectionFold)));
    }

    #[test]
    fn coincident_points_fold() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(1.0, 0.0)];
        assert!(matches!(cdt(&pts, &ring(4)), Err(MeshError::ProjectionFold)));
    }

    #[test]
    fn clockwise_ring_gives_same_region() {
        let pts = [p(0.0, 0.0), p(0.0, 2.0), p(1.0, 2.0), p(1.0, 1.0), p(2.0, 1.0), p(2.0, 0.0)];
        let t = cdt(&pts, &ring(6)).unwrap();
        assert_eq!(t.inside.len(), 4);
        assert!(t.inside.iter().all(|tr| area(&pts, tr) > 0.0));
    }
}
