//! Triangle–triangle intersection in 3D.

use nalgebra::{Point3, Vector3};

use super::geometry::{triangle_overlap_area, Plane, Triangle2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriTriIntersection {
    None,
    /// Both triangles lie in one plane (within tolerance).
    Coplanar,
    /// The intersection is the segment between the two points. The points
    /// coincide when the triangles only touch.
    Segment(Point3<f64>, Point3<f64>),
}

/// Intersects two triangles. Distances below `tol` count as on-plane.
pub fn intersect_triangles(a: &[Point3<f64>; 3], b: &[Point3<f64>; 3], tol: f64) -> TriTriIntersection {
    let (Some(pa), Some(pb)) = (Plane::from_triangle(a), Plane::from_triangle(b)) else {
        return TriTriIntersection::None;
    };
    let da = a.map(|p| snap(pb.signed_distance(&p), tol));
    if same_strict_side(&da) {
        return TriTriIntersection::None;
    }
    if da.iter().all(|&d| d == 0.0) {
        return TriTriIntersection::Coplanar;
    }
    let db = b.map(|p| snap(pa.signed_distance(&p), tol));
    if same_strict_side(&db) {
        return TriTriIntersection::None;
    }
    if db.iter().all(|&d| d == 0.0) {
        return TriTriIntersection::Coplanar;
    }
    let dir: Vector3<f64> = pa.normal.cross(&pb.normal);
    if dir.norm() == 0.0 {
        return TriTriIntersection::None;
    }
    let sa = plane_section(a, &da);
    let sb = plane_section(b, &db);
    let (Some(sa), Some(sb)) = (sa, sb) else {
        return TriTriIntersection::None;
    };
    let t = |p: &Point3<f64>| dir.dot(&p.coords);
    let ordered = |s: [Point3<f64>; 2]| if t(&s[0]) <= t(&s[1]) { s } else { [s[1], s[0]] };
    let [a0, a1] = ordered(sa);
    let [b0, b1] = ordered(sb);
    let lo = if t(&a0) >= t(&b0) { a0 } else { b0 };
    let hi = if t(&a1) <= t(&b1) { a1 } else { b1 };
    let dn = dir.norm();
    if (t(&hi) - t(&lo)) / dn < -tol {
        return TriTriIntersection::None;
    }
    if t(&hi) < t(&lo) {
        return TriTriIntersection::Segment(lo, lo);
    }
    TriTriIntersection::Segment(lo, hi)
}

fn snap(d: f64, tol: f64) -> f64 {
    if d.abs() <= tol {
        0.0
    } else {
        d
    }
}

fn same_strict_side(d: &[f64; 3]) -> bool {
    d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0)
}

/// Part of a triangle lying on the other triangle's plane, as a (possibly
/// degenerate) segment.
fn plane_section(tri: &[Point3<f64>; 3], d: &[f64; 3]) -> Option<[Point3<f64>; 2]> {
    let mut pts: Vec<Point3<f64>> = Vec::with_capacity(3);
    for i in 0..3 {
        if d[i] == 0.0 {
            pts.push(tri[i]);
        }
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        if (d[i] > 0.0 && d[j] < 0.0) || (d[i] < 0.0 && d[j] > 0.0) {
            let s = d[i] / (d[i] - d[j]);
            pts.push(tri[i] + (tri[j] - tri[i]) * s);
        }
    }
    match pts.len() {
        0 => None,
        1 => Some([pts[0], pts[0]]),
        _ => Some([pts[0], pts[1]]),
    }
}

/// Whether segment `pq` lies along one edge of `tri` within `tol`.
pub fn segment_on_edge(tri: &[Point3<f64>; 3], p: &Point3<f64>, q: &Point3<f64>, tol: f64) -> bool {
    (0..3).any(|k| {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let d = b - a;
        let dist = |x: &Point3<f64>| {
            let t = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (x - (a + d * t)).norm()
        };
        dist(p) <= tol && dist(q) <= tol
    })
}

/// Whether two mesh faces intersect in more than the features they share.
///
/// `shared` is the number of vertex ids the faces have in common. Faces
/// sharing an edge only conflict when they are coplanar and overlap; faces
/// touching edge to edge do not conflict.
pub fn faces_conflict(a: &[Point3<f64>; 3], b: &[Point3<f64>; 3], shared: usize, len_tol: f64, area_tol: f64) -> bool {
    if shared >= 3 {
        return true;
    }
    match intersect_triangles(a, b, len_tol) {
        TriTriIntersection::None => false,
        TriTriIntersection::Coplanar => {
            let Some(pl) = Plane::from_triangle(a) else {
                return false;
            };
            let ta = Triangle2(a.map(|p| pl.project(&p)));
            let tb = Triangle2(b.map(|p| pl.project(&p)));
            triangle_overlap_area(&ta, &tb) > area_tol
        }
        TriTriIntersection::Segment(p, q) => {
            shared < 2 && (q - p).norm() > len_tol && !(segment_on_edge(a, &p, &q, len_tol) && segment_on_edge(b, &p, &q, len_tol))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    #[test]
    fn perpendicular_crossing_gives_segment() {
        let a = [p(0., 0., 0.), p(2., 0., 0.), p(0., 2., 0.)];
        let b = [p(0.5, 0.5, -1.), p(0.5, 0.5, 1.), p(0.5, -1.5, 0.)];
        match intersect_triangles(&a, &b, 1e-12) {
            TriTriIntersection::Segment(s, e) => {
                assert!((s - e).norm() > 0.1);
                assert!(s.z.abs() < 1e-12 && e.z.abs() < 1e-12);
                assert!((s.x - 0.5).abs() < 1e-12 && (e.x - 0.5).abs() < 1e-12);
            }
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn separated_triangles_do_not_intersect() {
        let a = [p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)];
        let b = [p(0., 0., 1.), p(1., 0., 1.), p(0., 1., 1.)];
        assert_eq!(intersect_triangles(&a, &b, 1e-12), TriTriIntersection::None);
    }

    #[test]
    fn shared_edge_is_not_a_conflict() {
        let a = [p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)];
        let b = [p(1., 0., 0.), p(0., 0., 0.), p(0., 0., 1.)];
        assert!(!faces_conflict(&a, &b, 2, 1e-9, 1e-12));
        let folded = [p(1., 0., 0.), p(0., 0., 0.), p(0.2, 0.5, 0.)];
        assert!(faces_conflict(&a, &folded, 2, 1e-9, 1e-12));
    }

    #[test]
    fn edge_to_edge_contact_is_not_a_conflict() {
        let a = [p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)];
        let wall = [p(0., 0., 0.), p(2., 0., 0.), p(0., 0., 1.)];
        assert!(!faces_conflict(&a, &wall, 0, 1e-9, 1e-12));
        let piercing = [p(0.2, 0.2, -1.), p(0.6, 0.2, 1.), p(0.2, 0.2, 1.)];
        assert!(faces_conflict(&a, &piercing, 0, 1e-9, 1e-12));
    }
}
