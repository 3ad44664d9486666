use nalgebra::{Matrix3, Point2, Point3, SymmetricEigen, Vector3};

use crate::error::{MeshError, Result};

/// Relative eigenvalue floor below which a point spread is treated as
/// lacking that dimension.
const SPREAD_FLOOR: f64 = 1e-12;

/// Oriented plane with an orthonormal in-plane basis for 2D projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vector3<f64>,
    /// Signed distance of the plane from the origin along `normal`.
    pub offset: f64,
    pub u: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl Plane {
    /// Plane with the given normal through `point`. Returns `None` for a
    /// zero normal.
    pub fn from_normal(normal: Vector3<f64>, point: &Point3<f64>) -> Option<Self> {
        let n = normal.try_normalize(0.0)?;
        let (u, v) = basis_for(&n);
        Some(Self {
            normal: n,
            offset: n.dot(&point.coords),
            u,
            v,
        })
    }

    /// Supporting plane of a triangle, oriented by its winding.
    pub fn from_triangle(tri: &[Point3<f64>; 3]) -> Option<Self> {
        let n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
        if n.norm() == 0.0 {
            return None;
        }
        Self::from_normal(n, &tri[0])
    }

    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    /// Maps plane coordinates back to the 3D point on the plane.
    pub fn lift(&self, q: &Point2<f64>) -> Point3<f64> {
        Point3::from(self.normal * self.offset + self.u * q.x + self.v * q.y)
    }

    pub fn project(&self, p: &Point3<f64>) -> Point2<f64> {
        Point2::new(self.u.dot(&p.coords), self.v.dot(&p.coords))
    }

    /// Largest absolute distance of any point from the plane.
    pub fn max_residual<'a>(&self, points: impl IntoIterator<Item = &'a Point3<f64>>) -> f64 {
        points.into_iter().map(|p| self.signed_distance(p).abs()).fold(0.0, f64::max)
    }
}

/// In-plane basis: `u` is the coordinate axis least aligned with the normal
/// (first axis wins ties) made orthogonal to it, `v = n × u`.
fn basis_for(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut best = 0;
    for i in 1..3 {
        if n[i].abs() < n[best].abs() {
            best = i;
        }
    }
    let a = axes[best];
    let u = (a - n * n.dot(&a)).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Orthogonal least-squares plane through `points`.
///
/// The normal is the eigenvector of the smallest eigenvalue of the centered
/// covariance. Its sign makes the first non-degenerate point triple
/// counter-clockwise when seen from the normal side.
pub fn fit_plane(points: &[Point3<f64>]) -> Result<Plane> {
    if points.len() < 3 {
        return Err(MeshError::DegenerateGeometry(format!(
            "plane fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let centroid = points.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p.coords - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (l0, l1, l2) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]], eig.eigenvalues[order[2]]);
    if l2 <= 0.0 || l1 <= SPREAD_FLOOR * l2 {
        return Err(MeshError::DegenerateGeometry("points are collinear or coincident".into()));
    }

    let mut normal: Vector3<f64> = eig.eigenvectors.column(order[0]).into_owned();
    if (l1 - l0) <= SPREAD_FLOOR * l2 {
        // Isotropic spread: choose the lexicographically smallest candidate.
        let mut candidates: Vec<Vector3<f64>> = order[..2]
            .iter()
            .flat_map(|&i| {
                let c: Vector3<f64> = eig.eigenvectors.column(i).into_owned();
                [c, -c]
            })
            .collect();
        candidates.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z)));
        normal = candidates[0];
    }
    let normal = normal.normalize();

    if let Some(turn) = first_turn(points) {
        if normal.dot(&turn) < 0.0 {
            return Ok(Plane::from_normal(-normal, &Point3::from(centroid)).expect("unit normal"));
        }
    }
    Ok(Plane::from_normal(normal, &Point3::from(centroid)).expect("unit normal"))
}

/// Cross product of the first non-degenerate triple (p0, pi, pj).
fn first_turn(points: &[Point3<f64>]) -> Option<Vector3<f64>> {
    let p0 = points[0];
    let scale = points.iter().map(|p| (p - p0).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let i = points.iter().position(|p| (p - p0).norm() > SPREAD_FLOOR.sqrt() * scale)?;
    let e1 = points[i] - p0;
    points[i + 1..].iter().find_map(|p| {
        let c = e1.cross(&(p - p0));
        (c.norm() > SPREAD_FLOOR.sqrt() * scale * scale).then_some(c)
    })
}

pub fn point_plane_distance(p: &Point3<f64>, plane: &Plane) -> f64 {
    plane.signed_distance(p).abs()
}

pub fn project_to_plane(p: &Point3<f64>, plane: &Plane) -> Point2<f64> {
    plane.project(p)
}

pub fn triangle_area(tri: &[Point3<f64>; 3]) -> f64 {
    0.5 * (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).norm()
}

/// Twice the signed area of the 2D triangle (a, b, c); positive when
/// counter-clockwise.
pub fn orient2(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Signed area of a simple polygon (shoelace).
pub fn polygon_signed_area(poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle2(pub [Point2<f64>; 3]);

impl Triangle2 {
    pub fn new(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> Self {
        Self([a, b, c])
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * orient2(&self.0[0], &self.0[1], &self.0[2])
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    fn counter_clockwise(&self) -> [Point2<f64>; 3] {
        let [a, b, c] = self.0;
        if self.signed_area() < 0.0 {
            [a, c, b]
        } else {
            [a, b, c]
        }
    }
}

/// Area of `a ∩ b`, computed by clipping `a` against the three half-planes
/// of `b` in turn.
pub fn triangle_overlap_area(a: &Triangle2, b: &Triangle2) -> f64 {
    if a.area() == 0.0 || b.area() == 0.0 {
        return 0.0;
    }
    let clip = b.counter_clockwise();
    let mut poly: Vec<Point2<f64>> = a.counter_clockwise().to_vec();
    for i in 0..3 {
        let (e0, e1) = (clip[i], clip[(i + 1) % 3]);
        poly = clip_half_plane(&poly, &e0, &e1);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    polygon_signed_area(&poly).abs()
}

/// Keeps the part of `poly` left of the directed line e0 → e1.
fn clip_half_plane(poly: &[Point2<f64>], e0: &Point2<f64>, e1: &Point2<f64>) -> Vec<Point2<f64>> {
    let side = |p: &Point2<f64>| orient2(e0, e1, p);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let nxt = poly[(i + 1) % poly.len()];
        let (sc, sn) = (side(&cur), side(&nxt));
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0) {
            let t = sc / (sc - sn);
            out.push(cur + (nxt - cur) * t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    #[test]
    fn unit_square_plane() {
        let pts = [p(0., 0., 0.), p(1., 0., 0.), p(1., 1., 0.), p(0., 1., 0.)];
        let pl = fit_plane(&pts).unwrap();
        assert_abs_diff_eq!(pl.normal.z.abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pl.offset, 0.0, epsilon = 1e-12);
        // Counter-clockwise in xy, so the normal points up.
        assert!(pl.normal.z > 0.0);
    }

    #[test]
    fn symmetric_perturbation_cancels() {
        let pts = [p(0., 0., 0.01), p(1., 0., -0.01), p(1., 1., 0.01), p(0., 1., -0.01)];
        let pl = fit_plane(&pts).unwrap();
        assert_abs_diff_eq!(pl.normal.z.abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pl.offset, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts = [p(0., 0., 0.), p(1., 1., 1.), p(2., 2., 2.), p(3., 3., 3.)];
        assert!(matches!(fit_plane(&pts), Err(MeshError::DegenerateGeometry(_))));
        assert!(fit_plane(&[p(1., 1., 1.); 4]).is_err());
        assert!(fit_plane(&pts[..2]).is_err());
    }

    #[test]
    fn distance_and_projection_on_axis_plane() {
        let pl = Plane::from_normal(Vector3::z(), &Point3::origin()).unwrap();
        assert_eq!(point_plane_distance(&p(0., 0., 0.1), &pl), 0.1);
        assert_eq!(point_plane_distance(&p(3., -2., 0.), &pl), 0.0);
        let q = project_to_plane(&p(1., 2., 5.), &pl);
        assert_eq!((q.x, q.y), (1.0, 2.0));
        let on = p(0.25, -4.0, 0.0);
        assert_abs_diff_eq!((pl.lift(&pl.project(&on)) - on).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_is_orthonormal() {
        for n in [Vector3::new(1., 2., 3.), Vector3::new(0., 0., -1.), Vector3::new(-5., 0.1, 0.)] {
            let pl = Plane::from_normal(n, &p(1., 1., 1.)).unwrap();
            assert_abs_diff_eq!(pl.normal.norm(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(pl.u.dot(&pl.v), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(pl.u.dot(&pl.normal), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(pl.v.dot(&pl.normal), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn overlap_of_identical_and_disjoint_triangles() {
        let t = Triangle2::new(Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(0., 1.));
        assert_abs_diff_eq!(triangle_overlap_area(&t, &t), 0.5, epsilon = 1e-15);
        let far = Triangle2::new(Point2::new(5., 5.), Point2::new(6., 5.), Point2::new(5., 6.));
        assert_eq!(triangle_overlap_area(&t, &far), 0.0);
        let flat = Triangle2::new(Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(2., 0.));
        assert_eq!(triangle_overlap_area(&t, &flat), 0.0);
    }

    #[test]
    fn overlap_of_triangles_sharing_an_edge_is_zero() {
        let a = Triangle2::new(Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.));
        let b = Triangle2::new(Point2::new(0., 0.), Point2::new(1., 1.), Point2::new(0., 1.));
        assert!(triangle_overlap_area(&a, &b) < 1e-15);
    }
}
