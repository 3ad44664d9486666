use nalgebra::{Point2, Point3, Vector3};
use proptest::prelude::*;

use lod2_holefill::holedetect::{intersection_test, VirtualTriangle};
use lod2_holefill::meshcore::{euler_and_borders, load_obj, polygon_signed_area, save_obj, triangle_overlap_area, Triangle2};
use lod2_holefill::pipeline::repair;
use lod2_holefill::preprocess::mark_duplicates;
use lod2_holefill::remesh::cdt;
use lod2_holefill::synthkit::{generate, DefectRecipe};
use lod2_holefill::{RepairConfig, SurfaceMesh};

fn point2() -> impl Strategy<Value = Point2<f64>> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn triangle2() -> impl Strategy<Value = Triangle2> {
    [point2(), point2(), point2()]
        .prop_map(Triangle2)
        .prop_filter("non-degenerate", |t| t.area() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn overlap_is_symmetric_and_bounded(a in triangle2(), b in triangle2()) {
        let ab = triangle_overlap_area(&a, &b);
        let ba = triangle_overlap_area(&b, &a);
        let tol = 1e-9 * (1.0 + a.area().max(b.area()));
        prop_assert!((ab - ba).abs() <= tol);
        prop_assert!(ab >= 0.0 && ab <= a.area().min(b.area()) + tol);
    }

    #[test]
    fn overlap_ignores_winding_and_translation(a in triangle2(), b in triangle2(), shift in point2()) {
        let base = triangle_overlap_area(&a, &b);
        let flipped = Triangle2([a.0[0], a.0[2], a.0[1]]);
        let moved = |t: &Triangle2| Triangle2(t.0.map(|p| p + shift.coords));
        let tol = 1e-9 * (1.0 + a.area().max(b.area()));
        prop_assert!((triangle_overlap_area(&flipped, &b) - base).abs() <= tol);
        prop_assert!((triangle_overlap_area(&moved(&a), &moved(&b)) - base).abs() <= 1e-6);
        prop_assert!((triangle_overlap_area(&a, &a) - a.area()).abs() <= tol);
    }

    #[test]
    fn parallel_offset_decides_by_distance(d in 0.0..0.2f64, t in triangle2()) {
        prop_assume!((d - 0.1).abs() > 1e-9);
        let cfg = RepairConfig::default();
        let beta = t.0.map(|p| Point3::new(p.x, p.y, 3.0));
        let alpha = beta.map(|p| p + Vector3::new(0.0, 0.0, d));
        prop_assert_eq!(intersection_test(&VirtualTriangle::from_points(alpha), &beta, &cfg), d < cfg.eps_distance);
    }

    #[test]
    fn star_polygon_triangulates_into_n_minus_two(raw in prop::collection::vec((0.0..1.0f64, 0.2..1.0f64), 3..40)) {
        let mut polar = raw;
        polar.sort_by(|a, b| a.0.total_cmp(&b.0));
        polar.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
        prop_assume!(polar.len() >= 3);
        let points: Vec<Point2<f64>> = polar
            .iter()
            .map(|&(t, r)| {
                let a = t * std::f64::consts::TAU;
                Point2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let n = points.len();
        let ring: Vec<[usize; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
        // Nearly collinear draws may be rejected; anything accepted must be exact.
        if let Ok(t) = cdt(&points, &ring) {
            prop_assert_eq!(t.inside.len(), n - 2);
            let area: f64 = t.inside.iter().map(|tr| Triangle2(tr.map(|i| points[i])).area()).sum();
            prop_assert!((area - polygon_signed_area(&points).abs()).abs() <= 1e-9);
        }
    }

    #[test]
    fn obj_round_trip_keeps_nine_digits(
        coords in prop::collection::vec((-1e4..1e4f64, -1e4..1e4f64, -1e4..1e4f64), 3..30),
        picks in prop::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), 0..30),
    ) {
        let n = coords.len();
        let vertices: Vec<Point3<f64>> = coords.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        let faces: Vec<[usize; 3]> = picks
            .iter()
            .map(|&(a, b, c)| [a % n, b % n, c % n])
            .filter(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
            .collect();
        let mesh = SurfaceMesh::from_triangles(vertices.clone(), faces.clone()).unwrap();
        let back = load_obj(&save_obj(&mesh)).unwrap();
        prop_assert_eq!(back.faces(), faces.as_slice());
        for (p, q) in vertices.iter().zip(back.vertices()) {
            prop_assert!((p - q).norm() <= 1e-8 * (1.0 + p.coords.norm()));
        }
        prop_assert_eq!(save_obj(&back), save_obj(&mesh));
    }

    #[test]
    fn duplicate_representatives_are_lowest_members(coords in prop::collection::vec((0..4u8, 0..4u8, 0..3u8, -1.0..1.0f64), 1..80)) {
        let cfg = RepairConfig::default();
        let points: Vec<Point3<f64>> = coords
            .iter()
            .map(|&(x, y, z, j)| Point3::new(x as f64, y as f64, z as f64 + j * 4e-4))
            .collect();
        let mut mesh = SurfaceMesh::from_triangles(points.clone(), Vec::new()).unwrap();
        let rep = mark_duplicates(&mut mesh, &cfg).representative;
        for (v, &r) in rep.iter().enumerate() {
            prop_assert!(r <= v);
            prop_assert_eq!(rep[r], r);
        }
        // Points on different lattice nodes never merge.
        for (v, &r) in rep.iter().enumerate() {
            prop_assert_eq!((points[v].x, points[v].y), (points[r].x, points[r].y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_roof_hole_closes(
        size in (1.0..5.0f64, 1.0..5.0f64, 1.0..4.0f64),
        cells in (1usize..5, 1usize..5, 1usize..4),
        pick in (0usize..100, 0usize..100, 1usize..3, 1usize..3),
    ) {
        let (cx, cy) = (pick.0 % cells.0, pick.1 % cells.1);
        let (wx, wy) = (pick.2.min(cells.0 - cx), pick.3.min(cells.1 - cy));
        let (dx, dy) = (size.0 / cells.0 as f64, size.1 / cells.1 as f64);
        let text = format!(
            "base box {} {} {} cells {} {} {}\nremove-box {} {} {} {} {} {}",
            size.0, size.1, size.2, cells.0, cells.1, cells.2,
            cx as f64 * dx, cy as f64 * dy, size.2 - 0.1,
            (cx + wx) as f64 * dx, (cy + wy) as f64 * dy, size.2 + 0.1,
        );
        let (mesh, truth) = generate(&DefectRecipe::parse(&text).unwrap()).unwrap();
        let out = repair(mesh, &RepairConfig::default()).unwrap();
        let topo = euler_and_borders(&out.mesh);
        prop_assert_eq!(topo.border_halfedges, 0, "{}", text);
        prop_assert_eq!(topo.euler_characteristic, 2);
        prop_assert_eq!(out.fills.len(), truth.true_holes.len());
        let ring = 2 * (wx + wy);
        prop_assert_eq!(out.faces_added(), ring - 2);
    }
}
