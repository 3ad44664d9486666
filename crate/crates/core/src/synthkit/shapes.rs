//! Closed base shapes built on axis-aligned lattices. All faces are wound
//! counter-clockwise seen from outside.

use std::collections::BTreeMap;

use nalgebra::Point3;

use crate::meshcore::{SurfaceMesh, VertexId};

/// Collects vertices by lattice index and emits quads as triangle pairs.
pub(crate) struct Lattice {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    ids: BTreeMap<[usize; 3], VertexId>,
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[VertexId; 3]>,
}

impl Lattice {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, zs: Vec<f64>) -> Self {
        Self {
            xs,
            ys,
            zs,
            ids: BTreeMap::new(),
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn vertex(&mut self, i: usize, j: usize, k: usize) -> VertexId {
        if let Some(&id) = self.ids.get(&[i, j, k]) {
            return id;
        }
        let id = self.vertices.len();
        self.vertices.push(Point3::new(self.xs[i], self.ys[j], self.zs[k]));
        self.ids.insert([i, j, k], id);
        id
    }

    fn quad(&mut self, corners: [[usize; 3]; 4]) {
        let [a, b, c, d] = corners.map(|[i, j, k]| self.vertex(i, j, k));
        self.faces.push([a, b, c]);
        self.faces.push([a, c, d]);
    }

    /// Quad in the plane x = xs[i] over cells (j, k); `positive` selects +x.
    pub fn quad_x(&mut self, i: usize, j: usize, k: usize, positive: bool) {
        let c = [[i, j, k], [i, j + 1, k], [i, j + 1, k + 1], [i, j, k + 1]];
        self.quad(if positive { c } else { [c[0], c[3], c[2], c[1]] });
    }

    pub fn quad_y(&mut self, i: usize, j: usize, k: usize, positive: bool) {
        let c = [[i, j, k], [i, j, k + 1], [i + 1, j, k + 1], [i + 1, j, k]];
        self.quad(if positive { c } else { [c[0], c[3], c[2], c[1]] });
    }

    pub fn quad_z(&mut self, i: usize, j: usize, k: usize, positive: bool) {
        let c = [[i, j, k], [i + 1, j, k], [i + 1, j + 1, k], [i, j + 1, k]];
        self.quad(if positive { c } else { [c[0], c[3], c[2], c[1]] });
    }

    /// Closed box surface over the whole lattice, skipping quads for which
    /// `skip` returns true.
    pub fn box_surface(&mut self, skip: impl Fn(usize, usize, usize) -> bool) {
        let (nx, ny, nz) = (self.xs.len() - 1, self.ys.len() - 1, self.zs.len() - 1);
        for i in 0..nx {
            for j in 0..ny {
                if !skip(i, j, 0) {
                    self.quad_z(i, j, 0, false);
                }
                if !skip(i, j, nz) {
                    self.quad_z(i, j, nz, true);
                }
            }
        }
        for i in 0..nx {
            for k in 0..nz {
                self.quad_y(i, 0, k, false);
                self.quad_y(i, ny, k, true);
            }
        }
        for j in 0..ny {
            for k in 0..nz {
                self.quad_x(0, j, k, false);
                self.quad_x(nx, j, k, true);
            }
        }
    }

    pub fn into_parts(self) -> (Vec<Point3<f64>>, Vec<[VertexId; 3]>) {
        (self.vertices, self.faces)
    }
}

pub(crate) fn subdivide(start: f64, length: f64, cells: usize) -> Vec<f64> {
    (0..=cells)
        .map(|i| {
            if i == cells {
                start + length
            } else {
                start + length * i as f64 / cells as f64
            }
        })
        .collect()
}

pub(crate) fn box_parts(origin: [f64; 3], size: [f64; 3], cells: [usize; 3]) -> (Vec<Point3<f64>>, Vec<[VertexId; 3]>) {
    let mut lat = Lattice::new(
        subdivide(origin[0], size[0], cells[0]),
        subdivide(origin[1], size[1], cells[1]),
        subdivide(origin[2], size[2], cells[2]),
    );
    lat.box_surface(|_, _, _| false);
    lat.into_parts()
}

/// Axis-aligned box at the origin with each side split into grid cells.
pub fn grid_box(size: [f64; 3], cells: [usize; 3]) -> SurfaceMesh {
    let (v, f) = box_parts([0.0; 3], size, cells);
    SurfaceMesh::from_triangles(v, f).expect("lattice indices are valid")
}

/// Prism with a ridge roof running along x. Long walls, roof slopes and
/// floor are split into `cells` segments along x.
pub(crate) fn gabled_parts(length: f64, width: f64, wall: f64, ridge: f64, cells: usize) -> (Vec<Point3<f64>>, Vec<[VertexId; 3]>) {
    let xs = subdivide(0.0, length, cells);
    let mut vertices = Vec::new();
    // Per x station: floor front, floor back, eave front, eave back, ridge.
    for &x in &xs {
        vertices.push(Point3::new(x, 0.0, 0.0));
        vertices.push(Point3::new(x, width, 0.0));
        vertices.push(Point3::new(x, 0.0, wall));
        vertices.push(Point3::new(x, width, wall));
        vertices.push(Point3::new(x, width / 2.0, wall + ridge));
    }
    let id = |i: usize, k: usize| 5 * i + k;
    let (ff, fb, ef, eb, rg) = (0, 1, 2, 3, 4);
    let mut faces = Vec::new();
    let mut quad = |a, b, c, d| {
        faces.push([a, b, c]);
        faces.push([a, c, d]);
    };
    for i in 0..cells {
        let j = i + 1;
        quad(id(i, ff), id(i, fb), id(j, fb), id(j, ff));
        quad(id(i, ff), id(j, ff), id(j, ef), id(i, ef));
        quad(id(i, fb), id(i, eb), id(j, eb), id(j, fb));
        quad(id(i, ef), id(j, ef), id(j, rg), id(i, rg));
        quad(id(i, eb), id(i, rg), id(j, rg), id(j, eb));
    }
    let n = cells;
    quad(id(0, ff), id(0, ef), id(0, eb), id(0, fb));
    quad(id(n, ff), id(n, fb), id(n, eb), id(n, ef));
    faces.push([id(0, ef), id(0, rg), id(0, eb)]);
    faces.push([id(n, ef), id(n, eb), id(n, rg)]);
    (vertices, faces)
}

pub fn gabled_house(length: f64, width: f64, wall: f64, ridge: f64, cells: usize) -> SurfaceMesh {
    let (v, f) = gabled_parts(length, width, wall, ridge, cells);
    SurfaceMesh::from_triangles(v, f).expect("valid indices")
}

/// Square building with a square courtyard through it (genus 1).
/// `size` is the outer footprint and height; `inner` the courtyard side.
pub(crate) fn courtyard_parts(size: [f64; 3], inner: f64) -> (Vec<Point3<f64>>, Vec<[VertexId; 3]>) {
    let ax = (size[0] - inner) / 2.0;
    let ay = (size[1] - inner) / 2.0;
    let mut lat = Lattice::new(
        vec![0.0, ax, ax + inner, size[0]],
        vec![0.0, ay, ay + inner, size[1]],
        vec![0.0, size[2]],
    );
    lat.box_surface(|i, j, _| i == 1 && j == 1);
    lat.quad_x(1, 1, 0, true);
    lat.quad_x(2, 1, 0, false);
    lat.quad_y(1, 1, 0, true);
    lat.quad_y(1, 2, 0, false);
    lat.into_parts()
}

pub fn courtyard(size: [f64; 3], inner: f64) -> SurfaceMesh {
    let (v, f) = courtyard_parts(size, inner);
    SurfaceMesh::from_triangles(v, f).expect("valid indices")
}

/// Two flat, upward-facing 1 m sheets side by side along x, separated by
/// `gap`, each with a notch cut from the facing side so that one hole is
/// split between the two components.
pub(crate) fn split_roof_parts(gap: f64) -> (Vec<Point3<f64>>, Vec<[VertexId; 3]>) {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (x0, notch_cols) in [(0.0, [2usize, 3]), (1.0 + gap, [0, 1])] {
        let mut lat = Lattice::new(subdivide(x0, 1.0, 4), subdivide(0.0, 1.0, 4), vec![1.0]);
        for i in 0..4 {
            for j in 0..4 {
                if notch_cols.contains(&i) && (j == 1 || j == 2) {
                    continue;
                }
                lat.quad_z(i, j, 0, true);
            }
        }
        let (v, f) = lat.into_parts();
        let base = vertices.len();
        vertices.extend(v);
        faces.extend(f.into_iter().map(|t| t.map(|x| x + base)));
    }
    (vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshcore::euler_and_borders;

    #[test]
    fn subdivided_box_is_closed() {
        let m = grid_box([2.0, 1.0, 1.0], [2, 2, 1]);
        m.check_invariants().unwrap();
        let t = euler_and_borders(&m);
        assert_eq!((t.euler_characteristic, t.border_halfedges, t.components), (2, 0, 1));
    }

    #[test]
    fn gabled_house_is_closed() {
        let m = gabled_house(4.0, 3.0, 3.0, 2.0, 3);
        m.check_invariants().unwrap();
        let t = euler_and_borders(&m);
        assert_eq!((t.euler_characteristic, t.border_halfedges), (2, 0));
        // Every face has an outward normal: signed volume is positive.
        let vol: f64 = m
            .faces()
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|v| m.vertex(v).coords);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum();
        let expected = 4.0 * 3.0 * 3.0 + 0.5 * 3.0 * 2.0 * 4.0;
        assert!((vol - expected).abs() < 1e-9, "{vol}");
    }

    #[test]
    fn courtyard_is_outward_oriented() {
        let m = courtyard([3.0, 3.0, 1.0], 1.0);
        let vol: f64 = m
            .faces()
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|v| m.vertex(v).coords);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum();
        assert!((vol - 8.0).abs() < 1e-9, "{vol}");
    }
}
