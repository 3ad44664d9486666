//! Wavefront OBJ reading and writing (positions and faces only).

use std::fmt::Write as _;

use nalgebra::Point3;

use super::halfedge::{SurfaceMesh, VertexId};
use crate::error::{MeshError, Result};

/// Parses OBJ text. Polygons are fan-triangulated from their first vertex;
/// `f a/b/c` references use only the position index; other directives are
/// ignored.
pub fn load_obj(bytes: &[u8]) -> Result<SurfaceMesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| MeshError::Parse {
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_err(line_no, format!("bad vertex coordinate: {e}")))?;
                if coords.len() != 3 {
                    return Err(parse_err(line_no, "vertex needs three coordinates".into()));
                }
                if !coords.iter().all(|c| c.is_finite()) {
                    return Err(parse_err(line_no, "non-finite vertex coordinate".into()));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let polygon = tokens
                    .map(|t| resolve_index(t, vertices.len(), line_no))
                    .collect::<Result<Vec<VertexId>>>()?;
                if polygon.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least three vertices".into()));
                }
                for i in 1..polygon.len() - 1 {
                    faces.push([polygon[0], polygon[i], polygon[i + 1]]);
                }
            }
            _ => {}
        }
    }
    SurfaceMesh::from_triangles(vertices, faces)
}

fn parse_err(line: usize, message: String) -> MeshError {
    MeshError::Parse { line, message }
}

fn resolve_index(token: &str, count: usize, line: usize) -> Result<VertexId> {
    let pos = token.split('/').next().unwrap_or("");
    let i: i64 = pos.parse().map_err(|_| parse_err(line, format!("bad face index '{token}'")))?;
    let resolved = match i {
        0 => None,
        i if i > 0 => Some(i as usize - 1),
        i => count.checked_sub(i.unsigned_abs() as usize),
    };
    match resolved {
        Some(v) if v < count => Ok(v),
        _ => Err(parse_err(line, format!("face index {i} out of range ({count} vertices defined)"))),
    }
}

/// Serializes every vertex (including unreferenced ones) followed by every
/// face, in id order.
pub fn save_obj(mesh: &SurfaceMesh) -> Vec<u8> {
    let mut out = String::new();
    write_vertices(&mut out, mesh.vertices());
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out.into_bytes()
}

/// Writes vertices plus `l` line elements, used for boundary annotation.
pub fn save_obj_lines(vertices: &[Point3<f64>], lines: &[(VertexId, VertexId)]) -> Vec<u8> {
    let mut out = String::new();
    write_vertices(&mut out, vertices);
    for (a, b) in lines {
        let _ = writeln!(out, "l {} {}", a + 1, b + 1);
    }
    out.into_bytes()
}

fn write_vertices(out: &mut String, vertices: &[Point3<f64>]) {
    for p in vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_sig(p.x), fmt_sig(p.y), fmt_sig(p.z));
    }
}

/// Plain decimal with 9 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let decimals = (DIGITS - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const CUBE: &str = "\
v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1
f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\nf 1 2 6\nf 1 6 5
f 2 3 7\nf 2 7 6\nf 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8
";

    #[test]
    fn cube_loads_closed() {
        let m = load_obj(CUBE.as_bytes()).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_faces(), 12);
        assert_eq!(m.num_border_halfedges(), 0);
        m.check_invariants().unwrap();
    }

    #[test]
    fn cube_without_roof_has_four_borders() {
        let text: String = CUBE
            .lines()
            .filter(|l| *l != "f 5 6 7" && *l != "f 5 7 8")
            .map(|l| format!("{l}\n"))
            .collect();
        let m = load_obj(text.as_bytes()).unwrap();
        assert_eq!(m.num_faces(), 10);
        assert_eq!(m.num_border_halfedges(), 4);
        m.check_invariants().unwrap();
    }

    #[test]
    fn quads_fan_from_first_vertex_and_slash_indices_parse() {
        let m = load_obj(b"v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1/1 3//2 4\n").unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match load_obj(b"v 0 0 0\nv 1 x 0\n") {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match load_obj(b"v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 4\n") {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_mesh_round_trips() {
        let m = load_obj(b"").unwrap();
        assert!(save_obj(&m).is_empty());
    }

    #[test]
    fn duplicates_survive_round_trip() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 0 0.0001\nf 1 2 3\nf 4 3 2\n";
        let m = load_obj(text.as_bytes()).unwrap();
        let again = load_obj(&save_obj(&m)).unwrap();
        assert_eq!(again.num_vertices(), 4);
        assert_eq!(again.faces(), m.faces());
        assert_eq!(again.vertex(3), m.vertex(3));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-0.5), "-0.5");
        assert_eq!(fmt_sig(85123.4567891), "85123.4568");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(-1.5e-12), "-0.0000000000015");
    }
}
