use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::shapes::{box_parts, courtyard_parts, gabled_parts, split_roof_parts, subdivide, Lattice};
use crate::error::{MeshError, Result};
use crate::meshcore::{edge_key, EdgeKey, SurfaceMesh, VertexId};

/// Largest per-axis offset given to duplicated seam vertices (meters).
pub const SEAM_JITTER: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum BaseShape {
    Box {
        size: [f64; 3],
        cells: [usize; 3],
    },
    GabledHouse {
        length: f64,
        width: f64,
        wall: f64,
        ridge: f64,
        cells: usize,
    },
    /// Courtyard building: genus 1.
    Torus {
        size: [f64; 3],
        inner: f64,
    },
    /// Two unit boxes (2×2×1 cells) along x; `gap` 0 makes them touch.
    TwoComponent {
        gap: f64,
    },
    /// Two open sheets sharing one hole across a gap.
    SplitRoof {
        gap: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Box side given as an axis and a direction, e.g. `+x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Side {
    pub axis: Axis,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Defect {
    RemoveFaces(Vec<usize>),
    /// Removes every face whose centroid lies in the box.
    RemoveBox {
        min: [f64; 3],
        max: [f64; 3],
    },
    /// Faces beyond the plane `axis = at` get private copies of the
    /// vertices lying on it.
    DuplicateSeam {
        axis: Axis,
        at: f64,
    },
    /// Closed annex box flush against a side, with its own coincident
    /// vertices.
    OverlapEdges {
        side: Side,
    },
    /// Annex box that reuses the side's wall faces, leaving three faces on
    /// every edge of the contact rectangle.
    NonManifoldFan {
        side: Side,
    },
    /// Adds a translated copy of a face.
    SelfIntersect {
        face: usize,
        translate: [f64; 3],
    },
    /// Faces with centroid in the box get private copies of their outline
    /// vertices and reversed winding: a zero-width slit that cannot be
    /// stitched and lies over the patch.
    SlitPatch {
        min: [f64; 3],
        max: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectRecipe {
    pub base: BaseShape,
    pub defects: Vec<Defect>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limitation {
    /// A hole may coincide with the genus hole of the closed model.
    GenusCoincidence,
    /// A hole boundary is split between disconnected components.
    SplitComponent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    /// Boundary of each removed patch as sorted undirected edges.
    pub true_holes: Vec<Vec<EdgeKey>>,
    /// Injected defects expected to be classified as pseudo-holes or left alone.
    pub pseudo_defects: Vec<String>,
    /// Open candidate rings expected for a split-component hole.
    pub expected_unclosable: usize,
    pub limitation: Option<Limitation>,
    /// Set when the base shape has genus > 0.
    pub genus_flag: bool,
}

struct Work {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[VertexId; 3]>,
    removed: Vec<bool>,
    /// Maps each vertex to the vertex it duplicates (identity otherwise).
    origin_of: Vec<VertexId>,
}

impl Work {
    fn push_vertex(&mut self, p: Point3<f64>, origin: Option<VertexId>) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(p);
        self.origin_of.push(origin.unwrap_or(id));
        id
    }

    fn bbox(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::MAX, f64::MAX, f64::MAX);
        let mut hi = Point3::new(f64::MIN, f64::MIN, f64::MIN);
        for f in self.faces.iter().zip(&self.removed).filter(|(_, &r)| !r).map(|(f, _)| f) {
            for &v in f {
                lo = lo.inf(&self.vertices[v]);
                hi = hi.sup(&self.vertices[v]);
            }
        }
        (lo, hi)
    }

    fn centroid(&self, f: usize) -> Point3<f64> {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v].coords);
        Point3::from((a + b + c) / 3.0)
    }
}

/// Builds the mesh and its ground truth. Pure in (recipe, seed).
pub fn generate(recipe: &DefectRecipe) -> Result<(SurfaceMesh, GroundTruth)> {
    let (vertices, faces) = match recipe.base {
        BaseShape::Box { size, cells } => {
            check_cells(&cells)?;
            box_parts([0.0; 3], size, cells)
        }
        BaseShape::GabledHouse {
            length,
            width,
            wall,
            ridge,
            cells,
        } => {
            check_cells(&[cells])?;
            gabled_parts(length, width, wall, ridge, cells)
        }
        BaseShape::Torus { size, inner } => {
            if !(inner > 0.0 && inner < size[0] && inner < size[1]) {
                return Err(MeshError::Recipe("courtyard must fit inside the footprint".into()));
            }
            courtyard_parts(size, inner)
        }
        BaseShape::TwoComponent { gap } => {
            let (mut v, mut f) = box_parts([0.0; 3], [1.0; 3], [2, 2, 1]);
            let (v2, f2) = box_parts([1.0 + gap, 0.0, 0.0], [1.0; 3], [2, 2, 1]);
            let base = v.len();
            v.extend(v2);
            f.extend(f2.into_iter().map(|t| t.map(|x| x + base)));
            (v, f)
        }
        BaseShape::SplitRoof { gap } => split_roof_parts(gap),
    };
    let n = vertices.len();
    let mut work = Work {
        removed: vec![false; faces.len()],
        vertices,
        faces,
        origin_of: (0..n).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let mut truth = GroundTruth {
        true_holes: Vec::new(),
        pseudo_defects: Vec::new(),
        expected_unclosable: 0,
        limitation: None,
        genus_flag: matches!(recipe.base, BaseShape::Torus { .. }),
    };
    match recipe.base {
        BaseShape::Torus { .. } => truth.limitation = Some(Limitation::GenusCoincidence),
        BaseShape::SplitRoof { .. } => {
            truth.limitation = Some(Limitation::SplitComponent);
            truth.expected_unclosable = 2;
        }
        BaseShape::TwoComponent { gap: 0.0 } => {
            truth.pseudo_defects.push("touching components: overlapping walls".into());
        }
        _ => {}
    }

    let mut removed_patch: Vec<usize> = Vec::new();
    for defect in &recipe.defects {
        match defect {
            Defect::RemoveFaces(ids) => {
                for &f in ids {
                    if f >= work.faces.len() || work.removed[f] {
                        return Err(MeshError::Recipe(format!("face {f} does not exist or was removed")));
                    }
                    work.removed[f] = true;
                    removed_patch.push(f);
                }
            }
            Defect::RemoveBox { min, max } => {
                let hits: Vec<usize> = (0..work.faces.len())
                    .filter(|&f| !work.removed[f])
                    .filter(|&f| {
                        let c = work.centroid(f);
                        (0..3).all(|i| c[i] >= min[i] && c[i] <= max[i])
                    })
                    .collect();
                if hits.is_empty() {
                    return Err(MeshError::Recipe("remove-box matched no face".into()));
                }
                for f in hits {
                    work.removed[f] = true;
                    removed_patch.push(f);
                }
            }
            Defect::DuplicateSeam { axis, at } => {
                duplicate_seam(&mut work, *axis, *at, &mut rng)?;
                truth.pseudo_defects.push(format!("duplicate seam at {axis:?} = {at}"));
            }
            Defect::OverlapEdges { side } => {
                annex(&mut work, *side, false, &recipe.base)?;
                truth.pseudo_defects.push("flush annex: overlapping edges".into());
            }
            Defect::NonManifoldFan { side } => {
                annex(&mut work, *side, true, &recipe.base)?;
                truth.pseudo_defects.push("shared-wall annex: non-manifold edges".into());
            }
            Defect::SelfIntersect { face, translate } => {
                if *face >= work.faces.len() || work.removed[*face] {
                    return Err(MeshError::Recipe(format!("face {face} does not exist or was removed")));
                }
                let t = Vector3::from(*translate);
                let tri = work.faces[*face];
                let copy = tri.map(|v| {
                    let p = work.vertices[v] + t;
                    work.push_vertex(p, None)
                });
                work.faces.push(copy);
                work.removed.push(false);
                truth.pseudo_defects.push(format!("translated copy of face {face}"));
            }
            Defect::SlitPatch { min, max } => {
                slit_patch(&mut work, min, max, &mut rng)?;
                truth.pseudo_defects.push("slit around a flipped patch".into());
            }
        }
    }

    if !matches!(recipe.base, BaseShape::SplitRoof { .. }) {
        truth.true_holes = patch_boundaries(&work, &removed_patch);
    }

    let faces: Vec<[VertexId; 3]> = work.faces.iter().zip(&work.removed).filter(|(_, &r)| !r).map(|(f, _)| *f).collect();
    let mesh = SurfaceMesh::from_triangles(work.vertices, faces)?;
    Ok((mesh, truth))
}

fn check_cells(cells: &[usize]) -> Result<()> {
    if cells.contains(&0) {
        return Err(MeshError::Recipe("cell counts must be positive".into()));
    }
    Ok(())
}

fn duplicate_seam(work: &mut Work, axis: Axis, at: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    let ax = axis.index();
    let mut copies: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for f in 0..work.faces.len() {
        if work.removed[f] || work.centroid(f)[ax] <= at {
            continue;
        }
        for k in 0..3 {
            let v = work.faces[f][k];
            if (work.vertices[v][ax] - at).abs() > 1e-12 {
                continue;
            }
            let copy = match copies.get(&v) {
                Some(&c) => c,
                None => {
                    let jitter = Vector3::new(
                        rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                        rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                        rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                    );
                    let p = work.vertices[v] + jitter;
                    let origin = work.origin_of[v];
                    let c = work.push_vertex(p, Some(origin));
                    copies.insert(v, c);
                    c
                }
            };
            work.faces[f][k] = copy;
        }
    }
    if copies.is_empty() {
        return Err(MeshError::Recipe(format!("no seam vertices on plane {axis:?} = {at}")));
    }
    Ok(())
}

fn slit_patch(work: &mut Work, min: &[f64; 3], max: &[f64; 3], rng: &mut ChaCha8Rng) -> Result<()> {
    let inside: Vec<bool> = (0..work.faces.len())
        .map(|f| {
            let c = work.centroid(f);
            !work.removed[f] && (0..3).all(|i| c[i] >= min[i] && c[i] <= max[i])
        })
        .collect();
    if !inside.iter().any(|&b| b) {
        return Err(MeshError::Recipe("slit-patch matched no face".into()));
    }
    let mut outside_vertices: BTreeSet<VertexId> = BTreeSet::new();
    for f in (0..work.faces.len()).filter(|&f| !inside[f] && !work.removed[f]) {
        outside_vertices.extend(work.faces[f]);
    }
    let mut copies: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for f in (0..work.faces.len()).filter(|&f| inside[f]) {
        for k in 0..3 {
            let v = work.faces[f][k];
            if !outside_vertices.contains(&v) {
                continue;
            }
            let c = *copies.entry(v).or_insert_with(|| {
                let jitter = Vector3::new(
                    rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                    rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                    rng.gen_range(-SEAM_JITTER..=SEAM_JITTER),
                );
                let p = work.vertices[v] + jitter;
                let origin = work.origin_of[v];
                work.push_vertex(p, Some(origin))
            });
            work.faces[f][k] = c;
        }
        work.faces[f].swap(1, 2);
    }
    if copies.is_empty() {
        return Err(MeshError::Recipe("slit-patch covers a whole component".into()));
    }
    Ok(())
}

fn annex(work: &mut Work, side: Side, share_wall: bool, base: &BaseShape) -> Result<()> {
    let (cells_a, cells_b) = match base {
        BaseShape::Box { cells, .. } => {
            let others: Vec<usize> = (0..3).filter(|&i| i != side.axis.index()).map(|i| cells[i]).collect();
            (others[0], others[1])
        }
        BaseShape::TwoComponent { .. } => (2, if side.axis == Axis::Z { 2 } else { 1 }),
        _ => return Err(MeshError::Recipe("annex defects need a box-shaped base".into())),
    };
    let (lo, hi) = work.bbox();
    let ax = side.axis.index();
    let depth = 0.5 * (hi[ax] - lo[ax]);
    let mut coords: [Vec<f64>; 3] = Default::default();
    let mut other = [cells_a, cells_b].into_iter();
    for i in 0..3 {
        if i == ax {
            coords[i] = if side.positive {
                vec![hi[i], hi[i] + depth]
            } else {
                vec![lo[i] - depth, lo[i]]
            };
        } else {
            let c = if share_wall { other.next().unwrap_or(1) } else { 1 };
            coords[i] = subdivide(lo[i], hi[i] - lo[i], c);
        }
    }
    let contact = if side.positive { 0 } else { 1 };
    let mut lat = Lattice::new(coords[0].clone(), coords[1].clone(), coords[2].clone());
    lat.box_surface(|_, _, _| false);
    let (verts, faces) = lat.into_parts();

    let mut existing: HashMap<[u64; 3], VertexId> = HashMap::new();
    for (v, p) in work.vertices.iter().enumerate() {
        existing.entry([p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]).or_insert(v);
    }
    let on_contact = |p: &Point3<f64>| p[ax] == coords[ax][contact];
    let mut map = Vec::with_capacity(verts.len());
    for p in &verts {
        let reuse = share_wall && on_contact(p);
        let id = match existing.get(&[p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]) {
            Some(&v) if reuse => v,
            _ if reuse => {
                return Err(MeshError::Recipe("annex contact grid does not match the base".into()));
            }
            _ => work.push_vertex(*p, None),
        };
        map.push(id);
    }
    for f in faces {
        if share_wall && f.iter().all(|&v| on_contact(&verts[v])) {
            continue;
        }
        work.faces.push(f.map(|v| map[v]));
        work.removed.push(false);
    }
    Ok(())
}

/// Boundary cycles of the removed faces, in original (pre-seam) vertex ids.
fn patch_boundaries(work: &Work, removed: &[usize]) -> Vec<Vec<EdgeKey>> {
    let canon = |v: VertexId| work.origin_of[v];
    let mut removed_count: BTreeMap<EdgeKey, usize> = BTreeMap::new();
    for &f in removed {
        let t = work.faces[f].map(canon);
        for k in 0..3 {
            *removed_count.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
        }
    }
    let mut kept: BTreeSet<EdgeKey> = BTreeSet::new();
    for f in (0..work.faces.len()).filter(|&f| !work.removed[f]) {
        let t = work.faces[f].map(canon);
        for k in 0..3 {
            kept.insert(edge_key(t[k], t[(k + 1) % 3]));
        }
    }
    let boundary: Vec<EdgeKey> = removed_count
        .into_iter()
        .filter(|(e, c)| *c == 1 && kept.contains(e))
        .map(|(e, _)| e)
        .collect();

    // Split into vertex-connected cycles.
    let mut unused: BTreeSet<EdgeKey> = boundary.iter().copied().collect();
    let mut rings = Vec::new();
    while let Some(&first) = unused.iter().next() {
        unused.remove(&first);
        let mut ring = vec![first];
        let mut frontier: BTreeSet<VertexId> = [first.0, first.1].into();
        loop {
            let next: Vec<EdgeKey> = unused
                .iter()
                .filter(|e| frontier.contains(&e.0) || frontier.contains(&e.1))
                .copied()
                .collect();
            if next.is_empty() {
                break;
            }
            for e in next {
                unused.remove(&e);
                frontier.insert(e.0);
                frontier.insert(e.1);
                ring.push(e);
            }
        }
        ring.sort_unstable();
        rings.push(ring);
    }
    rings.sort();
    rings
}

impl DefectRecipe {
    /// Parses the line-based recipe format (see the crate README).
    pub fn parse(text: &str) -> Result<Self> {
        let mut base = None;
        let mut defects = Vec::new();
        let mut seed = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| MeshError::Recipe(format!("line {}: {m}", idx + 1));
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let nums = |from: usize| -> Result<Vec<f64>> {
                tokens[from..]
                    .iter()
                    .map(|t| t.parse::<f64>().map_err(|_| err(&format!("bad number '{t}'"))))
                    .collect()
            };
            match tokens[0] {
                "base" => {
                    let kind = *tokens.get(1).ok_or_else(|| err("missing base shape"))?;
                    let args = tokens[2..]
                        .iter()
                        .filter(|t| **t != "cells")
                        .map(|t| t.parse::<f64>().map_err(|_| err(&format!("bad number '{t}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    base = Some(parse_base(kind, &args).map_err(|m| err(&m))?);
                }
                "seed" => {
                    seed = tokens
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("seed needs an integer"))?;
                }
                "remove-faces" => {
                    let ids = tokens[1..]
                        .iter()
                        .map(|t| t.parse::<usize>().map_err(|_| err(&format!("bad face id '{t}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    defects.push(Defect::RemoveFaces(ids));
                }
                "remove-box" => {
                    let a = nums(1)?;
                    if a.len() != 6 {
                        return Err(err("remove-box needs six numbers"));
                    }
                    defects.push(Defect::RemoveBox {
                        min: [a[0], a[1], a[2]],
                        max: [a[3], a[4], a[5]],
                    });
                }
                "slit-patch" => {
                    let a = nums(1)?;
                    if a.len() != 6 {
                        return Err(err("slit-patch needs six numbers"));
                    }
                    defects.push(Defect::SlitPatch {
                        min: [a[0], a[1], a[2]],
                        max: [a[3], a[4], a[5]],
                    });
                }
                "duplicate-seam" => {
                    let axis = parse_axis(tokens.get(1).copied().unwrap_or("")).ok_or_else(|| err("bad axis"))?;
                    let at = nums(2)?;
                    let &[at] = at.as_slice() else {
                        return Err(err("duplicate-seam needs one coordinate"));
                    };
                    defects.push(Defect::DuplicateSeam { axis, at });
                }
                "overlap-edges" | "nonmanifold-fan" => {
                    let side = parse_side(tokens.get(1).copied().unwrap_or("")).ok_or_else(|| err("bad side"))?;
                    defects.push(if tokens[0] == "overlap-edges" {
                        Defect::OverlapEdges { side }
                    } else {
                        Defect::NonManifoldFan { side }
                    });
                }
                "self-intersect" => {
                    let a = nums(1)?;
                    if a.len() != 4 || a[0] < 0.0 || a[0].fract() != 0.0 {
                        return Err(err("self-intersect needs a face id and a translation"));
                    }
                    defects.push(Defect::SelfIntersect {
                        face: a[0] as usize,
                        translate: [a[1], a[2], a[3]],
                    });
                }
                other => return Err(err(&format!("unknown directive '{other}'"))),
            }
        }
        let base = base.ok_or_else(|| MeshError::Recipe("missing 'base' line".into()))?;
        Ok(Self { base, defects, seed })
    }
}

fn parse_axis(t: &str) -> Option<Axis> {
    match t {
        "x" => Some(Axis::X),
        "y" => Some(Axis::Y),
        "z" => Some(Axis::Z),
        _ => None,
    }
}

fn parse_side(t: &str) -> Option<Side> {
    let (sign, axis) = t.split_at(t.len().min(1));
    let positive = match sign {
        "+" => true,
        "-" => false,
        _ => return None,
    };
    Some(Side {
        axis: parse_axis(axis)?,
        positive,
    })
}

fn parse_base(kind: &str, a: &[f64]) -> std::result::Result<BaseShape, String> {
    let cells = |xs: &[f64]| -> std::result::Result<Vec<usize>, String> {
        xs.iter()
            .map(|&c| {
                if c >= 1.0 && c.fract() == 0.0 {
                    Ok(c as usize)
                } else {
                    Err(format!("bad cell count {c}"))
                }
            })
            .collect()
    };
    match (kind, a.len()) {
        ("box", 3) => Ok(BaseShape::Box {
            size: [a[0], a[1], a[2]],
            cells: [1, 1, 1],
        }),
        ("box", 6) => {
            let c = cells(&a[3..])?;
            Ok(BaseShape::Box {
                size: [a[0], a[1], a[2]],
                cells: [c[0], c[1], c[2]],
            })
        }
        ("gabled-house", 4 | 5) => Ok(BaseShape::GabledHouse {
            length: a[0],
            width: a[1],
            wall: a[2],
            ridge: a[3],
            cells: if a.len() == 5 { cells(&a[4..])?[0] } else { 1 },
        }),
        ("torus", 4) => Ok(BaseShape::Torus {
            size: [a[0], a[1], a[2]],
            inner: a[3],
        }),
        ("two-component", 1) => Ok(BaseShape::TwoComponent { gap: a[0] }),
        ("split-roof", 1) => Ok(BaseShape::SplitRoof { gap: a[0] }),
        _ => Err(format!("unknown base '{kind}' with {} arguments", a.len())),
    }
}
