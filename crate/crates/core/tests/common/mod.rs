//! Shared fixture loading and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use lod2_holefill::holedetect::HoleSet;
use lod2_holefill::meshcore::{EdgeKey, SurfaceMesh};
use lod2_holefill::synthkit::{generate, DefectRecipe, GroundTruth};

pub struct Fixture {
    pub name: String,
    pub path: PathBuf,
    pub tags: Vec<String>,
    pub recipe: DefectRecipe,
    pub mesh: SurfaceMesh,
    pub truth: GroundTruth,
}

impl Fixture {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

pub fn recipe_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("recipes")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lod2-holefill")
}

/// Every shipped recipe, sorted by file name. Tags come from a
/// `# tags: a b` comment line.
pub fn suite() -> Vec<Fixture> {
    let mut paths: Vec<PathBuf> = fs::read_dir(recipe_dir())
        .expect("recipe directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "recipe"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).expect("readable recipe");
            let tags = text
                .lines()
                .find_map(|l| l.trim().strip_prefix("# tags:"))
                .map(|t| t.split_whitespace().map(String::from).collect())
                .unwrap_or_default();
            let recipe = DefectRecipe::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let (mesh, truth) = generate(&recipe).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            Fixture {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                path,
                tags,
                recipe,
                mesh,
                truth,
            }
        })
        .collect()
}

/// Edge keys with both ends replaced by their duplicate-group
/// representative, sorted.
pub fn grouped(mesh: &SurfaceMesh, edges: impl IntoIterator<Item = EdgeKey>) -> Vec<EdgeKey> {
    let mut out: Vec<EdgeKey> = edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (mesh.duplicate_group(a), mesh.duplicate_group(b));
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Compares detected rings with the ground truth modulo duplicate groups.
/// `mesh` is the preprocessed mesh the holes were detected on.
pub fn check_classification(mesh: &SurfaceMesh, holes: &HoleSet, truth: &GroundTruth) -> Result<(), String> {
    let mut found: Vec<Vec<EdgeKey>> = holes
        .holes
        .iter()
        .map(|r| grouped(mesh, r.edges.iter().map(|e| (e.from, e.to))))
        .collect();
    let mut expected: Vec<Vec<EdgeKey>> = truth.true_holes.iter().map(|r| grouped(mesh, r.iter().copied())).collect();
    found.sort();
    expected.sort();
    if found != expected {
        return Err(format!("true holes {found:?}, expected {expected:?}"));
    }
    let unclosable = holes.unclosable().count();
    if unclosable != truth.expected_unclosable {
        return Err(format!("{unclosable} unclosable rings, expected {}", truth.expected_unclosable));
    }
    Ok(())
}

/// Per face-connected component: (V − E + F, edges not used exactly once
/// in each direction).
pub fn component_stats(faces: &[[usize; 3]]) -> Vec<(i64, usize)> {
    let n = faces.iter().flatten().max().map_or(0, |m| m + 1);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for f in faces {
        for k in 1..3 {
            let (a, b) = (find(&mut parent, f[0]), find(&mut parent, f[k]));
            parent[a.max(b)] = a.min(b);
        }
    }
    // Vertices, edge directions and face count per component root.
    type Tally = (BTreeSet<usize>, BTreeMap<(usize, usize), (usize, usize)>, i64);
    let mut comps: BTreeMap<usize, Tally> = BTreeMap::new();
    for f in faces {
        let c = comps.entry(find(&mut parent, f[0])).or_default();
        c.2 += 1;
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            c.0.insert(a);
            let slot = c.1.entry((a.min(b), a.max(b))).or_default();
            if a < b {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
    }
    comps
        .values()
        .map(|(v, e, f)| {
            let bad = e.values().filter(|&&d| d != (1, 1)).count();
            (v.len() as i64 - e.len() as i64 + f, bad)
        })
        .collect()
}
