mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(common::bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Generates a shipped recipe into `dir` and returns the OBJ file name.
fn fixture(dir: &Path, name: &str) -> String {
    let recipe = common::recipe_dir().join(format!("{name}.recipe"));
    let obj = format!("{name}.obj");
    let out = run(dir, &["gen", recipe.to_str().unwrap(), "-o", &obj]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    obj
}

fn json(path: PathBuf) -> Value {
    serde_json::from_slice(&fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

/// Faces straight from the OBJ text, zero-based.
fn obj_faces(path: &Path) -> Vec<[usize; 3]> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("f "))
        .map(|l| {
            let ids: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.split('/').next().unwrap().parse::<usize>().unwrap() - 1)
                .collect();
            [ids[0], ids[1], ids[2]]
        })
        .collect()
}

fn edge_uses(faces: &[[usize; 3]]) -> BTreeMap<(usize, usize), usize> {
    let mut uses = BTreeMap::new();
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    uses
}

#[test]
fn repair_closes_a_hole_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let obj = fixture(dir.path(), "02-box-roof-cell");
    let out = run(dir.path(), &["repair", &obj, "-o", "fixed.obj", "--report", "report.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let faces = obj_faces(&dir.path().join("fixed.obj"));
    assert!(edge_uses(&faces).values().all(|&n| n == 2));
    let report = json(dir.path().join("report.json"));
    assert_eq!(report["holes"]["detected"], 1);
    assert_eq!(report["holes"]["filled"], 1);
    assert_eq!(report["faces"]["output"].as_u64().unwrap() as usize, faces.len());
    assert!(report.get("timings").is_none());
}

#[test]
fn unfillable_ring_exits_two() {
    let dir = TempDir::new().unwrap();
    let obj = fixture(dir.path(), "28-split-roof");
    let out = run(dir.path(), &["repair", &obj, "-o", "fixed.obj", "--report", "report.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("some holes remain open"));
    let report = json(dir.path().join("report.json"));
    let unfillable = report["holes"]["unfillable"].as_array().unwrap();
    assert_eq!(unfillable.len(), 2);
    assert!(unfillable.iter().all(|u| u["reason"] == "no-candidates"));
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.obj"), "v 0 0\nf 1 2 3\n").unwrap();
    fs::write(dir.path().join("dangling.obj"), "v 0 0 0\nv 1 0 0\nf 1 2 3\n").unwrap();
    let obj = fixture(dir.path(), "01-cube-roof");
    for args in [
        vec!["repair", "missing.obj", "-o", "x.obj"],
        vec!["repair", "bad.obj", "-o", "x.obj"],
        vec!["repair", "dangling.obj", "-o", "x.obj"],
        vec!["repair", &obj, &obj, "-o", "x.obj"],
        vec!["repair", &obj],
        vec!["repair", &obj, "-o", "x.obj", "--eps-distance=-1"],
        vec!["repair", &obj, "-o", "x.obj", "--eps-duplicate", "0.5"],
        vec!["validate", "missing.obj"],
        vec!["gen", "missing.recipe", "-o", "x.obj"],
        vec!["frobnicate"],
    ] {
        let out = run(dir.path(), &args);
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?} printed no error");
    }
}

#[test]
fn bad_recipe_names_the_line() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("r.recipe"), "base box 1 1 1\nremove-faces 99\n").unwrap();
    let out = run(dir.path(), &["gen", "r.recipe", "-o", "x.obj"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("face 99"));
    fs::write(dir.path().join("r.recipe"), "base box 1 1 1\nwobble 3\n").unwrap();
    let out = run(dir.path(), &["gen", "r.recipe", "-o", "x.obj"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn empty_mesh_is_a_no_op() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("empty.obj"), "").unwrap();
    let out = run(dir.path(), &["repair", "empty.obj", "-o", "fixed.obj", "--report", "report.json"]);
    assert_eq!(code(&out), 0);
    assert!(obj_faces(&dir.path().join("fixed.obj")).is_empty());
    let report = json(dir.path().join("report.json"));
    assert_eq!(report["faces"]["output"], 0);
    assert_eq!(report["holes"]["detected"], 0);
}

#[test]
fn help_and_version_exit_zero() {
    let dir = TempDir::new().unwrap();
    for args in [["--help"], ["--version"]] {
        let out = run(dir.path(), &args);
        assert_eq!(code(&out), 0);
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn validate_counts_nonmanifold_fixture() {
    let dir = TempDir::new().unwrap();
    let obj = fixture(dir.path(), "20-nonmanifold-hole");
    let out = run(dir.path(), &["validate", &obj]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let uses = edge_uses(&obj_faces(&dir.path().join(&obj)));
    let nonmanifold = uses.values().filter(|&&n| n > 2).count();
    let border = uses.values().filter(|&&n| n == 1).count();
    assert!(nonmanifold > 0);
    assert_eq!(report["nonmanifold_edges"].as_u64().unwrap() as usize, nonmanifold);
    assert_eq!(report["border_edges"].as_u64().unwrap() as usize, border);
    assert_eq!(report["true_holes"], 1);
    assert_eq!(report["duplicate_groups"], 0);
}

#[test]
fn validate_counts_seam_fixture() {
    let dir = TempDir::new().unwrap();
    let obj = fixture(dir.path(), "17-box-seam-only");
    let out = run(dir.path(), &["validate", &obj, "--report", "v.json", "--annotate", "holes.obj"]);
    assert_eq!(code(&out), 0);
    let report = json(dir.path().join("v.json"));
    let text = fs::read_to_string(dir.path().join(&obj)).unwrap();
    let points: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let c: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    let near = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>() <= 1e-6;
    let duplicated = (0..points.len())
        .filter(|&i| (0..points.len()).any(|j| j != i && near(&points[i], &points[j])))
        .count();
    let uses = edge_uses(&obj_faces(&dir.path().join(&obj)));
    assert!(duplicated > 0);
    assert_eq!(report["duplicated_vertices"].as_u64().unwrap() as usize, duplicated);
    assert_eq!(
        report["border_edges"].as_u64().unwrap() as usize,
        uses.values().filter(|&&n| n == 1).count()
    );
    assert_eq!(report["true_holes"], 0);
    // Seams are stitched before detection, so nothing is annotated.
    assert!(!fs::read_to_string(dir.path().join("holes.obj"))
        .unwrap()
        .lines()
        .any(|l| l.starts_with("l ")));
}

#[test]
fn batch_writes_one_pair_per_input() {
    let dir = TempDir::new().unwrap();
    let a = fixture(dir.path(), "01-cube-roof");
    let b = fixture(dir.path(), "28-split-roof");
    let out = run(dir.path(), &["repair", &a, &b, "--out-dir", "out", "--jobs", "2", "--timings"]);
    assert_eq!(code(&out), 2, "worst status wins");
    for stem in ["01-cube-roof", "28-split-roof"] {
        assert!(dir.path().join(format!("out/{stem}.repaired.obj")).is_file());
        let report = json(dir.path().join(format!("out/{stem}.report.json")));
        assert!(report["timings"]["remesh_ms"].is_number());
    }
}

#[test]
fn annotation_lists_hole_boundaries() {
    let dir = TempDir::new().unwrap();
    let obj = fixture(dir.path(), "03-box-two-patches");
    let out = run(dir.path(), &["repair", &obj, "-o", "fixed.obj", "--annotate", "holes.obj"]);
    assert_eq!(code(&out), 0);
    let lines = fs::read_to_string(dir.path().join("holes.obj")).unwrap();
    assert_eq!(lines.lines().filter(|l| l.starts_with("l ")).count(), 8);
}
