//! Command-line front end: `repair`, `validate` and `gen`.

mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use report::{RepairReport, ValidateReport, SCHEMA_VERSION};

use crate::config::RepairConfig;
use crate::error::{MeshError, Result};
use crate::holedetect::detect_holes;
use crate::meshcore::{load_obj, save_obj, save_obj_lines, SurfaceMesh, VertexId};
use crate::pipeline::{repair, RepairOutcome};
use crate::preprocess::{mark_duplicates, mark_overlapping_edges, preprocess};
use crate::synthkit::{generate, DefectRecipe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lod2-holefill", version, about = "Detect and fill holes in LoD2 building meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fill holes and write the repaired mesh.
    Repair(RepairArgs),
    /// Report border, non-manifold, duplicate and overlap counts.
    Validate(ValidateArgs),
    /// Build a fixture mesh from a recipe file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Thresholds {
    /// Plane distance threshold of the virtual-triangle test (m).
    #[arg(long, default_value_t = 0.1)]
    pub eps_distance: f64,
    /// Overlap-area ratio threshold of the virtual-triangle test.
    #[arg(long, default_value_t = 0.01)]
    pub eps_area_ratio: f64,
    /// Duplicate vertex radius (m).
    #[arg(long, default_value_t = 1e-3)]
    pub eps_duplicate: f64,
}

impl Thresholds {
    pub fn config(&self) -> Result<RepairConfig> {
        RepairConfig::with_thresholds(self.eps_distance, self.eps_area_ratio, self.eps_duplicate)
    }
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output OBJ (single input only).
    #[arg(short, long, conflicts_with = "out_dir")]
    pub output: Option<PathBuf>,
    /// Directory receiving `<stem>.repaired.obj` and `<stem>.report.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Report JSON (single input only).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Hole boundaries as OBJ line elements (single input only).
    #[arg(long)]
    pub annotate: Option<PathBuf>,
    /// Worker threads for multi-file batches.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Include wall-clock timings in the report (makes it nondeterministic).
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Hole boundaries as OBJ line elements.
    #[arg(long)]
    pub annotate: Option<PathBuf>,
    #[command(flatten)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub recipe: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Ground truth JSON.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Repair(a) => run_repair(&a),
        Command::Validate(a) => run_validate(&a),
        Command::Gen(a) => run_gen(&a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT_ERROR
    })
}

fn read_mesh(path: &Path) -> Result<SurfaceMesh> {
    load_obj(&fs::read(path)?)
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}

fn hole_lines(outcome_holes: &crate::holedetect::HoleSet) -> Vec<(VertexId, VertexId)> {
    outcome_holes
        .holes
        .iter()
        .flat_map(|r| r.edges.iter())
        .chain(outcome_holes.unclosable().flat_map(|r| r.edges.iter()))
        .map(|e| (e.from, e.to))
        .collect()
}

struct Targets {
    output: PathBuf,
    report: Option<PathBuf>,
    annotate: Option<PathBuf>,
}

fn targets(args: &RepairArgs) -> Result<Vec<Targets>> {
    if let Some(dir) = &args.out_dir {
        if args.inputs.len() > 1 && (args.report.is_some() || args.annotate.is_some()) {
            return Err(MeshError::Config(
                "--report and --annotate take a single input; batches write into --out-dir".into(),
            ));
        }
        return Ok(args
            .inputs
            .iter()
            .map(|p| {
                let stem = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "mesh".into());
                Targets {
                    output: dir.join(format!("{stem}.repaired.obj")),
                    report: Some(args.report.clone().unwrap_or_else(|| dir.join(format!("{stem}.report.json")))),
                    annotate: args.annotate.clone(),
                }
            })
            .collect());
    }
    match (&args.output, args.inputs.len()) {
        (Some(out), 1) => Ok(vec![Targets {
            output: out.clone(),
            report: args.report.clone(),
            annotate: args.annotate.clone(),
        }]),
        (Some(_), _) => Err(MeshError::Config("-o takes a single input; use --out-dir for batches".into())),
        (None, _) => Err(MeshError::Config("give -o <file> or --out-dir <dir>".into())),
    }
}

fn repair_one(input: &Path, target: &Targets, cfg: &RepairConfig, timings: bool) -> Result<i32> {
    let mesh = read_mesh(input)?;
    let outcome: RepairOutcome = repair(mesh, cfg)?;
    write(&target.output, &save_obj(&outcome.mesh))?;
    let report = RepairReport::new(&input.display().to_string(), cfg, &outcome, timings);
    if let Some(path) = &target.report {
        write(path, &to_json(&report))?;
    }
    if let Some(path) = &target.annotate {
        write(path, &save_obj_lines(outcome.mesh.vertices(), &hole_lines(&outcome.holes)))?;
    }
    Ok(if report.holes.remaining == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

/// Repairs each input; the exit code is the worst over all files.
pub fn run_repair(args: &RepairArgs) -> Result<i32> {
    let cfg = args.thresholds.config()?;
    let targets = targets(args)?;
    let jobs: Vec<(&PathBuf, &Targets)> = args.inputs.iter().zip(&targets).collect();
    let work = |&(input, target): &(&PathBuf, &Targets)| repair_one(input, target, &cfg, args.timings);
    let results: Vec<Result<i32>> = if args.jobs > 1 && jobs.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| MeshError::Config(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(work).collect())
    } else {
        jobs.iter().map(work).collect()
    };
    let mut code = EXIT_OK;
    for ((input, _), r) in jobs.iter().zip(results) {
        match r {
            Ok(c) => {
                if c == EXIT_PARTIAL {
                    eprintln!("{}: some holes remain open", input.display());
                }
                if code != EXIT_INPUT_ERROR {
                    code = code.max(c);
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", input.display());
                code = EXIT_INPUT_ERROR;
            }
        }
    }
    Ok(code)
}

pub fn run_validate(args: &ValidateArgs) -> Result<i32> {
    let cfg = args.thresholds.config()?;
    let mut mesh = match read_mesh(&args.input) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{}: {e}", args.input.display());
            return Ok(EXIT_INPUT_ERROR);
        }
    };
    let report = {
        let groups = mark_duplicates(&mut mesh, &cfg);
        let marks = mark_overlapping_edges(&mut mesh, &cfg);
        let mut fixed = mesh.clone();
        preprocess(&mut fixed, &cfg);
        let holes = detect_holes(&fixed, &cfg)?;
        if let Some(path) = &args.annotate {
            write(path, &save_obj_lines(fixed.vertices(), &hole_lines(&holes)))?;
        }
        ValidateReport::new(&args.input.display().to_string(), &mesh, &groups, &marks, &holes)
    };
    let json = to_json(&report);
    match &args.report {
        Some(path) => write(path, &json)?,
        None => print!("{}", String::from_utf8_lossy(&json)),
    }
    Ok(EXIT_OK)
}

pub fn run_gen(args: &GenArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.recipe)?;
    let recipe = DefectRecipe::parse(&text)?;
    let (mesh, truth) = generate(&recipe)?;
    write(&args.output, &save_obj(&mesh))?;
    if let Some(path) = &args.truth {
        write(path, &to_json(&truth))?;
    }
    Ok(EXIT_OK)
}
