//! Command line driver: reads a triangular system, runs the root tree and
//! prints the tropical points.

pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use ztrop::expansion::ExpansionConfig;
use ztrop::root_tree::TreeEvent;
use ztrop::{parse_system, uniqueness_oracle, Error, Rat, RootTree, TropPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_SPLITTING: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_MATH: i32 = 5;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    Rat::from_str(s.trim()).map_err(|e| format!("not a rational number: {e}"))
}

/// Tropical points of a zero-dimensional triangular system over Puiseux series.
#[derive(Parser, Debug)]
#[command(name = "ztrop", version)]
pub struct Args {
    /// System file; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Precision increment per reinforcement.
    #[arg(long, default_value = "1", value_parser = parse_rat)]
    pub pstep: Rat,
    /// Precision limit.
    #[arg(long, default_value = "32", value_parser = parse_rat)]
    pub pmax: Rat,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Include the final root tree in the output.
    #[arg(long)]
    pub tree: bool,
    /// Write one SVG per Newton polygon examined into this directory.
    #[arg(long, value_name = "DIR")]
    pub newton_svg: Option<PathBuf>,
    /// Recursion cap of the Puiseux expansion.
    #[arg(long, default_value_t = ExpansionConfig::default().max_depth)]
    pub max_depth: usize,
    /// Cross-check every uniqueness decision against the randomized oracle
    /// seeded with this value.
    #[arg(long)]
    pub seed: Option<u64>,
}

const ORACLE_TRIALS: usize = 100;

fn exit_code(e: &Error) -> i32 {
    match e.root_cause() {
        Error::NonSplitting { .. } => EXIT_NON_SPLITTING,
        Error::PrecisionLimitExceeded { .. } => EXIT_PRECISION,
        Error::Syntax { .. } | Error::ReservedIdentifier { .. } | Error::NonTriangularInput { .. } => EXIT_INPUT,
        _ => EXIT_MATH,
    }
}

#[derive(Serialize)]
struct TreeVertex {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    root: Option<String>,
    valuation: Option<String>,
    p: String,
    dead: bool,
    children: Vec<usize>,
}

#[derive(Serialize)]
struct TreeJson {
    grow: usize,
    reinforce: usize,
    vertices: Vec<TreeVertex>,
}

#[derive(Serialize)]
struct Output {
    points: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree: Option<TreeJson>,
}

#[derive(Serialize)]
struct PolygonRecord {
    file: String,
    kind: &'static str,
    vertex: usize,
    poly: String,
    vertices: Vec<[String; 2]>,
    slopes: Vec<String>,
    initials: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unique: Option<bool>,
}

fn tree_json(tree: &RootTree) -> TreeJson {
    let counters = tree.counters();
    let vertices = tree
        .vertices_dfs()
        .into_iter()
        .map(|id| {
            let v = tree.vertex(id);
            TreeVertex {
                id: id.0,
                parent: v.parent.map(|p| p.0),
                depth: v.depth,
                root: v.root.map(ToString::to_string),
                valuation: v.root.and_then(|r| r.valuation()).map(|w| w.to_string()),
                p: v.p.to_string(),
                dead: v.dead,
                children: v.children.iter().map(|c| c.0).collect(),
            }
        })
        .collect();
    TreeJson { grow: counters.grow, reinforce: counters.reinforce, vertices }
}

fn tree_text(tree: &RootTree) -> String {
    let mut out = String::new();
    for id in tree.vertices_dfs() {
        let v = tree.vertex(id);
        let indent = "  ".repeat(v.depth);
        let label = match v.root {
            None => "root".to_string(),
            Some(r) => format!("x{} = {r}  p={}", r.coord() + 1, v.p),
        };
        let dead = if v.dead { "  (dead)" } else { "" };
        out.push_str(&format!("{indent}v{} {label}{dead}\n", id.0));
    }
    let c = tree.counters();
    out.push_str(&format!("grow {} reinforce {}\n", c.grow, c.reinforce));
    out
}

fn point_strings(p: &TropPoint) -> Vec<String> {
    p.0.iter().map(ToString::to_string).collect()
}

fn write_svgs(dir: &Path, files: &[(String, String)], index: &[PolygonRecord]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    let mut json = serde_json::to_string_pretty(index).expect("serializable");
    json.push('\n');
    fs::write(dir.join("polygons.json"), json)
}

/// Runs the driver and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };

    let text = match &args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map(|_| buf).map_err(|e| format!("cannot read standard input: {e}"))
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };

    let system = match parse_system(&text) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };

    let mut tree = match RootTree::starting_tree(system, args.pstep.clone(), args.pmax.clone()) {
        Ok(t) => t.with_config(ExpansionConfig { max_depth: args.max_depth }),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };

    let mut svgs: Vec<(String, String)> = Vec::new();
    let mut index: Vec<PolygonRecord> = Vec::new();
    let mut render_error: Option<Error> = None;
    let mut disagreements: Vec<String> = Vec::new();
    let want_svg = args.newton_svg.is_some();
    let seed = args.seed;
    let mut observer = |event: &TreeEvent<'_>| {
        let (kind, vertex, poly, polygon, unique) = match event {
            TreeEvent::Extension { vertex, poly, polygon, unique } => ("extension", *vertex, *poly, *polygon, Some(*unique)),
            TreeEvent::Reinforcement { vertex, poly, polygon } => ("reinforcement", *vertex, *poly, *polygon, None),
        };
        if let (Some(seed), Some(unique)) = (seed, unique) {
            let oracle = uniqueness_oracle(poly, ORACLE_TRIALS, seed);
            if oracle != unique {
                disagreements.push(format!("v{vertex}: is_unique={unique}, oracle={oracle} for {poly}"));
            }
        }
        if !want_svg || render_error.is_some() {
            return;
        }
        let file = format!("{:04}_{kind}_v{}.svg", svgs.len(), vertex.0);
        let title = format!("{kind} at v{}: {poly}", vertex.0);
        match svg::newton_svg(poly, polygon, &title) {
            Ok(body) => {
                let initials = ztrop::polygon::vertex_initials(poly).unwrap_or_default();
                index.push(PolygonRecord {
                    file: file.clone(),
                    kind,
                    vertex: vertex.0,
                    poly: poly.to_string(),
                    vertices: polygon.vertices().iter().map(|(j, v)| [j.to_string(), v.to_string()]).collect(),
                    slopes: polygon.slopes().iter().map(ToString::to_string).collect(),
                    initials: initials.iter().map(ToString::to_string).collect(),
                    unique,
                });
                svgs.push((file, body));
            }
            Err(e) => render_error = Some(e),
        }
    };
    let result = tree.run_with(&mut observer);

    // polygons seen before a failure are still written
    if let Some(dir) = &args.newton_svg {
        if let Err(e) = write_svgs(dir, &svgs, &index) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    }
    if let Err(e) = result {
        let _ = writeln!(stderr, "error: {e}");
        return exit_code(&e);
    }
    if let Some(e) = render_error {
        let _ = writeln!(stderr, "error: {e}");
        return exit_code(&e);
    }
    if !disagreements.is_empty() {
        for d in &disagreements {
            let _ = writeln!(stderr, "error: uniqueness oracle disagrees at {d}");
        }
        return EXIT_MATH;
    }

    let points = tree.tropical_points();
    let written = match args.format {
        Format::Text => {
            let line: Vec<String> = points.iter().map(ToString::to_string).collect();
            let mut out = line.join(" ");
            out.push('\n');
            if args.tree {
                out.push_str(&tree_text(&tree));
            }
            stdout.write_all(out.as_bytes())
        }
        Format::Json => {
            let output = Output {
                points: points.iter().map(point_strings).collect(),
                tree: args.tree.then(|| tree_json(&tree)),
            };
            let mut out = serde_json::to_string(&output).expect("serializable");
            out.push('\n');
            stdout.write_all(out.as_bytes())
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            EXIT_INPUT
        }
    }
}
