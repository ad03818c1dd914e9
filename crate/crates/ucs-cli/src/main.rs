//! `ucs` — sparsify, verify, bound, span, and draw graphs from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ucs::bounds::BoundReport;
use ucs::graph::{parse_edge_list, EdgeListFormat, Graph, ParsedGraph};
use ucs::layout::{fruchterman_reingold, render_svg, LayoutConfig};
use ucs::selection::{sparsify_basis, spanning_structure, IterationRecord, SelectionParams, TieRule};
use ucs::spectra::OrthonormalEdgeBasis;
use ucs::verify::{
    bound_table, bound_table_csv, verify_sandwich, SandwichReport, SkippedTriple,
    DEFAULT_SANDWICH_TOL,
};

#[derive(Parser)]
#[command(
    name = "ucs",
    version,
    about = "Unweighted spectral graph sparsification by greedy column selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Tab-separated `u v` pairs with `#` comments.
    Snap,
    /// Whitespace-separated `u v w` triples.
    Weighted,
}

impl From<FormatArg> for EdgeListFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Snap => EdgeListFormat::Snap,
            FormatArg::Weighted => EdgeListFormat::Weighted,
        }
    }
}

impl FormatArg {
    fn name(self) -> &'static str {
        match self {
            FormatArg::Snap => "snap",
            FormatArg::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieArg {
    /// Smallest admissible edge index (default).
    First,
    /// Minimal candidate trace; ties to the smaller index.
    Best,
}

impl From<TieArg> for TieRule {
    fn from(t: TieArg) -> Self {
        match t {
            TieArg::First => TieRule::FirstFit,
            TieArg::Best => TieRule::BestFit,
        }
    }
}

impl TieArg {
    fn name(self) -> &'static str {
        match self {
            TieArg::First => "first",
            TieArg::Best => "best",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Select exactly ELL edges whose unit-weight subgraph spectrally
    /// approximates the input; verifies its own output.
    Sparsify {
        /// Edge-list file to read.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Snap)]
        format: FormatArg,
        /// Number of edges to select (n < ELL < m).
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value_t = TieArg::First)]
        tie: TieArg,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also draw the graph with the selection highlighted.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Extract an acyclic spanning edge set (|V| − r edges) via the
    /// sparsifier.
    Tree {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Snap)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a-priori condition bounds for (n, m, ell) triples.
    Bounds {
        /// Dimension (vertices minus components); requires --m and --ell.
        #[arg(long, requires = "m", requires = "ell")]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        /// Cartesian grid "N,M,ELL", each dimension a value `a`, a range
        /// `a:b`, or a stepped range `a:b:step` (inclusive).
        #[arg(long, conflicts_with_all = ["n", "m", "ell"])]
        grid: Option<String>,
        /// Write CSV here (default: CSV on stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write JSON (rows plus skipped triples) here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-check a claimed sparsifier against the input graph from scratch.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Snap)]
        format: FormatArg,
        /// Subset JSON: a sparsify/tree report, a bare index array, an
        /// object with selected_indices, or {"edges": [[u, v], ...]} in
        /// original vertex ids.
        #[arg(long)]
        subset: PathBuf,
        /// Claimed inverse condition bound to certify.
        #[arg(long)]
        kappa_inv: f64,
        #[arg(long, default_value_t = DEFAULT_SANDWICH_TOL)]
        tol: f64,
    },
    /// Compute a force-directed layout and emit coordinates and/or an SVG.
    Layout {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Snap)]
        format: FormatArg,
        /// Restrict the force model to this subset's edges (all edges are
        /// still drawn, the subset highlighted).
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        /// Write a coordinates JSON (original vertex id → [x, y]).
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// Echoed arguments embedded in every JSON output. Absent fields are
/// omitted; the timestamp is the only field allowed to differ between
/// reruns of one command line.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: String,
    timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tie: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_inv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coords: Option<String>,
}

impl RunManifest {
    fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            input: None,
            format: None,
            ell: None,
            tie: None,
            subset: None,
            kappa_inv: None,
            tol: None,
            seed: None,
            iterations: None,
            n: None,
            m: None,
            grid: None,
            out: None,
            svg: None,
            coords: None,
        }
    }
}

#[derive(Serialize)]
struct SparsifyOutput {
    manifest: RunManifest,
    selected_indices: Vec<usize>,
    /// Selected edges in original vertex ids, selection order.
    selected_edges: Vec<(u64, u64, f64)>,
    lambda_min: f64,
    kappa_inv_bound: f64,
    sandwich: SandwichReport,
    per_iteration: Vec<IterationRecord>,
}

#[derive(Serialize)]
struct TreeOutput {
    manifest: RunManifest,
    selected_indices: Vec<usize>,
    selected_edges: Vec<(u64, u64, f64)>,
}

#[derive(Serialize)]
struct BoundsOutput {
    manifest: RunManifest,
    rows: Vec<BoundReport>,
    skipped: Vec<SkippedTriple>,
}

#[derive(Serialize)]
struct VerifyOutput {
    manifest: RunManifest,
    #[serde(flatten)]
    report: SandwichReport,
}

#[derive(Serialize)]
struct LayoutOutput {
    manifest: RunManifest,
    /// Original vertex id → position; keys sort numerically.
    coordinates: BTreeMap<u64, (f64, f64)>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// `UCS_THREADS` (integer ≥ 1) caps internal parallelism.
fn configure_threads() -> Result<(), String> {
    match std::env::var("UCS_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("UCS_THREADS must be an integer >= 1, got {v:?}"))?;
            if n == 0 {
                return Err("UCS_THREADS must be an integer >= 1, got 0".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("cannot configure thread pool: {e}"))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Sparsify { input, format, ell, tie, out, svg } => {
            cmd_sparsify(&input, format, ell, tie, out.as_deref(), svg.as_deref())
        }
        Command::Tree { input, format, out } => cmd_tree(&input, format, out.as_deref()),
        Command::Bounds { n, m, ell, grid, csv, json } => {
            cmd_bounds(n, m, ell, grid, csv.as_deref(), json.as_deref())
        }
        Command::Verify { input, format, subset, kappa_inv, tol } => {
            cmd_verify(&input, format, &subset, kappa_inv, tol)
        }
        Command::Layout { input, format, subset, seed, iterations, coords, svg } => {
            cmd_layout(&input, format, subset.as_deref(), seed, iterations, coords.as_deref(), svg.as_deref())
        }
    }
}

fn load_graph(path: &Path, format: FormatArg) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed: ParsedGraph = parse_edge_list(&text, format.into())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if parsed.self_loop_count > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop(s)",
            path.display(),
            parsed.self_loop_count
        );
    }
    if parsed.duplicate_count > 0 {
        eprintln!(
            "warning: {}: merged {} duplicate edge(s), first weight kept",
            path.display(),
            parsed.duplicate_count
        );
    }
    Ok(parsed.graph)
}

/// Accepts this tool's own sparsify/tree reports (`selected_indices`), a
/// bare JSON index array, or `{"edges": [[u, v], ...]}` in original ids.
fn load_subset(path: &Path, g: &Graph) -> Result<Vec<usize>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: invalid JSON: {e}", path.display()))?;
    let indices = match &value {
        serde_json::Value::Array(arr) => index_array(arr)?,
        serde_json::Value::Object(obj) => {
            if let Some(sel) = obj.get("selected_indices") {
                let arr = sel
                    .as_array()
                    .ok_or_else(|| "selected_indices must be an array".to_string())?;
                index_array(arr)?
            } else if let Some(edges) = obj.get("edges") {
                let arr = edges.as_array().ok_or_else(|| "edges must be an array".to_string())?;
                resolve_edge_pairs(arr, g)?
            } else {
                return Err(format!(
                    "{}: subset object needs selected_indices or edges",
                    path.display()
                ));
            }
        }
        _ => return Err(format!("{}: subset must be a JSON array or object", path.display())),
    };
    let m = g.edge_count();
    let mut seen = vec![false; m];
    for &i in &indices {
        if i >= m {
            return Err(format!("subset index {i} out of range for {m} edges"));
        }
        if seen[i] {
            return Err(format!("subset repeats edge index {i}"));
        }
        seen[i] = true;
    }
    Ok(indices)
}

fn index_array(arr: &[serde_json::Value]) -> Result<Vec<usize>, String> {
    arr.iter()
        .map(|v| {
            v.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| format!("subset entry {v} is not an edge index"))
        })
        .collect()
}

fn resolve_edge_pairs(arr: &[serde_json::Value], g: &Graph) -> Result<Vec<usize>, String> {
    let mut by_ids: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        let (a, b) = (g.original_ids[e.u], g.original_ids[e.v]);
        by_ids.insert((a.min(b), a.max(b)), i);
    }
    arr.iter()
        .map(|entry| {
            let pair = entry
                .as_array()
                .filter(|p| p.len() >= 2)
                .ok_or_else(|| format!("edge entry {entry} is not a [u, v] pair"))?;
            let a = pair[0].as_u64().ok_or_else(|| format!("vertex id {} invalid", pair[0]))?;
            let b = pair[1].as_u64().ok_or_else(|| format!("vertex id {} invalid", pair[1]))?;
            by_ids
                .get(&(a.min(b), a.max(b)))
                .copied()
                .ok_or_else(|| format!("edge ({a}, {b}) not present in the input graph"))
        })
        .collect()
}

fn original_edges(g: &Graph, indices: &[usize]) -> Vec<(u64, u64, f64)> {
    indices
        .iter()
        .map(|&i| {
            let e = &g.edges[i];
            (g.original_ids[e.u], g.original_ids[e.v], e.w)
        })
        .collect()
}

fn emit(json: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, json).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| format!("cannot serialize output: {e}"))
}

fn path_str(p: Option<&Path>) -> Option<String> {
    p.map(|p| p.display().to_string())
}

fn cmd_sparsify(
    input: &Path,
    format: FormatArg,
    ell: usize,
    tie: TieArg,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<ExitCode, String> {
    let g = load_graph(input, format)?;
    let params = SelectionParams::for_graph(&g, ell)
        .map_err(|e| e.to_string())?
        .with_tie_rule(tie.into());
    let basis = OrthonormalEdgeBasis::from_graph(&g).map_err(|e| e.to_string())?;
    let res = sparsify_basis(&basis, &params).map_err(|e| e.to_string())?;
    let sandwich = verify_sandwich(&basis, &res.selected, res.kappa_inv_bound, DEFAULT_SANDWICH_TOL)
        .map_err(|e| e.to_string())?;

    let mut manifest = RunManifest::new("sparsify");
    manifest.input = Some(input.display().to_string());
    manifest.format = Some(format.name().into());
    manifest.ell = Some(ell);
    manifest.tie = Some(tie.name().into());
    manifest.out = path_str(out);
    manifest.svg = path_str(svg);
    let output = SparsifyOutput {
        manifest,
        selected_indices: res.selected.clone(),
        selected_edges: original_edges(&g, &res.selected),
        lambda_min: res.lambda_min_achieved,
        kappa_inv_bound: res.kappa_inv_bound,
        sandwich,
        per_iteration: res.per_iteration,
    };
    emit(&to_pretty(&output)?, out)?;

    if let Some(svg_path) = svg {
        let mut cfg = LayoutConfig::default();
        cfg.seed = 0;
        let coords = fruchterman_reingold(&g, &cfg).map_err(|e| e.to_string())?;
        let doc = render_svg(&g, &coords, &res.selected).map_err(|e| e.to_string())?;
        fs::write(svg_path, doc).map_err(|e| format!("cannot write {}: {e}", svg_path.display()))?;
    }

    if !sandwich.pass {
        eprintln!(
            "verification failed: lower {} vs bound {}, upper {}",
            sandwich.lower, res.kappa_inv_bound, sandwich.upper
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tree(input: &Path, format: FormatArg, out: Option<&Path>) -> Result<ExitCode, String> {
    let g = load_graph(input, format)?;
    let selected = spanning_structure(&g).map_err(|e| e.to_string())?;
    let mut manifest = RunManifest::new("tree");
    manifest.input = Some(input.display().to_string());
    manifest.format = Some(format.name().into());
    manifest.out = path_str(out);
    let output = TreeOutput {
        manifest,
        selected_edges: original_edges(&g, &selected),
        selected_indices: selected,
    };
    emit(&to_pretty(&output)?, out)?;
    Ok(ExitCode::SUCCESS)
}

/// One dimension of a grid: `a`, `a:b`, or `a:b:step`, inclusive.
fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| -> Result<usize, String> {
        t.trim().parse().map_err(|_| format!("cannot parse {t:?} in range {s:?}"))
    };
    match parts.len() {
        1 => Ok(vec![num(parts[0])?]),
        2 | 3 => {
            let a = num(parts[0])?;
            let b = num(parts[1])?;
            let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
            if step == 0 {
                return Err(format!("step must be positive in range {s:?}"));
            }
            if b < a {
                return Err(format!("empty range {s:?}"));
            }
            Ok((a..=b).step_by(step).collect())
        }
        _ => Err(format!("cannot parse range {s:?}")),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<(usize, usize, usize)>, String> {
    let dims: Vec<&str> = spec.split(',').collect();
    if dims.len() != 3 {
        return Err(format!(
            "grid must be three comma-separated ranges \"N,M,ELL\", got {spec:?}"
        ));
    }
    let ns = parse_range(dims[0])?;
    let ms = parse_range(dims[1])?;
    let ls = parse_range(dims[2])?;
    let mut triples = Vec::with_capacity(ns.len() * ms.len() * ls.len());
    for &n in &ns {
        for &m in &ms {
            for &l in &ls {
                triples.push((n, m, l));
            }
        }
    }
    Ok(triples)
}

fn cmd_bounds(
    n: Option<usize>,
    m: Option<usize>,
    ell: Option<usize>,
    grid: Option<String>,
    csv: Option<&Path>,
    json: Option<&Path>,
) -> Result<ExitCode, String> {
    let triples = match (&grid, n, m, ell) {
        (Some(spec), None, None, None) => parse_grid(spec)?,
        (None, Some(n), Some(m), Some(ell)) => vec![(n, m, ell)],
        _ => return Err("provide either --n/--m/--ell or --grid".into()),
    };
    let (rows, skipped) = bound_table(&triples);

    let mut manifest = RunManifest::new("bounds");
    manifest.n = n;
    manifest.m = m;
    manifest.ell = ell;
    manifest.grid = grid;
    let csv_text = bound_table_csv(&rows);
    for s in &skipped {
        eprintln!("skipped (n={}, m={}, ell={}): {}", s.n, s.m, s.ell, s.reason);
    }
    if let Some(path) = json {
        let mut mf = manifest;
        mf.out = Some(path.display().to_string());
        let output = BoundsOutput { manifest: mf, rows, skipped };
        fs::write(path, to_pretty(&output)?)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        if let Some(csv_path) = csv {
            fs::write(csv_path, &csv_text)
                .map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
        }
    } else if let Some(csv_path) = csv {
        fs::write(csv_path, &csv_text)
            .map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
    } else {
        print!("{csv_text}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    input: &Path,
    format: FormatArg,
    subset: &Path,
    kappa_inv: f64,
    tol: f64,
) -> Result<ExitCode, String> {
    let g = load_graph(input, format)?;
    let indices = load_subset(subset, &g)?;
    let basis = OrthonormalEdgeBasis::from_graph(&g).map_err(|e| e.to_string())?;
    let report = verify_sandwich(&basis, &indices, kappa_inv, tol).map_err(|e| e.to_string())?;

    let mut manifest = RunManifest::new("verify");
    manifest.input = Some(input.display().to_string());
    manifest.format = Some(format.name().into());
    manifest.subset = Some(subset.display().to_string());
    manifest.kappa_inv = Some(kappa_inv);
    manifest.tol = Some(tol);
    let output = VerifyOutput { manifest, report };
    emit(&to_pretty(&output)?, None)?;
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification failed: lower {} vs claimed {}, upper {}",
            report.lower, kappa_inv, report.upper
        );
        Ok(ExitCode::from(2))
    }
}

fn cmd_layout(
    input: &Path,
    format: FormatArg,
    subset: Option<&Path>,
    seed: u64,
    iterations: usize,
    coords_out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<ExitCode, String> {
    let g = load_graph(input, format)?;
    let subset_indices = match subset {
        Some(path) => Some(load_subset(path, &g)?),
        None => None,
    };
    // Forces come from the subset-induced graph when one is given; the
    // vertex set (and the drawing) always covers all of G.
    let force_graph = match &subset_indices {
        None => g.clone(),
        Some(indices) => {
            let edges: Vec<ucs::graph::Edge> = indices.iter().map(|&i| g.edges[i]).collect();
            Graph { vertex_count: g.vertex_count, edges, original_ids: g.original_ids.clone() }
        }
    };
    let cfg = LayoutConfig { iterations, seed, ..LayoutConfig::default() };
    let coords = fruchterman_reingold(&force_graph, &cfg).map_err(|e| e.to_string())?;

    let mut manifest = RunManifest::new("layout");
    manifest.input = Some(input.display().to_string());
    manifest.format = Some(format.name().into());
    manifest.subset = path_str(subset);
    manifest.seed = Some(seed);
    manifest.iterations = Some(iterations);
    manifest.coords = path_str(coords_out);
    manifest.svg = path_str(svg);

    let coordinates: BTreeMap<u64, (f64, f64)> = coords
        .positions
        .iter()
        .enumerate()
        .map(|(v, &p)| (g.original_ids[v], p))
        .collect();
    let output = LayoutOutput { manifest, coordinates };
    emit(&to_pretty(&output)?, coords_out)?;

    if let Some(svg_path) = svg {
        let highlight = subset_indices.as_deref().unwrap_or(&[]);
        let doc = render_svg(&g, &coords, highlight).map_err(|e| e.to_string())?;
        fs::write(svg_path, doc).map_err(|e| format!("cannot write {}: {e}", svg_path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
