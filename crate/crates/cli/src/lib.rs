//! Command-line front end for `crystal-basis`.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O, failed self-check),
//! 2 invalid flags or arguments, 3 unknown group, 4 node budget exceeded.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crystal_basis::{
    default_radius, expand_group, graph_to_dot, prune_inconsistent, validate_group, BasisDocument, BasisSet, CosetGroup, Encoder, Error as CoreError,
    GroupDatabase, GroupKey, GroupSpec, LatticeCell, Normalization, OrbitMetric, DEFAULT_NODE_BUDGET, DEFAULT_SHELL, SCHEMA_VERSION,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN_GROUP: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    CheckFailed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::UnknownGroup { .. } => EXIT_UNKNOWN_GROUP,
                CoreError::NodeBudget { .. } => EXIT_BUDGET,
                CoreError::Syntax { .. }
                | CoreError::InvalidParameter(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::UnsupportedDimension(_)
                | CoreError::SingularLattice => EXIT_USAGE,
                _ => EXIT_FAILURE,
            },
            CliError::CheckFailed(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "crystal-basis", version, about = "Symmetry-adapted Fourier bases for wallpaper and space groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit listing as JSON.
    Basis(BasisArgs),
    /// Routing matrix in Matrix Market format.
    Routing(RoutingArgs),
    /// Encoding vectors for one or more positions as CSV.
    Encode(EncodeArgs),
    /// Orbit distance between two fractional positions.
    OrbitDist(OrbitDistArgs),
    /// Constraint graph in Graphviz DOT format.
    Graph(GraphArgs),
    /// One basis function sampled on a regular grid as CSV.
    Sample(SampleArgs),
    /// Builds bases and checks invariance at random points.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Mtx,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// re_0, im_0, re_1, im_1, ...
    Interleaved,
    /// re_0, ..., re_{K-1}, im_0, ..., im_{K-1}
    Stacked,
    /// One real column per basis function (cos/sin combinations).
    Real,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Group number or symbol.
    #[arg(long, short = 'g')]
    pub group: String,
    /// Dimension: 2 (wallpaper groups) or 3 (space groups).
    #[arg(long, short = 'd', default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    /// Groups database replacing the bundled one.
    #[arg(long)]
    pub groups_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoxArgs {
    /// Max-norm frequency radius [default: 8 in 2D, 4 in 3D].
    #[arg(long, short = 'r')]
    pub radius: Option<u32>,
    /// Upper bound on enumerated frequencies.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub max_nodes: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file [default: stdout].
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RoutingArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Scale rows by 1/sqrt(|O|).
    #[arg(long)]
    pub normalize: bool,
    /// Emit the real (cos/sin) form.
    #[arg(long)]
    pub real: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Fractional position, comma separated; repeat for several rows.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub pos: Vec<String>,
    #[arg(long, value_enum, default_value_t = Layout::Interleaved)]
    pub layout: Layout,
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct OrbitDistArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x2: String,
    /// Cell rows, row-major, 4 or 9 numbers [default: unit square/cube or
    /// unit hexagonal cell].
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SHELL)]
    pub shell: u32,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Basis function index in orbit order (0 is the constant).
    #[arg(long)]
    pub basis_index: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Third coordinate of the sampled plane for 3D groups.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub slice: f64,
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Group number or symbol; omit with --all-groups.
    #[arg(long, short = 'g', required_unless_present = "all_groups")]
    pub group: Option<String>,
    #[arg(long, short = 'd', default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    #[arg(long)]
    pub groups_file: Option<PathBuf>,
    /// Check every group in the database.
    #[arg(long, conflicts_with = "group")]
    pub all_groups: bool,
    #[command(flatten)]
    pub lattice: BoxArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random points per group.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_format(given: Option<Format>, allowed: &[Format]) -> Result<Format> {
    match given {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(usage(format!(
            "format {f:?} is not available here (expected one of {allowed:?})"
        ))),
    }
}

fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>> {
    let values: std::result::Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let values = values.map_err(|_| usage(format!("{what}: cannot parse {text:?} as numbers")))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(usage(format!("{what}: values must be finite")));
    }
    Ok(values)
}

fn parse_point(text: &str, dim: usize, what: &str) -> Result<Vec<f64>> {
    let v = parse_vector(text, what)?;
    if v.len() != dim {
        return Err(usage(format!("{what}: expected {dim} coordinates, got {}", v.len())));
    }
    Ok(v)
}

fn database(path: &Option<PathBuf>) -> Result<std::borrow::Cow<'static, GroupDatabase>> {
    Ok(match path {
        Some(p) => std::borrow::Cow::Owned(GroupDatabase::from_file(p)?),
        None => std::borrow::Cow::Borrowed(GroupDatabase::bundled()),
    })
}

fn resolve(args: &GroupArgs) -> Result<CosetGroup> {
    let db = database(&args.groups_file)?;
    let key: GroupKey = args.group.parse().expect("infallible");
    let spec: GroupSpec = db.get(args.dim as usize, &key)?.clone();
    Ok(expand_group(&spec)?)
}

fn radius(args: &BoxArgs, dim: usize) -> u32 {
    args.radius.unwrap_or_else(|| default_radius(dim))
}

fn build_basis(group: &CosetGroup, b: &BoxArgs) -> Result<BasisSet> {
    Ok(BasisSet::build_with_budget(group, radius(b, group.dim()), b.max_nodes)?)
}

fn norm(flag: bool) -> Normalization {
    if flag {
        Normalization::Unit
    } else {
        Normalization::None
    }
}

/// Shortest round-trip decimal; negative zero prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn write_output(args: &OutputArgs, stdout: &mut dyn Write, body: &str) -> Result<()> {
    match &args.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(body.as_bytes())?;
            w.flush()?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_basis(args: &BasisArgs) -> Result<String> {
    check_format(args.output.format, &[Format::Json])?;
    let group = resolve(&args.group)?;
    let basis = build_basis(&group, &args.lattice)?;
    Ok(BasisDocument::new(&basis).to_json())
}

pub fn cmd_routing(args: &RoutingArgs) -> Result<String> {
    check_format(args.output.format, &[Format::Mtx])?;
    let group = resolve(&args.group)?;
    let basis = build_basis(&group, &args.lattice)?;
    let matrix = if args.real {
        basis.real_routing_matrix(norm(args.normalize))
    } else {
        basis.routing_matrix(norm(args.normalize))
    };
    let comments = vec![
        format!(
            "group {} ({}D #{}), radius {}, {} basis functions, {} modes",
            basis.group_symbol(),
            basis.dim(),
            basis.group_number(),
            basis.radius(),
            matrix.rows(),
            matrix.cols()
        ),
        format!(
            "form {}, normalization {}",
            if args.real { "real" } else { "complex" },
            if args.normalize { "unit" } else { "none" }
        ),
        "columns are frequencies in lexicographic order over the max-norm box".to_string(),
    ];
    Ok(crystal_basis::write_mtx(&matrix, &comments))
}

pub fn cmd_encode(args: &EncodeArgs) -> Result<String> {
    let format = check_format(args.output.format, &[Format::Csv, Format::Json])?;
    let dim = args.group.dim as usize;
    let points = args
        .pos
        .iter()
        .map(|p| parse_point(p, dim, "--pos"))
        .collect::<Result<Vec<_>>>()?;
    let group = resolve(&args.group)?;
    let basis = build_basis(&group, &args.lattice)?;
    let encoder = match args.layout {
        Layout::Real => Encoder::from_parts(basis.modes().to_vec(), basis.real_routing_matrix(norm(args.normalize)))?,
        _ => basis.encoder(norm(args.normalize)),
    };
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|x| encoder.evaluate(x).map(|e| layout_row(&e, args.layout)))
        .collect::<std::result::Result<_, _>>()?;
    let k = encoder.len();
    let header: Vec<String> = match args.layout {
        Layout::Interleaved => (0..k).flat_map(|i| [format!("re_{i}"), format!("im_{i}")]).collect(),
        Layout::Stacked => (0..k)
            .map(|i| format!("re_{i}"))
            .chain((0..k).map(|i| format!("im_{i}")))
            .collect(),
        Layout::Real => (0..k).map(|i| format!("f_{i}")).collect(),
    };
    Ok(match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                version: &'a str,
                schema_version: u32,
                group: &'a str,
                dim: usize,
                radius: u32,
                layout: &'a str,
                columns: Vec<String>,
                positions: Vec<Vec<f64>>,
                rows: Vec<Vec<f64>>,
            }
            json(&Doc {
                version: env!("CARGO_PKG_VERSION"),
                schema_version: SCHEMA_VERSION,
                group: basis.group_symbol(),
                dim,
                radius: basis.radius(),
                layout: match args.layout {
                    Layout::Interleaved => "interleaved",
                    Layout::Stacked => "stacked",
                    Layout::Real => "real",
                },
                columns: header,
                positions: points,
                rows: rows
                    .iter()
                    .map(|r| r.iter().map(|v| if *v == 0.0 { 0.0 } else { *v }).collect())
                    .collect(),
            })
        }
        _ => {
            let mut out = header.join(",");
            out.push('\n');
            for r in rows {
                out.push_str(&r.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
    })
}

fn layout_row(e: &[Complex64], layout: Layout) -> Vec<f64> {
    match layout {
        Layout::Interleaved => e.iter().flat_map(|z| [z.re, z.im]).collect(),
        Layout::Stacked => e.iter().map(|z| z.re).chain(e.iter().map(|z| z.im)).collect(),
        Layout::Real => e.iter().map(|z| z.re).collect(),
    }
}

pub fn cmd_orbit_dist(args: &OrbitDistArgs, stderr: &mut dyn Write) -> Result<String> {
    let format = check_format(args.output.format, &[Format::Text, Format::Json])?;
    let dim = args.group.dim as usize;
    let x1 = parse_point(&args.x1, dim, "--x1")?;
    let x2 = parse_point(&args.x2, dim, "--x2")?;
    let cell = args
        .lattice
        .as_deref()
        .map(|s| parse_vector(s, "--lattice").and_then(|v| Ok(LatticeCell::from_row_major(&v)?)))
        .transpose()?;
    if let Some(c) = &cell {
        if c.dim() != dim {
            return Err(usage(format!("--lattice describes a {}D cell but --dim is {dim}", c.dim())));
        }
    }
    let group = resolve(&args.group)?;
    let cell = cell.unwrap_or_else(|| LatticeCell::reference(dim, &group.spec().bravais));
    let metric = OrbitMetric::new(&group, &cell, args.shell)?;
    for w in metric.warnings() {
        writeln!(stderr, "warning: {w}")?;
    }
    let d = metric.distance(&x1, &x2)?;
    Ok(match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                version: &'a str,
                schema_version: u32,
                group: &'a str,
                x1: Vec<f64>,
                x2: Vec<f64>,
                shell: u32,
                distance: f64,
            }
            json(&Doc {
                version: env!("CARGO_PKG_VERSION"),
                schema_version: SCHEMA_VERSION,
                group: &group.spec().symbol,
                x1,
                x2,
                shell: args.shell,
                distance: d,
            })
        }
        _ => format!("{}\n", fmt_num(d)),
    })
}

pub fn cmd_graph(args: &GraphArgs) -> Result<String> {
    check_format(args.output.format, &[Format::Dot])?;
    let group = resolve(&args.group)?;
    let graph = prune_inconsistent(crystal_basis::build_graph_with_budget(
        &group,
        radius(&args.lattice, group.dim()),
        args.lattice.max_nodes,
    )?);
    Ok(graph_to_dot(&graph, &group))
}

pub fn cmd_sample(args: &SampleArgs) -> Result<String> {
    check_format(args.output.format, &[Format::Csv])?;
    if args.grid == 0 {
        return Err(usage("--grid must be positive"));
    }
    let group = resolve(&args.group)?;
    let basis = build_basis(&group, &args.lattice)?;
    if args.basis_index >= basis.len() {
        return Err(usage(format!(
            "--basis-index {} out of range: the basis has {} functions",
            args.basis_index,
            basis.len()
        )));
    }
    let scale = match norm(args.normalize) {
        Normalization::Unit => 1.0 / (basis.orbits()[args.basis_index].len() as f64).sqrt(),
        Normalization::None => 1.0,
    };
    let n = args.grid;
    let mut out = String::from("x1,x2,re,im\n");
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            let mut x = vec![a, b];
            if basis.dim() == 3 {
                x.push(args.slice);
            }
            let v = basis.evaluate_orbit(args.basis_index, &x)? * scale;
            out.push_str(&format!("{},{},{},{}\n", fmt_num(a), fmt_num(b), fmt_num(v.re), fmt_num(v.im)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub dim: usize,
    pub number: u16,
    pub symbol: String,
    pub order: usize,
    pub radius: u32,
    pub basis_size: usize,
    pub removed: usize,
    pub anomalies: usize,
    pub max_error: f64,
    pub valid_group: bool,
    pub passed: bool,
}

fn check_group(spec: &GroupSpec, args: &CheckArgs) -> Result<CheckRow> {
    let group = expand_group(spec)?;
    let dim = group.dim();
    let basis = build_basis(&group, &args.lattice)?;
    let encoder = basis.encoder(Normalization::None);
    let mut rng = StdRng::seed_from_u64(args.seed ^ ((dim as u64) << 32 | spec.number as u64));
    let mut max_error = 0.0f64;
    for _ in 0..args.samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let base = encoder.evaluate(&x)?;
        for op in group.elements() {
            let moved = encoder.evaluate(&op.act_on_point(&x)?)?;
            for (a, b) in base.iter().zip(&moved) {
                max_error = max_error.max((a - b).norm());
            }
        }
    }
    let valid_group = validate_group(&group).is_valid();
    Ok(CheckRow {
        dim,
        number: spec.number,
        symbol: spec.symbol.clone(),
        order: group.order(),
        radius: basis.radius(),
        basis_size: basis.len(),
        removed: basis.removed().len(),
        anomalies: basis.anomalies().len(),
        max_error,
        valid_group,
        passed: valid_group && basis.anomalies().is_empty() && max_error < args.tol,
    })
}

pub fn cmd_check(args: &CheckArgs) -> Result<(String, bool)> {
    let format = check_format(args.output.format, &[Format::Text, Format::Json])?;
    if !(args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let db = database(&args.groups_file)?;
    let specs: Vec<GroupSpec> = if args.all_groups {
        db.groups().to_vec()
    } else {
        let key: GroupKey = args.group.as_deref().unwrap_or_default().parse().expect("infallible");
        vec![db.get(args.dim as usize, &key)?.clone()]
    };
    let rows = specs
        .par_iter()
        .map(|s| check_group(s, args))
        .collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.passed);
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                version: &'a str,
                schema_version: u32,
                tolerance: f64,
                samples: usize,
                passed: bool,
                groups: &'a [CheckRow],
            }
            json(&Doc {
                version: env!("CARGO_PKG_VERSION"),
                schema_version: SCHEMA_VERSION,
                tolerance: args.tol,
                samples: args.samples,
                passed: ok,
                groups: &rows,
            })
        }
        _ => {
            let mut s = format!(
                "{:>3} {:>4} {:<12} {:>5} {:>3} {:>6} {:>7} {:>9}  status\n",
                "dim", "num", "symbol", "order", "R", "K", "removed", "max_err"
            );
            for r in &rows {
                s.push_str(&format!(
                    "{:>3} {:>4} {:<12} {:>5} {:>3} {:>6} {:>7} {:>9.2e}  {}\n",
                    r.dim,
                    r.number,
                    r.symbol,
                    r.order,
                    r.radius,
                    r.basis_size,
                    r.removed,
                    r.max_error,
                    if r.passed { "ok" } else { "FAIL" }
                ));
            }
            let failed = rows.iter().filter(|r| !r.passed).count();
            s.push_str(&format!("{} groups checked, {} failed\n", rows.len(), failed));
            s
        }
    };
    Ok((body, ok))
}

/// Runs a parsed command, writing data to `stdout` (or the `--output`
/// file) and diagnostics to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Basis(a) => write_output(&a.output, stdout, &cmd_basis(a)?),
        Command::Routing(a) => write_output(&a.output, stdout, &cmd_routing(a)?),
        Command::Encode(a) => write_output(&a.output, stdout, &cmd_encode(a)?),
        Command::OrbitDist(a) => {
            let body = cmd_orbit_dist(a, stderr)?;
            write_output(&a.output, stdout, &body)
        }
        Command::Graph(a) => write_output(&a.output, stdout, &cmd_graph(a)?),
        Command::Sample(a) => write_output(&a.output, stdout, &cmd_sample(a)?),
        Command::Check(a) => {
            let (body, ok) = cmd_check(a)?;
            write_output(&a.output, stdout, &body)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::CheckFailed("self-check failed".into()))
            }
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Core(CoreError::UnknownGroup { dim: 2, .. }) = &e {
                let _ = writeln!(stderr, "hint: pass --dim 3 for space groups");
            }
            e.exit_code()
        }
    }
}
