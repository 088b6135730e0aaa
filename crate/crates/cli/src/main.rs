//! `lamina`: meshes, slices, verification reports and N-sweeps for the
//! minimal disks `F_N`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamina_core::mesh::{self, MeshFormat};
use lamina_core::sweep::{self, Metric};
use lamina_core::verification::{self, Direction, VerifyConfig};
use lamina_core::{CoreError, DomainSpec};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "LAMINA_THREADS";

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "lamina", version, about = "Minimal disks with curvature blow-up along a segment: meshes, slices, checks and sweeps")]
#[command(after_help = "The worker thread count can be set with LAMINA_THREADS.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Triangulate F_N over the eta grid and export it.
    Mesh(MeshArgs),
    /// Sample one horizontal slice F_N(x, .) as CSV.
    Slice(SliceArgs),
    /// Run the verification suite and write a JSON report. Exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Tabulate one diagnostic across a list of N as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Number of pole terms N.
    #[arg(long)]
    n: u32,
    /// Columns in x over [-1/2, 1/2].
    #[arg(long, default_value_t = 200)]
    nx: usize,
    /// Rows on the eta grid (odd).
    #[arg(long, default_value_t = 65)]
    ny: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// obj, ply, csv or json. Defaults to the extension of --out.
    #[arg(long)]
    format: Option<String>,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[arg(long)]
    n: u32,
    /// Height x of the slice.
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Samples on the slice (odd).
    #[arg(long, default_value_t = 257)]
    m: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// N list such as `2,4,8` or `2..64` (inclusive). Replaces every ladder of the suite.
    #[arg(long, value_parser = parse_n_list)]
    n: Option<NList>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Samples per slice (odd).
    #[arg(long, default_value_t = 257)]
    m: usize,
    /// Number of slice heights.
    #[arg(long, default_value_t = 65)]
    slices: usize,
    /// Seed for the random structural samples (decimal or 0x-hex).
    #[arg(long, value_parser = parse_seed, default_value = "0x5EED")]
    seed: u64,
    /// Radius of the neighbourhood of the singular segment.
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the per-check summary on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// blowup, epsilon, spiral or curvature.
    #[arg(long, value_parser = parse_metric)]
    metric: Metric,
    /// N list such as `2,4,8` or `2..64` (inclusive).
    #[arg(long, value_parser = parse_n_list, default_value = "2,4,8,16,32,64")]
    n: NList,
    /// Axis height; the slice height for curvature.
    #[arg(long, allow_negative_numbers = true, default_value_t = -0.25)]
    t: f64,
    /// Transverse position in [-1, 1] for curvature.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct NList(Vec<u32>);

/// Comma-separated items, each a single `N` or an inclusive range `a..b`.
fn parse_n_list(s: &str) -> Result<NList, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("not a positive integer: {t:?}"));
        if let Some((a, b)) = item.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {item}"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(item)?);
        }
    }
    for &n in &out {
        DomainSpec::new(n).map_err(|e| e.to_string())?;
    }
    Ok(NList(out))
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Io { .. } | CoreError::Parse { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CoreError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CoreError::Io { path: p.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CoreError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn run_mesh(a: MeshArgs) -> Result<u8, CoreError> {
    let format = match &a.format {
        Some(f) => f.parse()?,
        None => MeshFormat::from_path(&a.out).unwrap_or(MeshFormat::Obj),
    };
    let spec = DomainSpec::new(a.n)?;
    let m = mesh::build_mesh(&spec, a.nx, a.ny, a.tol)?;
    mesh::write_mesh(&m, &a.out, format)?;
    let truncated = m.truncated_columns.iter().filter(|&&t| t).count();
    eprintln!("N={} vertices={} faces={} truncated_columns={truncated}", a.n, m.vertex_count(), m.face_count());
    Ok(0)
}

fn run_slice(a: SliceArgs) -> Result<u8, CoreError> {
    let spec = DomainSpec::new(a.n)?;
    let s = lamina_core::slice(&spec, a.x, a.m, a.tol)?;
    emit(a.out.as_deref(), &mesh::slice_csv(&s))?;
    Ok(0)
}

fn run_verify(a: VerifyArgs) -> Result<u8, CoreError> {
    let mut config = match a.n {
        Some(NList(ns)) => VerifyConfig::with_n_list(ns),
        None => VerifyConfig::default(),
    };
    config.tol = a.tol;
    config.m = a.m;
    config.slices = a.slices;
    config.seed = a.seed;
    config.delta = a.delta;
    let report = verification::run_report(&config)?;
    if !a.quiet {
        for c in &report.checks {
            let status = match (c.passed, c.direction) {
                (false, _) => "FAIL",
                (true, Direction::Report) => "info",
                (true, _) => "ok",
            };
            let margin = c.margin.map(|m| format!(" margin={m:.3e}")).unwrap_or_default();
            eprintln!("{status:>4} {:<28} measured={:.6e}{margin}", c.name, c.measured);
        }
        let s = report.summary;
        eprintln!("{}/{} passed in {:.2}s", s.passed, s.total, report.elapsed_seconds);
    }
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(if report.all_passed() { 0 } else { EXIT_FAILED })
}

fn run_sweep(a: SweepArgs) -> Result<u8, CoreError> {
    let table = sweep::sweep(a.metric, &a.n.0, a.t, a.eta, a.tol)?;
    emit(a.out.as_deref(), &table.to_csv())?;
    Ok(0)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Mesh(a) => run_mesh(a),
        Command::Slice(a) => run_slice(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
