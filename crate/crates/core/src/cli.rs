//! Command-line front end: `space`, `grassmann`, `adjacency`, `verify` and
//! `reconstruct`.
//!
//! Exit codes: 0 success, 1 verification failure or reconstruction
//! mismatch, 2 usage error, 3 refusal by a size bound.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{all_subspaces, gaussian_binomial, Subspace};
use crate::grassmann::{AdjacencyKind, GrassmannSpace};
use crate::reconstruct::{full_pipeline, ReconstructError};
use crate::symplectic::SymplecticSpace;
use crate::verify::{run_suite, Mode, SuiteId, SuiteSpec, VerificationReport, VerifyError, PAIR_BOUND};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// `space` refuses to enumerate more subspaces than this in total.
pub const SPACE_BOUND: u128 = 2_000_000;

#[derive(Debug, Parser)]
#[command(name = "symplectica", version, about = "Grassmann spaces of tangential and regular subspaces of finite symplectic spaces")]
pub struct Cli {
    /// Worker threads for graph builds and suites (default: all cores)
    #[arg(long, global = true, env = "SYMPLECTICA_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Form, Gram matrix and subspace counts per dimension
    Space(SpaceArgs),
    /// Points and lines (pencils) of one Grassmann level
    Grassmann(LevelArgs),
    /// One adjacency graph of a Grassmann level
    Adjacency(AdjacencyArgs),
    /// Run property suites and write JSON reports
    Verify(VerifyArgs),
    /// Recover the projective space and its orthogonality from adjacency
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Collinear,
    Lower,
    Upper,
}

impl From<KindArg> for AdjacencyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Collinear => AdjacencyKind::Collinear,
            KindArg::Lower => AdjacencyKind::Lower,
            KindArg::Upper => AdjacencyKind::Upper,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long)]
    pub p: u32,
    /// Witt index; the ambient dimension is 2m
    #[arg(long)]
    pub m: usize,
    /// Print JSON instead of text
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdjacencyArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    #[arg(long, value_enum, default_value = "collinear")]
    pub kind: KindArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite A..H; all suites when absent
    #[arg(long)]
    pub suite: Option<SuiteId>,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    /// Level for suites C..H; every level when absent
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: Option<u64>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: ModeArg,
    /// Samples per check family in sample mode
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Vertex budget for maximal clique enumeration
    #[arg(long, default_value_t = PAIR_BOUND)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` (or the `--out` file) and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    // the pool may run the command on a worker, so output is buffered
    let work = || {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = dispatch(&cli.command, &mut o, &mut e);
        (code, o, e)
    };
    let (code, o, e) = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start {t} threads: {e}");
                return EXIT_USAGE;
            }
        },
        None => work(),
    };
    let _ = err.write_all(&e);
    let _ = out.write_all(&o);
    code
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Space(a) => cmd_space(a).and_then(|text| emit(a.out.as_ref(), &text, out)),
        Command::Grassmann(a) => cmd_grassmann(a).and_then(|text| emit(a.out.as_ref(), &text, out)),
        Command::Adjacency(a) => cmd_adjacency(a).and_then(|text| emit(a.level.out.as_ref(), &text, out)),
        Command::Verify(a) => cmd_verify(a, err).and_then(|(text, code)| emit(a.out.as_ref(), &text, out).map(|_| code)),
        Command::Reconstruct(a) => {
            cmd_reconstruct(a).and_then(|(text, code)| emit(a.out.as_ref(), &text, out).map(|_| code))
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

fn refused(message: impl ToString) -> Failure {
    Failure { code: EXIT_REFUSED, message: message.to_string() }
}

fn emit(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure { code: EXIT_USAGE, message: format!("cannot write output: {e}") };
    match path {
        Some(p) => fs::write(p, text).map_err(io)?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

/// Single-line JSON for bulky exports.
fn to_compact_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn open_space(p: u32, m: usize) -> Result<SymplecticSpace, Failure> {
    SymplecticSpace::standard(p, m).map_err(usage)
}

fn open_level(p: u32, m: usize, k: u64) -> Result<(SymplecticSpace, usize), Failure> {
    let s = open_space(p, m)?;
    let n = s.n();
    let k = k as usize;
    if k >= n {
        return Err(usage(format!("k must lie in 1..={} for m = {m}", n - 1)));
    }
    Ok((s, k))
}

fn level_size_ok(s: &SymplecticSpace, k: usize) -> Result<(), Failure> {
    let total = gaussian_binomial(s.n(), k, s.field().p() as u64);
    if total > SPACE_BOUND {
        return Err(refused(format!("level {k} has {total} subspaces, above the bound {SPACE_BOUND}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct LevelCounts {
    k: usize,
    subspaces: usize,
    isotropic: usize,
    regular: usize,
    tangential: usize,
    tangential_or_regular: usize,
}

fn cmd_space(a: &SpaceArgs) -> Result<String, Failure> {
    let s = open_space(a.p, a.m)?;
    let n = s.n();
    let p = s.field().p() as u64;
    let total: u128 = (0..=n).map(|k| gaussian_binomial(n, k, p)).sum();
    if total > SPACE_BOUND {
        return Err(refused(format!("{total} subspaces in all, above the bound {SPACE_BOUND}")));
    }
    let counts: Vec<LevelCounts> = (0..=n)
        .map(|k| {
            let all = all_subspaces(s.field(), n, k);
            let rdims: Vec<usize> = all.iter().map(|u| s.rdim(u)).collect();
            LevelCounts {
                k,
                subspaces: all.len(),
                isotropic: rdims.iter().filter(|&&r| r == k).count(),
                regular: rdims.iter().filter(|&&r| r == 0).count(),
                tangential: rdims.iter().filter(|&&r| r == 1).count(),
                tangential_or_regular: rdims.iter().filter(|&&r| r <= 1).count(),
            }
        })
        .collect();
    let gram = s.gram().to_nested();
    if a.json {
        return Ok(to_json(&json!({ "p": a.p, "m": a.m, "n": n, "gram": gram, "levels": counts })));
    }
    let mut text = format!("n = {n}\nm = {}\np = {}\ngram:\n", a.m, a.p);
    for row in &gram {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text.push_str(&format!("  {}\n", cells.join(" ")));
    }
    text.push_str(&format!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>9}\n", "k", "Sub", "Q", "R", "T", "T-R"));
    for c in &counts {
        text.push_str(&format!(
            "{:>3} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            c.k, c.subspaces, c.isotropic, c.regular, c.tangential, c.tangential_or_regular
        ));
    }
    Ok(text)
}

fn vertices(g: &GrassmannSpace) -> Vec<Value> {
    g.points().iter().enumerate().map(|(i, u)| json!({ "id": i, "basis": u.to_nested() })).collect()
}

fn basis_label(u: &Subspace) -> String {
    let rows: Vec<String> =
        u.to_nested().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("")).collect();
    rows.join(",")
}

fn cmd_grassmann(a: &LevelArgs) -> Result<String, Failure> {
    let (s, k) = open_level(a.p, a.m, a.k)?;
    level_size_ok(&s, k)?;
    let g = GrassmannSpace::new(&s, k).map_err(usage)?;
    let pencils = g.pencils();
    Ok(match a.format {
        Format::Json => {
            let lines: Vec<Value> = pencils
                .iter()
                .enumerate()
                .map(|(i, pen)| {
                    json!({ "id": i, "centre": pen.h.to_nested(), "carrier": pen.b.to_nested(), "points": pen.members })
                })
                .collect();
            to_compact_json(&json!({ "p": a.p, "n": s.n(), "k": k, "points": vertices(&g), "lines": lines }))
        }
        Format::Dot => {
            let mut text = format!("graph grassmann_p{}_n{}_k{} {{\n", a.p, s.n(), k);
            for (i, u) in g.points().iter().enumerate() {
                text.push_str(&format!("  p{i} [shape=circle, label=\"{}\"];\n", basis_label(u)));
            }
            for i in 0..pencils.len() {
                text.push_str(&format!("  l{i} [shape=box, label=\"l{i}\"];\n"));
            }
            for (i, pen) in pencils.iter().enumerate() {
                for x in &pen.members {
                    text.push_str(&format!("  p{x} -- l{i};\n"));
                }
            }
            text.push_str("}\n");
            text
        }
        Format::Csv => {
            let mut text = String::from("point,line\n");
            for (i, pen) in pencils.iter().enumerate() {
                for x in &pen.members {
                    text.push_str(&format!("{x},{i}\n"));
                }
            }
            text
        }
    })
}

fn cmd_adjacency(a: &AdjacencyArgs) -> Result<String, Failure> {
    let l = &a.level;
    let (s, k) = open_level(l.p, l.m, l.k)?;
    level_size_ok(&s, k)?;
    let kind: AdjacencyKind = a.kind.into();
    let g = GrassmannSpace::new(&s, k).map_err(usage)?;
    let adj = g.graph(kind);
    let edges: Vec<(u32, u32)> = adj.edges().collect();
    Ok(match l.format {
        Format::Json => {
            let edges: Vec<[u32; 2]> = edges.iter().map(|&(i, j)| [i, j]).collect();
            to_compact_json(&json!({
                "p": l.p, "n": s.n(), "k": k, "kind": kind.to_string(),
                "vertices": vertices(&g), "edges": edges,
            }))
        }
        Format::Dot => {
            let mut text = format!("graph {kind}_p{}_n{}_k{} {{\n", l.p, s.n(), k);
            for (i, u) in g.points().iter().enumerate() {
                text.push_str(&format!("  {i} [label=\"{}\"];\n", basis_label(u)));
            }
            for (i, j) in edges {
                text.push_str(&format!("  {i} -- {j};\n"));
            }
            text.push_str("}\n");
            text
        }
        Format::Csv => {
            let mut text = String::from("source,target\n");
            for (i, j) in edges {
                text.push_str(&format!("{i},{j}\n"));
            }
            text
        }
    })
}

fn cmd_verify(a: &VerifyArgs, err: &mut dyn Write) -> Result<(String, i32), Failure> {
    let s = open_space(a.p, a.m)?;
    let n = s.n();
    if let Some(k) = a.k {
        if k as usize >= n {
            return Err(usage(format!("k must lie in 1..={} for m = {}", n - 1, a.m)));
        }
    }
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sample => Mode::Sampled { seed: a.seed, count: a.samples as usize },
    };
    let suites: Vec<SuiteId> = match a.suite {
        Some(x) => vec![x],
        None => SuiteId::ALL.to_vec(),
    };
    let mut specs = Vec::new();
    for suite in suites {
        let levels: Vec<Option<usize>> = match (suite, a.k) {
            (SuiteId::B, _) => vec![None],
            (SuiteId::A, k) => vec![k.map(|k| k as usize)],
            (_, Some(k)) => vec![Some(k as usize)],
            (_, None) => (1..n).map(Some).collect(),
        };
        for k in levels {
            let mut spec = SuiteSpec::new(suite, a.p, a.m, k, mode);
            spec.inject_fault = a.inject_fault.clone();
            specs.push(spec);
        }
    }
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut refusals = 0;
    for spec in &specs {
        match run_suite(spec) {
            Ok(r) => {
                let _ = writeln!(
                    err,
                    "suite {} k={} {}: {} checks, {} failures",
                    r.suite,
                    spec.instance.k.map_or("-".to_string(), |k| k.to_string()),
                    if r.pass { "PASS" } else { "FAIL" },
                    r.checks_run,
                    r.failures.len()
                );
                reports.push(r);
            }
            Err(e @ VerifyError::SizeBound { .. }) => {
                if specs.len() == 1 {
                    return Err(refused(e));
                }
                let _ = writeln!(err, "suite {} refused: {e}", spec.suite);
                refusals += 1;
            }
            Err(e @ VerifyError::Reconstruct(ReconstructError::Budget(_))) => return Err(refused(e)),
            Err(e) => return Err(usage(e)),
        }
    }
    let failed = reports.iter().any(|r| !r.pass);
    let code = if failed {
        EXIT_FAILURE
    } else if refusals > 0 {
        EXIT_REFUSED
    } else {
        EXIT_OK
    };
    let text = if reports.len() == 1 { to_json(&reports[0]) } else { to_json(&reports) };
    Ok((text, code))
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<(String, i32), Failure> {
    let (s, k) = open_level(a.p, a.m, a.k)?;
    level_size_ok(&s, k)?;
    let out = match full_pipeline(&s, k, a.budget) {
        Ok(o) => o,
        Err(e @ ReconstructError::Budget(_)) => return Err(refused(e)),
        Err(e) => return Err(usage(e)),
    };
    let geo = &out.geometry;
    let perp: Vec<[u32; 2]> = geo.perp.edges().map(|(i, j)| [i, j]).collect();
    let provenance: Vec<Value> = out.provenance.iter().map(|u| json!(u.to_nested())).collect();
    let text = to_compact_json(&json!({
        "report": out.report,
        "geometry": {
            "point_count": geo.point_count,
            "copolar_line_count": geo.copolar_line_count,
            "lines": geo.lines,
            "perp": perp,
        },
        "provenance": provenance,
    }));
    let code = if out.report.matches { EXIT_OK } else { EXIT_FAILURE };
    Ok((text, code))
}
