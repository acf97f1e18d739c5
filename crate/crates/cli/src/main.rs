use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2hash::baseline::{bench, render_table, BenchConfig, BenchMode};
use g2hash::graph::{
    x5_minus_x_check, build_graph_with, find_path, replay_trace, verify_connectivity, verify_counts, verify_edges,
    ExportFormat, GraphSnapshot, KernelDescriptor, PathStep, Report, Vertex,
};
use g2hash::{kat, HashContext, Outcome};
use num_bigint::BigUint;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BOTTOM: u8 = 3;

#[derive(Parser)]
#[command(name = "g2hash", version, about = "Genus-2 isogeny hash and (2,2)-graph explorer")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hash a message.
    Hash(HashArgs),
    /// Build the superspecial graph for a small prime and check it.
    Explore(ExploreArgs),
    /// Find a path between two vertices.
    Path(PathArgs),
    /// Compare the genus-2 walk against the elliptic baseline.
    Bench(BenchArgs),
    /// Run the built-in known-answer and graph checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct HashArgs {
    /// Security level; picks the prime.
    #[arg(long, default_value_t = 128, conflicts_with = "prime")]
    lambda: u32,
    /// Explicit prime p = 5 mod 6.
    #[arg(long)]
    prime: Option<BigUint>,
    /// Input file, or `-` for stdin.
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["hex", "digits"])]
    input: Option<String>,
    /// Message given as hex.
    #[arg(long, conflicts_with = "digits")]
    hex: Option<String>,
    /// Walk these base-8 digits as they are, without padding, and print the invariants.
    #[arg(long)]
    digits: Option<String>,
    /// Compute the three square roots of each step in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct ExploreArgs {
    p: u64,
    /// Largest prime accepted.
    #[arg(long, default_value_t = 199)]
    bound: u64,
    #[arg(long, value_parser = ["dot", "json"])]
    format: Option<String>,
    /// Where to write the export; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the connectivity checks.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct PathArgs {
    p: u64,
    /// Vertex label such as `J(1,2,3)` or an index into the sorted vertex list.
    from: String,
    to: String,
    /// Use only good extensions after the first step.
    #[arg(long)]
    good_only: bool,
    #[arg(long, default_value_t = 199)]
    bound: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated security levels.
    #[arg(long, value_delimiter = ',', default_values_t = [128u32, 192, 256])]
    lambda: Vec<u32>,
    /// Comma-separated modes: g2-seq, g2-par, cgl, 3cgl.
    #[arg(long, value_delimiter = ',')]
    mode: Vec<BenchMode>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Message length in bits.
    #[arg(long, default_value_t = 100)]
    bits: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Print JSON lines instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Additional vectors in the tab-separated KAT format.
    #[arg(long)]
    kat: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Hash(a) => cmd_hash(a),
        Cmd::Explore(a) => cmd_explore(a),
        Cmd::Path(a) => cmd_path(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn fail(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_FAIL, msg: e.to_string() }
}

type CmdResult = Result<u8, Failure>;

fn read_message(a: &HashArgs) -> Result<Vec<u8>, Failure> {
    if let Some(h) = &a.hex {
        return hex::decode(h.trim()).map_err(|e| usage(format!("--hex: {e}")));
    }
    let mut buf = Vec::new();
    match a.input.as_deref() {
        None | Some("-") => io::stdin().read_to_end(&mut buf).map(|_| buf).map_err(fail),
        Some(path) => fs::read(path).map_err(|e| usage(format!("{path}: {e}"))),
    }
}

fn cmd_hash(a: HashArgs) -> CmdResult {
    let ctx = match &a.prime {
        Some(p) => HashContext::with_prime(p.clone()),
        None => HashContext::for_security(a.lambda),
    }
    .map_err(|e| usage(e.to_string()))?;
    let digits: Option<Vec<u8>> = match &a.digits {
        Some(d) => Some(
            d.chars()
                .map(|c| c.to_digit(8).map(|x| x as u8))
                .collect::<Option<_>>()
                .ok_or_else(|| usage("--digits takes base-8 digits only"))?,
        ),
        None => None,
    };
    println!("{}", ctx.descriptor());
    if let Some(digits) = digits {
        return match ctx.hash_digits_with(&digits, a.parallel).map_err(fail)? {
            Outcome::Value(t) => {
                println!("{t}");
                println!("{}", t.to_hex());
                Ok(0)
            }
            Outcome::Bottom { step } => bottom(step),
        };
    }
    let msg = read_message(&a)?;
    match ctx.hash_bytes_with(&msg, a.parallel).map_err(fail)? {
        Outcome::Value(d) => {
            println!("{d}");
            Ok(0)
        }
        Outcome::Bottom { step } => bottom(step),
    }
}

fn bottom(step: usize) -> CmdResult {
    println!("bottom");
    eprintln!("walk reached a product of elliptic curves at step {step}");
    Ok(EXIT_BOTTOM)
}

fn load_graph(p: u64, bound: u64) -> Result<GraphSnapshot, Failure> {
    build_graph_with(p, bound).map_err(|e| usage(e.to_string()))
}

fn cmd_explore(a: ExploreArgs) -> CmdResult {
    let g = load_graph(a.p, a.bound)?;
    if let Some(f) = &a.format {
        let bytes = g.export(f.parse::<ExportFormat>().map_err(usage)?);
        match &a.out {
            Some(path) => fs::write(path, bytes).map_err(fail)?,
            None => io::stdout().write_all(&bytes).map_err(fail)?,
        }
        if a.out.is_none() {
            return Ok(0);
        }
    }
    println!(
        "p={} vertices={} jacobians={} products={} edges={}",
        g.p(),
        g.vertices().len(),
        g.jacobian_count(),
        g.product_count(),
        g.edges().len()
    );
    let mut report = verify_counts(&g).map_err(fail)?;
    report.extend(verify_edges(&g).map_err(fail)?);
    if !a.quick {
        report.extend(verify_connectivity(&g).map_err(fail)?);
    }
    print!("{report}");
    Ok(if report.all_pass() { 0 } else { EXIT_FAIL })
}

fn resolve(g: &GraphSnapshot, s: &str) -> Result<Vertex, Failure> {
    let s = s.trim();
    if let Ok(i) = s.parse::<usize>() {
        return g.vertices().get(i).cloned().ok_or_else(|| usage(format!("no vertex with index {i}")));
    }
    let want: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    g.vertices()
        .iter()
        .find(|v| v.label() == want)
        .cloned()
        .ok_or_else(|| usage(format!("no vertex {s} at p={}", g.p())))
}

fn step_text(s: &PathStep) -> String {
    match s {
        PathStep::Digit(d) => format!("digit {d}"),
        PathStep::Edge(KernelDescriptor::Splitting(k)) => format!("splitting {k}"),
        PathStep::Edge(KernelDescriptor::ProductSplit(i, j)) => format!("product-split {i} {j}"),
        PathStep::Edge(KernelDescriptor::Diagonal(k)) => format!("diagonal {k}"),
    }
}

fn cmd_path(a: PathArgs) -> CmdResult {
    let g = load_graph(a.p, a.bound)?;
    let from = resolve(&g, &a.from)?;
    let to = resolve(&g, &a.to)?;
    let Some(path) = find_path(&g, &from, &to, a.good_only).map_err(fail)? else {
        println!("no path");
        return Ok(EXIT_FAIL);
    };
    let trace = replay_trace(&g, &from, &path).map_err(fail)?;
    if trace.last() != Some(&to) {
        return Err(fail("path does not replay to the target"));
    }
    println!("{}", from.label());
    for (step, v) in path.iter().zip(&trace[1..]) {
        println!("  {} -> {}", step_text(step), v.label());
    }
    println!("length {}", path.len());
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.bits == 0 || a.samples == 0 {
        return Err(usage("--bits and --samples must be positive"));
    }
    let modes = if a.mode.is_empty() { BenchMode::ALL.to_vec() } else { a.mode };
    let mut reports = Vec::new();
    for &lambda in &a.lambda {
        let cfg = BenchConfig { lambda, message_bits: a.bits, samples: a.samples, seed: a.seed };
        for &m in &modes {
            let r = bench(&cfg, m).map_err(|e| usage(e.to_string()))?;
            if a.json {
                println!("{}", serde_json::to_string(&r).map_err(fail)?);
            }
            reports.push(r);
        }
    }
    if !a.json {
        print!("{}", render_table(&reports));
    }
    Ok(0)
}

fn run_kats(label: &str, vectors: &[kat::KatVector], report: &mut Vec<String>) -> Result<bool, Failure> {
    let mut ok = true;
    for parallel in [false, true] {
        let results = kat::run(vectors, parallel).map_err(fail)?;
        let bad: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        let mode = if parallel { "parallel" } else { "sequential" };
        if bad.is_empty() {
            report.push(format!("SELFTEST {label}-{mode} PASS {} vectors", results.len()));
        } else {
            ok = false;
            report.push(format!("SELFTEST {label}-{mode} FAIL {}", bad.join(" ")));
        }
    }
    Ok(ok)
}

fn cmd_selftest(a: SelftestArgs) -> CmdResult {
    let mut lines = Vec::new();
    let embedded = kat::parse(kat::EMBEDDED).map_err(fail)?;
    let mut ok = run_kats("kat", &embedded, &mut lines)?;
    if let Some(path) = &a.kat {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let extra = kat::parse(&text).map_err(|e| usage(e.to_string()))?;
        ok &= run_kats("kat-file", &extra, &mut lines)?;
    }
    let mut report = Report(Vec::new());
    report.extend(x5_minus_x_check(5).map_err(fail)?);
    let g = load_graph(13, 13)?;
    report.extend(verify_counts(&g).map_err(fail)?);
    report.extend(verify_edges(&g).map_err(fail)?);
    let mut mult: Vec<usize> = g.multiplicities().into_values().collect();
    mult.sort_unstable();
    let shape = g.jacobian_count() == 3 && g.product_count() == 1 && g.edges().len() == 60;
    ok &= report.all_pass() && shape;
    for l in lines {
        println!("{l}");
    }
    print!("{report}");
    println!(
        "SELFTEST graph-13 {} jacobians={} products={} multiplicities={mult:?}",
        if shape { "PASS" } else { "FAIL" },
        g.jacobian_count(),
        g.product_count()
    );
    Ok(if ok { 0 } else { EXIT_FAIL })
}
