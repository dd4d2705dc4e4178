//! The `bsize` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad arguments, 3 no base
//! exists, 4 verification failure, 5 resource limit, 6 unreadable
//! checkpoint.

pub mod cache;
pub mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bsize_core::oracle::Budget;
use bsize_core::verify::{run_suite, SUITES};
use bsize_core::{
    base_size_with, scan, scan_timed, weight_table_with, weight_tables_with, BaseSizeResult, Error,
    PassOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache::ResultCache;
use crate::table::{NPolicy, TableSpec};

pub mod exit {
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NO_BASE: u8 = 3;
    pub const VERIFY_FAILED: u8 = 4;
    pub const RESOURCE: u8 = 5;
    pub const CHECKPOINT: u8 = 6;
}

#[derive(Debug, Parser)]
#[command(
    name = "bsize",
    version,
    about = "Exact base size of Sym(n) acting on k-subsets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute b(n, k).
    Compute(ComputeArgs),
    /// Print a table of b(n, k) laid out by n (rows) and k (columns).
    Table(TableArgs),
    /// Print h_l, the number of l-tuples fixed only by the identity.
    H(HArgs),
    /// Dump the signed class weights grouped by fixed-subset count.
    Weights(PairArgs),
    /// Cross-check the engine against brute-force enumeration.
    Verify(VerifyArgs),
    /// Time the partition pass and the l-scan.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Reduction workers (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Print every (l, h_l) evaluated.
    #[arg(long)]
    pub trace: bool,
    /// Emit a JSON record instead of text.
    #[arg(long)]
    pub json: bool,
    /// Neither read nor update the result cache.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct HArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub l: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 3)]
    pub kmin: u32,
    #[arg(long)]
    pub kmax: u32,
    /// Last row; defaults to floor(kmax(kmax+1)/2), the last row with a
    /// value not given by the closed form.
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Fill cells with n >= floor(k(k+1)/2)+1 from the closed form instead
    /// of printing "-".
    #[arg(long)]
    pub fill_closed_form: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest degree to check; suites stop at their own limits.
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
    /// Suites to run (repeatable or comma-separated); default all.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Persist progress to this file while the pass runs.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Resume from a checkpoint written by an earlier run.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 60)]
    pub checkpoint_every: u64,
}

/// Parses `args` and runs the command, writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return ExitCode::from(exit::USAGE);
            }
            let _ = write!(out, "{}", e.render());
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(code_for(&e))
        }
    }
}

pub fn code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => exit::USAGE,
        Error::NoBase { .. } => exit::NO_BASE,
        Error::ResourceLimit(_) | Error::LowerBoundViolated { .. } => exit::RESOURCE,
        Error::Checkpoint { .. } => exit::CHECKPOINT,
        Error::Io(_) => exit::IO,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<u8, Error> {
    match cmd {
        Command::Compute(a) => cmd_compute(&a, out),
        Command::Table(a) => cmd_table(&a, out),
        Command::H(a) => cmd_h(&a, out),
        Command::Weights(a) => cmd_weights(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn pass_options(threads: Option<usize>) -> PassOptions {
    PassOptions {
        threads,
        ..Default::default()
    }
}

fn open_cache(disabled: bool) -> Result<Option<ResultCache>, Error> {
    if disabled {
        return Ok(None);
    }
    Ok(Some(ResultCache::open(cache::default_path())?))
}

#[derive(Serialize)]
struct ComputeRecord<'a> {
    n: u32,
    k: u32,
    b: u32,
    method: &'a str,
    trace: Vec<(u32, String)>,
}

pub fn cmd_compute(a: &ComputeArgs, out: &mut dyn Write) -> Result<u8, Error> {
    let (n, k) = (a.pair.n, a.pair.k);
    let mut cache = open_cache(a.no_cache)?;
    let wants_detail = a.trace || a.json;
    if !wants_detail {
        // validate before trusting a cached value
        if n >= 2 && k > 0 && k < n {
            if let Some(b) = cache.as_ref().and_then(|c| c.get(n, k)) {
                writeln!(out, "b({n},{k}) = {b}")?;
                return Ok(0);
            }
        }
    }
    let (result, _) = base_size_with(n, k, &pass_options(a.pair.threads))?;
    if let Some(c) = cache.as_mut() {
        c.insert(n, k, result.b)?;
    }
    print_result(&result, a.trace, a.json, out)?;
    Ok(0)
}

fn print_result(
    r: &BaseSizeResult,
    trace: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), Error> {
    let steps = r.trace.clone().unwrap_or_default();
    if json {
        let rec = ComputeRecord {
            n: r.n,
            k: r.k,
            b: r.b,
            method: r.method.as_str(),
            trace: steps.into_iter().map(|(l, h)| (l, h.to_string())).collect(),
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&rec).expect("record serializes")
        )?;
        return Ok(());
    }
    if trace {
        for (l, h) in &steps {
            writeln!(out, "h_{l} = {h}")?;
        }
    }
    writeln!(out, "b({},{}) = {}", r.n, r.k, r.b)?;
    Ok(())
}

pub fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<u8, Error> {
    let spec = TableSpec {
        k_min: a.kmin,
        k_max: a.kmax,
        n_policy: a.nmax.map_or(NPolicy::PaperRange, NPolicy::UpTo),
        fill_closed_form: a.fill_closed_form,
    };
    let mut cache = open_cache(a.no_cache)?;
    let opts = pass_options(a.threads);
    let mut fresh = std::collections::HashMap::new();
    let t = table::build(spec, |n, ks| {
        let missing: Vec<u32> = ks
            .iter()
            .copied()
            .filter(|&k| cache.as_ref().and_then(|c| c.get(n, k)).is_none())
            .collect();
        if !missing.is_empty() {
            let (tables, _) = weight_tables_with(n, &missing, &opts)?;
            for (table, &k) in tables.iter().zip(&missing) {
                let b = scan(table)?.0;
                match cache.as_mut() {
                    Some(c) => c.insert(n, k, b)?,
                    None => {
                        fresh.insert(k, b);
                    }
                }
            }
        }
        Ok(ks
            .iter()
            .map(|&k| {
                cache
                    .as_ref()
                    .and_then(|c| c.get(n, k))
                    .or_else(|| fresh.get(&k).copied())
                    .expect("every column computed")
            })
            .collect())
    })?;
    let text = match a.format {
        Format::Text => t.to_text(),
        Format::Csv => table::to_csv(&t.records()),
        Format::Json => table::to_json(&t.records()),
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

fn folded_table(a: &PairArgs) -> Result<bsize_core::WeightTable, Error> {
    let (n, k) = (a.n, a.k);
    if n < 2 || k == 0 || k >= n {
        if k == 0 || k == n {
            return Err(Error::NoBase { n, k });
        }
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and 1 <= k <= n - 1, got n = {n}, k = {k}"
        )));
    }
    Ok(weight_table_with(n, k.min(n - k), &pass_options(a.threads))?.0)
}

pub fn cmd_h(a: &HArgs, out: &mut dyn Write) -> Result<u8, Error> {
    if a.l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    let t = folded_table(&a.pair)?;
    writeln!(
        out,
        "h_{}({},{}) = {}",
        a.l,
        a.pair.n,
        a.pair.k,
        t.h_value(a.l)
    )?;
    Ok(0)
}

pub fn cmd_weights(a: &PairArgs, out: &mut dyn Write) -> Result<u8, Error> {
    let t = folded_table(a)?;
    writeln!(out, "m\tw_m")?;
    write!(out, "{t}")?;
    Ok(0)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<u8, Error> {
    let names: Vec<&str> = if a.suite.is_empty() {
        SUITES.to_vec()
    } else {
        a.suite.iter().map(String::as_str).collect()
    };
    if let Some(bad) = names.iter().find(|s| !SUITES.contains(s)) {
        return Err(Error::InvalidArgument(format!(
            "unknown suite {bad:?}; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let budget = Budget::default();
    let mut failed = false;
    for name in names {
        match run_suite(name, a.nmax, &budget) {
            Ok(r) => {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{status} {:<12} checked {:>8}  failed {:>4}  skipped degrees {}",
                    r.name,
                    r.checked,
                    r.failures.len(),
                    r.skipped
                )?;
                for f in r.failures.iter().take(20) {
                    writeln!(out, "    {f}")?;
                }
                failed |= !r.passed();
            }
            Err(Error::ResourceLimit(why)) => {
                writeln!(out, "SKIP {name:<12} {why}")?;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(if failed { exit::VERIFY_FAILED } else { 0 })
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<u8, Error> {
    let (n, k) = (a.pair.n, a.pair.k);
    let opts = PassOptions {
        threads: a.pair.threads,
        checkpoint: a.checkpoint.clone(),
        resume: a.resume.clone(),
        checkpoint_interval: Duration::from_secs(a.checkpoint_every),
    };
    if n < 2 || k == 0 || k >= n {
        // reuse the engine's own argument checks and messages
        base_size_with(n, k, &PassOptions::default())?;
    }
    let folded = k.min(n - k);
    let (table, report) = weight_table_with(n, folded, &opts)?;
    let threads = a
        .pair
        .threads
        .map_or_else(|| "default".to_string(), |t| t.to_string());
    writeln!(out, "n = {n}, k = {k}, threads = {threads}")?;
    writeln!(
        out,
        "partitions: {} ({} resumed, {} of {} chunks resumed)",
        report.partitions + report.resumed_partitions,
        report.resumed_partitions,
        report.chunks_resumed,
        report.chunks_total
    )?;
    let rate = report.partitions as f64 / secs(report.elapsed).max(1e-9);
    writeln!(
        out,
        "pass: {:.3} s, {:.0} partitions/s",
        secs(report.elapsed),
        rate
    )?;
    writeln!(out, "distinct fix counts: {}", table.distinct_counts())?;

    let start = Instant::now();
    let mut sweeps = Vec::new();
    let (b, _) = scan_timed(&table, |ls, t| sweeps.push((ls, t)))?;
    let total = start.elapsed();
    for (ls, t) in sweeps {
        let per_l = secs(t) / f64::from(ls.end() - ls.start() + 1);
        writeln!(
            out,
            "scan l = {}..{}: {:.6} s ({per_l:.6} s per l)",
            ls.start(),
            ls.end(),
            secs(t)
        )?;
    }
    writeln!(out, "scan total: {:.6} s", secs(total))?;
    writeln!(out, "b({n},{k}) = {b}")?;
    Ok(0)
}
